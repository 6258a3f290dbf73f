//! Key/value and tabular output in pretty or CSV form.

use std::fmt::Write as _;

use crate::Format;

enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
}

impl Cell {
    fn render(&self, format: Format) -> String {
        match (self, format) {
            (Cell::Num(x), Format::Csv) => format!("{x:.16e}"),
            (Cell::Num(x), Format::Pretty) => pretty_num(*x),
            (Cell::Int(n), _) => n.to_string(),
            (Cell::Text(s), _) => s.clone(),
        }
    }
}

/// Ten significant digits, fixed-point in the everyday range.
fn pretty_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..9).contains(&mag) {
        format!("{:.*}", (9 - mag).max(0) as usize, x)
    } else {
        format!("{x:.9e}")
    }
}

/// Rows of named cells. A one-row report prints as `key  value` lines in
/// pretty mode and as a header plus one line in CSV mode.
#[derive(Default)]
pub struct Report {
    keys: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new() -> Self {
        Self {
            keys: Vec::new(),
            rows: vec![Vec::new()],
        }
    }

    /// A multi-row table with fixed columns.
    pub fn table(keys: Vec<&'static str>) -> Self {
        Self { keys, rows: Vec::new() }
    }

    fn push(&mut self, key: &'static str, c: Cell) -> &mut Self {
        self.keys.push(key);
        self.rows[0].push(c);
        self
    }

    pub fn num(&mut self, key: &'static str, x: f64) -> &mut Self {
        self.push(key, Cell::Num(x))
    }

    pub fn int(&mut self, key: &'static str, n: usize) -> &mut Self {
        self.push(key, Cell::Int(n))
    }

    pub fn text(&mut self, key: &'static str, s: String) -> &mut Self {
        self.push(key, Cell::Text(s))
    }

    /// Appends a table row of text cells and numbers.
    pub fn row(&mut self, cells: Vec<RowCell>) {
        self.rows.push(
            cells
                .into_iter()
                .map(|c| match c {
                    RowCell::Num(x) => Cell::Num(x),
                    RowCell::Text(s) => Cell::Text(s),
                })
                .collect(),
        );
    }

    pub fn render(&self, format: Format) -> String {
        let mut s = String::new();
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(|c| c.render(format)).collect()).collect();
        match format {
            Format::Csv => {
                let _ = writeln!(s, "{}", self.keys.join(","));
                for r in &cells {
                    let _ = writeln!(s, "{}", r.join(","));
                }
            }
            Format::Pretty if self.rows.len() == 1 => {
                let w = self.keys.iter().map(|k| k.len()).max().unwrap_or(0);
                for (k, v) in self.keys.iter().zip(&cells[0]) {
                    let _ = writeln!(s, "{k:<w$}  {v}");
                }
            }
            Format::Pretty => {
                let widths: Vec<usize> = (0..self.keys.len())
                    .map(|i| cells.iter().map(|r| r[i].len()).chain([self.keys[i].len()]).max().unwrap_or(0))
                    .collect();
                let line = |items: Vec<&str>| {
                    items
                        .iter()
                        .zip(&widths)
                        .map(|(x, w)| format!("{x:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                };
                let _ = writeln!(s, "{}", line(self.keys.clone()));
                for r in &cells {
                    let _ = writeln!(s, "{}", line(r.iter().map(String::as_str).collect()));
                }
            }
        }
        s
    }
}

pub enum RowCell {
    Num(f64),
    Text(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pretty_numbers() {
        assert_eq!(pretty_num(std::f64::consts::E), "2.718281828");
        assert_eq!(pretty_num(-54365.63661), "-54365.63661");
        assert_eq!(pretty_num(1.5e-7), "1.500000000e-7");
        assert_eq!(pretty_num(0.0), "0");
    }

    #[test]
    fn csv_is_header_plus_row() {
        let mut r = Report::new();
        r.num("gain", 2.5).int("n", 3).text("mode", "one-arm".into());
        assert_eq!(r.render(Format::Csv), "gain,n,mode\n2.5000000000000000e0,3,one-arm\n");
        assert_eq!(r.render(Format::Pretty), "gain  2.500000000\nn     3\nmode  one-arm\n");
    }

    #[test]
    fn tables_align() {
        let mut t = Report::table(vec!["check", "status"]);
        t.row(vec![RowCell::Text("a".into()), RowCell::Text("PASS".into())]);
        t.row(vec![RowCell::Text("longer".into()), RowCell::Text("FAIL".into())]);
        assert_eq!(t.render(Format::Pretty), "check   status\na       PASS\nlonger  FAIL\n");
    }
}
