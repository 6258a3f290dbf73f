mod config;
mod report;
mod validate;

use std::env;
use std::ffi::OsString;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussint::michelson::{self, InterferometerParams};
use gaussint::optimizer::{self, ArmMode, AxisRange, SweepSpec, XiPolicy, XI_GUARD};
use gaussint::radiation_pressure::{self, RadiationPressureParams};
use gaussint::closed_form;

use report::Report;

/// Squeezing used by point commands when `--r` is not given.
const DEFAULT_R_POINT: f64 = 0.5;
/// Squeezing used by threshold commands when `--r` is not given; strong
/// enough that the finite-r thresholds sit close to their limits.
const DEFAULT_R_THRESHOLD: f64 = 4.0;
const DEFAULT_ALPHA: f64 = 100.0;
const DEFAULT_T_AXIS: &str = "0.01:1:100";
const DEFAULT_GAMMA_AXIS: &str = "0:3:61";

#[derive(Parser, Debug)]
#[command(
    name = "gaussint",
    version,
    about = "Phase sensitivity of a Michelson interferometer fed with two-mode squeezed coherent light"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact sensitivity, ⟨J3⟩, Var(J3) and gain at one point.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Sensitivity(PointArgs),
    /// Closed-form gain over a (gamma, T) grid, with the G = 1 boundary.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Optimal squeezing angle on the theta1 = 0, theta2 = pi + xi line.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Optimize(PointArgs),
    /// Transmissivity at which the gain falls to 1.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Boundary(BoundaryArgs),
    /// Radiation-pressure phase error and the counting trade-off.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Rp(RpArgs),
    /// Oracle and asymptotic agreement checks, as a pass/fail table.
    #[command(args_override_self = true)]
    Validate(ValidateArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Pretty,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Pretty => "pretty",
            Format::Csv => "csv",
        }
    }
}

fn angle(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    if t.ends_with("deg") || t.ends_with("degrees") || t.ends_with('°') {
        return Err(format!("{s:?}: angles are radians only (multiply degrees by pi/180)"));
    }
    t.parse::<f64>().map_err(|e| format!("{s:?}: {e}"))
}

#[derive(Args, Debug, Clone, Default)]
struct ParamArgs {
    /// Coherent amplitude in mode a [default: 100]
    #[arg(long)]
    alpha: Option<f64>,
    /// Coherent amplitude in mode b [default: 100]
    #[arg(long)]
    beta: Option<f64>,
    /// Coherent phase of mode a, radians [default: 0]
    #[arg(long, value_parser = angle)]
    theta1: Option<f64>,
    /// Coherent phase of mode b, radians [default: 0]
    #[arg(long, value_parser = angle)]
    theta2: Option<f64>,
    /// Squeezing magnitude
    #[arg(long)]
    r: Option<f64>,
    /// Squeezing angle, radians [default: 0]
    #[arg(long, value_parser = angle)]
    xi: Option<f64>,
    /// Set theta1 = 0 and theta2 = pi + xi
    #[arg(long = "theta-pi", conflicts_with_all = ["theta1", "theta2"])]
    theta_pi: bool,
    /// Intensity transmissivity of arm a [default: 1]
    #[arg(long = "Ta")]
    t_a: Option<f64>,
    /// Intensity transmissivity of arm b [default: 1]
    #[arg(long = "Tb")]
    t_b: Option<f64>,
    /// Thermal occupation mixed into arm a [default: 0]
    #[arg(long = "gamma-a")]
    gamma_a: Option<f64>,
    /// Thermal occupation mixed into arm b [default: 0]
    #[arg(long = "gamma-b")]
    gamma_b: Option<f64>,
    /// Interferometer phase, radians [default: 0]
    #[arg(long, value_parser = angle)]
    phi: Option<f64>,
}

impl ParamArgs {
    fn resolve(&self, default_r: f64) -> InterferometerParams {
        let xi = self.xi.unwrap_or(0.0);
        let (theta1, theta2) = if self.theta_pi {
            (0.0, PI + xi)
        } else {
            (self.theta1.unwrap_or(0.0), self.theta2.unwrap_or(0.0))
        };
        InterferometerParams {
            alpha: self.alpha.unwrap_or(DEFAULT_ALPHA),
            beta: self.beta.unwrap_or(DEFAULT_ALPHA),
            theta1,
            theta2,
            r: self.r.unwrap_or(default_r),
            xi,
            t_a: self.t_a.unwrap_or(1.0),
            t_b: self.t_b.unwrap_or(1.0),
            gamma_a: self.gamma_a.unwrap_or(0.0),
            gamma_b: self.gamma_b.unwrap_or(0.0),
            phi: self.phi.unwrap_or(0.0),
        }
    }

    fn entries(&self, out: &mut Vec<(&'static str, String)>) {
        let opts = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("theta1", self.theta1),
            ("theta2", self.theta2),
            ("r", self.r),
            ("xi", self.xi),
            ("Ta", self.t_a),
            ("Tb", self.t_b),
            ("gamma-a", self.gamma_a),
            ("gamma-b", self.gamma_b),
            ("phi", self.phi),
        ];
        out.extend(opts.into_iter().filter_map(|(k, v)| v.map(|v| (k, v.to_string()))));
        if self.theta_pi {
            out.push(("theta-pi", "true".into()));
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
struct OutputArgs {
    /// Read `key = value` flag defaults from a file; flags on the command line win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the effective flags as a config file and exit
    #[arg(long = "dump-config")]
    dump_config: bool,
    /// Output style [default: pretty]
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout (the grid CSV for `sweep`)
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Pretty)
    }

    fn entries(&self, out: &mut Vec<(&'static str, String)>) {
        if let Some(f) = self.format {
            out.push(("format", f.name().into()));
        }
        if let Some(p) = &self.out {
            out.push(("out", p.display().to_string()));
        }
    }

    fn emit(&self, report: &Report) -> Result<()> {
        let text = report.render(self.format());
        match &self.out {
            Some(p) => std::fs::write(p, text).with_context(|| format!("--out: cannot write {}", p.display())),
            None => {
                io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

#[derive(Args, Debug, Clone)]
struct PointArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
struct XiArgs {
    /// Fixed squeezing angle, radians [default: 0]
    #[arg(long, value_parser = angle, conflicts_with = "xi_opt")]
    xi: Option<f64>,
    /// Optimise the squeezing angle in every cell
    #[arg(long = "xi-opt")]
    xi_opt: bool,
}

impl XiArgs {
    fn policy(&self) -> XiPolicy {
        if self.xi_opt {
            XiPolicy::Optimized
        } else {
            XiPolicy::Fixed(self.xi.unwrap_or(0.0))
        }
    }

    fn entries(&self, out: &mut Vec<(&'static str, String)>) {
        if let Some(xi) = self.xi {
            out.push(("xi", xi.to_string()));
        }
        if self.xi_opt {
            out.push(("xi-opt", "true".into()));
        }
    }
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    /// Which arms carry the loss and noise [default: one-arm]
    #[arg(long)]
    mode: Option<ArmMode>,
    /// Squeezing magnitude [default: 4]
    #[arg(long)]
    r: Option<f64>,
    #[command(flatten)]
    xi: XiArgs,
    /// Transmissivity axis min:max:count [default: 0.01:1:100]
    #[arg(long)]
    t: Option<AxisRange>,
    /// Thermal occupation axis min:max:count [default: 0:3:61]
    #[arg(long)]
    gamma: Option<AxisRange>,
    /// Also write the `gamma,T_star` boundary CSV here
    #[arg(long = "boundary-out")]
    boundary_out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
struct BoundaryArgs {
    /// Which arms carry the loss and noise [default: one-arm]
    #[arg(long)]
    mode: Option<ArmMode>,
    /// Thermal occupation [default: 0]
    #[arg(long)]
    gamma: Option<f64>,
    /// Squeezing magnitude for the finite-r bisection [default: 4]
    #[arg(long)]
    r: Option<f64>,
    #[command(flatten)]
    xi: XiArgs,
    /// Also bisect the exact engine at alpha = beta = this amplitude
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
struct RpArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Optical angular frequency, rad/s
    #[arg(long)]
    omega: Option<f64>,
    /// Measurement time, s
    #[arg(long)]
    tau: Option<f64>,
    /// Mirror mass, kg
    #[arg(long)]
    mass: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
struct ValidateArgs {
    /// Random small-amplitude points for the Fock oracle check [default: 5]
    #[arg(long)]
    points: Option<usize>,
    /// Seed for the random draws [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

/// Exit status for failed checks in `validate` and for numerical errors.
const EXIT_NUMERICAL: u8 = 3;
const EXIT_USAGE: u8 = 2;

/// Flag that sets a library parameter, for error messages.
fn flag_for(name: &str) -> String {
    match name {
        "t_a" => "--Ta".into(),
        "t_b" => "--Tb".into(),
        "gamma_a" => "--gamma-a".into(),
        "gamma_b" => "--gamma-b".into(),
        "t_range" => "--t".into(),
        "gamma_range" => "--gamma".into(),
        other => format!("--{other}"),
    }
}

fn describe(err: &anyhow::Error) -> (String, u8) {
    use gaussint::Error as E;
    let Some(g) = err.downcast_ref::<E>() else {
        return (format!("{err:#}"), EXIT_USAGE);
    };
    let code = if g.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE };
    let msg = match g {
        E::InvalidParameter { name, reason } => format!("{}: {reason}", flag_for(name)),
        E::SingularXi { xi } => format!(
            "--xi {xi}: cos²(xi) vanishes here; keep |xi| below pi/2 - {XI_GUARD}"
        ),
        E::DegeneratePoint { phi, derivative } => format!(
            "--phi {phi}: d<J3>/dphi = {derivative:e} is zero to working precision; move --phi off this point"
        ),
        E::NoBracket { lo, hi } => format!(
            "gain never crosses 1 for T in [{lo}, {hi}]; widen --t or lower --gamma"
        ),
        E::AssumptionViolated(s) => format!("{s}; adjust --alpha/--beta or the phase flags"),
        other => other.to_string(),
    };
    (msg, code)
}

/// Angle flags are radians only; any `--…deg…` spelling is refused up front.
fn reject_degree_flags(args: &[OsString]) -> Result<()> {
    for a in args {
        let s = a.to_string_lossy();
        if let Some(name) = s.strip_prefix("--") {
            let name = name.split('=').next().unwrap_or(name);
            if name.contains("deg") {
                bail!("--{name}: angles are accepted in radians only; drop the degree flag and pass radians");
            }
        }
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    let Ok(v) = env::var("GAUSSINT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("GAUSSINT_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("GAUSSINT_THREADS: cannot size the thread pool")
}

fn dump(mut entries: Vec<(&'static str, String)>, output: &OutputArgs) -> Result<()> {
    output.entries(&mut entries);
    io::stdout().write_all(config::render(&entries).as_bytes())?;
    Ok(())
}

fn run_sensitivity(a: &PointArgs) -> Result<()> {
    let p = a.params.resolve(DEFAULT_R_POINT);
    let s = michelson::sensitivity(&p)?;
    let mut r = Report::new();
    r.num("j3_mean", s.j3_mean)
        .num("j3_variance", s.j3_variance)
        .num("dj3_dphi", s.dj3_dphi)
        .num("delta_phi", s.delta_phi)
        .num("n_bar", s.n_bar)
        .num("delta_phi_sn_sq", s.delta_phi_sn_sq)
        .num("gain", s.gain);
    a.output.emit(&r)
}

fn run_optimize(a: &PointArgs) -> Result<()> {
    let p = a.params.resolve(DEFAULT_R_POINT).with_theta_pi();
    let bounds = (-FRAC_PI_2 + XI_GUARD, FRAC_PI_2 - XI_GUARD);
    let (xi, gain) = optimizer::optimize_xi(&p, bounds)?;
    let best = InterferometerParams { xi, ..p }.with_theta_pi();
    let mut r = Report::new();
    r.num("xi_star", xi)
        .num("gain_star", gain)
        .num("gain_xi0", closed_form::gain_leading(&InterferometerParams { xi: 0.0, ..p }.with_theta_pi())?)
        .num("gain_engine", michelson::gain(&best)?);
    a.output.emit(&r)
}

fn run_sweep(a: &SweepArgs) -> Result<()> {
    let r = a.r.unwrap_or(DEFAULT_R_THRESHOLD);
    let spec = SweepSpec {
        t_range: a.t.unwrap_or_else(|| DEFAULT_T_AXIS.parse().expect("default axis")),
        gamma_range: a.gamma.unwrap_or_else(|| DEFAULT_GAMMA_AXIS.parse().expect("default axis")),
        fixed: InterferometerParams::theta_pi(DEFAULT_ALPHA, DEFAULT_ALPHA, r, 0.0),
        mode: a.mode.unwrap_or(ArmMode::OneArm),
        xi_policy: a.xi.policy(),
    };
    let grid = optimizer::sweep(&spec)?;
    if let Some(path) = &a.boundary_out {
        let f = File::create(path).with_context(|| format!("--boundary-out: cannot create {}", path.display()))?;
        let mut w = BufWriter::new(f);
        grid.write_boundary_csv(&mut w)?;
        w.flush()?;
    }
    let Some(path) = &a.output.out else {
        let stdout = io::stdout();
        let mut w = BufWriter::new(stdout.lock());
        grid.write_csv(&mut w)?;
        w.flush()?;
        return Ok(());
    };
    let f = File::create(path).with_context(|| format!("--out: cannot create {}", path.display()))?;
    let mut w = BufWriter::new(f);
    grid.write_csv(&mut w)?;
    w.flush()?;

    let passed = grid.spot_checks.iter().filter(|c| c.passed()).count();
    let worst = grid.spot_checks.iter().map(|c| c.rel_err()).fold(0.0, f64::max);
    let mut rep = Report::new();
    rep.text("mode", spec.mode.to_string())
        .text("xi", spec.xi_policy.to_string())
        .num("r", r)
        .int("gamma_rows", grid.gamma_values.len())
        .int("t_columns", grid.t_values.len())
        .int("boundary_points", grid.boundary.len())
        .text("spot_checks", format!("{passed}/{}", grid.spot_checks.len()))
        .num("spot_check_max_rel_err", worst)
        .text("grid_csv", path.display().to_string());
    io::stdout().write_all(rep.render(a.output.format()).as_bytes())?;
    Ok(())
}

fn run_boundary(a: &BoundaryArgs) -> Result<()> {
    let mode = a.mode.unwrap_or(ArmMode::OneArm);
    let gamma = a.gamma.unwrap_or(0.0);
    let r = a.r.unwrap_or(DEFAULT_R_THRESHOLD);
    let policy = a.xi.policy();
    if !(gamma >= 0.0 && gamma.is_finite()) {
        bail!(gaussint::Error::InvalidParameter {
            name: "gamma",
            reason: format!("must be finite and >= 0, got {gamma}"),
        });
    }
    if let XiPolicy::Fixed(xi) = policy {
        if !xi.is_finite() || xi.abs() > FRAC_PI_2 - XI_GUARD {
            bail!(gaussint::Error::SingularXi { xi });
        }
    }
    let t = optimizer::boundary_closed_form(mode, gamma, r, policy, 1e-3, 1.0)?;
    let mut rep = Report::new();
    rep.text("mode", mode.to_string())
        .text("xi", policy.to_string())
        .num("gamma", gamma)
        .num("r", r)
        .num("t_star", t)
        .num("loss_tolerated", 1.0 - t)
        .num("t_star_strong_squeezing", optimizer::boundary_analytic(mode, gamma, policy)?);
    if let Some(alpha) = a.alpha {
        rep.num("t_star_engine", optimizer::boundary_engine(mode, gamma, r, policy, alpha, 1e-3, 1.0)?);
    }
    a.output.emit(&rep)
}

fn run_rp(a: &RpArgs) -> Result<()> {
    let need = |name: &'static str, v: Option<f64>| {
        v.ok_or_else(|| {
            anyhow::Error::new(gaussint::Error::InvalidParameter {
                name,
                reason: "required by `rp`".into(),
            })
        })
    };
    let ip = a.params.resolve(DEFAULT_R_POINT);
    let p = RadiationPressureParams::new(need("omega", a.omega)?, need("tau", a.tau)?, need("mass", a.mass)?, ip)?;
    let mut rep = Report::new();
    rep.num("prefactor", p.prefactor())
        .num("momentum_diff_variance", radiation_pressure::momentum_diff_variance(&ip))
        .num("momentum_diff_variance_exact", radiation_pressure::momentum_diff_variance_exact(&ip))
        .num("momentum_diff_variance_engine", radiation_pressure::momentum_diff_variance_engine(&ip)?);
    if ip.alpha == ip.beta {
        rep.num("rp_phase_error", radiation_pressure::rp_phase_error(&p)?);
        if ip.t_a == 1.0 && ip.t_b == 1.0 && ip.gamma_a == 0.0 && ip.gamma_b == 0.0 {
            let t = radiation_pressure::tradeoff_report(&p)?;
            rep.num("counting_gain", t.counting_gain)
                .num("rp_penalty", t.rp_penalty)
                .num("tradeoff_product", t.product);
        }
    }
    a.output.emit(&rep)
}

fn run_validate(a: &ValidateArgs) -> Result<bool> {
    let checks = validate::run(a.points.unwrap_or(5), a.seed.unwrap_or(1))?;
    let ok = checks.iter().all(|c| c.pass || !c.counted);
    a.output.emit(&validate::table(&checks))?;
    Ok(ok)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let mut e = Vec::new();
    match &cli.command {
        Command::Sensitivity(a) | Command::Optimize(a) if a.output.dump_config => {
            a.params.entries(&mut e);
            dump(e, &a.output)?;
        }
        Command::Sensitivity(a) => run_sensitivity(a)?,
        Command::Optimize(a) => run_optimize(a)?,
        Command::Sweep(a) if a.output.dump_config => {
            if let Some(m) = a.mode {
                e.push(("mode", m.to_string()));
            }
            if let Some(r) = a.r {
                e.push(("r", r.to_string()));
            }
            a.xi.entries(&mut e);
            if let Some(t) = a.t {
                e.push(("t", t.to_string()));
            }
            if let Some(g) = a.gamma {
                e.push(("gamma", g.to_string()));
            }
            if let Some(p) = &a.boundary_out {
                e.push(("boundary-out", p.display().to_string()));
            }
            dump(e, &a.output)?;
        }
        Command::Sweep(a) => run_sweep(a)?,
        Command::Boundary(a) if a.output.dump_config => {
            if let Some(m) = a.mode {
                e.push(("mode", m.to_string()));
            }
            if let Some(g) = a.gamma {
                e.push(("gamma", g.to_string()));
            }
            if let Some(r) = a.r {
                e.push(("r", r.to_string()));
            }
            a.xi.entries(&mut e);
            if let Some(al) = a.alpha {
                e.push(("alpha", al.to_string()));
            }
            dump(e, &a.output)?;
        }
        Command::Boundary(a) => run_boundary(a)?,
        Command::Rp(a) if a.output.dump_config => {
            a.params.entries(&mut e);
            for (k, v) in [("omega", a.omega), ("tau", a.tau), ("mass", a.mass)] {
                if let Some(v) = v {
                    e.push((k, v.to_string()));
                }
            }
            dump(e, &a.output)?;
        }
        Command::Rp(a) => run_rp(a)?,
        Command::Validate(a) if a.output.dump_config => {
            if let Some(n) = a.points {
                e.push(("points", n.to_string()));
            }
            if let Some(s) = a.seed {
                e.push(("seed", s.to_string()));
            }
            dump(e, &a.output)?;
        }
        Command::Validate(a) => {
            if !run_validate(a)? {
                return Ok(ExitCode::from(EXIT_NUMERICAL));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let raw: Vec<OsString> = env::args_os().collect();
    let prepared = reject_degree_flags(&raw).and_then(|_| config::splice(raw));
    let args = match prepared {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            let (msg, code) = describe(&e);
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
