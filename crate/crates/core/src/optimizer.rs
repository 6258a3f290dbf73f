//! Squeezing-angle optimisation, (T, γ̄) gain sweeps and G = 1 boundaries.
//!
//! Sweeps evaluate the closed-form case gains on the θ₁ = 0, θ₂ = π + ξ line
//! and spot-check a few random cells against the exact engine.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::closed_form;
use crate::error::{Error, Result};
use crate::michelson::{self, InterferometerParams};

/// Distance kept from the ξ = ±π/2 singularity.
pub const XI_GUARD: f64 = 1e-3;
/// The near-π/2 angle used for the right-hand one-arm heatmap.
pub const FIG2_XI_PRESET: f64 = FRAC_PI_2 - 0.05;
/// Number of uniform samples before golden-section refinement.
pub const SCAN_POINTS: usize = 64;
/// Golden-section stops once the bracket is narrower than this.
pub const XI_TOL: f64 = 1e-6;
/// Bisection stops once the T bracket is narrower than this.
pub const T_TOL: f64 = 1e-4;
/// Coherent amplitude used for engine spot checks. Near the guard band the
/// sub-leading terms are still ~10% at α = 100, while at α = 1000 they are
/// below 0.2% everywhere on the line.
pub const SPOT_CHECK_ALPHA: f64 = 1000.0;
pub const SPOT_CHECK_COUNT: usize = 5;
pub const SPOT_CHECK_SEED: u64 = 0x6761_7573_7369_6e74;
pub const SPOT_CHECK_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArmMode {
    /// Loss and noise in arm `a` only; arm `b` is perfect.
    OneArm,
    /// Same loss and noise in both arms.
    Symmetric,
}

impl FromStr for ArmMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-arm" => Ok(Self::OneArm),
            "symmetric" => Ok(Self::Symmetric),
            other => Err(Error::invalid("mode", format!("expected one-arm or symmetric, got {other:?}"))),
        }
    }
}

impl fmt::Display for ArmMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::OneArm => "one-arm",
            Self::Symmetric => "symmetric",
        })
    }
}

impl ArmMode {
    /// Applies this arm configuration to `p`.
    pub fn apply(self, p: InterferometerParams, t: f64, gamma: f64) -> InterferometerParams {
        match self {
            Self::OneArm => p.with_loss(t, 1.0, gamma, 0.0),
            Self::Symmetric => p.with_loss(t, t, gamma, gamma),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XiPolicy {
    Fixed(f64),
    Optimized,
}

impl fmt::Display for XiPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(xi) => write!(f, "{xi}"),
            Self::Optimized => f.write_str("opt"),
        }
    }
}

/// Inclusive linear axis `min..=max` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        let a = Self { min, max, count };
        a.validate("range")?;
        Ok(a)
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        if self.count < 2 {
            return Err(Error::invalid(name, format!("count must be >= 2, got {}", self.count)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::invalid(name, format!("need finite min < max, got {}:{}", self.min, self.max)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.max } else { self.min + step * i as f64 })
            .collect()
    }
}

impl FromStr for AxisRange {
    type Err = Error;

    /// Parses `min:max:count`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::invalid("range", format!("expected min:max:count, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let min = parts[0].trim().parse().map_err(|_| bad())?;
        let max = parts[1].trim().parse().map_err(|_| bad())?;
        let count = parts[2].trim().parse().map_err(|_| bad())?;
        Self::new(min, max, count)
    }
}

impl fmt::Display for AxisRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub t_range: AxisRange,
    pub gamma_range: AxisRange,
    /// Supplies r (and α for reporting); loss fields are overwritten per cell.
    pub fixed: InterferometerParams,
    pub mode: ArmMode,
    pub xi_policy: XiPolicy,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.t_range.validate("t_range")?;
        self.gamma_range.validate("gamma_range")?;
        if !(self.t_range.min > 0.0 && self.t_range.max <= 1.0) {
            return Err(Error::invalid("t_range", "transmissivity axis must lie in (0, 1]"));
        }
        if self.gamma_range.min < 0.0 {
            return Err(Error::invalid("gamma_range", "thermal occupation axis must be >= 0"));
        }
        self.fixed.validate()?;
        if let XiPolicy::Fixed(xi) = self.xi_policy {
            check_xi_in_guard(xi)?;
        }
        Ok(())
    }
}

fn check_xi_in_guard(xi: f64) -> Result<()> {
    if !xi.is_finite() || xi.abs() > FRAC_PI_2 - XI_GUARD {
        return Err(Error::SingularXi { xi });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub gamma: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotCheck {
    pub gamma: f64,
    pub t: f64,
    pub xi: f64,
    pub closed_form: f64,
    pub engine: f64,
}

impl SpotCheck {
    pub fn rel_err(&self) -> f64 {
        (self.engine - self.closed_form).abs() / self.closed_form.abs()
    }

    pub fn passed(&self) -> bool {
        self.rel_err() < SPOT_CHECK_TOL
    }
}

/// Raw gains over a (γ̄, T) grid, stored row-major: γ̄ outer, T inner.
#[derive(Debug, Clone, PartialEq)]
pub struct GainGrid {
    pub t_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub gain: Vec<f64>,
    pub xi_used: Vec<f64>,
    pub boundary: Vec<BoundaryPoint>,
    pub spot_checks: Vec<SpotCheck>,
}

impl GainGrid {
    pub fn index(&self, i_gamma: usize, i_t: usize) -> usize {
        i_gamma * self.t_values.len() + i_t
    }

    pub fn gain_at(&self, i_gamma: usize, i_t: usize) -> f64 {
        self.gain[self.index(i_gamma, i_t)]
    }

    /// Plotting convention: any G < 1 is shown as 0.
    pub fn clipped(g: f64) -> f64 {
        if g < 1.0 {
            0.0
        } else {
            g
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "gamma,T,gain_raw,gain_clipped,xi_used")?;
        for (ig, &g) in self.gamma_values.iter().enumerate() {
            for (it, &t) in self.t_values.iter().enumerate() {
                let k = self.index(ig, it);
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    g,
                    t,
                    self.gain[k],
                    Self::clipped(self.gain[k]),
                    self.xi_used[k]
                )?;
            }
        }
        Ok(())
    }

    pub fn write_boundary_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "gamma,T_star")?;
        for b in &self.boundary {
            writeln!(w, "{:.16e},{:.16e}", b.gamma, b.t)?;
        }
        Ok(())
    }

    pub fn spot_checks_pass(&self) -> bool {
        self.spot_checks.iter().all(SpotCheck::passed)
    }
}

/// Maximises `f` on `[lo, hi]`: a [`SCAN_POINTS`] uniform scan, then
/// golden-section inside the bracket around the best sample.
pub fn maximize_1d<F>(f: F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid("bounds", format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let xs: Vec<f64> = (0..SCAN_POINTS).map(|i| lo + step * i as f64).collect();
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &x) in xs.iter().enumerate() {
        let v = f(x)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let mut a = xs[best.0.saturating_sub(1)];
    let mut b = xs[(best.0 + 1).min(SCAN_POINTS - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > XI_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let (x, v) = if fc >= fd { (c, fc) } else { (d, fd) };
    if v >= best.1 {
        Ok((x, v))
    } else {
        Ok((xs[best.0], best.1))
    }
}

/// Finds the root of an increasing `g` on `[lo, hi]` to [`T_TOL`].
pub fn bisect_increasing<F>(g: F, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (g(a)?, g(b)?);
    if ga > 0.0 || gb < 0.0 {
        return Err(Error::NoBracket { lo, hi });
    }
    while b - a > T_TOL {
        let m = 0.5 * (a + b);
        if g(m)? < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

fn default_bounds() -> (f64, f64) {
    (-FRAC_PI_2 + XI_GUARD, FRAC_PI_2 - XI_GUARD)
}

fn check_bounds(bounds: (f64, f64)) -> Result<()> {
    let (lo, hi) = bounds;
    let (min, max) = default_bounds();
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid("xi_bounds", format!("need lo < hi, got [{lo}, {hi}]")));
    }
    if lo < min - 1e-15 || hi > max + 1e-15 {
        return Err(Error::invalid(
            "xi_bounds",
            format!("must stay within [-pi/2 + {XI_GUARD}, pi/2 - {XI_GUARD}], got [{lo}, {hi}]"),
        ));
    }
    Ok(())
}

/// Optimal squeezing angle and leading-order gain at `params` on the
/// θ₁ = 0, θ₂ = π + ξ line. `params.alpha` must equal `params.beta`.
pub fn optimize_xi(params: &InterferometerParams, xi_bounds: (f64, f64)) -> Result<(f64, f64)> {
    check_bounds(xi_bounds)?;
    let base = *params;
    maximize_1d(
        |xi| closed_form::gain_leading(&InterferometerParams { xi, ..base }.with_theta_pi()),
        xi_bounds.0,
        xi_bounds.1,
    )
}

/// Closed-form gain for an arm configuration: the inverse of the case 3 or
/// case 4 sensitivity ratio.
pub fn closed_form_gain(mode: ArmMode, t: f64, gamma: f64, r: f64, xi: f64) -> Result<f64> {
    let ratio = match mode {
        ArmMode::OneArm => closed_form::case3_sensitivity(t, r, xi, gamma)?,
        ArmMode::Symmetric => closed_form::case4_sensitivity(t, r, xi, gamma)?,
    };
    Ok(1.0 / ratio)
}

/// Gain and the ξ it was evaluated at, under a policy.
pub fn closed_form_cell(mode: ArmMode, t: f64, gamma: f64, r: f64, policy: XiPolicy) -> Result<(f64, f64)> {
    match policy {
        XiPolicy::Fixed(xi) => Ok((closed_form_gain(mode, t, gamma, r, xi)?, xi)),
        XiPolicy::Optimized => {
            let (lo, hi) = default_bounds();
            let (xi, g) = maximize_1d(|xi| closed_form_gain(mode, t, gamma, r, xi), lo, hi)?;
            Ok((g, xi))
        }
    }
}

/// Exact-engine gain at φ = 0 for an arm configuration at amplitude α = β.
pub fn engine_gain(mode: ArmMode, t: f64, gamma: f64, r: f64, xi: f64, alpha: f64) -> Result<f64> {
    let p = mode.apply(InterferometerParams::theta_pi(alpha, alpha, r, xi), t, gamma);
    michelson::gain(&p)
}

/// G = 1 transmissivity by bisection on the closed form over `[t_lo, t_hi]`.
pub fn boundary_closed_form(
    mode: ArmMode,
    gamma: f64,
    r: f64,
    policy: XiPolicy,
    t_lo: f64,
    t_hi: f64,
) -> Result<f64> {
    bisect_increasing(|t| Ok(closed_form_cell(mode, t, gamma, r, policy)?.0 - 1.0), t_lo, t_hi)
}

/// G = 1 transmissivity by bisection on the exact engine at α = β = `alpha`.
/// Under [`XiPolicy::Optimized`] each trial T is evaluated at the
/// closed-form optimal ξ for that T.
pub fn boundary_engine(
    mode: ArmMode,
    gamma: f64,
    r: f64,
    policy: XiPolicy,
    alpha: f64,
    t_lo: f64,
    t_hi: f64,
) -> Result<f64> {
    bisect_increasing(
        |t| {
            let xi = closed_form_cell(mode, t, gamma, r, policy)?.1;
            Ok(engine_gain(mode, t, gamma, r, xi, alpha)? - 1.0)
        },
        t_lo,
        t_hi,
    )
}

/// Strong-squeezing G = 1 transmissivity in closed form. The optimised
/// symmetric case sits at ξ = 0.
pub fn boundary_analytic(mode: ArmMode, gamma: f64, policy: XiPolicy) -> Result<f64> {
    match (mode, policy) {
        (ArmMode::OneArm, XiPolicy::Optimized) => closed_form::threshold_one_arm(gamma),
        (ArmMode::OneArm, XiPolicy::Fixed(xi)) => closed_form::threshold_one_arm_fixed_xi(gamma, xi),
        (ArmMode::Symmetric, XiPolicy::Optimized) => closed_form::threshold_symmetric(gamma),
        (ArmMode::Symmetric, XiPolicy::Fixed(xi)) => closed_form::threshold_symmetric_fixed_xi(gamma, xi),
    }
}

fn map_cells<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Evaluates the closed-form gain on every grid cell, extracts the G = 1
/// boundary per γ̄ row and runs engine spot checks at seeded random cells.
/// Rows whose gain never crosses 1 inside the T axis have no boundary point.
pub fn sweep(spec: &SweepSpec) -> Result<GainGrid> {
    spec.validate()?;
    let t_values = spec.t_range.values();
    let gamma_values = spec.gamma_range.values();
    let nt = t_values.len();
    let r = spec.fixed.r;

    let cells = map_cells(nt * gamma_values.len(), |k| {
        closed_form_cell(spec.mode, t_values[k % nt], gamma_values[k / nt], r, spec.xi_policy)
    })?;
    let (gain, xi_used): (Vec<f64>, Vec<f64>) = cells.into_iter().unzip();

    let rows = map_cells(gamma_values.len(), |ig| {
        let gamma = gamma_values[ig];
        match boundary_closed_form(spec.mode, gamma, r, spec.xi_policy, spec.t_range.min, spec.t_range.max) {
            Ok(t) => Ok(Some(BoundaryPoint { gamma, t })),
            Err(Error::NoBracket { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    })?;
    let boundary = rows.into_iter().flatten().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(SPOT_CHECK_SEED);
    let picks: Vec<usize> = (0..SPOT_CHECK_COUNT).map(|_| rng.gen_range(0..gain.len())).collect();
    let spot_checks = map_cells(picks.len(), |i| {
        let k = picks[i];
        let (t, gamma) = (t_values[k % nt], gamma_values[k / nt]);
        Ok(SpotCheck {
            gamma,
            t,
            xi: xi_used[k],
            closed_form: gain[k],
            engine: engine_gain(spec.mode, t, gamma, r, xi_used[k], SPOT_CHECK_ALPHA)?,
        })
    })?;

    Ok(GainGrid {
        t_values,
        gamma_values,
        gain,
        xi_used,
        boundary,
        spot_checks,
    })
}
