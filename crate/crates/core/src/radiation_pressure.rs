//! Radiation-pressure phase error and its trade-off against counting error.
//!
//! The momentum difference on the end mirrors is `(2ħω/c)(a'†a' − b'†b')`
//! after the first beam splitter, which in input modes is the Hermitian
//! exchange observable `i(a†b − b†a)`. All variances here are in photon
//! units with the `(2ħω/c)²` prefactor stripped.

use crate::error::{Error, Result};
use crate::michelson::{self, InterferometerParams, MODE_A, MODE_B};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiationPressureParams {
    /// Optical angular frequency, rad/s.
    pub omega: f64,
    /// Measurement duration, s.
    pub tau: f64,
    /// End-mirror mass, kg.
    pub mass: f64,
    pub interferometer: InterferometerParams,
}

impl RadiationPressureParams {
    pub fn new(omega: f64, tau: f64, mass: f64, interferometer: InterferometerParams) -> Result<Self> {
        let p = Self {
            omega,
            tau,
            mass,
            interferometer,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega", self.omega), ("tau", self.tau), ("mass", self.mass)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        self.interferometer.validate()
    }

    /// `ħωτ/(mc)`, radians per photon-unit standard deviation.
    pub fn prefactor(&self) -> f64 {
        HBAR * self.omega * self.tau / (self.mass * SPEED_OF_LIGHT)
    }

    fn with_interferometer(&self, interferometer: InterferometerParams) -> Self {
        Self {
            interferometer,
            ..*self
        }
    }
}

/// Published momentum-difference variance
/// `(α²+β²)cosh 4r − 2αβ sinh 4r cos Θ + sinh²(2r)/2`.
pub fn momentum_diff_variance(p: &InterferometerParams) -> f64 {
    let four_r = 4.0 * p.r;
    (p.alpha.powi(2) + p.beta.powi(2)) * four_r.cosh()
        - 2.0 * p.alpha * p.beta * four_r.sinh() * p.big_theta().cos()
        + (2.0 * p.r).sinh().powi(2) / 2.0
}

/// Exact variance of `i(a†b − b†a)` on the TMSCS. Differs from
/// [`momentum_diff_variance`] only in the vacuum term, which is `sinh²(2r)`:
/// on squeezed vacuum the observable has variance `Σ_n p_n 2n(n+1) = 4 sinh²r cosh²r`.
pub fn momentum_diff_variance_exact(p: &InterferometerParams) -> f64 {
    let four_r = 4.0 * p.r;
    (p.alpha.powi(2) + p.beta.powi(2)) * four_r.cosh()
        - 2.0 * p.alpha * p.beta * four_r.sinh() * p.big_theta().cos()
        + (2.0 * p.r).sinh().powi(2)
}

/// Variance of `i(a†b − b†a)` from the Gaussian engine on the prepared input.
pub fn momentum_diff_variance_engine(p: &InterferometerParams) -> Result<f64> {
    Ok(michelson::prepare_input(p)?.exchange_stats(MODE_A, MODE_B)?.variance)
}

/// `Δφ_rp = (ħωτ/mc) [2α² cosh 4r − 2α² sinh 4r cos Θ + sinh²(2r)/2]^{1/2}`,
/// valid only for α = β.
pub fn rp_phase_error(p: &RadiationPressureParams) -> Result<f64> {
    p.validate()?;
    let ip = &p.interferometer;
    if (ip.alpha - ip.beta).abs() > 1e-12 * (1.0 + ip.alpha) {
        return Err(Error::AssumptionViolated(format!(
            "rp_phase_error needs alpha == beta, got {} and {}; use momentum_diff_variance",
            ip.alpha, ip.beta
        )));
    }
    Ok(p.prefactor() * momentum_diff_variance(ip).max(0.0).sqrt())
}

/// Counting gain against radiation-pressure penalty at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffReport {
    /// Engine gain over shot noise, `G`.
    pub counting_gain: f64,
    /// `Δφ_rp² / Δφ_rp(r=0)²` at the same α and phases.
    pub rp_penalty: f64,
    /// `rp_penalty × Δφ_count² / Δφ_count(r=0)²`; stays near 1 when squeezing
    /// only moves error between counting and back-action.
    pub product: f64,
}

/// Evaluates the counting/back-action trade-off for a lossless, noiseless,
/// balanced (α = β) input.
pub fn tradeoff_report(p: &RadiationPressureParams) -> Result<TradeoffReport> {
    let ip = p.interferometer;
    if ip.t_a != 1.0 || ip.t_b != 1.0 || ip.gamma_a != 0.0 || ip.gamma_b != 0.0 {
        return Err(Error::AssumptionViolated(
            "tradeoff_report needs T_a = T_b = 1 and zero thermal occupation".into(),
        ));
    }
    let unsqueezed = InterferometerParams { r: 0.0, ..ip };
    let rp = rp_phase_error(p)?;
    let rp0 = rp_phase_error(&p.with_interferometer(unsqueezed))?;
    let count = michelson::sensitivity(&ip)?;
    let count0 = michelson::sensitivity(&unsqueezed)?;
    let rp_penalty = (rp / rp0).powi(2);
    Ok(TradeoffReport {
        counting_gain: count.gain,
        rp_penalty,
        product: rp_penalty * (count.delta_phi / count0.delta_phi).powi(2),
    })
}
