//! The Michelson pipeline: TMSCS preparation, the two passes through the
//! central beam splitter, and the J₃ phase-sensitivity estimate.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, LossChannelSpec, Moments};

pub const MODE_A: usize = 0;
pub const MODE_B: usize = 1;

/// Finite-difference step for d⟨J₃⟩/dφ.
pub const DERIVATIVE_STEP: f64 = 1e-5;

/// Every physical knob of the interferometer.
///
/// Transmissivities are round-trip intensity fractions; loss is `1 − T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerParams {
    pub alpha: f64,
    pub beta: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub r: f64,
    pub xi: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub phi: f64,
}

impl Default for InterferometerParams {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            theta1: 0.0,
            theta2: 0.0,
            r: 0.0,
            xi: 0.0,
            t_a: 1.0,
            t_b: 1.0,
            gamma_a: 0.0,
            gamma_b: 0.0,
            phi: 0.0,
        }
    }
}

impl InterferometerParams {
    /// Lossless point on the `θ₁ = 0`, `θ₂ = π + ξ` line, which fixes Θ = π.
    pub fn theta_pi(alpha: f64, beta: f64, r: f64, xi: f64) -> Self {
        Self {
            alpha,
            beta,
            r,
            xi,
            ..Self::default()
        }
        .with_theta_pi()
    }

    /// Sets `θ₁ = 0`, `θ₂ = π + ξ`.
    pub fn with_theta_pi(mut self) -> Self {
        self.theta1 = 0.0;
        self.theta2 = PI + self.xi;
        self
    }

    pub fn with_loss(mut self, t_a: f64, t_b: f64, gamma_a: f64, gamma_b: f64) -> Self {
        self.t_a = t_a;
        self.t_b = t_b;
        self.gamma_a = gamma_a;
        self.gamma_b = gamma_b;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    /// Θ = θ₁ + θ₂ − ξ.
    pub fn big_theta(&self) -> f64 {
        self.theta1 + self.theta2 - self.xi
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("theta1", self.theta1),
            ("theta2", self.theta2),
            ("r", self.r),
            ("xi", self.xi),
            ("t_a", self.t_a),
            ("t_b", self.t_b),
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
            ("phi", self.phi),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("r", self.r),
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
        ] {
            if v < 0.0 {
                return Err(Error::invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        for (name, v) in [("t_a", self.t_a), ("t_b", self.t_b)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::invalid(name, format!("must lie in (0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

/// Figures of merit at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityResult {
    pub j3_mean: f64,
    pub j3_variance: f64,
    pub dj3_dphi: f64,
    pub delta_phi: f64,
    pub n_bar: f64,
    pub delta_phi_sn_sq: f64,
    pub gain: f64,
}

/// `Ŝ(re^{iξ}) D̂_b(β e^{iθ₂}) D̂_a(α e^{iθ₁}) |00⟩`.
pub fn prepare_input(params: &InterferometerParams) -> Result<GaussianState> {
    params.validate()?;
    GaussianState::vacuum(2)?
        .displace(MODE_A, params.alpha, params.theta1)?
        .displace(MODE_B, params.beta, params.theta2)?
        .two_mode_squeeze(MODE_A, MODE_B, params.r, params.xi)
}

/// Runs the prepared input through BS, phase shift on `a`, loss on each arm
/// and the recombining BS.
pub fn propagate(params: &InterferometerParams) -> Result<GaussianState> {
    propagate_from(&prepare_input(params)?, params)
}

/// Same as [`propagate`] but starting from an already prepared input.
pub fn propagate_from(input: &GaussianState, params: &InterferometerParams) -> Result<GaussianState> {
    input
        .beamsplitter_50_50(MODE_A, MODE_B)?
        .phase_shift(MODE_A, params.phi)?
        .apply_loss_thermal(&LossChannelSpec::new(MODE_A, params.t_a, params.gamma_a)?)?
        .apply_loss_thermal(&LossChannelSpec::new(MODE_B, params.t_b, params.gamma_b)?)?
        .beamsplitter_50_50(MODE_A, MODE_B)
}

/// Exact ⟨J₃⟩ and Var(J₃) at the detectors.
pub fn j3_moments(params: &InterferometerParams) -> Result<Moments> {
    propagate(params)?.number_difference_stats(MODE_A, MODE_B)
}

fn j3_mean_at(input: &GaussianState, params: &InterferometerParams, phi: f64) -> Result<f64> {
    let p = params.with_phi(phi);
    Ok(propagate_from(input, &p)?.number_difference_stats(MODE_A, MODE_B)?.mean)
}

fn five_point(input: &GaussianState, params: &InterferometerParams, h: f64) -> Result<f64> {
    let phi = params.phi;
    let f = |x: f64| j3_mean_at(input, params, x);
    Ok((f(phi - 2.0 * h)? - 8.0 * f(phi - h)? + 8.0 * f(phi + h)? - f(phi + 2.0 * h)?) / (12.0 * h))
}

/// d⟨J₃⟩/dφ by a five-point central stencil with one Richardson step.
pub fn j3_derivative(params: &InterferometerParams) -> Result<f64> {
    let input = prepare_input(params)?;
    j3_derivative_from(&input, params)
}

fn j3_derivative_from(input: &GaussianState, params: &InterferometerParams) -> Result<f64> {
    let d1 = five_point(input, params, DERIVATIVE_STEP)?;
    let d2 = five_point(input, params, 2.0 * DERIVATIVE_STEP)?;
    Ok((16.0 * d1 - d2) / 15.0)
}

/// Smallest slope the stencil can tell apart from round-off in ⟨J₃⟩.
fn roundoff_floor(j3_mean: f64) -> f64 {
    100.0 * f64::EPSILON * (1.0 + j3_mean.abs()) / DERIVATIVE_STEP
}

/// Δφ = ΔJ₃ / |d⟨J₃⟩/dφ| from the exact engine, with the gain measured
/// against `1/n̄` of the actual input.
pub fn sensitivity(params: &InterferometerParams) -> Result<SensitivityResult> {
    let input = prepare_input(params)?;
    let n_bar = input.total_mean_photon_number();
    if !(n_bar > 0.0) {
        return Err(Error::invalid("alpha", "input carries no photons, shot noise is undefined"));
    }
    let out = propagate_from(&input, params)?;
    let m = out.number_difference_stats(MODE_A, MODE_B)?;
    let d = j3_derivative_from(&input, params)?;
    if d.abs() < 1e-12 * (1.0 + m.mean.abs()) || d.abs() < roundoff_floor(m.mean) || !(m.variance > 0.0) {
        return Err(Error::DegeneratePoint {
            phi: params.phi,
            derivative: d,
        });
    }
    let delta_phi = m.variance.sqrt() / d.abs();
    let delta_phi_sn_sq = 1.0 / n_bar;
    Ok(SensitivityResult {
        j3_mean: m.mean,
        j3_variance: m.variance,
        dj3_dphi: d,
        delta_phi,
        n_bar,
        delta_phi_sn_sq,
        gain: delta_phi_sn_sq / (delta_phi * delta_phi),
    })
}

/// Shorthand for `sensitivity(params)?.gain`.
pub fn gain(params: &InterferometerParams) -> Result<f64> {
    Ok(sensitivity(params)?.gain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{E, FRAC_PI_2};

    #[test]
    fn prepare_examples() {
        let vac = prepare_input(&InterferometerParams::default()).unwrap();
        assert_eq!(vac, GaussianState::vacuum(2).unwrap());

        let p = InterferometerParams {
            alpha: 1.0,
            beta: 1.0,
            theta1: FRAC_PI_2,
            theta2: FRAC_PI_2,
            r: 0.5,
            ..Default::default()
        };
        assert_abs_diff_eq!(prepare_input(&p).unwrap().total_mean_photon_number(), 5.97965, epsilon = 1e-4);

        let lone = InterferometerParams {
            alpha: 1.0,
            ..Default::default()
        };
        assert_abs_diff_eq!(prepare_input(&lone).unwrap().total_mean_photon_number(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn propagate_examples() {
        let lossy = InterferometerParams::default().with_loss(0.3, 0.6, 0.0, 0.0);
        let out = propagate(&lossy).unwrap();
        assert!((out.cov() - GaussianState::vacuum(2).unwrap().cov()).amax() < 1e-15);
        assert!(out.mean().amax() < 1e-15);

        let p = InterferometerParams::theta_pi(100.0, 100.0, 0.5, 0.0);
        assert_abs_diff_eq!(j3_moments(&p).unwrap().mean, 0.0, epsilon = 1e-6);

        // Worked by hand through the mode operators: ⟨J₃⟩ at φ = π/2 is −2α²e^{2r}.
        let m = j3_moments(&p.with_phi(FRAC_PI_2)).unwrap();
        assert_relative_eq!(m.mean, -2.0 * 1e4 * E, max_relative = 1e-9);
        assert_relative_eq!(m.mean, -54365.6366, max_relative = 1e-8);
    }

    #[test]
    fn coherent_light_hits_shot_noise() {
        for alpha in [1.0, 7.0, 100.0] {
            let p = InterferometerParams::theta_pi(alpha, alpha, 0.0, 0.0);
            assert_abs_diff_eq!(gain(&p).unwrap(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn lossless_gain_is_e_to_2r() {
        let p = InterferometerParams::theta_pi(100.0, 100.0, 0.5, 0.0);
        let s = sensitivity(&p).unwrap();
        assert_relative_eq!(s.gain, E, max_relative = 1e-2);
        assert_relative_eq!(s.delta_phi.powi(2) * s.gain * s.n_bar, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn symmetric_loss_gain() {
        let p = InterferometerParams::theta_pi(100.0, 100.0, 1.0, 0.0).with_loss(0.5, 0.5, 0.0, 0.0);
        assert_relative_eq!(gain(&p).unwrap(), 1.0 / ((-2.0f64).exp() + 1.0), max_relative = 1e-2);
        assert_relative_eq!(gain(&p).unwrap(), 0.8808, max_relative = 1e-2);
    }

    #[test]
    fn derivative_matches_analytic_slope() {
        // Lossless, α = β, Θ = π: ⟨J₃⟩ = −2α²e^{2r} sin φ.
        let p = InterferometerParams::theta_pi(30.0, 30.0, 0.7, 0.0).with_phi(0.2);
        let expected = -2.0 * 900.0 * (1.4f64).exp() * 0.2f64.cos();
        assert_relative_eq!(j3_derivative(&p).unwrap(), expected, max_relative = 1e-8);
    }

    #[test]
    fn degenerate_point_reported() {
        let p = InterferometerParams::theta_pi(10.0, 10.0, 0.3, 0.0).with_phi(FRAC_PI_2);
        assert!(matches!(sensitivity(&p), Err(Error::DegeneratePoint { .. })));
        assert!(sensitivity(&InterferometerParams::default()).is_err());
    }

    #[test]
    fn validation() {
        let good = InterferometerParams::theta_pi(1.0, 1.0, 0.1, 0.0);
        assert!(good.validate().is_ok());
        assert!(good.with_loss(0.0, 1.0, 0.0, 0.0).validate().is_err());
        assert!(good.with_loss(1.0, 1.5, 0.0, 0.0).validate().is_err());
        assert!(good.with_loss(1.0, 1.0, -0.1, 0.0).validate().is_err());
        assert!(InterferometerParams { r: -1.0, ..good }.validate().is_err());
        assert!(InterferometerParams { phi: f64::NAN, ..good }.validate().is_err());
        assert_abs_diff_eq!(InterferometerParams::theta_pi(1.0, 1.0, 0.1, 0.4).big_theta(), PI, epsilon = 1e-15);
    }

    #[test]
    fn best_phase_is_zero_at_case_one() {
        let p = InterferometerParams::theta_pi(100.0, 100.0, 0.5, 0.0);
        let at_zero = sensitivity(&p).unwrap().delta_phi;
        for k in 1..40 {
            let phi = -FRAC_PI_2 + k as f64 * PI / 40.0;
            if (phi - 0.0).abs() < 1e-12 {
                continue;
            }
            let d = sensitivity(&p.with_phi(phi)).unwrap().delta_phi;
            assert!(at_zero <= d * (1.0 + 1e-9), "phi={phi}: {at_zero} > {d}");
        }
    }
}
