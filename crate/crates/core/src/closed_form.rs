//! Closed-form evaluators for photon number, J₃ moments and the case gains.
//!
//! Every evaluator takes intensity transmissivities `T`; the amplitude `η`
//! of the printed formulas is `√T` and never appears in a signature.
//!
//! Two families live here. The `*_asymptotic` functions transcribe the
//! published large-α, large-r expressions literally. The `*_leading`
//! functions are the leading-order expansion of the exact pipeline in the
//! same regime; they reduce to every case formula below and are what the
//! engine converges to as α grows.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::michelson::InterferometerParams;

/// `|cos ξ|` below this is treated as the ξ = ±π/2 singularity.
pub const SINGULAR_COS: f64 = 1e-12;

const PHASE_TOL: f64 = 1e-9;

/// Which simplifying assumptions an evaluator relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AsymptoticAssumptions {
    /// θ₁ = 0 and θ₂ = π + ξ.
    pub theta1_zero: bool,
    /// α², β² ≫ 1.
    pub strong_coherent: bool,
    /// e^{2r} ≫ 1.
    pub strong_squeezing: bool,
    /// Θ = π.
    pub theta_pi: bool,
}

impl AsymptoticAssumptions {
    pub const J3: Self = Self {
        theta1_zero: true,
        strong_coherent: true,
        strong_squeezing: true,
        theta_pi: true,
    };

    /// Checks the parameter encodings of the declared flags. The "≫"
    /// assumptions have no hard encoding and are only documented.
    pub fn check(&self, p: &InterferometerParams) -> Result<()> {
        p.validate()?;
        if self.theta1_zero {
            if p.theta1.abs() > PHASE_TOL {
                return Err(Error::AssumptionViolated(format!("theta1 must be 0, got {}", p.theta1)));
            }
            if wrapped(p.theta2 - PI - p.xi).abs() > PHASE_TOL {
                return Err(Error::AssumptionViolated(format!(
                    "theta2 must equal pi + xi = {}, got {}",
                    PI + p.xi,
                    p.theta2
                )));
            }
        }
        if self.theta_pi && wrapped(p.big_theta() - PI).abs() > PHASE_TOL {
            return Err(Error::AssumptionViolated(format!(
                "theta1 + theta2 - xi must equal pi, got {}",
                p.big_theta()
            )));
        }
        Ok(())
    }
}

/// Angle folded into (−π, π].
fn wrapped(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

fn check_t(name: &'static str, t: f64) -> Result<()> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::invalid(name, format!("must lie in (0, 1], got {t}")));
    }
    Ok(())
}

fn check_nonneg(name: &'static str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
    }
    Ok(())
}

fn cos_sq(xi: f64) -> Result<f64> {
    let c = xi.cos();
    if c.abs() < SINGULAR_COS {
        return Err(Error::SingularXi { xi });
    }
    Ok(c * c)
}

/// n̄ = (α²+β²)cosh 2r − 2αβ sinh 2r cos Θ + 2 sinh²r. Exact.
pub fn mean_photon(p: &InterferometerParams) -> f64 {
    (p.alpha.powi(2) + p.beta.powi(2)) * (2.0 * p.r).cosh()
        - 2.0 * p.alpha * p.beta * (2.0 * p.r).sinh() * p.big_theta().cos()
        + 2.0 * p.r.sinh().powi(2)
}

/// Published ⟨J₃⟩ = ½ η_aη_b (α+β)² cos ξ sin φ.
pub fn j3_mean_asymptotic(p: &InterferometerParams) -> Result<f64> {
    AsymptoticAssumptions::J3.check(p)?;
    Ok(0.5 * (p.t_a * p.t_b).sqrt() * (p.alpha + p.beta).powi(2) * p.xi.cos() * p.phi.sin())
}

/// The loss/noise bracket `(2γ̄_a+1)T_a + (2γ̄_b+1)T_b − 2(γ̄_a+γ̄_b+1)T_aT_b`
/// of the published variance.
fn printed_bracket(p: &InterferometerParams) -> f64 {
    (2.0 * p.gamma_a + 1.0) * p.t_a + (2.0 * p.gamma_b + 1.0) * p.t_b
        - 2.0 * (p.gamma_a + p.gamma_b + 1.0) * p.t_a * p.t_b
}

/// Published (ΔJ₃)², transcribed term by term.
pub fn j3_variance_asymptotic(p: &InterferometerParams) -> Result<f64> {
    AsymptoticAssumptions::J3.check(p)?;
    let k = printed_bracket(p);
    let e2r = (2.0 * p.r).exp();
    Ok(0.25
        * (2.0 * (p.alpha.powi(2) + p.beta.powi(2)) * p.t_a * p.t_b
            + (p.alpha - p.beta).powi(2) * k / e2r
            + e2r * (p.alpha + p.beta).powi(2) * (k - p.xi.sin() * k)))
}

/// Gain implied by the published mean and variance: the squared φ-slope of
/// the mean over `n̄ · Var`, at the requested φ.
pub fn gain_asymptotic(p: &InterferometerParams) -> Result<f64> {
    let slope = 0.5 * (p.t_a * p.t_b).sqrt() * (p.alpha + p.beta).powi(2) * p.xi.cos() * p.phi.cos();
    let var = j3_variance_asymptotic(p)?;
    Ok(slope * slope / (mean_photon(p) * var))
}

/// Symmetric part of the arm noise at leading order.
fn k_sym(p: &InterferometerParams) -> f64 {
    p.t_a * (2.0 * p.gamma_b + 1.0) + p.t_b * (2.0 * p.gamma_a + 1.0)
        - 2.0 * p.t_a * p.t_b * (p.gamma_a + p.gamma_b + 1.0)
}

/// Antisymmetric part, which couples to sin ξ.
fn l_anti(p: &InterferometerParams) -> f64 {
    p.t_a * (2.0 * p.gamma_b + 1.0) - p.t_b * (2.0 * p.gamma_a + 1.0)
        + 2.0 * p.t_a * p.t_b * (p.gamma_a - p.gamma_b)
}

/// Leading-order ⟨J₃⟩ of the exact pipeline on the θ₁ = 0, θ₂ = π + ξ line:
/// `−√(T_aT_b)[½(α+β)²e^{2r} cos ξ sin φ − ½(α−β)²e^{−2r} cos ξ sin φ + (α²−β²) cos φ]`.
///
/// The vacuum contribution cancels, so this is exact for any α, β on that line.
pub fn j3_mean_leading(p: &InterferometerParams) -> Result<f64> {
    AsymptoticAssumptions {
        theta1_zero: true,
        theta_pi: true,
        ..Default::default()
    }
    .check(p)?;
    let e2r = (2.0 * p.r).exp();
    let (s, c) = p.phi.sin_cos();
    Ok(-(p.t_a * p.t_b).sqrt()
        * (0.5 * (p.alpha + p.beta).powi(2) * e2r * p.xi.cos() * s
            - 0.5 * (p.alpha - p.beta).powi(2) / e2r * p.xi.cos() * s
            + (p.alpha.powi(2) - p.beta.powi(2)) * c))
}

/// Leading-order Var(J₃) for α = β on the θ₁ = 0, θ₂ = π + ξ line:
/// `α²[2T_aT_b(cos²φ + e^{4r} sin²φ) + e^{2r}(K + L sin ξ)]`, dropping O(α⁰).
pub fn j3_variance_leading(p: &InterferometerParams) -> Result<f64> {
    AsymptoticAssumptions::J3.check(p)?;
    if (p.alpha - p.beta).abs() > 1e-12 * (1.0 + p.alpha) {
        return Err(Error::AssumptionViolated(format!(
            "leading-order variance needs alpha == beta, got {} and {}",
            p.alpha, p.beta
        )));
    }
    let e2r = (2.0 * p.r).exp();
    let (s, c) = p.phi.sin_cos();
    Ok(p.alpha.powi(2)
        * (2.0 * p.t_a * p.t_b * (c * c + e2r * e2r * s * s) + e2r * (k_sym(p) + l_anti(p) * p.xi.sin())))
}

/// Leading-order gain at φ = 0 for α = β:
/// `2T_aT_b cos²ξ / (2T_aT_b e^{−2r} + K + L sin ξ)`.
pub fn gain_leading(p: &InterferometerParams) -> Result<f64> {
    AsymptoticAssumptions::J3.check(p)?;
    let num = 2.0 * p.t_a * p.t_b * p.xi.cos().powi(2);
    let den = 2.0 * p.t_a * p.t_b * (-2.0 * p.r).exp() + k_sym(p) + l_anti(p) * p.xi.sin();
    Ok(num / den)
}

/// Lossless gain `e^{2r}`.
pub fn case1_gain(r: f64) -> Result<f64> {
    check_nonneg("r", r)?;
    Ok((2.0 * r).exp())
}

/// One lossy arm, no noise: `(Δφ)²/(Δφ_SN)²`.
pub fn case2_sensitivity(t: f64, r: f64, xi: f64) -> Result<f64> {
    case3_sensitivity(t, r, xi, 0.0)
}

/// The ξ = 0 specialisation `e^{−2r} + (1−T)/(2T)`.
pub fn case2_sensitivity_xi0(t: f64, r: f64) -> Result<f64> {
    check_t("T", t)?;
    check_nonneg("r", r)?;
    Ok((-2.0 * r).exp() + (1.0 - t) / (2.0 * t))
}

/// One lossy arm with thermal noise γ̄:
/// `e^{−2r}/cos²ξ + (2γ̄+1)(1−T)/(2T) · (1 − sin ξ)/cos²ξ`.
pub fn case3_sensitivity(t: f64, r: f64, xi: f64, gamma: f64) -> Result<f64> {
    check_t("T", t)?;
    check_nonneg("r", r)?;
    check_nonneg("gamma", gamma)?;
    let c2 = cos_sq(xi)?;
    Ok((-2.0 * r).exp() / c2 + (2.0 * gamma + 1.0) * (1.0 - t) / (2.0 * t) * (1.0 - xi.sin()) / c2)
}

/// Both arms with the same loss and noise:
/// `(e^{−2r} + (2γ̄+1)(1−T)/T) / cos²ξ`.
pub fn case4_sensitivity(t: f64, r: f64, xi: f64, gamma: f64) -> Result<f64> {
    check_t("T", t)?;
    check_nonneg("r", r)?;
    check_nonneg("gamma", gamma)?;
    let c2 = cos_sq(xi)?;
    Ok(((-2.0 * r).exp() + (2.0 * gamma + 1.0) * (1.0 - t) / t) / c2)
}

/// G = 1 transmissivity for one lossy arm as ξ → π/2 and r → ∞:
/// `(2γ̄+1)/(2γ̄+5)`.
pub fn threshold_one_arm(gamma: f64) -> Result<f64> {
    check_nonneg("gamma", gamma)?;
    Ok((2.0 * gamma + 1.0) / (2.0 * gamma + 5.0))
}

/// G = 1 transmissivity for one lossy arm at fixed ξ and r → ∞.
/// With `k = (2γ̄+1)(1 − sin ξ)/(2cos²ξ)` this is `k/(1+k)`; ξ = 0 gives
/// `(2γ̄+1)/(2γ̄+3)`.
pub fn threshold_one_arm_fixed_xi(gamma: f64, xi: f64) -> Result<f64> {
    check_nonneg("gamma", gamma)?;
    let k = (2.0 * gamma + 1.0) * (1.0 - xi.sin()) / (2.0 * cos_sq(xi)?);
    Ok(k / (1.0 + k))
}

/// G = 1 transmissivity for symmetric loss at ξ = 0, r → ∞: `(2γ̄+1)/(2γ̄+2)`.
pub fn threshold_symmetric(gamma: f64) -> Result<f64> {
    check_nonneg("gamma", gamma)?;
    Ok((2.0 * gamma + 1.0) / (2.0 * gamma + 2.0))
}

/// Symmetric threshold at fixed ξ, r → ∞: `k/(1+k)` with `k = (2γ̄+1)/cos²ξ`.
pub fn threshold_symmetric_fixed_xi(gamma: f64, xi: f64) -> Result<f64> {
    check_nonneg("gamma", gamma)?;
    let k = (2.0 * gamma + 1.0) / cos_sq(xi)?;
    Ok(k / (1.0 + k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{E, FRAC_PI_2};

    fn line(alpha: f64, r: f64, xi: f64) -> InterferometerParams {
        InterferometerParams::theta_pi(alpha, alpha, r, xi)
    }

    #[test]
    fn mean_photon_examples() {
        assert_eq!(mean_photon(&InterferometerParams::default()), 0.0);
        let p = InterferometerParams {
            r: 1.0,
            ..Default::default()
        };
        assert_abs_diff_eq!(mean_photon(&p), 2.0 * 1.0f64.sinh().powi(2), epsilon = 1e-14);
        assert_abs_diff_eq!(mean_photon(&p), 2.76220, epsilon = 1e-5);
        assert_abs_diff_eq!(mean_photon(&line(1.0, 0.5, 0.0)), 5.97965, epsilon = 1e-4);
    }

    #[test]
    fn mean_photon_is_stationary_and_maximal_at_theta_pi() {
        let base = InterferometerParams {
            alpha: 1.3,
            beta: 0.7,
            r: 0.4,
            ..Default::default()
        };
        let at = |big: f64| mean_photon(&InterferometerParams { theta2: big, ..base });
        let peak = at(PI);
        let h = 1e-5;
        assert_abs_diff_eq!((at(PI + h) - at(PI - h)) / (2.0 * h), 0.0, epsilon = 1e-8);
        for k in 0..1000 {
            let big = 2.0 * PI * k as f64 / 1000.0;
            assert!(at(big) <= peak + 1e-12);
        }
    }

    #[test]
    fn printed_mean_examples() {
        assert_eq!(j3_mean_asymptotic(&line(1.0, 1.0, 0.3)).unwrap(), 0.0);
        assert_abs_diff_eq!(
            j3_mean_asymptotic(&line(1.0, 1.0, FRAC_PI_2).with_phi(0.4)).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(j3_mean_asymptotic(&line(1.0, 0.0, 0.0).with_phi(FRAC_PI_2)).unwrap(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn printed_evaluators_enforce_phase_line() {
        let mut p = line(1.0, 1.0, 0.2);
        p.theta1 = 0.1;
        assert!(matches!(j3_mean_asymptotic(&p), Err(Error::AssumptionViolated(_))));
        let mut p = line(1.0, 1.0, 0.2);
        p.theta2 = PI;
        assert!(matches!(j3_variance_asymptotic(&p), Err(Error::AssumptionViolated(_))));
        let mut p = line(1.0, 1.0, 0.2);
        p.theta2 -= 2.0 * PI;
        assert!(j3_variance_asymptotic(&p).is_ok());
    }

    #[test]
    fn printed_variance_coherent_benchmark() {
        // At r = 0, T = 1 the loss bracket is 1 + 1 − 2 = 0 and only the
        // first term survives: ¼ · 2(α²+β²) · 1.
        let p = line(100.0, 0.0, 0.0);
        assert_relative_eq!(j3_variance_asymptotic(&p).unwrap(), 0.5 * 2e4, max_relative = 1e-14);
        // Lossless bracket vanishes for any r.
        let p = line(1.0, 1.3, 0.0);
        assert_relative_eq!(j3_variance_asymptotic(&p).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn leading_mean_is_exact_on_the_line() {
        for (alpha, beta, r, xi, phi, ta, tb) in [
            (3.0, 1.0, 0.4, 0.3, 0.2, 0.8, 0.6),
            (0.5, 2.0, 1.1, -0.7, -0.4, 1.0, 0.3),
            (10.0, 10.0, 0.0, 1.2, 0.9, 0.5, 0.5),
        ] {
            let p = InterferometerParams {
                alpha,
                beta,
                r,
                xi,
                phi,
                ..Default::default()
            }
            .with_theta_pi()
            .with_loss(ta, tb, 0.4, 1.3);
            let engine = crate::michelson::j3_moments(&p).unwrap().mean;
            assert_relative_eq!(j3_mean_leading(&p).unwrap(), engine, max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    #[test]
    fn leading_variance_converges_to_engine() {
        for (r, xi, phi, ta, tb, ga, gb) in [
            (1.0, 0.4, 0.0, 0.8, 0.6, 0.3, 0.0),
            (0.5, -0.9, 0.3, 0.5, 1.0, 0.0, 1.1),
            (1.5, 1.2, -0.1, 0.9, 0.9, 0.2, 0.2),
        ] {
            let mut last = f64::INFINITY;
            for alpha in [10.0, 30.0, 100.0, 300.0] {
                let p = InterferometerParams::theta_pi(alpha, alpha, r, xi)
                    .with_loss(ta, tb, ga, gb)
                    .with_phi(phi);
                let engine = crate::michelson::j3_moments(&p).unwrap().variance;
                let rel = (j3_variance_leading(&p).unwrap() - engine).abs() / engine;
                // Dropped terms are O(α⁰) against an O(α²) variance.
                assert!(rel < 0.5 * last.min(1.0), "alpha={alpha}: rel={rel} last={last}");
                assert!(rel < 10.0 * (4.0 * r).exp() / alpha.powi(2), "alpha={alpha}: rel={rel}");
                last = rel;
            }
            assert!(last < 1e-3);
        }
    }

    #[test]
    fn leading_gain_reduces_to_cases() {
        for (t, r, xi, g) in [(0.3, 1.0, 0.4, 0.0), (0.7, 2.5, -0.3, 1.2), (0.25, 4.0, 1.3, 0.5)] {
            let one_arm = line(100.0, r, xi).with_loss(t, 1.0, g, 0.0);
            assert_relative_eq!(
                1.0 / gain_leading(&one_arm).unwrap(),
                case3_sensitivity(t, r, xi, g).unwrap(),
                max_relative = 1e-12
            );
            let sym = line(100.0, r, xi).with_loss(t, t, g, g);
            assert_relative_eq!(
                1.0 / gain_leading(&sym).unwrap(),
                case4_sensitivity(t, r, xi, g).unwrap(),
                max_relative = 1e-12
            );
        }
        assert_relative_eq!(gain_leading(&line(5.0, 0.7, 0.0)).unwrap(), (1.4f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn case_examples() {
        assert_relative_eq!(case1_gain(0.5).unwrap(), E, max_relative = 1e-15);
        for r in [0.1, 1.0, 3.0] {
            assert_relative_eq!(case2_sensitivity(1.0, r, 0.0).unwrap(), (-2.0 * r).exp(), max_relative = 1e-15);
        }
        assert_relative_eq!(case4_sensitivity(0.5, 30.0, 0.0, 0.0).unwrap(), 1.0, max_relative = 1e-12);
        assert!(matches!(case2_sensitivity(0.5, 1.0, FRAC_PI_2), Err(Error::SingularXi { .. })));
        assert!(matches!(case4_sensitivity(0.5, 1.0, -FRAC_PI_2, 0.0), Err(Error::SingularXi { .. })));
        assert!(case3_sensitivity(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(case3_sensitivity(0.5, 1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn case_limit_chain() {
        for (t, r, xi) in [(0.3, 1.0, 0.2), (0.9, 0.2, -1.0), (0.55, 2.0, 1.4)] {
            assert_eq!(case3_sensitivity(t, r, xi, 0.0).unwrap(), case2_sensitivity(t, r, xi).unwrap());
            let lossless = case4_sensitivity(1.0, r, xi, 0.7).unwrap();
            assert_relative_eq!(lossless, (-2.0 * r).exp() / xi.cos().powi(2), max_relative = 1e-14);
            assert!(lossless >= case4_sensitivity(1.0, r, 0.0, 0.7).unwrap());
        }
    }

    #[test]
    fn xi_beats_the_one_third_bound() {
        for t in [0.22, 0.25, 0.30] {
            let mut beaten = false;
            for r in [1.0f64, 2.0, 3.0] {
                assert!(case2_sensitivity(t, r, 0.0).unwrap() >= 1.0);
                let best = (1..2000)
                    .map(|k| k as f64 * (FRAC_PI_2 - 1e-3) / 2000.0)
                    .map(|xi| case2_sensitivity(t, r, xi).unwrap())
                    .fold(f64::INFINITY, f64::min);
                beaten |= best < 1.0;
            }
            assert!(beaten, "T={t}: no r on the grid gets below shot noise");
        }
        // r = 3 alone already covers the whole interval.
        for t in [0.22, 0.25, 0.30] {
            let best = (1..2000)
                .map(|k| k as f64 * (FRAC_PI_2 - 1e-3) / 2000.0)
                .map(|xi| case2_sensitivity(t, 3.0, xi).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1.0);
        }
    }

    #[test]
    fn threshold_examples() {
        assert_abs_diff_eq!(threshold_one_arm(0.0).unwrap(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(threshold_one_arm(2.0).unwrap(), 5.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(threshold_one_arm_fixed_xi(0.0, 0.0).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(threshold_symmetric(0.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(threshold_symmetric(1.0).unwrap(), 0.75, epsilon = 1e-15);
        assert!(threshold_symmetric(1e9).unwrap() > 1.0 - 1e-9);
        assert_abs_diff_eq!(threshold_symmetric_fixed_xi(0.0, 0.0).unwrap(), 0.5, epsilon = 1e-15);
        assert!(threshold_one_arm(-0.1).is_err());
        // Optimised ξ approaches the one-arm bound from above as ξ → π/2.
        assert!(threshold_one_arm_fixed_xi(0.0, FRAC_PI_2 - 1e-4).unwrap() - 0.2 < 1e-6);
    }
}
