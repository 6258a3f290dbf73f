//! N-mode Gaussian states in the quadrature picture.
//!
//! Quadratures follow `q = (a† + a)/√2`, `p = i(a† − a)/√2`, so `[q, p] = i`
//! and the vacuum covariance is `I/2`. Vectors are interleaved
//! `(q₁, p₁, q₂, p₂, …)`.
//!
//! Every operation takes `&self` and returns a fresh state.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum allowed asymmetry of a covariance matrix after an operation.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Maximum allowed `|S Ω Sᵀ − Ω|` entry for a symplectic matrix.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Canonical symplectic form `⊕ [[0, 1], [−1, 0]]`.
pub fn omega(n_modes: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        w[(2 * k, 2 * k + 1)] = 1.0;
        w[(2 * k + 1, 2 * k)] = -1.0;
    }
    w
}

/// Mean and variance of a Hermitian observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

/// Linear quadrature map `x → S x` of a Gaussian unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp {
    matrix: DMatrix<f64>,
}

/// Thermal loss on one mode: mixes in an environment mode with occupation
/// `thermal_occupation` through a beam splitter of intensity transmissivity
/// `transmissivity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannelSpec {
    pub mode: usize,
    pub transmissivity: f64,
    pub thermal_occupation: f64,
}

impl LossChannelSpec {
    pub fn new(mode: usize, transmissivity: f64, thermal_occupation: f64) -> Result<Self> {
        if !(transmissivity > 0.0 && transmissivity <= 1.0) {
            return Err(Error::invalid(
                "transmissivity",
                format!("must lie in (0, 1], got {transmissivity}"),
            ));
        }
        if !(thermal_occupation >= 0.0 && thermal_occupation.is_finite()) {
            return Err(Error::invalid(
                "thermal_occupation",
                format!("must be finite and >= 0, got {thermal_occupation}"),
            ));
        }
        Ok(Self {
            mode,
            transmissivity,
            thermal_occupation,
        })
    }
}

impl SymplecticOp {
    /// Wraps a matrix after checking `S Ω Sᵀ = Ω`.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() % 2 != 0 || matrix.nrows() == 0 {
            return Err(Error::invalid(
                "matrix",
                format!("expected a non-empty even square matrix, got {}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        let op = Self { matrix };
        let defect = op.symplectic_defect();
        if defect > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic { defect });
        }
        Ok(op)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// `max |S Ω Sᵀ − Ω|`.
    pub fn symplectic_defect(&self) -> f64 {
        let w = omega(self.n_modes());
        (&self.matrix * &w * self.matrix.transpose() - w).amax()
    }

    /// Builds the quadrature map of the Heisenberg transformation
    /// `a_j → Σ_k m[j,k] a_k + n[j,k] a_k†` acting on `modes`; all other modes
    /// pass through untouched.
    pub fn from_bogoliubov(
        n_modes: usize,
        modes: &[usize],
        m: &[&[Complex64]],
        n: &[&[Complex64]],
    ) -> Result<Self> {
        for (i, &mode) in modes.iter().enumerate() {
            if mode >= n_modes {
                return Err(Error::ModeOutOfRange { mode, n_modes });
            }
            if modes[..i].contains(&mode) {
                return Err(Error::ModeCollision(mode));
            }
        }
        let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
        for &j in modes {
            for &k in modes {
                s[(2 * j, 2 * k)] = 0.0;
                s[(2 * j, 2 * k + 1)] = 0.0;
                s[(2 * j + 1, 2 * k)] = 0.0;
                s[(2 * j + 1, 2 * k + 1)] = 0.0;
            }
        }
        for (jj, &j) in modes.iter().enumerate() {
            for (kk, &k) in modes.iter().enumerate() {
                let plus = m[jj][kk] + n[jj][kk];
                let minus = m[jj][kk] - n[jj][kk];
                s[(2 * j, 2 * k)] = plus.re;
                s[(2 * j, 2 * k + 1)] = -minus.im;
                s[(2 * j + 1, 2 * k)] = plus.im;
                s[(2 * j + 1, 2 * k + 1)] = minus.re;
            }
        }
        Self::new(s)
    }

    /// Two-mode squeezer `exp(r(ab e^{−iξ} − a†b† e^{iξ}))`:
    /// `a → a cosh r − e^{iξ} b† sinh r`.
    pub fn two_mode_squeezer(n_modes: usize, mode_a: usize, mode_b: usize, r: f64, xi: f64) -> Result<Self> {
        let c = Complex64::new(r.cosh(), 0.0);
        let z = Complex64::from_polar(-r.sinh(), xi);
        let zero = Complex64::new(0.0, 0.0);
        Self::from_bogoliubov(
            n_modes,
            &[mode_a, mode_b],
            &[&[c, zero], &[zero, c]],
            &[&[zero, z], &[z, zero]],
        )
    }

    /// Beam splitter with amplitude transmissivity `t`:
    /// `a → t a + i√(1−t²) b`, `b → i√(1−t²) a + t b`.
    pub fn beamsplitter(n_modes: usize, mode_a: usize, mode_b: usize, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid("t", format!("amplitude must lie in [0, 1], got {t}")));
        }
        let tt = Complex64::new(t, 0.0);
        let rr = Complex64::new(0.0, (1.0 - t * t).max(0.0).sqrt());
        let zero = Complex64::new(0.0, 0.0);
        Self::from_bogoliubov(
            n_modes,
            &[mode_a, mode_b],
            &[&[tt, rr], &[rr, tt]],
            &[&[zero, zero], &[zero, zero]],
        )
    }

    /// `a → e^{iφ} a`.
    pub fn phase_shift(n_modes: usize, mode: usize, phi: f64) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        Self::from_bogoliubov(n_modes, &[mode], &[&[Complex64::from_polar(1.0, phi)]], &[&[zero]])
    }

    pub fn compose(&self, after: &SymplecticOp) -> Result<Self> {
        if self.n_modes() != after.n_modes() {
            return Err(Error::invalid("after", "mode counts differ"));
        }
        Ok(Self {
            matrix: &after.matrix * &self.matrix,
        })
    }
}

impl GaussianState {
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::invalid("n_modes", "need at least one mode"));
        }
        Ok(Self {
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes) * 0.5,
        })
    }

    /// Single-mode thermal state with mean occupation `occupation`.
    pub fn thermal(occupation: f64) -> Result<Self> {
        if !(occupation >= 0.0 && occupation.is_finite()) {
            return Err(Error::invalid("occupation", format!("must be >= 0, got {occupation}")));
        }
        Ok(Self {
            mean: DVector::zeros(2),
            cov: DMatrix::identity(2, 2) * (occupation + 0.5),
        })
    }

    /// Builds a state from raw moments, checking shape and symmetry.
    pub fn from_moments(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || dim % 2 != 0 || cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::invalid("cov", "shape must be 2N x 2N matching a 2N mean vector"));
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOL * (1.0 + cov.amax()) {
            return Err(Error::invalid("cov", format!("not symmetric (max asymmetry {asym:e})")));
        }
        Ok(Self { mean, cov })
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes() {
            return Err(Error::ModeOutOfRange {
                mode,
                n_modes: self.n_modes(),
            });
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_mode(a)?;
        self.check_mode(b)?;
        if a == b {
            return Err(Error::ModeCollision(a));
        }
        Ok(())
    }

    pub fn apply(&self, op: &SymplecticOp) -> Result<Self> {
        if op.n_modes() != self.n_modes() {
            return Err(Error::invalid(
                "op",
                format!("acts on {} modes, state has {}", op.n_modes(), self.n_modes()),
            ));
        }
        let s = op.matrix();
        let mean = s * &self.mean;
        let cov = s * &self.cov * s.transpose();
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self { mean, cov })
    }

    /// Displacement `D(κ e^{iθ})` on `mode`.
    pub fn displace(&self, mode: usize, magnitude: f64, phase: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if !(magnitude >= 0.0 && magnitude.is_finite()) {
            return Err(Error::invalid("magnitude", format!("must be finite and >= 0, got {magnitude}")));
        }
        let mut out = self.clone();
        let k = std::f64::consts::SQRT_2 * magnitude;
        out.mean[2 * mode] += k * phase.cos();
        out.mean[2 * mode + 1] += k * phase.sin();
        Ok(out)
    }

    /// Two-mode squeezing `S(r e^{iξ})`. Negative `r` is rejected; use `ξ + π`.
    pub fn two_mode_squeeze(&self, mode_a: usize, mode_b: usize, r: f64, xi: f64) -> Result<Self> {
        self.check_pair(mode_a, mode_b)?;
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::invalid("r", format!("must be finite and >= 0 (shift xi by pi instead), got {r}")));
        }
        self.apply(&SymplecticOp::two_mode_squeezer(self.n_modes(), mode_a, mode_b, r, xi)?)
    }

    /// 50:50 beam splitter `a → (a + i b)/√2`, `b → (i a + b)/√2`.
    pub fn beamsplitter_50_50(&self, mode_a: usize, mode_b: usize) -> Result<Self> {
        self.check_pair(mode_a, mode_b)?;
        self.apply(&SymplecticOp::beamsplitter(
            self.n_modes(),
            mode_a,
            mode_b,
            std::f64::consts::FRAC_1_SQRT_2,
        )?)
    }

    pub fn phase_shift(&self, mode: usize, phi: f64) -> Result<Self> {
        self.check_mode(mode)?;
        self.apply(&SymplecticOp::phase_shift(self.n_modes(), mode, phi)?)
    }

    /// Thermal loss as the closed-form Gaussian channel:
    /// `x̄ → √T x̄`, `σ → T σ + (1−T)(γ̄ + ½) I` on the addressed block.
    pub fn apply_loss_thermal(&self, spec: &LossChannelSpec) -> Result<Self> {
        let spec = LossChannelSpec::new(spec.mode, spec.transmissivity, spec.thermal_occupation)?;
        self.check_mode(spec.mode)?;
        let t = spec.transmissivity;
        let amp = t.sqrt();
        let (q, p) = (2 * spec.mode, 2 * spec.mode + 1);
        let mut out = self.clone();
        out.mean[q] *= amp;
        out.mean[p] *= amp;
        for idx in [q, p] {
            out.cov.row_mut(idx).scale_mut(amp);
            out.cov.column_mut(idx).scale_mut(amp);
        }
        let noise = (1.0 - t) * (spec.thermal_occupation + 0.5);
        out.cov[(q, q)] += noise;
        out.cov[(p, p)] += noise;
        Ok(out)
    }

    /// Same channel realised physically: append a thermal ancilla, mix it in
    /// on a beam splitter of amplitude `√T`, then trace the ancilla out.
    pub fn apply_loss_thermal_ancilla(&self, spec: &LossChannelSpec) -> Result<Self> {
        let spec = LossChannelSpec::new(spec.mode, spec.transmissivity, spec.thermal_occupation)?;
        self.check_mode(spec.mode)?;
        let joint = self.tensor(&GaussianState::thermal(spec.thermal_occupation)?);
        let ancilla = joint.n_modes() - 1;
        let mixed = joint.apply(&SymplecticOp::beamsplitter(
            joint.n_modes(),
            spec.mode,
            ancilla,
            spec.transmissivity.sqrt(),
        )?)?;
        mixed.trace_out(ancilla)
    }

    /// Tensor product `self ⊗ other`, with `other`'s modes appended.
    pub fn tensor(&self, other: &GaussianState) -> Self {
        let (d1, d2) = (self.mean.len(), other.mean.len());
        let mut mean = DVector::zeros(d1 + d2);
        mean.rows_mut(0, d1).copy_from(&self.mean);
        mean.rows_mut(d1, d2).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(d1 + d2, d1 + d2);
        cov.view_mut((0, 0), (d1, d1)).copy_from(&self.cov);
        cov.view_mut((d1, d1), (d2, d2)).copy_from(&other.cov);
        Self { mean, cov }
    }

    /// Partial trace: drops the rows and columns of `mode`.
    pub fn trace_out(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        if self.n_modes() == 1 {
            return Err(Error::invalid("mode", "cannot trace out the only mode"));
        }
        let mean = self.mean.clone().remove_rows(2 * mode, 2);
        let cov = self.cov.clone().remove_rows(2 * mode, 2).remove_columns(2 * mode, 2);
        Ok(Self { mean, cov })
    }

    /// `⟨a†a⟩ = (σ_qq + σ_pp + q̄² + p̄² − 1)/2`.
    pub fn mean_photon_number(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        let (q, p) = (2 * mode, 2 * mode + 1);
        let n = 0.5
            * (self.cov[(q, q)] + self.cov[(p, p)] + self.mean[q].powi(2) + self.mean[p].powi(2) - 1.0);
        Ok(if n < 0.0 && n > -1e-12 { 0.0 } else { n })
    }

    pub fn total_mean_photon_number(&self) -> f64 {
        (0..self.n_modes())
            .map(|k| self.mean_photon_number(k).unwrap_or(0.0))
            .sum()
    }

    /// Mean and variance of the symmetrised quadratic observable `½ xᵀ M x`
    /// for symmetric `M`.
    ///
    /// Isserlis/Wick pairing of the Gaussian fourth moments gives
    /// `Var = ½ tr(MσMσ) + x̄ᵀMσMx̄ + ⅛ tr(MΩMΩ)`; the last term is the
    /// Moyal correction that turns the Wigner average of the squared symbol
    /// into the expectation of the squared operator.
    pub fn quadratic_form_stats(&self, m: &DMatrix<f64>) -> Result<Moments> {
        let dim = self.mean.len();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::invalid("m", format!("expected {dim}x{dim}")));
        }
        let m = (m + m.transpose()) * 0.5;
        let w = omega(self.n_modes());
        let ms = &m * &self.cov;
        let mean = 0.5 * (ms.trace() + self.mean.dot(&(&m * &self.mean)));
        let fluct = 0.5 * (&ms * &ms).trace();
        let coherent = (&m * &self.mean).dot(&(&self.cov * (&m * &self.mean)));
        let mw = &m * &w;
        let ordering = 0.125 * (&mw * &mw).trace();
        let variance = fluct + coherent + ordering;
        let scale = 1.0 + fluct.abs() + coherent.abs() + ordering.abs();
        let variance = if variance < 0.0 {
            if variance > -1e-12 * scale {
                0.0
            } else {
                return Err(Error::NegativeVariance(variance));
            }
        } else {
            variance
        };
        Ok(Moments { mean, variance })
    }

    /// `⟨J₃⟩` and `Var(J₃)` for `J₃ = a†a − b†b`, exact for any Gaussian state.
    pub fn number_difference_stats(&self, mode_a: usize, mode_b: usize) -> Result<Moments> {
        self.check_pair(mode_a, mode_b)?;
        let dim = self.mean.len();
        let mut m = DMatrix::zeros(dim, dim);
        m[(2 * mode_a, 2 * mode_a)] = 1.0;
        m[(2 * mode_a + 1, 2 * mode_a + 1)] = 1.0;
        m[(2 * mode_b, 2 * mode_b)] = -1.0;
        m[(2 * mode_b + 1, 2 * mode_b + 1)] = -1.0;
        self.quadratic_form_stats(&m)
    }

    /// Moments of the Hermitian exchange observable `i(a†b − b†a) = p_a q_b − q_a p_b`.
    pub fn exchange_stats(&self, mode_a: usize, mode_b: usize) -> Result<Moments> {
        self.check_pair(mode_a, mode_b)?;
        let dim = self.mean.len();
        let mut m = DMatrix::zeros(dim, dim);
        m[(2 * mode_a + 1, 2 * mode_b)] = 1.0;
        m[(2 * mode_b, 2 * mode_a + 1)] = 1.0;
        m[(2 * mode_a, 2 * mode_b + 1)] = -1.0;
        m[(2 * mode_b + 1, 2 * mode_a)] = -1.0;
        self.quadratic_form_stats(&m)
    }

    /// Symplectic spectrum (ascending), from the eigenvalues of
    /// `σ^{1/2} Ωᵀ σ Ω σ^{1/2}`, which are the squared symplectic eigenvalues
    /// with multiplicity two.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let n = self.n_modes();
        let eig = SymmetricEigen::new(self.cov.clone());
        let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        let root = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
        let w = omega(n);
        let inner = &root * w.transpose() * &self.cov * &w * &root;
        let inner = (&inner + inner.transpose()) * 0.5;
        let mut squares: Vec<f64> = SymmetricEigen::new(inner).eigenvalues.iter().copied().collect();
        squares.sort_by(f64::total_cmp);
        squares.chunks(2).map(|pair| pair[0].max(0.0).sqrt()).collect()
    }

    pub fn min_symplectic_eigenvalue(&self) -> f64 {
        self.symplectic_eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_asymmetry(&self) -> f64 {
        (&self.cov - self.cov.transpose()).amax()
    }

    /// Uncertainty principle `σ + (i/2)Ω ≥ 0`, i.e. all symplectic eigenvalues `≥ ½`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.max_asymmetry() <= SYMMETRY_TOL && self.min_symplectic_eigenvalue() >= 0.5 - tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    #[test]
    fn vacuum_shapes() {
        for n in [1, 2, 4] {
            let v = GaussianState::vacuum(n).unwrap();
            assert_eq!(v.mean().len(), 2 * n);
            assert!(v.mean().iter().all(|&x| x == 0.0));
            assert_eq!(v.cov(), &(DMatrix::identity(2 * n, 2 * n) * 0.5));
        }
        assert!(GaussianState::vacuum(0).is_err());
    }

    #[test]
    fn displacement_convention() {
        let v = GaussianState::vacuum(1).unwrap();
        let d = v.displace(0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(d.mean()[0], SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(d.mean()[1], 0.0, epsilon = 1e-15);
        assert_eq!(d.cov(), v.cov());

        let d = v.displace(0, 1.0, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(d.mean()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.mean()[1], SQRT_2, epsilon = 1e-15);

        let d = v.displace(0, 2.0, FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(d.mean_photon_number(0).unwrap(), 4.0, epsilon = 1e-12);

        assert!(matches!(v.displace(1, 1.0, 0.0), Err(Error::ModeOutOfRange { .. })));
    }

    #[test]
    fn squeezer_photon_number() {
        let v = GaussianState::vacuum(2).unwrap();
        assert_eq!(v.two_mode_squeeze(0, 1, 0.0, 1.3).unwrap(), v);
        for (r, xi) in [(0.3, 0.0), (1.0, 2.0), (1.7, -1.0)] {
            let s = v.two_mode_squeeze(0, 1, r, xi).unwrap();
            assert_abs_diff_eq!(s.total_mean_photon_number(), 2.0 * f64::sinh(r).powi(2), epsilon = 1e-12);
        }
        let s = v.two_mode_squeeze(0, 1, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(s.mean_photon_number(0).unwrap(), 1.0f64.sinh().powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(s.mean_photon_number(0).unwrap(), 1.381097845541816, epsilon = 1e-12);
        assert!(matches!(v.two_mode_squeeze(1, 1, 0.2, 0.0), Err(Error::ModeCollision(1))));
        assert!(v.two_mode_squeeze(0, 1, -0.2, 0.0).is_err());
    }

    #[test]
    fn squeezed_coherent_photon_number() {
        // alpha = beta = 1, Theta = pi, r = 0.5 by hand:
        // 2 cosh 1 + 2 sinh 1 + 2 sinh²(0.5) = 2e + 2 sinh²(0.5).
        let expected = 2.0 * std::f64::consts::E + 2.0 * 0.5f64.sinh().powi(2);
        let s = GaussianState::vacuum(2)
            .unwrap()
            .displace(0, 1.0, FRAC_PI_2)
            .unwrap()
            .displace(1, 1.0, FRAC_PI_2)
            .unwrap()
            .two_mode_squeeze(0, 1, 0.5, 0.0)
            .unwrap();
        assert_abs_diff_eq!(s.total_mean_photon_number(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(s.total_mean_photon_number(), 5.97965, epsilon = 1e-4);
    }

    #[test]
    fn beamsplitter_behaviour() {
        let v = GaussianState::vacuum(2).unwrap();
        assert_eq!(v.beamsplitter_50_50(0, 1).unwrap().cov(), v.cov());

        let c = v.displace(0, 1.5, 0.0).unwrap().beamsplitter_50_50(0, 1).unwrap();
        assert_abs_diff_eq!(c.mean_photon_number(0).unwrap(), 1.125, epsilon = 1e-12);
        assert_abs_diff_eq!(c.mean_photon_number(1).unwrap(), 1.125, epsilon = 1e-12);

        // Applied twice: a → i b, b → i a. Four times is a → −a on both
        // modes, a pure phase, and eight times is the identity.
        let bs = SymplecticOp::beamsplitter(2, 0, 1, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let four = bs.compose(&bs).unwrap().compose(&bs).unwrap().compose(&bs).unwrap();
        assert!((four.matrix() + DMatrix::<f64>::identity(4, 4)).amax() < 1e-14);
        let twice = bs.compose(&bs).unwrap();
        let swap_with_phase = SymplecticOp::from_bogoliubov(
            2,
            &[0, 1],
            &[
                &[Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
                &[Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
            ],
            &[&[Complex64::new(0.0, 0.0); 2], &[Complex64::new(0.0, 0.0); 2]],
        )
        .unwrap();
        assert!((twice.matrix() - swap_with_phase.matrix()).amax() < 1e-14);
        assert!(v.beamsplitter_50_50(0, 0).is_err());
    }

    #[test]
    fn phase_shift_rotates_mean() {
        let c = GaussianState::vacuum(1).unwrap().displace(0, 1.0, 0.0).unwrap();
        assert_eq!(c.phase_shift(0, 0.0).unwrap(), c);
        let full = c.phase_shift(0, 2.0 * PI).unwrap();
        assert!((full.mean() - c.mean()).amax() < 1e-12);
        let quarter = c.phase_shift(0, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(quarter.mean()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(quarter.mean()[1], SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(quarter.mean_photon_number(0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn loss_channel_examples() {
        let s = GaussianState::vacuum(2)
            .unwrap()
            .displace(0, 0.7, 0.3)
            .unwrap()
            .two_mode_squeeze(0, 1, 0.4, 0.2)
            .unwrap();
        let unity = LossChannelSpec::new(0, 1.0, 3.0).unwrap();
        assert_eq!(s.apply_loss_thermal(&unity).unwrap(), s);

        let c = GaussianState::vacuum(1).unwrap().displace(0, 2.0, 0.0).unwrap();
        let half = LossChannelSpec::new(0, 0.5, 0.0).unwrap();
        assert_abs_diff_eq!(c.apply_loss_thermal(&half).unwrap().mean_photon_number(0).unwrap(), 2.0, epsilon = 1e-12);

        let hot = LossChannelSpec::new(0, 0.5, 2.0).unwrap();
        let v = GaussianState::vacuum(1).unwrap();
        assert_abs_diff_eq!(v.apply_loss_thermal(&hot).unwrap().mean_photon_number(0).unwrap(), 1.0, epsilon = 1e-12);

        assert!(LossChannelSpec::new(0, 0.0, 0.0).is_err());
        assert!(LossChannelSpec::new(0, 1.2, 0.0).is_err());
        assert!(LossChannelSpec::new(0, 0.5, -1.0).is_err());
    }

    #[test]
    fn loss_paths_agree() {
        let s = GaussianState::vacuum(2)
            .unwrap()
            .displace(0, 1.1, 0.4)
            .unwrap()
            .displace(1, 0.6, -1.0)
            .unwrap()
            .two_mode_squeeze(0, 1, 0.8, 0.9)
            .unwrap();
        let spec = LossChannelSpec::new(1, 0.37, 0.8).unwrap();
        let direct = s.apply_loss_thermal(&spec).unwrap();
        let ancilla = s.apply_loss_thermal_ancilla(&spec).unwrap();
        assert!((direct.mean() - ancilla.mean()).amax() < 1e-12);
        assert!((direct.cov() - ancilla.cov()).amax() < 1e-12);
    }

    #[test]
    fn photon_number_examples() {
        let v = GaussianState::vacuum(1).unwrap();
        assert_eq!(v.mean_photon_number(0).unwrap(), 0.0);
        let c = v.displace(0, 3.0, 1.0).unwrap();
        assert_abs_diff_eq!(c.mean_photon_number(0).unwrap(), 9.0, epsilon = 1e-12);
    }

    #[test]
    fn number_difference_examples() {
        let v = GaussianState::vacuum(2).unwrap();
        let m = v.number_difference_stats(0, 1).unwrap();
        assert_abs_diff_eq!(m.mean, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.variance, 0.0, epsilon = 1e-15);

        let c = v.displace(0, 1.7, 0.2).unwrap();
        let m = c.number_difference_stats(0, 1).unwrap();
        assert_abs_diff_eq!(m.mean, 1.7 * 1.7, epsilon = 1e-12);
        assert_abs_diff_eq!(m.variance, 1.7 * 1.7, epsilon = 1e-12);

        // n_a − n_b commutes with the two-mode squeezer, so squeezed vacuum has
        // zero number-difference variance.
        let tmsv = v.two_mode_squeeze(0, 1, 1.2, 0.4).unwrap();
        assert_abs_diff_eq!(tmsv.number_difference_stats(0, 1).unwrap().variance, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn exchange_variance_of_squeezed_vacuum() {
        // Σ_n p_n 2n(n+1) over the thermal marginal = 4 sinh²r cosh²r.
        let r: f64 = 0.7;
        let tmsv = GaussianState::vacuum(2).unwrap().two_mode_squeeze(0, 1, r, 0.3).unwrap();
        let m = tmsv.exchange_stats(0, 1).unwrap();
        assert_abs_diff_eq!(m.mean, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.variance, (2.0 * r).sinh().powi(2), epsilon = 1e-10);
    }

    #[test]
    fn symplectic_spectrum() {
        let v = GaussianState::vacuum(3).unwrap();
        for nu in v.symplectic_eigenvalues() {
            assert_abs_diff_eq!(nu, 0.5, epsilon = 1e-12);
        }
        let th = GaussianState::thermal(1.5).unwrap().tensor(&GaussianState::thermal(0.2).unwrap());
        let nus = th.symplectic_eigenvalues();
        assert_abs_diff_eq!(nus[0], 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(nus[1], 2.0, epsilon = 1e-12);
        // Pure states keep ν = ½ under any symplectic map.
        let s = GaussianState::vacuum(2).unwrap().two_mode_squeeze(0, 1, 1.5, 0.3).unwrap();
        for nu in s.symplectic_eigenvalues() {
            assert_abs_diff_eq!(nu, 0.5, epsilon = 1e-9);
        }
    }

    #[test]
    fn rejects_non_symplectic() {
        let m = DMatrix::from_diagonal_element(2, 2, 2.0);
        assert!(matches!(SymplecticOp::new(m), Err(Error::NotSymplectic { .. })));
    }

    #[test]
    fn trace_and_tensor_round_trip() {
        let a = GaussianState::vacuum(1).unwrap().displace(0, 0.3, 0.1).unwrap();
        let b = GaussianState::thermal(0.4).unwrap();
        let ab = a.tensor(&b);
        assert_eq!(ab.trace_out(1).unwrap(), a);
        assert_eq!(ab.trace_out(0).unwrap(), b);
        assert!(a.trace_out(0).is_err());
    }
}
