//! Brute-force number-basis oracle for small amplitudes.
//!
//! The input TMSCS is built by exponentiating the displacement and squeezing
//! generators in a truncated box. The unitary part of the pipeline is applied
//! block by block in total photon number, where it is exact. Thermal loss is
//! applied in the Heisenberg picture: each single-mode ladder operator that
//! appears in J₃ and J₃² is pulled back through the loss channel with the
//! Kraus sum over a truncated thermal environment, and the expectation is
//! taken on the pure state that enters the arms.
//!
//! The recombining beam splitter is absorbed into the observable via
//! `BS†(a†a − b†b)BS = i(a†b − b†a)`.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::Moments;
use crate::michelson::InterferometerParams;

type C = Complex64;

pub const DEFAULT_CUTOFF: usize = 40;
pub const MAX_CUTOFF: usize = 160;
/// Accepted population outside the per-mode cutoff.
pub const LEAKAGE_TOL: f64 = 1e-8;
/// The thermal distribution is cut once this much weight is left.
pub const THERMAL_TAIL: f64 = 1e-10;
/// Extra levels kept beyond the cutoff while building the input, so that the
/// box edge does not bend the generators inside the cutoff.
const PAD: usize = 8;
/// Amplitude-squared blocks below this are skipped.
const NEGLIGIBLE: f64 = 1e-30;

const ZERO: C = C::new(0.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Two-mode pure state `ψ[n_a, n_b]` on an `N_c × N_c` number box.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    cutoff: usize,
    amplitudes: DMatrix<C>,
    leakage: f64,
}

impl FockState {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &DMatrix<C> {
        &self.amplitudes
    }

    /// Population that fell outside the box while building the state.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn mean_photon_number(&self, mode: usize) -> Result<f64> {
        if mode > 1 {
            return Err(Error::ModeOutOfRange { mode, n_modes: 2 });
        }
        let mut n = 0.0;
        for ((i, j), z) in self.amplitudes.iter().enumerate().map(|(k, z)| ((k % self.cutoff, k / self.cutoff), z)) {
            n += z.norm_sqr() * if mode == 0 { i } else { j } as f64;
        }
        Ok(n)
    }

    pub fn total_mean_photon_number(&self) -> f64 {
        self.mean_photon_number(0).unwrap_or(0.0) + self.mean_photon_number(1).unwrap_or(0.0)
    }
}

/// `exp(G)v` for a tridiagonal `G` with `G[i+1, i] = sub[i]` and
/// `G[i, i+1] = sup[i]`, by a Taylor series on `G/s` repeated `s` times.
fn expm_tridiag_apply(sub: &[C], sup: &[C], mut v: DVector<C>) -> DVector<C> {
    let k = v.len();
    let mut bound = 0.0f64;
    for i in 0..k {
        let below = if i > 0 { sub[i - 1].norm() } else { 0.0 };
        let above = if i + 1 < k { sup[i].norm() } else { 0.0 };
        bound = bound.max(below + above);
    }
    if bound == 0.0 {
        return v;
    }
    let steps = (2.0 * bound).ceil().max(1.0) as usize;
    let scale = 1.0 / steps as f64;
    let apply = |x: &DVector<C>| {
        DVector::from_fn(k, |i, _| {
            let mut acc = ZERO;
            if i > 0 {
                acc += sub[i - 1] * x[i - 1];
            }
            if i + 1 < k {
                acc += sup[i] * x[i + 1];
            }
            acc * scale
        })
    };
    for _ in 0..steps {
        let mut term = v.clone();
        let mut sum = v.clone();
        let floor = 1e-18 * v.norm();
        for n in 1..60 {
            term = apply(&term).unscale(n as f64);
            sum += &term;
            if term.norm() <= floor {
                break;
            }
        }
        v = sum;
    }
    v
}

/// `exp(κe^{iθ}a† − κe^{−iθ}a)|0⟩` in a `dim`-level box.
fn displaced_vacuum(dim: usize, kappa: f64, theta: f64) -> DVector<C> {
    let z = C::from_polar(kappa, theta);
    let sub: Vec<C> = (1..dim).map(|n| z * (n as f64).sqrt()).collect();
    let sup: Vec<C> = (1..dim).map(|n| -z.conj() * (n as f64).sqrt()).collect();
    let mut e0 = DVector::<C>::zeros(dim);
    e0[0] = C::new(1.0, 0.0);
    expm_tridiag_apply(&sub, &sup, e0)
}

/// Applies `exp(r(ab e^{−iξ} − a†b† e^{iξ}))` to `psi`, one fixed
/// `n_a − n_b` block at a time.
fn squeeze(psi: &mut DMatrix<C>, r: f64, xi: f64) {
    if r == 0.0 {
        return;
    }
    let w = psi.nrows() as isize;
    let up = -C::from_polar(r, xi);
    let down = C::from_polar(r, -xi);
    for d in -(w - 1)..w {
        let (oa, ob) = (d.max(0) as usize, (-d).max(0) as usize);
        let k = (w - d.abs()) as usize;
        let v = DVector::from_fn(k, |i, _| psi[(i + oa, i + ob)]);
        if v.norm_squared() < NEGLIGIBLE {
            continue;
        }
        let c: Vec<f64> = (0..k - 1).map(|i| (((i + oa + 1) * (i + ob + 1)) as f64).sqrt()).collect();
        let sub: Vec<C> = c.iter().map(|&s| up * s).collect();
        let sup: Vec<C> = c.iter().map(|&s| down * s).collect();
        let out = expm_tridiag_apply(&sub, &sup, v);
        for i in 0..k {
            psi[(i + oa, i + ob)] = out[i];
        }
    }
}

/// Off-diagonal of `iθ(a†c + c†a)` restricted to total photon number `n`,
/// in the basis `|j, n−j⟩` indexed by the first mode's count `j`. The
/// generator is symmetric, so this serves as both sub- and super-diagonal.
fn exchange_generator(n: usize, theta: f64) -> Vec<C> {
    (0..n).map(|j| I * theta * (((j + 1) * (n - j)) as f64).sqrt()).collect()
}

/// Eigen-decomposition of `a†c + c†a` on the total-number-`n` block. It is
/// real, symmetric and independent of the mixing angle.
fn exchange_eigen(n: usize) -> SymmetricEigen<f64, Dyn> {
    let mut h = DMatrix::<f64>::zeros(n + 1, n + 1);
    for j in 0..n {
        let s = (((j + 1) * (n - j)) as f64).sqrt();
        h[(j + 1, j)] = s;
        h[(j, j + 1)] = s;
    }
    SymmetricEigen::new(h)
}

/// `exp(iθ(a†c + c†a))` on one block from its eigen-decomposition.
fn exchange_block(eig: &SymmetricEigen<f64, Dyn>, theta: f64) -> DMatrix<C> {
    let v = eig.eigenvectors.map(|x| C::new(x, 0.0));
    let phases = eig.eigenvalues.map(|l| C::from_polar(1.0, theta * l));
    let mut right = v.transpose();
    for (k, ph) in phases.iter().enumerate() {
        for x in right.row_mut(k).iter_mut() {
            *x *= ph;
        }
    }
    v * right
}

fn validate_build(alpha: f64, beta: f64, r: f64, cutoff: usize) -> Result<()> {
    for (name, v) in [("alpha", alpha), ("beta", beta), ("r", r)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
        }
    }
    if cutoff < 2 {
        return Err(Error::invalid("cutoff", format!("must be >= 2, got {cutoff}")));
    }
    Ok(())
}

/// Builds the state without enforcing the leakage budget.
pub(crate) fn build_tmscs_unchecked(
    alpha: f64,
    beta: f64,
    theta1: f64,
    theta2: f64,
    r: f64,
    xi: f64,
    cutoff: usize,
) -> Result<FockState> {
    validate_build(alpha, beta, r, cutoff)?;
    let w = cutoff + PAD;
    let a = displaced_vacuum(w, alpha, theta1);
    let b = displaced_vacuum(w, beta, theta2);
    let mut psi = &a * b.transpose();
    squeeze(&mut psi, r, xi);
    let total: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let amplitudes = psi.view((0, 0), (cutoff, cutoff)).into_owned();
    let kept: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    Ok(FockState {
        cutoff,
        amplitudes,
        leakage: (total - kept).max(0.0),
    })
}

/// `Ŝ(re^{iξ}) D̂_b(βe^{iθ₂}) D̂_a(αe^{iθ₁})|00⟩` truncated to `cutoff` levels
/// per mode. Fails if more than [`LEAKAGE_TOL`] of the population lies
/// outside the box.
pub fn build_tmscs(
    alpha: f64,
    beta: f64,
    theta1: f64,
    theta2: f64,
    r: f64,
    xi: f64,
    cutoff: usize,
) -> Result<FockState> {
    let s = build_tmscs_unchecked(alpha, beta, theta1, theta2, r, xi, cutoff)?;
    if s.leakage >= LEAKAGE_TOL {
        return Err(Error::LeakageExceeded {
            cutoff,
            leakage: s.leakage,
        });
    }
    Ok(s)
}

/// Geometric occupation weights of a thermal state, cut once the remaining
/// tail is below [`THERMAL_TAIL`].
pub fn thermal_weights(gamma: f64) -> Vec<f64> {
    if gamma == 0.0 {
        return vec![1.0];
    }
    let ratio = gamma / (1.0 + gamma);
    let mut p = 1.0 / (1.0 + gamma);
    let mut out = Vec::new();
    let mut cum = 0.0;
    while cum <= 1.0 - THERMAL_TAIL {
        out.push(p);
        cum += p;
        p *= ratio;
    }
    out
}

/// A single-mode operator with one nonzero diagonal: `A[j + offset, j] = f(j)`.
#[derive(Debug, Clone, Copy)]
struct Banded {
    offset: isize,
    f: fn(usize) -> f64,
}

impl Banded {
    fn at(&self, row: usize, col: usize) -> f64 {
        if row as isize - col as isize == self.offset {
            (self.f)(col)
        } else {
            0.0
        }
    }
}

const CREATE: Banded = Banded {
    offset: 1,
    f: |j| ((j + 1) as f64).sqrt(),
};
const ANNIHILATE: Banded = Banded {
    offset: -1,
    f: |j| (j as f64).sqrt(),
};
const NUMBER: Banded = Banded {
    offset: 0,
    f: |j| j as f64,
};
const ANTI_NUMBER: Banded = Banded {
    offset: 0,
    f: |j| (j + 1) as f64,
};
const CREATE2: Banded = Banded {
    offset: 2,
    f: |j| (((j + 1) * (j + 2)) as f64).sqrt(),
};
const ANNIHILATE2: Banded = Banded {
    offset: -2,
    f: |j| ((j * j.saturating_sub(1)) as f64).sqrt(),
};
#[cfg(test)]
const IDENTITY: Banded = Banded { offset: 0, f: |_| 1.0 };

/// Heisenberg picture of one arm's thermal loss channel on an `s`-level box.
struct LossDual {
    weights: Vec<f64>,
    blocks: Vec<DMatrix<C>>,
    s: usize,
}

impl LossDual {
    /// Total photon number up to which blocks are needed.
    fn n_max(gamma: f64, s: usize) -> usize {
        s + thermal_weights(gamma).len() + 2
    }

    /// `eigs[n]` must decompose the exchange generator on block `n`, for
    /// every `n` up to [`LossDual::n_max`].
    fn new(t: f64, gamma: f64, s: usize, eigs: &[SymmetricEigen<f64, Dyn>]) -> Self {
        let weights = thermal_weights(gamma);
        let theta = t.sqrt().clamp(0.0, 1.0).acos();
        let blocks = eigs[..=Self::n_max(gamma, s)].iter().map(|e| exchange_block(e, theta)).collect();
        Self { weights, blocks, s }
    }

    /// `E†(A)[n1, n2] = Σ_m p_m Σ_l conj(U_{N1}[N1−l, n1]) A[N1−l, N2−l] U_{N2}[N2−l, n2]`
    /// with `N1 = n1 + m`, `N2 = n2 + m` and `l` the photons left in the
    /// environment.
    fn pull_back(&self, op: Banded) -> DMatrix<C> {
        let s = self.s;
        let mut out = DMatrix::<C>::zeros(s, s);
        for n2 in 0..s {
            let n1 = n2 as isize + op.offset;
            if n1 < 0 || n1 >= s as isize {
                continue;
            }
            let n1 = n1 as usize;
            let mut acc = ZERO;
            for (m, &p) in self.weights.iter().enumerate() {
                let (big1, big2) = (n1 + m, n2 + m);
                let (u1, u2) = (&self.blocks[big1], &self.blocks[big2]);
                let mut inner = ZERO;
                for l in 0..=big1.min(big2) {
                    let (i1, i2) = (big1 - l, big2 - l);
                    let a = op.at(i1, i2);
                    if a != 0.0 {
                        inner += u1[(i1, n1)].conj() * a * u2[(i2, n2)];
                    }
                }
                acc += inner * p;
            }
            out[(n1, n2)] = acc;
        }
        out
    }
}

/// `⟨ψ| A ⊗ B |ψ⟩ = tr(Ψ† A Ψ Bᵀ)`.
fn expect_product(psi: &DMatrix<C>, a: &DMatrix<C>, b: &DMatrix<C>) -> C {
    let inner = a * psi * b.transpose();
    psi.iter().zip(inner.iter()).map(|(p, q)| p.conj() * q).sum()
}

/// Smallest box that holds all but [`NEGLIGIBLE`] of the population.
fn support(psi: &DMatrix<C>) -> usize {
    let n = psi.nrows().max(psi.ncols());
    let mut s = n;
    while s > 1 {
        let mut outside = 0.0;
        for i in 0..psi.nrows() {
            for j in 0..psi.ncols() {
                if i >= s - 1 || j >= s - 1 {
                    outside += psi[(i, j)].norm_sqr();
                }
            }
        }
        if outside >= NEGLIGIBLE {
            break;
        }
        s -= 1;
    }
    s
}

/// First beam splitter and the phase shift, exact in the total-number
/// triangle. Returns the state entering the arms on a `(2N_c−1)`-level box,
/// trimmed to its numerical support.
pub(crate) fn into_arms(state: &FockState, phi: f64) -> DMatrix<C> {
    let nc = state.cutoff;
    let m = 2 * nc - 1;
    let mut psi = DMatrix::<C>::zeros(m, m);
    psi.view_mut((0, 0), (nc, nc)).copy_from(&state.amplitudes);
    for n in 0..m {
        let v = DVector::from_fn(n + 1, |j, _| psi[(j, n - j)]);
        if v.norm_squared() < NEGLIGIBLE {
            continue;
        }
        let off = exchange_generator(n, FRAC_PI_4);
        let out = expm_tridiag_apply(&off, &off, v);
        for j in 0..=n {
            psi[(j, n - j)] = out[j];
        }
    }
    for j in 0..m {
        let ph = C::from_polar(1.0, phi * j as f64);
        for k in 0..m {
            psi[(j, k)] *= ph;
        }
    }
    let s = support(&psi);
    psi.view((0, 0), (s, s)).into_owned()
}

/// J₃ mean and variance at the detectors for an input built by
/// [`build_tmscs`], using the loss, noise and phase settings of `params`.
pub fn evolve_and_measure(state: &FockState, params: &InterferometerParams) -> Result<Moments> {
    params.validate()?;
    if state.leakage >= LEAKAGE_TOL {
        return Err(Error::LeakageExceeded {
            cutoff: state.cutoff,
            leakage: state.leakage,
        });
    }
    let psi = into_arms(state, params.phi);
    let s = psi.nrows();
    let n_max = LossDual::n_max(params.gamma_a, s).max(LossDual::n_max(params.gamma_b, s));
    let eigs: Vec<_> = (0..=n_max).map(exchange_eigen).collect();
    let da = LossDual::new(params.t_a, params.gamma_a, s, &eigs);
    let db = LossDual::new(params.t_b, params.gamma_b, s, &eigs);
    let e = |d: &LossDual, op| d.pull_back(op);

    // i(a†b − ab†)
    let x = I * (expect_product(&psi, &e(&da, CREATE), &e(&db, ANNIHILATE))
        - expect_product(&psi, &e(&da, ANNIHILATE), &e(&db, CREATE)));
    // a†a bb† + aa† b†b − a†² b² − a² b†²
    let x2 = expect_product(&psi, &e(&da, NUMBER), &e(&db, ANTI_NUMBER))
        + expect_product(&psi, &e(&da, ANTI_NUMBER), &e(&db, NUMBER))
        - expect_product(&psi, &e(&da, CREATE2), &e(&db, ANNIHILATE2))
        - expect_product(&psi, &e(&da, ANNIHILATE2), &e(&db, CREATE2));
    let mean = x.re;
    let variance = x2.re - mean * mean;
    Ok(Moments {
        mean,
        variance: variance.max(0.0),
    })
}

/// Result of an oracle run at the first cutoff that met the leakage budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRun {
    pub moments: Moments,
    pub cutoff: usize,
    pub leakage: f64,
}

/// Builds and measures at `cutoff`, doubling it on leakage failure up to
/// [`MAX_CUTOFF`].
pub fn oracle_j3_from(params: &InterferometerParams, cutoff: usize) -> Result<OracleRun> {
    params.validate()?;
    let mut c = cutoff;
    loop {
        match build_tmscs(params.alpha, params.beta, params.theta1, params.theta2, params.r, params.xi, c) {
            Ok(state) => {
                return Ok(OracleRun {
                    moments: evolve_and_measure(&state, params)?,
                    cutoff: c,
                    leakage: state.leakage,
                })
            }
            Err(Error::LeakageExceeded { .. }) if c * 2 <= MAX_CUTOFF => c *= 2,
            Err(e) => return Err(e),
        }
    }
}

pub fn oracle_j3(params: &InterferometerParams) -> Result<OracleRun> {
    oracle_j3_from(params, DEFAULT_CUTOFF)
}

/// Largest change in ⟨J₃⟩ or Var(J₃) between the accepted cutoff and twice it.
pub fn cutoff_convergence(params: &InterferometerParams) -> Result<f64> {
    let first = oracle_j3(params)?;
    let state = build_tmscs(
        params.alpha,
        params.beta,
        params.theta1,
        params.theta2,
        params.r,
        params.xi,
        2 * first.cutoff,
    )?;
    let second = evolve_and_measure(&state, params)?;
    Ok((first.moments.mean - second.mean)
        .abs()
        .max((first.moments.variance - second.variance).abs()))
}
