//! Browser bindings: a single sensitivity point, a (γ̄, T) gain heatmap with
//! its G = 1 boundary, and the optimal squeezing angle.

use std::f64::consts::FRAC_PI_2;

use gaussint::michelson::{self, InterferometerParams};
use gaussint::optimizer::{self, ArmMode, AxisRange, SweepSpec, XiPolicy, XI_GUARD};
use wasm_bindgen::prelude::*;

fn js(e: gaussint::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn policy(xi: f64, optimize: bool) -> XiPolicy {
    if optimize {
        XiPolicy::Optimized
    } else {
        XiPolicy::Fixed(xi)
    }
}

/// `[⟨J3⟩, Var(J3), Δφ, n̄, G]` on the θ₁ = 0, θ₂ = π + ξ line with α = β.
#[allow(clippy::too_many_arguments)]
pub fn point(
    alpha: f64,
    r: f64,
    xi: f64,
    t_a: f64,
    t_b: f64,
    gamma_a: f64,
    gamma_b: f64,
    phi: f64,
) -> gaussint::Result<Vec<f64>> {
    let p = InterferometerParams::theta_pi(alpha, alpha, r, xi)
        .with_loss(t_a, t_b, gamma_a, gamma_b)
        .with_phi(phi);
    let s = michelson::sensitivity(&p)?;
    Ok(vec![s.j3_mean, s.j3_variance, s.delta_phi, s.n_bar, s.gain])
}

#[wasm_bindgen(js_name = sensitivityPoint)]
#[allow(clippy::too_many_arguments)]
pub fn sensitivity_point(
    alpha: f64,
    r: f64,
    xi: f64,
    t_a: f64,
    t_b: f64,
    gamma_a: f64,
    gamma_b: f64,
    phi: f64,
) -> Result<Vec<f64>, JsError> {
    point(alpha, r, xi, t_a, t_b, gamma_a, gamma_b, phi).map_err(js)
}

/// Closed-form gain grid, row-major with γ̄ outer and T inner.
#[wasm_bindgen]
pub struct Heatmap {
    t_values: Vec<f64>,
    gamma_values: Vec<f64>,
    gain: Vec<f64>,
    xi_used: Vec<f64>,
    boundary_gamma: Vec<f64>,
    boundary_t: Vec<f64>,
}

#[wasm_bindgen]
impl Heatmap {
    #[wasm_bindgen(getter, js_name = tValues)]
    pub fn t_values(&self) -> Vec<f64> {
        self.t_values.clone()
    }

    #[wasm_bindgen(getter, js_name = gammaValues)]
    pub fn gamma_values(&self) -> Vec<f64> {
        self.gamma_values.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn gain(&self) -> Vec<f64> {
        self.gain.clone()
    }

    #[wasm_bindgen(getter, js_name = xiUsed)]
    pub fn xi_used(&self) -> Vec<f64> {
        self.xi_used.clone()
    }

    #[wasm_bindgen(getter, js_name = boundaryGamma)]
    pub fn boundary_gamma(&self) -> Vec<f64> {
        self.boundary_gamma.clone()
    }

    #[wasm_bindgen(getter, js_name = boundaryT)]
    pub fn boundary_t(&self) -> Vec<f64> {
        self.boundary_t.clone()
    }
}

pub fn heatmap(
    symmetric: bool,
    r: f64,
    xi: f64,
    optimize: bool,
    t_count: usize,
    gamma_max: f64,
    gamma_count: usize,
) -> gaussint::Result<Heatmap> {
    let spec = SweepSpec {
        t_range: AxisRange::new(0.01, 1.0, t_count)?,
        gamma_range: AxisRange::new(0.0, gamma_max, gamma_count)?,
        fixed: InterferometerParams::theta_pi(100.0, 100.0, r, 0.0),
        mode: if symmetric { ArmMode::Symmetric } else { ArmMode::OneArm },
        xi_policy: policy(xi, optimize),
    };
    let g = optimizer::sweep(&spec)?;
    Ok(Heatmap {
        boundary_gamma: g.boundary.iter().map(|b| b.gamma).collect(),
        boundary_t: g.boundary.iter().map(|b| b.t).collect(),
        t_values: g.t_values,
        gamma_values: g.gamma_values,
        gain: g.gain,
        xi_used: g.xi_used,
    })
}

#[wasm_bindgen(js_name = gainHeatmap)]
pub fn gain_heatmap(
    symmetric: bool,
    r: f64,
    xi: f64,
    optimize: bool,
    t_count: usize,
    gamma_max: f64,
    gamma_count: usize,
) -> Result<Heatmap, JsError> {
    heatmap(symmetric, r, xi, optimize, t_count, gamma_max, gamma_count).map_err(js)
}

/// `[ξ*, G(ξ*), G(0)]` from the leading-order gain.
pub fn best_xi(symmetric: bool, t: f64, gamma: f64, r: f64) -> gaussint::Result<Vec<f64>> {
    let mode = if symmetric { ArmMode::Symmetric } else { ArmMode::OneArm };
    let p = mode.apply(InterferometerParams::theta_pi(100.0, 100.0, r, 0.0), t, gamma);
    p.validate()?;
    let (xi, g) = optimizer::optimize_xi(&p, (-FRAC_PI_2 + XI_GUARD, FRAC_PI_2 - XI_GUARD))?;
    Ok(vec![xi, g, gaussint::closed_form::gain_leading(&p)?])
}

#[wasm_bindgen(js_name = optimizeXi)]
pub fn optimize_xi(symmetric: bool, t: f64, gamma: f64, r: f64) -> Result<Vec<f64>, JsError> {
    best_xi(symmetric, t, gamma, r).map_err(js)
}
