use gaussint::closed_form;
use gaussint::michelson::{self, InterferometerParams};
use gaussint::optimizer::{self, ArmMode, XiPolicy};
use gaussint::{GaussianState, LossChannelSpec, SymplecticOp};
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

fn params() -> impl Strategy<Value = InterferometerParams> {
    (
        (0.0..20.0f64, 0.0..20.0f64, -PI..PI, -PI..PI),
        (0.0..2.0f64, -PI..PI, -PI..PI),
        (0.01..=1.0f64, 0.01..=1.0f64, 0.0..3.0f64, 0.0..3.0f64),
    )
        .prop_map(|((alpha, beta, theta1, theta2), (r, xi, phi), (t_a, t_b, gamma_a, gamma_b))| {
            InterferometerParams {
                alpha,
                beta,
                theta1,
                theta2,
                r,
                xi,
                t_a,
                t_b,
                gamma_a,
                gamma_b,
                phi,
            }
        })
}

#[derive(Debug, Clone)]
enum Gate {
    Squeeze(f64, f64),
    Split(f64),
    Phase(usize, f64),
}

fn gate() -> impl Strategy<Value = Gate> {
    prop_oneof![
        (0.0..1.5f64, -PI..PI).prop_map(|(r, xi)| Gate::Squeeze(r, xi)),
        (0.0..=1.0f64).prop_map(Gate::Split),
        (0usize..2, -PI..PI).prop_map(|(m, phi)| Gate::Phase(m, phi)),
    ]
}

fn op(g: &Gate) -> SymplecticOp {
    match *g {
        Gate::Squeeze(r, xi) => SymplecticOp::two_mode_squeezer(2, 0, 1, r, xi),
        Gate::Split(t) => SymplecticOp::beamsplitter(2, 0, 1, t),
        Gate::Phase(m, phi) => SymplecticOp::phase_shift(2, m, phi),
    }
    .unwrap()
}

proptest! {
    #[test]
    fn gate_products_stay_symplectic(gates in prop::collection::vec(gate(), 1..6)) {
        let mut total = op(&gates[0]);
        for g in &gates[1..] {
            total = total.compose(&op(g)).unwrap();
        }
        let scale = total.matrix().norm().powi(2).max(1.0);
        prop_assert!(total.symplectic_defect() < 1e-10 * scale);
    }

    #[test]
    fn pipeline_output_is_physical(p in params()) {
        let out = michelson::propagate(&p).unwrap();
        prop_assert!(out.max_asymmetry() < 1e-12 * (1.0 + out.cov().amax()));
        let nu = out.min_symplectic_eigenvalue();
        prop_assert!(nu >= 0.5 - 1e-9 * (1.0 + out.cov().amax()), "nu = {nu}");
    }

    #[test]
    fn loss_paths_agree(p in params(), mode in 0usize..2, t in 0.0..=1.0f64, g in 0.0..5.0f64) {
        let input = michelson::prepare_input(&p).unwrap();
        let spec = LossChannelSpec::new(mode, t, g).unwrap();
        let direct = input.apply_loss_thermal(&spec).unwrap();
        let ancilla = input.apply_loss_thermal_ancilla(&spec).unwrap();
        let scale = 1.0 + input.cov().amax();
        prop_assert!((direct.cov() - ancilla.cov()).amax() < 1e-12 * scale);
        prop_assert!((direct.mean() - ancilla.mean()).amax() < 1e-12 * scale.sqrt());
    }

    #[test]
    fn engine_photon_number_is_closed_form(p in params()) {
        let engine = michelson::prepare_input(&p).unwrap().total_mean_photon_number();
        let cf = closed_form::mean_photon(&p);
        prop_assert!((engine - cf).abs() <= 1e-10 * (1.0 + cf), "{engine} vs {cf}");
    }

    #[test]
    fn j3_variance_is_nonnegative(p in params()) {
        prop_assert!(michelson::j3_moments(&p).unwrap().variance >= 0.0);
    }

    #[test]
    fn closed_form_gain_rises_with_transmissivity(
        t1 in 0.01..1.0f64, dt in 0.0..0.5f64, r in 0.0..4.0f64,
        xi in -1.5..1.5f64, g in 0.0..3.0f64,
    ) {
        let t2 = (t1 + dt).min(1.0);
        for mode in [ArmMode::OneArm, ArmMode::Symmetric] {
            let g1 = optimizer::closed_form_gain(mode, t1, g, r, xi).unwrap();
            let g2 = optimizer::closed_form_gain(mode, t2, g, r, xi).unwrap();
            prop_assert!(g2 >= g1 * (1.0 - 1e-12), "{mode}: G({t1}) = {g1} > G({t2}) = {g2}");
        }
    }

    #[test]
    fn closed_form_gain_falls_with_noise(
        t in 0.01..1.0f64, r in 0.0..4.0f64, xi in -1.5..1.5f64, g1 in 0.0..3.0f64, dg in 0.0..2.0f64,
    ) {
        for mode in [ArmMode::OneArm, ArmMode::Symmetric] {
            let a = optimizer::closed_form_gain(mode, t, g1, r, xi).unwrap();
            let b = optimizer::closed_form_gain(mode, t, g1 + dg, r, xi).unwrap();
            prop_assert!(b <= a * (1.0 + 1e-12));
        }
    }

    #[test]
    fn thresholds_rise_with_noise(g1 in 0.0..5.0f64, dg in 0.0..5.0f64, xi in -1.5..1.5f64) {
        let g2 = g1 + dg;
        for mode in [ArmMode::OneArm, ArmMode::Symmetric] {
            for policy in [XiPolicy::Optimized, XiPolicy::Fixed(xi)] {
                let a = optimizer::boundary_analytic(mode, g1, policy).unwrap();
                let b = optimizer::boundary_analytic(mode, g2, policy).unwrap();
                prop_assert!(b >= a - 1e-12, "{mode} {policy}: {a} then {b}");
                prop_assert!((0.0..1.0).contains(&a));
            }
        }
    }

    #[test]
    fn optimised_threshold_never_exceeds_fixed(g in 0.0..5.0f64, xi in -1.5..1.5f64) {
        for mode in [ArmMode::OneArm, ArmMode::Symmetric] {
            let opt = optimizer::boundary_analytic(mode, g, XiPolicy::Optimized).unwrap();
            for x in [0.0, xi] {
                let fixed = optimizer::boundary_analytic(mode, g, XiPolicy::Fixed(x)).unwrap();
                prop_assert!(opt <= fixed + 1e-12, "{mode}: opt {opt} > xi={x} {fixed}");
            }
        }
    }

    #[test]
    fn optimised_xi_dominates_xi_zero(t in 0.05..1.0f64, g in 0.0..2.0f64, r in 0.5..4.0f64) {
        let p = InterferometerParams::theta_pi(100.0, 100.0, r, 0.0).with_loss(t, 1.0, g, 0.0);
        let (_, best) = optimizer::optimize_xi(&p, (-FRAC_PI_2 + 1e-3, FRAC_PI_2 - 1e-3)).unwrap();
        let at_zero = closed_form::gain_leading(&p).unwrap();
        prop_assert!(best >= at_zero * (1.0 - 1e-12));
    }
}

#[test]
fn vacuum_is_minimal() {
    let v = GaussianState::vacuum(2).unwrap();
    for nu in v.symplectic_eigenvalues() {
        assert!((nu - 0.5).abs() < 1e-15);
    }
}
