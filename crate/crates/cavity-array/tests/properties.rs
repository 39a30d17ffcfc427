//! Property tests: structural guarantees that must hold across the whole
//! parameter space, not just at hand-picked points.

use proptest::prelude::*;
use std::f64::consts::PI;

use num_complex::Complex64;

use cavity_array::dynamics::{initial_all_in_site, integrate, AtomState, DynOptions};
use cavity_array::model::{dispersion_omega_k, ModelParams, SignConvention};
use cavity_array::scatter::{
    residual_eq9, transmission_linear, transmission_roots, DispersionMode, ScatterOptions,
};
use cavity_array::stability::{build_heff, stability_spectrum, stationary_background};

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (
        0.5f64..4.0,   // omega
        0.5f64..2.0,   // xi
        -3.0f64..3.0,  // g
        1.0f64..5.0,   // Omega
        0.0f64..2.0,   // J
    )
        .prop_map(|(omega, xi, g, omega_atom, j)| ModelParams {
            omega,
            xi,
            g,
            omega_atom,
            j_eff: j,
            j0: j,
            ..ModelParams::default()
        })
}

fn interior_k() -> impl Strategy<Value = f64> {
    // Stay away from band edges where no travelling mode exists.
    0.05f64..(PI - 0.05)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_emitted_root_satisfies_the_stationary_equation(
        params in params_strategy(),
        k in interior_k(),
        self_consistent in any::<bool>(),
    ) {
        let opts = ScatterOptions {
            dispersion_mode: if self_consistent {
                DispersionMode::SelfConsistent
            } else {
                DispersionMode::FixedIntensity { i0: 1.0 }
            },
            ..ScatterOptions::default()
        };
        if let Ok(roots) = transmission_roots(&params, k, &opts) {
            for root in &roots {
                prop_assert!(root.valid);
                prop_assert!(root.s2 > 0.0 && root.s2 <= 1.0 + 1e-12);
                let res = residual_eq9(&params, k, root.s, &opts);
                prop_assert!(res[0].abs() <= opts.residual_tol, "residual {res:?}");
                prop_assert!(res[1].abs() <= opts.residual_tol);
                let flux = (root.r.norm_sqr() + root.s.norm_sqr() - 1.0).abs();
                prop_assert!(flux <= 1e-9, "flux violation {flux:.3e}");
                prop_assert!((root.r - (root.s - 1.0)).norm() == 0.0);
            }
            // Branch indices are the sort order by ascending s2.
            for pair in roots.windows(2) {
                prop_assert!(pair[0].s2 <= pair[1].s2 + 1e-15);
                prop_assert!(pair[1].branch == pair[0].branch + 1);
            }
        }
    }

    #[test]
    fn linear_limit_reduces_to_the_closed_form_root(
        params in params_strategy(),
        k in interior_k(),
    ) {
        let params = ModelParams { g: 0.0, ..params };
        let opts = ScatterOptions::default();
        match (transmission_roots(&params, k, &opts), transmission_linear(&params, k, &opts)) {
            (Ok(roots), Ok(reference)) => {
                prop_assert_eq!(roots.len(), 1, "linear problem has one branch");
                prop_assert!((roots[0].s2 - reference.s2).abs() <= 1e-10);
                prop_assert!((roots[0].s - reference.s).norm() <= 1e-10);
            }
            (Err(_), Err(_)) => {} // both refuse (band edge or pole): consistent
            (a, b) => prop_assert!(false, "solver and linear path disagree: {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn sign_conventions_conjugate_each_other_in_the_linear_limit(
        params in params_strategy(),
        k in interior_k(),
    ) {
        let params = ModelParams { g: 0.0, ..params };
        let eq9 = ScatterOptions::default();
        let eq8 = ScatterOptions { sign_convention: SignConvention::Eq8, ..eq9 };
        if let (Ok(r9), Ok(r8)) = (transmission_roots(&params, k, &eq9), transmission_roots(&params, k, &eq8)) {
            prop_assert_eq!(r9.len(), r8.len());
            for (a, b) in r9.iter().zip(&r8) {
                prop_assert!((a.s2 - b.s2).abs() <= 1e-12);
                prop_assert!((a.s - b.s.conj()).norm() <= 1e-12, "flipping the detuning sign must conjugate the amplitude");
            }
        }
    }

    #[test]
    fn dispersion_is_even_in_k(
        params in params_strategy(),
        k in -PI..PI,
        intensity in 0.0f64..2.0,
    ) {
        prop_assert_eq!(
            dispersion_omega_k(&params, k, intensity),
            dispersion_omega_k(&params, -k, intensity)
        );
    }

    #[test]
    fn axis_endpoints_are_exact_and_values_monotone(
        start in -10.0f64..10.0,
        span in 0.1f64..20.0,
        steps in 2usize..200,
    ) {
        use cavity_array::sweep::{Axis, AxisName};
        let axis = Axis::new(AxisName::G, start, start + span, steps).unwrap();
        let values = axis.values();
        prop_assert_eq!(values[0], start);
        prop_assert_eq!(values[steps - 1], start + span);
        for pair in values.windows(2) {
            prop_assert!(pair[1] > pair[0]);
        }
    }

    #[test]
    fn params_round_trip_through_json(params in params_strategy()) {
        let text = serde_json::to_string(&params).unwrap();
        let back: ModelParams = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(params, back);
    }

    #[test]
    fn short_integrations_conserve_the_charges(
        g in -2.0f64..2.0,
        j0 in 0.0f64..3.0,
        omega_atom in 1.0f64..5.0,
    ) {
        let params = ModelParams { g, j0, omega_atom, half_len: 6, ..ModelParams::default() };
        let opts = DynOptions { t_end: 0.5, ..DynOptions::default() };
        let initial = initial_all_in_site(-1, AtomState::Excited, 6).unwrap();
        let traj = integrate(&initial, &params, &opts).unwrap();
        prop_assert!(traj.q_drift <= 1e-6, "Q drift {:.3e}", traj.q_drift);
        prop_assert!(traj.bloch_drift <= 1e-6, "L drift {:.3e}", traj.bloch_drift);
    }
}

proptest! {
    // The stability pipeline is the most expensive property; fewer cases.
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stability_verdict_is_gauge_invariant(
        g in 0.2f64..2.0,
        phase in 0.0f64..(2.0 * PI),
    ) {
        let params = ModelParams { g, j0: 0.0, half_len: 2, ..ModelParams::default() };
        let opts = ScatterOptions::default();
        let k = PI / 2.0;
        let roots = transmission_roots(&params, k, &opts).unwrap();
        prop_assume!(!roots.is_empty());
        let background = stationary_background(&params, k, &roots[0], &opts).unwrap();
        let reference = stability_spectrum(&build_heff(&background, &params).unwrap(), 1e-8).unwrap();

        let mut rotated = background.clone();
        let u = Complex64::from_polar(1.0, phase);
        for a in &mut rotated.alphas {
            *a *= u;
        }
        rotated.sm *= u;
        let turned = stability_spectrum(&build_heff(&rotated, &params).unwrap(), 1e-8).unwrap();
        prop_assert!((reference.max_im - turned.max_im).abs() <= 1e-10);
        prop_assert_eq!(reference.stable, turned.stable);
    }
}
