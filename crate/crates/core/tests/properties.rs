//! Property tests of structural invariants.

use proptest::prelude::*;
use zhs_core::symmetry::apply;
use zhs_core::{
    integrate, kink_rhs, peakon_rhs, Ansatz, Equation, FieldOffset, IntegratorConfig, KinkState,
    PanelQuadrature, PeakonState, QuadratureConfig, StateDerivative, SymmetryKind, SymmetryTransform,
    TestFunction, Train,
};

fn train(max_len: usize) -> impl Strategy<Value = Train> {
    prop::collection::vec((0.1f64..2.0, prop::bool::ANY, -3.0f64..3.0), 1..=max_len).prop_map(|members| {
        let amps = members
            .iter()
            .map(|(a, neg, _)| if *neg { -a } else { *a })
            .collect();
        let pos = members.iter().map(|m| m.2).collect();
        Train::new(amps, pos).unwrap()
    })
}

fn scaled(t: &Train, lambda: f64) -> Train {
    Train::new(
        t.amplitudes().iter().map(|a| a * lambda).collect(),
        t.positions().to_vec(),
    )
    .unwrap()
}

fn negated(t: &Train) -> Train {
    scaled(t, -1.0)
}

fn swapped(d: &StateDerivative) -> StateDerivative {
    StateDerivative {
        u_amplitudes: d.v_amplitudes.clone(),
        u_positions: d.v_positions.clone(),
        v_amplitudes: d.u_amplitudes.clone(),
        v_positions: d.u_positions.clone(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn momentum_pairing_is_linear_in_amplitudes(
        u in train(4), v in train(3), lambda in -3.0f64..3.0, c in -2.0f64..2.0, w in 0.25f64..2.0
    ) {
        prop_assume!(lambda.abs() > 1e-3);
        let quad = PanelQuadrature::new(QuadratureConfig::default()).unwrap();
        let phi = TestFunction::new(c, w).unwrap();
        let off = FieldOffset::default();
        let p = PeakonState::new(2, u.clone(), v.clone()).unwrap();
        let ps = PeakonState::new(2, scaled(&u, lambda), v.clone()).unwrap();
        let a = p.momentum_pairing(off, &phi, Equation::U, &quad).unwrap();
        let b = ps.momentum_pairing(off, &phi, Equation::U, &quad).unwrap();
        prop_assert!((b - lambda * a).abs() <= 1e-12 * (1.0 + a.abs() * lambda.abs()));

        let k = KinkState::new(2, u.clone(), v.clone()).unwrap();
        let ks = KinkState::new(2, scaled(&u, lambda), v).unwrap();
        let a = k.momentum_pairing(off, &phi, Equation::U, &quad).unwrap();
        let b = ks.momentum_pairing(off, &phi, Equation::U, &quad).unwrap();
        prop_assert!((b - lambda * a).abs() <= 1e-12 * (1.0 + a.abs() * lambda.abs()));
    }

    #[test]
    fn kink_fields_are_bounded_by_total_height(t in train(5), x in -20.0f64..20.0) {
        prop_assert!(t.kink_value(x).abs() <= t.total_variation());
    }

    #[test]
    fn swapping_components_swaps_the_flow_exactly(u in train(4), v in train(4), b in 1u32..=4) {
        let p = PeakonState::new(b, u.clone(), v.clone()).unwrap();
        let p_swap = PeakonState::new(b, v.clone(), u.clone()).unwrap();
        prop_assert_eq!(peakon_rhs(&p_swap), swapped(&peakon_rhs(&p)));
        let k = KinkState::new(b, u.clone(), v.clone()).unwrap();
        let k_swap = KinkState::new(b, v, u).unwrap();
        prop_assert_eq!(kink_rhs(&k_swap), swapped(&kink_rhs(&k)));
    }

    #[test]
    fn negating_both_components_keeps_positions_for_even_b(u in train(2), v in train(2)) {
        let s = PeakonState::new(2, u.clone(), v.clone()).unwrap();
        let n = PeakonState::new(2, negated(&u), negated(&v)).unwrap();
        let config = IntegratorConfig::rk4(1e-2, 0.2);
        let (a, bt) = (integrate(&s, &config).unwrap(), integrate(&n, &config).unwrap());
        prop_assert_eq!(a.len(), bt.len());
        for (x, y) in a.samples().iter().zip(bt.samples()) {
            prop_assert_eq!(x.state.u().positions(), y.state.u().positions());
            prop_assert_eq!(x.state.v().positions(), y.state.v().positions());
            prop_assert_eq!(&negated(x.state.u()), y.state.u());
        }
        let image = apply(&SymmetryTransform::discrete(SymmetryKind::NegateUv, 2).unwrap(), &a).unwrap();
        prop_assert_eq!(image.samples(), bt.samples());
    }

    #[test]
    fn negate_tuv_reverses_time_for_odd_b(p in 0.2f64..1.5, pp in 0.2f64..1.5, q in -1.0f64..1.0, gap in 0.5f64..2.0) {
        let s = PeakonState::pair(1, p, q, pp, q + gap).unwrap();
        let t_end = 0.4;
        let forward = integrate(&s, &IntegratorConfig::rk4(1e-3, t_end)).unwrap();
        prop_assume!(forward.events().is_empty());
        let image = apply(&SymmetryTransform::discrete(SymmetryKind::NegateTuv, 1).unwrap(), &forward).unwrap();
        // The image starts at -t_end from the negated final state.
        let start = &image.first().state;
        prop_assert!((image.first().t + t_end).abs() < 1e-12);
        let rerun = integrate(start, &IntegratorConfig::rk4(1e-3, t_end)).unwrap();
        let (end_image, end_rerun) = (&image.last().state, &rerun.last().state);
        for (a, b) in [(end_image.u(), end_rerun.u()), (end_image.v(), end_rerun.v())] {
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()).chain(a.positions().iter().zip(b.positions())) {
                prop_assert!((x - y).abs() <= 1e-10, "{x} vs {y}");
            }
        }
    }
}
