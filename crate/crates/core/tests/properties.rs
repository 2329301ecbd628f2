use alcove::alcove_markov::{build_kernel, enumerate_alcove, invariant_measure};
use alcove::charlib::{tensor_decompose, weight_multiplicities};
use alcove::fusion::{dual_weight, fold_affine, FusionEngine, FusionTable};
use alcove::rational::{format_rational, parse_rational, Rational};
use alcove::scaling::simulate_trajectory;
use alcove::{Family, RootSystem, Weight};
use proptest::prelude::*;

fn systems() -> impl Strategy<Value = (Family, usize)> {
    prop_oneof![
        (1usize..=3).prop_map(|r| (Family::A, r)),
        (2usize..=3).prop_map(|r| (Family::B, r)),
        (2usize..=3).prop_map(|r| (Family::C, r)),
        (3usize..=4).prop_map(|r| (Family::D, r)),
    ]
}

/// A root system with a dominant weight of small θ-pairing.
fn dominant(max_level: i64) -> impl Strategy<Value = (RootSystem, Weight)> {
    systems().prop_flat_map(move |(f, r)| {
        proptest::collection::vec(0..=max_level, r).prop_map(move |c| {
            let rs = RootSystem::new(f, r).unwrap();
            let mut w = Weight::new(c);
            // trim coordinates until the pairing is small enough
            let mut i = 0;
            while rs.theta_pairing(&w) > max_level {
                let mut c = w.into_coords();
                c[i % r] = (c[i % r] - 1).max(0);
                w = Weight::new(c);
                i += 1;
            }
            (rs, w)
        })
    })
}

/// Dot action s_i · x = s_i(x + ρ) − ρ.
fn dot_reflect(rs: &RootSystem, x: &Weight, i: usize) -> Weight {
    let mut y = x + rs.rho();
    rs.reflect(&mut y, i);
    &y - rs.rho()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fold_finite_is_idempotent_and_sign_flips((rs, seed) in dominant(3), coords in proptest::collection::vec(-6i64..6, 4), i in 0usize..4) {
        let x = Weight::new(coords[..rs.rank()].iter().zip(seed.coords()).map(|(a, b)| a + b).collect());
        let (y, s) = rs.fold_finite(&x);
        if s != 0 {
            prop_assert!(y.is_dominant());
            prop_assert_eq!(rs.fold_finite(&y), (y.clone(), 1));
        }
        let i = i % rs.rank();
        let (_, s2) = rs.fold_finite(&dot_reflect(&rs, &x, i));
        prop_assert_eq!(s2, -s);
    }

    #[test]
    fn multiplicities_are_weyl_invariant((rs, lambda) in dominant(2)) {
        let k = weight_multiplicities(&rs, &lambda).unwrap();
        prop_assert_eq!(k.total(), rs.dim(&lambda).unwrap());
        for mu in k.support() {
            for i in 0..rs.rank() {
                let mut s = mu.clone();
                rs.reflect(&mut s, i);
                prop_assert_eq!(k.get(&mu), k.get(&s));
            }
        }
    }

    #[test]
    fn tensor_products_commute_and_count((rs, a) in dominant(2), seed in any::<u64>()) {
        let alcove = enumerate_alcove(&rs, 2).unwrap();
        let b = &alcove.weights()[seed as usize % alcove.len()];
        let ab = tensor_decompose(&rs, &a, b).unwrap();
        let ba = tensor_decompose(&rs, b, &a).unwrap();
        prop_assert_eq!(&ab.entries, &ba.entries);
        let total: u128 = alcove_dims(&rs, &ab);
        prop_assert_eq!(total, rs.dim(&a).unwrap() * rs.dim(b).unwrap());
    }

    #[test]
    fn fusion_symmetry_duality_and_stabilization((rs, a) in dominant(2), seed in any::<u64>(), extra in 0i64..2) {
        let alcove = enumerate_alcove(&rs, 2).unwrap();
        let g = alcove.weights()[seed as usize % alcove.len()].clone();
        let k = 2;
        let engine = FusionEngine::new(&rs, k).unwrap();
        let ag = engine.coeffs(&a, &g).unwrap();
        prop_assert_eq!(&ag, &engine.coeffs(&g, &a).unwrap());
        let tg = dual_weight(&rs, &g).unwrap();
        for beta in alcove.weights() {
            let back = engine.coeffs(beta, &tg).unwrap();
            prop_assert_eq!(ag.get(beta).copied().unwrap_or(0), back.get(&a).copied().unwrap_or(0));
        }
        // large level: no affine wall is reached
        let big = rs.theta_pairing(&(&a + &g)) + extra;
        let stable = FusionEngine::new(&rs, big).unwrap().coeffs(&a, &g).unwrap();
        let classical = tensor_decompose(&rs, &a, &g).unwrap();
        for (beta, c) in &stable {
            prop_assert_eq!(*c, classical.get(beta));
        }
        let m_total: u64 = classical.entries.values().sum();
        prop_assert_eq!(stable.values().sum::<u64>(), m_total);
    }

    #[test]
    fn affine_fold_lands_in_alcove((rs, seed) in dominant(2), coords in proptest::collection::vec(-8i64..8, 4), k in 0i64..4) {
        let x = Weight::new(coords[..rs.rank()].iter().zip(seed.coords()).map(|(a, b)| a + b).collect());
        let r = fold_affine(&rs, &x, k).unwrap();
        if r.sign != 0 {
            prop_assert!(r.folded.is_dominant() && rs.theta_pairing(&r.folded) <= k);
            prop_assert_eq!(r.sign, if r.reflection_count % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn kernels_are_stochastic_and_preserve_the_measure((rs, g) in dominant(2)) {
        let k = 2;
        let kernel = build_kernel(&rs, &g, k).unwrap();
        for row in kernel.matrix() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let pi = invariant_measure(&rs, k).unwrap();
        prop_assert!((pi.values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(kernel.invariance_residual(&pi) < 1e-12);
        prop_assert!(kernel.spectral_residual().unwrap() < 1e-9);
        if dual_weight(&rs, &g).unwrap() == g {
            prop_assert!(kernel.detailed_balance_residual(&pi) < 1e-10);
        }
    }

    #[test]
    fn trajectories_follow_fusion_edges(seed in any::<u64>(), gamma in 1i64..3) {
        let rs = RootSystem::new(Family::A, 1).unwrap();
        let t = simulate_trajectory(&rs, &Weight::new(vec![gamma]), 100, 1.0, seed).unwrap();
        let engine = FusionEngine::new(&rs, t.level).unwrap();
        prop_assert!(t.samples[0].is_zero());
        for pair in t.samples.windows(2) {
            let c = engine.coeffs(&pair[0], &Weight::new(vec![gamma])).unwrap();
            prop_assert!(c.get(&pair[1]).copied().unwrap_or(0) > 0);
            prop_assert!((pair[1][0] - pair[0][0]).abs() <= gamma);
        }
    }

    #[test]
    fn weight_text_round_trips(coords in proptest::collection::vec(-1000i64..1000, 1..6)) {
        let w = Weight::new(coords);
        prop_assert_eq!(w.to_string().parse::<Weight>().unwrap(), w);
    }

    #[test]
    fn rational_text_round_trips(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = Rational::new(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn fusion_tables_round_trip_through_json(k in 1i64..4, g in 0i64..4, n in 0u32..6) {
        let rs = RootSystem::new(Family::A, 1).unwrap();
        let engine = FusionEngine::new(&rs, k).unwrap();
        let g = Weight::new(vec![g.min(k)]);
        let table = engine.table(&g, n).unwrap();
        prop_assert_eq!(FusionTable::from_json(&table.to_json().unwrap()).unwrap(), table);
    }
}

fn alcove_dims(rs: &RootSystem, d: &alcove::charlib::Decomposition) -> u128 {
    d.entries.iter().map(|(b, m)| rs.dim(b).unwrap() * *m as u128).sum()
}
