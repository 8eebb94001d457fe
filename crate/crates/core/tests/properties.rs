use conestab::simons::{random_harmonic_poly, MPoly};
use conestab::spectral::{boundary_b, boundary_l, identity_nf, Spectrum, WeightSpec};
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = WeightSpec> {
    prop_oneof![
        Just(WeightSpec::Frobenius),
        (0.25f64..8.0).prop_map(|a| WeightSpec::Signed { a }),
        Just(WeightSpec::MaxEigenvalue),
    ]
}

fn trace_free(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, n - 1).prop_map(|mut v| {
        let s: f64 = v.iter().sum();
        v.push(-s);
        v
    })
}

proptest! {
    #[test]
    fn weight_is_one_homogeneous(spec in spec_strategy(), v in prop::collection::vec(-5.0f64..5.0, 2..8), t in 0.0f64..10.0) {
        let scaled: Vec<f64> = v.iter().map(|x| t * x).collect();
        let (a, b) = (spec.eval(&scaled), t * spec.eval(&v));
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
    }

    #[test]
    fn weight_is_symmetric(spec in spec_strategy(), v in prop::collection::vec(-5.0f64..5.0, 2..8), rot in 0usize..8) {
        let mut w = v.clone();
        w.rotate_left(rot % v.len());
        w.reverse();
        prop_assert!((spec.eval(&v) - spec.eval(&w)).abs() <= 1e-12 * spec.eval(&v).abs().max(1.0));
    }

    #[test]
    fn weight_is_convex(spec in spec_strategy(), (x, y) in (2usize..7).prop_flat_map(|n| (prop::collection::vec(-5.0f64..5.0, n), prop::collection::vec(-5.0f64..5.0, n))), s in 0.0f64..1.0) {
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| s * a + (1.0 - s) * b).collect();
        let rhs = s * spec.eval(&x) + (1.0 - s) * spec.eval(&y);
        prop_assert!(spec.eval(&mid) <= rhs + 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn pairing_identity(spec in spec_strategy(), v in (2usize..8).prop_flat_map(trace_free)) {
        if let Ok(p) = identity_nf(&spec, &v) {
            let n = v.len() as f64;
            prop_assert!(p.residual <= 1e-10 * n * p.f.max(1.0));
            prop_assert!(p.min_pairing >= -1e-12 * p.f.max(1.0));
            for s in &p.per_k {
                prop_assert!(*s <= n * p.f * (1.0 + 1e-12) + 1e-12);
            }
        }
    }

    #[test]
    fn b_with_unit_weight_is_l(kappa in prop::collection::vec(-3.0f64..3.0, 1..6), top in 0.5f64..4.0) {
        // boundary spectrum (0, κ…, −H) with H = Σκ > 0
        let mut k = kappa.clone();
        let s: f64 = k.iter().sum();
        k.push(top - s.min(0.0));
        let mean: f64 = k.iter().sum();
        prop_assume!(mean > 1e-3);
        let mut vals = vec![0.0, -mean];
        vals.extend(&k);
        let spec = Spectrum::from_values(&vals);
        let l = boundary_l(&spec, mean).unwrap();
        let b = boundary_b(&spec, mean, 1.0).unwrap();
        prop_assert!((b.b - l).abs() <= 1e-10 * l.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_polynomials_are_harmonic(n in 2usize..6, d in 2u32..6, seed in any::<u64>()) {
        let p = random_harmonic_poly(n, d, seed).unwrap();
        prop_assert!(p.poly().laplacian().is_zero());
        prop_assert_eq!(p.d, d);
    }

    #[test]
    fn laplacian_is_linear(seed_a in any::<u64>(), seed_b in any::<u64>()) {
        let a = random_harmonic_poly(3, 4, seed_a).unwrap().poly().clone();
        let b = random_harmonic_poly(3, 4, seed_b).unwrap().poly().clone();
        let x = MPoly::var(3, 0);
        let q = &a * &x + b;
        prop_assert_eq!(q.laplacian(), (&a * &x).laplacian());
    }
}
