use conestab::cone::solve_cross_section;
use conestab::spectral::WeightSpec;
use conestab::stability::{
    classify, instability_certificate, positive_solution, rayleigh_lambda, stability_verdict, threshold, Method,
    Verdict, DEFAULT_TOL,
};
use conestab::Error;

/// `Λ` by shooting at step 2^-15, cross-checked against the lumped finite
/// element discretization (agreement better than 1e-6).
const GOLDEN_LAMBDA: [(usize, usize, f64); 21] = [
    (2, 1, 1.673131667633804),
    (2, 2, 2.605029933630512),
    (3, 1, 2.687007666771130),
    (2, 3, 3.576391094474573),
    (3, 2, 3.624365633584389),
    (4, 1, 3.692958664715164),
    (2, 4, 4.560893371286326),
    (3, 3, 4.596818473528501),
    (4, 2, 4.633616404371324),
    (5, 1, 4.696280185631892),
    (2, 5, 5.551251329311000),
    (3, 4, 5.581265624856954),
    (4, 3, 5.607194457432243),
    (5, 2, 5.639106633141964),
    (6, 1, 5.698402217787617),
    (2, 6, 6.544696303676375),
    (3, 5, 6.571263568353430),
    (4, 4, 6.591979403001034),
    (5, 3, 6.613599980201315),
    (6, 2, 6.642756205048983),
    (7, 1, 6.699875841601312),
];

#[test]
fn golden_eigenvalues() {
    for (k, h, lambda) in GOLDEN_LAMBDA {
        let c = solve_cross_section(k, h, 1e-12).unwrap();
        let s = rayleigh_lambda(&c, Method::Shooting, 512).unwrap();
        assert!((s.lambda - lambda).abs() < 1e-8, "({k},{h}): {}", s.lambda);
    }
}

#[test]
fn finite_differences_agree_with_shooting() {
    for (k, h, lambda) in [GOLDEN_LAMBDA[1], GOLDEN_LAMBDA[11], GOLDEN_LAMBDA[20]] {
        let c = solve_cross_section(k, h, 1e-12).unwrap();
        let fd = rayleigh_lambda(&c, Method::FiniteDifference, 4096).unwrap();
        assert!((fd.lambda - lambda).abs() < 1e-6, "({k},{h}): {}", fd.lambda);
        assert!(fd.convergence_estimate < 1e-6);
    }
}

#[test]
fn verdicts_split_at_dimension_seven() {
    for (k, h, lambda) in GOLDEN_LAMBDA {
        let n = k + h;
        let expected = if n <= 6 { Verdict::Unstable } else { Verdict::Stable };
        assert_eq!(classify(lambda, n, DEFAULT_TOL), expected, "({k},{h})");
    }
}

#[test]
fn n3_window_and_criterion() {
    let c = solve_cross_section(2, 1, 1e-12).unwrap();
    let r = stability_verdict(&c, DEFAULT_TOL).unwrap();
    assert_eq!(r.verdict, Verdict::Unstable);
    assert!(r.criterion37_fired);
    let w = r.window(&WeightSpec::Frobenius).unwrap();
    assert_eq!(w.alpha_min.exact.as_ref().unwrap().to_string(), "1/8");
    assert_eq!(w.alpha_max.exact.as_ref().unwrap().to_string(), "1/2");
}

#[test]
fn axisymmetric_n6_window_is_a_point() {
    let c = solve_cross_section(5, 1, 1e-12).unwrap();
    let r = stability_verdict(&c, DEFAULT_TOL).unwrap();
    let w = r.window(&WeightSpec::Frobenius).unwrap();
    assert_eq!(w.alpha_min.exact, w.alpha_max.exact);
    assert_eq!(w.alpha_max.exact.as_ref().unwrap().to_string(), "4/5");
    assert!(w.nonempty && w.strict);
    assert!(!r.criterion37_fired);
    assert_eq!(r.verdict, Verdict::Unstable);
}

#[test]
fn k3_h2_window_is_a_point() {
    let c = solve_cross_section(3, 2, 1e-13).unwrap();
    let r = stability_verdict(&c, DEFAULT_TOL).unwrap();
    let w = r.window(&WeightSpec::Frobenius).unwrap();
    assert_eq!(w.alpha_max.exact.as_ref().unwrap().to_string(), "9/16");
    assert!(w.strict);
    assert_eq!(r.verdict, Verdict::Unstable);
}

#[test]
fn certificate_and_positive_solution_exclude_each_other() {
    for (k, h) in [(2, 2), (6, 1), (3, 4)] {
        let c = solve_cross_section(k, h, 1e-12).unwrap();
        let cert = instability_certificate(&c, 32);
        let pos = positive_solution(&c);
        assert!(cert.is_ok() != pos.is_ok(), "({k},{h})");
        match cert {
            Ok(cert) => {
                assert!(cert.q_value < 0.0);
                assert!(cert.lambda > threshold(k + h));
            }
            Err(e) => assert!(matches!(e, Error::StableCone { .. })),
        }
    }
}

#[test]
fn positive_solution_on_a_stable_cone() {
    let c = solve_cross_section(4, 4, 1e-12).unwrap();
    let p = positive_solution(&c).unwrap();
    assert!(p.min_psi > 0.0);
    let g = p.decay_exponent;
    assert!((g * (g + 6.0) + p.lambda).abs() < 1e-9);
    assert!(p.residual < 1e-6);
}
