//! Boundary functionals of a free boundary solution.
//!
//! At a boundary point, in a frame with the radial direction first and the
//! interior normal last, the Hessian is diagonal with entries
//! `(0, κ_2, …, κ_{n−1}, −H)` where the `κ` are the principal curvatures of
//! the boundary and `H = Σ κ`. The functionals below are the normalized
//! normal derivative of `log w` for the Frobenius weight (`L`) and for the
//! signed weight (`B`), both degree-zero in the spectrum.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::exact_serde;
use super::upoly::int;
use super::weight::{Spectrum, WeightSpec};
use crate::error::{Error, Result};

/// Sign configuration of the tangential curvatures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCase {
    /// Exactly one positive tangential eigenvalue, the rest non-positive.
    SinglePositive,
    /// Every tangential eigenvalue positive.
    AllPositive,
    /// At least two positive and at least one non-positive.
    Mixed,
}

/// Result of evaluating the boundary functionals at one boundary point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryFunctionalResult {
    /// Mean curvature `H > 0`.
    pub h: f64,
    /// Weight on negative eigenvalues used for `b`.
    pub a: f64,
    /// `2 + Σ λ³ / (H |λ|²)`.
    pub l: f64,
    /// `−w_ν / (H w)` for the signed weight with parameter `a`.
    pub b: f64,
    pub case: BoundaryCase,
    /// `n = 4` with `λ_2 > 0` and `λ_3 = λ_4 < 0`, the only configuration
    /// attaining `B = 3` when `a = 4`.
    pub equality_case: bool,
    #[serde(with = "exact_serde")]
    pub l_exact: Option<BigRational>,
    #[serde(with = "exact_serde")]
    pub b_exact: Option<BigRational>,
}

/// Tangential part of a validated boundary spectrum.
struct Split {
    tangential: Vec<f64>,
}

fn split_boundary(lambda: &Spectrum, h: f64) -> Result<Split> {
    if !(h > 0.0) {
        return Err(Error::DegenerateBoundary(format!(
            "mean curvature must be positive, got H = {h}"
        )));
    }
    let mut vals = lambda.expanded();
    if vals.len() < 3 {
        return Err(Error::Usage("boundary spectrum needs n >= 3 entries".into()));
    }
    let tol = 1e-9 * lambda.radius().max(h);
    let take = |vals: &mut Vec<f64>, target: f64, what: &str| -> Result<()> {
        let (idx, dist) = vals
            .iter()
            .enumerate()
            .map(|(i, v)| (i, (v - target).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if dist > tol {
            return Err(Error::Usage(format!("boundary spectrum lacks the {what} entry {target}")));
        }
        vals.remove(idx);
        Ok(())
    };
    take(&mut vals, -h, "normal")?;
    take(&mut vals, 0.0, "radial")?;
    let sum: f64 = vals.iter().sum();
    if (sum - h).abs() > tol * vals.len() as f64 {
        return Err(Error::Usage(format!(
            "tangential eigenvalues sum to {sum}, expected H = {h}"
        )));
    }
    Ok(Split { tangential: vals })
}

fn classify(tangential: &[f64]) -> BoundaryCase {
    let positive = tangential.iter().filter(|&&v| v > 0.0).count();
    if positive == tangential.len() {
        BoundaryCase::AllPositive
    } else if positive == 1 {
        BoundaryCase::SinglePositive
    } else {
        BoundaryCase::Mixed
    }
}

fn detect_equality(tangential: &[f64], h: f64) -> bool {
    if tangential.len() != 2 {
        return false;
    }
    let (hi, lo) = if tangential[0] >= tangential[1] {
        (tangential[0], tangential[1])
    } else {
        (tangential[1], tangential[0])
    };
    hi > 0.0 && lo < 0.0 && (lo + h).abs() <= 1e-9 * h
}

/// `L = 2 + Σ_k λ_k³ / (H Σ_k λ_k²)` at a boundary point.
pub fn boundary_l(lambda: &Spectrum, h: f64) -> Result<f64> {
    split_boundary(lambda, h)?;
    let v = lambda.expanded();
    let cubes: f64 = v.iter().map(|x| x * x * x).sum();
    let squares: f64 = v.iter().map(|x| x * x).sum();
    Ok(2.0 + cubes / (h * squares))
}

/// `B = 1 + (Σ_{λ>0} λ³ + a Σ_{λ<0} λ³ + a H Σ λ²) / (H w²)` with
/// `w² = Σ_{λ>0} λ² + a Σ_{λ<0} λ²`, plus the case classification.
pub fn boundary_b(lambda: &Spectrum, h: f64, a: f64) -> Result<BoundaryFunctionalResult> {
    if !(a > 0.0) {
        return Err(Error::Usage(format!("signed weight needs a > 0, got {a}")));
    }
    let split = split_boundary(lambda, h)?;
    let v = lambda.expanded();
    let (mut pos3, mut neg3, mut w2, mut all2) = (0.0, 0.0, 0.0, 0.0);
    for &x in &v {
        all2 += x * x;
        if x > 0.0 {
            pos3 += x * x * x;
            w2 += x * x;
        } else if x < 0.0 {
            neg3 += x * x * x;
            w2 += a * x * x;
        }
    }
    let b = 1.0 + (pos3 + a * neg3 + a * h * all2) / (h * w2);
    Ok(BoundaryFunctionalResult {
        h,
        a,
        l: boundary_l(lambda, h)?,
        b,
        case: classify(&split.tangential),
        equality_case: detect_equality(&split.tangential, h),
        l_exact: None,
        b_exact: None,
    })
}

/// `−w_ν / (H w)` for an arbitrary weight, from the first-order calculus
/// `w_ν = Σ_i f_{λ_i} u_{iiν}` and the boundary relations
/// `u_{iiν} = −H λ_i − λ_i²` (tangential and radial) and
/// `u_{ννν} = Σ λ_k²`.
pub fn boundary_functional(spec: &WeightSpec, lambda: &Spectrum, h: f64) -> Result<f64> {
    split_boundary(lambda, h)?;
    let v = lambda.expanded();
    // the normal entry is the one closest to −H
    let normal = v
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 + h).abs().total_cmp(&(b.1 + h).abs()))
        .map(|(i, _)| i)
        .unwrap();
    let f = spec.eval(&v);
    let g = spec.gradient(&v);
    let all2: f64 = v.iter().map(|x| x * x).sum();
    let mut w_nu = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let third = if i == normal { all2 } else { -h * x - x * x };
        w_nu += g[i] * third;
    }
    Ok(-w_nu / (h * f))
}

fn split_exact(lambda: &[BigRational], h: &BigRational) -> Result<Vec<BigRational>> {
    if !h.is_positive() {
        return Err(Error::DegenerateBoundary(format!("mean curvature must be positive, got H = {h}")));
    }
    let mut vals = lambda.to_vec();
    for target in [-h.clone(), BigRational::zero()] {
        let idx = vals
            .iter()
            .position(|v| *v == target)
            .ok_or_else(|| Error::Usage(format!("boundary spectrum lacks the entry {target}")))?;
        vals.remove(idx);
    }
    let sum = vals.iter().fold(BigRational::zero(), |s, v| s + v);
    if sum != *h {
        return Err(Error::Usage(format!("tangential entries sum to {sum}, expected H = {h}")));
    }
    Ok(vals)
}

/// Exact `L` for a rational boundary spectrum.
pub fn boundary_l_exact(lambda: &[BigRational], h: &BigRational) -> Result<BigRational> {
    split_exact(lambda, h)?;
    let cubes = lambda.iter().fold(BigRational::zero(), |s, x| s + x * x * x);
    let squares = lambda.iter().fold(BigRational::zero(), |s, x| s + x * x);
    Ok(int(2) + cubes / (h * squares))
}

/// Exact `B` for a rational boundary spectrum and rational `a`.
pub fn boundary_b_exact(lambda: &[BigRational], h: &BigRational, a: &BigRational) -> Result<BigRational> {
    if !a.is_positive() {
        return Err(Error::Usage(format!("signed weight needs a > 0, got {a}")));
    }
    split_exact(lambda, h)?;
    let zero = BigRational::zero();
    let (mut pos3, mut neg3, mut w2, mut all2) = (zero.clone(), zero.clone(), zero.clone(), zero);
    for x in lambda {
        let x2 = x * x;
        all2 += &x2;
        if x.is_positive() {
            pos3 += &x2 * x;
            w2 += x2;
        } else if x.is_negative() {
            neg3 += &x2 * x;
            w2 += a * x2;
        }
    }
    Ok(BigRational::one() + (pos3 + a * neg3 + a * h * all2) / (h * w2))
}

/// Float and exact functionals together for a spectrum given exactly.
pub fn boundary_b_rational(lambda: &[BigRational], h: &BigRational, a: &BigRational) -> Result<BoundaryFunctionalResult> {
    let to_f = |r: &BigRational| num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN);
    let spectrum = Spectrum::from_values(&lambda.iter().map(to_f).collect::<Vec<_>>());
    let mut res = boundary_b(&spectrum, to_f(h), to_f(a))?;
    let l = boundary_l_exact(lambda, h)?;
    let b = boundary_b_exact(lambda, h, a)?;
    res.l = to_f(&l);
    res.b = to_f(&b);
    res.l_exact = Some(l);
    res.b_exact = Some(b);
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::super::upoly::rat;
    use super::*;

    fn r(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn n3_l_is_two() {
        for kappa in [0.3, 1.0, 7.25] {
            let l = boundary_l(&Spectrum::from_values(&[0.0, kappa, -kappa]), kappa).unwrap();
            assert_eq!(l, 2.0);
        }
        assert_eq!(boundary_l_exact(&r(&[0, 1, -1]), &int(1)).unwrap(), int(2));
    }

    #[test]
    fn axisymmetric_l_closed_form() {
        for n in 3..=8usize {
            for theta in [0.2f64, 0.7, 1.3] {
                let t = theta.tan();
                let m = (n - 2) as f64;
                let s = Spectrum::new([(0.0, 1), (t, n - 2), (-m * t, 1)]);
                let l = boundary_l(&s, m * t).unwrap();
                assert!((l - (n as f64 - 1.0) / m).abs() < 1e-13, "n={n}: {l}");
            }
        }
    }

    #[test]
    fn n4_surd_example_is_three() {
        let s2 = 2f64.sqrt();
        let l = boundary_l(&Spectrum::from_values(&[0.0, s2, -1.0 / s2, -1.0 / s2]), 1.0 / s2).unwrap();
        assert!((l - 3.0).abs() < 1e-14);
        // degree zero: dividing by the common surd leaves a rational spectrum
        assert_eq!(boundary_l_exact(&r(&[0, 2, -1, -1]), &int(1)).unwrap(), int(3));
    }

    #[test]
    fn b_with_unit_weight_is_l() {
        let lam = vec![int(0), rat(3, 2), rat(-1, 3), rat(-7, 6)];
        let h = rat(7, 6);
        assert_eq!(boundary_b_exact(&lam, &h, &int(1)).unwrap(), boundary_l_exact(&lam, &h).unwrap());
    }

    #[test]
    fn case_one_at_mu_one_is_equality() {
        let res = boundary_b_rational(&r(&[0, 2, -1, -1]), &int(1), &int(4)).unwrap();
        assert_eq!(res.b_exact, Some(int(3)));
        assert!(res.equality_case);
        assert_eq!(res.case, BoundaryCase::SinglePositive);
    }

    #[test]
    fn case_two_at_half() {
        let lam = vec![int(0), rat(1, 2), rat(1, 2), int(-1)];
        let res = boundary_b_rational(&lam, &int(1), &int(4)).unwrap();
        assert_eq!(res.b_exact, Some(rat(3, 2)));
        assert_eq!(res.case, BoundaryCase::AllPositive);
        assert!(!res.equality_case);
    }

    #[test]
    fn generic_route_matches_closed_forms() {
        let s = Spectrum::from_values(&[0.0, 1.7, 0.4, -0.3, -1.8]);
        let h = 1.8;
        let bd = boundary_b(&s, h, 4.0).unwrap();
        let via_frob = boundary_functional(&WeightSpec::Frobenius, &s, h).unwrap();
        let via_signed = boundary_functional(&WeightSpec::Signed { a: 4.0 }, &s, h).unwrap();
        assert!((via_frob - bd.l).abs() < 1e-13);
        assert!((via_signed - bd.b).abs() < 1e-13);
        // max weight: w = λ_top, w_ν = −Hλ − λ², so B = 1 + λ_top / H
        let via_max = boundary_functional(&WeightSpec::MaxEigenvalue, &s, h).unwrap();
        assert!((via_max - (1.0 + 1.7 / h)).abs() < 1e-14);
    }

    #[test]
    fn nonpositive_mean_curvature_is_degenerate() {
        let s = Spectrum::from_values(&[0.0, 1.0, -1.0]);
        assert!(matches!(boundary_l(&s, 0.0), Err(Error::DegenerateBoundary(_))));
        assert!(matches!(boundary_b(&s, -1.0, 4.0), Err(Error::DegenerateBoundary(_))));
        assert!(matches!(boundary_l_exact(&r(&[0, 0, 0]), &int(0)), Err(Error::DegenerateBoundary(_))));
    }

    #[test]
    fn malformed_boundary_spectrum_is_rejected() {
        // no radial zero
        assert!(boundary_l(&Spectrum::from_values(&[0.5, 0.5, -1.0]), 1.0).is_err());
        // tangential sum mismatch
        assert!(boundary_l(&Spectrum::from_values(&[0.0, 2.0, -1.0]), 1.0).is_err());
    }
}
