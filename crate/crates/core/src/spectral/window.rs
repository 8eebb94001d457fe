//! Exponent window for the subsolution `v̄ = w^α`.
//!
//! The interior inequality for `w^α` holds with constant `γ = α(α+1)` for
//! every `α ≥ 1 − 2/(n−1)`, and the degree bookkeeping for a function
//! homogeneous of degree `−α` turns that into an instability criterion once
//! `α(n−1) ≥ (n−2)²/4`. The boundary inequality needs `α ≤ 1/B`.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::boundary::BoundaryFunctionalResult;
use super::exact_serde;

/// A window endpoint: always a float, exact when the inputs allow it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Endpoint {
    pub value: f64,
    #[serde(with = "exact_serde")]
    pub exact: Option<BigRational>,
}

impl Endpoint {
    pub fn exact(r: BigRational) -> Self {
        Endpoint {
            value: r.to_f64().unwrap_or(f64::NAN),
            exact: Some(r),
        }
    }

    pub fn approx(v: f64) -> Self {
        Endpoint { value: v, exact: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsolutionWindow {
    pub n: usize,
    pub a: f64,
    /// `(n−2)² / (4(n−1))`.
    pub alpha_min: Endpoint,
    /// `1 / B`.
    pub alpha_max: Endpoint,
    /// `1 − 2/(n−1)`, the floor of the interior inequality.
    pub interior_floor: f64,
    pub nonempty: bool,
    /// Whether the window certifies instability with a strict subsolution.
    pub strict: bool,
    /// The exponent chosen from the window (`alpha_max`).
    pub alpha: f64,
    /// `α(α+1)` for the chosen exponent.
    pub gamma: f64,
}

/// Relative tolerance used to compare window endpoints held only as floats.
pub const FLOAT_ENDPOINT_TOL: f64 = 1e-12;

pub fn alpha_min_exact(n: usize) -> BigRational {
    let n = n as i64;
    BigRational::new(((n - 2) * (n - 2)).into(), (4 * (n - 1)).into())
}

/// `γ ≥ (n/2 − 1 − μ)²` for degree `−μ`.
pub fn degree_condition_holds(n: usize, mu: f64, gamma: f64) -> bool {
    let rhs = (n as f64 / 2.0 - 1.0 - mu).powi(2);
    gamma >= rhs - 1e-12 * rhs.max(1.0)
}

/// Builds the window `[alpha_min, 1/B]` for the boundary data `bd`.
///
/// At equality of the endpoints the subsolution is still strict when either
/// the interior inequality has slack (`α > 1 − 2/(n−1)` together with
/// `w_ν = −H B w ≠ 0`), or the boundary point is the `λ_2 > 0, λ_3 = λ_4`
/// configuration where the two tangential eigenvalues differ and the
/// interior inequality improves.
pub fn subsolution_window(bd: &BoundaryFunctionalResult, n: usize) -> SubsolutionWindow {
    let amin = alpha_min_exact(n);
    let alpha_min = Endpoint::exact(amin.clone());
    let alpha_max = match &bd.b_exact {
        Some(b) => Endpoint::exact(BigRational::one() / b),
        None => Endpoint::approx(1.0 / bd.b),
    };
    let (nonempty, equal) = match &alpha_max.exact {
        Some(amax) => (amin <= *amax, amin == *amax),
        None => {
            let diff = alpha_max.value - alpha_min.value;
            let tol = FLOAT_ENDPOINT_TOL * alpha_max.value.abs().max(1.0);
            (diff >= -tol, diff.abs() <= tol)
        }
    };
    let floor_exact = BigRational::one() - BigRational::new(2.into(), (n as i64 - 1).into());
    let interior_floor = floor_exact.to_f64().unwrap();
    let alpha = alpha_max.value;
    let strict = if !nonempty {
        false
    } else if !equal {
        true
    } else {
        let interior_slack = match &alpha_max.exact {
            Some(amax) => *amax > floor_exact,
            None => alpha > interior_floor + FLOAT_ENDPOINT_TOL,
        };
        (interior_slack && bd.b != 0.0) || bd.equality_case
    };
    SubsolutionWindow {
        n,
        a: bd.a,
        alpha_min,
        alpha_max,
        interior_floor,
        nonempty,
        strict,
        alpha,
        gamma: alpha * (alpha + 1.0),
    }
}
