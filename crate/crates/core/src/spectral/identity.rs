//! Exact verification of the two-case algebra behind `B ≤ 3` for `n = 4`,
//! `a = 4`.
//!
//! Case 1 (`λ_2 > 0 ≥ λ_3`, `μ = −λ_3/H ≥ 0`): `B − 1 = N_1/D_1` with
//! `N_1 = (1+μ)³ − 4μ³ + 4((1+μ)² + μ²)` and `D_1 = (1+μ)² + 4μ² + 4`, and
//! `2 D_1 − N_1 = (μ−1)(4(μ²+μ−1) − (μ+1)²) = (μ−1)²(3μ+5)`.
//!
//! Case 2 (`λ_2, λ_3 > 0`, `μ = λ_2/H ∈ (0,1)`): the numerator
//! `μ³ + (1−μ)³ + 4(μ² + (1−μ)²)` is at most 5 and the denominator
//! `μ² + (1−μ)² + 4` at least 4, so `B − 1 ≤ 5/4`.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::upoly::{int, UPoly};
use crate::error::{Error, Result};

/// One machine-checkable claim.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRecord {
    pub identity: String,
    /// Coefficients in increasing degree, as exact rationals.
    pub lhs_coeffs: Vec<String>,
    pub rhs_coeffs: Vec<String>,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofRecord {
    pub records: Vec<IdentityRecord>,
    pub case1_equality_numerator: String,
    pub case1_equality_denominator: String,
    pub case2_numerator_max: String,
    pub case2_fraction_bound: String,
}

impl ProofRecord {
    pub fn all_hold(&self) -> bool {
        self.records.iter().all(|r| r.verdict == "holds")
    }
}

fn coeff_strings(p: &UPoly) -> Vec<String> {
    p.coeffs().iter().map(|c| c.to_string()).collect()
}

fn equality_record(name: &str, lhs: &UPoly, rhs: &UPoly) -> IdentityRecord {
    IdentityRecord {
        identity: name.to_string(),
        lhs_coeffs: coeff_strings(lhs),
        rhs_coeffs: coeff_strings(rhs),
        verdict: if lhs == rhs { "holds" } else { "violated" }.to_string(),
    }
}

/// Records `lhs ≤ bound` on `[lo, hi]` using the exact maximum of `lhs`.
fn upper_bound_record(name: &str, lhs: &UPoly, bound: &BigRational, lo: &BigRational, hi: &BigRational) -> Result<(IdentityRecord, BigRational)> {
    let (max, _) = lhs
        .max_on_interval(lo, hi)
        .ok_or_else(|| Error::IdentityViolated(format!("{name}: no exact critical points")))?;
    Ok((
        IdentityRecord {
            identity: name.to_string(),
            lhs_coeffs: coeff_strings(lhs),
            rhs_coeffs: vec![bound.to_string()],
            verdict: if max <= *bound { "holds" } else { "violated" }.to_string(),
        },
        max,
    ))
}

pub fn case1_numerator(a: &BigRational) -> UPoly {
    let mu = UPoly::x();
    let one_plus = &UPoly::from_ints(&[1]) + &mu;
    let sq = &(&one_plus * &one_plus) + &(&mu * &mu);
    &(&one_plus.pow(3) - &(&mu.pow(3) * a)) + &(&sq * a)
}

pub fn case1_denominator(a: &BigRational) -> UPoly {
    let mu = UPoly::x();
    let one_plus = &UPoly::from_ints(&[1]) + &mu;
    &(&one_plus * &one_plus) + &(&(&(&mu * &mu) * a) + &UPoly::constant(a.clone()))
}

pub fn case2_numerator(a: &BigRational) -> UPoly {
    let mu = UPoly::x();
    let comp = &UPoly::from_ints(&[1]) - &mu;
    let sq = &(&mu * &mu) + &(&comp * &comp);
    &(&mu.pow(3) + &comp.pow(3)) + &(&sq * a)
}

pub fn case2_denominator(a: &BigRational) -> UPoly {
    let mu = UPoly::x();
    let comp = &UPoly::from_ints(&[1]) - &mu;
    &(&(&mu * &mu) + &(&comp * &comp)) + &UPoly::constant(a.clone())
}

/// Runs every exact check and returns the proof record.
pub fn case_identity_check() -> Result<ProofRecord> {
    let a = int(4);
    let mu = UPoly::x();
    let one = UPoly::from_ints(&[1]);
    let mu_minus_1 = &mu - &one;
    let mu_plus_1 = &mu + &one;

    let quad = &(&(&(&mu * &mu) + &mu) - &one) * &a;
    let factored_once = &mu_minus_1 * &(&quad - &(&mu_plus_1 * &mu_plus_1));
    let factored_twice = &(&mu_minus_1 * &mu_minus_1) * &UPoly::from_ints(&[5, 3]);

    let n1 = case1_numerator(&a);
    let d1 = case1_denominator(&a);
    let slack = &(&d1 * &int(2)) - &n1;

    let mut records = vec![
        equality_record("(mu-1)*(4*(mu^2+mu-1)-(mu+1)^2) = (mu-1)^2*(3*mu+5)", &factored_once, &factored_twice),
        equality_record("2*D1(mu) - N1(mu) = (mu-1)*(4*(mu^2+mu-1)-(mu+1)^2)", &slack, &factored_once),
    ];
    // 3μ + 5 has positive coefficients, so (μ−1)²(3μ+5) ≥ 0 for μ ≥ 0
    let linear = UPoly::from_ints(&[5, 3]);
    records.push(IdentityRecord {
        identity: "3*mu+5 > 0 for mu >= 0".into(),
        lhs_coeffs: coeff_strings(&linear),
        rhs_coeffs: vec!["0".into()],
        verdict: if linear.coeffs().iter().all(|c| *c > BigRational::zero()) { "holds" } else { "violated" }.into(),
    });

    let (zero, one_r) = (int(0), int(1));
    let n2 = case2_numerator(&a);
    let d2 = case2_denominator(&a);
    let (rec, n2_max) = upper_bound_record("mu^3+(1-mu)^3+4*(mu^2+(1-mu)^2) <= 5 on [0,1]", &n2, &int(5), &zero, &one_r)?;
    records.push(rec);
    let neg_d2 = -&d2;
    let (rec, _) = upper_bound_record("-(mu^2+(1-mu)^2+4) <= -4 on [0,1]", &neg_d2, &int(-4), &zero, &one_r)?;
    records.push(rec);
    let fraction_gap = &(&n2 * &int(4)) - &(&d2 * &int(5));
    let (rec, _) = upper_bound_record("4*N2(mu) - 5*D2(mu) <= 0 on [0,1]", &fraction_gap, &int(0), &zero, &one_r)?;
    records.push(rec);

    let record = ProofRecord {
        records,
        case1_equality_numerator: n1.eval(&one_r).to_string(),
        case1_equality_denominator: d1.eval(&one_r).to_string(),
        case2_numerator_max: n2_max.to_string(),
        case2_fraction_bound: "5/4".into(),
    };
    if let Some(bad) = record.records.iter().find(|r| r.verdict != "holds") {
        return Err(Error::IdentityViolated(bad.identity.clone()));
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case1_expansion_oracle() {
        // (μ−1)²(3μ+5) expanded by hand: 3μ³ − μ² − 7μ + 5
        let rec = case_identity_check().unwrap();
        let expect: Vec<String> = ["5", "-7", "-1", "3"].iter().map(|s| s.to_string()).collect();
        assert_eq!(rec.records[0].lhs_coeffs, expect);
        assert_eq!(rec.records[0].rhs_coeffs, expect);
        assert!(rec.all_hold());
    }

    #[test]
    fn case1_equality_point() {
        let rec = case_identity_check().unwrap();
        assert_eq!(rec.case1_equality_numerator, "24");
        assert_eq!(rec.case1_equality_denominator, "12");
    }

    #[test]
    fn case2_bound_at_zero() {
        let n2 = case2_numerator(&int(4));
        assert_eq!(n2.eval(&int(0)), int(5));
        assert_eq!(n2, UPoly::from_ints(&[5, -11, 11]));
        assert_eq!(case_identity_check().unwrap().case2_numerator_max, "5");
    }

    #[test]
    fn general_a_reduction() {
        // 2 D1 − N1 = (μ−1)(a(μ²+μ−1) − (μ+1)²) for any a
        for a in [int(1), int(3), int(4), int(9)] {
            let mu = UPoly::x();
            let one = UPoly::from_ints(&[1]);
            let rhs = &(&mu - &one) * &(&(&(&(&(&mu * &mu) + &mu) - &one) * &a) - &(&(&mu + &one) * &(&mu + &one)));
            let lhs = &(&case1_denominator(&a) * &int(2)) - &case1_numerator(&a);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn record_serializes() {
        let json = serde_json::to_value(case_identity_check().unwrap()).unwrap();
        let first = &json["records"][0];
        for key in ["identity", "lhs_coeffs", "rhs_coeffs", "verdict"] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
    }
}
