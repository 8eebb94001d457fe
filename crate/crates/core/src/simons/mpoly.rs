//! Multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::spectral::upoly::int;

/// Sparse polynomial in `n` variables keyed by exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly {
    n: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl MPoly {
    pub fn zero(n: usize) -> Self {
        MPoly { n, terms: BTreeMap::new() }
    }

    pub fn monomial(exps: Vec<u32>, c: BigRational) -> Self {
        let mut p = MPoly::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// `x_i`.
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MPoly::monomial(e, int(1))
    }

    /// `|x|² = Σ x_i²`.
    pub fn norm_sq(n: usize) -> Self {
        let mut p = MPoly::zero(n);
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 2;
            p.add_term(e, int(1));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: BigRational) {
        assert_eq!(exps.len(), self.n, "exponent vector has the wrong length");
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    /// Highest total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Part of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> MPoly {
        MPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.n);
        }
        MPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// `∂/∂x_i`.
    pub fn derivative(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero(self.n);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            out.add_term(f, c * int(e[i] as i64));
        }
        out
    }

    pub fn laplacian(&self) -> MPoly {
        let mut out = MPoly::zero(self.n);
        for i in 0..self.n {
            out = out + self.derivative(i).derivative(i);
        }
        out
    }

    pub fn eval_exact(&self, x: &[BigRational]) -> BigRational {
        let mut total = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t *= xi;
                }
            }
            total += t;
        }
        total
    }

    pub fn to_float(&self) -> FloatPoly {
        FloatPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.to_f64().unwrap_or(f64::NAN)))
                .collect(),
        }
    }
}

impl Add for MPoly {
    type Output = MPoly;

    fn add(mut self, rhs: MPoly) -> MPoly {
        assert_eq!(self.n, rhs.n);
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Mul for &MPoly {
    type Output = MPoly;

    fn mul(self, rhs: &MPoly) -> MPoly {
        assert_eq!(self.n, rhs.n);
        let mut out = MPoly::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

/// Floating-point copy of an [`MPoly`] for fast evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPoly {
    n: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl FloatPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(x).fold(*c, |acc, (&k, &xi)| acc * xi.powi(k as i32)))
            .sum()
    }
}

/// All exponent vectors of total degree `d` in `n` variables, in
/// lexicographic order.
pub fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=d).rev() {
            prefix.push(k);
            rec(n, d - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::upoly::rat;

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(3, 2).len(), 6);
        assert_eq!(monomials(4, 3).len(), 20);
        assert_eq!(monomials(1, 5), vec![vec![5]]);
    }

    #[test]
    fn laplacian_of_norm_power() {
        // Δ|x|⁴ = (4·2 + 4n)|x|² for n = 3 gives 20|x|²
        let r2 = MPoly::norm_sq(3);
        let r4 = &r2 * &r2;
        assert_eq!(r4.laplacian(), r2.scale(&int(20)));
    }

    #[test]
    fn float_matches_exact() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let p = &(&x * &x) * &y + y.scale(&rat(-3, 7));
        let v = p.eval_exact(&[rat(1, 2), rat(3, 1)]);
        assert_eq!(v, rat(3, 4) - rat(9, 7));
        assert!((p.to_float().eval(&[0.5, 3.0]) - (0.75 - 9.0 / 7.0)).abs() < 1e-15);
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = MPoly::var(2, 0);
        let p = x.clone() + x.scale(&int(-1));
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }
}
