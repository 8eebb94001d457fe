//! Exactly harmonic polynomials and their derivative jets.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::mpoly::{monomials, FloatPoly, MPoly};
use super::rng_for;
use crate::error::{Error, Result};
use crate::spectral::upoly::{int, rat};
use crate::spectral::Tensor3;

pub const MAX_DEGREE: u32 = 6;
/// Coefficients are drawn from `[−COEFF_BOX, COEFF_BOX]`.
pub const COEFF_BOX: i64 = 10;
pub const MAX_DENOMINATOR: i64 = 64;

/// A polynomial with `Δp = 0` in exact arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicPoly {
    pub n: usize,
    pub d: u32,
    poly: MPoly,
}

impl Serialize for HarmonicPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: Vec<(&Vec<u32>, String)> = self.poly.terms().map(|(e, c)| (e, c.to_string())).collect();
        let mut st = s.serialize_struct("HarmonicPoly", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("coefficients", &coeffs)?;
        st.end()
    }
}

impl HarmonicPoly {
    /// Wraps `p` after checking harmonicity exactly.
    pub fn new(p: MPoly) -> Result<Self> {
        let n = p.nvars();
        if n < 2 {
            return Err(Error::Usage(format!("need at least two variables, got {n}")));
        }
        if !p.laplacian().is_zero() {
            return Err(Error::Usage("polynomial is not harmonic".into()));
        }
        let d = p.degree().unwrap_or(0);
        Ok(HarmonicPoly { n, d, poly: p })
    }

    pub fn poly(&self) -> &MPoly {
        &self.poly
    }

    /// Re-checks `Δp = 0` coefficient by coefficient.
    pub fn is_harmonic(&self) -> bool {
        self.poly.laplacian().is_zero()
    }

    /// Degree at most one: `D²u ≡ 0`.
    pub fn is_affine(&self) -> bool {
        self.d <= 1
    }

    pub fn jet(&self) -> Jet {
        let n = self.n;
        let first: Vec<MPoly> = (0..n).map(|i| self.poly.derivative(i)).collect();
        let mut hess = Vec::with_capacity(n * n);
        let mut third = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                let pij = first[i].derivative(j);
                hess.push(pij.to_float());
                for k in 0..n {
                    third.push(pij.derivative(k).to_float());
                }
            }
        }
        Jet { n, hess, third }
    }
}

/// Float copies of `D²u` and `D³u` for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Jet {
    n: usize,
    hess: Vec<FloatPoly>,
    third: Vec<FloatPoly>,
}

impl Jet {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.hess[i * n + j].eval(x);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    pub fn third(&self, x: &[f64]) -> Tensor3 {
        let n = self.n;
        let mut t = Tensor3::zeros(n);
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    t.set_sym(i, j, k, self.third[(i * n + j) * n + k].eval(x));
                }
            }
        }
        t
    }
}

/// Harmonic part of a homogeneous polynomial of degree `m`:
/// `Σ_j c_j |x|^{2j} Δ^j p` with `c_0 = 1` and
/// `c_{j+1} = −c_j / (2(j+1)(n + 2m − 2j − 4))`.
pub fn harmonic_projection(p: &MPoly, m: u32) -> MPoly {
    let n = p.nvars() as i64;
    let r2 = MPoly::norm_sq(p.nvars());
    let mut out = MPoly::zero(p.nvars());
    let mut c = BigRational::one();
    let mut lap = p.clone();
    let mut rpow = MPoly::monomial(vec![0; p.nvars()], int(1));
    let mut j = 0i64;
    while !lap.is_zero() {
        out = out + (&rpow * &lap).scale(&c);
        let denom = 2 * (j + 1) * (n + 2 * m as i64 - 2 * j - 4);
        if denom == 0 {
            // only reached when Δ^{j+1} p = 0 already
            break;
        }
        c = -c / int(denom);
        lap = lap.laplacian();
        rpow = &rpow * &r2;
        j += 1;
    }
    out
}

fn random_coeff(rng: &mut ChaCha8Rng) -> BigRational {
    let q = rng.gen_range(1..=MAX_DENOMINATOR);
    let p = rng.gen_range(-COEFF_BOX * q..=COEFF_BOX * q);
    rat(p, q)
}

/// Random harmonic polynomial with homogeneous components of every degree
/// `2..=d`, the top one nonzero.
pub fn random_harmonic_poly_from(n: usize, d: u32, rng: &mut ChaCha8Rng) -> Result<HarmonicPoly> {
    if n < 2 {
        return Err(Error::Usage(format!("need n >= 2, got {n}")));
    }
    if !(2..=MAX_DEGREE).contains(&d) {
        return Err(Error::Usage(format!("degree must lie in 2..={MAX_DEGREE}, got {d}")));
    }
    let mut total = MPoly::zero(n);
    for m in 2..=d {
        loop {
            let mut p = MPoly::zero(n);
            for e in monomials(n, m) {
                p.add_term(e, random_coeff(rng));
            }
            let h = harmonic_projection(&p, m);
            if !h.is_zero() {
                total = total + h;
                break;
            }
        }
    }
    let out = HarmonicPoly::new(total).map_err(|e| Error::IdentityViolated(format!("projection failed: {e}")))?;
    debug_assert_eq!(out.d, d);
    Ok(out)
}

pub fn random_harmonic_poly(n: usize, d: u32, seed: u64) -> Result<HarmonicPoly> {
    random_harmonic_poly_from(n, d, &mut rng_for(seed, 0))
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `C(n+d−1, d) − C(n+d−3, d−2)`.
pub fn harmonic_dimension_formula(n: usize, d: usize) -> usize {
    let all = binomial(n + d - 1, d);
    if d < 2 {
        all
    } else {
        all - binomial(n + d - 3, d - 2)
    }
}

/// Dimension of the kernel of `Δ` on degree-`d` forms, from the exact rank
/// of its coefficient matrix. Fails if it disagrees with the closed form.
pub fn harmonic_subspace_dimension(n: usize, d: u32) -> Result<usize> {
    if n < 1 {
        return Err(Error::Usage("need at least one variable".into()));
    }
    let dom = monomials(n, d);
    let codom = if d >= 2 { monomials(n, d - 2) } else { Vec::new() };
    let mut rows: Vec<Vec<BigRational>> = codom
        .iter()
        .map(|_| vec![BigRational::zero(); dom.len()])
        .collect();
    for (c, e) in dom.iter().enumerate() {
        let lap = MPoly::monomial(e.clone(), int(1)).laplacian();
        for (r, f) in codom.iter().enumerate() {
            rows[r][c] = lap.coeff(f);
        }
    }
    let rank = exact_rank(&mut rows);
    let dim = dom.len() - rank;
    let expected = harmonic_dimension_formula(n, d as usize);
    if dim != expected {
        return Err(Error::IdentityViolated(format!(
            "harmonic dimension {dim} for n={n}, d={d}, expected {expected}"
        )));
    }
    Ok(dim)
}

fn exact_rank(rows: &mut [Vec<BigRational>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = BigRational::one() / rows[rank][col].clone();
        for r in (rank + 1)..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = &rows[r][col] * &inv;
            for c in col..ncols {
                let v = &f * &rows[rank][c];
                rows[r][c] -= v;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy_cubic() -> MPoly {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let x3 = &(&x * &x) * &x;
        let xy2 = &(&x * &y) * &y;
        x3 + xy2.scale(&int(-3))
    }

    #[test]
    fn projection_of_x_cubed() {
        let x = MPoly::var(2, 0);
        let x3 = &(&x * &x) * &x;
        let h = harmonic_projection(&x3, 3);
        assert_eq!(h, xy_cubic().scale(&rat(1, 4)));
    }

    #[test]
    fn random_output_is_harmonic() {
        for (n, d) in [(2, 2), (3, 4), (4, 3), (5, 6), (6, 5)] {
            let p = random_harmonic_poly(n, d, 7 + n as u64).unwrap();
            assert!(p.is_harmonic());
            assert_eq!(p.d, d);
            assert!(!p.poly().homogeneous_part(d).is_zero());
        }
    }

    #[test]
    fn coefficients_respect_the_box_before_projection() {
        let mut rng = rng_for(3, 9);
        for _ in 0..1000 {
            let c = random_coeff(&mut rng);
            assert!(c <= int(COEFF_BOX) && c >= int(-COEFF_BOX));
            assert!(*c.denom() <= num_bigint::BigInt::from(MAX_DENOMINATOR));
        }
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(random_harmonic_poly(3, 4, 11).unwrap(), random_harmonic_poly(3, 4, 11).unwrap());
        assert_ne!(random_harmonic_poly(3, 4, 11).unwrap(), random_harmonic_poly(3, 4, 12).unwrap());
    }

    #[test]
    fn dimension_counts() {
        assert_eq!(harmonic_subspace_dimension(3, 2).unwrap(), 5);
        assert_eq!(harmonic_subspace_dimension(2, 3).unwrap(), 2);
        for n in 2..=5 {
            for d in 2..=MAX_DEGREE {
                harmonic_subspace_dimension(n, d).unwrap();
            }
        }
        for d in 0..=6 {
            assert_eq!(harmonic_dimension_formula(3, d), 2 * d + 1);
        }
    }

    #[test]
    fn rejects_non_harmonic_and_bad_degree() {
        let x = MPoly::var(2, 0);
        assert!(matches!(HarmonicPoly::new(&x * &x), Err(Error::Usage(_))));
        assert!(matches!(random_harmonic_poly(3, 7, 0), Err(Error::Usage(_))));
        assert!(matches!(random_harmonic_poly(1, 3, 0), Err(Error::Usage(_))));
    }

    #[test]
    fn jet_of_cubic() {
        let u = HarmonicPoly::new(xy_cubic()).unwrap();
        let jet = u.jet();
        let h = jet.hessian(&[0.3, -0.4]);
        // u_xx = 6x, u_xy = −6y
        assert!((h[(0, 0)] - 1.8).abs() < 1e-15 && (h[(0, 1)] - 2.4).abs() < 1e-15);
        let t = jet.third(&[0.3, -0.4]);
        assert_eq!(t.norm_sq(), 144.0);
        assert_eq!(t.asymmetry(), 0.0);
    }
}
