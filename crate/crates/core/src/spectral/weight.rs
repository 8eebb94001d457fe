//! Convex, symmetric, degree-one functions of Hessian eigenvalues and their
//! derivative calculus in an eigenframe.
//!
//! For `w = F(D²u) = f(λ_1, …, λ_n)` evaluated in coordinates where `D²u` is
//! diagonal, the first derivatives of `F` along the diagonal basis matrices are
//! `f_{λ_i}` and vanish along the off-diagonal ones. Second derivatives are
//! `f_{λ_iλ_k}` on the diagonal block and the divided difference
//! `(f_{λ_i} − f_{λ_j}) / (λ_i − λ_j)` along each off-diagonal basis matrix.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative exclusion band around non-smooth points of a weight.
pub const DELTA_SMOOTH: f64 = 1e-4;

/// A symmetric, convex, positively 1-homogeneous function of the eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightSpec {
    /// `sqrt(Σ λ_k²)`, the Frobenius norm of the Hessian.
    Frobenius,
    /// `sqrt(Σ_{λ>0} λ² + a Σ_{λ<0} λ²)`.
    Signed { a: f64 },
    /// The largest eigenvalue.
    MaxEigenvalue,
}

impl WeightSpec {
    pub fn signed(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::Usage(format!("signed weight needs a > 0, got {a}")));
        }
        Ok(WeightSpec::Signed { a })
    }

    /// Weight applied to squared negative eigenvalues, when the kind has one.
    pub fn negative_weight(&self) -> Option<f64> {
        match *self {
            WeightSpec::Frobenius => Some(1.0),
            WeightSpec::Signed { a } => Some(a),
            WeightSpec::MaxEigenvalue => None,
        }
    }

    #[inline]
    fn coeff(a: f64, l: f64) -> f64 {
        if l < 0.0 {
            a
        } else {
            1.0
        }
    }

    /// `f(λ)`.
    pub fn eval(&self, lambda: &[f64]) -> f64 {
        match *self {
            WeightSpec::Frobenius => lambda.iter().map(|l| l * l).sum::<f64>().sqrt(),
            WeightSpec::Signed { a } => lambda
                .iter()
                .map(|&l| Self::coeff(a, l) * l * l)
                .sum::<f64>()
                .sqrt(),
            WeightSpec::MaxEigenvalue => lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// First partials `f_{λ_i}`.
    ///
    /// For the max-eigenvalue weight, ties at the top share the unit mass
    /// equally, which is the symmetric element of the subdifferential.
    pub fn gradient(&self, lambda: &[f64]) -> Vec<f64> {
        match *self {
            WeightSpec::Frobenius | WeightSpec::Signed { .. } => {
                let a = self.negative_weight().unwrap();
                let w = self.eval(lambda);
                if w == 0.0 {
                    return vec![0.0; lambda.len()];
                }
                lambda.iter().map(|&l| Self::coeff(a, l) * l / w).collect()
            }
            WeightSpec::MaxEigenvalue => {
                let top = self.eval(lambda);
                let scale = spectral_radius(lambda);
                let ties: Vec<bool> = lambda
                    .iter()
                    .map(|&l| (top - l) <= 1e-14 * scale.max(f64::MIN_POSITIVE))
                    .collect();
                let count = ties.iter().filter(|&&t| t).count() as f64;
                ties.iter().map(|&t| if t { 1.0 / count } else { 0.0 }).collect()
            }
        }
    }

    /// Second partials `f_{λ_iλ_j}` as a dense row-major matrix.
    pub fn hessian(&self, lambda: &[f64]) -> Vec<f64> {
        let n = lambda.len();
        let mut out = vec![0.0; n * n];
        if let Some(a) = self.negative_weight() {
            let w = self.eval(lambda);
            if w == 0.0 {
                return out;
            }
            let g: Vec<f64> = lambda.iter().map(|&l| Self::coeff(a, l) * l).collect();
            let w3 = w * w * w;
            for i in 0..n {
                for j in 0..n {
                    let diag = if i == j { Self::coeff(a, lambda[i]) / w } else { 0.0 };
                    out[i * n + j] = diag - g[i] * g[j] / w3;
                }
            }
        }
        out
    }

    /// Checks that `f` is twice differentiable at `λ` with room to spare.
    ///
    /// Every weight needs `λ ≠ 0`. The signed weight additionally needs every
    /// eigenvalue away from zero and the max weight needs a simple top
    /// eigenvalue, both relative to `DELTA_SMOOTH` times the spectral radius.
    pub fn check_smooth(&self, lambda: &[f64]) -> Result<()> {
        let radius = spectral_radius(lambda);
        if radius == 0.0 {
            return Err(Error::NonSmoothPoint("D²u = 0 (w vanishes)".into()));
        }
        let band = DELTA_SMOOTH * radius;
        match *self {
            WeightSpec::Frobenius => Ok(()),
            WeightSpec::Signed { .. } => match lambda.iter().find(|l| l.abs() < band) {
                Some(l) => Err(Error::NonSmoothPoint(format!(
                    "eigenvalue {l:e} inside the sign guard band {band:e}"
                ))),
                None => Ok(()),
            },
            WeightSpec::MaxEigenvalue => {
                let mut sorted = lambda.to_vec();
                sorted.sort_by(|a, b| b.total_cmp(a));
                if sorted.len() > 1 && sorted[0] - sorted[1] < band {
                    Err(Error::NonSmoothPoint(format!(
                        "top eigenvalue gap {:e} inside guard band {band:e}",
                        sorted[0] - sorted[1]
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// `F_{e_ij, e_ij}` for `i ≠ j`.
    ///
    /// Uses the divided difference of the first partials when the pair is
    /// separated, and its limit `f_{λ_iλ_i} − f_{λ_iλ_j}` when the two
    /// eigenvalues are within the guard band of each other.
    pub fn off_diagonal_second(&self, lambda: &[f64], grad: &[f64], hess: &[f64], i: usize, j: usize) -> f64 {
        let n = lambda.len();
        let band = DELTA_SMOOTH * spectral_radius(lambda);
        let gap = lambda[i] - lambda[j];
        if gap.abs() < band {
            hess[i * n + i] - hess[i * n + j]
        } else {
            (grad[i] - grad[j]) / gap
        }
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Frobenius => write!(f, "frobenius"),
            WeightSpec::Signed { a } => write!(f, "signed:{a}"),
            WeightSpec::MaxEigenvalue => write!(f, "max"),
        }
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    /// Accepts `frobenius`, `max`, or `signed:a` where `a` is a decimal or a
    /// ratio such as `7/2`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "frobenius" | "frob" => Ok(WeightSpec::Frobenius),
            "max" | "max-eigenvalue" => Ok(WeightSpec::MaxEigenvalue),
            other => {
                let Some(rest) = other.strip_prefix("signed:") else {
                    return Err(Error::Usage(format!("unknown weight '{other}'")));
                };
                let a = parse_ratio(rest)
                    .ok_or_else(|| Error::Usage(format!("bad signed weight parameter '{rest}'")))?;
                WeightSpec::signed(a)
            }
        }
    }
}

fn parse_ratio(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            (q != 0.0).then_some(p / q)
        }
        None => s.trim().parse().ok(),
    }
}

/// `max |λ_k|`.
pub fn spectral_radius(lambda: &[f64]) -> f64 {
    lambda.iter().fold(0.0f64, |m, l| m.max(l.abs()))
}

/// Eigenvalues with multiplicities, stored in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<(f64, usize)>,
}

impl Spectrum {
    /// Builds a spectrum from `(eigenvalue, multiplicity)` pairs; zero
    /// multiplicities are dropped.
    pub fn new(pairs: impl IntoIterator<Item = (f64, usize)>) -> Self {
        let mut values: Vec<(f64, usize)> = pairs.into_iter().filter(|&(_, m)| m > 0).collect();
        values.sort_by(|a, b| b.0.total_cmp(&a.0));
        Spectrum { values }
    }

    /// One entry per eigenvalue, each with multiplicity one.
    pub fn from_values(values: &[f64]) -> Self {
        Spectrum::new(values.iter().map(|&v| (v, 1)))
    }

    pub fn pairs(&self) -> &[(f64, usize)] {
        &self.values
    }

    /// Ambient dimension, the sum of multiplicities.
    pub fn dim(&self) -> usize {
        self.values.iter().map(|&(_, m)| m).sum()
    }

    /// Eigenvalues repeated by multiplicity, descending.
    pub fn expanded(&self) -> Vec<f64> {
        self.values
            .iter()
            .flat_map(|&(v, m)| std::iter::repeat(v).take(m))
            .collect()
    }

    pub fn trace(&self) -> f64 {
        self.values.iter().map(|&(v, m)| v * m as f64).sum()
    }

    pub fn radius(&self) -> f64 {
        self.values.iter().fold(0.0f64, |r, &(v, _)| r.max(v.abs()))
    }

    /// Trace-free within `1e-12` of the spectral scale.
    pub fn is_trace_free(&self) -> bool {
        self.trace().abs() <= 1e-12 * self.radius().max(f64::MIN_POSITIVE)
    }
}

/// Symmetric third-derivative tensor `u_{ijk}` in a fixed frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 { n, data: vec![0.0; n * n * n] }
    }

    /// Builds from a closure evaluated on every ordered index triple.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Tensor3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t.data[(i * n + j) * n + k] = f(i, j, k);
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    /// Sets all six permutations of `(i, j, k)`.
    pub fn set_sym(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.n;
        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            self.data[(a * n + b) * n + c] = v;
        }
    }

    /// `Σ u_{ijk}²` over all ordered triples.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Maximum deviation from full index symmetry.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    worst = worst.max((v - self.get(j, i, k)).abs()).max((v - self.get(i, k, j)).abs());
                }
            }
        }
        worst
    }

    /// Change of frame: `T'_{abc} = Σ Q_{ia} Q_{jb} Q_{kc} T_{ijk}` where the
    /// columns of `q` (row-major, `q[i*n + a]`) are the new basis vectors.
    pub fn rotate(&self, q: &[f64]) -> Tensor3 {
        let n = self.n;
        // contract one index at a time
        let mut t1 = vec![0.0; n * n * n];
        for a in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = 0.0;
                    for i in 0..n {
                        s += q[i * n + a] * self.get(i, j, k);
                    }
                    t1[(a * n + j) * n + k] = s;
                }
            }
        }
        let mut t2 = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for k in 0..n {
                    let mut s = 0.0;
                    for j in 0..n {
                        s += q[j * n + b] * t1[(a * n + j) * n + k];
                    }
                    t2[(a * n + b) * n + k] = s;
                }
            }
        }
        let mut t3 = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += q[k * n + c] * t2[(a * n + b) * n + k];
                    }
                    t3[(a * n + b) * n + c] = s;
                }
            }
        }
        Tensor3 { n, data: t3 }
    }
}

/// `f(λ)` for a spectrum with multiplicities.
pub fn eval_weight(spec: &WeightSpec, lambda: &Spectrum) -> f64 {
    spec.eval(&lambda.expanded())
}

fn check_frame(lambda: &[f64], third: &Tensor3) -> Result<()> {
    if lambda.len() < 2 || third.dim() != lambda.len() {
        return Err(Error::Usage(format!(
            "eigenframe mismatch: {} eigenvalues, tensor of dimension {}",
            lambda.len(),
            third.dim()
        )));
    }
    Ok(())
}

/// Spatial gradient `w_k = Σ_i f_{λ_i} u_{iik}` in the eigenframe.
///
/// `lambda[i]` must be the eigenvalue belonging to frame axis `i` of `third`.
pub fn weight_gradient(spec: &WeightSpec, lambda: &[f64], third: &Tensor3) -> Result<Vec<f64>> {
    check_frame(lambda, third)?;
    spec.check_smooth(lambda)?;
    let n = lambda.len();
    let g = spec.gradient(lambda);
    Ok((0..n)
        .map(|k| (0..n).map(|i| g[i] * third.get(i, i, k)).sum())
        .collect())
}

/// `Δw` for `w = f(λ(D²u))` with `u` harmonic, in the eigenframe.
///
/// The fourth-derivative term `Σ_i f_{λ_i} Δu_{ii}` vanishes for harmonic `u`
/// and is not evaluated.
pub fn weight_laplacian(spec: &WeightSpec, lambda: &[f64], third: &Tensor3) -> Result<f64> {
    check_frame(lambda, third)?;
    spec.check_smooth(lambda)?;
    let n = lambda.len();
    let g = spec.gradient(lambda);
    let hess = spec.hessian(lambda);
    let mut off = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            off[i * n + j] = spec.off_diagonal_second(lambda, &g, &hess, i, j);
        }
    }
    let mut total = 0.0;
    for k in 0..n {
        let mut diag = 0.0;
        for i in 0..n {
            for j in 0..n {
                diag += hess[i * n + j] * third.get(i, i, k) * third.get(j, j, k);
            }
        }
        let mut cross = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let t = third.get(i, j, k);
                cross += off[i * n + j] * t * t;
            }
        }
        total += diag + 2.0 * cross;
    }
    Ok(total)
}

/// Pairing sums for a trace-free spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingSums {
    /// `f(λ)`.
    pub f: f64,
    /// `Σ_{i<j} (λ_i − λ_j)(f_{λ_i} − f_{λ_j})`.
    pub total: f64,
    /// `|total − n f|`.
    pub residual: f64,
    /// For each `k`, `Σ_{i≠k} (λ_i − λ_k)(f_{λ_i} − f_{λ_k})`, each bounded by `n f`.
    pub per_k: Vec<f64>,
    /// Smallest pairwise product `(f_{λ_i} − f_{λ_j})(λ_i − λ_j)`.
    pub min_pairing: f64,
}

/// Evaluates the pairing identity `Σ_{i<j} (λ_i−λ_j)(f_{λ_i}−f_{λ_j}) = n f`
/// together with its per-index partial sums.
pub fn identity_nf(spec: &WeightSpec, lambda: &[f64]) -> Result<PairingSums> {
    let n = lambda.len();
    if n < 2 {
        return Err(Error::Usage("need at least two eigenvalues".into()));
    }
    let radius = spectral_radius(lambda);
    let trace: f64 = lambda.iter().sum();
    if trace.abs() > 1e-12 * radius.max(f64::MIN_POSITIVE) * n as f64 {
        return Err(Error::Usage(format!("spectrum is not trace-free (trace {trace:e})")));
    }
    spec.check_smooth(lambda)?;
    let f = spec.eval(lambda);
    let g = spec.gradient(lambda);
    let pair = |i: usize, j: usize| (lambda[i] - lambda[j]) * (g[i] - g[j]);
    let mut total = 0.0;
    let mut min_pairing = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let p = pair(i, j);
            total += p;
            min_pairing = min_pairing.min(p);
        }
    }
    let per_k = (0..n)
        .map(|k| (0..n).filter(|&i| i != k).map(|i| pair(i, k)).sum())
        .collect();
    Ok(PairingSums {
        f,
        total,
        residual: (total - n as f64 * f).abs(),
        per_k,
        min_pairing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_weight_reads_off_definition() {
        let w = WeightSpec::signed(4.0).unwrap();
        assert!((eval_weight(&w, &Spectrum::from_values(&[1.0, -1.0])) - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn frobenius_on_unit_pair() {
        let v = eval_weight(&WeightSpec::Frobenius, &Spectrum::from_values(&[0.0, 1.0, -1.0]));
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_spectrum_has_zero_weight() {
        let zero = Spectrum::new([(0.0, 4)]);
        for spec in [WeightSpec::Frobenius, WeightSpec::Signed { a: 4.0 }, WeightSpec::MaxEigenvalue] {
            assert_eq!(eval_weight(&spec, &zero), 0.0);
        }
    }

    #[test]
    fn spectrum_is_descending_with_multiplicity() {
        let s = Spectrum::new([(-2.0, 1), (1.0, 2), (0.0, 1), (5.0, 0)]);
        assert_eq!(s.expanded(), vec![1.0, 1.0, 0.0, -2.0]);
        assert_eq!(s.dim(), 4);
        assert!(s.is_trace_free());
    }

    #[test]
    fn parse_weight_flags() {
        assert_eq!("frobenius".parse::<WeightSpec>().unwrap(), WeightSpec::Frobenius);
        assert_eq!("max".parse::<WeightSpec>().unwrap(), WeightSpec::MaxEigenvalue);
        assert_eq!("signed:4".parse::<WeightSpec>().unwrap(), WeightSpec::Signed { a: 4.0 });
        assert_eq!("signed:7/2".parse::<WeightSpec>().unwrap(), WeightSpec::Signed { a: 3.5 });
        assert!("signed:-1".parse::<WeightSpec>().is_err());
        assert!("signed:".parse::<WeightSpec>().is_err());
        assert!("l1".parse::<WeightSpec>().is_err());
    }

    #[test]
    fn frobenius_gradient_is_chain_rule() {
        let lambda = [2.0, -0.5, -1.5];
        let t = Tensor3::from_fn(3, |i, j, k| (1 + i + 2 * j + 3 * k) as f64 * 0.1 + (i * j * k) as f64);
        // symmetrize
        let t = Tensor3::from_fn(3, |i, j, k| {
            (t.get(i, j, k) + t.get(i, k, j) + t.get(j, i, k) + t.get(j, k, i) + t.get(k, i, j) + t.get(k, j, i)) / 6.0
        });
        let w = WeightSpec::Frobenius.eval(&lambda);
        let g = weight_gradient(&WeightSpec::Frobenius, &lambda, &t).unwrap();
        for k in 0..3 {
            let expect: f64 = (0..3).map(|i| lambda[i] / w * t.get(i, i, k)).sum();
            assert!((g[k] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn sign_guard_rejects_near_zero_eigenvalue() {
        let lambda = [1.0, 1e-6, -1.0 - 1e-6];
        let t = Tensor3::zeros(3);
        let err = weight_gradient(&WeightSpec::Signed { a: 4.0 }, &lambda, &t).unwrap_err();
        assert!(matches!(err, Error::NonSmoothPoint(_)));
        // frobenius is smooth there
        assert!(weight_gradient(&WeightSpec::Frobenius, &lambda, &t).is_ok());
    }

    #[test]
    fn max_guard_rejects_top_collision() {
        let lambda = [1.0, 1.0 - 1e-7, -2.0 + 1e-7];
        let t = Tensor3::zeros(3);
        assert!(matches!(
            weight_laplacian(&WeightSpec::MaxEigenvalue, &lambda, &t),
            Err(Error::NonSmoothPoint(_))
        ));
    }

    #[test]
    fn coincident_limit_matches_frobenius_norm_curvature() {
        // For the Frobenius norm F(M) = |M|, the second derivative along a unit
        // off-diagonal direction is exactly 1/|M| at any diagonal M.
        let lambda = [1.0, 1.0, -2.0];
        let spec = WeightSpec::Frobenius;
        let g = spec.gradient(&lambda);
        let h = spec.hessian(&lambda);
        let f = spec.eval(&lambda);
        assert!((spec.off_diagonal_second(&lambda, &g, &h, 0, 1) - 1.0 / f).abs() < 1e-15);
        assert!((spec.off_diagonal_second(&lambda, &g, &h, 0, 2) - 1.0 / f).abs() < 1e-15);
    }

    #[test]
    fn pairing_identity_frobenius_n3() {
        let p = identity_nf(&WeightSpec::Frobenius, &[1.0, -1.0, 0.0]).unwrap();
        assert!((p.total - 3.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!(p.residual < 1e-14);
    }

    #[test]
    fn pairing_identity_scale_invariant_residual() {
        for scale in [1e-6, 1e-3, 1.0, 17.0, 1e4] {
            let l = [scale, scale, -2.0 * scale];
            let p = identity_nf(&WeightSpec::Frobenius, &l).unwrap();
            assert!(p.residual <= 1e-12 * p.f, "scale {scale}: {}", p.residual);
        }
    }

    #[test]
    fn identity_nf_rejects_traceful_input() {
        assert!(matches!(identity_nf(&WeightSpec::Frobenius, &[1.0, 1.0]), Err(Error::Usage(_))));
    }
}
