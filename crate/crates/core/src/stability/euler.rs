//! Zeros of solutions of the Euler equation `f″ + α f′/r + β f/r² = 0`.
//!
//! In `s = log r` it reads `f_ss + (α−1) f_s + β f = 0`, whose solutions
//! oscillate exactly when `4β > (α−1)²`, with zeros spaced by
//! `π / sqrt(β − (α−1)²/4)`.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerZeros {
    pub oscillates: bool,
    /// Closed-form spacing of consecutive zeros in `log r`.
    pub zero_spacing: Option<f64>,
    /// Spacing measured on an RK4 solution.
    pub numeric_spacing: Option<f64>,
}

pub fn euler_zeros(alpha: f64, beta: f64) -> EulerZeros {
    let disc = beta - (alpha - 1.0).powi(2) / 4.0;
    if !(disc > 0.0) {
        return EulerZeros {
            oscillates: false,
            zero_spacing: None,
            numeric_spacing: None,
        };
    }
    let spacing = std::f64::consts::PI / disc.sqrt();
    EulerZeros {
        oscillates: true,
        zero_spacing: Some(spacing),
        numeric_spacing: numeric_spacing(alpha, beta, spacing),
    }
}

/// Integrates from `f(0) = 1, f′(0) = 0` over three expected periods and
/// averages the gaps between the zeros found by bisection on a cubic
/// Hermite interpolant.
fn numeric_spacing(alpha: f64, beta: f64, expected: f64) -> Option<f64> {
    let steps_per_gap = 4000;
    let h = expected / steps_per_gap as f64;
    let rhs = |y: [f64; 2]| [y[1], -(alpha - 1.0) * y[1] - beta * y[0]];
    let mut y = [1.0, 0.0];
    let mut s = 0.0;
    let mut zeros = Vec::new();
    for _ in 0..(6 * steps_per_gap) {
        let k1 = rhs(y);
        let k2 = rhs([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]]);
        let next = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if y[0] != 0.0 && y[0].signum() != next[0].signum() {
            let (d0, d1) = (y[1], next[1]);
            let p = |u: f64| crate::cone::ode::hermite(u, h, y[0], d0, next[0], d1);
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if p(mid).signum() == y[0].signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            zeros.push(s + 0.5 * (lo + hi) * h);
        }
        y = next;
        s += h;
    }
    if zeros.len() < 2 {
        return None;
    }
    Some((zeros[zeros.len() - 1] - zeros[0]) / (zeros.len() - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn threshold_does_not_oscillate() {
        for n in 3..=8 {
            let a = (n - 1) as f64;
            let b = ((n - 2) as f64).powi(2) / 4.0;
            assert!(!euler_zeros(a, b).oscillates);
        }
    }

    #[test]
    fn n4_unit_frequency() {
        let z = euler_zeros(3.0, 2.0);
        assert!(z.oscillates);
        assert!((z.zero_spacing.unwrap() - PI).abs() < 1e-15);
        assert!((z.numeric_spacing.unwrap() - PI).abs() < 1e-8);
    }

    #[test]
    fn numeric_matches_closed_form() {
        for (a, b) in [(6.0, 7.5), (2.0, 0.3), (4.0, 10.0)] {
            let z = euler_zeros(a, b);
            let (c, m) = (z.zero_spacing.unwrap(), z.numeric_spacing.unwrap());
            assert!((c - m).abs() <= 1e-8, "α={a} β={b}: {c} vs {m}");
        }
    }
}
