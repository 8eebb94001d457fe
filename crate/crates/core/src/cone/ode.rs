//! Fixed-step RK4 with dense Hermite output for the radial-angle equations.
//!
//! Both the cross-section equation
//! `φ″ + ((h−1) cot t − (k−1) tan t) φ′ + (n−1) φ = 0` and the stability
//! eigenfunction equation share the drift `(h−1) cot t − (k−1) tan t`, which
//! is singular at `t = 0` when `h ≥ 2`. Integration starts from the regular
//! series at a small `t0`, and the mesh is graded near the origin so each
//! step there is a fixed fraction of `t`; further out it is uniform.

/// Switchover point from the series to the integrator.
pub const SERIES_START: f64 = 1e-4;
/// Below this `t` the step is proportional to `t`.
const GRADING_SCALE: f64 = 0.05;

/// `(h−1) cot t − (k−1) tan t`, the drift of the spherical Laplacian on
/// `O(k)×O(h)`-invariant functions.
pub fn drift(k: usize, h: usize, t: f64) -> f64 {
    let mut c = 0.0;
    if h > 1 {
        c += (h - 1) as f64 / t.tan();
    }
    if k > 1 {
        c -= (k - 1) as f64 * t.tan();
    }
    c
}

/// `y″ + drift(t) y′ + q y = 0` with `y(0) = 1`, `y′(0) = 0`.
#[derive(Debug, Clone, Copy)]
pub struct RadialOde {
    pub k: usize,
    pub h: usize,
    pub q: f64,
}

impl RadialOde {
    /// The cross-section equation, `q = n − 1`.
    pub fn cross_section(k: usize, h: usize) -> Self {
        RadialOde { k, h, q: (k + h - 1) as f64 }
    }

    /// The eigenfunction equation `(Jψ′)′ = ΛJψ`, `q = −Λ`.
    pub fn eigen(k: usize, h: usize, lambda: f64) -> Self {
        RadialOde { k, h, q: -lambda }
    }

    pub fn drift(&self, t: f64) -> f64 {
        drift(self.k, self.h, t)
    }

    /// `y″` from the equation; at `t = 0` the regular limit `−q y(0) / h`.
    pub fn second(&self, t: f64, y: f64, dy: f64) -> f64 {
        if t == 0.0 {
            return -self.q * y / self.h as f64;
        }
        -self.drift(t) * dy - self.q * y
    }

    /// Two-term series `y ≈ 1 − (q/(2h)) t²` and its derivative.
    pub fn series(&self, t: f64) -> (f64, f64) {
        let c = self.q / (2.0 * self.h as f64);
        (1.0 - c * t * t, -2.0 * c * t)
    }

    fn rhs(&self, t: f64, y: [f64; 2]) -> [f64; 2] {
        [y[1], self.second(t, y[0], y[1])]
    }

    /// RK4 increment over one step.
    fn rk4(&self, t: f64, y: [f64; 2], dt: f64) -> [f64; 2] {
        let k1 = self.rhs(t, y);
        let k2 = self.rhs(t + 0.5 * dt, [y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1]]);
        let k3 = self.rhs(t + 0.5 * dt, [y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1]]);
        let k4 = self.rhs(t + dt, [y[0] + dt * k3[0], y[1] + dt * k3[1]]);
        [
            dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    }

    /// Integrates from the series start to `t_end` (the last step lands on
    /// it exactly), stopping early once `stop(y)` holds. `dt` is the step
    /// away from the origin.
    pub fn integrate(&self, dt: f64, t_end: f64, stop: impl Fn(f64) -> bool) -> Trajectory {
        let mut t = SERIES_START;
        let (p0, d0) = self.series(t);
        let mut y = [p0, d0];
        // Kahan compensation: keeps accumulated rounding at the level of a
        // single step, which matters once profiles are differenced twice
        let mut comp = [0.0; 2];
        let mut nodes = vec![[0.0, 1.0, 0.0, self.second(0.0, 1.0, 0.0)], [t, p0, d0, self.second(t, p0, d0)]];
        while t < t_end && !stop(y[0]) {
            let mut step = dt.min(t * dt / GRADING_SCALE);
            if t + step > t_end {
                step = t_end - t;
            }
            let inc = self.rk4(t, y, step);
            for j in 0..2 {
                let v = inc[j] + comp[j];
                let sum = y[j] + v;
                comp[j] = v - (sum - y[j]);
                y[j] = sum;
            }
            t = if t + step >= t_end { t_end } else { t + step };
            nodes.push([t, y[0], y[1], self.second(t, y[0], y[1])]);
        }
        Trajectory { nodes }
    }
}

/// Accepted mesh points `(t, y, y′, y″)`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub nodes: Vec<[f64; 4]>,
}

impl Trajectory {
    pub fn last(&self) -> [f64; 4] {
        *self.nodes.last().unwrap()
    }

    /// Index `i` with the sign change of `y` inside `[t_i, t_{i+1}]`.
    pub fn sign_change(&self) -> Option<usize> {
        self.nodes.windows(2).position(|w| w[0][1] > 0.0 && w[1][1] <= 0.0)
    }

    fn locate(&self, t: f64) -> usize {
        let i = self.nodes.partition_point(|p| p[0] <= t);
        i.saturating_sub(1).min(self.nodes.len() - 2)
    }

    /// `(y, y′)` by cubic Hermite interpolation of `(y, y′)` and of
    /// `(y′, y″)` on the mesh interval containing `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let i = self.locate(t);
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        let dt = b[0] - a[0];
        let s = (t - a[0]) / dt;
        (hermite(s, dt, a[1], a[2], b[1], b[2]), hermite(s, dt, a[2], a[3], b[2], b[3]))
    }

    /// Bisection for the zero of the interpolant in the bracketing interval.
    pub fn zero(&self, tol: f64) -> Option<f64> {
        let i = self.sign_change()?;
        let (mut lo, mut hi) = (self.nodes[i][0], self.nodes[i + 1][0]);
        if self.nodes[i + 1][1] == 0.0 {
            return Some(hi);
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid).0 > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Cubic Hermite on a unit parameter `s` over an interval of length `dt`.
pub fn hermite(s: f64, dt: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * dt * d0 + h01 * y1 + h11 * dt * d1
}
