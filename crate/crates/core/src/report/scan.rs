//! Stability scan over every `C(k, h)` with `k + h = n`.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;

use crate::cone::{solve_cross_section, solution::DEFAULT_TOL as SOLVE_TOL};
use crate::error::{Error, Result};
use crate::spectral::WeightSpec;
use crate::stability::verdict::FD_GRID;
use crate::stability::{stability_verdict, StabilityReport, Verdict};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_COLUMNS: [&str; 13] = [
    "k",
    "h",
    "n",
    "theta_star",
    "H",
    "Lambda",
    "threshold",
    "verdict",
    "L",
    "B_a4",
    "alpha_min",
    "alpha_max",
    "criterion37",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub k: usize,
    pub h: usize,
    pub n: usize,
    pub theta_star: f64,
    #[serde(rename = "H")]
    pub mean_curvature: f64,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    #[serde(rename = "Lambda_fd")]
    pub lambda_fd: f64,
    pub convergence_estimate: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    /// Absent for the half-space.
    #[serde(rename = "L")]
    pub l: Option<f64>,
    #[serde(rename = "B_a4")]
    pub b_a4: Option<f64>,
    /// Frobenius window.
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub criterion37: bool,
    /// Nonempty strict `signed(4)` window.
    pub signed4_strict: bool,
}

impl From<&StabilityReport> for ScanRow {
    fn from(r: &StabilityReport) -> Self {
        let frob = r.window(&WeightSpec::Frobenius);
        let s4 = r.window(&WeightSpec::Signed { a: 4.0 });
        ScanRow {
            k: r.k,
            h: r.h,
            n: r.n,
            theta_star: r.theta_star,
            mean_curvature: r.mean_curvature,
            lambda: r.lambda,
            lambda_fd: r.lambda_fd,
            convergence_estimate: r.convergence_estimate,
            threshold: r.threshold,
            verdict: r.verdict,
            l: r.boundary.as_ref().map(|b| b.l),
            b_a4: r.boundary.as_ref().map(|b| b.b),
            alpha_min: frob.map(|w| w.alpha_min.value),
            alpha_max: frob.map(|w| w.alpha_max.value),
            criterion37: r.criterion37_fired,
            signed4_strict: s4.is_some_and(|w| w.nonempty && w.strict),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub version: u32,
    pub n: usize,
    pub solve_tol: f64,
    pub verdict_tol: f64,
    pub fd_grid: usize,
    /// Seconds since the Unix epoch; the only field that varies between runs.
    pub generated_unix: u64,
    pub rows: Vec<ScanRow>,
}

/// Scans every `(k, h)` with `k, h ≥ 1` and `k + h = n`, running at most
/// `jobs` cones at a time. Rows come back ordered by `k`.
pub fn scan(n: usize, tol: f64, jobs: usize) -> Result<ScanTable> {
    if n < 3 {
        return Err(Error::Usage(format!("scan needs n >= 3, got {n}")));
    }
    if jobs == 0 {
        return Err(Error::Usage("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    let rows = pool.install(|| {
        (1..n)
            .into_par_iter()
            .map(|k| {
                let cone = solve_cross_section(k, n - k, SOLVE_TOL)?;
                Ok(ScanRow::from(&stability_verdict(&cone, tol)?))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let generated_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(ScanTable {
        version: SCHEMA_VERSION,
        n,
        solve_tol: SOLVE_TOL,
        verdict_tol: tol,
        fd_grid: FD_GRID,
        generated_unix,
        rows,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ScanTable {
    /// CSV with a schema comment line; carries no timestamp.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# conestab scan schema v{} n={} solve_tol={:e} verdict_tol={:e} fd_grid={}",
            self.version, self.n, self.solve_tol, self.verdict_tol, self.fd_grid
        );
        let _ = writeln!(out, "{}", CSV_COLUMNS.join(","));
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.k,
                r.h,
                r.n,
                r.theta_star,
                r.mean_curvature,
                r.lambda,
                r.threshold,
                r.verdict,
                opt(r.l),
                opt(r.b_a4),
                opt(r.alpha_min),
                opt(r.alpha_max),
                r.criterion37
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn stable_count(&self) -> usize {
        self.rows.iter().filter(|r| r.verdict == Verdict::Stable).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n3_scan() {
        let t = scan(3, 1e-7, 2).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!((t.rows[0].k, t.rows[0].h), (1, 2));
        assert_eq!(t.rows[0].verdict, Verdict::Stable);
        assert_eq!(t.rows[0].l, None);
        assert_eq!(t.rows[1].verdict, Verdict::Unstable);
        assert_eq!(t.rows[1].l, Some(2.0));
        assert_eq!(t.rows[1].alpha_max, Some(0.5));
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# conestab scan schema v1"));
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert!(lines.next().unwrap().starts_with("1,2,3,"));
        assert!(!csv.contains(&t.generated_unix.to_string()));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(scan(2, 1e-7, 1), Err(Error::Usage(_))));
        assert!(matches!(scan(4, 1e-7, 0), Err(Error::Usage(_))));
    }
}
