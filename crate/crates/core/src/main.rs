use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use conestab::cone::{boundary_data, solve_cross_section_with, ConeSolution, SolveOptions};
use conestab::simons::{verify_suite, ViolationReport};
use conestab::spectral::{lstar_optimize, WeightSpec};
use conestab::stability::{instability_certificate_with, stability_verdict_with, DEFAULT_TOL};
use conestab::{report, Error, Result};

#[derive(Parser)]
#[command(name = "conestab", version, about = "Stability of homogeneous one-phase free boundary cones")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the cross-section ODE and write the profile as JSON.
    Solve {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Number of stored profile samples.
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        /// Largest integrator step.
        #[arg(long, default_value_t = conestab::cone::solution::DEFAULT_STEP)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral verdict, boundary functionals and subsolution windows.
    Stability {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: usize,
        /// frobenius, max, or signed:a (a may be a ratio such as 7/2).
        #[arg(long, default_value = "frobenius")]
        weight: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Explicit perturbation with negative second variation.
    Certify {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: usize,
        /// Gauss–Legendre panels per variable.
        #[arg(long, default_value_t = 64)]
        quad: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Supremum of the boundary functional over normalized curvatures.
    Lstar {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = conestab::spectral::lstar::DEFAULT_RADIUS_MAX)]
        radius_max: f64,
    },
    /// Randomized check of the Simons-type inequality on harmonic polynomials.
    VerifySimons {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        degree: u32,
        #[arg(long, default_value_t = 100)]
        polys: usize,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Overridden by CONESTAB_SEED when set.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "frobenius")]
        weight: String,
    },
    /// Stability table for every cone of dimension n.
    Scan {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cones solved concurrently; defaults to the number of logical cores.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn solve(k: usize, h: usize, tol: f64, grid: usize, step: f64) -> Result<ConeSolution> {
    solve_cross_section_with(k, h, &SolveOptions { tol, samples: grid, step })
}

fn solve_default(k: usize, h: usize) -> Result<ConeSolution> {
    solve_cross_section_with(k, h, &SolveOptions::default())
}

fn env_seed(flag: u64) -> Result<u64> {
    match std::env::var("CONESTAB_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("CONESTAB_SEED is not an unsigned integer: '{s}'"))),
        Err(_) => Ok(flag),
    }
}

/// Returns whether the command's own check passed.
fn run(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Solve {
            k,
            h,
            tol,
            grid,
            step,
            out,
        } => {
            let cone = solve(k, h, tol, grid, step)?;
            let bd = boundary_data(&cone)?;
            let json = cone.to_json()?;
            match &out {
                Some(p) => {
                    fs::write(p, json)?;
                    println!("theta_star={} H={}", cone.theta_star, bd.h);
                }
                None => {
                    println!("{json}");
                    eprintln!("theta_star={} H={}", cone.theta_star, bd.h);
                }
            }
        }
        Cmd::Stability { k, h, weight, tol } => {
            let chosen: WeightSpec = weight.parse()?;
            let mut weights = vec![WeightSpec::Frobenius, WeightSpec::Signed { a: 4.0 }];
            if !weights.contains(&chosen) {
                weights.push(chosen);
            }
            let cone = solve_default(k, h)?;
            println!("{}", to_json(&stability_verdict_with(&cone, tol, &weights)?)?);
        }
        Cmd::Certify { k, h, quad, tol } => {
            let cone = solve_default(k, h)?;
            println!("{}", to_json(&instability_certificate_with(&cone, quad, tol)?)?);
        }
        Cmd::Lstar { n, radius_max } => {
            println!("{}", to_json(&lstar_optimize(n, radius_max)?)?);
        }
        Cmd::VerifySimons {
            n,
            degree,
            polys,
            points,
            seed,
            weight,
        } => {
            let spec: WeightSpec = weight.parse()?;
            let seed = env_seed(seed)?;
            if polys == 0 || points == 0 {
                return Err(Error::Usage("--polys and --points must be positive".into()));
            }
            let rep: ViolationReport = verify_suite(n, degree, polys, points, &spec, seed)?;
            let ok = rep.passed();
            println!(
                "{} weight={} n={n} degree={degree} tested={} guarded={} worst_margin={:e} seed={seed}",
                if ok { "PASS" } else { "FAIL" },
                rep.weight,
                rep.samples_tested,
                rep.samples_guarded,
                rep.worst_margin
            );
            println!("{}", to_json(&rep)?);
            return Ok(ok);
        }
        Cmd::Scan {
            n,
            format,
            out,
            jobs,
            tol,
        } => {
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()));
            let table = report::scan(n, tol, jobs)?;
            let text = match format {
                Format::Csv => table.to_csv(),
                Format::Json => table.to_json()? + "\n",
            };
            emit(&text, out.as_ref())?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
