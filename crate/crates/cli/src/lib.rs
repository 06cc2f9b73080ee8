//! `torus-lt` command-line front end: constant tables as CSV/JSON and
//! verification jobs from JSON configs.

pub mod config;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use torus_lt::constants::{crossover, f_of_b, green_diag, k_best, scan, ConstantsReport, Flux};
use torus_lt::numerics::{logspace, DEFAULT_SERIES_TOL};
use torus_lt::operator::TorusGeometry;
use torus_lt::sweep::{run_sweep, SweepKind};
use torus_lt::verify::{
    check_1d_gamma, check_gamma_moments, check_negative_trace_matrix, suggested_truncation,
    LTVerdict, ScalarPotential,
};

use config::{sweep_params, AlphaSpec, CheckSpec, Format, JobConfig};

pub const THREADS_ENV: &str = "TORUS_LT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "torus-lt",
    version,
    about = "Magnetic Lieb-Thirring constants on tori"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report K1, K2, K and the supremum data for one flux, as JSON.
    Constants {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
    },
    /// Table of constants over a flux range.
    Scan {
        /// Range `lo:hi:step`.
        #[arg(long, default_value = "0.01:0.99:0.01")]
        alphas: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// F(b, alpha) on a logarithmic b grid, as CSV `b,F`.
    Fscan {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-3)]
        b_lo: f64,
        #[arg(long, default_value_t = 1e6)]
        b_hi: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fluxes where K1 = K2, as JSON.
    Crossover {
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Green's function diagonal by series and closed form, as CSV.
    Green {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        /// Comma-separated spectral parameters.
        #[arg(long, value_delimiter = ',', required = true)]
        lambdas: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run inequality checks; one JSON verdict per line. Without
    /// `--config`, runs a random sweep of `--kind`.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CliSweepKind::Scalar)]
        kind: CliSweepKind,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Fourier truncation N for config checks that do not set one.
        #[arg(long)]
        basis: Option<usize>,
        /// First seed; overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run any job from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        basis: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CliSweepKind {
    Scalar,
    Matrix,
    TwoD,
    Orthonormal,
    Duality,
}

impl From<CliSweepKind> for SweepKind {
    fn from(k: CliSweepKind) -> Self {
        match k {
            CliSweepKind::Scalar => SweepKind::Scalar,
            CliSweepKind::Matrix => SweepKind::Matrix,
            CliSweepKind::TwoD => SweepKind::TwoD,
            CliSweepKind::Orthonormal => SweepKind::Orthonormal,
            CliSweepKind::Duality => SweepKind::Duality,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    /// At least one verdict failed.
    Violation,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Done => 0,
            Outcome::Violation => 2,
        }
    }
}

/// Size the global rayon pool from `TORUS_LT_THREADS`, if set.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_ENV}={raw:?} is not a count"))?;
    ensure!(n > 0, "{THREADS_ENV} must be positive");
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Constants { alpha } => {
            println!("{}", constants_json(alpha)?);
            Ok(Outcome::Done)
        }
        Command::Scan {
            alphas,
            out,
            format,
        } => {
            emit(
                out.as_deref(),
                &scan_output(&AlphaSpec::Range(alphas).values()?, format)?,
            )?;
            Ok(Outcome::Done)
        }
        Command::Fscan {
            alpha,
            b_lo,
            b_hi,
            points,
            out,
        } => {
            emit(out.as_deref(), &fscan_csv(alpha, b_lo, b_hi, points)?)?;
            Ok(Outcome::Done)
        }
        Command::Crossover { tol } => {
            println!("{}", crossover_json(tol)?);
            Ok(Outcome::Done)
        }
        Command::Green {
            alpha,
            eps,
            lambdas,
            out,
        } => {
            emit(out.as_deref(), &green_csv(alpha, eps, &lambdas)?)?;
            Ok(Outcome::Done)
        }
        Command::Verify {
            config: Some(path),
            seed,
            basis,
            out,
            ..
        } => match config::load(&path)? {
            JobConfig::Verify {
                checks,
                seed: cfg_seed,
                out: cfg_out,
            } => {
                let verdicts = run_checks(&checks, seed.unwrap_or(cfg_seed), basis)?;
                emit_verdicts(out.or(cfg_out).as_deref(), &verdicts)
            }
            _ => bail!("config {} is not a verify job", path.display()),
        },
        Command::Verify {
            config: None,
            kind,
            trials,
            gamma,
            seed,
            out,
            ..
        } => {
            let check = CheckSpec::RandomSweep {
                kind: kind.into(),
                trials,
                gamma,
                max_bandwidth: None,
                max_amplitude: None,
            };
            let verdicts = run_checks(&[check], seed.unwrap_or(0), None)?;
            emit_verdicts(out.as_deref(), &verdicts)
        }
        Command::Run {
            config,
            seed,
            basis,
        } => run_job(config::load(&config)?, seed, basis),
    }
}

pub fn run_job(job: JobConfig, seed: Option<u64>, basis: Option<usize>) -> Result<Outcome> {
    match job {
        JobConfig::Constants { alpha } => println!("{}", constants_json(alpha)?),
        JobConfig::Scan {
            alphas,
            out,
            format,
        } => emit(out.as_deref(), &scan_output(&alphas.values()?, format)?)?,
        JobConfig::Fscan {
            alpha,
            b_lo,
            b_hi,
            points,
            out,
        } => emit(out.as_deref(), &fscan_csv(alpha, b_lo, b_hi, points)?)?,
        JobConfig::Crossover { tol } => println!("{}", crossover_json(tol)?),
        JobConfig::Green {
            alpha,
            eps,
            lambdas,
            out,
        } => emit(out.as_deref(), &green_csv(alpha, eps, &lambdas)?)?,
        JobConfig::Verify {
            checks,
            seed: cfg_seed,
            out,
        } => {
            let verdicts = run_checks(&checks, seed.unwrap_or(cfg_seed), basis)?;
            return emit_verdicts(out.as_deref(), &verdicts);
        }
    }
    Ok(Outcome::Done)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_verdicts(out: Option<&Path>, verdicts: &[LTVerdict]) -> Result<Outcome> {
    let mut text = String::new();
    for v in verdicts {
        text.push_str(&serde_json::to_string(v)?);
        text.push('\n');
    }
    emit(out, &text)?;
    let bad = verdicts.iter().filter(|v| !v.holds).count();
    if bad > 0 {
        log::warn!("{bad} of {} verdicts violated", verdicts.len());
        Ok(Outcome::Violation)
    } else {
        Ok(Outcome::Done)
    }
}

pub fn constants_json(alpha: f64) -> Result<String> {
    Ok(serde_json::to_string_pretty(&k_best(Flux::new(alpha)?)?)?)
}

pub fn crossover_json(tol: f64) -> Result<String> {
    ensure!(tol > 0.0, "tolerance must be positive");
    Ok(serde_json::to_string_pretty(&crossover(tol)?)?)
}

/// Shortest round-trip representation, in exponent form for very small or
/// very large magnitudes.
pub fn shortest(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && x.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// [`shortest`] of `x` rounded to 6 significant digits.
pub fn six_digits(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    shortest(rounded)
}

pub fn scan_output(alphas: &[f64], format: Format) -> Result<String> {
    let reports: Vec<ConstantsReport> = scan(alphas)
        .into_iter()
        .zip(alphas)
        .map(|(r, a)| r.with_context(|| format!("alpha = {a}")))
        .collect::<Result<_>>()?;
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&reports)? + "\n"),
        Format::Csv => {
            let mut s = String::from("alpha,K1,K2,K,b_star,sup_at_infinity\n");
            for r in &reports {
                writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    six_digits(r.alpha),
                    six_digits(r.k1),
                    six_digits(r.k2),
                    six_digits(r.k),
                    six_digits(r.b_star),
                    r.sup_at_infinity
                )?;
            }
            Ok(s)
        }
    }
}

pub fn fscan_csv(alpha: f64, b_lo: f64, b_hi: f64, points: usize) -> Result<String> {
    ensure!(
        b_lo > 0.0 && b_hi >= b_lo,
        "need 0 < b_lo <= b_hi, got [{b_lo}, {b_hi}]"
    );
    ensure!(points > 0, "need at least one point");
    let a = Flux::new(alpha)?;
    let bs = logspace(b_lo, b_hi, points);
    let fs: Vec<f64> = bs
        .par_iter()
        .map(|&b| f_of_b(b, a, DEFAULT_SERIES_TOL))
        .collect::<Result<_, _>>()?;
    let mut s = String::from("b,F\n");
    for (b, f) in bs.iter().zip(&fs) {
        writeln!(s, "{},{}", shortest(*b), shortest(*f))?;
    }
    Ok(s)
}

pub fn green_csv(alpha: f64, eps: f64, lambdas: &[f64]) -> Result<String> {
    let a = Flux::new(alpha)?;
    let mut s = String::from("lambda,G_series,G_closed,abs_diff\n");
    for &lambda in lambdas {
        let g = green_diag(lambda, eps, a)?;
        writeln!(
            s,
            "{},{},{},{}",
            shortest(lambda),
            shortest(g.series.value),
            shortest(g.closed),
            shortest((g.series.value - g.closed).abs())
        )?;
    }
    Ok(s)
}

fn fluxes_of(values: &[f64]) -> Result<Vec<Flux>> {
    Ok(values
        .iter()
        .map(|&a| Flux::new(a))
        .collect::<Result<_, _>>()?)
}

/// Verdicts for all checks, in order. Random sweeps draw consecutive seeds
/// starting at `seed`, continuing across sweeps.
pub fn run_checks(checks: &[CheckSpec], seed: u64, basis: Option<usize>) -> Result<Vec<LTVerdict>> {
    let mut verdicts = Vec::new();
    let mut next_seed = seed;
    for (i, check) in checks.iter().enumerate() {
        let ctx = || format!("check {i}");
        match check {
            CheckSpec::GammaMoments {
                periods,
                fluxes,
                gamma,
                basis: n,
                potential,
            } => {
                let g = TorusGeometry::new(periods.clone()).with_context(ctx)?;
                let fl = fluxes_of(fluxes).with_context(ctx)?;
                let (v, vmax, bw) = match g.dim() {
                    1 => {
                        let v = potential.to_1d().with_context(ctx)?;
                        let (vmax, bw) = (v.extremes().1, vec![v.bandwidth()]);
                        (ScalarPotential::OneD(v), vmax, bw)
                    }
                    _ => {
                        let v = potential.to_2d().with_context(ctx)?;
                        let (vmax, bw) = (v.extremes().1, v.bandwidth().to_vec());
                        (ScalarPotential::TwoD(v), vmax, bw)
                    }
                };
                let n: Vec<usize> = match n {
                    Some(n) => n.clone(),
                    None => (0..g.dim())
                        .map(|j| {
                            basis.unwrap_or_else(|| suggested_truncation(vmax, g.eps(j), bw[j]))
                        })
                        .collect(),
                };
                verdicts.push(check_gamma_moments(&g, &fl, &v, *gamma, &n).with_context(ctx)?);
            }
            CheckSpec::NegativeTraceMatrix {
                period,
                flux,
                basis: n,
                potential,
            } => {
                let g = TorusGeometry::circle(*period).with_context(ctx)?;
                let v = potential.build().with_context(ctx)?;
                let n = n.or(basis).unwrap_or_else(|| {
                    suggested_truncation(v.extremes().1, g.eps(0), v.bandwidth())
                });
                let a = Flux::new(*flux).with_context(ctx)?;
                verdicts.push(check_negative_trace_matrix(&g, a, &v, n).with_context(ctx)?);
            }
            CheckSpec::OneDGamma {
                period,
                flux,
                gamma,
                basis: n,
                potential,
            } => {
                let g = TorusGeometry::circle(*period).with_context(ctx)?;
                let v = potential.build().with_context(ctx)?;
                let n = n.or(basis).unwrap_or_else(|| {
                    suggested_truncation(v.extremes().1, g.eps(0), v.bandwidth())
                });
                let a = Flux::new(*flux).with_context(ctx)?;
                verdicts.push(check_1d_gamma(&g, a, &v, *gamma, n).with_context(ctx)?);
            }
            CheckSpec::RandomSweep {
                kind,
                trials,
                gamma,
                max_bandwidth,
                max_amplitude,
            } => {
                let params = sweep_params(*kind, *gamma, *max_bandwidth, *max_amplitude);
                for r in run_sweep(&params, next_seed, *trials) {
                    verdicts.push(r.with_context(ctx)?);
                }
                next_seed += *trials as u64;
            }
        }
    }
    Ok(verdicts)
}
