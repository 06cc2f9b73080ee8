//! JSON job configuration. Unknown keys are rejected everywhere.

use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;

use torus_lt::operator::{Potential1D, Potential2D, PotentialMatrix1D};
use torus_lt::sweep::{SweepKind, SweepParams};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `lo:hi:step` string, explicit list, or `{lo, hi, step}` object.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Range(String),
    List(Vec<f64>),
    Object { lo: f64, hi: f64, step: f64 },
}

impl AlphaSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            AlphaSpec::Range(s) => parse_range(s),
            AlphaSpec::List(v) => Ok(v.clone()),
            AlphaSpec::Object { lo, hi, step } => range_values(*lo, *hi, *step),
        }
    }
}

pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    ensure!(
        parts.len() == 3,
        "range must look like lo:hi:step, got {s:?}"
    );
    let num = |p: &str| {
        p.trim()
            .parse::<f64>()
            .with_context(|| format!("bad number {p:?} in range {s:?}"))
    };
    range_values(num(parts[0])?, num(parts[1])?, num(parts[2])?)
}

fn range_values(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    ensure!(
        step > 0.0 && step.is_finite(),
        "range step must be positive, got {step}"
    );
    ensure!(hi >= lo, "range is empty: {lo} > {hi}");
    // snap to the step grid so that 0.01:0.99:0.01 prints as 0.07, not 0.07000000000000001
    let decimals = decimals_of(step).max(decimals_of(lo));
    let scale = 10f64.powi(decimals as i32);
    Ok(torus_lt::numerics::linspace_step(lo, hi, step)
        .into_iter()
        .map(|a| {
            if decimals < 15 {
                (a * scale).round() / scale
            } else {
                a
            }
        })
        .collect())
}

fn decimals_of(x: f64) -> usize {
    let s = format!("{x}");
    s.split_once('.').map_or(0, |(_, frac)| frac.len())
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "job", rename_all = "snake_case", deny_unknown_fields)]
pub enum JobConfig {
    Constants {
        alpha: f64,
    },
    Scan {
        alphas: AlphaSpec,
        #[serde(default)]
        out: Option<PathBuf>,
        #[serde(default)]
        format: Format,
    },
    Fscan {
        alpha: f64,
        #[serde(default = "default_b_lo")]
        b_lo: f64,
        #[serde(default = "default_b_hi")]
        b_hi: f64,
        #[serde(default = "default_points")]
        points: usize,
        #[serde(default)]
        out: Option<PathBuf>,
    },
    Crossover {
        #[serde(default = "default_crossover_tol")]
        tol: f64,
    },
    Green {
        alpha: f64,
        eps: f64,
        lambdas: Vec<f64>,
        #[serde(default)]
        out: Option<PathBuf>,
    },
    Verify {
        checks: Vec<CheckSpec>,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        out: Option<PathBuf>,
    },
}

fn default_b_lo() -> f64 {
    1e-3
}

fn default_b_hi() -> f64 {
    1e6
}

fn default_points() -> usize {
    200
}

fn default_crossover_tol() -> f64 {
    1e-8
}

fn default_gamma() -> f64 {
    1.0
}

fn default_period() -> f64 {
    2.0 * PI
}

fn default_periods() -> Vec<f64> {
    vec![2.0 * PI]
}

/// Scalar potential: Fourier entries `[k, re, im]` (1D) or
/// `[k₁, k₂, re, im]` (2D), or real samples on a uniform grid (1D list,
/// or list of rows in 2D; power-of-two sizes).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialSpec {
    Fourier(Vec<Vec<f64>>),
    Grid(GridSpec),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    OneD(Vec<f64>),
    TwoD(Vec<Vec<f64>>),
}

fn as_index(x: f64) -> Result<i64> {
    ensure!(
        x.fract() == 0.0 && x.abs() < 1e9,
        "Fourier index must be an integer, got {x}"
    );
    Ok(x as i64)
}

impl PotentialSpec {
    pub fn to_1d(&self) -> Result<Potential1D> {
        match self {
            PotentialSpec::Fourier(entries) => {
                let parsed = entries
                    .iter()
                    .map(|e| {
                        ensure!(
                            e.len() == 3,
                            "1D Fourier entries are [k, re, im], got {e:?}"
                        );
                        Ok((as_index(e[0])?, Complex64::new(e[1], e[2])))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if parsed.is_empty() {
                    return Ok(Potential1D::zero());
                }
                Ok(Potential1D::from_fourier(parsed)?)
            }
            PotentialSpec::Grid(GridSpec::OneD(v)) => Ok(Potential1D::from_grid(v)?),
            PotentialSpec::Grid(GridSpec::TwoD(_)) => bail!("expected a 1D grid, got rows"),
        }
    }

    pub fn to_2d(&self) -> Result<Potential2D> {
        match self {
            PotentialSpec::Fourier(entries) => {
                let parsed = entries
                    .iter()
                    .map(|e| {
                        ensure!(
                            e.len() == 4,
                            "2D Fourier entries are [k1, k2, re, im], got {e:?}"
                        );
                        Ok((
                            [as_index(e[0])?, as_index(e[1])?],
                            Complex64::new(e[2], e[3]),
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if parsed.is_empty() {
                    return Ok(Potential2D::constant(0.0));
                }
                Ok(Potential2D::from_fourier(parsed)?)
            }
            PotentialSpec::Grid(GridSpec::TwoD(rows)) => Ok(Potential2D::from_grid(rows)?),
            PotentialSpec::Grid(GridSpec::OneD(_)) => bail!("expected a 2D grid (list of rows)"),
        }
    }
}

/// Matrix potential: diagonal of scalar potentials, or Fourier entries
/// `[k, row, col, re, im]` of an `size × size` Hermitian matrix.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum MatrixPotentialSpec {
    Diagonal(Vec<PotentialSpec>),
    Fourier { size: usize, entries: Vec<Vec<f64>> },
}

impl MatrixPotentialSpec {
    pub fn build(&self) -> Result<PotentialMatrix1D> {
        match self {
            MatrixPotentialSpec::Diagonal(parts) => {
                ensure!(
                    !parts.is_empty(),
                    "diagonal matrix potential needs at least one entry"
                );
                let parts = parts
                    .iter()
                    .map(PotentialSpec::to_1d)
                    .collect::<Result<Vec<_>>>()?;
                Ok(PotentialMatrix1D::diagonal(&parts))
            }
            MatrixPotentialSpec::Fourier { size, entries } => {
                let mut blocks: Vec<(i64, DMatrix<Complex64>)> = Vec::new();
                for e in entries {
                    ensure!(
                        e.len() == 5,
                        "matrix Fourier entries are [k, row, col, re, im], got {e:?}"
                    );
                    let k = as_index(e[0])?;
                    let (r, c) = (as_index(e[1])?, as_index(e[2])?);
                    ensure!(
                        (0..*size as i64).contains(&r) && (0..*size as i64).contains(&c),
                        "matrix entry ({r}, {c}) outside a {size}×{size} potential"
                    );
                    let pos = match blocks.iter().position(|(kk, _)| *kk == k) {
                        Some(p) => p,
                        None => {
                            blocks.push((k, DMatrix::zeros(*size, *size)));
                            blocks.len() - 1
                        }
                    };
                    blocks[pos].1[(r as usize, c as usize)] += Complex64::new(e[3], e[4]);
                }
                Ok(PotentialMatrix1D::from_fourier(*size, blocks)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    GammaMoments {
        #[serde(default = "default_periods")]
        periods: Vec<f64>,
        fluxes: Vec<f64>,
        #[serde(default = "default_gamma")]
        gamma: f64,
        #[serde(default)]
        basis: Option<Vec<usize>>,
        potential: PotentialSpec,
    },
    NegativeTraceMatrix {
        #[serde(default = "default_period")]
        period: f64,
        flux: f64,
        #[serde(default)]
        basis: Option<usize>,
        potential: MatrixPotentialSpec,
    },
    #[serde(rename = "1d_gamma")]
    OneDGamma {
        #[serde(default = "default_period")]
        period: f64,
        flux: f64,
        gamma: f64,
        #[serde(default)]
        basis: Option<usize>,
        potential: MatrixPotentialSpec,
    },
    RandomSweep {
        kind: SweepKind,
        trials: usize,
        #[serde(default = "default_gamma")]
        gamma: f64,
        #[serde(default)]
        max_bandwidth: Option<usize>,
        #[serde(default)]
        max_amplitude: Option<f64>,
    },
}

/// Sweep parameters of a `random_sweep` check, defaults filled in.
pub fn sweep_params(
    kind: SweepKind,
    gamma: f64,
    max_bandwidth: Option<usize>,
    max_amplitude: Option<f64>,
) -> SweepParams {
    let mut p = SweepParams::new(kind).with_gamma(gamma);
    if let Some(b) = max_bandwidth {
        p.max_bandwidth = b;
    }
    if let Some(a) = max_amplitude {
        p.max_amplitude = a;
    }
    p
}

pub fn load(path: &std::path::Path) -> Result<JobConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    parse(&text).with_context(|| format!("invalid config {}", path.display()))
}

pub fn parse(text: &str) -> Result<JobConfig> {
    Ok(serde_json::from_str(text)?)
}
