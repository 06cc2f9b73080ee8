//! Spectral Galerkin assembly of magnetic Schrödinger operators
//! `Σ_j (i∂_j − a_j(x_j))² − V` on 1D and 2D tori.
//!
//! Functions are expanded in `e^{ik·εx}` over the symmetric window
//! `|k_j| ≤ N_j`. A non-constant `a_j` is gauged to its flux average, so the
//! kinetic part is diagonal with entries `Σ_j ε_j²(k_j + α_j)²` and the
//! potential enters as a Toeplitz (block-Toeplitz) fill `−V̂_{k−k'}`.

use std::f64::consts::PI;

use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::constants::{Flux, INTEGER_FLUX_GAP};
use crate::error::OperatorError;

/// Largest admissible matrix side.
pub const MAX_DIMENSION: usize = 20_000;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct TorusGeometry {
    periods: Vec<f64>,
}

impl TorusGeometry {
    pub fn new(periods: Vec<f64>) -> Result<Self, OperatorError> {
        if !(1..=2).contains(&periods.len()) {
            return Err(OperatorError::Geometry(format!(
                "dimension must be 1 or 2, got {}",
                periods.len()
            )));
        }
        if let Some(p) = periods.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
            return Err(OperatorError::Geometry(format!(
                "period must be positive, got {p}"
            )));
        }
        Ok(TorusGeometry { periods })
    }

    pub fn circle(period: f64) -> Result<Self, OperatorError> {
        Self::new(vec![period])
    }

    pub fn torus(l1: f64, l2: f64) -> Result<Self, OperatorError> {
        Self::new(vec![l1, l2])
    }

    pub fn dim(&self) -> usize {
        self.periods.len()
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    /// `ε_j = 2π / L_j`.
    pub fn eps(&self, axis: usize) -> f64 {
        2.0 * PI / self.periods[axis]
    }

    pub fn volume(&self) -> f64 {
        self.periods.iter().product()
    }
}

fn check_pow2(n: usize, what: &str) -> Result<(), OperatorError> {
    if n >= 2 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(OperatorError::Potential(format!(
            "{what} needs a power-of-two sample count, got {n}"
        )))
    }
}

/// Trigonometric-interpolation coefficients of real samples on a uniform
/// grid: `c_k` for `k = −n/2..=n/2`, with the Nyquist mode split evenly
/// between `±n/2`.
fn grid_to_fourier(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let scale = 1.0 / n as f64;
    let mut out = vec![ZERO; 2 * half + 1];
    for k in -(half as i64)..=(half as i64) {
        let idx = k.rem_euclid(n as i64) as usize;
        let mut c = buf[idx] * scale;
        if k.unsigned_abs() as usize == half {
            c *= 0.5;
        }
        out[(k + half as i64) as usize] = c;
    }
    out
}

/// Real-valued trigonometric polynomial evaluated at `x_j = j/n` periods.
fn eval_real_trig(coeffs: &[Complex64], bandwidth: usize, n: usize) -> Vec<f64> {
    let c0 = coeffs[bandwidth].re;
    (0..n)
        .map(|j| {
            let mut acc = c0;
            for k in 1..=bandwidth {
                let theta = 2.0 * PI * ((k * j) % n) as f64 / n as f64;
                let c = coeffs[bandwidth + k];
                acc += 2.0 * (c.re * theta.cos() - c.im * theta.sin());
            }
            acc
        })
        .collect()
}

/// Scalar potential `V(x) = Σ_k V̂_k e^{ikεx}` with `V̂_{−k} = conj(V̂_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential1D {
    bandwidth: usize,
    coeffs: Vec<Complex64>,
}

impl Potential1D {
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(v0: f64) -> Self {
        Potential1D {
            bandwidth: 0,
            coeffs: vec![Complex64::new(v0, 0.0)],
        }
    }

    /// Builds a potential from `(k, V̂_k)` pairs. Every mode must come with its
    /// conjugate partner; duplicates are rejected.
    pub fn from_fourier<I>(entries: I) -> Result<Self, OperatorError>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let entries: Vec<(i64, Complex64)> = entries.into_iter().collect();
        let bandwidth = entries
            .iter()
            .map(|(k, _)| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![ZERO; 2 * bandwidth + 1];
        let mut seen = vec![false; coeffs.len()];
        for (k, c) in entries {
            let idx = (k + bandwidth as i64) as usize;
            if seen[idx] {
                return Err(OperatorError::Potential(format!(
                    "duplicate Fourier mode {k}"
                )));
            }
            seen[idx] = true;
            coeffs[idx] = c;
        }
        let pot = Potential1D { bandwidth, coeffs };
        pot.check_hermitian()?;
        Ok(pot)
    }

    /// Samples `V(jL/n)`, `n` a power of two.
    pub fn from_grid(samples: &[f64]) -> Result<Self, OperatorError> {
        check_pow2(samples.len(), "grid potential")?;
        let coeffs = grid_to_fourier(samples);
        Ok(Potential1D {
            bandwidth: samples.len() / 2,
            coeffs,
        })
    }

    fn check_hermitian(&self) -> Result<(), OperatorError> {
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        let b = self.bandwidth as i64;
        for k in 0..=b {
            let d = (self.coeff(k) - self.coeff(-k).conj()).norm();
            if d > 1e-12 * scale {
                return Err(OperatorError::Potential(format!(
                    "V̂_{{-{k}}} is not the conjugate of V̂_{k}: V must be real"
                )));
            }
        }
        Ok(())
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.bandwidth {
            ZERO
        } else {
            self.coeffs[(k + self.bandwidth as i64) as usize]
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Potential1D {
            bandwidth: self.bandwidth,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    /// Adds `c` to the mean `V̂_0`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[self.bandwidth] += c;
        out
    }

    /// `V(jL/n)` for `j = 0..n`.
    pub fn values_on_grid(&self, n: usize) -> Vec<f64> {
        eval_real_trig(&self.coeffs, self.bandwidth, n)
    }

    /// `(min, max |V|)` on an 8× oversampled grid.
    pub fn extremes(&self) -> (f64, f64) {
        let n = (16 * (self.bandwidth + 1)).next_power_of_two().max(64);
        let v = self.values_on_grid(n);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        (min, max)
    }

    /// Soft nonnegativity gate: `V ≥ −10⁻¹⁰·max|V|` on the sampling grid.
    pub fn is_nonnegative(&self) -> bool {
        let (min, max) = self.extremes();
        min >= -1e-10 * max
    }
}

/// Hermitian `M×M` matrix-valued potential `V(x) = Σ_k V̂_k e^{ikεx}` with
/// `V̂_{−k} = V̂_k†`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialMatrix1D {
    size: usize,
    bandwidth: usize,
    coeffs: Vec<DMatrix<Complex64>>,
}

impl PotentialMatrix1D {
    pub fn from_fourier<I>(size: usize, entries: I) -> Result<Self, OperatorError>
    where
        I: IntoIterator<Item = (i64, DMatrix<Complex64>)>,
    {
        if size == 0 {
            return Err(OperatorError::Potential(
                "matrix size must be positive".into(),
            ));
        }
        let entries: Vec<_> = entries.into_iter().collect();
        let bandwidth = entries
            .iter()
            .map(|(k, _)| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![DMatrix::zeros(size, size); 2 * bandwidth + 1];
        for (k, m) in entries {
            if m.shape() != (size, size) {
                return Err(OperatorError::Potential(format!(
                    "mode {k} has shape {:?}, expected {size}×{size}",
                    m.shape()
                )));
            }
            coeffs[(k + bandwidth as i64) as usize] += m;
        }
        let pot = PotentialMatrix1D {
            size,
            bandwidth,
            coeffs,
        };
        let scale = pot
            .coeffs
            .iter()
            .map(max_abs)
            .fold(0.0, f64::max)
            .max(1e-300);
        for k in 0..=bandwidth as i64 {
            let d = max_abs(&(pot.coeff(k) - pot.coeff(-k).adjoint()));
            if d > 1e-12 * scale {
                return Err(OperatorError::Potential(format!(
                    "V̂_{{-{k}}} is not the adjoint of V̂_{k}: V must be Hermitian"
                )));
            }
        }
        Ok(pot)
    }

    pub fn from_scalar(v: &Potential1D) -> Self {
        Self::diagonal(std::slice::from_ref(v))
    }

    /// `diag(V₁, …, V_M)`.
    pub fn diagonal(parts: &[Potential1D]) -> Self {
        let size = parts.len();
        let bandwidth = parts.iter().map(|p| p.bandwidth()).max().unwrap_or(0);
        let coeffs = (-(bandwidth as i64)..=bandwidth as i64)
            .map(|k| {
                let mut m = DMatrix::zeros(size, size);
                for (i, p) in parts.iter().enumerate() {
                    m[(i, i)] = p.coeff(k);
                }
                m
            })
            .collect();
        PotentialMatrix1D {
            size,
            bandwidth,
            coeffs,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn coeff(&self, k: i64) -> DMatrix<Complex64> {
        if k.unsigned_abs() as usize > self.bandwidth {
            DMatrix::zeros(self.size, self.size)
        } else {
            self.coeffs[(k + self.bandwidth as i64) as usize].clone()
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|m| m * Complex64::new(c, 0.0))
            .collect();
        PotentialMatrix1D {
            size: self.size,
            bandwidth: self.bandwidth,
            coeffs,
        }
    }

    /// `V(jL/n)` for `j = 0..n`.
    pub fn values_on_grid(&self, n: usize) -> Vec<DMatrix<Complex64>> {
        let b = self.bandwidth as i64;
        (0..n)
            .map(|j| {
                let mut m = DMatrix::zeros(self.size, self.size);
                for k in -b..=b {
                    let theta = 2.0 * PI * (k * j as i64).rem_euclid(n as i64) as f64 / n as f64;
                    m += &self.coeffs[(k + b) as usize] * Complex64::from_polar(1.0, theta);
                }
                // symmetrize away rounding
                (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
            })
            .collect()
    }

    /// `(smallest eigenvalue, largest spectral norm)` over an oversampled grid.
    pub fn extremes(&self) -> (f64, f64) {
        let n = (16 * (self.bandwidth + 1)).next_power_of_two().max(64);
        let mut min = f64::INFINITY;
        let mut max: f64 = 0.0;
        for m in self.values_on_grid(n) {
            let ev = m.symmetric_eigenvalues();
            for &e in ev.iter() {
                min = min.min(e);
                max = max.max(e.abs());
            }
        }
        (min, max)
    }

    /// Positive semidefiniteness at all grid points, to `10⁻¹⁰·‖V‖`.
    pub fn is_psd(&self) -> bool {
        let (min, max) = self.extremes();
        min >= -1e-10 * max
    }
}

/// Scalar potential on a 2D torus, `V(x) = Σ_{k∈ℤ²} V̂_k e^{i(k₁ε₁x₁ + k₂ε₂x₂)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential2D {
    bandwidth: [usize; 2],
    /// Row-major over `(k₁, k₂)`.
    coeffs: Vec<Complex64>,
}

impl Potential2D {
    pub fn constant(v0: f64) -> Self {
        Potential2D {
            bandwidth: [0, 0],
            coeffs: vec![Complex64::new(v0, 0.0)],
        }
    }

    pub fn from_fourier<I>(entries: I) -> Result<Self, OperatorError>
    where
        I: IntoIterator<Item = ([i64; 2], Complex64)>,
    {
        let entries: Vec<_> = entries.into_iter().collect();
        let mut bandwidth = [0usize; 2];
        for (k, _) in &entries {
            bandwidth[0] = bandwidth[0].max(k[0].unsigned_abs() as usize);
            bandwidth[1] = bandwidth[1].max(k[1].unsigned_abs() as usize);
        }
        let mut pot = Potential2D {
            bandwidth,
            coeffs: vec![ZERO; (2 * bandwidth[0] + 1) * (2 * bandwidth[1] + 1)],
        };
        let mut seen = vec![false; pot.coeffs.len()];
        for (k, c) in entries {
            let idx = pot.index(k);
            if std::mem::replace(&mut seen[idx], true) {
                return Err(OperatorError::Potential(format!(
                    "duplicate Fourier mode {k:?}"
                )));
            }
            pot.coeffs[idx] = c;
        }
        let scale = pot
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        let [b1, b2] = [bandwidth[0] as i64, bandwidth[1] as i64];
        for k1 in -b1..=b1 {
            for k2 in -b2..=b2 {
                if (pot.coeff([k1, k2]) - pot.coeff([-k1, -k2]).conj()).norm() > 1e-12 * scale {
                    return Err(OperatorError::Potential(format!(
                        "mode ({k1}, {k2}) lacks its conjugate partner: V must be real"
                    )));
                }
            }
        }
        Ok(pot)
    }

    /// Samples `V(i L₁/n₁, j L₂/n₂)`, rows indexed by `i`; both sizes powers of two.
    pub fn from_grid(rows: &[Vec<f64>]) -> Result<Self, OperatorError> {
        let n1 = rows.len();
        check_pow2(n1, "grid potential")?;
        let n2 = rows[0].len();
        check_pow2(n2, "grid potential")?;
        if rows.iter().any(|r| r.len() != n2) {
            return Err(OperatorError::Potential("ragged 2D grid".into()));
        }
        let mut planner = FftPlanner::new();
        let f1 = planner.plan_fft_forward(n1);
        let f2 = planner.plan_fft_forward(n2);
        let mut data: Vec<Complex64> = rows
            .iter()
            .flat_map(|r| r.iter().map(|&v| Complex64::new(v, 0.0)))
            .collect();
        for row in data.chunks_mut(n2) {
            f2.process(row);
        }
        let mut col = vec![ZERO; n1];
        for j in 0..n2 {
            for i in 0..n1 {
                col[i] = data[i * n2 + j];
            }
            f1.process(&mut col);
            for i in 0..n1 {
                data[i * n2 + j] = col[i];
            }
        }
        let bandwidth = [n1 / 2, n2 / 2];
        let scale = 1.0 / (n1 * n2) as f64;
        let mut pot = Potential2D {
            bandwidth,
            coeffs: vec![ZERO; (2 * bandwidth[0] + 1) * (2 * bandwidth[1] + 1)],
        };
        for k1 in -(bandwidth[0] as i64)..=bandwidth[0] as i64 {
            for k2 in -(bandwidth[1] as i64)..=bandwidth[1] as i64 {
                let i = k1.rem_euclid(n1 as i64) as usize;
                let j = k2.rem_euclid(n2 as i64) as usize;
                let mut c = data[i * n2 + j] * scale;
                if k1.unsigned_abs() as usize == bandwidth[0] {
                    c *= 0.5;
                }
                if k2.unsigned_abs() as usize == bandwidth[1] {
                    c *= 0.5;
                }
                let idx = pot.index([k1, k2]);
                pot.coeffs[idx] = c;
            }
        }
        Ok(pot)
    }

    /// `V(x) = V₁(x₁) + V₂(x₂)`.
    pub fn separable(v1: &Potential1D, v2: &Potential1D) -> Self {
        let (b1, b2) = (v1.bandwidth() as i64, v2.bandwidth() as i64);
        let mut entries = Vec::new();
        for k in -b1..=b1 {
            entries.push(([k, 0], v1.coeff(k)));
        }
        for k in -b2..=b2 {
            if k != 0 {
                entries.push(([0, k], v2.coeff(k)));
            }
        }
        let mut pot = Potential2D {
            bandwidth: [b1 as usize, b2 as usize],
            coeffs: vec![ZERO; (2 * b1 as usize + 1) * (2 * b2 as usize + 1)],
        };
        for (k, c) in entries {
            let idx = pot.index(k);
            pot.coeffs[idx] += c;
        }
        let idx = pot.index([0, 0]);
        pot.coeffs[idx] += v2.coeff(0);
        pot
    }

    fn index(&self, k: [i64; 2]) -> usize {
        let w2 = 2 * self.bandwidth[1] + 1;
        (k[0] + self.bandwidth[0] as i64) as usize * w2 + (k[1] + self.bandwidth[1] as i64) as usize
    }

    pub fn bandwidth(&self) -> [usize; 2] {
        self.bandwidth
    }

    pub fn coeff(&self, k: [i64; 2]) -> Complex64 {
        if k[0].unsigned_abs() as usize > self.bandwidth[0]
            || k[1].unsigned_abs() as usize > self.bandwidth[1]
        {
            ZERO
        } else {
            self.coeffs[self.index(k)]
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Potential2D {
            bandwidth: self.bandwidth,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    /// Row-major values `V(i L₁/n₁, j L₂/n₂)`.
    pub fn values_on_grid(&self, n1: usize, n2: usize) -> Vec<f64> {
        let [b1, b2] = [self.bandwidth[0] as i64, self.bandwidth[1] as i64];
        let tw1: Vec<Vec<Complex64>> = (0..n1)
            .map(|i| {
                (-b1..=b1)
                    .map(|k| {
                        let t = 2.0 * PI * (k * i as i64).rem_euclid(n1 as i64) as f64 / n1 as f64;
                        Complex64::from_polar(1.0, t)
                    })
                    .collect()
            })
            .collect();
        let tw2: Vec<Vec<Complex64>> = (0..n2)
            .map(|j| {
                (-b2..=b2)
                    .map(|k| {
                        let t = 2.0 * PI * (k * j as i64).rem_euclid(n2 as i64) as f64 / n2 as f64;
                        Complex64::from_polar(1.0, t)
                    })
                    .collect()
            })
            .collect();
        let w2 = (2 * b2 + 1) as usize;
        let mut out = Vec::with_capacity(n1 * n2);
        for row in &tw1 {
            // partial sums over k₁ for each k₂
            let partial: Vec<Complex64> = (0..w2)
                .map(|c| {
                    row.iter()
                        .enumerate()
                        .map(|(r, t)| t * self.coeffs[r * w2 + c])
                        .sum()
                })
                .collect();
            for col in &tw2 {
                let v: Complex64 = partial.iter().zip(col).map(|(p, t)| p * t).sum();
                out.push(v.re);
            }
        }
        out
    }

    pub fn extremes(&self) -> (f64, f64) {
        let n1 = (8 * (self.bandwidth[0] + 1)).next_power_of_two().max(32);
        let n2 = (8 * (self.bandwidth[1] + 1)).next_power_of_two().max(32);
        let v = self.values_on_grid(n1, n2);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        (min, max)
    }

    pub fn is_nonnegative(&self) -> bool {
        let (min, max) = self.extremes();
        min >= -1e-10 * max
    }
}

#[derive(Debug, Clone, PartialEq)]
enum MagneticProfile {
    Constant(f64),
    /// Trigonometric-interpolation coefficients of the samples.
    Sampled {
        samples: Vec<f64>,
        coeffs: Vec<Complex64>,
    },
}

/// Magnetic potential `a(x)` on a circle of length `period`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticPotential1D {
    period: f64,
    profile: MagneticProfile,
    flux: f64,
}

impl MagneticPotential1D {
    pub fn constant(value: f64, period: f64) -> Result<Self, OperatorError> {
        Self::build(period, MagneticProfile::Constant(value))
    }

    /// Constant potential `a ≡ αε` with the given flux.
    pub fn from_flux(alpha: Flux, period: f64) -> Result<Self, OperatorError> {
        Self::constant(alpha.value() * 2.0 * PI / period, period)
    }

    /// Uniform samples `a(jL/n)`, `n` a power of two.
    pub fn sampled(samples: Vec<f64>, period: f64) -> Result<Self, OperatorError> {
        check_pow2(samples.len(), "sampled magnetic potential")?;
        let coeffs = grid_to_fourier(&samples);
        Self::build(period, MagneticProfile::Sampled { samples, coeffs })
    }

    fn build(period: f64, profile: MagneticProfile) -> Result<Self, OperatorError> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(OperatorError::Geometry(format!(
                "period must be positive, got {period}"
            )));
        }
        let mean = match &profile {
            MagneticProfile::Constant(a) => *a,
            // rectangle rule
            MagneticProfile::Sampled { samples, .. } => {
                samples.iter().sum::<f64>() / samples.len() as f64
            }
        };
        let flux = mean * period / (2.0 * PI);
        if !flux.is_finite() || (flux - flux.round()).abs() <= INTEGER_FLUX_GAP {
            return Err(OperatorError::IntegerFlux(flux));
        }
        Ok(MagneticPotential1D {
            period,
            profile,
            flux,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn eps(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// `(1/2π) ∫_0^L a(x) dx`.
    pub fn flux(&self) -> Flux {
        Flux::new(self.flux).expect("flux validated at construction")
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.profile, MagneticProfile::Constant(_))
    }

    /// Bandwidth of the non-constant part (0 for a constant potential).
    pub fn bandwidth(&self) -> usize {
        match &self.profile {
            MagneticProfile::Constant(_) => 0,
            MagneticProfile::Sampled { samples, .. } => samples.len() / 2,
        }
    }

    /// `a(x)`, by trigonometric interpolation for sampled profiles.
    pub fn value_at(&self, x: f64) -> f64 {
        match &self.profile {
            MagneticProfile::Constant(a) => *a,
            MagneticProfile::Sampled { coeffs, .. } => {
                let b = coeffs.len() / 2;
                let eps = self.eps();
                let mut acc = coeffs[b].re;
                for k in 1..=b {
                    let z = coeffs[b + k] * Complex64::from_polar(1.0, k as f64 * eps * x);
                    acc += 2.0 * z.re;
                }
                acc
            }
        }
    }

    /// `∫_0^x a(y) dy − αεx`, the periodic part of the gauge phase.
    pub fn gauge_phase(&self, x: f64) -> f64 {
        match &self.profile {
            MagneticProfile::Constant(_) => 0.0,
            MagneticProfile::Sampled { coeffs, .. } => {
                let b = coeffs.len() / 2;
                let eps = self.eps();
                let mut acc = 0.0;
                for k in 1..=b {
                    let kf = k as f64 * eps;
                    // â_k (e^{ikεx} − 1)/(ikε) plus its conjugate
                    let z = coeffs[b + k] * (Complex64::from_polar(1.0, kf * x) - 1.0)
                        / Complex64::new(0.0, kf);
                    acc += 2.0 * z.re;
                }
                acc
            }
        }
    }
}

pub fn flux_of(a: &MagneticPotential1D) -> Flux {
    a.flux()
}

/// One Galerkin basis function: lattice point `k` (second entry 0 in 1D)
/// and internal component index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisState {
    pub k: [i64; 2],
    pub component: usize,
}

/// Truncated operator matrix in the gauge-reduced Fourier basis.
#[derive(Debug, Clone)]
pub struct AssembledOperator {
    matrix: DMatrix<Complex64>,
    basis: Vec<BasisState>,
    geometry: TorusGeometry,
    fluxes: Vec<Flux>,
    truncation: Vec<usize>,
    components: usize,
}

impl AssembledOperator {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn geometry(&self) -> &TorusGeometry {
        &self.geometry
    }

    pub fn fluxes(&self) -> &[Flux] {
        &self.fluxes
    }

    pub fn truncation(&self) -> &[usize] {
        &self.truncation
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// `Σ_j ε_j²(k_j + α_j)²` for basis state `i`.
    pub fn kinetic(&self, i: usize) -> f64 {
        let s = self.basis[i];
        (0..self.geometry.dim())
            .map(|j| {
                let e = self.geometry.eps(j);
                let q = s.k[j] as f64 + self.fluxes[j].value();
                e * e * q * q
            })
            .sum()
    }

    /// `‖H − H†‖_max / ‖H‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    max_abs(&(m - m.adjoint())) / scale
}

fn check_dimension(dim: usize) -> Result<(), OperatorError> {
    if dim > MAX_DIMENSION {
        Err(OperatorError::DimensionOverflow(dim))
    } else {
        Ok(())
    }
}

fn check_geometry_dim(g: &TorusGeometry, d: usize) -> Result<(), OperatorError> {
    if g.dim() == d {
        Ok(())
    } else {
        Err(OperatorError::Mismatch(format!(
            "expected a {d}D geometry, got {}D",
            g.dim()
        )))
    }
}

fn warn_bandwidth(bandwidth: usize, n: usize) {
    if bandwidth > 2 * n {
        warn!(
            "potential bandwidth {bandwidth} exceeds 2N = {}; higher modes are dropped",
            2 * n
        );
    }
}

/// `H[k,k'] = δ_{kk'} ε²(k+α)² − V̂_{k−k'}` for `k, k' ∈ [−N, N]`.
pub fn assemble_1d(
    n: usize,
    geometry: &TorusGeometry,
    alpha: Flux,
    v: &Potential1D,
) -> Result<AssembledOperator, OperatorError> {
    check_geometry_dim(geometry, 1)?;
    let dim = 2 * n + 1;
    check_dimension(dim)?;
    warn_bandwidth(v.bandwidth(), n);
    let eps = geometry.eps(0);
    let a = alpha.value();
    let ks: Vec<i64> = (-(n as i64)..=n as i64).collect();
    let matrix = DMatrix::from_fn(dim, dim, |i, j| {
        let mut h = -v.coeff(ks[i] - ks[j]);
        if i == j {
            let q = eps * (ks[i] as f64 + a);
            h += q * q;
        }
        h
    });
    Ok(AssembledOperator {
        matrix,
        basis: ks
            .iter()
            .map(|&k| BasisState {
                k: [k, 0],
                component: 0,
            })
            .collect(),
        geometry: geometry.clone(),
        fluxes: vec![alpha],
        truncation: vec![n],
        components: 1,
    })
}

/// Block version: `H[(k,m),(k',m')] = δ δ ε²(k+α)² − (V̂_{k−k'})_{m,m'}`.
pub fn assemble_1d_matrix(
    n: usize,
    geometry: &TorusGeometry,
    alpha: Flux,
    v: &PotentialMatrix1D,
) -> Result<AssembledOperator, OperatorError> {
    check_geometry_dim(geometry, 1)?;
    let m = v.size();
    let dim = m * (2 * n + 1);
    check_dimension(dim)?;
    warn_bandwidth(v.bandwidth(), n);
    let eps = geometry.eps(0);
    let a = alpha.value();
    let basis: Vec<BasisState> = (-(n as i64)..=n as i64)
        .flat_map(|k| {
            (0..m).map(move |c| BasisState {
                k: [k, 0],
                component: c,
            })
        })
        .collect();
    let blocks: Vec<DMatrix<Complex64>> = (-2 * n as i64..=2 * n as i64)
        .map(|dk| v.coeff(dk))
        .collect();
    let matrix = DMatrix::from_fn(dim, dim, |i, j| {
        let (si, sj) = (basis[i], basis[j]);
        let block = &blocks[(si.k[0] - sj.k[0] + 2 * n as i64) as usize];
        let mut h = -block[(si.component, sj.component)];
        if i == j {
            let q = eps * (si.k[0] as f64 + a);
            h += q * q;
        }
        h
    });
    Ok(AssembledOperator {
        matrix,
        basis,
        geometry: geometry.clone(),
        fluxes: vec![alpha],
        truncation: vec![n],
        components: m,
    })
}

/// `H[k,k'] = δ_{kk'} Σ_j ε_j²(k_j+α_j)² − V̂_{k−k'}` on the window
/// `|k_j| ≤ N_j`, with `k₂` varying fastest.
pub fn assemble_2d(
    n: [usize; 2],
    geometry: &TorusGeometry,
    fluxes: [Flux; 2],
    v: &Potential2D,
) -> Result<AssembledOperator, OperatorError> {
    check_geometry_dim(geometry, 2)?;
    let dim = (2 * n[0] + 1) * (2 * n[1] + 1);
    check_dimension(dim)?;
    warn_bandwidth(v.bandwidth()[0], n[0]);
    warn_bandwidth(v.bandwidth()[1], n[1]);
    let basis: Vec<BasisState> = (-(n[0] as i64)..=n[0] as i64)
        .flat_map(|k1| {
            (-(n[1] as i64)..=n[1] as i64).map(move |k2| BasisState {
                k: [k1, k2],
                component: 0,
            })
        })
        .collect();
    let (e1, e2) = (geometry.eps(0), geometry.eps(1));
    let (a1, a2) = (fluxes[0].value(), fluxes[1].value());
    let matrix = DMatrix::from_fn(dim, dim, |i, j| {
        let (si, sj) = (basis[i].k, basis[j].k);
        let mut h = -v.coeff([si[0] - sj[0], si[1] - sj[1]]);
        if i == j {
            let q1 = e1 * (si[0] as f64 + a1);
            let q2 = e2 * (si[1] as f64 + a2);
            h += q1 * q1 + q2 * q2;
        }
        h
    });
    Ok(AssembledOperator {
        matrix,
        basis,
        geometry: geometry.clone(),
        fluxes: fluxes.to_vec(),
        truncation: n.to_vec(),
        components: 1,
    })
}
