//! Concrete checks of the Lieb–Thirring type inequalities: eigenvalue
//! moments against potential integrals, and the dual bounds for
//! orthonormal families against their magnetic kinetic energy.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::constants::{k_min, l_cl, torus_lt_constant, Flux};
use crate::error::VerifyError;
use crate::operator::{
    assemble_1d, assemble_1d_matrix, assemble_2d, MagneticPotential1D, Potential1D, Potential2D,
    PotentialMatrix1D, TorusGeometry,
};
use crate::spectrum::{eigs_hermitian, riesz_mean};

/// Relative slack in `holds`.
pub const HOLDS_SLACK: f64 = 1e-8;
const GRAM_TOL: f64 = 1e-8;
const CLAMP_REL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictMeta {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub d: usize,
    pub fluxes: Vec<f64>,
    pub basis_size: usize,
    pub constant: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LTVerdict {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub holds: bool,
    pub meta: VerdictMeta,
}

impl LTVerdict {
    pub fn new(lhs: f64, rhs: f64, meta: VerdictMeta) -> Self {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        LTVerdict {
            lhs,
            rhs,
            ratio,
            holds: ratio <= 1.0 + HOLDS_SLACK,
            meta,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.meta.seed = Some(seed);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScalarPotential {
    OneD(Potential1D),
    TwoD(Potential2D),
}

impl From<Potential1D> for ScalarPotential {
    fn from(v: Potential1D) -> Self {
        ScalarPotential::OneD(v)
    }
}

impl From<Potential2D> for ScalarPotential {
    fn from(v: Potential2D) -> Self {
        ScalarPotential::TwoD(v)
    }
}

/// Fourier truncation resolving all bound states of `−d²/dx² − V` on an
/// axis with `ε = 2π/L`: classically allowed momenta `|p| ≤ √max V` plus
/// the potential bandwidth and a safety margin.
pub fn suggested_truncation(v_max: f64, eps: f64, bandwidth: usize) -> usize {
    (v_max.max(0.0).sqrt() / eps).ceil() as usize + bandwidth + 6
}

fn check_gamma(gamma: f64) -> Result<(), VerifyError> {
    if gamma >= 1.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(VerifyError::Gamma(gamma))
    }
}

/// Uniform grid size with at least 4× oversampling of `bandwidth`.
fn quad_points(bandwidth: usize, floor: usize) -> usize {
    (4 * bandwidth + 8).next_power_of_two().max(floor)
}

fn nonneg_power(v: f64, p: f64, scale: f64) -> f64 {
    if v <= CLAMP_REL * scale {
        0.0
    } else {
        v.powf(p)
    }
}

/// `∫ V^p` by the trapezoid rule.
fn potential_integral_1d(v: &Potential1D, period: f64, p: f64) -> f64 {
    let n = quad_points(v.bandwidth(), 256);
    let vals = v.values_on_grid(n);
    let scale = vals.iter().map(|x| x.abs()).fold(0.0, f64::max);
    vals.iter().map(|&x| nonneg_power(x, p, scale)).sum::<f64>() * period / n as f64
}

fn potential_integral_2d(v: &Potential2D, periods: &[f64], p: f64) -> f64 {
    let [b1, b2] = v.bandwidth();
    let (n1, n2) = (quad_points(b1, 64), quad_points(b2, 64));
    let vals = v.values_on_grid(n1, n2);
    let scale = vals.iter().map(|x| x.abs()).fold(0.0, f64::max);
    vals.iter().map(|&x| nonneg_power(x, p, scale)).sum::<f64>() * periods[0] * periods[1]
        / (n1 * n2) as f64
}

/// `∫ Tr V^p` with pointwise eigendecompositions.
fn trace_power_integral(v: &PotentialMatrix1D, period: f64, p: f64) -> f64 {
    let n = quad_points(v.bandwidth(), 256);
    let mats = v.values_on_grid(n);
    let eigs: Vec<_> = mats.iter().map(|m| m.symmetric_eigenvalues()).collect();
    let scale = eigs
        .iter()
        .flat_map(|e| e.iter().map(|x| x.abs()))
        .fold(0.0, f64::max);
    let sum: f64 = eigs
        .iter()
        .flat_map(|e| e.iter().map(|&x| nonneg_power(x, p, scale)))
        .sum();
    sum * period / n as f64
}

/// `Σ λ_n^γ ≤ torus_lt_constant(γ, α) · ∫ V^{γ+d/2}` for scalar `V ≥ 0`,
/// with `basis[j]` Fourier modes `|k_j| ≤ basis[j]` per axis.
pub fn check_gamma_moments(
    geometry: &TorusGeometry,
    fluxes: &[Flux],
    v: &ScalarPotential,
    gamma: f64,
    basis: &[usize],
) -> Result<LTVerdict, VerifyError> {
    check_gamma(gamma)?;
    let d = geometry.dim();
    if fluxes.len() != d || basis.len() != d {
        return Err(VerifyError::Unsupported(format!(
            "{d}D geometry with {} fluxes and {} truncations",
            fluxes.len(),
            basis.len()
        )));
    }
    let (op, integral) = match v {
        ScalarPotential::OneD(v) => {
            let (min, _) = v.extremes();
            if !v.is_nonnegative() {
                return Err(VerifyError::NegativePotential { min });
            }
            let op = assemble_1d(basis[0], geometry, fluxes[0], v)?;
            (
                op,
                potential_integral_1d(v, geometry.periods()[0], gamma + 0.5),
            )
        }
        ScalarPotential::TwoD(v) => {
            let (min, _) = v.extremes();
            if !v.is_nonnegative() {
                return Err(VerifyError::NegativePotential { min });
            }
            let op = assemble_2d([basis[0], basis[1]], geometry, [fluxes[0], fluxes[1]], v)?;
            (
                op,
                potential_integral_2d(v, geometry.periods(), gamma + 1.0),
            )
        }
    };
    let spectrum = eigs_hermitian(&op)?;
    let constant = torus_lt_constant(gamma, fluxes)?;
    let meta = VerdictMeta {
        check: "gamma_moments".into(),
        gamma: Some(gamma),
        d,
        fluxes: fluxes.iter().map(|a| a.value()).collect(),
        basis_size: spectrum.basis_size,
        constant,
        seed: None,
    };
    Ok(LTVerdict::new(
        riesz_mean(&spectrum, gamma),
        constant * integral,
        meta,
    ))
}

fn matrix_check(
    name: &str,
    geometry: &TorusGeometry,
    alpha: Flux,
    v: &PotentialMatrix1D,
    gamma: f64,
    constant: f64,
    n: usize,
) -> Result<LTVerdict, VerifyError> {
    if geometry.dim() != 1 {
        return Err(VerifyError::Unsupported(
            "matrix potentials need a 1D geometry".into(),
        ));
    }
    if !v.is_psd() {
        return Err(VerifyError::NegativePotential {
            min: v.extremes().0,
        });
    }
    let op = assemble_1d_matrix(n, geometry, alpha, v)?;
    let spectrum = eigs_hermitian(&op)?;
    let integral = trace_power_integral(v, geometry.periods()[0], gamma + 0.5);
    let meta = VerdictMeta {
        check: name.into(),
        gamma: Some(gamma),
        d: 1,
        fluxes: vec![alpha.value()],
        basis_size: spectrum.basis_size,
        constant,
        seed: None,
    };
    Ok(LTVerdict::new(
        riesz_mean(&spectrum, gamma),
        constant * integral,
        meta,
    ))
}

/// `(2/(3√3)) √K(α)`.
pub fn negative_trace_constant(alpha: Flux) -> Result<f64, VerifyError> {
    Ok(2.0 / (3.0 * 3f64.sqrt()) * k_min(alpha)?.sqrt())
}

/// `(π/√3) √K(α) L^cl_{γ,1}`.
pub fn one_d_gamma_constant(alpha: Flux, gamma: f64) -> Result<f64, VerifyError> {
    Ok(PI / 3f64.sqrt() * k_min(alpha)?.sqrt() * l_cl(gamma, 1))
}

/// `Σ λ_n ≤ (2/(3√3)) √K(α) ∫ Tr V^{3/2}` for Hermitian `V ≥ 0`.
pub fn check_negative_trace_matrix(
    geometry: &TorusGeometry,
    alpha: Flux,
    v: &PotentialMatrix1D,
    n: usize,
) -> Result<LTVerdict, VerifyError> {
    let c = negative_trace_constant(alpha)?;
    matrix_check("negative_trace_matrix", geometry, alpha, v, 1.0, c, n)
}

/// `Σ λ_n^γ ≤ (π/√3) √K(α) L^cl_{γ,1} ∫ Tr V^{γ+1/2}`.
pub fn check_1d_gamma(
    geometry: &TorusGeometry,
    alpha: Flux,
    v: &PotentialMatrix1D,
    gamma: f64,
    n: usize,
) -> Result<LTVerdict, VerifyError> {
    check_gamma(gamma)?;
    let c = one_d_gamma_constant(alpha, gamma)?;
    matrix_check("1d_gamma", geometry, alpha, v, gamma, c, n)
}

/// `Σ_k c_k e^{2πikj/n}` for `j = 0..n`, coefficients indexed `k = −B..=B`.
fn synthesize(coeffs: impl Fn(usize) -> Complex64, bandwidth: usize, n: usize) -> Vec<Complex64> {
    let b = bandwidth as i64;
    let c: Vec<Complex64> = (0..2 * bandwidth + 1).map(&coeffs).collect();
    (0..n)
        .map(|j| {
            (-b..=b)
                .zip(&c)
                .map(|(k, ck)| {
                    let t = 2.0 * PI * (k * j as i64).rem_euclid(n as i64) as f64 / n as f64;
                    ck * Complex64::from_polar(1.0, t)
                })
                .sum()
        })
        .collect()
}

/// Gram matrix `⟨ψ_i, ψ_j⟩` in coefficient space must be within `10⁻⁸` of
/// the identity.
fn check_gram(family: &[DMatrix<Complex64>]) -> Result<(), VerifyError> {
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate().skip(i) {
            let g: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            let deviation = (g - target).norm();
            if deviation > GRAM_TOL {
                return Err(VerifyError::NotOrthonormal {
                    row: i,
                    col: j,
                    value: format!("{:.3e}{:+.3e}i", g.re, g.im),
                    deviation,
                });
            }
        }
    }
    Ok(())
}

fn common_shape(family: &[DMatrix<Complex64>]) -> Result<(usize, usize), VerifyError> {
    let first = family
        .first()
        .ok_or_else(|| VerifyError::Unsupported("empty family".into()))?;
    let shape = first.shape();
    if family.iter().any(|m| m.shape() != shape) {
        return Err(VerifyError::Unsupported(
            "family members have different shapes".into(),
        ));
    }
    Ok(shape)
}

fn odd_width(w: usize) -> Result<usize, VerifyError> {
    if w % 2 == 1 {
        Ok(w / 2)
    } else {
        Err(VerifyError::Unsupported(format!(
            "coefficient width {w} is not of the form 2B+1"
        )))
    }
}

/// `∫ Tr U³ ≤ K(α) Σ ‖(i d/dx − a) ψ_n‖²` with `U(x) = Σ ψ_n(x) ψ_n(x)*`.
///
/// Each `ψ_n` is a `(2B+1) × M` matrix of coefficients in the orthonormal
/// basis `e^{ikεx}/√L`, `k = −B..=B`, one column per component.
pub fn check_orthonormal(
    family: &[DMatrix<Complex64>],
    a: &MagneticPotential1D,
) -> Result<LTVerdict, VerifyError> {
    let (width, m) = common_shape(family)?;
    let b = odd_width(width)?;
    check_gram(family)?;
    let period = a.period();
    let eps = a.eps();
    let norm = 1.0 / period.sqrt();

    // U³ has bandwidth 6B
    let n = quad_points(6 * b, 64);
    let values: Vec<Vec<Vec<Complex64>>> = family
        .iter()
        .map(|c| {
            (0..m)
                .map(|comp| synthesize(|i| c[(i, comp)] * norm, b, n))
                .collect()
        })
        .collect();
    let mut lhs = 0.0;
    for j in 0..n {
        let u = DMatrix::from_fn(m, m, |r, s| {
            values
                .iter()
                .map(|psi| psi[r][j] * psi[s][j].conj())
                .sum::<Complex64>()
        });
        lhs += (&u * &u * &u).trace().re;
    }
    lhs *= period / n as f64;

    let alpha = a.flux();
    let kinetic = if a.is_constant() {
        let q = alpha.value();
        family
            .iter()
            .map(|c| {
                let mut t = 0.0;
                for i in 0..width {
                    let p = eps * (i as f64 - b as f64 + q);
                    t += p * p * (0..m).map(|comp| c[(i, comp)].norm_sqr()).sum::<f64>();
                }
                t
            })
            .sum()
    } else {
        // |(i d/dx − a)ψ|² has bandwidth 2(B + B_a)
        let nk = quad_points(2 * (b + a.bandwidth()), 64);
        let avals: Vec<f64> = (0..nk)
            .map(|j| a.value_at(j as f64 * period / nk as f64))
            .collect();
        let mut t = 0.0;
        for c in family {
            for comp in 0..m {
                let psi = synthesize(|i| c[(i, comp)] * norm, b, nk);
                let dpsi = synthesize(
                    |i| c[(i, comp)] * norm * (-(i as f64 - b as f64) * eps),
                    b,
                    nk,
                );
                t += dpsi
                    .iter()
                    .zip(&psi)
                    .zip(&avals)
                    .map(|((d, p), av)| (d - p * av).norm_sqr())
                    .sum::<f64>();
            }
        }
        t * period / nk as f64
    };
    let constant = k_min(alpha)?;
    let meta = VerdictMeta {
        check: "orthonormal".into(),
        gamma: None,
        d: 1,
        fluxes: vec![alpha.value()],
        basis_size: width * m,
        constant,
        seed: None,
    };
    Ok(LTVerdict::new(lhs, constant * kinetic, meta))
}

/// `(π/6) √(K(α₁) K(α₂))`.
pub fn duality_constant_2d(fluxes: [Flux; 2]) -> Result<f64, VerifyError> {
    Ok(PI / 6.0 * (k_min(fluxes[0])? * k_min(fluxes[1])?).sqrt())
}

/// Row-major grid values of `Σ c[k₁,k₂] e^{i(k₁ε₁x₁+k₂ε₂x₂)}`.
fn synthesize_2d(c: &DMatrix<Complex64>, b: [usize; 2], n: [usize; 2]) -> Vec<Complex64> {
    // transform along axis 2 for each k₁, then along axis 1
    let rows: Vec<Vec<Complex64>> = (0..2 * b[0] + 1)
        .map(|i| synthesize(|j| c[(i, j)], b[1], n[1]))
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n[0] * n[1]];
    for x2 in 0..n[1] {
        let col = synthesize(|i| rows[i][x2], b[0], n[0]);
        for (x1, v) in col.into_iter().enumerate() {
            out[x1 * n[1] + x2] = v;
        }
    }
    out
}

/// `∫ ρ² ≤ (π/6) √(K(α₁)K(α₂)) Σ ‖(i∇ − A)ψ_n‖²` on a 2D torus with
/// `A = (a₁(x₁), a₂(x₂))`.
///
/// Each `ψ_n` is a `(2B₁+1) × (2B₂+1)` coefficient matrix in the basis
/// `e^{i(k₁ε₁x₁ + k₂ε₂x₂)}/√(L₁L₂)`.
pub fn check_duality_2d(
    family: &[DMatrix<Complex64>],
    a: [&MagneticPotential1D; 2],
) -> Result<LTVerdict, VerifyError> {
    let (w1, w2) = common_shape(family)?;
    let b = [odd_width(w1)?, odd_width(w2)?];
    check_gram(family)?;
    let periods = [a[0].period(), a[1].period()];
    let eps = [a[0].eps(), a[1].eps()];
    let area = periods[0] * periods[1];
    let norm = 1.0 / area.sqrt();

    // ρ² has bandwidth 4B_j per axis
    let n = [quad_points(4 * b[0], 32), quad_points(4 * b[1], 32)];
    let mut rho = vec![0.0; n[0] * n[1]];
    for c in family {
        for (r, v) in rho.iter_mut().zip(synthesize_2d(c, b, n)) {
            *r += v.norm_sqr() * norm * norm;
        }
    }
    let lhs = rho.iter().map(|r| r * r).sum::<f64>() * area / (n[0] * n[1]) as f64;

    let fluxes = [a[0].flux(), a[1].flux()];
    let kinetic = if a[0].is_constant() && a[1].is_constant() {
        family
            .iter()
            .map(|c| {
                let mut t = 0.0;
                for i in 0..w1 {
                    let p1 = eps[0] * (i as f64 - b[0] as f64 + fluxes[0].value());
                    for j in 0..w2 {
                        let p2 = eps[1] * (j as f64 - b[1] as f64 + fluxes[1].value());
                        t += (p1 * p1 + p2 * p2) * c[(i, j)].norm_sqr();
                    }
                }
                t
            })
            .sum()
    } else {
        let nk = [
            quad_points(2 * (b[0] + a[0].bandwidth()), 32),
            quad_points(2 * (b[1] + a[1].bandwidth()), 32),
        ];
        let av: Vec<Vec<f64>> = (0..2)
            .map(|ax| {
                (0..nk[ax])
                    .map(|j| a[ax].value_at(j as f64 * periods[ax] / nk[ax] as f64))
                    .collect()
            })
            .collect();
        let mut t = 0.0;
        for c in family {
            let psi = synthesize_2d(c, b, nk);
            let d1 = DMatrix::from_fn(w1, w2, |i, j| {
                c[(i, j)] * (-(i as f64 - b[0] as f64) * eps[0])
            });
            let d2 = DMatrix::from_fn(w1, w2, |i, j| {
                c[(i, j)] * (-(j as f64 - b[1] as f64) * eps[1])
            });
            let g1 = synthesize_2d(&d1, b, nk);
            let g2 = synthesize_2d(&d2, b, nk);
            for x1 in 0..nk[0] {
                for x2 in 0..nk[1] {
                    let idx = x1 * nk[1] + x2;
                    t += (g1[idx] - psi[idx] * av[0][x1]).norm_sqr()
                        + (g2[idx] - psi[idx] * av[1][x2]).norm_sqr();
                }
            }
        }
        t * norm * norm * area / (nk[0] * nk[1]) as f64
    };
    let constant = duality_constant_2d(fluxes)?;
    let meta = VerdictMeta {
        check: "duality_2d".into(),
        gamma: None,
        d: 2,
        fluxes: fluxes.iter().map(|f| f.value()).collect(),
        basis_size: w1 * w2,
        constant,
        seed: None,
    };
    Ok(LTVerdict::new(lhs, constant * kinetic, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_orthonormal_family_1d, random_potential_1d, rng_for};
    use crate::spectrum::eigenpairs_of;

    fn half() -> Flux {
        Flux::new(0.5).unwrap()
    }

    fn circle() -> TorusGeometry {
        TorusGeometry::circle(2.0 * PI).unwrap()
    }

    #[test]
    fn verdict_ratio_rules() {
        let meta = VerdictMeta {
            check: "t".into(),
            gamma: None,
            d: 1,
            fluxes: vec![0.5],
            basis_size: 1,
            constant: 1.0,
            seed: None,
        };
        let zero = LTVerdict::new(0.0, 0.0, meta.clone());
        assert_eq!(zero.ratio, 0.0);
        assert!(zero.holds);
        let inf = LTVerdict::new(1.0, 0.0, meta.clone());
        assert!(inf.ratio.is_infinite() && !inf.holds);
        assert!(LTVerdict::new(1.0 + 1e-9, 1.0, meta.clone()).holds);
        assert!(!LTVerdict::new(1.0 + 1e-7, 1.0, meta).holds);
    }

    #[test]
    fn zero_potential() {
        let v = ScalarPotential::OneD(Potential1D::zero());
        let r = check_gamma_moments(&circle(), &[half()], &v, 1.0, &[8]).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (0.0, 0.0, true));
    }

    #[test]
    fn constant_potential_lattice_sum() {
        let v = ScalarPotential::OneD(Potential1D::constant(1.0));
        let r = check_gamma_moments(&circle(), &[half()], &v, 1.0, &[16]).unwrap();
        assert!((r.lhs - 1.5).abs() < 1e-12);
        assert!((r.rhs - 2.2714).abs() < 1e-3);
        assert!(r.holds);
    }

    #[test]
    fn three_halves_moment() {
        let v = PotentialMatrix1D::from_scalar(&Potential1D::constant(1.0));
        let r = check_1d_gamma(&circle(), half(), &v, 1.5, 16).unwrap();
        assert!((r.lhs - 2.0 * 0.75f64.powf(1.5)).abs() < 1e-12);
        let expected = PI / 3f64.sqrt() * 0.881_930_5f64.sqrt() * 3.0 / 16.0 * 2.0 * PI;
        assert!((r.rhs - expected).abs() < 1e-5);
    }

    #[test]
    fn rejects_negative_potential() {
        let v = ScalarPotential::OneD(Potential1D::constant(1.0).shifted(-2.0));
        assert!(matches!(
            check_gamma_moments(&circle(), &[half()], &v, 1.0, &[8]),
            Err(VerifyError::NegativePotential { .. })
        ));
        let v = ScalarPotential::OneD(Potential1D::constant(1.0));
        assert!(matches!(
            check_gamma_moments(&circle(), &[half()], &v, 0.5, &[8]),
            Err(VerifyError::Gamma(_))
        ));
    }

    #[test]
    fn matrix_routes_agree() {
        let v = PotentialMatrix1D::from_scalar(&Potential1D::constant(3.0));
        let a = check_negative_trace_matrix(&circle(), half(), &v, 16).unwrap();
        let b = check_1d_gamma(&circle(), half(), &v, 1.0, 16).unwrap();
        assert!((a.rhs - b.rhs).abs() <= 1e-12 * a.rhs);
        assert_eq!(a.lhs, b.lhs);
    }

    #[test]
    fn block_doubling() {
        let s = Potential1D::constant(2.0);
        let one =
            check_negative_trace_matrix(&circle(), half(), &PotentialMatrix1D::from_scalar(&s), 16)
                .unwrap();
        let two = check_negative_trace_matrix(
            &circle(),
            half(),
            &PotentialMatrix1D::diagonal(&[s.clone(), s]),
            16,
        )
        .unwrap();
        assert!((two.lhs - 2.0 * one.lhs).abs() < 1e-10);
        assert!((two.rhs - 2.0 * one.rhs).abs() < 1e-10);
    }

    #[test]
    fn constant_function_closed_form() {
        let l = 2.0 * PI;
        let a = MagneticPotential1D::from_flux(half(), l).unwrap();
        let psi = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        let r = check_orthonormal(&[psi], &a).unwrap();
        assert!((r.lhs - 1.0 / (l * l)).abs() < 1e-14);
        let k = k_min(half()).unwrap();
        assert!((r.rhs - k * 0.25).abs() < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn rejects_non_orthonormal_family() {
        let a = MagneticPotential1D::from_flux(half(), 2.0 * PI).unwrap();
        let psi = DMatrix::from_element(3, 1, Complex64::new(0.5, 0.0));
        let err = check_orthonormal(&[psi], &a).unwrap_err();
        assert!(matches!(
            err,
            VerifyError::NotOrthonormal { row: 0, col: 0, .. }
        ));
    }

    #[test]
    fn grid_kinetic_matches_exact_for_constant_samples() {
        // a sampled potential with zero oscillation uses the grid route
        let l = 2.0 * PI;
        let mut rng = rng_for(2);
        let fam = random_orthonormal_family_1d(&mut rng, 3, 4, 1);
        let exact =
            check_orthonormal(&fam, &MagneticPotential1D::constant(0.3, l).unwrap()).unwrap();
        let grid = check_orthonormal(
            &fam,
            &MagneticPotential1D::sampled(vec![0.3; 8], l).unwrap(),
        )
        .unwrap();
        assert!((exact.rhs - grid.rhs).abs() < 1e-10 * exact.rhs);
    }

    #[test]
    fn eigenfunctions_satisfy_dual_bound() {
        let mut rng = rng_for(17);
        let v = random_potential_1d(&mut rng, 6, 40.0);
        let g = circle();
        let n = 24;
        let op = assemble_1d(n, &g, half(), &v).unwrap();
        let pairs = eigenpairs_of(&op).unwrap();
        let count = pairs.spectrum.negative_count().max(1);
        let fam: Vec<_> = (0..count)
            .map(|c| DMatrix::from_fn(2 * n + 1, 1, |i, _| pairs.vectors[(i, c)]))
            .collect();
        let a = MagneticPotential1D::from_flux(half(), g.periods()[0]).unwrap();
        assert!(check_orthonormal(&fam, &a).unwrap().holds);
        let sv = ScalarPotential::OneD(v);
        assert!(
            check_gamma_moments(&g, &[half()], &sv, 1.0, &[n])
                .unwrap()
                .holds
        );
    }

    #[test]
    fn duality_constant_function() {
        let l = 2.0 * PI;
        let a = MagneticPotential1D::from_flux(half(), l).unwrap();
        let psi = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        let r = check_duality_2d(&[psi], [&a, &a]).unwrap();
        assert!((r.lhs - 1.0 / (l * l)).abs() < 1e-14);
        let k = k_min(half()).unwrap();
        assert!((r.rhs - PI / 6.0 * k * 0.5).abs() < 1e-12);
    }

    #[test]
    fn duality_prefactor_matches_torus_constant() {
        let f = [Flux::new(0.3).unwrap(), Flux::new(0.45).unwrap()];
        let dual = duality_constant_2d(f).unwrap();
        let primal = torus_lt_constant(1.0, &f).unwrap();
        assert!((dual - 4.0 * primal).abs() <= 1e-12 * dual);
    }
}
