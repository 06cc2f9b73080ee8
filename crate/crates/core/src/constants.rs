//! Flux-dependent constants of the magnetic Lieb–Thirring inequalities.
//!
//! `K₁(α) = k(α)²` comes from the sharp magnetic interpolation constant,
//! `K₂(α)` from the supremum over `b ≥ 0` of
//! `F(b, α) = b^{5/3} Σ_k (|k + α|³ + b)^{-2}`. The 1D constant is bounded by
//! `K(α) = min(K₁, K₂)`, and the torus constant for `d` axes is
//! `(π/√3)^d · L^cl_{γ,d} · Π √K(α_j)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::ConstantsError;
use crate::numerics::{
    self, golden_section_max, lattice_sum, lattice_sum_midpoint, maximize_halfline, MaxResult,
    SeriesResult, DEFAULT_GRID_HI, DEFAULT_GRID_LO, DEFAULT_MAX_TOL, DEFAULT_POINTS_PER_DECADE,
    DEFAULT_SERIES_TOL,
};

/// Minimal distance from an integer accepted for a flux.
pub const INTEGER_FLUX_GAP: f64 = 1e-9;

/// `lim_{b→∞} F(b, α) = 2∫_0^∞ (x³+1)^{-2} dx = 8√3π/27`.
pub fn f_limit() -> f64 {
    8.0 * 3f64.sqrt() * PI / 27.0
}

/// `5/(3√3π)`, the factor turning `sup F` squared into `K₂`.
pub fn k2_prefactor() -> f64 {
    5.0 / (3.0 * 3f64.sqrt() * PI)
}

/// Lower bound `K₂(α) ≥ 320π/3^{13/2}` obtained from the `b → ∞` limit.
pub fn k2_lower_bound() -> f64 {
    320.0 * PI / 3f64.powf(6.5)
}

/// A magnetic flux, i.e. a real number at distance more than `1e-9` from ℤ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Flux(f64);

impl Flux {
    pub fn new(alpha: f64) -> Result<Self, ConstantsError> {
        if !alpha.is_finite() {
            return Err(ConstantsError::NonFiniteFlux(alpha));
        }
        if (alpha - alpha.round()).abs() <= INTEGER_FLUX_GAP {
            return Err(ConstantsError::IntegerFlux(alpha));
        }
        Ok(Flux(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `α mod 1` in `(0, 1)`.
    pub fn fractional(self) -> f64 {
        self.0.rem_euclid(1.0)
    }

    pub fn distance_to_integer(self) -> f64 {
        numerics::reduced_offset(self.0)
    }
}

impl TryFrom<f64> for Flux {
    type Error = ConstantsError;

    fn try_from(alpha: f64) -> Result<Self, Self::Error> {
        Flux::new(alpha)
    }
}

/// Sharp constant of the 1D magnetic interpolation inequality.
pub fn k_alpha(alpha: Flux) -> f64 {
    let a = alpha.fractional();
    if (0.25..=0.75).contains(&a) {
        1.0
    } else {
        1.0 / (2.0 * PI * a).sin().abs()
    }
}

pub fn k1(alpha: Flux) -> f64 {
    k_alpha(alpha).powi(2)
}

/// `F(b, α)` with absolute accuracy `tol`.
pub fn f_of_b(b: f64, alpha: Flux, tol: f64) -> Result<f64, ConstantsError> {
    f_of_b_raw(b, alpha.value(), tol)
}

/// `F(b, α)` for any real `α`, integers included.
pub fn f_of_b_raw(b: f64, alpha: f64, tol: f64) -> Result<f64, ConstantsError> {
    if !(b >= 0.0) {
        return Err(ConstantsError::Domain(format!(
            "F(b, α) needs b ≥ 0, got {b}"
        )));
    }
    if b == 0.0 {
        return Ok(0.0);
    }
    let scale = b.powf(5.0 / 3.0);
    let s = lattice_sum(
        |r| {
            let d = r * r * r + b;
            1.0 / (d * d)
        },
        alpha,
        6.0,
        tol / scale,
    )?;
    Ok(scale * s.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct K2Result {
    pub k2: f64,
    /// Maximizer of `F(·, α)`; infinite when the supremum is the `b → ∞` limit.
    pub b_star: f64,
    pub sup_f: f64,
    pub at_infinity: bool,
}

/// Search window and tolerances for `sup_b F(b, α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupSearch {
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub points_per_decade: usize,
    pub max_tol: f64,
    pub series_tol: f64,
}

impl Default for SupSearch {
    fn default() -> Self {
        SupSearch {
            grid_lo: DEFAULT_GRID_LO,
            grid_hi: DEFAULT_GRID_HI,
            points_per_decade: DEFAULT_POINTS_PER_DECADE,
            max_tol: DEFAULT_MAX_TOL,
            series_tol: DEFAULT_SERIES_TOL,
        }
    }
}

/// `sup_{b ≥ 0} F(b, α)`.
///
/// For small `α` the maximizer sits near `5α³`, so the lower grid edge is
/// pushed below `10⁻²·dist(α, ℤ)³` when that is smaller than the default.
pub fn sup_f(alpha: Flux, search: &SupSearch) -> Result<MaxResult, ConstantsError> {
    let delta = alpha.distance_to_integer();
    let lo = search.grid_lo.min(1e-2 * delta.powi(3));
    let tol = search.series_tol;
    // series failures are re-raised after the search; the objective itself must be total
    let failure = std::sync::Mutex::new(None);
    let objective = |b: f64| match f_of_b(b, alpha, tol) {
        Ok(v) => v,
        Err(e) => {
            failure.lock().unwrap().get_or_insert(e);
            f64::NAN
        }
    };
    let m = maximize_halfline(
        objective,
        f_limit(),
        lo,
        search.grid_hi,
        search.points_per_decade,
        search.max_tol,
    )?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(m)
}

pub fn k2(alpha: Flux) -> Result<K2Result, ConstantsError> {
    k2_with(alpha, &SupSearch::default())
}

pub fn k2_with(alpha: Flux, search: &SupSearch) -> Result<K2Result, ConstantsError> {
    let m = sup_f(alpha, search)?;
    Ok(K2Result {
        k2: k2_prefactor() * m.max_value * m.max_value,
        b_star: m.argmax,
        sup_f: m.max_value,
        at_infinity: m.at_infinity,
    })
}

/// All constants for one flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub alpha: f64,
    pub k_alpha: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "A_alpha")]
    pub a_alpha: f64,
    pub b_star: f64,
    #[serde(rename = "sup_F")]
    pub sup_f: f64,
    pub sup_at_infinity: bool,
}

pub fn k_best(alpha: Flux) -> Result<ConstantsReport, ConstantsError> {
    let k_a = k_alpha(alpha);
    let k1 = k_a * k_a;
    let r = k2(alpha)?;
    Ok(ConstantsReport {
        alpha: alpha.value(),
        k_alpha: k_a,
        k1,
        k2: r.k2,
        k: k1.min(r.k2),
        a_alpha: r.sup_f / a_alpha_denominator(),
        b_star: r.b_star,
        sup_f: r.sup_f,
        sup_at_infinity: r.at_infinity,
    })
}

/// `K(α) = min(K₁(α), K₂(α))`.
pub fn k_min(alpha: Flux) -> Result<f64, ConstantsError> {
    Ok(k1(alpha).min(k2(alpha)?.k2))
}

/// Reports for many fluxes, computed in parallel, returned in input order.
pub fn scan(alphas: &[f64]) -> Vec<Result<ConstantsReport, ConstantsError>> {
    alphas
        .par_iter()
        .map(|&a| Flux::new(a).and_then(k_best))
        .collect()
}

fn a_alpha_denominator() -> f64 {
    3f64.powf(1.25) * PI.sqrt()
}

/// `A(α) = sup_b F(b, α) / (3^{5/4} π^{1/2})`; satisfies `K₂ = 15 A²`.
pub fn a_alpha(alpha: Flux) -> Result<f64, ConstantsError> {
    Ok(sup_f(alpha, &SupSearch::default())?.max_value / a_alpha_denominator())
}

fn check_beta(beta: f64) -> Result<(), ConstantsError> {
    if beta > 1.0 {
        Ok(())
    } else {
        Err(ConstantsError::Domain(format!(
            "β must exceed 1, got {beta}"
        )))
    }
}

/// `μ(β) = ((β-1)/β · (π/β)/sin(π/β))^β`.
pub fn mu(beta: f64) -> Result<f64, ConstantsError> {
    check_beta(beta)?;
    let x = PI / beta;
    Ok(((beta - 1.0) / beta * x / x.sin()).powf(beta))
}

/// `f(t) = 1/(1 + μ t^β)`, normalized so that `∫_0^∞ f² = 1`.
pub fn frank_nam_f(t: f64, beta: f64) -> Result<f64, ConstantsError> {
    if !(t >= 0.0) {
        return Err(ConstantsError::Domain(format!("f(t) needs t ≥ 0, got {t}")));
    }
    Ok(1.0 / (1.0 + mu(beta)? * t.powf(beta)))
}

/// `∫_0^∞ f(t)² dt`: adaptive quadrature on `[0, 10⁶]` plus the leading
/// `t^{-2β}` tail in closed form. Returns `(value, error_estimate)`.
pub fn frank_nam_norm(beta: f64) -> Result<(f64, f64), ConstantsError> {
    let m = mu(beta)?;
    let f2 = |t: f64| (1.0 + m * t.powf(beta)).powi(-2);
    let cut = 1e6_f64;
    let mut total = 0.0;
    let mut err = 0.0;
    let mut lo = 0.0;
    for hi in [1.0, 10.0, 100.0, 1e3, 1e4, 1e5, cut] {
        let (v, e) = numerics::integrate_adaptive(f2, lo, hi, 1e-13);
        total += v;
        err += e;
        lo = hi;
    }
    // f² ≤ μ^{-2} t^{-2β} on the tail
    let tail = cut.powf(1.0 - 2.0 * beta) / (m * m * (2.0 * beta - 1.0));
    Ok((total + tail, err + tail))
}

/// Semiclassical constant `Γ(γ+1) / (2^d π^{d/2} Γ(γ+d/2+1))`.
pub fn l_cl(gamma: f64, d: u32) -> f64 {
    let d_f = d as f64;
    numerics::gamma(gamma + 1.0)
        / (2f64.powi(d as i32) * PI.powf(d_f / 2.0) * numerics::gamma(gamma + d_f / 2.0 + 1.0))
}

/// `(π/√3)^d · L^cl_{γ,d} · Π_j √K(α_j)`.
pub fn torus_lt_constant(gamma: f64, fluxes: &[Flux]) -> Result<f64, ConstantsError> {
    if !(gamma >= 1.0) {
        return Err(ConstantsError::Domain(format!(
            "γ must be at least 1, got {gamma}"
        )));
    }
    if fluxes.is_empty() {
        return Err(ConstantsError::Domain(
            "at least one flux is required".into(),
        ));
    }
    let d = fluxes.len() as u32;
    let mut c = (PI / 3f64.sqrt()).powi(d as i32) * l_cl(gamma, d);
    for &a in fluxes {
        c *= k_min(a)?.sqrt();
    }
    Ok(c)
}

/// `sinh φ / (cosh φ - cos 2πα)`, evaluated without overflow or cancellation
/// as `(1 - e^{-2φ}) / ((1 - e^{-φ})² + 4 sin²(πα) e^{-φ})`.
pub fn green_ratio(phi: f64, alpha: f64) -> f64 {
    let s = (PI * alpha).sin();
    let e1 = (-phi).exp_m1();
    -(-2.0 * phi).exp_m1() / (e1 * e1 + 4.0 * s * s * (-phi).exp())
}

/// `sup_{φ>0} sinh φ / (cosh φ - cos 2πα)`, found numerically.
pub fn interpolation_constant_numeric(alpha: Flux) -> Result<MaxResult, ConstantsError> {
    let a = alpha.value();
    Ok(maximize_halfline(
        |phi| green_ratio(phi, a),
        1.0,
        DEFAULT_GRID_LO,
        DEFAULT_GRID_HI,
        DEFAULT_POINTS_PER_DECADE,
        1e-10,
    )?)
}

/// Diagonal of the magnetic Green's function of `(i d/dx - αε)² + λ` on a
/// circle of length `2π/ε`, by both routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenDiag {
    pub series: SeriesResult,
    pub closed: f64,
}

fn check_green_args(lambda: f64, eps: f64) -> Result<(), ConstantsError> {
    if lambda > 0.0 && eps > 0.0 && lambda.is_finite() && eps.is_finite() {
        Ok(())
    } else {
        Err(ConstantsError::Domain(format!(
            "need λ > 0 and ε > 0, got λ={lambda}, ε={eps}"
        )))
    }
}

/// `(ε/2π) Σ_n 1/(ε²(n+α)² + λ)` with absolute accuracy `tol`.
pub fn green_diag_series(
    lambda: f64,
    eps: f64,
    alpha: Flux,
    tol: f64,
) -> Result<SeriesResult, ConstantsError> {
    check_green_args(lambda, eps)?;
    let e2 = eps * eps;
    let sl = lambda.sqrt();
    let g = |r: f64| 1.0 / (e2 * r * r + lambda);
    let integral = |x: f64| (sl / (eps * x)).atan() / (eps * sl);
    let midpoint_error = |x: f64| {
        let d = e2 * x * x + lambda;
        ((6.0 * e2 * e2 * x * x - 2.0 * e2 * lambda) / d.powi(3) + 2.0 * e2 * x / (d * d)) / 24.0
    };
    let pref = eps / (2.0 * PI);
    // midpoint bound needs ε²x² ≥ λ on the tail
    let min_k = (sl / eps).ceil() as usize + 1;
    let s = lattice_sum_midpoint(
        g,
        integral,
        midpoint_error,
        alpha.value(),
        min_k,
        tol / pref,
    )?;
    Ok(SeriesResult {
        value: pref * s.value,
        tail_bound: pref * s.tail_bound,
        terms_used: s.terms_used,
    })
}

/// `(1/(2√λ)) sinh(2π√λ/ε) / (cosh(2π√λ/ε) - cos 2πα)`.
pub fn green_diag_closed(lambda: f64, eps: f64, alpha: Flux) -> Result<f64, ConstantsError> {
    check_green_args(lambda, eps)?;
    let sl = lambda.sqrt();
    Ok(green_ratio(2.0 * PI * sl / eps, alpha.value()) / (2.0 * sl))
}

pub fn green_diag(lambda: f64, eps: f64, alpha: Flux) -> Result<GreenDiag, ConstantsError> {
    Ok(GreenDiag {
        series: green_diag_series(lambda, eps, alpha, 1e-13)?,
        closed: green_diag_closed(lambda, eps, alpha)?,
    })
}

fn bisect<F: Fn(f64) -> Result<f64, ConstantsError>>(
    g: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<f64, ConstantsError> {
    let mut ga = g(a)?;
    let gb = g(b)?;
    if ga.signum() == gb.signum() {
        return Err(ConstantsError::Domain(format!(
            "no sign change on [{a}, {b}]"
        )));
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        let gm = g(m)?;
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Points where `K₁(α) = K₂(α)`, one in each half of the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossover {
    pub alpha_left: f64,
    pub alpha_right: f64,
}

/// Locates `K₁ = K₂` by bisection on `[0.05, 0.45]` and on its mirror image.
pub fn crossover(tol: f64) -> Result<Crossover, ConstantsError> {
    let g = |a: f64| {
        let f = Flux::new(a)?;
        Ok(k1(f) - k2(f)?.k2)
    };
    Ok(Crossover {
        alpha_left: bisect(g, 0.05, 0.45, tol)?,
        alpha_right: bisect(g, 0.55, 0.95, tol)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct K2Minimum {
    pub alpha: f64,
    pub k2: f64,
}

/// Minimum of `K₂` over `(0, 1/2]`: a `points`-point scan of `[0.1, 0.5]`
/// followed by golden section around the best scan point.
pub fn k2_minimum(points: usize) -> Result<K2Minimum, ConstantsError> {
    let points = points.max(3);
    let alphas: Vec<f64> = (0..points)
        .map(|i| 0.1 + 0.4 * i as f64 / (points - 1) as f64)
        .collect();
    let values: Vec<f64> = alphas
        .par_iter()
        .map(|&a| Ok(k2(Flux::new(a)?)?.k2))
        .collect::<Result<_, ConstantsError>>()?;
    let best = (0..points)
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .unwrap();
    let lo = alphas[best.saturating_sub(1)];
    let hi = alphas[(best + 1).min(points - 1)];
    let failure = std::sync::Mutex::new(None);
    let neg_k2 = |a: f64| match Flux::new(a).and_then(k2) {
        Ok(r) => -r.k2,
        Err(e) => {
            failure.lock().unwrap().get_or_insert(e);
            f64::NAN
        }
    };
    let (alpha, neg) = golden_section_max(neg_k2, lo, hi, 1e-7);
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    if values[best] < -neg {
        return Ok(K2Minimum {
            alpha: alphas[best],
            k2: values[best],
        });
    }
    Ok(K2Minimum { alpha, k2: -neg })
}
