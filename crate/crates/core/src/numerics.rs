//! Shared low-level numerics.
//!
//! Symmetric lattice series over `k ∈ ℤ` whose terms depend only on the
//! distance `r = |k + α|`, one-dimensional maximization on the half-line
//! (log-grid scan followed by golden-section refinement), adaptive
//! Gauss–Kronrod quadrature and an exact-at-half-integers Gamma function.

use std::f64::consts::PI;

use crate::error::NumericsError;

/// Default absolute tolerance for lattice series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-10;
/// Default relative tolerance (in the abscissa) for half-line maximization.
pub const DEFAULT_MAX_TOL: f64 = 1e-8;
pub const DEFAULT_GRID_LO: f64 = 1e-8;
pub const DEFAULT_GRID_HI: f64 = 1e8;
pub const DEFAULT_POINTS_PER_DECADE: usize = 20;

const MAX_TRUNCATION: usize = 1 << 28;
/// Number of local grid maxima that get a golden-section refinement.
const REFINED_PEAKS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    /// Absolute bound on the discarded tail.
    pub tail_bound: f64,
    pub terms_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxResult {
    /// Abscissa of the maximum; `f64::INFINITY` when the limit wins.
    pub argmax: f64,
    pub max_value: f64,
    pub at_infinity: bool,
}

/// Reduces a flux to its representative in `[0, 1/2]`.
///
/// The multiset `{|k + α| : k ∈ ℤ}` is `{a + j} ∪ {1 - a + j}` over `j ≥ 0`
/// with `a` this representative, so sums over it are exactly invariant under
/// `α → α + 1` and `α → -α`.
pub fn reduced_offset(alpha: f64) -> f64 {
    let a = alpha.rem_euclid(1.0);
    a.min(1.0 - a)
}

/// Both families of lattice distances, summed for `j = 0..=k_max`, smallest
/// terms first.
fn partial_sum<F: Fn(f64) -> f64>(term: &F, offset: f64, k_max: usize) -> f64 {
    let mut acc = 0.0;
    for j in (0..=k_max).rev() {
        let j = j as f64;
        acc += term(offset + j) + term(1.0 - offset + j);
    }
    acc
}

/// Largest sampled value of `r^p · term(r)` over `r = r0 · 2^i`.
///
/// For terms with `r^p · term(r)` monotone beyond `r0` this is the exact
/// envelope constant (the supremum is either the first or the last sample).
fn envelope_constant<F: Fn(f64) -> f64>(term: &F, r0: f64, p: f64) -> f64 {
    let mut c: f64 = 0.0;
    let mut r = r0;
    for _ in 0..=64 {
        c = c.max(r.powf(p) * term(r).abs());
        r *= 2.0;
    }
    c
}

/// Bound on the terms discarded when both families are cut after `j = k_max`.
///
/// Each family's omitted distances satisfy `r_j ≥ k_max + 1 + j`, so with
/// `term(r) ≤ C r^{-p}` the family tail is at most
/// `C R^{-p} + C R^{1-p}/(p-1)` with `R = k_max + 1`.
fn power_tail_bound<F: Fn(f64) -> f64>(term: &F, k_max: usize, p: f64) -> f64 {
    let r = k_max as f64 + 1.0;
    let c = envelope_constant(term, r, p);
    2.0 * c * r.powf(-p) * (1.0 + r / (p - 1.0))
}

/// Sums `Σ_{k∈ℤ} term(|k + α|)` for terms decaying like `|k|^{-tail_exponent}`.
///
/// The truncation is chosen as the smallest `K` (found by doubling and then
/// bisection) whose integral-comparison tail bound is at most `tol`.
pub fn lattice_sum<F>(
    term: F,
    alpha: f64,
    tail_exponent: f64,
    tol: f64,
) -> Result<SeriesResult, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(tail_exponent > 1.0) {
        return Err(NumericsError::DivergentTail(tail_exponent));
    }
    if !(tol > 0.0) {
        return Err(NumericsError::NonPositiveTolerance(tol));
    }
    let offset = reduced_offset(alpha);
    let bound = |k: usize| power_tail_bound(&term, k, tail_exponent);

    let mut hi = 16usize;
    let mut hi_bound = bound(hi);
    if !hi_bound.is_finite() {
        return Err(NumericsError::NonFiniteTerm);
    }
    while hi_bound > tol {
        if hi >= MAX_TRUNCATION {
            return Err(NumericsError::NotConverged {
                truncation: hi,
                bound: hi_bound,
            });
        }
        hi *= 2;
        hi_bound = bound(hi);
    }
    let mut lo = hi / 2;
    if hi > 16 {
        while hi - lo > 1 + hi / 64 {
            let mid = lo + (hi - lo) / 2;
            let b = bound(mid);
            if b <= tol {
                hi = mid;
                hi_bound = b;
            } else {
                lo = mid;
            }
        }
    }
    let value = partial_sum(&term, offset, hi);
    if !value.is_finite() {
        return Err(NumericsError::NonFiniteTerm);
    }
    Ok(SeriesResult {
        value,
        tail_bound: hi_bound,
        terms_used: 2 * (hi + 1),
    })
}

/// Lattice sum with an analytic midpoint tail.
///
/// For slowly decaying terms (e.g. `r^{-2}`) a plain truncation is far too
/// long. Each family's omitted terms `term(r_0 + j)` are replaced by
/// `tail_integral(r_0 - 1/2) = ∫_{r_0-1/2}^∞ term`; `midpoint_error(x)` must
/// bound the summed midpoint-rule error for a family whose first midpoint
/// cell starts at `x`. Both are only trusted for truncations at least
/// `min_truncation`.
pub fn lattice_sum_midpoint<F, I, E>(
    term: F,
    tail_integral: I,
    midpoint_error: E,
    alpha: f64,
    min_truncation: usize,
    tol: f64,
) -> Result<SeriesResult, NumericsError>
where
    F: Fn(f64) -> f64,
    I: Fn(f64) -> f64,
    E: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(NumericsError::NonPositiveTolerance(tol));
    }
    let offset = reduced_offset(alpha);
    let starts = |k: usize| {
        let k = k as f64;
        [offset + k + 1.0 - 0.5, 1.0 - offset + k + 1.0 - 0.5]
    };
    let mut k = min_truncation.max(16);
    loop {
        let [x0, x1] = starts(k);
        let err = midpoint_error(x0) + midpoint_error(x1);
        if err <= tol {
            let value = partial_sum(&term, offset, k) + tail_integral(x0) + tail_integral(x1);
            if !value.is_finite() {
                return Err(NumericsError::NonFiniteTerm);
            }
            return Ok(SeriesResult {
                value,
                tail_bound: err,
                terms_used: 2 * (k + 1),
            });
        }
        if k >= MAX_TRUNCATION {
            return Err(NumericsError::NotConverged {
                truncation: k,
                bound: err,
            });
        }
        k *= 2;
    }
}

/// Golden-section maximization of `f` on `[a, b]`; returns `(x, f(x))`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while (b - a).abs() > tol && iter < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Supremum of `objective` over `(0, ∞)` given its limit at infinity.
///
/// Scans a log-spaced grid on `[grid_lo, grid_hi]`, refines the brackets
/// around the best few local grid maxima by golden section in `ln x` to
/// relative tolerance `tol`, and compares the best refined value with
/// `limit_at_infinity`. Unimodality is not assumed.
pub fn maximize_halfline<F>(
    objective: F,
    limit_at_infinity: f64,
    grid_lo: f64,
    grid_hi: f64,
    points_per_decade: usize,
    tol: f64,
) -> Result<MaxResult, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(grid_lo > 0.0 && grid_hi > grid_lo) || points_per_decade == 0 {
        return Err(NumericsError::EmptyGrid {
            lo: grid_lo,
            hi: grid_hi,
            points_per_decade,
        });
    }
    if !(tol > 0.0) {
        return Err(NumericsError::NonPositiveTolerance(tol));
    }
    let (t_lo, t_hi) = (grid_lo.ln(), grid_hi.ln());
    let decades = (grid_hi / grid_lo).log10();
    let n = (decades * points_per_decade as f64).ceil() as usize + 1;
    let step = (t_hi - t_lo) / (n - 1) as f64;
    let ts: Vec<f64> = (0..n).map(|i| t_lo + step * i as f64).collect();
    let values: Vec<f64> = ts.iter().map(|&t| objective(t.exp())).collect();

    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let left = i == 0 || values[i] >= values[i - 1];
            let right = i + 1 == n || values[i] >= values[i + 1];
            left && right && values[i].is_finite()
        })
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    peaks.truncate(REFINED_PEAKS);

    let mut best_t = f64::NAN;
    let mut best = f64::NEG_INFINITY;
    for &i in &peaks {
        if values[i] > best {
            best = values[i];
            best_t = ts[i];
        }
        let a = ts[i.saturating_sub(1)];
        let b = ts[(i + 1).min(n - 1)];
        let (t, v) = golden_section_max(|t| objective(t.exp()), a, b, tol);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    if limit_at_infinity > best || best_t.is_nan() {
        Ok(MaxResult {
            argmax: f64::INFINITY,
            max_value: limit_at_infinity,
            at_infinity: true,
        })
    } else {
        Ok(MaxResult {
            argmax: best_t.exp(),
            max_value: best,
            at_infinity: false,
        })
    }
}

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod (G7/K15) quadrature of `f` over `[a, b]`.
///
/// Returns the estimate and the accumulated error estimate.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let mut stack = vec![(a, b, tol, 0u32)];
    let mut total = 0.0;
    let mut err_total = 0.0;
    while let Some((lo, hi, local_tol, depth)) = stack.pop() {
        let (value, err) = gauss_kronrod(&f, lo, hi);
        if err <= local_tol || depth >= 60 {
            total += value;
            err_total += err;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * local_tol, depth + 1));
            stack.push((mid, hi, 0.5 * local_tol, depth + 1));
        }
    }
    (total, err_total)
}

/// Gamma function. Positive integer and half-integer arguments use the
/// exact recursion `Γ(x+1) = xΓ(x)` from `Γ(1) = 1` or `Γ(1/2) = √π`.
pub fn gamma(x: f64) -> f64 {
    let twice = 2.0 * x;
    if x > 0.0 && twice == twice.round() && twice <= 340.0 {
        let (mut acc, mut arg) = if (twice as u64).is_multiple_of(2) {
            (1.0, 1.0)
        } else {
            (PI.sqrt(), 0.5)
        };
        while arg < x {
            acc *= arg;
            arg += 1.0;
        }
        acc
    } else {
        statrs::function::gamma::gamma(x)
    }
}

/// Evenly spaced samples `lo, lo + step, …` up to and including `hi`
/// (within half a step).
pub fn linspace_step(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 0.5).floor();
    if !(n >= 0.0) {
        return Vec::new();
    }
    (0..=n as usize).map(|i| lo + step * i as f64).collect()
}

pub fn logspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..points)
                .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
                .collect()
        }
    }
}
