#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use torus_lt::spectrum::eigenpairs;

/// Lowest `count` eigenvalues of `(i d/dx − a)² − V` on a circle of length
/// `period`, discretized on `n` uniform nodes with Peierls phases
/// `U_j = exp(i ∫_{x_j}^{x_{j+1}} a)` on the links.
pub fn finite_difference_eigenvalues(
    period: f64,
    n: usize,
    link_integral: impl Fn(f64, f64) -> f64,
    v: impl Fn(f64) -> f64,
    count: usize,
) -> Vec<f64> {
    let h = period / n as f64;
    let inv_h2 = 1.0 / (h * h);
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let x = j as f64 * h;
        m[(j, j)] = Complex64::new(2.0 * inv_h2 - v(x), 0.0);
        let next = (j + 1) % n;
        let u = Complex64::from_polar(1.0, link_integral(x, x + h));
        m[(j, next)] -= u * inv_h2;
        m[(next, j)] -= u.conj() * inv_h2;
    }
    let e = eigenpairs(&m).expect("finite-difference matrix is Hermitian");
    e.spectrum.eigenvalues[..count].to_vec()
}

/// `∫_x^y (α + cos s) ds` on a circle of length 2π.
pub fn cosine_link(alpha: f64) -> impl Fn(f64, f64) -> f64 {
    move |x, y| alpha * (y - x) + y.sin() - x.sin()
}

pub fn two_pi() -> f64 {
    2.0 * PI
}
