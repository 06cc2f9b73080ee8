//! Seeded random test instances: nonnegative trigonometric potentials
//! (squared moduli of random trigonometric polynomials, so `V ≥ 0` holds
//! exactly) and orthonormal Fourier families from QR factorizations.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator::{Potential1D, Potential2D, PotentialMatrix1D};

pub type TestRng = ChaCha8Rng;

pub fn rng_for(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// `V = |p|²` with `p` a random trigonometric polynomial of degree
/// `bandwidth / 2`, scaled so that `max V` is uniform in `(0, max_amplitude]`.
pub fn random_potential_1d<R: Rng>(
    rng: &mut R,
    bandwidth: usize,
    max_amplitude: f64,
) -> Potential1D {
    let h = (bandwidth / 2) as i64;
    let z: Vec<Complex64> = (-h..=h).map(|_| unit_complex(rng)).collect();
    let entries = (-2 * h..=2 * h).map(|m| {
        let mut acc = Complex64::new(0.0, 0.0);
        for l in -h..=h {
            let k = l + m;
            if k.abs() <= h {
                acc += z[(k + h) as usize] * z[(l + h) as usize].conj();
            }
        }
        (m, acc)
    });
    let v = Potential1D::from_fourier(entries).expect("|p|² is real");
    let (_, max) = v.extremes();
    let target = max_amplitude * rng.random_range(0.01..=1.0);
    v.scaled(target / max)
}

/// `V = P P†` with `P` a random `size × size` trigonometric polynomial of
/// degree `bandwidth / 2`, scaled so the largest eigenvalue is at most
/// `max_amplitude`.
pub fn random_psd_matrix_1d<R: Rng>(
    rng: &mut R,
    size: usize,
    bandwidth: usize,
    max_amplitude: f64,
) -> PotentialMatrix1D {
    let h = (bandwidth / 2) as i64;
    let z: Vec<DMatrix<Complex64>> = (-h..=h)
        .map(|_| DMatrix::from_fn(size, size, |_, _| unit_complex(rng)))
        .collect();
    let entries: Vec<(i64, DMatrix<Complex64>)> = (-2 * h..=2 * h)
        .map(|m| {
            let mut acc = DMatrix::zeros(size, size);
            for l in -h..=h {
                let k = l + m;
                if k.abs() <= h {
                    acc += &z[(k + h) as usize] * z[(l + h) as usize].adjoint();
                }
            }
            (m, acc)
        })
        .collect();
    let v = PotentialMatrix1D::from_fourier(size, entries).expect("P P† is Hermitian");
    let (_, max) = v.extremes();
    let target = max_amplitude * rng.random_range(0.01..=1.0);
    v.scaled(target / max)
}

/// 2D analogue of [`random_potential_1d`] with per-axis bandwidths.
pub fn random_potential_2d<R: Rng>(
    rng: &mut R,
    bandwidth: [usize; 2],
    max_amplitude: f64,
) -> Potential2D {
    let h = [(bandwidth[0] / 2) as i64, (bandwidth[1] / 2) as i64];
    let w = (2 * h[1] + 1) as usize;
    let z: Vec<Complex64> = (0..(2 * h[0] + 1) as usize * w)
        .map(|_| unit_complex(rng))
        .collect();
    let zi = |k: [i64; 2]| z[(k[0] + h[0]) as usize * w + (k[1] + h[1]) as usize];
    let mut entries = Vec::new();
    for m1 in -2 * h[0]..=2 * h[0] {
        for m2 in -2 * h[1]..=2 * h[1] {
            let mut acc = Complex64::new(0.0, 0.0);
            for l1 in -h[0]..=h[0] {
                for l2 in -h[1]..=h[1] {
                    let k = [l1 + m1, l2 + m2];
                    if k[0].abs() <= h[0] && k[1].abs() <= h[1] {
                        acc += zi(k) * zi([l1, l2]).conj();
                    }
                }
            }
            entries.push(([m1, m2], acc));
        }
    }
    let v = Potential2D::from_fourier(entries).expect("|p|² is real");
    let (_, max) = v.extremes();
    let target = max_amplitude * rng.random_range(0.01..=1.0);
    v.scaled(target / max)
}

fn orthonormal_columns<R: Rng>(rng: &mut R, rows: usize, count: usize) -> DMatrix<Complex64> {
    assert!(
        count <= rows,
        "cannot fit {count} orthonormal vectors in dimension {rows}"
    );
    let m = DMatrix::from_fn(rows, count, |_, _| unit_complex(rng));
    m.qr().q()
}

/// `count` orthonormal vector functions with `components` entries each,
/// as coefficient matrices of shape `(2·bandwidth+1) × components`.
pub fn random_orthonormal_family_1d<R: Rng>(
    rng: &mut R,
    count: usize,
    bandwidth: usize,
    components: usize,
) -> Vec<DMatrix<Complex64>> {
    let width = 2 * bandwidth + 1;
    let q = orthonormal_columns(rng, width * components, count);
    (0..count)
        .map(|n| DMatrix::from_fn(width, components, |k, m| q[(k * components + m, n)]))
        .collect()
}

/// `count` orthonormal scalar functions on a 2D torus, as coefficient
/// matrices of shape `(2B₁+1) × (2B₂+1)`.
pub fn random_orthonormal_family_2d<R: Rng>(
    rng: &mut R,
    count: usize,
    bandwidth: [usize; 2],
) -> Vec<DMatrix<Complex64>> {
    let (w1, w2) = (2 * bandwidth[0] + 1, 2 * bandwidth[1] + 1);
    let q = orthonormal_columns(rng, w1 * w2, count);
    (0..count)
        .map(|n| DMatrix::from_fn(w1, w2, |i, j| q[(i * w2 + j, n)]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_potentials_are_admissible() {
        let mut rng = rng_for(3);
        for _ in 0..10 {
            let v = random_potential_1d(&mut rng, 8, 100.0);
            assert!(v.bandwidth() <= 8);
            let (min, max) = v.extremes();
            assert!(min >= -1e-10 * max && max <= 100.0 + 1e-9);
            let m = random_psd_matrix_1d(&mut rng, 2, 4, 10.0);
            assert!(m.is_psd());
            let v2 = random_potential_2d(&mut rng, [2, 2], 5.0);
            assert!(v2.is_nonnegative());
        }
    }

    #[test]
    fn families_are_orthonormal() {
        let mut rng = rng_for(5);
        let fam = random_orthonormal_family_1d(&mut rng, 4, 3, 2);
        for (i, a) in fam.iter().enumerate() {
            for (j, b) in fam.iter().enumerate() {
                let g: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((g - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = random_potential_1d(&mut rng_for(9), 6, 50.0);
        let b = random_potential_1d(&mut rng_for(9), 6, 50.0);
        assert_eq!(a, b);
    }
}
