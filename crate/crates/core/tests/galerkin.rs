mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use torus_lt::constants::{k2, k_alpha, Flux};
use torus_lt::operator::{assemble_1d, assemble_2d, Potential1D, Potential2D, TorusGeometry};
use torus_lt::sampling::{random_potential_1d, rng_for};
use torus_lt::spectrum::{eigs_hermitian, riesz_mean};
use torus_lt::verify::{check_gamma_moments, ScalarPotential};

fn flux(a: f64) -> Flux {
    Flux::new(a).unwrap()
}

fn circle() -> TorusGeometry {
    TorusGeometry::circle(2.0 * PI).unwrap()
}

fn cosine_potential(c: f64) -> Potential1D {
    let h = Complex64::new(c / 2.0, 0.0);
    Potential1D::from_fourier([(-1, h), (0, Complex64::new(c, 0.0)), (1, h)]).unwrap()
}

#[test]
fn lowest_eigenvalues_self_converge() {
    let v = cosine_potential(5.0);
    let lo = eigs_hermitian(&assemble_1d(32, &circle(), flux(0.3), &v).unwrap()).unwrap();
    let hi = eigs_hermitian(&assemble_1d(64, &circle(), flux(0.3), &v).unwrap()).unwrap();
    for (a, b) in lo.eigenvalues.iter().zip(&hi.eigenvalues).take(8) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn gauge_oracle_matches_at_nonzero_flux_offsets() {
    let v = cosine_potential(2.0);
    for alpha in [0.1, 0.45] {
        let spectral =
            eigs_hermitian(&assemble_1d(40, &circle(), flux(alpha), &v).unwrap()).unwrap();
        let fd = common::finite_difference_eigenvalues(
            common::two_pi(),
            768,
            common::cosine_link(alpha),
            |x| 2.0 * (1.0 + x.cos()),
            4,
        );
        for (s, f) in spectral.eigenvalues.iter().zip(&fd) {
            assert!((s - f).abs() <= 1e-3 * s.abs().max(1.0), "{s} vs {f}");
        }
    }
}

#[test]
fn two_d_negative_count_matches_lattice_count() {
    let g = TorusGeometry::torus(2.0 * PI, 4.0 * PI).unwrap();
    let (a1, a2) = (0.5, 0.25);
    let op = assemble_2d(
        [6, 10],
        &g,
        [flux(a1), flux(a2)],
        &Potential2D::constant(1.0),
    )
    .unwrap();
    let s = eigs_hermitian(&op).unwrap();
    let mut count = 0;
    let mut trace = 0.0;
    for k1 in -5i64..=5 {
        for k2 in -9i64..=9 {
            let e = (k1 as f64 + a1).powi(2) + ((k2 as f64 + a2) / 2.0).powi(2);
            if e < 1.0 {
                count += 1;
                trace += 1.0 - e;
            }
        }
    }
    assert_eq!(s.negative_count(), count);
    assert!((riesz_mean(&s, 1.0) - trace).abs() < 1e-10);
}

#[test]
fn scaling_sweep_holds() {
    let g = circle();
    for c in [1e-2, 1.0, 1e2] {
        for base in [
            cosine_potential(1.0),
            random_potential_1d(&mut rng_for(4), 6, 1.0),
        ] {
            let v = base.scaled(c);
            let n = (c.sqrt() as usize) + 16;
            let r = check_gamma_moments(&g, &[flux(0.5)], &ScalarPotential::OneD(v), 1.0, &[n])
                .unwrap();
            assert!(r.holds, "c={c}: ratio {}", r.ratio);
        }
    }
}

#[test]
fn rhs_scales_with_power_of_amplitude() {
    let g = circle();
    let v = cosine_potential(1.0);
    let base = check_gamma_moments(
        &g,
        &[flux(0.4)],
        &ScalarPotential::OneD(v.clone()),
        1.5,
        &[8],
    )
    .unwrap();
    let scaled = check_gamma_moments(
        &g,
        &[flux(0.4)],
        &ScalarPotential::OneD(v.scaled(9.0)),
        1.5,
        &[16],
    )
    .unwrap();
    assert!((scaled.rhs / base.rhs - 9f64.powi(2)).abs() < 1e-9 * 81.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn k_alpha_symmetries(a in 0.001f64..0.999, shift in -3i32..3) {
        let base = k_alpha(flux(a));
        prop_assert!((k_alpha(flux(a + shift as f64)) - base).abs() <= 1e-9 * base);
        prop_assert!((k_alpha(flux(1.0 - a)) - base).abs() <= 1e-9 * base);
        prop_assert!(base >= 1.0);
    }

    #[test]
    fn k2_reflection_symmetry(a in 0.05f64..0.95) {
        let x = k2(flux(a)).unwrap().k2;
        let y = k2(flux(1.0 - a)).unwrap().k2;
        prop_assert!((x - y).abs() <= 1e-8 * x);
    }

    #[test]
    fn constant_shift_moves_spectrum(seed in 0u64..1000, c in -5.0f64..5.0) {
        let v = random_potential_1d(&mut rng_for(seed), 4, 10.0);
        let g = circle();
        let a = eigs_hermitian(&assemble_1d(12, &g, flux(0.3), &v).unwrap()).unwrap();
        let b = eigs_hermitian(&assemble_1d(12, &g, flux(0.3), &v.shifted(c)).unwrap()).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!((x - c - y).abs() < 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn assembled_operators_are_hermitian(seed in 0u64..1000, a in 0.01f64..0.99) {
        let v = random_potential_1d(&mut rng_for(seed), 8, 100.0);
        let op = assemble_1d(20, &circle(), flux(a), &v).unwrap();
        prop_assert!(op.hermiticity_defect() <= 1e-12);
    }

    #[test]
    fn flux_shift_by_integer_relabels_spectrum(seed in 0u64..1000, a in 0.01f64..0.99) {
        // α → α+1 relabels k → k−1; compare interior eigenvalues only
        let v = random_potential_1d(&mut rng_for(seed), 4, 5.0);
        let g = circle();
        let x = eigs_hermitian(&assemble_1d(30, &g, flux(a), &v).unwrap()).unwrap();
        let y = eigs_hermitian(&assemble_1d(30, &g, flux(a + 1.0), &v).unwrap()).unwrap();
        for (p, q) in x.eigenvalues.iter().zip(&y.eigenvalues).take(5) {
            prop_assert!((p - q).abs() < 1e-8);
        }
    }
}
