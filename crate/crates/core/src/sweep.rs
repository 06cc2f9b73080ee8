//! Seeded random trials of the inequality checks. Trial `seed` is fully
//! determined by the seed and the sweep parameters.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::Flux;
use crate::error::VerifyError;
use crate::operator::{MagneticPotential1D, TorusGeometry};
use crate::sampling::{
    random_orthonormal_family_1d, random_orthonormal_family_2d, random_potential_1d,
    random_potential_2d, random_psd_matrix_1d, rng_for, TestRng,
};
use crate::verify::{
    check_1d_gamma, check_duality_2d, check_gamma_moments, check_negative_trace_matrix,
    check_orthonormal, suggested_truncation, LTVerdict, ScalarPotential,
};

/// Aspect ratios `L₂/L₁` cycled through by 2D trials.
pub const ASPECT_RATIOS: [f64; 3] = [1.0, 4.0, 16.0];
/// Amplitude cap for 2D trials, keeping the Galerkin dimension near 1500.
pub const MAX_AMPLITUDE_2D: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Scalar 1D potential, γ-moment bound.
    Scalar,
    /// 2×2 PSD matrix potential, 1D γ bound.
    Matrix,
    /// Scalar potential on a 2D torus.
    TwoD,
    /// Orthonormal family on the circle.
    Orthonormal,
    /// Five-function orthonormal family on a 2D torus.
    Duality,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    pub kind: SweepKind,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_bandwidth")]
    pub max_bandwidth: usize,
    #[serde(default = "default_amplitude")]
    pub max_amplitude: f64,
}

fn default_gamma() -> f64 {
    1.0
}

fn default_bandwidth() -> usize {
    8
}

fn default_amplitude() -> f64 {
    100.0
}

impl SweepParams {
    pub fn new(kind: SweepKind) -> Self {
        SweepParams {
            kind,
            gamma: default_gamma(),
            max_bandwidth: default_bandwidth(),
            max_amplitude: default_amplitude(),
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }
}

fn random_flux(rng: &mut TestRng) -> Flux {
    Flux::new(rng.random_range(0.02..0.98)).expect("range avoids integers")
}

pub fn run_trial(params: &SweepParams, seed: u64) -> Result<LTVerdict, VerifyError> {
    let mut rng = rng_for(seed);
    let max_bw = params.max_bandwidth.max(1);
    let circle = || TorusGeometry::circle(2.0 * PI);
    let verdict = match params.kind {
        SweepKind::Scalar => {
            let bw = rng.random_range(1..=max_bw);
            let v = random_potential_1d(&mut rng, bw, params.max_amplitude);
            let a = random_flux(&mut rng);
            let n = suggested_truncation(v.extremes().1, 1.0, v.bandwidth());
            check_gamma_moments(
                &circle()?,
                &[a],
                &ScalarPotential::OneD(v),
                params.gamma,
                &[n],
            )?
        }
        SweepKind::Matrix => {
            let bw = rng.random_range(1..=max_bw.min(6));
            let v = random_psd_matrix_1d(&mut rng, 2, bw, params.max_amplitude);
            let a = random_flux(&mut rng);
            let n = suggested_truncation(v.extremes().1, 1.0, v.bandwidth());
            if params.gamma == 1.0 {
                check_negative_trace_matrix(&circle()?, a, &v, n)?
            } else {
                check_1d_gamma(&circle()?, a, &v, params.gamma, n)?
            }
        }
        SweepKind::TwoD => {
            let aspect = ASPECT_RATIOS[(seed % 3) as usize];
            let g = TorusGeometry::torus(2.0 * PI, 2.0 * PI * aspect)?;
            let cap = max_bw.min(2);
            let bw = [rng.random_range(0..=cap), rng.random_range(0..=cap)];
            let v = random_potential_2d(&mut rng, bw, params.max_amplitude.min(MAX_AMPLITUDE_2D));
            let fl = [random_flux(&mut rng), random_flux(&mut rng)];
            let vmax = v.extremes().1;
            let b = v.bandwidth();
            let n = [
                suggested_truncation(vmax, g.eps(0), b[0]),
                suggested_truncation(vmax, g.eps(1), b[1]),
            ];
            check_gamma_moments(&g, &fl, &ScalarPotential::TwoD(v), params.gamma, &n)?
        }
        SweepKind::Orthonormal => {
            let bw = rng.random_range(1..=max_bw.min(6));
            let components = rng.random_range(1..=2);
            let count = rng.random_range(1..=(2 * bw + 1) * components);
            let fam = random_orthonormal_family_1d(&mut rng, count, bw, components);
            let alpha = rng.random_range(0.02..0.98);
            let a = if seed.is_multiple_of(2) {
                MagneticPotential1D::constant(alpha, 2.0 * PI)?
            } else {
                let amp = rng.random_range(0.0..2.0);
                let samples = (0..16)
                    .map(|j| alpha + amp * (2.0 * PI * j as f64 / 16.0).cos())
                    .collect();
                MagneticPotential1D::sampled(samples, 2.0 * PI)?
            };
            check_orthonormal(&fam, &a)?
        }
        SweepKind::Duality => {
            let cap = max_bw.min(4);
            let bw = [rng.random_range(1..=cap), rng.random_range(1..=cap)];
            let fam = random_orthonormal_family_2d(&mut rng, 5, bw);
            let l2 = 2.0 * PI * ASPECT_RATIOS[(seed % 2) as usize];
            let a1 = MagneticPotential1D::from_flux(random_flux(&mut rng), 2.0 * PI)?;
            let a2 = MagneticPotential1D::from_flux(random_flux(&mut rng), l2)?;
            check_duality_2d(&fam, [&a1, &a2])?
        }
    };
    Ok(verdict.with_seed(seed))
}

/// Trials for consecutive seeds, in parallel, returned in seed order.
pub fn run_sweep(
    params: &SweepParams,
    first_seed: u64,
    trials: usize,
) -> Vec<Result<LTVerdict, VerifyError>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|i| run_trial(params, first_seed + i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_kind_runs_and_holds() {
        for kind in [
            SweepKind::Scalar,
            SweepKind::Matrix,
            SweepKind::TwoD,
            SweepKind::Orthonormal,
            SweepKind::Duality,
        ] {
            let v = run_trial(&SweepParams::new(kind), 1).unwrap();
            assert!(v.holds, "{kind:?}: ratio {}", v.ratio);
            assert_eq!(v.meta.seed, Some(1));
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let p = SweepParams::new(SweepKind::Scalar).with_gamma(1.5);
        assert_eq!(run_trial(&p, 42).unwrap(), run_trial(&p, 42).unwrap());
    }

    #[test]
    fn params_reject_unknown_fields() {
        let ok: SweepParams = serde_json::from_str(r#"{"kind": "two_d"}"#).unwrap();
        assert_eq!(ok.kind, SweepKind::TwoD);
        assert!(serde_json::from_str::<SweepParams>(r#"{"kind": "scalar", "bogus": 1}"#).is_err());
    }
}
