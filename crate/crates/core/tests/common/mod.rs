//! Independent oracles and samplers shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix2};
use qplate_core::{
    distribute, make_standard_form, GaussianState, QPlateSpec, StandardFormParams, SN,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn det2(m: &DMatrix<f64>, r: usize, c: usize) -> f64 {
    let b = Matrix2::new(m[(r, c)], m[(r, c + 1)], m[(r + 1, c)], m[(r + 1, c + 1)]);
    b.determinant()
}

/// Smallest partially transposed symplectic eigenvalue of a two-mode CM,
/// from the seralian `Δ̃ = det A + det B − 2 det C`.
pub fn two_mode_pt_min(cov: &DMatrix<f64>) -> f64 {
    let (da, db, dc) = (det2(cov, 0, 0), det2(cov, 2, 2), det2(cov, 0, 2));
    let delta = da + db - 2.0 * dc;
    let det = cov.determinant();
    // the discriminant can round below zero when the two eigenvalues coincide
    ((delta - (delta * delta - 4.0 * det).max(0.0).sqrt()) / 2.0).sqrt()
}

/// Same for the unflipped CM, `Δ = det A + det B + 2 det C`.
pub fn two_mode_nu_min(cov: &DMatrix<f64>) -> f64 {
    let (da, db, dc) = (det2(cov, 0, 0), det2(cov, 2, 2), det2(cov, 0, 2));
    let delta = da + db + 2.0 * dc;
    let det = cov.determinant();
    // the discriminant can round below zero when the two eigenvalues coincide
    ((delta - (delta * delta - 4.0 * det).max(0.0).sqrt()) / 2.0).sqrt()
}

pub fn two_mode_log_negativity(cov: &DMatrix<f64>) -> f64 {
    (-(two_mode_pt_min(cov) / SN).ln()).max(0.0)
}

/// Two-mode marginal `(i, j)` copied by hand.
pub fn marginal(cov: &DMatrix<f64>, i: usize, j: usize) -> DMatrix<f64> {
    let idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1];
    DMatrix::from_fn(4, 4, |r, c| cov[(idx[r], idx[c])])
}

/// `(tr Σ − 2n·sn) / 2` for a zero-mean state.
pub fn photons_from_trace(cov: &DMatrix<f64>) -> f64 {
    (cov.trace() - cov.nrows() as f64 * SN) / 2.0
}

/// Physical standard-form parameters, by rejection sampling. The standard
/// form is physical iff both `a, b ≥ sn` and the smallest symplectic
/// eigenvalue is at least `sn`.
pub fn random_standard_form(rng: &mut StdRng) -> StandardFormParams {
    loop {
        let a: f64 = rng.random_range(0.5..2.5);
        let b: f64 = rng.random_range(0.5..2.5);
        let bound = (a * b).sqrt();
        let c1 = rng.random_range(-bound..bound);
        let c2 = rng.random_range(-bound..bound);
        let p = StandardFormParams::new(a, b, c1, c2);
        let m = p.matrix();
        let det_ok = m.determinant() >= SN.powi(4);
        if det_ok && two_mode_nu_min(&m) >= SN + 1e-9 {
            return p;
        }
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn balanced_output(p: StandardFormParams) -> GaussianState {
    distribute(&make_standard_form(p).unwrap(), &QPlateSpec::balanced()).unwrap()
}
