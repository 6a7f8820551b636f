//! Multimode Gaussian states in covariance-matrix form.
//!
//! Quadratures follow `X = (k + k†)/√2`, `Y = (k − k†)/(√2 i)`, so the vacuum
//! has variance [`SN`] = 1/2 in every quadrature. Phase space is interleaved:
//! `(X₁, Y₁, X₂, Y₂, …)`.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::mode::ModeRegister;
use crate::{PHYSICALITY_FLOOR, SN, SYMMETRY_TOL};

/// Zero-mean (or displaced) Gaussian state over a mode register.
///
/// Construction checks shapes and finiteness only, so unphysical matrices can
/// still be inspected with [`GaussianState::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    register: ModeRegister,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub symmetric: bool,
    pub physical: bool,
    pub min_heisenberg_eigenvalue: f64,
}

/// Two-mode standard form `[[a,0,c1,0],[0,a,0,c2],[c1,0,b,0],[0,c2,0,b]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardFormParams {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
}

impl StandardFormParams {
    pub fn new(a: f64, b: f64, c1: f64, c2: f64) -> Self {
        Self { a, b, c1, c2 }
    }

    /// Central values of the loss-corrected OPO matrix used throughout the
    /// reproduction: a = b = 0.72, c1 = −c2 = 0.51.
    pub fn experimental() -> Self {
        Self::new(0.72, 0.72, 0.51, -0.51)
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let Self { a, b, c1, c2 } = *self;
        DMatrix::from_row_slice(
            4,
            4,
            &[
                a, 0.0, c1, 0.0, //
                0.0, a, 0.0, c2, //
                c1, 0.0, b, 0.0, //
                0.0, c2, 0.0, b,
            ],
        )
    }
}

/// Builds the two-mode standard-form state on `a[H,0]`, `b[V,0]`.
pub fn make_standard_form(p: StandardFormParams) -> Result<GaussianState> {
    make_standard_form_on(p, ModeRegister::opo_pair())
}

pub fn make_standard_form_on(
    p: StandardFormParams,
    register: ModeRegister,
) -> Result<GaussianState> {
    if register.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: register.len(),
        });
    }
    if ![p.a, p.b, p.c1, p.c2].iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("standard-form parameters"));
    }
    if p.a < SN || p.b < SN {
        return Err(Error::InvalidParameter(format!(
            "standard form needs a, b ≥ {SN} (got a = {}, b = {})",
            p.a, p.b
        )));
    }
    GaussianState::zero_mean(register, p.matrix())?.into_physical()
}

impl GaussianState {
    pub fn new(register: ModeRegister, mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = 2 * register.len();
        if cov.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: cov.nrows(),
            });
        }
        if cov.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: cov.ncols(),
            });
        }
        if mean.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: mean.len(),
            });
        }
        if !cov.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("covariance matrix"));
        }
        if !mean.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("mean vector"));
        }
        Ok(Self {
            register,
            mean,
            cov,
        })
    }

    pub fn zero_mean(register: ModeRegister, cov: DMatrix<f64>) -> Result<Self> {
        let dim = 2 * register.len();
        Self::new(register, DVector::zeros(dim), cov)
    }

    pub fn vacuum(register: ModeRegister) -> Self {
        let dim = 2 * register.len();
        Self {
            register,
            mean: DVector::zeros(dim),
            cov: DMatrix::identity(dim, dim) * SN,
        }
    }

    pub fn register(&self) -> &ModeRegister {
        &self.register
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn num_modes(&self) -> usize {
        self.register.len()
    }

    pub fn into_parts(self) -> (ModeRegister, DVector<f64>, DMatrix<f64>) {
        (self.register, self.mean, self.cov)
    }

    pub(crate) fn with_register(self, register: ModeRegister) -> Self {
        debug_assert_eq!(register.len(), self.register.len());
        Self { register, ..self }
    }

    /// The 2×2 block of mode `i` (σ) or the correlation block between
    /// modes `i` and `j` (ε).
    pub fn block(&self, i: usize, j: usize) -> Result<Matrix2<f64>> {
        let n = self.num_modes();
        for k in [i, j] {
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, len: n });
            }
        }
        Ok(self.cov.fixed_view::<2, 2>(2 * i, 2 * j).into_owned())
    }

    pub fn validate(&self) -> ValidityReport {
        let scale = linalg::max_abs(&self.cov).max(1.0);
        let symmetric = linalg::max_asymmetry(&self.cov) <= SYMMETRY_TOL * scale;
        let min_heisenberg_eigenvalue =
            linalg::heisenberg_min_eigenvalue(&linalg::symmetrize(&self.cov));
        ValidityReport {
            symmetric,
            physical: symmetric && min_heisenberg_eigenvalue >= -PHYSICALITY_FLOOR,
            min_heisenberg_eigenvalue,
        }
    }

    /// Returns `self` if it is symmetric and satisfies the uncertainty
    /// principle.
    pub fn into_physical(self) -> Result<Self> {
        let report = self.validate();
        if !report.symmetric {
            return Err(Error::NotSymmetric {
                max_asymmetry: linalg::max_asymmetry(&self.cov),
            });
        }
        if !report.physical {
            return Err(Error::PhysicalityViolation {
                min_eigenvalue: report.min_heisenberg_eigenvalue,
            });
        }
        Ok(self)
    }

    /// Marginal state of the modes in `subset`, in the order given.
    pub fn reduce(&self, subset: &[usize]) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::EmptyRegister);
        }
        let n = self.num_modes();
        let mut seen = HashSet::with_capacity(subset.len());
        for &k in subset {
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, len: n });
            }
            if !seen.insert(k) {
                return Err(Error::DuplicateIndex(k));
            }
        }
        Ok(self.select(subset))
    }

    /// Reorders modes so that new mode `i` is old mode `permutation[i]`.
    /// Entries are copied, so the inverse permutation restores the input
    /// exactly.
    pub fn reorder(&self, permutation: &[usize]) -> Result<Self> {
        let n = self.num_modes();
        if permutation.len() != n {
            return Err(Error::NotAPermutation(n));
        }
        let mut seen = vec![false; n];
        for &k in permutation {
            if k >= n || std::mem::replace(&mut seen[k], true) {
                return Err(Error::NotAPermutation(n));
            }
        }
        Ok(self.select(permutation))
    }

    fn select(&self, modes: &[usize]) -> Self {
        let rows: Vec<usize> = modes.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        let dim = rows.len();
        let cov = DMatrix::from_fn(dim, dim, |i, j| self.cov[(rows[i], rows[j])]);
        let mean = DVector::from_fn(dim, |i, _| self.mean[rows[i]]);
        let register = ModeRegister::new(
            modes
                .iter()
                .map(|&k| self.register.modes()[k].clone())
                .collect(),
        )
        .expect("subset of a valid register is valid");
        Self {
            register,
            mean,
            cov,
        }
    }

    /// ⟨k†k⟩ = (⟨X²⟩ + ⟨Y²⟩ − 1)/2 for mode `k`.
    pub fn mean_photon_number(&self, k: usize) -> Result<f64> {
        let n = self.num_modes();
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, len: n });
        }
        let (x, y) = (2 * k, 2 * k + 1);
        let second_moments =
            self.cov[(x, x)] + self.cov[(y, y)] + self.mean[x].powi(2) + self.mean[y].powi(2);
        Ok((second_moments - 2.0 * SN) / 2.0)
    }

    pub fn total_photon_number(&self) -> f64 {
        (0..self.num_modes())
            .map(|k| self.mean_photon_number(k).expect("index in range"))
            .sum()
    }

    /// μ = 1 / (2ⁿ √det Σ).
    pub fn purity(&self) -> Result<f64> {
        let det = self.cov.clone().lu().determinant();
        if det.is_nan() || det <= 0.0 {
            return Err(Error::NonPositiveDeterminant { det });
        }
        Ok(SN.powi(self.num_modes() as i32) / det.sqrt())
    }

    /// Symplectic eigenvalues of Σ, ascending.
    pub fn symplectic_spectrum(&self) -> Result<Vec<f64>> {
        linalg::symplectic_eigenvalues(&self.cov)
    }
}
