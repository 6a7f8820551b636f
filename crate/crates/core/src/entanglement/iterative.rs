//! Iterative separability criterion for bipartite Gaussian states.
//!
//! Working in the `sn` scale with `Λ = sn·Ω`, a covariance matrix
//! `γ = [[A, C], [Cᵀ, B]]` is mapped to
//!
//! ```text
//! X  = C (B − iΛ)⁺ Cᵀ
//! A' = B' = A − Re X
//! C' = −Im X
//! ```
//!
//! which preserves separability. The iteration stops with
//!
//! * a non-separability certificate when `A_N − iΛ` is not positive
//!   semidefinite, or
//! * a separability certificate when `A_N − ‖C_N‖·1 − iΛ ≥ 0` and the same
//!   holds for `B_N` (only distinct from `A_N` before the first step).
//!
//! Pseudo-inverse rounding grows like `ε_machine / λ_min(B − iΛ)`. States
//! with exact-vacuum symplectic modes (every q-plate output) make `B − iΛ`
//! singular, so the map runs on `Σ + ε·1` with a small `ε` that moves
//! boundary-separable states into the interior of the separable set.

use nalgebra::DMatrix;

use super::{ppt_witness, Bipartition, EntanglementVerdict, Method, Status};
use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitian_pinv, max_abs, max_abs_diff, min_hermitian_eigenvalue, symplectic_form,
};
use crate::state::GaussianState;
use crate::{ENTANGLEMENT_BAND, SN};

/// Relative diagonal shift applied before iterating.
const REGULARIZATION: f64 = 1e-8;
const PINV_RCOND: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterativeOptions {
    pub max_iter: u32,
    /// Correlation blocks with operator norm below `tol` count as zero. The
    /// same bound detects a stalled iteration.
    pub tol: f64,
}

impl Default for IterativeOptions {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-10,
        }
    }
}

struct Blocks {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
}

fn lambda(dim: usize) -> DMatrix<f64> {
    symplectic_form(dim / 2) * SN
}

/// Smallest eigenvalue of `m − shift·1 − iΛ`.
fn heisenberg_margin(m: &DMatrix<f64>, shift: f64) -> f64 {
    let dim = m.nrows();
    let shifted = m - DMatrix::identity(dim, dim) * shift;
    min_hermitian_eigenvalue(&shifted, &(-lambda(dim)))
}

impl Blocks {
    fn split(cov: &DMatrix<f64>, na: usize) -> Self {
        let (da, db) = (2 * na, cov.nrows() - 2 * na);
        Self {
            a: cov.view((0, 0), (da, da)).into_owned(),
            b: cov.view((da, da), (db, db)).into_owned(),
            c: cov.view((0, da), (da, db)).into_owned(),
        }
    }

    fn step(&self) -> Self {
        let db = self.b.nrows();
        // (B − iΛ)⁺ = P + iQ
        let (p, q) = hermitian_pinv(&self.b, &(-lambda(db)), PINV_RCOND);
        let ct = self.c.transpose();
        let re_x = &self.c * p * &ct;
        let im_x = &self.c * q * &ct;
        let a = linalg::symmetrize(&(&self.a - re_x));
        let c = (&im_x.transpose() - &im_x) * 0.5;
        Self { b: a.clone(), a, c }
    }
}

/// Runs the iterative criterion on `bip`. Bipartitions covering only part of
/// the register are evaluated on the marginal.
///
/// Returns [`Error::ConvergenceStall`] when the iterate reaches a fixed point
/// without either certificate. Hitting `max_iter` yields
/// [`Status::Inconclusive`].
pub fn iterative_separability(
    state: &GaussianState,
    bip: &Bipartition,
    options: IterativeOptions,
) -> Result<EntanglementVerdict> {
    if options.max_iter == 0 {
        return Err(Error::InvalidParameter(
            "max_iter must be at least 1".into(),
        ));
    }
    if options.tol.is_nan() || options.tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tol = {} must be positive",
            options.tol
        )));
    }
    let (local, local_bip) = bip.localize(state)?;
    let (witness, log_negativity) = ppt_witness(state, bip)?;

    let cov = linalg::symmetrize(local.cov());
    let dim = cov.nrows();
    let eps = REGULARIZATION * (max_abs(&cov) / SN).max(1.0);
    let cov = cov + DMatrix::identity(dim, dim) * eps;

    let mut blocks = Blocks::split(&cov, local_bip.side_a().len());
    let verdict = |status: Status, iterations: u32| EntanglementVerdict {
        status,
        witness: Some(witness),
        log_negativity: if witness < SN - ENTANGLEMENT_BAND {
            log_negativity
        } else {
            0.0
        },
        method: Method::Iterative,
        iterations: Some(iterations),
    };

    for iteration in 1..=options.max_iter {
        if heisenberg_margin(&blocks.a, 0.0) < -ENTANGLEMENT_BAND
            || heisenberg_margin(&blocks.b, 0.0) < -ENTANGLEMENT_BAND
        {
            return Ok(verdict(Status::Entangled, iteration));
        }
        let norm = linalg::operator_norm(&blocks.c);
        let norm = if norm < options.tol { 0.0 } else { norm };
        if heisenberg_margin(&blocks.a, norm) >= -ENTANGLEMENT_BAND
            && heisenberg_margin(&blocks.b, norm) >= -ENTANGLEMENT_BAND
        {
            return Ok(verdict(Status::Separable, iteration));
        }
        if iteration == options.max_iter {
            break;
        }
        let next = blocks.step();
        let moved = if next.a.shape() == blocks.a.shape() && next.c.shape() == blocks.c.shape() {
            max_abs_diff(&next.a, &blocks.a).max(max_abs_diff(&next.c, &blocks.c))
        } else {
            f64::INFINITY
        };
        if moved < options.tol {
            return Err(Error::ConvergenceStall {
                iterations: iteration,
            });
        }
        blocks = next;
    }
    Ok(verdict(Status::Inconclusive, options.max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::ModeRegister;
    use crate::optics::{distribute, QPlateSpec};
    use crate::state::{make_standard_form, StandardFormParams};

    fn opts() -> IterativeOptions {
        IterativeOptions::default()
    }

    #[test]
    fn experimental_pair_is_entangled() {
        let s = make_standard_form(StandardFormParams::experimental()).unwrap();
        let v = iterative_separability(&s, &Bipartition::new(vec![0], vec![1]).unwrap(), opts())
            .unwrap();
        assert_eq!(v.status, Status::Entangled);
        assert_eq!(v.method, Method::Iterative);
        assert!(v.log_negativity > 0.8);
    }

    #[test]
    fn product_state_is_separable_in_one_iteration() {
        let mut cov = DMatrix::zeros(6, 6);
        cov.view_mut((0, 0), (2, 2))
            .copy_from(&DMatrix::from_row_slice(2, 2, &[1.2, 0.3, 0.3, 0.9]));
        cov.view_mut((2, 2), (4, 4))
            .copy_from(&StandardFormParams::experimental().matrix());
        let s = GaussianState::zero_mean(ModeRegister::anonymous(3).unwrap(), cov).unwrap();
        let v = iterative_separability(&s, &Bipartition::against_rest(vec![0], 3).unwrap(), opts())
            .unwrap();
        assert_eq!(v.status, Status::Separable);
        assert_eq!(v.iterations, Some(1));
    }

    #[test]
    fn four_mode_output_pairs() {
        let out = distribute(
            &make_standard_form(StandardFormParams::experimental()).unwrap(),
            &QPlateSpec::balanced(),
        )
        .unwrap();
        let expect = [
            ((0, 1), Status::Separable),
            ((0, 2), Status::Entangled),
            ((0, 3), Status::Entangled),
            ((1, 2), Status::Entangled),
            ((1, 3), Status::Entangled),
            ((2, 3), Status::Separable),
        ];
        for ((i, j), status) in expect {
            let v =
                iterative_separability(&out, &Bipartition::new(vec![i], vec![j]).unwrap(), opts())
                    .unwrap();
            assert_eq!(v.status, status, "pair ({i},{j})");
        }
    }

    #[test]
    fn boundary_two_by_two_split_is_separable() {
        // (a1, b1) | (a2, b2) passes PPT; the iteration must not drift into a
        // false entanglement certificate on this boundary state.
        let p = StandardFormParams::new(
            1.488011510657284,
            1.544440055901617,
            -0.08386593840725087,
            0.1645642132168348,
        );
        let out = distribute(&make_standard_form(p).unwrap(), &QPlateSpec::balanced()).unwrap();
        let bip = Bipartition::new(vec![0, 2], vec![1, 3]).unwrap();
        let v = iterative_separability(&out, &bip, opts()).unwrap();
        assert_eq!(v.status, Status::Separable);
    }

    #[test]
    fn iteration_cap_is_inconclusive() {
        let p = StandardFormParams::new(
            1.488011510657284,
            1.544440055901617,
            -0.08386593840725087,
            0.1645642132168348,
        );
        let out = distribute(&make_standard_form(p).unwrap(), &QPlateSpec::balanced()).unwrap();
        let bip = Bipartition::new(vec![0, 2], vec![1, 3]).unwrap();
        let capped = IterativeOptions {
            max_iter: 1,
            tol: 1e-10,
        };
        let v = iterative_separability(&out, &bip, capped).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        assert_eq!(v.iterations, Some(1));
    }

    #[test]
    fn option_validation() {
        let s = GaussianState::vacuum(ModeRegister::anonymous(2).unwrap());
        let bip = Bipartition::new(vec![0], vec![1]).unwrap();
        assert!(iterative_separability(
            &s,
            &bip,
            IterativeOptions {
                max_iter: 0,
                tol: 1e-10
            }
        )
        .is_err());
        assert!(iterative_separability(
            &s,
            &bip,
            IterativeOptions {
                max_iter: 5,
                tol: 0.0
            }
        )
        .is_err());
    }
}
