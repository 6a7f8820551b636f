//! Entanglement and separability of bipartitions of Gaussian states.
//!
//! Two decision procedures are provided:
//!
//! * [`ppt_verdict`]: positivity of the partial transpose, read off the
//!   symplectic spectrum of the sign-flipped covariance matrix. A violation
//!   always certifies entanglement; passing certifies separability only when
//!   one side holds a single mode.
//! * [`iterative_separability`]: the nonlinear map on the block
//!   decomposition `[[A, C], [Cᵀ, B]]`, conclusive for every split.
//!
//! [`pairwise_entanglement_map`] works on two-mode marginals, while
//! [`bipartition_scan`] splits the full state. The two answer different
//! questions and are reported separately.

mod iterative;
mod scan;

use std::collections::HashSet;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::state::GaussianState;
use crate::{ENTANGLEMENT_BAND, SN};

pub use iterative::{iterative_separability, IterativeOptions};
pub use scan::{
    analyze, bipartition_scan, pairwise_entanglement_map, scan_bipartitions, AnalysisOptions,
    BipartitionVerdict, EntanglementReport, PairwiseTable, MAX_SCAN_MODES,
};

/// Two disjoint, nonempty groups of mode indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawBipartition")]
pub struct Bipartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

#[derive(Deserialize)]
struct RawBipartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl TryFrom<RawBipartition> for Bipartition {
    type Error = Error;

    fn try_from(raw: RawBipartition) -> Result<Self> {
        Bipartition::new(raw.side_a, raw.side_b)
    }
}

impl Bipartition {
    pub fn new(side_a: Vec<usize>, side_b: Vec<usize>) -> Result<Self> {
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::InvalidBipartition(
                "both sides must be nonempty".into(),
            ));
        }
        let mut seen = HashSet::new();
        for &k in side_a.iter().chain(&side_b) {
            if !seen.insert(k) {
                return Err(Error::InvalidBipartition(format!("mode {k} appears twice")));
            }
        }
        Ok(Self { side_a, side_b })
    }

    /// `side_a` against every other mode of an `n`-mode register.
    pub fn against_rest(side_a: Vec<usize>, n: usize) -> Result<Self> {
        let side_b = (0..n).filter(|k| !side_a.contains(k)).collect();
        Self::new(side_a, side_b)
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn swapped(&self) -> Self {
        Self {
            side_a: self.side_b.clone(),
            side_b: self.side_a.clone(),
        }
    }

    /// Size of the smaller side.
    pub fn min_side(&self) -> usize {
        self.side_a.len().min(self.side_b.len())
    }

    fn check_range(&self, n: usize) -> Result<()> {
        for &k in self.side_a.iter().chain(&self.side_b) {
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, len: n });
            }
        }
        Ok(())
    }

    /// The marginal on `side_a ∪ side_b` (side A first) and the bipartition
    /// re-indexed into it.
    pub(crate) fn localize(&self, state: &GaussianState) -> Result<(GaussianState, Bipartition)> {
        self.check_range(state.num_modes())?;
        let order: Vec<usize> = self.side_a.iter().chain(&self.side_b).copied().collect();
        let local = state.reduce(&order)?;
        let na = self.side_a.len();
        let bip = Bipartition {
            side_a: (0..na).collect(),
            side_b: (na..order.len()).collect(),
        };
        Ok((local, bip))
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| {
            v.iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{{{}}}|{{{}}}", join(&self.side_a), join(&self.side_b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Entangled,
    Separable,
    Inconclusive,
}

impl Status {
    pub fn letter(self) -> char {
        match self {
            Status::Entangled => 'E',
            Status::Separable => 'S',
            Status::Inconclusive => '?',
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "PPT")]
    Ppt,
    Iterative,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ppt => "PPT",
            Method::Iterative => "Iterative",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementVerdict {
    pub status: Status,
    /// Smallest symplectic eigenvalue of the partially transposed CM.
    pub witness: Option<f64>,
    pub log_negativity: f64,
    pub method: Method,
    pub iterations: Option<u32>,
}

/// Flips the sign of the Y quadrature of every mode in `side_b`:
/// `Σ̃ = Λ Σ Λ`. Applying it twice returns `Σ` exactly.
pub fn partial_transpose(state: &GaussianState, side_b: &[usize]) -> Result<DMatrix<f64>> {
    if side_b.is_empty() {
        return Err(Error::InvalidBipartition(
            "partial transpose needs a nonempty side".into(),
        ));
    }
    let n = state.num_modes();
    for &k in side_b {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, len: n });
        }
    }
    Ok(flip_momenta(state.cov(), side_b))
}

pub(crate) fn flip_momenta(cov: &DMatrix<f64>, modes: &[usize]) -> DMatrix<f64> {
    let mut sign = vec![1.0; cov.nrows()];
    for &k in modes {
        sign[2 * k + 1] = -1.0;
    }
    DMatrix::from_fn(cov.nrows(), cov.ncols(), |i, j| {
        sign[i] * sign[j] * cov[(i, j)]
    })
}

pub use crate::linalg::symplectic_eigenvalues;

/// `Σₖ max(0, −ln(ν̃ₖ / sn))` over a partially transposed spectrum.
pub fn log_negativity(pt_spectrum: &[f64]) -> f64 {
    pt_spectrum
        .iter()
        .map(|&nu| (-(nu / SN).ln()).max(0.0))
        .sum()
}

/// Smallest partially transposed symplectic eigenvalue and the log-negativity
/// of the split.
pub(crate) fn ppt_witness(state: &GaussianState, bip: &Bipartition) -> Result<(f64, f64)> {
    let (local, bip) = bip.localize(state)?;
    let spectrum = linalg::symplectic_eigenvalues(&flip_momenta(local.cov(), bip.side_b()))?;
    let witness = spectrum.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((witness, log_negativity(&spectrum)))
}

/// PPT decision for one split. A bipartition that covers only part of the
/// register is evaluated on the corresponding marginal.
pub fn ppt_verdict(state: &GaussianState, bip: &Bipartition) -> Result<EntanglementVerdict> {
    let (witness, log_negativity) = ppt_witness(state, bip)?;
    let status = if witness < SN - ENTANGLEMENT_BAND {
        Status::Entangled
    } else if bip.min_side() == 1 {
        Status::Separable
    } else {
        Status::Inconclusive
    };
    Ok(EntanglementVerdict {
        status,
        witness: Some(witness),
        log_negativity: if status == Status::Entangled {
            log_negativity
        } else {
            0.0
        },
        method: Method::Ppt,
        iterations: None,
    })
}
