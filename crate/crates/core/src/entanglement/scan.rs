//! Pairwise marginal map and exhaustive bipartition scan.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    iterative_separability, ppt_verdict, Bipartition, EntanglementVerdict, IterativeOptions, Status,
};
use crate::error::{Error, Result};
use crate::state::GaussianState;

/// Largest register [`bipartition_scan`] will enumerate.
pub const MAX_SCAN_MODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalysisOptions {
    pub iterative: IterativeOptions,
}

/// Symmetric `n × n` table of two-mode marginal verdicts; the diagonal is
/// empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PairwiseTable {
    cells: Vec<Vec<Option<EntanglementVerdict>>>,
}

impl PairwiseTable {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&EntanglementVerdict> {
        self.cells.get(i)?.get(j)?.as_ref()
    }

    /// Unordered pairs `(i < j)` with their verdicts.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, &EntanglementVerdict)> + '_ {
        let n = self.len();
        (0..n)
            .flat_map(move |i| ((i + 1)..n).filter_map(move |j| self.get(i, j).map(|v| (i, j, v))))
    }

    pub fn count(&self, status: Status) -> usize {
        self.pairs().filter(|(_, _, v)| v.status == status).count()
    }
}

/// Verdict on one split of the full register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartitionVerdict {
    pub bipartition: Bipartition,
    pub verdict: EntanglementVerdict,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EntanglementReport {
    /// Mode tags, indexing both the table and the bipartitions.
    pub modes: Vec<String>,
    /// Two-mode marginal verdicts, when computed.
    pub pairwise: Option<PairwiseTable>,
    /// Full-state bipartition verdicts.
    pub bipartitions: Vec<BipartitionVerdict>,
}

/// Runs the PPT test on the two-mode marginal of every unordered pair.
pub fn pairwise_entanglement_map(state: &GaussianState) -> Result<PairwiseTable> {
    let n = state.num_modes();
    if n < 2 {
        return Err(Error::InvalidBipartition(
            "pairwise map needs at least two modes".into(),
        ));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let verdicts = pairs
        .par_iter()
        .map(|&(i, j)| ppt_verdict(state, &Bipartition::new(vec![i], vec![j])?))
        .collect::<Result<Vec<_>>>()?;
    let mut cells = vec![vec![None; n]; n];
    for (&(i, j), v) in pairs.iter().zip(verdicts) {
        cells[i][j] = Some(v);
        cells[j][i] = Some(v);
    }
    Ok(PairwiseTable { cells })
}

/// All 1×(n−1) and 2×(n−2) splits in a fixed order. When both sides have
/// the same size only the split containing mode 0 on side A is kept.
pub fn scan_bipartitions(n: usize) -> Vec<Bipartition> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for k in 0..n {
        if 1 < n - 1 || (n == 2 && k == 0) {
            out.push(Bipartition::against_rest(vec![k], n).expect("valid split"));
        }
    }
    if n >= 4 {
        for i in 0..n {
            for j in (i + 1)..n {
                if n == 4 && i != 0 {
                    continue;
                }
                out.push(Bipartition::against_rest(vec![i, j], n).expect("valid split"));
            }
        }
    }
    out
}

/// Decides every split from [`scan_bipartitions`] with PPT, escalating to
/// the iterative criterion when PPT is inconclusive.
pub fn bipartition_scan(
    state: &GaussianState,
    options: AnalysisOptions,
) -> Result<Vec<BipartitionVerdict>> {
    let n = state.num_modes();
    if n > MAX_SCAN_MODES {
        return Err(Error::TooManyModes {
            max: MAX_SCAN_MODES,
            found: n,
        });
    }
    scan_bipartitions(n)
        .into_par_iter()
        .map(|bipartition| {
            let mut verdict = ppt_verdict(state, &bipartition)?;
            if verdict.status == Status::Inconclusive {
                verdict = iterative_separability(state, &bipartition, options.iterative)?;
            }
            Ok(BipartitionVerdict {
                bipartition,
                verdict,
            })
        })
        .collect()
}

pub fn analyze(
    state: &GaussianState,
    pairs: bool,
    scan: bool,
    options: AnalysisOptions,
) -> Result<EntanglementReport> {
    let pairwise = if pairs && state.num_modes() >= 2 {
        Some(pairwise_entanglement_map(state)?)
    } else {
        None
    };
    let bipartitions = if scan {
        bipartition_scan(state, options)?
    } else {
        Vec::new()
    };
    Ok(EntanglementReport {
        modes: state.register().tags(),
        pairwise,
        bipartitions,
    })
}
