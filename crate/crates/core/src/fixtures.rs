//! Bundled states and configs, compiled into the binary.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::entanglement::AnalysisOptions;
use crate::error::{Error, Result};
use crate::io::{self, LoadOptions};
use crate::linalg::max_abs_diff;
use crate::optics::sigma4_closed_form;
use crate::pipeline::{run_pipeline, PipelineConfig, PipelineOutcome};
use crate::state::{GaussianState, StandardFormParams};
use crate::SN;

/// Standard-form OPO state, `a = b = 0.72`, `c1 = −c2 = 0.51`.
pub const SIGMA2_EXP: &str = include_str!("../fixtures/sigma2_exp.toml");
/// Four-mode vacuum on the q-plate output register.
pub const VACUUM4: &str = include_str!("../fixtures/vacuum4.toml");
/// Exact balanced q-plate output for [`SIGMA2_EXP`].
pub const SIGMA4_EXACT: &str = include_str!("../fixtures/sigma4_exact.toml");
/// The published two-decimal four-mode matrix, including its misprinted cell.
pub const SIGMA4_PRINTED: &str = include_str!("../fixtures/sigma4_printed.csv");
/// Source → waveplate → vacuum partners → q-plate(1/2, π/2), all analyses.
pub const REPRODUCE_PAPER: &str = include_str!("../fixtures/reproduce_paper.toml");

/// Names accepted by [`fixture_state`].
pub const STATE_FIXTURES: [&str; 3] = ["sigma2_exp", "vacuum4", "sigma4_exact"];

/// Misprinted entry of [`SIGMA4_PRINTED`] (0-based row, column). It reads
/// 0.60; the correct value is 0.
pub const PRINTED_TYPO_CELL: (usize, usize) = (3, 2);

pub fn fixture_state(name: &str) -> Result<GaussianState> {
    let text = match name {
        "sigma2_exp" => SIGMA2_EXP,
        "vacuum4" => VACUUM4,
        "sigma4_exact" => SIGMA4_EXACT,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown fixture {other:?} (available: {})",
                STATE_FIXTURES.join(", ")
            )))
        }
    };
    io::parse_state(text, Path::new(name), LoadOptions::default())
}

/// The printed matrix as published, typo included.
pub fn printed_sigma4() -> DMatrix<f64> {
    io::parse_matrix_csv(SIGMA4_PRINTED, Path::new("sigma4_printed.csv"))
        .expect("bundled CSV parses")
}

pub fn reproduce_paper_config() -> PipelineConfig {
    PipelineConfig::from_toml(REPRODUCE_PAPER, Path::new("reproduce_paper.toml"))
        .expect("bundled config parses")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrintedComparison {
    /// Largest `|m − printed|` over every cell except the typo cell.
    pub max_deviation: f64,
    /// `|m|` at the typo cell, i.e. the deviation from its correct value 0.
    pub typo_cell_deviation: f64,
}

impl PrintedComparison {
    pub fn within(&self, tol: f64) -> bool {
        self.max_deviation <= tol && self.typo_cell_deviation <= tol
    }
}

/// Compares an 8×8 matrix with the printed one, checking the typo cell
/// against 0.
pub fn compare_with_printed(m: &DMatrix<f64>) -> Result<PrintedComparison> {
    let mut printed = printed_sigma4();
    if m.shape() != printed.shape() {
        return Err(Error::DimensionMismatch {
            expected: printed.nrows(),
            found: m.nrows(),
        });
    }
    let cell = PRINTED_TYPO_CELL;
    let typo_cell_deviation = m[cell].abs();
    printed[cell] = m[cell];
    Ok(PrintedComparison {
        max_deviation: max_abs_diff(m, &printed),
        typo_cell_deviation,
    })
}

/// The bundled reproduction run together with its matrix checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reproduction {
    pub outcome: PipelineOutcome,
    /// Max entrywise gap between the pipeline output and the closed form.
    pub closed_form_deviation: f64,
    pub printed: PrintedComparison,
}

/// Runs [`REPRODUCE_PAPER`] and compares its output matrix with the closed
/// form and the printed matrix. Uses only bundled inputs.
pub fn reproduce_paper(options: AnalysisOptions) -> Result<Reproduction> {
    let outcome = run_pipeline(&reproduce_paper_config(), options)?;
    let cov = outcome.final_state().cov();
    let closed = sigma4_closed_form(StandardFormParams::experimental(), SN);
    Ok(Reproduction {
        closed_form_deviation: max_abs_diff(cov, &closed),
        printed: compare_with_printed(cov)?,
        outcome,
    })
}
