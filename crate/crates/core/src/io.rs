//! On-disk state files and CSV covariance import.
//!
//! A state file is TOML:
//!
//! ```toml
//! [convention]
//! sn = 0.5
//! ordering = "interleaved"
//!
//! [[modes]]
//! tag = "a"
//! polarization = "H"
//! oam = 0
//!
//! [moments]
//! mean = [0.0, 0.0]
//! cov = [[0.72, 0.0], [0.0, 0.72]]
//! ```
//!
//! Files written by [`save_state`] always use `sn = 0.5` and interleaved
//! ordering. On load, `ordering = "blocked"` (all X first, then all Y) is
//! converted, and a different `sn` is either rescaled or rejected.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mode::{ModeLabel, ModeRegister};
use crate::state::GaussianState;
use crate::SN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// `(X1, Y1, X2, Y2, …)`
    Interleaved,
    /// `(X1, X2, …, Y1, Y2, …)`
    Blocked,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Convention {
    sn: f64,
    ordering: Ordering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Moments {
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    convention: Convention,
    modes: Vec<ModeLabel>,
    moments: Moments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    /// Rescale files written with a different vacuum variance instead of
    /// rejecting them.
    pub rescale: bool,
    /// Reject states violating `Σ + iΩ/2 ≥ 0`. Symmetry is always checked.
    pub require_physical: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            rescale: false,
            require_physical: true,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_state(path: impl AsRef<Path>) -> Result<GaussianState> {
    load_state_with(path, LoadOptions::default())
}

pub fn load_state_with(path: impl AsRef<Path>, options: LoadOptions) -> Result<GaussianState> {
    let path = path.as_ref();
    parse_state(&read(path)?, path, options)
}

/// Parses state-file text; `origin` only labels diagnostics.
pub fn parse_state(text: &str, origin: &Path, options: LoadOptions) -> Result<GaussianState> {
    let file: StateFile = toml::from_str(text).map_err(|e| Error::parse(origin, e.to_string()))?;
    let Convention { sn, ordering } = file.convention;
    if !(sn.is_finite() && sn > 0.0) {
        return Err(Error::parse(
            origin,
            format!("convention.sn = {sn} must be positive"),
        ));
    }
    if sn != SN && !options.rescale {
        return Err(Error::ConventionMismatch { sn });
    }
    let register = ModeRegister::new(file.modes)?;
    let dim = 2 * register.len();
    let Moments { mean, cov } = file.moments;
    if cov.len() != dim {
        return Err(Error::parse(
            origin,
            format!(
                "moments.cov has {} rows, expected {dim} for {} modes",
                cov.len(),
                register.len()
            ),
        ));
    }
    if let Some((i, row)) = cov.iter().enumerate().find(|(_, row)| row.len() != dim) {
        return Err(Error::parse(
            origin,
            format!(
                "moments.cov row {i} has {} entries, expected {dim}",
                row.len()
            ),
        ));
    }
    if mean.len() != dim {
        return Err(Error::parse(
            origin,
            format!("moments.mean has {} entries, expected {dim}", mean.len()),
        ));
    }
    let mut cov = DMatrix::from_fn(dim, dim, |i, j| cov[i][j]);
    let mut mean = DVector::from_vec(mean);
    if ordering == Ordering::Blocked {
        let n = register.len();
        let src = |k: usize| if k.is_multiple_of(2) { k / 2 } else { n + k / 2 };
        cov = DMatrix::from_fn(dim, dim, |i, j| cov[(src(i), src(j))]);
        mean = DVector::from_fn(dim, |i, _| mean[src(i)]);
    }
    if sn != SN {
        let ratio = SN / sn;
        cov *= ratio;
        mean *= ratio.sqrt();
    }
    let state = GaussianState::new(register, mean, cov)?;
    if options.require_physical {
        state.into_physical()
    } else {
        let report = state.validate();
        if !report.symmetric {
            return Err(Error::NotSymmetric {
                max_asymmetry: crate::linalg::max_asymmetry(state.cov()),
            });
        }
        Ok(state)
    }
}

/// Canonical TOML text for `state`.
pub fn state_to_string(state: &GaussianState) -> String {
    let cov = state.cov();
    let file = StateFile {
        convention: Convention {
            sn: SN,
            ordering: Ordering::Interleaved,
        },
        modes: state.register().modes().to_vec(),
        moments: Moments {
            mean: state.mean().iter().copied().collect(),
            cov: cov
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
        },
    };
    toml::to_string(&file).expect("state file serializes")
}

pub fn save_state(state: &GaussianState, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &state_to_string(state))
}

/// Reads a bare covariance matrix from CSV (`#` starts a comment line) and
/// attaches `register` with zero mean. Values are taken in the canonical
/// convention.
pub fn load_cov_csv(path: impl AsRef<Path>, register: ModeRegister) -> Result<GaussianState> {
    let path = path.as_ref();
    let cov = parse_matrix_csv(&read(path)?, path)?;
    GaussianState::zero_mean(register, cov)?.into_physical()
}

/// Square matrix from CSV text, without any physicality check.
pub fn parse_matrix_csv(text: &str, origin: &Path) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::parse(origin, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    Error::parse(origin, format!("line {line}: {field:?} is not a number"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::parse(origin, "no matrix rows"));
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::parse(
            origin,
            format!(
                "row {i} has {} entries, expected {n} for a square matrix",
                row.len()
            ),
        ));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{make_standard_form, StandardFormParams};

    const TWO_MODE: &str = r#"
[convention]
sn = 0.5
ordering = "interleaved"

[[modes]]
tag = "a"
polarization = "H"
oam = 0

[[modes]]
tag = "b"
polarization = "V"
oam = 0

[moments]
mean = [0.0, 0.0, 0.0, 0.0]
cov = [
  [0.72, 0.0, 0.51, 0.0],
  [0.0, 0.72, 0.0, -0.51],
  [0.51, 0.0, 0.72, 0.0],
  [0.0, -0.51, 0.0, 0.72],
]
"#;

    fn origin() -> &'static Path {
        Path::new("test.toml")
    }

    #[test]
    fn parses_standard_form() {
        let s = parse_state(TWO_MODE, origin(), LoadOptions::default()).unwrap();
        assert_eq!(
            s,
            make_standard_form(StandardFormParams::experimental()).unwrap()
        );
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let s = parse_state(TWO_MODE, origin(), LoadOptions::default()).unwrap();
        let again = parse_state(&state_to_string(&s), origin(), LoadOptions::default()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn missing_section_is_named() {
        let truncated = TWO_MODE.split("[moments]").next().unwrap();
        match parse_state(truncated, origin(), LoadOptions::default()) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("moments"), "{message}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn foreign_convention_is_rejected_or_rescaled() {
        let text = TWO_MODE
            .replace("sn = 0.5", "sn = 1.0")
            .replace("0.72", "1.44")
            .replace("0.51", "1.02");
        assert!(matches!(
            parse_state(&text, origin(), LoadOptions::default()),
            Err(Error::ConventionMismatch { sn }) if sn == 1.0
        ));
        let opts = LoadOptions {
            rescale: true,
            ..LoadOptions::default()
        };
        let s = parse_state(&text, origin(), opts).unwrap();
        assert!((s.cov()[(0, 0)] - 0.72).abs() < 1e-15);
        assert!((s.cov()[(1, 3)] + 0.51).abs() < 1e-15);
    }

    #[test]
    fn blocked_ordering_is_converted() {
        let text = TWO_MODE.replace("\"interleaved\"", "\"blocked\"").replace(
            "cov = [\n  [0.72, 0.0, 0.51, 0.0],\n  [0.0, 0.72, 0.0, -0.51],\n  [0.51, 0.0, 0.72, 0.0],\n  [0.0, -0.51, 0.0, 0.72],\n]",
            "cov = [[0.72, 0.51, 0.0, 0.0], [0.51, 0.72, 0.0, 0.0], [0.0, 0.0, 0.72, -0.51], [0.0, 0.0, -0.51, 0.72]]",
        );
        let s = parse_state(&text, origin(), LoadOptions::default()).unwrap();
        assert_eq!(s.cov(), &StandardFormParams::experimental().matrix());
    }

    #[test]
    fn unphysical_state_reports_min_eigenvalue() {
        let text = TWO_MODE.replace("0.72", "0.3").replace("0.51", "0.0");
        match parse_state(&text, origin(), LoadOptions::default()) {
            Err(Error::PhysicalityViolation { min_eigenvalue }) => {
                assert!((min_eigenvalue + 0.2).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        let lax = LoadOptions {
            require_physical: false,
            ..LoadOptions::default()
        };
        assert!(
            !parse_state(&text, origin(), lax)
                .unwrap()
                .validate()
                .physical
        );
    }

    #[test]
    fn ragged_rows_are_reported() {
        let text = TWO_MODE.replace("[0.0, 0.72, 0.0, -0.51]", "[0.0, 0.72, 0.0]");
        match parse_state(&text, origin(), LoadOptions::default()) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("row 1"), "{message}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_matrix() {
        let text =
            "# comment\n0.72, 0, 0.51, 0\n0, 0.72, 0, -0.51\n0.51,0,0.72,0\n0,-0.51,0,0.72\n";
        let m = parse_matrix_csv(text, origin()).unwrap();
        assert_eq!(m, StandardFormParams::experimental().matrix());
        match parse_matrix_csv("1, x\n0, 1\n", origin()) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("line 1"), "{message}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_matrix_csv("1, 0, 0\n0, 1, 0\n", origin()).is_err());
    }
}
