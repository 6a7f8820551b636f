//! Continuous-variable Gaussian states over polarization/OAM-labeled modes.
//!
//! The crate models the covariance matrix of a multimode Gaussian state,
//! pushes a two-mode OPO state through a quarter-wave plate and a q-plate to
//! spread its entanglement over four co-propagating modes, and decides the
//! entanglement of every pair and bipartition of the result.
//!
//! ```
//! use qplate_core::{distribute, make_standard_form, pairwise_entanglement_map, QPlateSpec, StandardFormParams, Status};
//!
//! let source = make_standard_form(StandardFormParams::experimental()).unwrap();
//! let four = distribute(&source, &QPlateSpec::balanced()).unwrap();
//! let table = pairwise_entanglement_map(&four).unwrap();
//! assert_eq!(table.count(Status::Entangled), 4);
//! ```

pub mod entanglement;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod mode;
pub mod optics;
pub mod pipeline;
pub mod report;
pub mod state;

/// Vacuum variance of each quadrature.
pub const SN: f64 = 0.5;
/// Max absolute asymmetry tolerated in a covariance matrix (scaled by the
/// largest entry when that exceeds one).
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Lowest admissible eigenvalue of `Σ + iΩ/2`.
pub const PHYSICALITY_FLOOR: f64 = 1e-9;
/// One-sided band below `SN` a witness must clear to count as entangled.
pub const ENTANGLEMENT_BAND: f64 = 1e-9;
/// Tolerance on `SΩSᵀ = Ω` and `SSᵀ = I`.
pub const TRANSFORM_TOL: f64 = 1e-12;

pub use entanglement::{
    analyze, bipartition_scan, iterative_separability, pairwise_entanglement_map,
    partial_transpose, ppt_verdict, AnalysisOptions, Bipartition, BipartitionVerdict,
    EntanglementReport, EntanglementVerdict, IterativeOptions, Method, PairwiseTable, Status,
};
pub use error::{Error, Result};
pub use fixtures::{reproduce_paper, Reproduction};
pub use io::{load_cov_csv, load_state, load_state_with, save_state, LoadOptions};
pub use linalg::{symplectic_eigenvalues, symplectic_form};
pub use mode::{ModeLabel, ModeRegister, Polarization};
pub use optics::{
    apply, distribute, embed_with_vacua, opo_source, qplate_transform, quarter_waveplate_relabel,
    sigma4_closed_form, uniform_loss, QPlateSpec, SymplecticTransform,
};
pub use pipeline::{run_pipeline, run_steps, PipelineConfig, PipelineOutcome};
pub use report::{emit_outcome, emit_report, emit_reproduction, Format};
pub use state::{make_standard_form, GaussianState, StandardFormParams, ValidityReport};
