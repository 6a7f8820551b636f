//! Declarative pipelines: a source state, a list of optical steps and the
//! analyses to run on the result.
//!
//! Configs are TOML. Top-level keys must precede the tables:
//!
//! ```toml
//! analyses = ["pairwise", "scan"]
//!
//! [source]
//! kind = "standard-form"
//! a = 0.72
//! b = 0.72
//! c1 = 0.51
//! c2 = -0.51
//!
//! [[steps]]
//! op = "waveplate"
//!
//! [[steps]]
//! op = "embed-partners"
//! q = 0.5
//!
//! [[steps]]
//! op = "qplate"
//! q = 0.5
//! delta_pi = 0.5
//! ```

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::entanglement::{analyze, AnalysisOptions, EntanglementReport};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::io;
use crate::mode::ModeLabel;
use crate::optics::{self, QPlateSpec};
use crate::state::{make_standard_form, GaussianState, StandardFormParams, ValidityReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Source {
    /// State file; relative paths resolve against the config's directory.
    File {
        path: PathBuf,
    },
    StandardForm {
        a: f64,
        b: f64,
        c1: f64,
        c2: f64,
    },
    /// Two-mode squeezed vacuum behind a uniform loss `eta`.
    Opo {
        r: f64,
        #[serde(default = "unit")]
        eta: f64,
    },
    /// One of the bundled fixture states.
    Fixture {
        name: String,
    },
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Step {
    /// Quarter-wave plate: H → L, V → R.
    Waveplate,
    /// Appends vacuum modes, given as `tag:P:m`.
    Embed {
        #[serde(deserialize_with = "labels", serialize_with = "label_strings")]
        modes: Vec<ModeLabel>,
    },
    /// Appends a vacuum partner `<tag>~` for every mode of the register.
    EmbedPartners { q: f64 },
    /// Retardation in radians (`delta`) or in units of π (`delta_pi`).
    Qplate {
        q: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta_pi: Option<f64>,
    },
    /// Reorders the register by tag; every tag must appear once.
    Reorder { order: Vec<String> },
}

fn labels<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<ModeLabel>, D::Error> {
    Vec::<String>::deserialize(d)?
        .iter()
        .map(|s| s.parse().map_err(serde::de::Error::custom))
        .collect()
}

fn label_strings<S: serde::Serializer>(
    modes: &[ModeLabel],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(
        modes
            .iter()
            .map(|m| format!("{}:{}:{}", m.tag, m.polarization, m.oam)),
    )
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::Waveplate => "waveplate",
            Step::Embed { .. } => "embed",
            Step::EmbedPartners { .. } => "embed-partners",
            Step::Qplate { .. } => "qplate",
            Step::Reorder { .. } => "reorder",
        }
    }

    fn check(&self) -> std::result::Result<(), String> {
        match self {
            Step::Qplate { q, delta, delta_pi } => {
                let delta = match (delta, delta_pi) {
                    (Some(d), None) => *d,
                    (None, Some(d)) => d * PI,
                    _ => return Err("qplate needs exactly one of delta, delta_pi".into()),
                };
                QPlateSpec::new(*q, delta)
                    .map(|_| ())
                    .map_err(|e| e.to_string())
            }
            Step::EmbedPartners { q } => QPlateSpec::new(*q, 0.0)
                .map(|_| ())
                .map_err(|e| e.to_string()),
            _ => Ok(()),
        }
    }

    /// Applies the step and checks the result is a physical state.
    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        let next = match self {
            Step::Waveplate => optics::quarter_waveplate_relabel(state)?,
            Step::Embed { modes } => optics::embed_with_vacua(state, modes)?,
            Step::EmbedPartners { q } => {
                let spec = QPlateSpec::new(*q, 0.0)?;
                let vacua = optics::partner_vacua(&spec, state.register())?;
                optics::embed_with_vacua(state, &vacua)?
            }
            Step::Qplate { q, delta, delta_pi } => {
                let delta = delta.unwrap_or_else(|| delta_pi.unwrap_or(f64::NAN) * PI);
                let spec = QPlateSpec::new(*q, delta)?;
                optics::apply(&optics::qplate_transform(&spec, state.register())?, state)?
            }
            Step::Reorder { order } => {
                let register = state.register();
                let perm = order
                    .iter()
                    .map(|tag| {
                        register.position_of_tag(tag).ok_or_else(|| {
                            Error::InvalidParameter(format!("no mode tagged {tag:?}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                state.reorder(&perm)?
            }
        };
        next.into_physical()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Validate,
    Pairwise,
    Scan,
    Purity,
    Photons,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub analyses: Vec<Analysis>,
    /// Optional when the input state is supplied separately.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Source>,
    #[serde(default)]
    pub steps: Vec<Step>,
}

impl PipelineConfig {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::parse(origin, e.to_string()))?;
        for (index, step) in config.steps.iter().enumerate() {
            step.check().map_err(|msg| {
                Error::parse(origin, format!("steps[{index}] ({}): {msg}", step.name()))
            })?;
        }
        Ok(config)
    }

    /// Loads a config file, resolving a relative source path against the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::from_toml(&text, path)?;
        if let Some(Source::File { path: src }) = &mut config.source {
            if src.is_relative() {
                if let Some(dir) = path.parent() {
                    *src = dir.join(&*src);
                }
            }
        }
        Ok(config)
    }

    pub fn wants(&self, analysis: Analysis) -> bool {
        self.analyses.contains(&analysis)
    }
}

impl Source {
    pub fn build(&self) -> Result<GaussianState> {
        match self {
            Source::File { path } => io::load_state(path),
            &Source::StandardForm { a, b, c1, c2 } => {
                make_standard_form(StandardFormParams::new(a, b, c1, c2))
            }
            &Source::Opo { r, eta } => optics::opo_source(r, eta),
            Source::Fixture { name } => fixtures::fixture_state(name),
        }
    }
}

/// Summary of the state after one step; index 0 is the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub index: usize,
    pub name: String,
    pub modes: usize,
    pub total_photons: f64,
    pub purity: f64,
    pub min_heisenberg_eigenvalue: f64,
}

impl StepDiagnostics {
    fn of(index: usize, name: &str, state: &GaussianState) -> Result<Self> {
        Ok(Self {
            index,
            name: name.to_owned(),
            modes: state.num_modes(),
            total_photons: state.total_photon_number(),
            purity: state.purity()?,
            min_heisenberg_eigenvalue: state.validate().min_heisenberg_eigenvalue,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutcome {
    #[serde(skip)]
    pub final_state: Option<GaussianState>,
    pub diagnostics: Vec<StepDiagnostics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validity: Option<ValidityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub photons: Option<Vec<f64>>,
    pub report: EntanglementReport,
}

impl PipelineOutcome {
    pub fn final_state(&self) -> &GaussianState {
        self.final_state
            .as_ref()
            .expect("outcome produced by run_pipeline")
    }
}

/// Builds the configured source and runs the pipeline on it.
pub fn run_pipeline(config: &PipelineConfig, options: AnalysisOptions) -> Result<PipelineOutcome> {
    let source = config
        .source
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("pipeline config has no source".into()))?;
    let state = source.build().map_err(|e| Error::Step {
        index: 0,
        name: "source".into(),
        source: Box::new(e),
    })?;
    run_steps(state, config, options)
}

/// Runs the steps and analyses of `config` on `state`, ignoring
/// `config.source`. Every intermediate state must be physical; the first
/// failure is returned as [`Error::Step`] with its 1-based index.
pub fn run_steps(
    state: GaussianState,
    config: &PipelineConfig,
    options: AnalysisOptions,
) -> Result<PipelineOutcome> {
    let wrap = |index: usize, name: &str| {
        let name = name.to_owned();
        move |e: Error| Error::Step {
            index,
            name,
            source: Box::new(e),
        }
    };
    let mut state = state.into_physical().map_err(wrap(0, "source"))?;
    let mut diagnostics =
        vec![StepDiagnostics::of(0, "source", &state).map_err(wrap(0, "source"))?];
    for (k, step) in config.steps.iter().enumerate() {
        let index = k + 1;
        state = step.apply(&state).map_err(wrap(index, step.name()))?;
        diagnostics.push(
            StepDiagnostics::of(index, step.name(), &state).map_err(wrap(index, step.name()))?,
        );
    }

    let report = analyze(
        &state,
        config.wants(Analysis::Pairwise),
        config.wants(Analysis::Scan),
        options,
    )?;
    let photons = config.wants(Analysis::Photons).then(|| {
        (0..state.num_modes())
            .map(|k| state.mean_photon_number(k).expect("index in range"))
            .collect()
    });
    Ok(PipelineOutcome {
        validity: config.wants(Analysis::Validate).then(|| state.validate()),
        purity: config
            .wants(Analysis::Purity)
            .then(|| state.purity())
            .transpose()?,
        photons,
        report,
        diagnostics,
        final_state: Some(state),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::Status;

    fn config(text: &str) -> PipelineConfig {
        PipelineConfig::from_toml(text, Path::new("test.toml")).unwrap()
    }

    #[test]
    fn bundled_reproduction_config() {
        let cfg = fixtures::reproduce_paper_config();
        let out = run_pipeline(&cfg, AnalysisOptions::default()).unwrap();
        assert_eq!(
            out.final_state().register().tags(),
            ["a1", "a2", "b1", "b2"]
        );
        let table = out.report.pairwise.as_ref().unwrap();
        assert_eq!(table.count(Status::Entangled), 4);
        assert_eq!(table.count(Status::Separable), 2);
        assert_eq!(out.report.bipartitions.len(), 7);
        assert_eq!(out.diagnostics.len(), 4);
        for d in &out.diagnostics {
            assert!((d.total_photons - 0.44).abs() < 1e-12, "{d:?}");
        }
    }

    #[test]
    fn empty_steps_echo_input() {
        let cfg = config(
            "analyses = [\"validate\"]\n[source]\nkind = \"fixture\"\nname = \"sigma2_exp\"\n",
        );
        let out = run_pipeline(&cfg, AnalysisOptions::default()).unwrap();
        assert_eq!(
            out.final_state(),
            &fixtures::fixture_state("sigma2_exp").unwrap()
        );
        assert!(out.validity.unwrap().physical);
        assert!(out.report.pairwise.is_none());
    }

    #[test]
    fn vacuum_opo_is_separable_everywhere() {
        let cfg = config(
            r#"
analyses = ["pairwise", "scan"]
[source]
kind = "opo"
r = 0.0
[[steps]]
op = "waveplate"
[[steps]]
op = "embed-partners"
q = 0.5
[[steps]]
op = "qplate"
q = 0.5
delta = 1.5707963267948966
"#,
        );
        let out = run_pipeline(&cfg, AnalysisOptions::default()).unwrap();
        assert_eq!(out.report.pairwise.unwrap().count(Status::Separable), 6);
        assert!(out
            .report
            .bipartitions
            .iter()
            .all(|b| b.verdict.status == Status::Separable));
    }

    #[test]
    fn failing_step_reports_its_index() {
        // qplate before the waveplate: linear polarizations cannot couple
        let cfg = config(
            "[source]\nkind = \"fixture\"\nname = \"sigma2_exp\"\n[[steps]]\nop = \"qplate\"\nq = 0.5\ndelta_pi = 0.5\n",
        );
        match run_pipeline(&cfg, AnalysisOptions::default()) {
            Err(Error::Step {
                index: 1,
                name,
                source,
            }) => {
                assert_eq!(name, "qplate");
                assert!(matches!(*source, Error::NotCircular(_)), "{source:?}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reorder_by_tag() {
        let cfg = config(
            "[source]\nkind = \"fixture\"\nname = \"sigma2_exp\"\n[[steps]]\nop = \"reorder\"\norder = [\"b\", \"a\"]\n",
        );
        let out = run_pipeline(&cfg, AnalysisOptions::default()).unwrap();
        assert_eq!(out.final_state().register().tags(), ["b", "a"]);
        let bad = config(
            "[source]\nkind = \"fixture\"\nname = \"sigma2_exp\"\n[[steps]]\nop = \"reorder\"\norder = [\"b\", \"z\"]\n",
        );
        assert!(matches!(
            run_pipeline(&bad, AnalysisOptions::default()),
            Err(Error::Step { index: 1, .. })
        ));
    }

    #[test]
    fn config_errors_are_parse_errors() {
        let origin = Path::new("bad.toml");
        let both = "[source]\nkind = \"opo\"\nr = 0.1\n[[steps]]\nop = \"qplate\"\nq = 0.5\ndelta = 1.0\ndelta_pi = 0.5\n";
        assert!(matches!(
            PipelineConfig::from_toml(both, origin),
            Err(Error::Parse { .. })
        ));
        let bad_mode = "[[steps]]\nop = \"embed\"\nmodes = [\"a~:Q:1\"]\n";
        assert!(matches!(
            PipelineConfig::from_toml(bad_mode, origin),
            Err(Error::Parse { .. })
        ));
        let unknown = "[[steps]]\nop = \"mirror\"\n";
        assert!(matches!(
            PipelineConfig::from_toml(unknown, origin),
            Err(Error::Parse { .. })
        ));
        let no_source = PipelineConfig::from_toml("", origin).unwrap();
        assert!(run_pipeline(&no_source, AnalysisOptions::default()).is_err());
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = fixtures::reproduce_paper_config();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(config(&text), cfg);
    }
}
