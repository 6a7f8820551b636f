//! `qplate`: validate, transform and analyze Gaussian covariance matrices.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qplate_core::{
    analyze, emit_outcome, emit_report, emit_reproduction, load_cov_csv, load_state_with,
    reproduce_paper, run_steps, save_state, AnalysisOptions, Error, Format, GaussianState,
    IterativeOptions, LoadOptions, ModeLabel, ModeRegister, PipelineConfig,
};

#[derive(Parser)]
#[command(name = "qplate", version, about)]
struct Cli {
    /// Stopping tolerance of the iterative separability criterion.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Iteration cap of the iterative separability criterion.
    #[arg(long, global = true, default_value_t = 1000)]
    max_iter: u32,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check symmetry and the uncertainty principle.
    Validate(Input),
    /// Run the steps of a pipeline config on a state file.
    Transform {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        config: PathBuf,
        /// Write the final state here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entanglement of pairs and bipartitions. Runs both when neither flag
    /// is given.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        pairs: bool,
        #[arg(long)]
        scan: bool,
    },
    /// Run the bundled OPO → q-plate reproduction.
    ReproducePaper {
        /// Shorthand for `--format json`.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct Input {
    /// State file (TOML) or bare covariance matrix (.csv, needs --modes).
    file: PathBuf,
    /// Register for CSV input, e.g. `a:H:0,b:V:0`.
    #[arg(long, value_delimiter = ',')]
    modes: Vec<String>,
    /// Rescale files written with a vacuum variance other than 1/2.
    #[arg(long)]
    rescale: bool,
}

impl Input {
    fn load(&self, require_physical: bool) -> Result<GaussianState, Error> {
        let is_csv = self
            .file
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        if is_csv {
            if self.modes.is_empty() {
                return Err(Error::InvalidParameter("CSV input needs --modes".into()));
            }
            let labels = self
                .modes
                .iter()
                .map(|m| m.parse::<ModeLabel>())
                .collect::<Result<Vec<_>, _>>()?;
            return load_cov_csv(&self.file, ModeRegister::new(labels)?);
        }
        load_state_with(
            &self.file,
            LoadOptions {
                rescale: self.rescale,
                require_physical,
            },
        )
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Step { .. } => 3,
        Error::NumericalFailure(_)
        | Error::ConvergenceStall { .. }
        | Error::NonPositiveDeterminant { .. } => 4,
        _ => 2,
    }
}

fn validate(input: &Input, format: Format) -> Result<String, Error> {
    let state = input.load(false)?;
    let report = state.validate();
    let text = match format {
        Format::Json => format!(
            "{{\"modes\": {}, \"symmetric\": {}, \"physical\": {}, \"min_heisenberg_eigenvalue\": {:e}}}\n",
            state.num_modes(),
            report.symmetric,
            report.physical,
            report.min_heisenberg_eigenvalue
        ),
        Format::Text => format!(
            "{}: {} modes [{}]\nsymmetric {}  physical {}  min eig(Σ+iΩ/2) {:.3e}\n",
            input.file.display(),
            state.num_modes(),
            state.register(),
            report.symmetric,
            report.physical,
            report.min_heisenberg_eigenvalue
        ),
    };
    if !report.physical {
        print!("{text}");
        return Err(Error::PhysicalityViolation {
            min_eigenvalue: report.min_heisenberg_eigenvalue,
        });
    }
    Ok(text)
}

fn transform(
    input: &Input,
    config: &Path,
    out: Option<&Path>,
    format: Format,
    options: AnalysisOptions,
) -> Result<String, Error> {
    let state = input.load(true)?;
    let config = PipelineConfig::load(config)?;
    let outcome = run_steps(state, &config, options)?;
    if let Some(path) = out {
        save_state(outcome.final_state(), path)?;
    }
    Ok(emit_outcome(&outcome, format))
}

fn run(cli: Cli) -> Result<String, Error> {
    let options = AnalysisOptions {
        iterative: IterativeOptions {
            max_iter: cli.max_iter,
            tol: cli.tol,
        },
    };
    let format = match cli.format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Json => Format::Json,
    };
    match &cli.command {
        Command::Validate(input) => validate(input, format),
        Command::Transform { input, config, out } => {
            transform(input, config, out.as_deref(), format, options)
        }
        Command::Analyze { input, pairs, scan } => {
            let state = input.load(true)?;
            let (pairs, scan) = if *pairs || *scan {
                (*pairs, *scan)
            } else {
                (true, true)
            };
            Ok(emit_report(&analyze(&state, pairs, scan, options)?, format))
        }
        Command::ReproducePaper { json } => {
            let format = if *json { Format::Json } else { format };
            Ok(emit_reproduction(&reproduce_paper(options)?, format))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
