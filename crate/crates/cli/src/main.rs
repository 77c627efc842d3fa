use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qdyn_cli::{exit, parse_config, AnalyticSource, CliError, ModelChoice, Mode, RunConfig, RunOutcome};

#[derive(Parser)]
#[command(name = "qdyn", version, about = "Excitation dynamics of N-level ladder systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LegendreModel {
    LegendreA,
    LegendreB,
}

impl From<LegendreModel> for ModelChoice {
    fn from(m: LegendreModel) -> Self {
        match m {
            LegendreModel::LegendreA => ModelChoice::LegendreA,
            LegendreModel::LegendreB => ModelChoice::LegendreB,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Printed,
    Spectral,
}

impl From<Source> for AnalyticSource {
    fn from(s: Source) -> Self {
        match s {
            Source::Printed => AnalyticSource::Printed,
            Source::Spectral => AnalyticSource::Spectral,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the mode described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Orthogonality, three-term relation and propagator-vs-analytic checks.
    Verify {
        #[arg(long, value_enum)]
        model: LegendreModel,
        #[arg(long)]
        levels: usize,
        /// Tolerance on the propagator-vs-analytic population deviation.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value = "printed")]
        analytic: Source,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Orthogonality matrix of the Legendre-function family.
    Ortho {
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Couplings read off the analytic amplitudes at t = 0.
    Infer {
        #[arg(long, value_enum)]
        model: LegendreModel,
        #[arg(long)]
        levels: usize,
        /// Start level whose slope samples are listed in the report.
        #[arg(long)]
        initial: usize,
        #[arg(long, value_enum, default_value = "printed")]
        analytic: Source,
        /// Coupling table destination.
        #[arg(long, default_value = "couplings.csv")]
        output: PathBuf,
    },
}

fn dispatch(cmd: Command) -> Result<RunOutcome, CliError> {
    match cmd {
        Command::Run { config } => {
            let text = fs::read_to_string(&config).map_err(|e| CliError::io(&config, e))?;
            qdyn_cli::run(&parse_config(&text)?)
        }
        Command::Verify {
            model,
            levels,
            tol,
            analytic,
            report,
        } => qdyn_cli::verify(model.into(), levels, tol, analytic.into(), report.as_deref()),
        Command::Ortho { levels, tol, report } => qdyn_cli::ortho(levels, tol, report.as_deref()),
        Command::Infer {
            model,
            levels,
            initial,
            analytic,
            output,
        } => {
            let mut cfg = RunConfig::new(model.into(), levels, Mode::Infer);
            cfg.initial = initial;
            cfg.analytic = analytic.into();
            cfg.output.csv = output;
            qdyn_cli::run(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.report.render());
            for a in &outcome.artifacts {
                eprintln!("wrote {}", a.display());
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("qdyn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
