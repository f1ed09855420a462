use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use solartwin_core::diffusion::Case;
use solartwin_core::pv::Period;

mod config;
mod stages;

use config::RunConfig;
use stages::{Ctx, MissingArtifact, PreprocessAction};

/// Synthetic rooftop-solar population and generation profiles.
#[derive(Parser, Debug)]
#[command(name = "solartwin", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Threads for profile generation. Outputs do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// `date:YYYY-MM-DD`, `week:YYYY-Www` (ISO week), `month:YYYY-MM` or `year:YYYY`.
    #[arg(long, global = true)]
    period: Option<Period>,
    /// Run only this diffusion case (1a, 1b, 2a, 2b, 3, 4, 5).
    #[arg(long, global = true)]
    case: Option<Case>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Write a synthetic toy dataset to the data directory.
    Toygen,
    /// Rebalance the survey datasets.
    Preprocess {
        #[arg(value_enum, default_value = "all")]
        action: PreprocessAction,
    },
    /// Predict square-footage classes for the population.
    ClassifySqft,
    /// Draw square-footage values within each class.
    EstimateSqft,
    /// Fit the adoption classifier to the state targets.
    Calibrate,
    /// Hourly generation profiles for adopters.
    Generate,
    /// Compare synthetic against reference profiles.
    Validate,
    /// Run the adoption diffusion scenarios.
    Simulate,
    /// Every stage in order, starting from toygen.
    Pipeline,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Toygen => "toygen",
            Command::Preprocess { .. } => "preprocess",
            Command::ClassifySqft => "classify-sqft",
            Command::EstimateSqft => "estimate-sqft",
            Command::Calibrate => "calibrate",
            Command::Generate => "generate",
            Command::Validate => "validate",
            Command::Simulate => "simulate",
            Command::Pipeline => "pipeline",
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    let ctx = Ctx::new(cfg, cli.period, cli.case)?;
    match cli.command {
        Command::Toygen => stages::cmd_toygen(&ctx),
        Command::Preprocess { action } => stages::cmd_preprocess(&ctx, action),
        Command::ClassifySqft => stages::cmd_classify_sqft(&ctx),
        Command::EstimateSqft => stages::cmd_estimate_sqft(&ctx),
        Command::Calibrate => stages::cmd_calibrate(&ctx),
        Command::Generate => stages::cmd_generate(&ctx),
        Command::Validate => stages::cmd_validate(&ctx),
        Command::Simulate => stages::cmd_simulate(&ctx),
        Command::Pipeline => stages::cmd_pipeline(&ctx),
    }
}

/// Short machine-readable error category and whether it is a configuration problem.
fn classify(err: &anyhow::Error) -> (&'static str, bool) {
    use solartwin_core::Error;
    for cause in err.chain() {
        if cause.downcast_ref::<MissingArtifact>().is_some() {
            return ("missing_file", false);
        }
        if cause.downcast_ref::<toml::de::Error>().is_some() {
            return ("config", true);
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Config(_) => ("config", true),
                Error::Data(_) => ("data", false),
                Error::InvalidInput(_) => ("invalid_input", false),
                Error::OutOfDomain { .. } => ("out_of_domain", false),
                Error::Numerical(_) => ("numerical", false),
                Error::Calibration { .. } => ("calibration", false),
                Error::MissingField { .. } => ("missing_field", false),
                Error::MissingIrradiance { .. } => ("missing_irradiance", false),
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return ("io", false);
        }
    }
    ("other", false)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SOLARTWIN_LOG", "info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.kind().to_string();
            let detail = e.to_string();
            let first = detail.lines().next().unwrap_or(&msg).trim_start_matches("error: ");
            eprintln!("error stage=cli kind=usage msg={first}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, config) = classify(&e);
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error stage={} kind={kind} msg={msg}", cli.command.name());
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}
