use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ewi_core::harness::data::InitialData;
use ewi_core::harness::spec::StudySpec;
use ewi_core::Regime;

mod config;
mod run;

use config::{set, ConfigFile};

#[derive(Parser, Debug)]
#[command(name = "ewi-fkg", version, about = "EWI-FP solver and convergence studies for the space-fractional Klein-Gordon equation")]
struct Cli {
    /// TOML file with [model], [study], [reference] and [output] sections.
    #[arg(long, short = 'c', global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short = 'o', global = true, env = "EWI_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, short = 'j', global = true)]
    threads: Option<usize>,
    /// Repeat for more log output.
    #[arg(long, short = 'v', global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Write numbers with round-trip precision instead of 6 significant digits.
    #[arg(long, global = true)]
    full_precision: bool,
    /// Write gnuplot scripts next to the CSV files.
    #[arg(long, global = true)]
    plot: bool,
    /// Run the built-in acceptance suite and exit.
    #[arg(long)]
    check: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one configuration and write snapshots and the final field.
    ///
    /// Defaults: alpha 2, beta 1, eps 0.5, p 2, complex-power, smooth-1d,
    /// tau 0.01, N 64, t_final 1.
    Solve(Overrides),
    /// Temporal error against tau at a fixed time.
    ///
    /// Defaults: alpha 2, beta 1, eps 0.5, p 2, smooth-1d, tau 2^-4 .. 2^-8,
    /// N 64, t_final 1, reference tau 1e-4 and N 64.
    ConvergeTime(Overrides),
    /// Spatial error against N at a fixed time.
    ///
    /// Defaults: alpha 2,1.5,1.2, beta 1, eps 0.125,0.0625, p 2, smooth-1d,
    /// tau 1e-3, N 8,16,32,64, t_final 1, reference N 128 with the same tau.
    ConvergeSpace(Overrides),
    /// Errors and their running maxima up to 1/eps^{2p}.
    ///
    /// Defaults: alpha 2,1.5,1.2, beta 1, eps 1,0.5,0.25, p 2, smooth-1d,
    /// tau 0.01, N 64, reference tau 1e-3 and N 64, sample-every 1,
    /// max-steps 1e7.
    LongTime(Overrides),
    /// Relative energy deviation over time.
    ///
    /// Defaults: alpha 2,1.5,1.2, beta 1, eps 0.5, p 2, smooth-1d,
    /// tau 0.01,0.005, N 64, horizon 1/eps^{2p}, sample-every 10.
    Energy(Overrides),
    /// The eps x lambda error table of the oscillatory equation.
    ///
    /// Defaults: alpha 2, beta 1, p 1, complex-1d, eps 1 .. 1/16 (halving),
    /// lambda 0.05 .. 0.05/4^4, N 128, r = 1, reference step 1e-4 in
    /// unscaled time and N 128.
    OscillatoryTable(Overrides),
    /// Field snapshots of the 2D real cubic problem.
    ///
    /// Defaults: alpha 2,1.7,1.4,1.1, beta 1, eps 1/sqrt(128), smooth-2d,
    /// tau 0.01, N 32,64, times 0,2,8,32,128.
    Dump2d(Overrides),
}

/// Study parameters; lists are comma separated.
#[derive(Args, Debug, Clone, Default)]
pub struct Overrides {
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Time steps (lambda for the oscillatory table).
    #[arg(long, value_delimiter = ',')]
    tau: Option<Vec<f64>>,
    /// Grid sizes; one per axis for dump-2d.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    p: Option<u32>,
    /// real-cubic or complex-power (solve only).
    #[arg(long)]
    regime: Option<String>,
    /// smooth-1d, smooth-2d or complex-1d.
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Dump times for dump-2d.
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    #[arg(long)]
    ref_tau: Option<f64>,
    #[arg(long)]
    ref_n: Option<usize>,
    #[arg(long)]
    sample_every: Option<usize>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Keep every k-th state in `solve` output (0: endpoints only).
    #[arg(long, default_value_t = 0)]
    snapshot_stride: usize,
}

fn parse_data(name: &str) -> Result<InitialData> {
    Ok(match name {
        "smooth-1d" => InitialData::Smooth1d,
        "smooth-2d" => InitialData::Smooth2d,
        "complex-1d" => InitialData::Complex1d,
        other => bail!("invalid value for data: {other:?} (expected smooth-1d, smooth-2d or complex-1d)"),
    })
}

fn parse_regime(name: &str) -> Result<Regime> {
    Ok(match name {
        "real-cubic" => Regime::RealCubic,
        "complex-power" => Regime::ComplexPower,
        "oscillatory" => Regime::Oscillatory,
        other => bail!("invalid value for regime: {other:?}"),
    })
}

impl Overrides {
    fn apply(&self, spec: &mut StudySpec) -> Result<()> {
        set(&mut spec.alphas, &self.alpha);
        set(&mut spec.eps, &self.eps);
        set(&mut spec.steps, &self.tau);
        set(&mut spec.sizes, &self.n);
        set(&mut spec.params.beta, &self.beta);
        set(&mut spec.params.p, &self.p);
        set(&mut spec.dump_times, &self.times);
        set(&mut spec.reference.tau, &self.ref_tau);
        set(&mut spec.reference.n, &self.ref_n);
        set(&mut spec.sample_every, &self.sample_every);
        set(&mut spec.max_steps, &self.max_steps);
        if self.t_final.is_some() {
            spec.t_final = self.t_final;
        }
        if let Some(name) = &self.data {
            spec.data = parse_data(name)?;
        }
        if let Some(name) = &self.regime {
            spec.params.regime = parse_regime(name)?;
        }
        Ok(())
    }
}

/// Preset for a subcommand, then config file, then flags.
fn build_spec(command: &Command, file: &ConfigFile) -> Result<(StudySpec, Overrides)> {
    let (mut spec, flags) = match command {
        Command::Solve(o) => {
            let mut spec = StudySpec::temporal(2.0, 0.5)?;
            spec.steps = vec![1e-2];
            (spec, o)
        }
        Command::ConvergeTime(o) => (StudySpec::temporal(2.0, 0.5)?, o),
        Command::ConvergeSpace(o) => (StudySpec::spatial(vec![2.0, 1.5, 1.2])?, o),
        Command::LongTime(o) => (StudySpec::long_time(vec![2.0, 1.5, 1.2], vec![1.0, 0.5, 0.25])?, o),
        Command::Energy(o) => (StudySpec::energy(vec![2.0, 1.5, 1.2], 0.5)?, o),
        Command::OscillatoryTable(o) => (StudySpec::oscillatory_table(2.0)?, o),
        Command::Dump2d(o) => (
            StudySpec::field_dump_2d(vec![2.0, 1.7, 1.4, 1.1], ewi_core::harness::acceptance::dump_eps())?,
            o,
        ),
    };
    file.apply(&mut spec);
    flags.apply(&mut spec)?;
    Ok((spec, flags.clone()))
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.verbose);
    match real_main(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main(cli: Cli) -> Result<ExitCode> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    let output = run::Output {
        dir: cli
            .output_dir
            .clone()
            .or_else(|| file.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from("ewi-output")),
        full_precision: cli.full_precision || file.output.full_precision.unwrap_or(false),
        plot: cli.plot || file.output.plot.unwrap_or(false),
    };
    if cli.check {
        if cli.command.is_some() {
            bail!("--check runs the acceptance suite on its own; drop the subcommand");
        }
        return run::check(&output);
    }
    let Some(command) = &cli.command else {
        bail!("no subcommand given (see --help)");
    };
    let (spec, flags) = build_spec(command, &file)?;
    output.prepare()?;
    match command {
        Command::Solve(_) => run::solve(&spec, flags.snapshot_stride, &output)?,
        Command::ConvergeTime(_) => run::converge_time(&spec, &output)?,
        Command::ConvergeSpace(_) => run::converge_space(&spec, &output)?,
        Command::LongTime(_) => run::long_time(&spec, &output)?,
        Command::Energy(_) => run::energy(&spec, &output)?,
        Command::OscillatoryTable(_) => run::oscillatory_table(&spec, &output)?,
        Command::Dump2d(_) => run::dump_2d(&spec, &output)?,
    }
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_in_configs_are_valid() {
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        let o = Overrides::default;
        let cases = [
            ("solve.toml", Command::Solve(o())),
            ("converge_time.toml", Command::ConvergeTime(o())),
            ("converge_space.toml", Command::ConvergeSpace(o())),
            ("long_time.toml", Command::LongTime(o())),
            ("energy.toml", Command::Energy(o())),
            ("oscillatory_table.toml", Command::OscillatoryTable(o())),
            ("dump_2d.toml", Command::Dump2d(o())),
        ];
        for (name, command) in cases {
            let file = ConfigFile::load(&dir.join(name)).unwrap();
            let (spec, _) = build_spec(&command, &file).unwrap();
            spec.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn configs_restate_the_defaults() {
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        let o = Overrides::default;
        for (name, command) in [
            ("converge_time.toml", Command::ConvergeTime(o())),
            ("converge_space.toml", Command::ConvergeSpace(o())),
            ("long_time.toml", Command::LongTime(o())),
            ("energy.toml", Command::Energy(o())),
            ("oscillatory_table.toml", Command::OscillatoryTable(o())),
            ("dump_2d.toml", Command::Dump2d(o())),
        ] {
            let (preset, _) = build_spec(&command, &ConfigFile::default()).unwrap();
            let (from_file, _) = build_spec(&command, &ConfigFile::load(&dir.join(name)).unwrap()).unwrap();
            assert_eq!(preset, from_file, "{name}");
        }
    }
}
