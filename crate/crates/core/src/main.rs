use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use oscnet::experiments::{
    self, parse_grid, parse_pair, Evaluation, ExperimentConfig, LocalizationSpec, PrepOverride, SweepResult, TimeGrid,
    TopologySpec,
};
use oscnet::{network, Error};

#[derive(Parser)]
#[command(
    name = "oscnet",
    version,
    about = "Entanglement dynamics in RWA-coupled oscillator networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// N(pair, ct) over the time grid for each delta.
    Timeseries(Common),
    /// N as a function of delta at a fixed ct or at the first local maximum.
    SweepDelta {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        at: EvalArgs,
    },
    /// N as a function of r at a fixed ct, one section per delta.
    SweepR {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        at: EvalArgs,
    },
    /// Check entanglement localization against the exact ring verdict.
    Localize(LocalizeArgs),
    /// Parse a topology file and print a summary.
    ParseCheck { file: PathBuf },
}

#[derive(Args)]
struct Common {
    /// Builder (`interferometric:M=38,c=0.3`, `chain:n=10,c=1`) or DSL file.
    #[arg(long, default_value = "interferometric:M=38,c=1")]
    topology: String,
    /// Time unit for DSL topologies.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Squeezing: a value, a list `a,b,c` or a range `start:stop:step`.
    #[arg(long, default_value = "1")]
    r: String,
    /// Relative squeezing angle: a value, a list or a range.
    #[arg(long, default_value = "0")]
    delta: String,
    #[arg(long, default_value_t = 80.0)]
    ct_max: f64,
    #[arg(long, default_value_t = 0.05)]
    ct_step: f64,
    /// Node pair `a,b`; `M` names the last chain oscillator.
    #[arg(long = "pair", default_value = "1,M")]
    pairs: Vec<String>,
    /// Preparation override `node=spec`.
    #[arg(long = "prep")]
    preps: Vec<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct EvalArgs {
    /// Evaluation time.
    #[arg(long, default_value_t = 58.0)]
    ct: f64,
    /// Evaluate at the first local maximum over ct < ct-max instead.
    #[arg(long, conflicts_with = "ct")]
    first_local_max: bool,
}

#[derive(Args)]
struct LocalizeArgs {
    #[arg(long, default_value = "2,4,10,38")]
    m_list: String,
    /// Squeezing values.
    #[arg(long, default_value = "1")]
    r: String,
    #[arg(long, default_value = "0.1,0.3,1")]
    c_list: String,
    #[arg(long, default_value_t = 0.01)]
    delta_step: f64,
    #[arg(long, default_value_t = 80.0)]
    ct_max: f64,
    #[arg(long, default_value_t = 0.05)]
    ct_step: f64,
    /// Skip the classical-preparation baselines.
    #[arg(long)]
    no_baselines: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Output {
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Usage(Error),
    Localize,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Localize) => ExitCode::from(2),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Timeseries(common) => {
            let config = experiment(&common, Evaluation::At(0.0))?;
            sweep(&common.output, || experiments::run_time_series(&config))
        }
        Command::SweepDelta { common, at } => {
            let config = experiment(&common, evaluation(&at))?;
            sweep(&common.output, || experiments::sweep_delta(&config))
        }
        Command::SweepR { common, at } => {
            let config = experiment(&common, evaluation(&at))?;
            sweep(&common.output, || experiments::sweep_r(&config))
        }
        Command::Localize(args) => localize(args),
        Command::ParseCheck { file } => parse_check(&file),
    }
}

fn evaluation(at: &EvalArgs) -> Evaluation {
    if at.first_local_max {
        Evaluation::FirstLocalMax
    } else {
        Evaluation::At(at.ct)
    }
}

fn experiment(common: &Common, evaluation: Evaluation) -> Result<ExperimentConfig, Error> {
    let mut config = ExperimentConfig::new(TopologySpec::parse(&common.topology, common.c)?);
    config.squeezing = parse_grid(&common.r)?;
    config.deltas = parse_grid(&common.delta)?;
    config.grid = TimeGrid::new(common.ct_max, common.ct_step)?;
    config.pairs = common.pairs.iter().map(|p| parse_pair(p)).collect::<Result<_, _>>()?;
    config.overrides = common
        .preps
        .iter()
        .map(|p| PrepOverride::parse(p))
        .collect::<Result<_, _>>()?;
    config.evaluation = evaluation;
    Ok(config)
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, Error> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Config(e.to_string()))
}

fn sweep<F>(output: &Output, job: F) -> Result<(), Failure>
where
    F: FnOnce() -> oscnet::Result<SweepResult> + Send,
{
    let result = pool(output.threads)?.install(job)?;
    write_output(output.out.as_deref(), &result)?;
    Ok(())
}

fn write_output(path: Option<&Path>, result: &SweepResult) -> Result<(), Error> {
    match path {
        Some(path) => experiments::write_csv(result, BufWriter::new(File::create(path)?))?,
        None => experiments::write_csv(result, BufWriter::new(io::stdout().lock()))?,
    }
    Ok(())
}

fn localize(args: LocalizeArgs) -> Result<(), Failure> {
    let ms = parse_grid(&args.m_list)?
        .into_iter()
        .map(|m| {
            if m.fract() == 0.0 && m >= 0.0 {
                Ok(m as usize)
            } else {
                Err(Error::Config(format!("M must be an integer, got {m}")))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let spec = LocalizationSpec {
        ms,
        rs: parse_grid(&args.r)?,
        cs: parse_grid(&args.c_list)?,
        delta_step: args.delta_step,
        grid: TimeGrid::new(args.ct_max, args.ct_step)?,
        baselines: !args.no_baselines,
    };
    let report = pool(args.output.threads)?.install(|| experiments::localization_suite(&spec))?;
    {
        let mut err = io::stderr().lock();
        for line in report.summary() {
            let _ = writeln!(err, "{line}");
        }
    }
    if let Some(path) = &args.output.out {
        write_output(Some(path), &report.to_sweep_result())?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Localize)
    }
}

fn parse_check(file: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(file).map_err(Error::from)?;
    let net = network::parse_topology(&text).map_err(|e| Error::Config(format!("{}:{e}", file.display())))?;
    let labels = |ks: &[usize]| ks.iter().map(|&k| net.label(k)).collect::<Vec<_>>().join(",");
    println!(
        "ok: {} nodes, {} edges, references [{}], hubs [{}]",
        net.len(),
        net.edges().len(),
        labels(net.references()),
        labels(net.hubs())
    );
    Ok(())
}
