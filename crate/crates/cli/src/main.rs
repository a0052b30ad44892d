//! Command-line surface of the simulator.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 self-test or
//! invariant failure.

use clap::{Args, Parser, Subcommand};
use std::fmt;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use tilecache_cli::harness::{self, run_sweep, EngineChoice, ExperimentConfig, Policy, SweepAxis};
use tilecache_cli::output::{self, Format};
use tilecache_cli::tracefile;
use tilecache_core::bounds::{bounds_report, TileShape};
use tilecache_core::engine::Replay;
use tilecache_core::trace::{generate_trace, AccessEvent, BlockSpec, IdScheme};

#[derive(Parser)]
#[command(
    name = "tilecache",
    version,
    about = "Trace-driven cache simulator for blocked matrix multiplication"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one blocked-matmul configuration and report reads/writes.
    Simulate(SimulateArgs),
    /// Sweep one dimension across policies and emit one row per point.
    Sweep(SweepArgs),
    /// Report lower bounds, optimal block sizes and predicted I/O.
    Bounds(BoundsArgs),
    /// Run the built-in verification vectors.
    Selftest,
    /// Replay a trace file through a chosen policy.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Matrix dimension.
    #[arg(long)]
    n: u32,
    /// Cache capacity in entries.
    #[arg(long)]
    cache: u32,
    #[arg(long)]
    bi: u32,
    #[arg(long)]
    bj: u32,
    #[arg(long)]
    bk: u32,
    #[arg(long, value_enum)]
    policy: Policy,
    #[arg(long, value_enum, default_value_t = EngineChoice::Fast)]
    engine: EngineChoice,
    /// Stream `event_index,reads,writes` rows while replaying.
    #[arg(long)]
    checkpoints: bool,
    /// Also write the generated trace to a file.
    #[arg(long, value_name = "FILE")]
    trace_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    /// Swept dimension: the matrix size, the k stride, or b = bi = bj.
    #[arg(long, value_parser = ["n", "bk", "b"])]
    axis: String,
    /// Inclusive range `<start>:<stop>[:<step>]`.
    #[arg(long)]
    range: String,
    #[arg(long)]
    cache: u32,
    /// Fixed matrix dimension (axes bk and b).
    #[arg(long)]
    n: Option<u32>,
    /// Fixed i stride (axes n and bk).
    #[arg(long)]
    bi: Option<u32>,
    /// Fixed j stride (axes n and bk).
    #[arg(long)]
    bj: Option<u32>,
    /// Fixed k stride (axes n and b).
    #[arg(long)]
    bk: Option<u32>,
    /// Comma-separated policy list.
    #[arg(long, value_delimiter = ',', required = true)]
    policies: Vec<Policy>,
    #[arg(long, value_enum, default_value_t = EngineChoice::Fast)]
    engine: EngineChoice,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to a file instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    cache: u32,
    /// Also evaluate the `b x b x alpha` shape for this alpha.
    #[arg(long)]
    alpha: Option<u32>,
}

#[derive(Args)]
struct ReplayArgs {
    /// Trace file to replay.
    #[arg(long, value_name = "FILE")]
    trace: PathBuf,
    #[arg(long)]
    cache: u32,
    /// Cache policy; pinning lives in the trace, so pinned-lru replays as lru.
    #[arg(long, value_enum)]
    policy: Policy,
    #[arg(long, value_enum, default_value_t = EngineChoice::Fast)]
    engine: EngineChoice,
    #[arg(long)]
    checkpoints: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

enum CliError {
    /// Configuration or IO problem: exit 1.
    Config(String),
    /// Self-test failure: exit 2.
    SelfTest,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::SelfTest => write!(f, "self-test failed"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn config_err(e: impl fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not errors
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::SelfTest) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Sweep(args) => sweep(args),
        Command::Bounds(args) => bounds(args),
        Command::Selftest => selftest(),
        Command::Replay(args) => replay(args),
    }
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let block = BlockSpec::new(args.bi, args.bj, args.bk).map_err(config_err)?;
    block.validate_for(args.n).map_err(config_err)?;
    let trace = match args.policy.pinned() {
        Some(p) => tilecache_core::trace::generate_pinned_trace_with(args.n, block, p)
            .map_err(config_err)?,
        None => generate_trace(args.n, block).map_err(config_err)?,
    };
    if let Some(path) = &args.trace_out {
        tracefile::write_path(path, &trace)?;
    }
    let result = replay_events(
        &trace.events,
        trace.id_scheme().id_space(),
        args.cache,
        args.policy.engine_kind(args.engine),
        args.checkpoints,
    )?;
    print!("{}", render_result(&result, args.format));
    Ok(())
}

fn replay(args: ReplayArgs) -> Result<(), CliError> {
    let (n, events) = tracefile::read_path(&args.trace).map_err(config_err)?;
    let scheme = IdScheme::new(n).map_err(config_err)?;
    let result = replay_events(
        &events,
        scheme.id_space(),
        args.cache,
        args.policy.engine_kind(args.engine),
        args.checkpoints,
    )?;
    print!("{}", render_result(&result, args.format));
    Ok(())
}

fn replay_events(
    events: &[AccessEvent],
    id_space: u32,
    capacity: u32,
    kind: tilecache_core::engine::EngineKind,
    checkpoints: bool,
) -> Result<tilecache_core::engine::SimResult, CliError> {
    let mut replay = Replay::new(kind, capacity, id_space).map_err(config_err)?;
    if checkpoints {
        let stdout = io::stdout().lock();
        let mut out = BufWriter::new(stdout);
        writeln!(out, "event_index,reads,writes")?;
        for &ev in events {
            replay.feed(ev).map_err(config_err)?;
            writeln!(
                out,
                "{},{},{}",
                replay.events(),
                replay.reads(),
                replay.writes()
            )?;
        }
        out.flush()?;
    } else {
        for &ev in events {
            replay.feed(ev).map_err(config_err)?;
        }
    }
    Ok(replay.finish())
}

fn render_result(result: &tilecache_core::engine::SimResult, format: Format) -> String {
    match format {
        Format::Csv => output::sim_result_csv(result),
        Format::Json => output::sim_result_json(result),
    }
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let (start, stop, step) = parse_range(&args.range)?;
    let axis = build_axis(&args)?;
    let cfg = ExperimentConfig {
        capacity: args.cache,
        axis,
        start,
        stop,
        step,
        policies: args.policies.clone(),
        engine: args.engine,
    };
    let out = run_sweep(&cfg).map_err(config_err)?;
    for warning in &out.warnings {
        eprintln!("warning: {warning}");
    }
    let rendered = match args.format {
        Format::Csv => output::sweep_csv(&out.rows),
        Format::Json => output::sweep_json(&out.rows),
    };
    match &args.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn build_axis(args: &SweepArgs) -> Result<SweepAxis, CliError> {
    let forbid = |flag: Option<u32>, name: &str| {
        if flag.is_some() {
            Err(CliError::Config(format!(
                "--{name} conflicts with --axis {}: that dimension is swept",
                args.axis
            )))
        } else {
            Ok(())
        }
    };
    let require_n = || {
        args.n
            .ok_or_else(|| CliError::Config(format!("--axis {} needs a fixed --n", args.axis)))
    };
    match args.axis.as_str() {
        "n" => {
            forbid(args.n, "n")?;
            let block = BlockSpec::new(
                args.bi.unwrap_or(1),
                args.bj.unwrap_or(1),
                args.bk.unwrap_or(1),
            )
            .map_err(config_err)?;
            Ok(SweepAxis::N { block })
        }
        "bk" => {
            forbid(args.bk, "bk")?;
            Ok(SweepAxis::Bk {
                n: require_n()?,
                bi: args.bi.unwrap_or(1),
                bj: args.bj.unwrap_or(1),
            })
        }
        "b" => {
            forbid(args.bi, "bi")?;
            forbid(args.bj, "bj")?;
            Ok(SweepAxis::B {
                n: require_n()?,
                bk: args.bk.unwrap_or(1),
            })
        }
        other => Err(CliError::Config(format!("unknown axis `{other}`"))),
    }
}

fn parse_range(text: &str) -> Result<(u32, u32, u32), CliError> {
    let bad = || {
        CliError::Config(format!(
            "bad range `{text}`, expected <start>:<stop>[:<step>]"
        ))
    };
    let mut parts = text.split(':');
    let start = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
    let stop = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
    let step = match parts.next() {
        Some(p) => p.parse().map_err(|_| bad())?,
        None => 1,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((start, stop, step))
}

fn bounds(args: BoundsArgs) -> Result<(), CliError> {
    let mut shapes = vec![TileShape::Rect, TileShape::Cubic];
    if let Some(alpha) = args.alpha {
        shapes.push(TileShape::Alpha(alpha));
    }
    let reports: Result<Vec<_>, _> = shapes
        .into_iter()
        .map(|shape| bounds_report(args.n, args.cache, shape))
        .collect();
    let reports = reports.map_err(config_err)?;
    print!("{}", output::bounds_json(&reports));
    Ok(())
}

fn selftest() -> Result<(), CliError> {
    let report = harness::selftest();
    for check in &report.checks {
        println!(
            "{} {} ({})",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    if report.all_passed() {
        println!("self-test passed: {} checks", report.checks.len());
        Ok(())
    } else {
        Err(CliError::SelfTest)
    }
}
