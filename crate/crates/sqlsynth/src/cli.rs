//! Command-line front end: `synth`, `bench scale` and `serve`.

use std::ffi::OsString;
use std::io::Write;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use sqlsynth_core::{synthesize, Observer, ProjectionMode, SketchRecord, Status};

use crate::bench::{self, BenchSpec, Query};
use crate::clock::Stopwatch;
use crate::problem_file;
use crate::service::{self, ServiceConfig};

pub const EXIT_SOLVED: i32 = 0;
pub const EXIT_TIMEOUT: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "sqlsynth", version, about = "Synthesize SQL queries from input/output table examples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a query mapping the problem's inputs to its output.
    Synth(SynthArgs),
    /// Timing experiments.
    Bench {
        #[command(subcommand)]
        which: BenchCommand,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Budget cap per request, in milliseconds.
        #[arg(long, default_value_t = service::DEFAULT_TIMEOUT_CAP_MS)]
        timeout_cap: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Dsl,
    Sql,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Projection {
    Fast,
    Baseline,
}

impl From<Projection> for ProjectionMode {
    fn from(p: Projection) -> Self {
        match p {
            Projection::Fast => ProjectionMode::Fast,
            Projection::Baseline => ProjectionMode::Baseline,
        }
    }
}

#[derive(clap::Args, Debug)]
struct SynthArgs {
    problem: PathBuf,
    /// Overrides the problem file's budget, in milliseconds.
    #[arg(long)]
    timeout: Option<u64>,
    #[arg(long)]
    max_size: Option<usize>,
    #[arg(long, value_enum, default_value_t = Emit::Both)]
    emit: Emit,
    #[arg(long, value_enum)]
    projection: Option<Projection>,
    /// Print one line per visited sketch to stderr.
    #[arg(long)]
    trace: bool,
}

#[derive(Subcommand, Debug)]
enum BenchCommand {
    /// Single-operator queries over generated tables of growing size.
    Scale(ScaleArgs),
}

#[derive(clap::Args, Debug)]
struct ScaleArgs {
    /// Comma-separated subset of q1, q2, q3.
    #[arg(long, value_delimiter = ',', default_value = "q1,q2,q3")]
    query: Vec<Query>,
    /// Sizes as a list (`10,100`) or an inclusive range (`1..300`, `1..300:10`).
    #[arg(long, default_value = "10,100,1000", value_parser = bench::parse_sizes)]
    rows: SizeList,
    #[arg(long, default_value = "1,10,50,100", value_parser = bench::parse_sizes)]
    cols: SizeList,
    #[arg(long, default_value_t = 60_000)]
    timeout: u64,
    /// Projection inference to time; repeat the flag to time several.
    #[arg(long, value_enum, default_values_t = [Projection::Fast])]
    projection: Vec<Projection>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

type SizeList = Vec<usize>;

struct TraceLines<'w>(Stopwatch, &'w mut dyn Write);

impl Observer for TraceLines<'_> {
    fn on_sketch(&mut self, r: &SketchRecord<'_>) {
        let c = &r.counters;
        let _ = writeln!(self.1, "{:>7}ms size={} {:?} {} {:?}", self.0.elapsed().as_millis(), r.size, r.outcome, r.sketch, c);
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_SOLVED };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match cli.command {
        Command::Synth(a) => synth(a, out, err),
        Command::Bench { which: BenchCommand::Scale(a) } => scale(a, out, err),
        Command::Serve { port, timeout_cap } => {
            let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
            let rt = match tokio::runtime::Runtime::new() {
                Ok(rt) => rt,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_INPUT;
                }
            };
            match rt.block_on(service::serve(addr, ServiceConfig { timeout_cap_ms: timeout_cap })) {
                Ok(()) => EXIT_SOLVED,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_INPUT
                }
            }
        }
    }
}

fn synth(a: SynthArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut problem = match problem_file::load_problem(&a.problem) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    if let Err(e) = problem.validate() {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INPUT;
    }
    if let Some(t) = a.timeout {
        problem.config.timeout_ms = t;
    }
    if let Some(n) = a.max_size {
        problem.config.max_sketch_size = n;
    }
    if let Some(p) = a.projection {
        problem.config.projection = p.into();
    }
    let clock = Stopwatch::start();
    let result = if a.trace {
        synthesize(&problem, &clock, &mut TraceLines(clock, err))
    } else {
        synthesize(&problem, &clock, &mut ())
    };
    let s = result.stats;
    let _ = writeln!(
        err,
        "{} in {} ms ({} sketches, {} candidates)",
        result.status.name(),
        s.elapsed_ms,
        s.sketches_tried,
        s.candidates_checked
    );
    match result.status {
        Status::Solved => {
            if a.emit != Emit::Sql {
                if let Some(p) = &result.program {
                    let _ = writeln!(out, "{p}");
                }
            }
            if a.emit != Emit::Dsl {
                let _ = writeln!(out, "{}", result.sql.as_deref().unwrap_or("-- no SQL rendering"));
            }
            EXIT_SOLVED
        }
        Status::Timeout => EXIT_TIMEOUT,
        Status::Exhausted => EXIT_EXHAUSTED,
    }
}

fn scale(a: ScaleArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let spec = BenchSpec {
        queries: a.query,
        rows: a.rows,
        cols: a.cols,
        modes: a.projection.into_iter().map(Into::into).collect(),
        timeout_ms: a.timeout,
    };
    let results = bench::run_scale_bench(&spec, |m| {
        let _ = writeln!(
            err,
            "{} rows={} cols={} {}: {} {:.1} ms",
            m.query.name(),
            m.rows,
            m.cols,
            bench::mode_name(m.mode),
            m.status.name(),
            m.elapsed.as_secs_f64() * 1e3
        );
    });
    let written = match &a.out {
        Some(path) => std::fs::File::create(path)
            .map_err(csv::Error::from)
            .and_then(|f| bench::write_csv(&results, f)),
        None => bench::write_csv(&results, &mut *out),
    };
    match written {
        Ok(()) => EXIT_SOLVED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}
