//! `rematch`: compile pattern regexps to Mealy machines, run them over
//! streams, render them, and check them against the oracles.

use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::anyhow;
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rematch_core::runtime::StreamError;
use rematch_core::verify::oracle_check;
use rematch_core::{
    load, min_comp, parse, run_stream, save, subset_t, subset_tc, thompson, to_dot, trim_sink,
    InputSymbol, Machine, Mealy, Session, StepError, StreamOptions,
};

const EX_USAGE: u8 = 64;
const EX_NOINPUT: u8 = 66;
const EX_SOFTWARE: u8 = 70;
const EXIT_STUCK: u8 = 2;
const EXIT_UNKNOWN_SYMBOL: u8 = 3;
const EXIT_DISAGREE: u8 = 1;

#[derive(Parser)]
#[command(
    name = "rematch",
    version,
    about = "Complete regexp matching with minimal Mealy machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Report outputs of matches starting at the first symbol.
    Exact,
    /// Report outputs of matches starting anywhere (all overlapping matches).
    Complete,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a pattern regexp to a machine document.
    Compile {
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[arg(long, value_enum, default_value = "complete")]
        mode: Mode,
        /// Keep the determinized machine as is.
        #[arg(long)]
        no_minimize: bool,
        /// Drop the silent sink for display (the machine becomes partial).
        #[arg(long)]
        trim_sink: bool,
        /// Output file; standard output if omitted.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Stream input through a Mealy machine and print match events.
    Run {
        #[arg(short = 'm', long)]
        machine: PathBuf,
        /// Input file, or `-` for standard input.
        #[arg(default_value = "-")]
        input: String,
        /// Treat `\n` and `\r` as input symbols.
        #[arg(long)]
        keep_newlines: bool,
    },
    /// Render a machine document as Graphviz.
    Dot {
        #[arg(short = 'm', long)]
        machine: PathBuf,
    },
    /// Compare the compiled machines against the expression oracles.
    OracleCheck {
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[arg(long, default_value_t = 5)]
        max_len: usize,
        /// Additional random words longer than --max-len.
        #[arg(long, default_value_t = 0)]
        words: usize,
        #[arg(long, env = "REMATCH_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Measure streaming throughput over pseudorandom input.
    Bench {
        #[arg(short = 'm', long)]
        machine: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        bytes: u64,
        #[arg(long, env = "REMATCH_SEED", default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Failure {
        Failure {
            code,
            error: error.into(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EX_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Compile {
            expr,
            mode,
            no_minimize,
            trim_sink,
            output,
        } => compile(&expr, mode, !no_minimize, trim_sink, output.as_deref()),
        Command::Run {
            machine,
            input,
            keep_newlines,
        } => run(&machine, &input, keep_newlines),
        Command::Dot { machine } => dot(&machine),
        Command::OracleCheck {
            expr,
            max_len,
            words,
            seed,
        } => check(&expr, max_len, words, seed),
        Command::Bench {
            machine,
            bytes,
            seed,
        } => bench(&machine, bytes, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rematch: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn read_machine(path: &Path) -> Result<Machine, Failure> {
    let bytes =
        fs::read(path).map_err(|e| Failure::new(EX_NOINPUT, anyhow!("{}: {e}", path.display())))?;
    load(&bytes).map_err(|e| Failure::new(EX_NOINPUT, anyhow!("{}: {e}", path.display())))
}

fn read_mealy(path: &Path) -> Result<Mealy, Failure> {
    read_machine(path)?.into_mealy().ok_or_else(|| {
        Failure::new(
            EX_NOINPUT,
            anyhow!(
                "{}: expected a mealy document; compile it first",
                path.display()
            ),
        )
    })
}

fn compile(text: &str, mode: Mode, minimize: bool, trim: bool, output: Option<&Path>) -> CmdResult {
    let e = parse(text).map_err(|err| Failure::new(EX_USAGE, anyhow!("in expression: {err}")))?;
    let fst = thompson(&e);
    eprintln!("thompson: {} states", fst.state_count());
    let (stage, det) = match mode {
        Mode::Exact => ("subset_t", subset_t(&fst)),
        Mode::Complete => ("subset_tc", subset_tc(&fst)),
    };
    let mut m = det.map_err(|err| Failure::new(EX_SOFTWARE, err))?;
    eprintln!("{stage}: {} states", m.state_count());
    if minimize {
        m = min_comp(&m);
        eprintln!("min_comp: {} states", m.state_count());
    }
    if trim {
        match trim_sink(&m) {
            Ok(t) => {
                m = t;
                eprintln!("trim_sink: {} states", m.state_count());
            }
            Err(err) => eprintln!("trim_sink: {err}; machine left unchanged"),
        }
    }
    eprintln!("states: {}", m.state_count());
    let bytes = save(&Machine::Mealy(m));
    match output {
        Some(path) => fs::write(path, bytes)
            .map_err(|err| Failure::new(EX_NOINPUT, anyhow!("{}: {err}", path.display()))),
        None => io::stdout()
            .write_all(&bytes)
            .map_err(|err| Failure::new(EX_SOFTWARE, err)),
    }
}

fn run(machine: &Path, input: &str, keep_newlines: bool) -> CmdResult {
    let m = read_mealy(machine)?;
    let source: Box<dyn Read> = if input == "-" {
        Box::new(io::stdin().lock())
    } else {
        Box::new(File::open(input).map_err(|e| Failure::new(EX_NOINPUT, anyhow!("{input}: {e}")))?)
    };
    let options = StreamOptions {
        skip_newlines: !keep_newlines,
    };
    let mut out = BufWriter::new(io::stdout().lock());
    let mut write_error = None;
    let result = run_stream(&m, source, options, |event| {
        if write_error.is_none() {
            if let Err(e) = writeln!(out, "{event}") {
                write_error = Some(e);
            }
        }
    });
    let flushed = out.flush();
    if let Some(e) = write_error.or(flushed.err()) {
        return Err(Failure::new(EX_SOFTWARE, e));
    }
    match result {
        Ok(_) => Ok(()),
        Err(StreamError::Step(e @ StepError::Stuck { .. })) => Err(Failure::new(EXIT_STUCK, e)),
        Err(StreamError::Step(e @ StepError::UnknownSymbol { .. })) => {
            Err(Failure::new(EXIT_UNKNOWN_SYMBOL, e))
        }
        Err(e @ StreamError::Io { .. }) => Err(Failure::new(EX_NOINPUT, e)),
    }
}

fn dot(machine: &Path) -> CmdResult {
    let m = read_machine(machine)?;
    io::stdout()
        .write_all(to_dot(&m).as_bytes())
        .map_err(|e| Failure::new(EX_SOFTWARE, e))
}

fn check(text: &str, max_len: usize, words: usize, seed: u64) -> CmdResult {
    let e = parse(text).map_err(|err| Failure::new(EX_USAGE, anyhow!("in expression: {err}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match oracle_check(&e, max_len, words, &mut rng) {
        Ok(report) => {
            println!(
                "ok: behaviour agrees up to length {max_len} ({} outputting words); \
                 complete matching agrees on {} words of length {max_len} and {} random longer words",
                report.exact_words, report.complete_words, report.random_words
            );
            Ok(())
        }
        Err(counterexample) => {
            println!("counterexample: {counterexample}");
            Err(Failure::new(
                EXIT_DISAGREE,
                anyhow!("machine and oracle disagree"),
            ))
        }
    }
}

fn bench(machine: &Path, bytes: u64, seed: u64) -> CmdResult {
    let m = read_mealy(machine)?;
    let sigma = m.input_alphabet().to_vec();
    if sigma.is_empty() {
        return Err(Failure::new(
            EX_USAGE,
            anyhow!("machine has an empty input alphabet"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut session = Session::start(&m);
    let session_size = std::mem::size_of_val(&session);
    let mut chunk: Vec<InputSymbol> = Vec::with_capacity(1 << 16);
    let mut elapsed = Duration::ZERO;
    let mut events = 0u64;
    let mut left = bytes;
    while left > 0 {
        let n = left.min(1 << 16) as usize;
        chunk.clear();
        chunk.extend((0..n).map(|_| sigma[rng.gen_range(0..sigma.len())]));
        let start = Instant::now();
        for &s in &chunk {
            match session.step(s) {
                Ok(Some(_)) => events += 1,
                Ok(None) => {}
                Err(e @ StepError::Stuck { .. }) => return Err(Failure::new(EXIT_STUCK, e)),
                Err(e) => return Err(Failure::new(EX_SOFTWARE, e)),
            }
        }
        elapsed += start.elapsed();
        left -= n as u64;
    }
    if session.lookup_count() != bytes || std::mem::size_of_val(&session) != session_size {
        return Err(Failure::new(
            EX_SOFTWARE,
            anyhow!(
                "lookup_count {} after {bytes} symbols",
                session.lookup_count()
            ),
        ));
    }
    let secs = elapsed.as_secs_f64();
    let rate = if secs > 0.0 {
        bytes as f64 / secs
    } else {
        f64::INFINITY
    };
    println!("symbols: {bytes}");
    println!("lookup_count: {}", session.lookup_count());
    println!("events: {events}");
    println!("session_bytes: {session_size}");
    println!("elapsed_s: {secs:.6}");
    println!("symbols_per_s: {rate:.0}");
    Ok(())
}
