//! `qccd`: generate benchmark circuits, compile them for a QCCD device,
//! simulate the result, and sweep device parameters.
//!
//! Exit status is 0 on success, 1 for bad input (flags, files, circuits,
//! devices that cannot host the circuit) and 2 when the toolflow breaks
//! one of its own invariants.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use qccd::bench::BenchSpec;
use qccd::compiler::{validate, CompiledProgram};
use qccd::device::{DeviceConfig, TopologySpec};
use qccd::error::CompileError;
use qccd::ir::{emit_json, emit_qasm, Circuit};
use qccd::models::{GateImpl, ReorderMethod};
use qccd::sim::{audit, metrics, timeline, write_trace};
use qccd::sweep::{load_circuit, write_csv, SweepPoint, SweepSpec};

#[derive(Parser)]
#[command(name = "qccd", version, about = "Compiler and simulator for QCCD trapped-ion machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a benchmark circuit as OpenQASM or JSON.
    Gen(GenArgs),
    /// Compile a circuit into a program of gates and shuttles.
    Compile(CompileArgs),
    /// Simulate a circuit (compiling it first) or a compiled program.
    Sim(SimArgs),
    /// Run every point of a sweep file and write one CSV row per point.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    /// qft, bv, qaoa_nn or random_nn
    bench: String,
    #[arg(long)]
    n: usize,
    /// QAOA layers
    #[arg(long)]
    p: Option<usize>,
    /// Brickwork layers for random_nn
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// BV secret as a bit string, qubit 0 first
    #[arg(long)]
    secret: Option<String>,
    /// qasm or json; defaults to json when -o ends in .json
    #[arg(long)]
    format: Option<String>,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DeviceArgs {
    /// Device config JSON; defaults to a 6-trap linear device of capacity 20
    #[arg(long)]
    device: Option<PathBuf>,
    #[arg(long)]
    gate: Option<GateImpl>,
    #[arg(long)]
    reorder: Option<ReorderMethod>,
    #[arg(long)]
    capacity: Option<usize>,
}

#[derive(Args)]
struct CompileArgs {
    /// OpenQASM 2.0 file, or circuit JSON if it ends in .json
    #[arg(long)]
    circuit: PathBuf,
    #[command(flatten)]
    device: DeviceArgs,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, required_unless_present = "program", conflicts_with = "program")]
    circuit: Option<PathBuf>,
    /// Compiled program JSON from `qccd compile`
    #[arg(long)]
    program: Option<PathBuf>,
    #[command(flatten)]
    device: DeviceArgs,
    /// Per-instruction timing CSV
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    sweep: PathBuf,
    /// Overrides the sweep file's `output`
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

fn user<E: std::fmt::Display>(e: E) -> Failure {
    Failure { code: 1, message: e.to_string() }
}

fn internal<E: std::fmt::Display>(e: E) -> Failure {
    Failure { code: 2, message: format!("internal error: {e}") }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| user(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, bytes).map_err(|e| user(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(bytes).map_err(user),
    }
}

fn load(path: &Path) -> Result<Circuit, Failure> {
    load_circuit(path).map_err(|e| user(format!("{}: {e}", path.display())))
}

fn device(args: &DeviceArgs) -> Result<DeviceConfig, Failure> {
    let mut cfg = match &args.device {
        Some(p) => DeviceConfig::from_json(&read(p)?).map_err(|e| user(format!("{}: {e}", p.display())))?,
        None => DeviceConfig::new(TopologySpec::Linear { traps: 6 }, 20),
    };
    if let Some(g) = args.gate {
        cfg.gate = g;
    }
    if let Some(r) = args.reorder {
        cfg.reorder = r;
    }
    if let Some(c) = args.capacity {
        cfg.capacity = c;
    }
    Ok(cfg)
}

fn compile_checked(circuit: &Circuit, cfg: &DeviceConfig) -> Result<CompiledProgram, Failure> {
    let hw = cfg.hardware().map_err(user)?;
    let prog = qccd::compile(circuit, &hw).map_err(|e| match e {
        CompileError::Sim(_) => internal(e),
        e => user(e),
    })?;
    validate(&prog, &hw).map_err(internal)?;
    Ok(prog)
}

fn gen(args: &GenArgs) -> Result<(), Failure> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| user(format!("{} needs --{flag}", args.bench)));
    let spec = match args.bench.as_str() {
        "qft" => BenchSpec::Qft { n: args.n },
        "bv" => BenchSpec::Bv { n: args.n, secret: args.secret.clone() },
        "qaoa_nn" => BenchSpec::QaoaNn { n: args.n, p: need(args.p, "p")? },
        "random_nn" => BenchSpec::RandomNn {
            n: args.n,
            depth: need(args.depth, "depth")?,
            seed: args.seed.unwrap_or(0),
        },
        other => return Err(user(format!("unknown benchmark `{other}` (expected qft, bv, qaoa_nn or random_nn)"))),
    };
    let circuit = spec.build().map_err(user)?;
    let json_out = args
        .output
        .as_deref()
        .and_then(|p| p.extension())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let text = match args.format.as_deref() {
        Some("json") => emit_json(&circuit),
        Some("qasm") => emit_qasm(&circuit),
        Some(f) => return Err(user(format!("unknown format `{f}` (expected qasm or json)"))),
        None if json_out => emit_json(&circuit),
        None => emit_qasm(&circuit),
    };
    emit(args.output.as_deref(), text.as_bytes())
}

fn compile(args: &CompileArgs) -> Result<(), Failure> {
    let circuit = load(&args.circuit)?;
    let prog = compile_checked(&circuit, &device(&args.device)?)?;
    emit(args.output.as_deref(), format!("{}\n", prog.to_json()).as_bytes())
}

fn sim(args: &SimArgs) -> Result<(), Failure> {
    let cfg = device(&args.device)?;
    let hw = cfg.hardware().map_err(user)?;
    let (prog, ours) = match (&args.circuit, &args.program) {
        (Some(c), _) => (compile_checked(&load(c)?, &cfg)?, true),
        (None, Some(p)) => {
            let prog = CompiledProgram::from_json(&read(p)?).map_err(|e| user(format!("{}: {e}", p.display())))?;
            validate(&prog, &hw).map_err(|v| user(format!("{}: {v}", p.display())))?;
            (prog, false)
        }
        (None, None) => return Err(user("either --circuit or --program is required")),
    };
    let fail = if ours { internal } else { user };
    let tl = timeline(&prog, &hw).map_err(fail)?;
    audit(&prog, &tl).map_err(internal)?;
    if let Some(path) = &args.trace {
        let file = fs::File::create(path).map_err(|e| user(format!("{}: {e}", path.display())))?;
        write_trace(&prog, &tl, std::io::BufWriter::new(file)).map_err(user)?;
    }
    let m = metrics(&prog, &tl);
    let json = serde_json::to_string_pretty(&m).map_err(internal)?;
    emit(args.output.as_deref(), format!("{json}\n").as_bytes())
}

fn threads() -> Result<Option<usize>, Failure> {
    match std::env::var("QCCD_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(user(format!("QCCD_THREADS must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let spec = SweepSpec::from_json(&read(&args.sweep)?).map_err(|e| user(format!("{}: {e}", args.sweep.display())))?;
    let base = args.sweep.parent().unwrap_or(Path::new("."));
    eprintln!("sweep: {} design points", spec.size());
    let points = spec.points(base).map_err(|e| user(format!("{}: {e}", args.sweep.display())))?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads()? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(internal)?;
    let rows: Vec<_> = pool.install(|| points.par_iter().map(SweepPoint::run).collect());
    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    if failed > 0 {
        eprintln!("sweep: {failed} of {} points failed; see the error column", rows.len());
    }

    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).map_err(internal)?;
    let output = args.output.clone().or_else(|| spec.output.as_ref().map(|o| base.join(o)));
    emit(output.as_deref(), &buf)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Compile(a) => compile(a),
        Command::Sim(a) => sim(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
