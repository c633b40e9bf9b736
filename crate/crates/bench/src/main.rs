use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use hx4_bench::emit::{emit, emit_sweep, Format};
use hx4_bench::experiment::{run_convergence, run_tau_sweep, tau_decades, ExperimentConfig, PrecondChoice};
use hx4_bench::manufactured::Space;
use hx4_bench::BenchError;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SpaceArg {
    Grad,
    Curl,
    Div4,
    Div,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrecondArg {
    Hx,
    VariantC,
    None,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Text,
}

/// Solve `τ(u,v) + (du,dv) = F` on refined Kuhn meshes of the unit tesseract
/// and tabulate errors and PCG iteration counts.
#[derive(Parser, Debug)]
#[command(name = "bench")]
struct Args {
    #[arg(long, value_enum)]
    space: SpaceArg,
    /// Level range `A..B` (inclusive) or a single level.
    #[arg(long, default_value = "0..3")]
    levels: String,
    /// A comma-separated list of weights, or `sweep` for 1e-6..1e6. One weight
    /// gives a convergence table, several give an iteration matrix.
    #[arg(long, default_value = "1")]
    tau: String,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, value_enum, default_value = "hx")]
    precond: PrecondArg,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long, default_value_t = 5)]
    quad_degree: usize,
    #[arg(long, default_value_t = 500)]
    maxit: usize,
    /// Allow levels above 3.
    #[arg(long)]
    allow_large: bool,
    /// Append inner-solve and failure columns to convergence tables.
    #[arg(long)]
    diagnostics: bool,
}

fn parse_levels(s: &str) -> Result<(usize, usize), BenchError> {
    let bad = || BenchError::Config(format!("invalid level range '{s}'"));
    match s.split_once("..") {
        Some((a, b)) => Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)),
        None => {
            let l = s.trim().parse().map_err(|_| bad())?;
            Ok((l, l))
        }
    }
}

fn parse_taus(s: &str) -> Result<Vec<f64>, BenchError> {
    if s.trim() == "sweep" {
        return Ok(tau_decades());
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| BenchError::Config(format!("invalid tau '{t}'"))))
        .collect()
}

fn run(args: &Args) -> Result<bool, BenchError> {
    let space = match args.space {
        SpaceArg::Grad => Space::Grad,
        SpaceArg::Curl => Space::Curl,
        SpaceArg::Div4 => Space::Div4,
        SpaceArg::Div => Space::Div,
    };
    let (lo, hi) = parse_levels(&args.levels)?;
    if hi > 3 && !args.allow_large {
        return Err(BenchError::Config(format!("level {hi} exceeds 3; pass --allow-large to run it")));
    }
    let mut cfg = ExperimentConfig::new(space, lo, hi);
    cfg.taus = parse_taus(&args.tau)?;
    cfg.tol = args.tol;
    cfg.maxit = args.maxit;
    cfg.quad_degree = args.quad_degree;
    cfg.precond = match args.precond {
        PrecondArg::Hx => PrecondChoice::Hx,
        PrecondArg::VariantC => PrecondChoice::VariantC,
        PrecondArg::None => PrecondChoice::None,
    };
    cfg.validate()?;
    let format = match args.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Text => Format::Text,
    };
    let mut buf = Vec::new();
    let ok = if cfg.taus.len() == 1 {
        let rows = run_convergence(&cfg)?;
        emit(&rows, format, args.diagnostics, &mut buf)?;
        rows.iter().all(|r| !r.failed())
    } else {
        let (taus, rows) = run_tau_sweep(&cfg)?;
        emit_sweep(&taus, &rows, format, &mut buf)?;
        rows.iter().all(|r| r.iters.iter().all(Option::is_some))
    };
    let mut w = BufWriter::new(File::create(&args.out)?);
    w.write_all(&buf)?;
    w.flush()?;
    Ok(ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            log::error!("some solves failed; see the table");
            ExitCode::from(2)
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(2)
        }
    }
}
