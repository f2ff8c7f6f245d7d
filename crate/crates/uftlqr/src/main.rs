#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use uftlqr::scenario::{emit_kernel_grid, run_scenario};
use uftlqr::verify::{run_suite, VerifyOptions};
use uftlqr::Error;

#[derive(Parser)]
#[command(name = "uftlqr", version, about = "Optimal boundary-aware LQR for reaction-diffusion on an interval")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write CSV fields plus report.json.
    Run { config: PathBuf },
    /// Sample the feedback kernel on a square grid.
    Kernel {
        #[arg(long)]
        c: f64,
        #[arg(long = "L")]
        l: f64,
        #[arg(long = "M")]
        m: usize,
        #[arg(long)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the invariant probes.
    Verify {
        #[arg(long)]
        full: bool,
        #[arg(long, hide = true)]
        debug_corrupt_angle: bool,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_VERIFY: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

fn fail(e: &Error) -> ExitCode {
    let mut v = json!({ "error": e.kind(), "message": e.to_string() });
    if let Error::Config { field, .. } = e {
        v["field"] = json!(field);
    }
    eprintln!("{v}");
    ExitCode::from(exit_code(e))
}

fn init_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("UFTLQR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::config("UFTLQR_THREADS", format!("expected a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::config("UFTLQR_THREADS", e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        return fail(&e);
    }
    match cli.command {
        Command::Run { config } => match run_scenario(&config) {
            Ok(rep) => {
                println!("{}", serde_json::to_string_pretty(&rep.json).expect("report serializes"));
                match rep.failures.first() {
                    None => ExitCode::SUCCESS,
                    Some(e) => fail(e),
                }
            }
            Err(e) => fail(&e),
        },
        Command::Kernel { c, l, m, grid, out } => match emit_kernel_grid(c, l, m, grid, &out) {
            Ok(summary) => {
                println!("{summary}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Verify { full, debug_corrupt_angle } => {
            let opts = VerifyOptions { full, corrupt_angle: debug_corrupt_angle };
            let mut out = std::io::stdout();
            let report = run_suite(&opts, |p| {
                let _ = writeln!(out, "{}", p.line());
            });
            let failed = report.probes.iter().filter(|p| p.status == uftlqr::verify::Status::Fail).count();
            let _ = writeln!(out, "{} probes, {failed} failed", report.probes.len());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFY)
            }
        }
    }
}
