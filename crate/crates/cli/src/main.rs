//! `involute`: signatures, positivity checks and certificates for central
//! simple algebras with involution, driven by JSON input files.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use commands::CommandRegistry;
use input::Invocation;
use involute_core::Error;

const EXIT_DOMAIN: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser, Debug)]
#[command(name = "involute", version, about = "Signatures and sums of hermitian squares for algebras with involution")]
struct Args {
    /// One of: classify, signature, maximal, trace-form, x-sigma, ps-check, certify, verify, audit
    subcommand: String,
    /// JSON input file
    #[arg(long)]
    input: PathBuf,
    /// Restrict per-ordering output to this ordering index
    #[arg(long)]
    ordering: Option<u8>,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
    /// Seed for the certificate search enumeration order
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Coordinate bound for certificate search candidates
    #[arg(long)]
    height_bound: Option<i64>,
    /// Largest exponent s allowed in a searched certificate
    #[arg(long)]
    max_exponent: Option<u32>,
}

fn exit_code(e: &Error) -> u8 {
    if matches!(e, Error::Parse(_)) {
        EXIT_USAGE
    } else if e.is_contract_violation() {
        EXIT_INTERNAL
    } else {
        EXIT_DOMAIN
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let registry = CommandRegistry::standard();
    let Some(command) = registry.get(&args.subcommand) else {
        eprintln!("unknown subcommand {:?}; expected one of: {}", args.subcommand, registry.names().join(", "));
        return ExitCode::from(EXIT_USAGE);
    };
    let outcome = Invocation::load(&args).and_then(|inv| command.run(&inv));
    match outcome {
        Ok(report) => {
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report.json).expect("reports serialize"));
            } else {
                print!("{}", report.text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if args.json {
                let obj = json!({"error": e.kind(), "message": e.to_string()});
                println!("{}", serde_json::to_string_pretty(&obj).expect("errors serialize"));
            } else {
                eprintln!("error ({}): {e}", e.kind());
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
