mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use args::{Cli, Format};
use commands::{exit_code_for, run, EXIT_BAD_INPUT, EXIT_FAILED, EXIT_INCONCLUSIVE, EXIT_OK};

/// Bumped whenever a field of the report document changes meaning.
const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct ErrorInfo {
    kind: String,
    message: String,
}

#[derive(Serialize)]
struct Timing {
    elapsed_ms: f64,
}

#[derive(Serialize)]
struct ExitStatus {
    code: u8,
    meaning: &'static str,
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    schema_version: u32,
    command: &'static str,
    invocation: &'a Cli,
    result: Value,
    error: Option<ErrorInfo>,
    timing: Timing,
    exit_status: ExitStatus,
}

fn meaning(code: u8) -> &'static str {
    match code {
        EXIT_OK => "all asserted properties held",
        EXIT_FAILED => "an asserted property failed",
        EXIT_INCONCLUSIVE => "inconclusive or unsupported",
        _ => "malformed input",
    }
}

fn error_kind(e: &tseq_core::error::Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or("Error")
        .to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_BAD_INPUT),
            };
        }
    };

    let start = Instant::now();
    let outcome = run(&cli);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    let (code, body) = match &outcome {
        Ok(o) => (
            o.code,
            match cli.format {
                Format::Json => None,
                Format::Text => Some(o.text.clone()),
                Format::Csv => o.csv.clone(),
            },
        ),
        Err(e) => {
            eprintln!("error: {e}");
            (
                exit_code_for(e),
                match cli.format {
                    Format::Json => None,
                    _ => Some(String::new()),
                },
            )
        }
    };
    let body = body.unwrap_or_else(|| {
        let (result, error) = match outcome {
            Ok(o) => (o.result, None),
            Err(e) => (
                Value::Null,
                Some(ErrorInfo {
                    kind: error_kind(&e),
                    message: e.to_string(),
                }),
            ),
        };
        let doc = ReportDocument {
            schema_version: SCHEMA_VERSION,
            command: cli.command.name(),
            invocation: &cli,
            result,
            error,
            timing: Timing { elapsed_ms },
            exit_status: ExitStatus {
                code,
                meaning: meaning(code),
            },
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    });

    let written = match &cli.output {
        Some(path) => std::fs::write(path, body.as_bytes()),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(EXIT_BAD_INPUT);
    }
    ExitCode::from(code)
}
