//! `oncoscore` command-line tool.
//!
//! Exit codes: 0 on success, 1 when the input cannot be read, parsed or
//! mutated, 2 for bad flags or config values.

mod args;
mod config;

use std::fmt::Display;
use std::fs;
use std::process::ExitCode;

use clap::Parser;
use oncoscore::engine::{self, render, simulate};
use oncoscore::ops::OperatorRegistry;
use oncoscore::report::RunReport;
use oncoscore::{parse_score, write_score};

use crate::args::Args;
use crate::config::{resolve, FileConfig, Resolved};

pub const BUILD_IDENTITY: &str =
    concat!(env!("CARGO_PKG_VERSION"), " (", env!("CARGO_PKG_NAME"), ")");

const DATA_ERROR: u8 = 1;
const USAGE_ERROR: u8 = 2;

fn one_line(msg: impl Display) -> String {
    msg.to_string()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

fn fail(code: u8, msg: impl Display) -> ExitCode {
    eprintln!("error: {}", one_line(msg));
    ExitCode::from(code)
}

/// Help and version go out as clap renders them; real errors are folded
/// onto one line without the usage hint.
fn clap_exit(e: clap::Error) -> ExitCode {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = e.print();
            ExitCode::SUCCESS
        }
        ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            ExitCode::from(USAGE_ERROR)
        }
        _ => {
            let text = e.render().to_string();
            let kept: Vec<&str> = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .filter(|l| !l.is_empty())
                .collect();
            eprintln!("{}", kept.join(" "));
            ExitCode::from(USAGE_ERROR)
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => return clap_exit(e),
    };
    let file = match &args.config {
        Some(path) => match FileConfig::load(path) {
            Ok(f) => f,
            Err(e) => return fail(USAGE_ERROR, e),
        },
        None => FileConfig::default(),
    };
    let resolved = match resolve(&args, file) {
        Ok(r) => r,
        Err(e) => return fail(USAGE_ERROR, e),
    };
    for w in &resolved.warnings {
        eprintln!("warning: {w}");
    }
    match execute(&resolved, args.describe) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(DATA_ERROR, e),
    }
}

fn execute(cfg: &Resolved, describe: bool) -> Result<(), String> {
    let bytes = fs::read(&cfg.input).map_err(|e| format!("{}: {e}", cfg.input.display()))?;
    let (score, diagnostics) =
        parse_score(&bytes).map_err(|e| format!("{}: {e}", cfg.input.display()))?;
    for (location, message) in &diagnostics.warnings {
        eprintln!("warning: {location}: {message}");
    }
    if diagnostics.skipped_total() > 0 {
        let list: Vec<String> = diagnostics
            .skipped_elements
            .iter()
            .map(|(name, n)| format!("{name} x{n}"))
            .collect();
        eprintln!("note: ignored unsupported elements: {}", list.join(", "));
    }

    let params = &cfg.params;
    if describe {
        let plan = engine::plan(&score, params).map_err(|e| e.to_string())?;
        println!("{plan}");
        println!("seed:            {}", params.seed);
        return Ok(());
    }

    let state =
        simulate(&score, params, &OperatorRegistry::standard()).map_err(|e| e.to_string())?;
    for w in &state.warnings {
        eprintln!("warning: {w}");
    }
    let plan = state.plan.clone();
    let mutated = render(&score, &plan, &state.nodes).map_err(|e| e.to_string())?;
    let xml = write_score(&mutated).map_err(|e| e.to_string())?;
    let lineage = state.into_lineage();
    let report = RunReport::new(&lineage, params).with_plan(plan);

    fs::write(&cfg.output, xml).map_err(|e| format!("{}: {e}", cfg.output.display()))?;
    fs::write(&cfg.report, report.to_json())
        .map_err(|e| format!("{}: {e}", cfg.report.display()))?;
    println!(
        "wrote {} ({} parts, {} mutant parts, {} mutations) and {}",
        cfg.output.display(),
        mutated.parts.len(),
        report.summary.spawned_parts,
        report.summary.events_total - report.summary.skipped_events,
        cfg.report.display()
    );
    Ok(())
}
