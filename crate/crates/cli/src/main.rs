//! Command-line harness: discriminate a measurement set from a JSON file,
//! reproduce the named case table, sweep a family over an angle grid, or
//! validate a JSON file without computing anything.
//!
//! Exit codes: 0 success, 1 failed reproduction case, 2 invalid input or
//! validation error, 3 uncertified numeric result (suppressed by
//! `--allow-gap`).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use povm_discrim_cli::cases::{self, CaseReport};
use povm_discrim_cli::sweeps::{self, Family};
use povm_discrim_core::measurements::io;
use povm_discrim_core::optimize::SearchBudget;
use povm_discrim_core::scenarios::{optimize_scenario, Method, Scenario, Task};
use povm_discrim_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "povm-discrim",
    version,
    about = "Single-shot distinguishability and antidistinguishability of measurement sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one scenario value for a measurement set read from JSON.
    Discriminate {
        /// Path to a measurement-set JSON file.
        spec_file: PathBuf,
        /// Scenario name: dms, ams, dme, ame, dbarms, abarms, dbarme, abarme.
        #[arg(long)]
        scenario: String,
        /// Task name (distinguish or antidistinguish); must agree with the
        /// scenario when given.
        #[arg(long)]
        task: Option<String>,
        /// Search budget as `grid,starts,steps,tol`.
        #[arg(long)]
        budget: Option<String>,
        /// Seed override for the search.
        #[arg(long)]
        seed: Option<u64>,
        /// Exit 0 even when the numeric certificate left warnings.
        #[arg(long)]
        allow_gap: bool,
        /// Also write the JSON result to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run one named case (or all of them) and print the pass/fail table.
    Reproduce {
        /// Case id, or "all".
        case: String,
        /// Run cases concurrently (results are identical to serial runs).
        #[arg(long)]
        parallel: bool,
        /// Search budget as `grid,starts,steps,tol`.
        #[arg(long)]
        budget: Option<String>,
        /// Seed override for the search.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the table as CSV to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate scenario values along a measurement family.
    Sweep {
        /// Family name: tilted-trine or projective-pair.
        #[arg(long)]
        family: String,
        /// First angle of the grid (radians).
        #[arg(long, allow_negative_numbers = true)]
        start: f64,
        /// Last angle of the grid (radians, inclusive).
        #[arg(long, allow_negative_numbers = true)]
        end: f64,
        /// Grid step (radians).
        #[arg(long, allow_negative_numbers = true)]
        step: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Search budget as `grid,starts,steps,tol`.
        #[arg(long)]
        budget: Option<String>,
        /// Seed override for the search.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a measurement-set JSON file and report violations.
    Validate {
        /// Path to a measurement-set JSON file.
        spec_file: PathBuf,
    },
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = Cli::parse();
    match cli.command {
        Command::Discriminate {
            spec_file,
            scenario,
            task,
            budget,
            seed,
            allow_gap,
            out,
        } => cmd_discriminate(&spec_file, &scenario, task.as_deref(), budget.as_deref(), seed, allow_gap, out.as_deref()),
        Command::Reproduce {
            case,
            parallel,
            budget,
            seed,
            out,
        } => cmd_reproduce(&case, parallel, budget.as_deref(), seed, out.as_deref()),
        Command::Sweep {
            family,
            start,
            end,
            step,
            out,
            budget,
            seed,
        } => cmd_sweep(&family, start, end, step, out.as_deref(), budget.as_deref(), seed),
        Command::Validate { spec_file } => cmd_validate(&spec_file),
    }
}

/// Budget priority: explicit flag, then the `POVM_DISCRIM_BUDGET`
/// environment variable, then the built-in default; `--seed` overrides last.
fn resolve_budget(flag: Option<&str>, seed: Option<u64>) -> Result<SearchBudget> {
    let budget = match flag {
        Some(text) => SearchBudget::parse(text)?,
        None => SearchBudget::from_env_or_default()?,
    };
    Ok(match seed {
        Some(s) => budget.with_seed(s),
        None => budget,
    })
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Spec(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content)
        .map_err(|e| Error::Spec(format!("cannot write {}: {e}", path.display())))
}

fn fail(code: i32, message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {message}");
    code
}

// ---------------------------------------------------------------------------
// discriminate

#[derive(Serialize)]
struct DiscriminateJson {
    value: f64,
    bracket: [f64; 2],
    probe: Vec<[f64; 2]>,
    method: &'static str,
    warnings: Vec<String>,
}

fn cmd_discriminate(
    spec_file: &Path,
    scenario: &str,
    task: Option<&str>,
    budget: Option<&str>,
    seed: Option<u64>,
    allow_gap: bool,
    out: Option<&Path>,
) -> i32 {
    let text = match read_file(spec_file) {
        Ok(t) => t,
        Err(e) => return fail(2, e),
    };
    let set = match io::set_from_json(&text) {
        Ok(set) => set,
        Err(e) => {
            eprintln!("error: {e}");
            report_violations(&text);
            return 2;
        }
    };
    let scenario = match Scenario::parse(scenario) {
        Ok(s) => s,
        Err(e) => return fail(2, e),
    };
    if let Some(task) = task {
        let parsed = match task {
            "distinguish" => Task::Distinguish,
            "antidistinguish" => Task::Antidistinguish,
            other => {
                return fail(
                    2,
                    format!("unknown task '{other}'; use distinguish or antidistinguish"),
                )
            }
        };
        if parsed != scenario.task {
            return fail(
                2,
                format!(
                    "task '{task}' contradicts scenario '{}'",
                    scenario.name()
                ),
            );
        }
    }
    let budget = match resolve_budget(budget, seed) {
        Ok(b) => b,
        Err(e) => return fail(2, e),
    };
    let result = match optimize_scenario(&set, scenario, &budget) {
        Ok(r) => r,
        Err(e) => return fail(2, e),
    };
    let rendered = DiscriminateJson {
        value: result.value,
        bracket: [result.bracket.0, result.bracket.1],
        probe: result
            .probe
            .amps()
            .iter()
            .map(|z| [z.re, z.im])
            .collect(),
        method: match result.method {
            Method::ClosedForm => "closed-form",
            Method::CertifiedNumeric => "certified-numeric",
        },
        warnings: result.warnings.clone(),
    };
    let json = serde_json::to_string_pretty(&rendered).expect("plain data serializes");
    println!("{json}");
    if let Some(path) = out {
        if let Err(e) = write_file(path, &json) {
            return fail(2, e);
        }
    }
    if !result.warnings.is_empty() && !allow_gap {
        for w in &result.warnings {
            eprintln!("uncertified: {w}");
        }
        return 3;
    }
    0
}

/// Prints per-measurement completeness reports for a set that failed strict
/// parsing, when the file is at least structurally readable.
fn report_violations(text: &str) {
    if let Ok((measurements, priors)) = io::set_parts_from_json_lenient(text) {
        for m in &measurements {
            let report = m.validate();
            if report.ok {
                eprintln!("  measurement '{}': ok", m.name());
            } else {
                eprintln!(
                    "  measurement '{}': completeness deviation {:.3e} at entry ({}, {}), {} non-finite entries",
                    m.name(),
                    report.max_deviation,
                    report.worst_entry.0,
                    report.worst_entry.1,
                    report.non_finite_entries
                );
            }
        }
        let total: f64 = priors.iter().sum();
        if priors.iter().any(|p| !(*p > 0.0)) || (total - 1.0).abs() > 1e-9 {
            eprintln!("  priors {priors:?} are not a positive distribution");
        }
    }
}

// ---------------------------------------------------------------------------
// reproduce

fn cmd_reproduce(
    case: &str,
    parallel: bool,
    budget: Option<&str>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> i32 {
    let budget = match resolve_budget(budget, seed) {
        Ok(b) => b,
        Err(e) => return fail(2, e),
    };
    let ids: Vec<&str> = if case == "all" {
        cases::CASE_IDS.to_vec()
    } else if cases::CASE_IDS.contains(&case) {
        vec![cases::CASE_IDS
            .iter()
            .find(|&&id| id == case)
            .copied()
            .expect("contained above")]
    } else {
        return fail(
            2,
            format!(
                "unknown case id '{case}'; known ids: {}",
                cases::CASE_IDS.join(", ")
            ),
        );
    };

    let outcomes: Result<Vec<CaseReport>> = if parallel {
        ids.par_iter().map(|id| cases::run_case(id, &budget)).collect()
    } else {
        ids.iter().map(|id| cases::run_case(id, &budget)).collect()
    };
    let reports = match outcomes {
        Ok(r) => r,
        Err(e) => return fail(2, e),
    };

    println!(
        "{:<14} {:<26} {:>12} {:>16} {:>8}  {}",
        "case", "quantity", "computed", "target", "tol", "status"
    );
    let mut failures = 0usize;
    for report in &reports {
        for row in &report.rows {
            let ok = row.passed();
            if !ok {
                failures += 1;
            }
            println!(
                "{:<14} {:<26} {:>12.6} {:>16} {:>8}  {}",
                report.id,
                row.quantity,
                row.computed,
                row.check.expected_text(),
                row.check.tolerance_text(),
                if ok { "PASS" } else { "FAIL" }
            );
        }
    }
    let passed_cases = reports.iter().filter(|r| r.passed()).count();
    println!(
        "summary: {passed_cases}/{} cases pass, {failures} failing row(s)",
        reports.len()
    );

    if let Some(path) = out {
        let mut csv = String::from("case,quantity,computed,target,tolerance,status\n");
        for report in &reports {
            for row in &report.rows {
                csv.push_str(&format!(
                    "{},{},{:.6},{},{},{}\n",
                    report.id,
                    row.quantity,
                    row.computed,
                    row.check.expected_text(),
                    row.check.tolerance_text(),
                    if row.passed() { "PASS" } else { "FAIL" }
                ));
            }
        }
        if let Err(e) = write_file(path, &csv) {
            return fail(2, e);
        }
    }

    if failures > 0 {
        1
    } else {
        0
    }
}

// ---------------------------------------------------------------------------
// sweep

fn cmd_sweep(
    family: &str,
    start: f64,
    end: f64,
    step: f64,
    out: Option<&Path>,
    budget: Option<&str>,
    seed: Option<u64>,
) -> i32 {
    let family = match Family::parse(family) {
        Ok(f) => f,
        Err(e) => return fail(2, e),
    };
    let budget = match resolve_budget(budget, seed) {
        Ok(b) => b,
        Err(e) => return fail(2, e),
    };
    let sweep = match sweeps::run(family, start, end, step, &budget) {
        Ok(s) => s,
        Err(e) => return fail(2, e),
    };
    for w in &sweep.warnings {
        eprintln!("warning: {w}");
    }
    let csv = sweeps::to_csv(&sweep);
    match out {
        Some(path) => {
            if let Err(e) = write_file(path, &csv) {
                return fail(2, e);
            }
        }
        None => print!("{csv}"),
    }
    0
}

// ---------------------------------------------------------------------------
// validate

fn cmd_validate(spec_file: &Path) -> i32 {
    let text = match read_file(spec_file) {
        Ok(t) => t,
        Err(e) => return fail(2, e),
    };
    let (measurements, priors) = match io::set_parts_from_json_lenient(&text) {
        Ok(parts) => parts,
        Err(e) => return fail(2, e),
    };
    let mut ok = true;
    for m in &measurements {
        let report = m.validate();
        if report.ok {
            println!("measurement '{}': ok", m.name());
        } else {
            ok = false;
            println!(
                "measurement '{}': completeness deviation {:.3e} at entry ({}, {}), {} non-finite entries",
                m.name(),
                report.max_deviation,
                report.worst_entry.0,
                report.worst_entry.1,
                report.non_finite_entries
            );
        }
    }
    let total: f64 = priors.iter().sum();
    if measurements.len() != priors.len() {
        ok = false;
        println!(
            "priors: {} entries for {} measurements",
            priors.len(),
            measurements.len()
        );
    } else if priors.iter().any(|p| !(*p > 0.0)) || (total - 1.0).abs() > 1e-9 {
        ok = false;
        println!("priors {priors:?} are not a positive distribution");
    } else {
        println!("priors: ok");
    }
    if ok {
        0
    } else {
        2
    }
}
