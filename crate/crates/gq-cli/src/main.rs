//! `gq`: normal forms, metric balls, combing checks, van Kampen diagrams
//! and growth experiments for the groups
//! `< x, y, z | [x, y^q] = z, [x, z] = [y, z] = 1 >`.
//!
//! Exit codes: 0 success / all inequalities hold, 1 assertion or
//! validation failure, 2 usage error, 3 precondition failure (word not
//! trivial or not freely reduced), 4 internal guard (budgets, depth).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use gq_core::analysis::{
    invariance_fuzz, lower_bound_check, render_survey_csv, survey, AnalysisError, SurveyOptions,
};
use gq_core::combing::check_narrow_shape;
use gq_core::diagram::{build_diagram, validate_diagram, DiagramError};
use gq_core::group::{normalize, normalize_traced, GroupParams};
use gq_core::metric::{check_geodesic_two_sided, check_recursive, Ball, MetricError};
use gq_core::word::{Letter, Word};

#[derive(Parser)]
#[command(name = "gq", version, about = "Exact arithmetic and diagram experiments for the groups <x,y,z | [x,y^q]=z, [x,z]=[y,z]=1>")]
struct Cli {
    /// Group parameter q (q = 1 is the integral Heisenberg group).
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    q: u32,
    /// Seed for all randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write CSV output to this path instead of stdout.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the canonical form of a word; with --trace also the signed
    /// relator application counts (c1,c2,c3).
    Normalize {
        #[arg(long)]
        word: String,
        #[arg(long)]
        trace: bool,
    },
    /// Enumerate the radius-R ball of the word metric; emits distance,count rows.
    Ball {
        #[arg(long)]
        radius: u32,
    },
    /// Verify |tau(g)| <= f(d(1,g)) over the radius-R ball.
    CheckRecursive {
        #[arg(long)]
        radius: u32,
    },
    /// Verify the two-sided bound for the BFS geodesic selection.
    CheckGeodesic {
        #[arg(long)]
        radius: u32,
    },
    /// Verify the narrow-shape inequality with M = 24q+18, k = 11/5.
    CheckNarrow {
        #[arg(long)]
        radius: u32,
    },
    /// Build and validate a van Kampen diagram; write it as JSON.
    Diagram {
        #[arg(long)]
        word: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Growth survey over the witness family (CSV).
    Survey {
        /// Comma-separated family parameters.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        ns: Vec<u32>,
        /// Extra rows per n from random trivial words.
        #[arg(long, default_value_t = 0)]
        random_per_n: u32,
        /// Report real wall times (forfeits byte-identical output).
        #[arg(long)]
        timings: bool,
    },
    /// Check |c2| = n^3 for the witness word and that its diagram has at
    /// least n^3 cells.
    Lowerbound {
        #[arg(long)]
        n: u32,
    },
    /// Fuzz trace invariance of a trivial word under random rewritings.
    Fuzz {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1000)]
        iterations: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let params = GroupParams::new(cli.q);
    let code = match run(&cli, &params) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code)
}

#[derive(Debug)]
enum CliError {
    Parse(gq_core::word::ParseError),
    Metric(MetricError),
    Diagram(DiagramError),
    Analysis(AnalysisError),
    Io(std::io::Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(e) => write!(f, "{e}"),
            CliError::Metric(e) => write!(f, "{e}"),
            CliError::Diagram(e) => write!(f, "{e}"),
            CliError::Analysis(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::Metric(MetricError::OutOfBall) => 3,
            CliError::Metric(MetricError::BudgetExceeded { .. }) => 4,
            CliError::Diagram(DiagramError::NotTrivial | DiagramError::NotReduced) => 3,
            CliError::Diagram(DiagramError::DepthExceeded { .. }) => 4,
            CliError::Analysis(AnalysisError::NotTrivial) => 3,
            CliError::Analysis(AnalysisError::OverBudget { .. }) => 4,
            CliError::Analysis(AnalysisError::Diagram(e)) => match e {
                DiagramError::NotTrivial | DiagramError::NotReduced => 3,
                DiagramError::DepthExceeded { .. } => 4,
            },
            CliError::Io(_) => 4,
        }
    }
}

impl From<gq_core::word::ParseError> for CliError {
    fn from(e: gq_core::word::ParseError) -> Self {
        CliError::Parse(e)
    }
}
impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        CliError::Metric(e)
    }
}
impl From<gq_core::combing::CombingError> for CliError {
    fn from(e: gq_core::combing::CombingError) -> Self {
        match e {
            gq_core::combing::CombingError::Metric(m) => CliError::Metric(m),
        }
    }
}
impl From<DiagramError> for CliError {
    fn from(e: DiagramError) -> Self {
        CliError::Diagram(e)
    }
}
impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Analysis(e)
    }
}
impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn emit(csv: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match csv {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn step_label(s: &Option<Letter>) -> String {
    match s {
        Some(l) => l.to_string(),
        None => "1".to_string(),
    }
}

fn run(cli: &Cli, params: &GroupParams) -> Result<u8, CliError> {
    match &cli.cmd {
        Cmd::Normalize { word, trace } => {
            let w = Word::parse(word)?;
            if *trace {
                let (nf, t) = normalize_traced(&w, params);
                println!("{}", nf.to_word());
                println!("{t}");
            } else {
                println!("{}", normalize(&w, params).to_word());
            }
            Ok(0)
        }
        Cmd::Ball { radius } => {
            let ball = Ball::build(params, *radius)?;
            let mut out = String::from("distance,count\n");
            for (d, c) in ball.sphere_counts() {
                out.push_str(&format!("{d},{c}\n"));
            }
            emit(&cli.csv, &out)?;
            Ok(0)
        }
        Cmd::CheckRecursive { radius } => {
            let violations = check_recursive(params, *radius)?;
            for v in &violations {
                println!("{},-,-,-,{},{}", v.g.to_word(), v.word_len, v.bound);
            }
            println!(
                "check-recursive q={} radius={}: {} violations",
                params.q(),
                radius,
                violations.len()
            );
            Ok(u8::from(!violations.is_empty()))
        }
        Cmd::CheckGeodesic { radius } => {
            let violations = check_geodesic_two_sided(params, *radius)?;
            for v in &violations {
                println!(
                    "{},{},{},{},{},{}",
                    v.h.to_word(),
                    step_label(&v.a),
                    step_label(&v.b),
                    v.t,
                    v.distance,
                    (v.len_sum as f64) / 2.0 + 1.0
                );
            }
            println!(
                "check-geodesic q={} radius={}: {} violations",
                params.q(),
                radius,
                violations.len()
            );
            Ok(u8::from(!violations.is_empty()))
        }
        Cmd::CheckNarrow { radius } => {
            let report = check_narrow_shape(params, *radius)?;
            for v in &report.violations {
                println!(
                    "{},{},{},{},{},{}",
                    v.h.to_word(),
                    step_label(&v.a),
                    step_label(&v.b),
                    v.t,
                    v.distance,
                    allowance(v.len_sum, params)
                );
            }
            if cli.csv.is_some() {
                let mut out = String::from("h,a,b,t,distance,allowance\n");
                for w in &report.witnesses {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        w.h.to_word(),
                        step_label(&w.a),
                        step_label(&w.b),
                        w.t,
                        w.distance,
                        allowance(w.len_sum, params)
                    ));
                }
                emit(&cli.csv, &out)?;
            }
            println!(
                "check-narrow q={} radius={}: {} elements, {} violations",
                params.q(),
                radius,
                report.elements,
                report.violations.len()
            );
            Ok(u8::from(!report.violations.is_empty()))
        }
        Cmd::Diagram { word, out, format } => {
            if format != "json" {
                return Err(CliError::Usage(format!("unsupported format {format:?}")));
            }
            let w = Word::parse(word)?;
            let d = build_diagram(&w, params)?;
            let report = validate_diagram(&d, params);
            let doc = json!({
                "q": d.q,
                "word": d.word.to_string(),
                "vertices": d.vertices.iter().enumerate().map(|(id, v)| json!({
                    "id": id,
                    "element": v.element.to_word().to_string(),
                    "generation": v.generation,
                })).collect::<Vec<_>>(),
                "edges": d.edges.iter().map(|e| json!({
                    "from": e.from,
                    "to": e.to,
                    "letter": e.letter.map(|l| l.to_string()),
                })).collect::<Vec<_>>(),
                "cells": d.cells.iter().map(|c| json!({
                    "boundary": c.boundary.iter().map(|&(e, fwd)| json!({
                        "edge": e,
                        "reversed": !fwd,
                    })).collect::<Vec<_>>(),
                    "depth": c.depth,
                    "degenerate": c.degenerate,
                })).collect::<Vec<_>>(),
                "area": d.area(),
                "diameter": d.diameter(),
                "depth_used": d.max_depth_used,
            });
            fs::write(out, serde_json::to_string_pretty(&doc)? + "\n")?;
            println!(
                "diagram: area={} diameter={} depth_used={} cells={} valid={}",
                d.area(),
                d.diameter(),
                d.max_depth_used,
                d.cells.len(),
                report.all_passed()
            );
            if report.all_passed() {
                Ok(0)
            } else {
                for f in &report.failures {
                    eprintln!("validation: {f}");
                }
                Ok(1)
            }
        }
        Cmd::Survey {
            ns,
            random_per_n,
            timings,
        } => {
            let opts = SurveyOptions {
                seed: cli.seed,
                random_per_n: *random_per_n,
                timings: *timings,
            };
            let rows = survey(params, ns, &opts);
            let mut had_error = false;
            for row in &rows {
                if let Err(e) = row {
                    had_error = true;
                    eprintln!("survey: {e}");
                }
            }
            emit(&cli.csv, &render_survey_csv(&rows))?;
            Ok(u8::from(had_error))
        }
        Cmd::Lowerbound { n } => {
            let report = lower_bound_check(*n, params)?;
            let ratio = if *n >= 2 && report.area_built > 0 {
                format!(
                    " log_area/log_n={:.3}",
                    (report.area_built as f64).ln() / (*n as f64).ln()
                )
            } else {
                String::new()
            };
            println!(
                "lowerbound n={} q={}: trace={} area_built={} expected_cube={}{} => {}",
                report.n,
                params.q(),
                report.trace,
                report.area_built,
                (report.n as i64).pow(3),
                ratio,
                if report.passed { "ok" } else { "FAILED" }
            );
            Ok(u8::from(!report.passed))
        }
        Cmd::Fuzz { word, iterations } => {
            let w = Word::parse(word)?;
            let report = invariance_fuzz(&w, *iterations, cli.seed, params)?;
            println!(
                "fuzz: {} variants, base trace {}, {} mismatches",
                report.variants,
                report.base_trace,
                report.mismatches.len()
            );
            for m in report.mismatches.iter().take(5) {
                eprintln!("mismatch at iteration {}: trace {}", m.iteration, m.trace);
            }
            Ok(u8::from(!report.all_equal()))
        }
    }
}

fn allowance(len_sum: u32, params: &GroupParams) -> String {
    let ratio = len_sum as f64 * GroupParams::K_DEN as f64 / GroupParams::K_NUM as f64;
    let floor = params.narrow_m() as f64 / 2.0;
    format!("{:.3}", ratio.max(floor))
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}
