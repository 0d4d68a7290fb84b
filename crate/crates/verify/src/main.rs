use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use pfaffian_core::skew::{canonical_decompose, pfaffian_fast};
use pfaffian_core::variety::{distance, project, stratum};
use pfaffian_core::VarietySpec;
use pfaffian_verify::format::{read_skew, write_skew};
use pfaffian_verify::report::combined_exit_code;
use pfaffian_verify::suites::{run_suite, DEFAULT_GRID, SUITE_NAMES};
use pfaffian_verify::sweep::{emit_sweep, SweepKind};
use serde_json::json;

const USAGE_EXIT: u8 = 3;

#[derive(Parser)]
#[command(name = "pfaffian-verify", version)]
#[command(about = "Seeded numerical verification of Pfaffian varieties C(n, 2r)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and emit a JSON report.
    ///
    /// Exit status: 0 pass, 1 fail, 2 unsupported regime, 3 usage error.
    Verify {
        /// Suite name, or `all`
        suite: String,
        /// Matrix size; omit together with --r to run the default grid
        #[arg(long, requires = "r")]
        n: Option<usize>,
        /// Half of the maximal rank
        #[arg(long, requires = "n")]
        r: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Defect tolerance (defaults to the suite's own)
        #[arg(long)]
        tol: Option<f64>,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a plot-ready CSV sweep.
    Sweep {
        #[command(subcommand)]
        kind: SweepCommand,
    },
    /// Canonical form, Pfaffian and (with --r) projection of a matrix record
    /// `{"n": .., "upper": [..]}`.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Member,
    NonMember,
}

#[derive(Subcommand)]
enum SweepCommand {
    /// w1*w2 along the level set x_i^2 - t^2 = c_i^2
    Composite {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// Level labels, descending, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2.0)]
        t_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Approach residual or secant distance against t on a log grid
    Slope {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// Half-rank of the base point
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value = "member")]
        direction: Direction,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// det(I - t A_v) from t = 0 to the focal radius
    WedgeDet {
        #[arg(long)]
        n: usize,
        /// Pairs x_1 > ... > x_r, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        /// Use a generic unit normal instead of a rank-two one
        #[arg(long)]
        generic: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE_EXIT),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE_EXIT)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Verify { suite, n, r, seed, trials, tol, out } => {
            let names: Vec<&str> = if suite == "all" { SUITE_NAMES.to_vec() } else { vec![suite.as_str()] };
            let specs: Vec<VarietySpec> = match (n, r) {
                (Some(n), Some(r)) => vec![VarietySpec::new(n, r)?],
                _ => DEFAULT_GRID.iter().map(|&(n, r)| VarietySpec::new(n, r).expect("grid is valid")).collect(),
            };
            let mut reports = Vec::new();
            for name in &names {
                for spec in &specs {
                    let report = run_suite(name, *spec, seed, trials, tol)?;
                    eprintln!(
                        "{} (n={}, r={}): {:?} violations={}/{} max_defect={:e} [{:.2}s]",
                        report.suite,
                        report.spec.n,
                        report.spec.r,
                        report.verdict,
                        report.violations,
                        report.trials,
                        report.max_defect,
                        report.elapsed
                    );
                    reports.push(report);
                }
            }
            let text =
                if reports.len() == 1 { serde_json::to_string_pretty(&reports[0])? } else { serde_json::to_string_pretty(&reports)? };
            match out {
                Some(path) => fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
                None => println!("{text}"),
            }
            Ok(combined_exit_code(&reports) as u8)
        }
        Command::Sweep { kind } => {
            let (kind, out) = match kind {
                SweepCommand::Composite { n, r, c, seed, t_max, points, out } => {
                    (SweepKind::Composite { n, r, c, seed, t_max, points }, out)
                }
                SweepCommand::Slope { n, r, k, direction, seed, out } => {
                    let member = matches!(direction, Direction::Member);
                    (SweepKind::Slope { n, r, k, member, seed }, out)
                }
                SweepCommand::WedgeDet { n, x, generic, seed, points, out } => {
                    (SweepKind::WedgeDet { n, x, rank_two: !generic, seed, points }, out)
                }
            };
            let s = emit_sweep(&kind, &out)?;
            eprintln!("wrote {} rows to {}", s.rows.len(), out.display());
            Ok(0)
        }
        Command::Decompose { input, r } => {
            let m = read_skew(&input)?;
            let cf = canonical_decompose(&m, 1e-9);
            let mut value = json!({
                "n": m.dim(),
                "pairs": cf.pairs,
                "rank": stratum(&m, 1e-9),
                "pfaffian": pfaffian_fast(&m),
                "q": (0..m.dim()).map(|i| (0..m.dim()).map(|j| cf.q[(i, j)]).collect::<Vec<_>>()).collect::<Vec<_>>(),
            });
            if let Some(r) = r {
                let spec = VarietySpec::new(m.dim(), r)?;
                let p = project(spec, &m)?;
                value["projection"] = serde_json::from_str(&write_skew(&p.matrix))?;
                value["projection_non_unique"] = json!(p.non_unique);
                value["distance"] = json!(distance(spec, &m)?);
            }
            println!("{}", serde_json::to_string_pretty(&value)?);
            Ok(0)
        }
    }
}
