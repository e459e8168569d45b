use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use sdcsim::run::{dump_cir, simulate, trace_link, write_position_file};
use sdcsim::{output, parse_scenario, reference_scenario, to_json};
use sdcsim_core::positioning::{error_report, PositionSample};
use sdcsim_core::scenario::Scenario;

/// Geometric-stochastic channel simulator with semi-deterministic clusters.
#[derive(Parser)]
#[command(name = "sdcsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate every link and write one trace CSV per TRP.
    Simulate {
        scenario: PathBuf,
        #[arg(long, env = "SDCSIM_OUT_DIR", default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the built-in reference scenario as JSON.
    ReferenceScenario,
    /// Power trace of one TRP (stdout unless --out is given).
    Trace {
        /// Scenario file; the built-in reference when omitted.
        scenario: Option<PathBuf>,
        #[arg(long)]
        trp: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the CIR and correlation profile of one link at one snapshot.
    Cir {
        scenario: Option<PathBuf>,
        #[arg(long)]
        trp: u32,
        #[arg(long)]
        snapshot: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "SDCSIM_OUT_DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Solve the UE position at every snapshot from FAP ranges.
    Position {
        scenario: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a scenario file and report the first problem.
    Validate { scenario: PathBuf },
}

fn load(path: Option<&Path>, seed: Option<u64>) -> Result<Scenario> {
    let mut scenario = match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_scenario(&text).with_context(|| format!("in {}", p.display()))?
        }
        None => reference_scenario(),
    };
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    Ok(scenario)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { scenario, out, seed } => {
            let s = load(Some(&scenario), seed)?;
            for path in simulate(&s, &out)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::ReferenceScenario => {
            println!("{}", to_json(&reference_scenario()));
        }
        Command::Trace { scenario, trp, seed, out } => {
            let s = load(scenario.as_deref(), seed)?;
            let rows = trace_link(&s, trp)?;
            match out {
                Some(path) => sdcsim::run::write_trace_file(&path, &s, trp, &rows)?,
                None => {
                    let header = sdcsim::run::file_header(&s, &format!("trp={trp}"));
                    let stdout = io::stdout();
                    let mut lock = stdout.lock();
                    output::write_trace(&mut lock, &header, &rows)?;
                    lock.flush()?;
                }
            }
        }
        Command::Cir { scenario, trp, snapshot, seed, out } => {
            let s = load(scenario.as_deref(), seed)?;
            let (cir, profile) = dump_cir(&s, trp, snapshot, &out)?;
            eprintln!("wrote {}", cir.display());
            eprintln!("wrote {}", profile.display());
        }
        Command::Position { scenario, out, seed } => {
            let s = load(scenario.as_deref(), seed)?;
            let rows = write_position_file(&s, &out)?;
            let truth = s.ue_positions();
            let samples: Vec<PositionSample> = rows
                .iter()
                .map(|r| PositionSample { snapshot: r.snapshot, estimate: r.fix.position, truth: truth[r.snapshot], olos: r.olos })
                .collect();
            let report = error_report(&samples);
            for (label, stats) in [("all", report.all), ("los", report.los), ("olos", report.olos)] {
                if let Some(st) = stats {
                    eprintln!(
                        "{label}: n={} median={} m p90={} m",
                        st.count,
                        output::g9(st.median),
                        output::g9(st.p90)
                    );
                }
            }
            eprintln!("wrote {}", out.display());
        }
        Command::Validate { scenario } => {
            let s = load(Some(&scenario), None)?;
            println!("{}: ok ({} TRPs, {} clusters, {} snapshots)", scenario.display(), s.trps.len(), s.sdcs.len(), s.snapshots);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
