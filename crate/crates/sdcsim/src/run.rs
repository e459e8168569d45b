//! Batch simulation of all links and the files it produces.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sdcsim_core::drifting::{for_each_snapshot, scenario_track, simulate_snapshot, SnapshotChannel};
use sdcsim_core::metrics::{band_limited_profile, trace_row, CorrelationProfile, PowerTraceRow};
use sdcsim_core::positioning::{centroid, ls_position, RangeMeasurement, SolveMode};
use sdcsim_core::scenario::Scenario;
use sdcsim_core::SPEED_OF_LIGHT;

use crate::config::{scenario_hash, validate_scenario, ScenarioError};
use crate::output::{header_line, write_cir, write_positions, write_profile, write_trace, PositionRow};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("TRP {trp}{}: {source}", snapshot.map(|s| format!(", snapshot {s}")).unwrap_or_default())]
    Simulation { trp: u32, snapshot: Option<usize>, source: sdcsim_core::Error },
    #[error("no TRP with id {0}")]
    UnknownTrp(u32),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

fn sim_err(trp: u32, snapshot: Option<usize>) -> impl FnOnce(sdcsim_core::Error) -> RunError {
    move |source| RunError::Simulation { trp, snapshot, source }
}

fn trp_index(scenario: &Scenario, trp: u32) -> Result<usize, RunError> {
    scenario.trp_index(trp).ok_or(RunError::UnknownTrp(trp))
}

/// Power trace of one TRP, in snapshot order.
pub fn trace_link(scenario: &Scenario, trp: u32) -> Result<Vec<PowerTraceRow>, RunError> {
    let index = trp_index(scenario, trp)?;
    let track = scenario_track(scenario).map_err(sim_err(trp, None))?;
    let mut rows = Vec::with_capacity(scenario.snapshots);
    let mut failed_at = None;
    for_each_snapshot(scenario, index, &track, |ch| {
        failed_at = Some(ch.snapshot);
        rows.push(trace_row(&ch, &scenario.rf, &scenario.metrics, scenario.seed)?);
        Ok(())
    })
    .map_err(|e| sim_err(trp, failed_at)(e))?;
    Ok(rows)
}

/// Traces of all TRPs, simulated in parallel and returned sorted by TRP id.
pub fn trace_all(scenario: &Scenario) -> Result<Vec<(u32, Vec<PowerTraceRow>)>, RunError> {
    let mut ids: Vec<u32> = scenario.trps.iter().map(|t| t.id).collect();
    ids.sort_unstable();
    ids.par_iter().map(|&id| trace_link(scenario, id).map(|rows| (id, rows))).collect()
}

/// Channel and correlation profile of one link at one snapshot.
pub fn cir_snapshot(scenario: &Scenario, trp: u32, snapshot: usize) -> Result<(SnapshotChannel, CorrelationProfile), RunError> {
    let index = trp_index(scenario, trp)?;
    let channel = simulate_snapshot(scenario, index, snapshot).map_err(sim_err(trp, Some(snapshot)))?;
    let profile = band_limited_profile(&channel, &scenario.rf, &scenario.metrics).map_err(sim_err(trp, Some(snapshot)))?;
    Ok((channel, profile))
}

/// Least-squares position per snapshot from the FAP ranges of every TRP.
pub fn solve_positions(scenario: &Scenario, traces: &[(u32, Vec<PowerTraceRow>)]) -> Result<Vec<PositionRow>, RunError> {
    let truth = scenario.ue_positions();
    (0..scenario.snapshots)
        .into_par_iter()
        .map(|s| {
            let ranges: Vec<RangeMeasurement> = traces
                .iter()
                .map(|(id, rows)| {
                    let trp = scenario.trps[scenario.trp_index(*id).expect("trace of a known TRP")].position;
                    RangeMeasurement { trp_id: *id, trp, range: rows[s].fap_delay * SPEED_OF_LIGHT, olos: rows[s].olos }
                })
                .collect();
            let fix = ls_position(&ranges, centroid(&ranges), SolveMode::Full3d).map_err(sim_err(0, Some(s)))?;
            Ok(PositionRow {
                snapshot: s,
                error: fix.position.distance(truth[s]),
                olos: ranges.iter().any(|r| r.olos),
                fix,
            })
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.to_path_buf(), source })?;
    }
    File::create(path).map(BufWriter::new).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

fn finish(path: &Path, result: io::Result<()>, mut w: BufWriter<File>) -> Result<(), RunError> {
    result.and_then(|_| w.flush()).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

pub fn trace_file_name(trp: u32) -> String {
    format!("trace_trp{trp}.csv")
}

/// Header line for files produced from `scenario`.
pub fn file_header(scenario: &Scenario, context: &str) -> String {
    header_line(&scenario_hash(scenario), scenario.seed, context)
}

pub fn write_trace_file(path: &Path, scenario: &Scenario, trp: u32, rows: &[PowerTraceRow]) -> Result<(), RunError> {
    let mut w = create(path)?;
    let r = write_trace(&mut w, &file_header(scenario, &format!("trp={trp}")), rows);
    finish(path, r, w)
}

/// Simulates every link and writes one trace file per TRP into `out`.
/// Returns the written paths in TRP order.
pub fn simulate(scenario: &Scenario, out: &Path) -> Result<Vec<PathBuf>, RunError> {
    validate_scenario(scenario)?;
    let traces = trace_all(scenario)?;
    let mut written = Vec::with_capacity(traces.len());
    for (trp, rows) in &traces {
        let path = out.join(trace_file_name(*trp));
        write_trace_file(&path, scenario, *trp, rows)?;
        written.push(path);
    }
    Ok(written)
}

/// Writes the CIR and profile of one link and snapshot into `out`.
pub fn dump_cir(scenario: &Scenario, trp: u32, snapshot: usize, out: &Path) -> Result<(PathBuf, PathBuf), RunError> {
    validate_scenario(scenario)?;
    let (channel, profile) = cir_snapshot(scenario, trp, snapshot)?;
    let header = file_header(scenario, &format!("trp={trp} snapshot={snapshot}"));
    let cir_path = out.join(format!("cir_trp{trp}_s{snapshot}.csv"));
    let mut w = create(&cir_path)?;
    let r = write_cir(&mut w, &header, &channel);
    finish(&cir_path, r, w)?;
    let profile_path = out.join(format!("profile_trp{trp}_s{snapshot}.csv"));
    let mut w = create(&profile_path)?;
    let r = write_profile(&mut w, &header, &profile);
    finish(&profile_path, r, w)?;
    Ok((cir_path, profile_path))
}

/// Solves the UE position at every snapshot and writes the result.
pub fn write_position_file(scenario: &Scenario, path: &Path) -> Result<Vec<PositionRow>, RunError> {
    validate_scenario(scenario)?;
    let traces = trace_all(scenario)?;
    let rows = solve_positions(scenario, &traces)?;
    let mut w = create(path)?;
    let r = write_positions(&mut w, &file_header(scenario, ""), &rows);
    finish(path, r, w)?;
    Ok(rows)
}
