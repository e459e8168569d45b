//! CSV outputs. Every file starts with a `#` header line carrying the
//! scenario hash and seed, then the column names.

use std::io::{self, Write};

use sdcsim_core::cluster::{ClusterKind, PathOrigin, ResolvedPath};
use sdcsim_core::drifting::SnapshotChannel;
use sdcsim_core::metrics::{CorrelationProfile, PowerTraceRow};
use sdcsim_core::positioning::PositionFix;
use sdcsim_core::Vec3;

pub const TRACE_HEADER: &str = "snapshot,trp_id,fap_delay_ns,fap_power_db,total_power_db,los_delay_ns,olos_flag";
pub const CIR_HEADER: &str = "path_id,origin,delay_ns,power_db,phase_rad,aod_az_deg,aod_el_deg,aoa_az_deg,aoa_el_deg,fbs_x,fbs_y,fbs_z,lbs_x,lbs_y,lbs_z,blocked";
pub const PROFILE_HEADER: &str = "delay_ns,re,im,mag_db";
pub const POSITION_HEADER: &str = "snapshot,x,y,z,error_m,residual_rms_m,iterations,converged,olos_flag";

/// Formats like C's `%.9g`: 9 significant digits, trailing zeros removed,
/// scientific notation for exponents below -4 or from 9 up.
pub fn g9(x: f64) -> String {
    const PRECISION: i32 = 9;
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".to_string() } else { "-inf".to_string() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".to_string() } else { "0".to_string() };
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= PRECISION {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `# scenario=<hash> seed=<seed>` plus free-form context.
pub fn header_line(hash: &str, seed: u64, context: &str) -> String {
    if context.is_empty() {
        format!("# scenario={hash} seed={seed}")
    } else {
        format!("# scenario={hash} seed={seed} {context}")
    }
}

pub fn origin_label(origin: PathOrigin) -> &'static str {
    match origin {
        PathOrigin::Los => "los",
        PathOrigin::GroundReflection => "ground",
        PathOrigin::Sdc { kind, .. } => match kind {
            ClusterKind::SpecularReflector => "sdc_specular",
            ClusterKind::DiffractionEdge => "sdc_diffraction",
            ClusterKind::Fixed => "sdc_fixed",
            ClusterKind::Relative => "sdc_relative",
            ClusterKind::Random => "random",
        },
        PathOrigin::Random { .. } => "random",
    }
}

pub fn write_trace<W: Write>(mut w: W, header: &str, rows: &[PowerTraceRow]) -> io::Result<()> {
    writeln!(w, "{header}")?;
    writeln!(w, "{TRACE_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.snapshot,
            r.link.trp,
            g9(r.fap_delay * 1e9),
            g9(r.fap_power_db),
            g9(r.total_power_db),
            g9(r.los_delay * 1e9),
            u8::from(r.olos)
        )?;
    }
    Ok(())
}

fn path_id(p: &ResolvedPath) -> String {
    format!("{}.{}", p.path, p.subpath)
}

pub fn write_cir<W: Write>(mut w: W, header: &str, channel: &SnapshotChannel) -> io::Result<()> {
    writeln!(w, "{header}")?;
    writeln!(w, "{CIR_HEADER}")?;
    let mut paths: Vec<&ResolvedPath> = channel.paths.iter().collect();
    paths.sort_by(|a, b| (a.path, a.subpath).cmp(&(b.path, b.subpath)));
    for p in paths {
        let v = |x: Vec3| format!("{},{},{}", g9(x.x), g9(x.y), g9(x.z));
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            path_id(p),
            origin_label(p.origin),
            g9(p.delay * 1e9),
            g9(p.power_db()),
            g9(p.phase),
            g9(p.departure.azimuth().to_degrees()),
            g9(p.departure.elevation().to_degrees()),
            g9(p.arrival.azimuth().to_degrees()),
            g9(p.arrival.elevation().to_degrees()),
            v(p.fbs),
            v(p.lbs),
            u8::from(p.blocked)
        )?;
    }
    Ok(())
}

pub fn write_profile<W: Write>(mut w: W, header: &str, profile: &CorrelationProfile) -> io::Result<()> {
    writeln!(w, "{header}")?;
    writeln!(w, "{PROFILE_HEADER}")?;
    for (delay, s) in profile.iter() {
        writeln!(w, "{},{},{},{}", g9(delay * 1e9), g9(s.re), g9(s.im), g9(10.0 * s.norm_sqr().log10()))?;
    }
    Ok(())
}

/// One solved snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionRow {
    pub snapshot: usize,
    pub fix: PositionFix,
    pub error: f64,
    pub olos: bool,
}

pub fn write_positions<W: Write>(mut w: W, header: &str, rows: &[PositionRow]) -> io::Result<()> {
    writeln!(w, "{header}")?;
    writeln!(w, "{POSITION_HEADER}")?;
    for r in rows {
        let p = r.fix.position;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.snapshot,
            g9(p.x),
            g9(p.y),
            g9(p.z),
            g9(r.error),
            g9(r.fix.residual_rms),
            r.fix.iterations,
            u8::from(r.fix.converged),
            u8::from(r.olos)
        )?;
    }
    Ok(())
}
