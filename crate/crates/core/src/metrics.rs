//! Band-limited correlation profiles, first-arriving-path detection and
//! power traces.
//!
//! All powers are dB of linear path amplitude; 0 dB is a unit amplitude.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand_distr::{Distribution, StandardNormal};

use crate::cluster::LinkId;
use crate::drifting::SnapshotChannel;
use crate::error::{config, domain, Error, Result};
use crate::propagation::RfConfig;
use crate::rng::{StreamId, StreamPurpose};
use crate::SPEED_OF_LIGHT;

/// Raised-cosine pulses are evaluated out to this many pulse widths `1/B`
/// around each path and taken as zero beyond. At roll-off 1 the dropped
/// tail is below -75 dB.
pub const RAISED_COSINE_SPAN: f64 = 8.0;

/// Autocorrelation pulse of the reference signal, unit peak at zero lag.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "shape", rename_all = "snake_case"))]
pub enum PulseShape {
    /// `sinc(t B)`; main lobe `2/B` wide.
    Sinc,
    /// Raised cosine with period `1/B`; same main-lobe zeros as the sinc for
    /// small roll-off, much faster decaying side lobes.
    RaisedCosine { roll_off: f64 },
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

impl PulseShape {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PulseShape::Sinc => Ok(()),
            PulseShape::RaisedCosine { roll_off } if (0.0..=1.0).contains(&roll_off) => Ok(()),
            PulseShape::RaisedCosine { roll_off } => Err(config!("raised-cosine roll-off must be in [0, 1], got {roll_off}")),
        }
    }

    /// Pulse value at lag `t` seconds for bandwidth `bandwidth` Hz.
    pub fn value(&self, t: f64, bandwidth: f64) -> f64 {
        let x = t * bandwidth;
        match *self {
            PulseShape::Sinc => sinc(x),
            PulseShape::RaisedCosine { roll_off } => {
                let q = 2.0 * roll_off * x;
                if (1.0 - q * q).abs() < 1e-9 {
                    PI / 4.0 * sinc(1.0 / (2.0 * roll_off))
                } else {
                    sinc(x) * (PI * roll_off * x).cos() / (1.0 - q * q)
                }
            }
        }
    }

    /// Half-width of the support used when synthesizing profiles, seconds.
    /// `None` means the whole grid.
    pub fn support(&self, bandwidth: f64) -> Option<f64> {
        match self {
            PulseShape::Sinc => None,
            PulseShape::RaisedCosine { .. } => Some(RAISED_COSINE_SPAN / bandwidth),
        }
    }
}

/// Settings of profile synthesis and FAP detection.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct MetricsConfig {
    /// Samples per `1/B`.
    pub oversampling: usize,
    /// Peaks within this many dB of the strongest one qualify as FAP.
    pub fap_threshold_db: f64,
    pub pulse: PulseShape,
    /// Power per sample of an additive white noise floor, dB. Off when absent.
    pub noise_floor_db: Option<f64>,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            oversampling: 16,
            fap_threshold_db: 25.0,
            pulse: PulseShape::RaisedCosine { roll_off: 1.0 },
            noise_floor_db: None,
        }
    }
}

impl MetricsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.oversampling == 0 {
            return Err(config!("oversampling must be at least 1"));
        }
        if !(self.fap_threshold_db > 0.0 && self.fap_threshold_db.is_finite()) {
            return Err(config!("FAP threshold must be > 0 dB"));
        }
        if self.noise_floor_db.is_some_and(|n| !n.is_finite()) {
            return Err(config!("noise floor must be finite"));
        }
        self.pulse.validate()
    }
}

/// Correlation magnitude over a uniform delay grid starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationProfile {
    pub link: LinkId,
    pub snapshot: usize,
    pub bandwidth: f64,
    pub oversampling: usize,
    /// Grid spacing, seconds.
    pub step: f64,
    pub samples: Vec<Complex64>,
}

impl CorrelationProfile {
    pub fn delay(&self, index: usize) -> f64 {
        index as f64 * self.step
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn power_db(&self, index: usize) -> f64 {
        10.0 * self.samples[index].norm_sqr().log10()
    }

    /// `(delay, sample)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.samples.iter().enumerate().map(|(i, &v)| (self.delay(i), v))
    }
}

/// Coherent sum of one pulse per path.
pub fn band_limited_profile(channel: &SnapshotChannel, rf: &RfConfig, config: &MetricsConfig) -> Result<CorrelationProfile> {
    if channel.paths.is_empty() {
        return Err(domain!("cannot build a profile without paths"));
    }
    rf.validate()?;
    config.validate()?;
    let b = rf.bandwidth_hz;
    let step = 1.0 / (b * config.oversampling as f64);
    let max_delay = channel.paths.iter().map(|p| p.delay).fold(0.0, f64::max);
    let n = ((max_delay + 4.0 / b) / step).ceil() as usize + 1;
    let mut samples = alloc::vec![Complex64::new(0.0, 0.0); n];
    let support = config.pulse.support(b);
    for p in &channel.paths {
        let alpha = p.amplitude();
        if alpha.norm_sqr() == 0.0 {
            continue;
        }
        let (lo, hi) = match support {
            Some(w) => (
                ((p.delay - w) / step).floor().max(0.0) as usize,
                (((p.delay + w) / step).ceil() as usize + 1).min(n),
            ),
            None => (0, n),
        };
        for (k, s) in samples.iter_mut().enumerate().take(hi).skip(lo) {
            *s += alpha * config.pulse.value(k as f64 * step - p.delay, b);
        }
    }
    Ok(CorrelationProfile { link: channel.link, snapshot: channel.snapshot, bandwidth: b, oversampling: config.oversampling, step, samples })
}

/// Adds white complex Gaussian noise of `power_db` per sample.
pub fn add_noise_floor(profile: &mut CorrelationProfile, power_db: f64, stream: StreamId) {
    let mut rng = stream.rng(StreamPurpose::NoiseFloor);
    let sigma = (10f64.powf(power_db / 10.0) / 2.0).sqrt();
    for s in &mut profile.samples {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *s += Complex64::new(re, im) * sigma;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FapEstimate {
    /// Seconds.
    pub delay: f64,
    pub power_db: f64,
    /// Grid index of the peak sample.
    pub index: usize,
}

/// Earliest local maximum whose power is within `threshold_db` of the
/// global maximum, refined by a parabola through three samples (in dB).
pub fn detect_fap(profile: &CorrelationProfile, threshold_db: f64) -> Result<FapEstimate> {
    if profile.is_empty() {
        return Err(domain!("empty profile"));
    }
    let power: Vec<f64> = profile.samples.iter().map(|s| s.norm_sqr()).collect();
    let peak = power.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::DetectionFailure);
    }
    let gate = peak * 10f64.powf(-threshold_db / 10.0);
    let n = power.len();
    let is_local_max = |k: usize| {
        let left = k == 0 || power[k] >= power[k - 1];
        let right = k + 1 == n || power[k] > power[k + 1];
        left && right
    };
    let k = (0..n).find(|&k| power[k] >= gate && is_local_max(k)).ok_or(Error::DetectionFailure)?;
    let db = |i: usize| 10.0 * power[i].max(f64::MIN_POSITIVE).log10();
    let (mut delay, mut power_db) = (profile.delay(k), db(k));
    if k > 0 && k + 1 < n {
        let (y0, y1, y2) = (db(k - 1), db(k), db(k + 1));
        let denom = y0 - 2.0 * y1 + y2;
        if denom < 0.0 {
            let d = (0.5 * (y0 - y2) / denom).clamp(-0.5, 0.5);
            delay += d * profile.step;
            power_db = y1 - 0.25 * (y0 - y2) * d;
        }
    }
    Ok(FapEstimate { delay, power_db, index: k })
}

/// `10 log10(sum |amplitude|^2)` over all paths.
pub fn total_power_db(channel: &SnapshotChannel) -> Result<f64> {
    if channel.paths.is_empty() {
        return Err(domain!("no paths"));
    }
    Ok(10.0 * channel.paths.iter().map(|p| p.magnitude * p.magnitude).sum::<f64>().log10())
}

/// One snapshot of a power trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTraceRow {
    pub snapshot: usize,
    pub link: LinkId,
    pub fap_delay: f64,
    pub fap_power_db: f64,
    pub total_power_db: f64,
    /// Geometric delay of the direct path, seconds.
    pub los_delay: f64,
    /// Direct path blocked.
    pub olos: bool,
}

/// Trace row of one snapshot. `seed` drives the optional noise floor.
pub fn trace_row(channel: &SnapshotChannel, rf: &RfConfig, config: &MetricsConfig, seed: u64) -> Result<PowerTraceRow> {
    let mut profile = band_limited_profile(channel, rf, config)?;
    if let Some(floor) = config.noise_floor_db {
        add_noise_floor(&mut profile, floor, StreamId::new(seed, channel.link.trp, channel.snapshot as u32));
    }
    let fap = detect_fap(&profile, config.fap_threshold_db)?;
    let los = channel.los();
    Ok(PowerTraceRow {
        snapshot: channel.snapshot,
        link: channel.link,
        fap_delay: fap.delay,
        fap_power_db: fap.power_db,
        total_power_db: total_power_db(channel)?,
        los_delay: los.map_or(f64::NAN, |p| p.length() / SPEED_OF_LIGHT),
        olos: los.is_some_and(|p| p.blocked),
    })
}

pub fn power_trace(channels: &[SnapshotChannel], rf: &RfConfig, config: &MetricsConfig, seed: u64) -> Result<Vec<PowerTraceRow>> {
    if channels.is_empty() {
        return Err(domain!("a power trace needs at least one snapshot"));
    }
    channels.iter().map(|c| trace_row(c, rf, config, seed)).collect()
}
