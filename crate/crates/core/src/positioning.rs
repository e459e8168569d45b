//! Time-of-arrival positioning from FAP ranges.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::geometry::Vec3;

/// Range to one TRP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeMeasurement {
    pub trp_id: u32,
    pub trp: Vec3,
    /// Meters.
    pub range: f64,
    /// The direct path to this TRP was blocked.
    pub olos: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveMode {
    /// Solve all three coordinates; needs 4 TRPs.
    Full3d,
    /// Height known; solve x and y from 3 TRPs.
    FixedHeight(f64),
}

impl SolveMode {
    fn unknowns(&self) -> usize {
        match self {
            SolveMode::Full3d => 3,
            SolveMode::FixedHeight(_) => 2,
        }
    }
}

pub const MAX_ITERATIONS: usize = 50;
pub const STEP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionFix {
    pub position: Vec3,
    /// Root mean square of the range residuals, meters.
    pub residual_rms: f64,
    pub iterations: usize,
    /// False when the iteration limit was hit before the step got small.
    pub converged: bool,
}

fn cost(ranges: &[RangeMeasurement], p: Vec3) -> f64 {
    ranges.iter().map(|r| (p.distance(r.trp) - r.range).powi(2)).sum()
}

/// Solves `A x = b` for a symmetric positive definite `A` of size `n <= 3`
/// by Gaussian elimination with partial pivoting.
fn solve_normal(mut a: [[f64; 3]; 3], mut b: [f64; 3], n: usize) -> Option<[f64; 3]> {
    let scale = (0..n).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Gauss–Newton minimization of `sum (|p - trp_i| - r_i)^2`, with step
/// halving whenever a full step would increase the cost.
pub fn ls_position(ranges: &[RangeMeasurement], initial: Vec3, mode: SolveMode) -> Result<PositionFix> {
    let n = mode.unknowns();
    let needed = n + 1;
    if ranges.len() < needed {
        return Err(Error::SingularGeometry(alloc::format!(
            "{} ranges given, at least {needed} needed",
            ranges.len()
        )));
    }
    if let Some(r) = ranges.iter().find(|r| !(r.range.is_finite() && r.range > 0.0) || !r.trp.is_finite()) {
        return Err(domain!("range to TRP {} must be finite and positive, got {}", r.trp_id, r.range));
    }
    let mut p = match mode {
        SolveMode::Full3d => initial,
        SolveMode::FixedHeight(z) => Vec3::new(initial.x, initial.y, z),
    };
    let mut current = cost(ranges, p);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for r in ranges {
            let d = p - r.trp;
            let dist = d.norm();
            // a TRP sitting on the iterate contributes no direction
            if dist < 1e-12 {
                continue;
            }
            let g = [d.x / dist, d.y / dist, d.z / dist];
            let res = dist - r.range;
            for i in 0..n {
                jtr[i] -= g[i] * res;
                for k in 0..n {
                    jtj[i][k] += g[i] * g[k];
                }
            }
        }
        let x = solve_normal(jtj, jtr, n).ok_or_else(|| Error::SingularGeometry("normal equations are singular".into()))?;
        let mut step = Vec3::new(x[0], x[1], if n == 3 { x[2] } else { 0.0 });
        let mut next = p + step;
        let mut next_cost = cost(ranges, next);
        let mut halvings = 0;
        // cost differences at rounding level must not trigger a halving
        let slack = 1e-12 * current + 1e-24;
        while next_cost > current + slack && halvings < 30 {
            step = step * 0.5;
            next = p + step;
            next_cost = cost(ranges, next);
            halvings += 1;
        }
        if next_cost <= current + slack {
            p = next;
            current = next_cost;
        }
        if step.norm() < STEP_TOLERANCE {
            converged = true;
            break;
        }
    }
    Ok(PositionFix { position: p, residual_rms: (current / ranges.len() as f64).sqrt(), iterations, converged })
}

/// Mean of the TRP positions, the default starting point.
pub fn centroid(ranges: &[RangeMeasurement]) -> Vec3 {
    let sum = ranges.iter().fold(Vec3::ZERO, |acc, r| acc + r.trp);
    sum / ranges.len().max(1) as f64
}

/// One position estimate against ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionSample {
    pub snapshot: usize,
    pub estimate: Vec3,
    pub truth: Vec3,
    /// Any contributing link was OLOS.
    pub olos: bool,
}

impl PositionSample {
    pub fn error(&self) -> f64 {
        self.estimate.distance(self.truth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub count: usize,
    pub median: f64,
    pub p90: f64,
}

/// Percentile with linear interpolation between order statistics.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn stats(errors: impl Iterator<Item = f64>) -> Option<ErrorStats> {
    let mut v: Vec<f64> = errors.collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(ErrorStats { count: v.len(), median: percentile(&v, 0.5), p90: percentile(&v, 0.9) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    /// Error norm per sample, in input order.
    pub errors: Vec<f64>,
    pub all: Option<ErrorStats>,
    pub los: Option<ErrorStats>,
    pub olos: Option<ErrorStats>,
}

pub fn error_report(samples: &[PositionSample]) -> ErrorReport {
    let errors: Vec<f64> = samples.iter().map(PositionSample::error).collect();
    let pick = |olos: bool| stats(samples.iter().filter(move |s| s.olos == olos).map(PositionSample::error));
    ErrorReport { all: stats(errors.iter().copied()), los: pick(false), olos: pick(true), errors }
}
