//! Actigraphy-style cross-check.
//!
//! Depth scores are folded into per-minute activity counts (a proxy for a
//! wrist device), which are then scored sleep/wake with the Cole-Kripke
//! (1992) one-minute weighted window and the Sadeh (1994) sleep-probability
//! rule. Both windows read zero outside the recording.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Per-minute activity counts.
pub type ActivityCounts = Vec<u32>;

/// Per-minute wake flags (`true` = wake).
pub type WakeSeries = Vec<bool>;

/// `count_m = round(1000 * sum over minute m of max(score - tiny, 0))`.
pub fn counts_from_scores(depth_scores: &[f64], video_rate: u32, tiny: f64) -> Result<ActivityCounts> {
    let per_minute = 60 * video_rate as usize;
    if per_minute == 0 || depth_scores.len() < per_minute {
        return Err(Error::EmptyInput("activity counts need at least one minute of scores"));
    }
    Ok(depth_scores
        .chunks_exact(per_minute)
        .map(|minute| {
            let excess: f64 = minute.iter().map(|&s| (s - tiny).max(0.0)).sum();
            libm::round(1000.0 * excess) as u32
        })
        .collect())
}

#[inline]
fn padded(counts: &[u32], t: isize) -> f64 {
    if t < 0 || t as usize >= counts.len() {
        0.0
    } else {
        counts[t as usize] as f64
    }
}

/// Cole-Kripke weights for minutes t-4 ..= t+2.
pub const COLE_WEIGHTS: [f64; 7] = [106.0, 54.0, 58.0, 76.0, 230.0, 74.0, 67.0];
pub const COLE_SCALE: f64 = 0.001;

/// `D = 0.001 * sum(w_i * A_{t+i})`, i = -4..=2; sleep iff `D < 1`.
pub fn cole_sleep_wake(counts: &[u32]) -> WakeSeries {
    (0..counts.len() as isize)
        .map(|t| {
            let d: f64 = COLE_WEIGHTS
                .iter()
                .zip(-4isize..=2)
                .map(|(w, off)| w * padded(counts, t + off))
                .sum::<f64>()
                * COLE_SCALE;
            d >= 1.0
        })
        .collect()
}

/// Sadeh probability-of-sleep score for minute `t`.
pub fn sadeh_ps(counts: &[u32], t: usize) -> f64 {
    let t = t as isize;
    let window: Vec<f64> = (t - 5..=t + 5).map(|i| padded(counts, i)).collect();
    let avg = window.iter().sum::<f64>() / window.len() as f64;
    let nat = window.iter().filter(|&&a| (50.0..100.0).contains(&a)).count() as f64;

    let last: Vec<f64> = (t - 5..=t).map(|i| padded(counts, i)).collect();
    let mean = last.iter().sum::<f64>() / last.len() as f64;
    let var = last.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (last.len() - 1) as f64;
    let sd = libm::sqrt(var);

    let lg = libm::log(padded(counts, t) + 1.0);
    7.601 - 0.065 * avg - 1.08 * nat - 0.056 * sd - 0.703 * lg
}

/// Sleep iff `PS >= 0`.
pub fn sadeh_sleep_wake(counts: &[u32]) -> WakeSeries {
    (0..counts.len()).map(|t| sadeh_ps(counts, t) < 0.0).collect()
}

/// Fraction of minutes scored as sleep; 0 for an empty series.
pub fn wake_series_efficiency(wake: &[bool]) -> f64 {
    if wake.is_empty() {
        return 0.0;
    }
    wake.iter().filter(|&&w| !w).count() as f64 / wake.len() as f64
}

/// Absolute spread above which the three efficiencies are flagged as diverging.
pub const DIVERGENCE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyComparison {
    pub system: f64,
    pub cole: f64,
    pub sadeh: f64,
    pub system_cole: f64,
    pub system_sadeh: f64,
    pub cole_sadeh: f64,
}

impl EfficiencyComparison {
    pub fn max_difference(&self) -> f64 {
        self.system_cole.max(self.system_sadeh).max(self.cole_sadeh)
    }

    pub fn diverges(&self) -> bool {
        self.max_difference() > DIVERGENCE_TOLERANCE
    }
}

pub fn compare_efficiencies(system: f64, cole: &[bool], sadeh: &[bool]) -> EfficiencyComparison {
    compare_values(system, wake_series_efficiency(cole), wake_series_efficiency(sadeh))
}

pub fn compare_values(system: f64, cole: f64, sadeh: f64) -> EfficiencyComparison {
    EfficiencyComparison {
        system,
        cole,
        sadeh,
        system_cole: (system - cole).abs(),
        system_sadeh: (system - sadeh).abs(),
        cole_sadeh: (cole - sadeh).abs(),
    }
}
