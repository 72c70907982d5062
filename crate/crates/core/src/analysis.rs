//! Detection output to sleep report: epoch classes, efficiency and the
//! actigraphy cross-check.

use alloc::vec::Vec;

use crate::actigraphy::{cole_sleep_wake, compare_efficiencies, counts_from_scores, sadeh_sleep_wake, ActivityCounts, EfficiencyComparison, WakeSeries};
use crate::error::Result;
use crate::events::Detection;
use crate::scoring::Channel;
use crate::sleep::{build_report, classify_epochs, epoch_peaks, ClassThresholds, EpochClass, SleepReport};

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    /// Per-epoch peak depth score, zero inside the burn-in.
    pub peaks: Vec<f64>,
    pub classes: Vec<EpochClass>,
    pub report: SleepReport,
    /// Per-minute proxy counts; empty for sessions under a minute.
    pub counts: ActivityCounts,
    pub cole: WakeSeries,
    pub sadeh: WakeSeries,
    /// `None` when the session is too short for per-minute scoring.
    pub comparison: Option<EfficiencyComparison>,
}

/// Classifies a detection's depth scores and assembles the report.
pub fn analyze(detection: &Detection, video_rate: u32, thresholds: &ClassThresholds) -> Result<Analysis> {
    let spans = |c: Channel| -> Vec<(usize, usize)> {
        detection.events(c).iter().map(|e| (e.start_epoch, e.end_epoch)).collect()
    };
    analyze_series(
        &detection.scores.depth.values,
        detection.burn_in_frames,
        &spans(Channel::Color),
        &spans(Channel::Audio),
        video_rate,
        thresholds,
    )
}

/// Same as [`analyze`] from raw parts. Frames inside the burn-in count as
/// motionless, as they do for event detection.
pub fn analyze_series(
    depth_scores: &[f64],
    burn_in_frames: usize,
    light_spans: &[(usize, usize)],
    noise_spans: &[(usize, usize)],
    video_rate: u32,
    thresholds: &ClassThresholds,
) -> Result<Analysis> {
    let mut depth = depth_scores.to_vec();
    depth.iter_mut().take(burn_in_frames).for_each(|s| *s = 0.0);

    let peaks = epoch_peaks(&depth, video_rate);
    let classes = classify_epochs(&peaks, thresholds)?;
    let report = build_report(&classes, light_spans, noise_spans, peaks.len())?;

    let (counts, cole, sadeh, comparison) = match counts_from_scores(&depth, video_rate, thresholds.tiny) {
        Ok(counts) => {
            let cole = cole_sleep_wake(&counts);
            let sadeh = sadeh_sleep_wake(&counts);
            let cmp = compare_efficiencies(report.sleep_efficiency, &cole, &sadeh);
            (counts, cole, sadeh, Some(cmp))
        }
        Err(_) => Default::default(),
    };
    Ok(Analysis { peaks, classes, report, counts, cole, sadeh, comparison })
}
