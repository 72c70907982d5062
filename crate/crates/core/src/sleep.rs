//! Per-epoch motion classes, the sleep/wake rule and sleep reports.

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EpochClass {
    FullPostureChange,
    LimbMovement,
    TinyMovement,
    Calmness,
    OutOfView,
}

impl EpochClass {
    /// Report column order.
    pub const ALL: [EpochClass; 5] = [
        EpochClass::FullPostureChange,
        EpochClass::LimbMovement,
        EpochClass::TinyMovement,
        EpochClass::Calmness,
        EpochClass::OutOfView,
    ];

    pub fn is_wake(self) -> bool {
        matches!(self, EpochClass::FullPostureChange | EpochClass::LimbMovement | EpochClass::OutOfView)
    }

    pub fn name(self) -> &'static str {
        match self {
            EpochClass::FullPostureChange => "full_posture_change",
            EpochClass::LimbMovement => "limb_movement",
            EpochClass::TinyMovement => "tiny_movement",
            EpochClass::Calmness => "calmness",
            EpochClass::OutOfView => "out_of_view",
        }
    }

    pub fn from_name(name: &str) -> Option<EpochClass> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Peak-score bands for the motion classes plus the out-of-view detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassThresholds {
    pub tiny: f64,
    pub limb: f64,
    pub full: f64,
    /// Peak that can mark leaving (or returning to) the bed.
    pub exit: f64,
    /// Ceiling for an "empty bed" epoch.
    pub absent: f64,
    pub min_absent_epochs: usize,
}

impl Default for ClassThresholds {
    fn default() -> Self {
        ClassThresholds { tiny: 0.005, limb: 0.02, full: 0.10, exit: 0.30, absent: 0.003, min_absent_epochs: 10 }
    }
}

impl ClassThresholds {
    pub fn validate(&self) -> Result<()> {
        let ordered = 0.0 < self.tiny
            && self.tiny < self.limb
            && self.limb < self.full
            && self.full <= self.exit
            && self.exit <= 1.0
            && 0.0 <= self.absent
            && self.absent < self.tiny;
        if !ordered {
            return Err(Error::InvalidParameter(
                "class thresholds must satisfy 0 < tiny < limb < full <= exit <= 1 and absent < tiny",
            ));
        }
        if self.min_absent_epochs == 0 {
            return Err(Error::InvalidParameter("min_absent_epochs must be positive"));
        }
        Ok(())
    }

    fn baseline(&self, peak: f64) -> EpochClass {
        if peak >= self.full {
            EpochClass::FullPostureChange
        } else if peak >= self.limb {
            EpochClass::LimbMovement
        } else if peak >= self.tiny {
            EpochClass::TinyMovement
        } else {
            EpochClass::Calmness
        }
    }
}

/// Maximum frame score within each whole second.
pub fn epoch_peaks(scores: &[f64], video_rate: u32) -> Vec<f64> {
    let rate = video_rate as usize;
    if rate == 0 {
        return Vec::new();
    }
    scores.chunks_exact(rate).map(|s| s.iter().copied().fold(0.0, f64::max)).collect()
}

/// Classifies epochs by peak depth score, then overlays out-of-view spans:
/// an epoch at or above `exit` followed by `min_absent_epochs` epochs below
/// `absent` starts an out-of-view span that lasts until the next epoch at
/// or above `exit`, which keeps its own class.
pub fn classify_epochs(peaks: &[f64], thresholds: &ClassThresholds) -> Result<Vec<EpochClass>> {
    thresholds.validate()?;
    let mut classes: Vec<EpochClass> = peaks.iter().map(|&p| thresholds.baseline(p)).collect();
    let n = peaks.len();
    let need = thresholds.min_absent_epochs;
    let mut t = 0;
    while t < n {
        if peaks[t] >= thresholds.exit {
            let first = t + 1;
            let quiet = first + need <= n && peaks[first..first + need].iter().all(|&p| p < thresholds.absent);
            if quiet {
                let mut k = first;
                while k < n && peaks[k] < thresholds.exit {
                    classes[k] = EpochClass::OutOfView;
                    k += 1;
                }
                t = k;
                continue;
            }
        }
        t += 1;
    }
    Ok(classes)
}

/// `true` = wake.
pub fn sleep_wake(classes: &[EpochClass]) -> Vec<bool> {
    classes.iter().map(|c| c.is_wake()).collect()
}

/// Fraction of epochs classified as sleep (tiny movement or calmness).
pub fn sleep_efficiency(classes: &[EpochClass]) -> Result<f64> {
    if classes.is_empty() {
        return Err(Error::EmptyInput("epoch classes"));
    }
    // written as 1 - mean(wake) so it agrees bit-for-bit with the wake series
    let wake = classes.iter().filter(|c| c.is_wake()).count();
    Ok(1.0 - wake as f64 / classes.len() as f64)
}

/// Percent of `total` epochs covered by inclusive `spans`.
pub fn coverage_percent(spans: impl IntoIterator<Item = (usize, usize)>, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let mut covered = alloc::vec![false; total];
    for (s, e) in spans {
        for c in covered.iter_mut().take(e + 1).skip(s) {
            *c = true;
        }
    }
    covered.iter().filter(|&&c| c).count() as f64 * 100.0 / total as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct SleepReport {
    /// Percent of epochs per class, in [`EpochClass::ALL`] order.
    pub components: [f64; 5],
    pub light_percent: f64,
    pub noise_percent: f64,
    pub sleep_efficiency: f64,
    pub duration_seconds: usize,
}

impl SleepReport {
    pub fn component(&self, class: EpochClass) -> f64 {
        self.components[class.index()]
    }
}

/// Assembles the report. Event spans are inclusive epoch ranges.
pub fn build_report(
    classes: &[EpochClass],
    light_events: &[(usize, usize)],
    noise_events: &[(usize, usize)],
    duration_seconds: usize,
) -> Result<SleepReport> {
    let total = classes.len();
    let mut counts = [0usize; 5];
    for c in classes {
        counts[c.index()] += 1;
    }
    let components = counts.map(|n| if total == 0 { 0.0 } else { n as f64 * 100.0 / total as f64 });
    let sleep_efficiency = sleep_efficiency(classes)?;
    Ok(SleepReport {
        components,
        light_percent: coverage_percent(light_events.iter().copied(), total),
        noise_percent: coverage_percent(noise_events.iter().copied(), total),
        sleep_efficiency,
        duration_seconds,
    })
}
