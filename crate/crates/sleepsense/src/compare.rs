//! Precision/recall of detected events against expected ones.

use sleepsense_core::scoring::Channel;

use crate::formats::EventRecord;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelMatch {
    pub channel: Channel,
    pub detected: usize,
    pub expected: usize,
    /// Detected events that touch some expected event.
    pub true_detected: usize,
    /// Expected events touched by some detected event.
    pub found_expected: usize,
}

impl ChannelMatch {
    /// 1 when nothing was detected.
    pub fn precision(&self) -> f64 {
        if self.detected == 0 { 1.0 } else { self.true_detected as f64 / self.detected as f64 }
    }

    /// 1 when nothing was expected.
    pub fn recall(&self) -> f64 {
        if self.expected == 0 { 1.0 } else { self.found_expected as f64 / self.expected as f64 }
    }

    pub fn perfect(&self) -> bool {
        self.true_detected == self.detected && self.found_expected == self.expected
    }
}

/// Inclusive spans overlap once each is widened by `tolerance` epochs.
pub fn spans_match(a: (usize, usize), b: (usize, usize), tolerance: usize) -> bool {
    a.0 <= b.1 + tolerance && b.0 <= a.1 + tolerance
}

pub fn compare_events(detected: &[EventRecord], expected: &[EventRecord], tolerance: usize) -> [ChannelMatch; 3] {
    Channel::ALL.map(|channel| {
        let spans = |rs: &[EventRecord]| -> Vec<(usize, usize)> {
            rs.iter().filter(|r| r.channel == channel).map(|r| (r.start_epoch, r.end_epoch)).collect()
        };
        let (d, e) = (spans(detected), spans(expected));
        let hits = |from: &[(usize, usize)], to: &[(usize, usize)]| {
            from.iter().filter(|&&a| to.iter().any(|&b| spans_match(a, b, tolerance))).count()
        };
        ChannelMatch {
            channel,
            detected: d.len(),
            expected: e.len(),
            true_detected: hits(&d, &e),
            found_expected: hits(&e, &d),
        }
    })
}
