//! One-second epochs and the rise/continue/fall event recurrence.
//!
//! Outside an event, epoch `t` opens one when its count exceeds the count
//! of epoch `t-1`. Inside an event, epoch `t` keeps it open while the next
//! count is at least as large; otherwise the event closes at `t`
//! (inclusive). Virtual zero-count epochs pad both ends.

use alloc::vec::Vec;
use core::ops::Range;

use crate::background::BackgroundModel;
use crate::error::{Error, Result};
use crate::scoring::{score_session, Channel, ScoreSet};
use crate::session::{audio_boundary, SessionManifest, SessionSource};

/// Per-channel frame thresholds and the warm-up interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub depth_threshold: f64,
    pub color_threshold: f64,
    pub audio_threshold: f64,
    pub burn_in_seconds: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig { depth_threshold: 0.02, color_threshold: 0.05, audio_threshold: 0.10, burn_in_seconds: 10 }
    }
}

impl DetectorConfig {
    pub fn threshold(&self, channel: Channel) -> f64 {
        match channel {
            Channel::Depth => self.depth_threshold,
            Channel::Color => self.color_threshold,
            Channel::Audio => self.audio_threshold,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for c in Channel::ALL {
            let t = self.threshold(c);
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidParameter("frame threshold out of range"));
            }
        }
        Ok(())
    }
}

/// Media ranges kept for an event (half-open).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClipRef {
    pub depth_frames: Option<Range<usize>>,
    pub color_frames: Option<Range<usize>>,
    pub audio_samples: Option<Range<usize>>,
}

impl ClipRef {
    /// The range written to event logs: frames for visual channels,
    /// samples for audio.
    pub fn primary(&self) -> Range<usize> {
        self.depth_frames
            .clone()
            .or_else(|| self.color_frames.clone())
            .or_else(|| self.audio_samples.clone())
            .unwrap_or(0..0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub channel: Channel,
    pub start_epoch: usize,
    /// Inclusive.
    pub end_epoch: usize,
    pub peak_score: f64,
    pub clip: ClipRef,
}

/// Number of frames per whole second whose score exceeds `threshold`.
/// A trailing partial second is dropped.
pub fn epochize(scores: &[f64], threshold: f64, video_rate: u32) -> Vec<u32> {
    let rate = video_rate as usize;
    if rate == 0 {
        return Vec::new();
    }
    scores
        .chunks_exact(rate)
        .map(|second| second.iter().filter(|&&s| s > threshold).count() as u32)
        .collect()
}

/// Inclusive epoch spans produced by the recurrence.
pub fn detect_events(counts: &[u32]) -> Vec<(usize, usize)> {
    let n = counts.len();
    let at = |t: usize| if t < n { counts[t] } else { 0 };
    let mut spans = Vec::new();
    let mut prev = 0;
    let mut t = 0;
    while t < n {
        if prev < counts[t] {
            let start = t;
            while at(t) <= at(t + 1) {
                t += 1;
            }
            spans.push((start, t));
        }
        prev = counts[t];
        t += 1;
    }
    spans
}

/// Clip margin on each side of an event, in seconds.
pub const CLIP_MARGIN_SECONDS: usize = 1;

/// Media ranges for an event: its epochs plus one second each side,
/// clamped to the session.
pub fn record_clips(
    channel: Channel,
    start_epoch: usize,
    end_epoch: usize,
    manifest: &SessionManifest,
) -> Result<ClipRef> {
    let rate = manifest.video_rate as usize;
    if start_epoch > end_epoch || (end_epoch + 1) * rate > manifest.frame_count {
        return Err(Error::SpanOutOfRange { start: start_epoch, end: end_epoch });
    }
    let first = start_epoch.saturating_sub(CLIP_MARGIN_SECONDS) * rate;
    let last = ((end_epoch + 1 + CLIP_MARGIN_SECONDS) * rate).min(manifest.frame_count);
    let frames = first..last;
    let samples = audio_boundary(first, manifest.audio_rate, manifest.video_rate)
        ..audio_boundary(last, manifest.audio_rate, manifest.video_rate);
    Ok(match channel {
        Channel::Depth => ClipRef { depth_frames: Some(frames.clone()), color_frames: Some(frames), audio_samples: None },
        Channel::Color => ClipRef { depth_frames: None, color_frames: Some(frames), audio_samples: None },
        Channel::Audio => ClipRef { depth_frames: None, color_frames: None, audio_samples: Some(samples) },
    })
}

/// Everything the detector produced for one session.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub scores: ScoreSet,
    /// Per-channel epoch counts (depth, color, audio), burn-in zeroed.
    pub epochs: [Vec<u32>; 3],
    /// Per-channel events, each list sorted by start.
    pub events: [Vec<Event>; 3],
    pub burn_in_frames: usize,
}

impl Detection {
    pub fn events(&self, channel: Channel) -> &[Event] {
        &self.events[channel.index()]
    }

    pub fn counts(&self, channel: Channel) -> &[u32] {
        &self.epochs[channel.index()]
    }

    /// All events ordered by channel then start.
    pub fn all_events(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().flatten()
    }
}

/// Epochs, events and clips for already-computed scores.
pub fn detect_from_scores(scores: ScoreSet, manifest: &SessionManifest, config: &DetectorConfig) -> Result<Detection> {
    config.validate()?;
    let rate = manifest.video_rate as usize;
    let burn_in_frames = (config.burn_in_seconds * rate).min(scores.len());
    let mut epochs: [Vec<u32>; 3] = Default::default();
    let mut events: [Vec<Event>; 3] = Default::default();
    for channel in Channel::ALL {
        let values = &scores.channel(channel).values;
        let mut counts = epochize(values, config.threshold(channel), manifest.video_rate);
        for c in counts.iter_mut().take(config.burn_in_seconds) {
            *c = 0;
        }
        for (start, end) in detect_events(&counts) {
            let peak_score = values[start * rate..(end + 1) * rate].iter().copied().fold(0.0, f64::max);
            let clip = record_clips(channel, start, end, manifest)?;
            events[channel.index()].push(Event { channel, start_epoch: start, end_epoch: end, peak_score, clip });
        }
        epochs[channel.index()] = counts;
    }
    Ok(Detection { scores, epochs, events, burn_in_frames })
}

/// Scores the session, aggregates epochs and detects events per channel.
pub fn run_detector<S: SessionSource + ?Sized>(
    source: &mut S,
    depth_model: BackgroundModel,
    color_model: BackgroundModel,
    config: &DetectorConfig,
) -> Result<Detection> {
    config.validate()?;
    let manifest = source.manifest().clone();
    let scores = score_session(source, depth_model, color_model)?;
    detect_from_scores(scores, &manifest, config)
}
