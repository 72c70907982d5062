//! Plain-text outputs: event logs, score and epoch CSVs, reports, per-epoch
//! ground truth and scenario files.

use std::fmt::Write as _;
use std::ops::Range;

use sleepsense_core::actigraphy::EfficiencyComparison;
use sleepsense_core::frame::Roi;
use sleepsense_core::scoring::{Channel, ScoreSet};
use sleepsense_core::sleep::{EpochClass, SleepReport};
use sleepsense_core::synth::{Geometry, ItemKind, Scenario, TimelineItem};
use sleepsense_core::events::Event;

use crate::error::{CliError, Result};
use crate::kv::{parse_entries, Fields};

/// One line of an event log.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub channel: Channel,
    pub start_epoch: usize,
    pub end_epoch: usize,
    pub peak_score: f64,
    /// Frames for motion and light, samples for noise; half-open.
    pub clip: Range<usize>,
}

impl From<&Event> for EventRecord {
    fn from(e: &Event) -> Self {
        EventRecord {
            channel: e.channel,
            start_epoch: e.start_epoch,
            end_epoch: e.end_epoch,
            peak_score: e.peak_score,
            clip: e.clip.primary(),
        }
    }
}

const EVENT_FIELDS: [&str; 6] = ["channel", "start_epoch", "end_epoch", "peak_score", "clip_start", "clip_end"];

pub fn event_line(r: &EventRecord) -> String {
    format!(
        "channel={} start_epoch={} end_epoch={} peak_score={:.6} clip_start={} clip_end={}",
        r.channel.event_name(),
        r.start_epoch,
        r.end_epoch,
        r.peak_score,
        r.clip.start,
        r.clip.end
    )
}

pub fn event_log<'a>(records: impl IntoIterator<Item = &'a EventRecord>) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&event_line(r));
        out.push('\n');
    }
    out
}

pub fn parse_event_log(text: &str, origin: &str) -> Result<Vec<EventRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |m: String| CliError::parse(origin, i + 1, m);
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != EVENT_FIELDS.len() {
            return Err(bad(format!("expected {} fields, got {}", EVENT_FIELDS.len(), tokens.len())));
        }
        let mut values = [""; 6];
        for ((tok, want), slot) in tokens.iter().zip(EVENT_FIELDS).zip(&mut values) {
            match tok.split_once('=') {
                Some((k, v)) if k == want => *slot = v,
                _ => return Err(bad(format!("expected field '{want}', got '{tok}'"))),
            }
        }
        let num = |v: &str, name: &str| v.parse::<usize>().map_err(|_| bad(format!("bad {name} '{v}'")));
        let channel = Channel::from_event_name(values[0]).ok_or_else(|| bad(format!("unknown channel '{}'", values[0])))?;
        let start_epoch = num(values[1], "start_epoch")?;
        let end_epoch = num(values[2], "end_epoch")?;
        let peak_score: f64 = values[3].parse().map_err(|_| bad(format!("bad peak_score '{}'", values[3])))?;
        let clip = num(values[4], "clip_start")?..num(values[5], "clip_end")?;
        if start_epoch > end_epoch || clip.start > clip.end || !(0.0..=1.0).contains(&peak_score) {
            return Err(bad("inconsistent event record".into()));
        }
        out.push(EventRecord { channel, start_epoch, end_epoch, peak_score, clip });
    }
    Ok(out)
}

pub fn scores_csv(scores: &ScoreSet) -> String {
    let mut out = String::with_capacity(scores.len() * 32 + 24);
    out.push_str("frame,depth,color,audio\n");
    for i in 0..scores.len() {
        let _ = writeln!(
            out,
            "{i},{:.6},{:.6},{:.6}",
            scores.depth.values[i], scores.color.values[i], scores.audio.values[i]
        );
    }
    out
}

/// Per-frame scores as `[depth, color, audio]` columns.
pub fn parse_scores_csv(text: &str, origin: &str) -> Result<[Vec<f64>; 3]> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "frame,depth,color,audio")) => {}
        _ => return Err(CliError::parse(origin, 1, "expected header 'frame,depth,color,audio'")),
    }
    let mut cols: [Vec<f64>; 3] = Default::default();
    for (i, line) in lines {
        let bad = || CliError::parse(origin, i + 1, format!("malformed row '{line}'"));
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 || fields[0].parse::<usize>().ok() != Some(i - 1) {
            return Err(bad());
        }
        for (col, f) in cols.iter_mut().zip(&fields[1..]) {
            col.push(f.parse().map_err(|_| bad())?);
        }
    }
    Ok(cols)
}

pub fn epochs_csv(counts: &[Vec<u32>; 3]) -> String {
    let mut out = String::from("epoch,depth,color,audio\n");
    let n = counts.iter().map(Vec::len).max().unwrap_or(0);
    for t in 0..n {
        let c = |k: usize| counts[k].get(t).copied().unwrap_or(0);
        let _ = writeln!(out, "{t},{},{},{}", c(0), c(1), c(2));
    }
    out
}

pub fn class_epochs_csv(classes: &[EpochClass]) -> String {
    let mut out = String::from("epoch,class\n");
    for (t, c) in classes.iter().enumerate() {
        let _ = writeln!(out, "{t},{}", c.name());
    }
    out
}

/// `key=value` report with the five motion components, light and noise
/// coverage, and the three efficiencies. Cole/Sadeh are computed from
/// proxy activity counts, not a wrist actigraph; they read `n/a` for
/// sessions shorter than a minute.
pub fn report_text(report: &SleepReport, comparison: Option<&EfficiencyComparison>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "duration_seconds={}", report.duration_seconds);
    for class in EpochClass::ALL {
        let _ = writeln!(out, "{}_percent={:.2}", class.name(), report.component(class));
    }
    let _ = writeln!(out, "light_event_percent={:.2}", report.light_percent);
    let _ = writeln!(out, "noise_event_percent={:.2}", report.noise_percent);
    let _ = writeln!(out, "sleep_efficiency={:.4}", report.sleep_efficiency);
    match comparison {
        Some(c) => {
            let _ = writeln!(out, "cole_proxy_efficiency={:.4}", c.cole);
            let _ = writeln!(out, "sadeh_proxy_efficiency={:.4}", c.sadeh);
            let _ = writeln!(out, "max_efficiency_difference={:.4}", c.max_difference());
            let _ = writeln!(out, "efficiencies_diverge={}", c.diverges());
        }
        None => {
            for key in ["cole_proxy_efficiency", "sadeh_proxy_efficiency", "max_efficiency_difference", "efficiencies_diverge"] {
                let _ = writeln!(out, "{key}=n/a");
            }
        }
    }
    out
}

pub fn scenario_text(s: &Scenario) -> String {
    let g = s.geometry;
    let mut out = format!(
        "duration={}\nseed={}\ndepth_noise={}\nluma_noise={}\naudio_noise={}\nframe_width={}\nframe_height={}\n\
         roi_x={}\nroi_y={}\nroi_w={}\nroi_h={}\n",
        s.duration,
        s.seed,
        s.depth_noise,
        s.luma_noise,
        s.audio_noise,
        g.frame_width,
        g.frame_height,
        g.roi.x,
        g.roi.y,
        g.roi.w,
        g.roi.h
    );
    for item in &s.timeline {
        let _ = writeln!(out, "item={} {} {} {}", item.start, item.end, item.kind.name(), item.magnitude);
    }
    out
}

/// Scenario file: the keys of [`scenario_text`] plus any number of
/// `item=start end kind magnitude` lines. Only `duration` is required.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario> {
    let (items, rest): (Vec<_>, Vec<_>) = parse_entries(text, origin)?.into_iter().partition(|e| e.key == "item");
    let mut f = Fields::new(rest, origin)?;
    let mut s = Scenario::new(f.require("duration")?, 0);
    f.fill("seed", &mut s.seed)?;
    f.fill("depth_noise", &mut s.depth_noise)?;
    f.fill("luma_noise", &mut s.luma_noise)?;
    f.fill("audio_noise", &mut s.audio_noise)?;
    let mut g = Geometry::default();
    f.fill("frame_width", &mut g.frame_width)?;
    f.fill("frame_height", &mut g.frame_height)?;
    let mut roi = g.roi;
    f.fill("roi_x", &mut roi.x)?;
    f.fill("roi_y", &mut roi.y)?;
    f.fill("roi_w", &mut roi.w)?;
    f.fill("roi_h", &mut roi.h)?;
    g.roi = Roi::new(roi.x, roi.y, roi.w, roi.h);
    s.geometry = g;
    f.finish()?;
    for e in items {
        let bad = |m: &str| CliError::parse(origin, e.line, format!("{m} in item '{}'", e.value));
        let parts: Vec<&str> = e.value.split_whitespace().collect();
        let [start, end, kind, magnitude] = parts[..] else {
            return Err(bad("expected 'start end kind magnitude'"));
        };
        s.timeline.push(TimelineItem::new(
            start.parse().map_err(|_| bad("bad start"))?,
            end.parse().map_err(|_| bad("bad end"))?,
            ItemKind::from_name(kind).ok_or_else(|| bad("unknown kind"))?,
            magnitude.parse().map_err(|_| bad("bad magnitude"))?,
        ));
    }
    s.validate()?;
    Ok(s)
}
