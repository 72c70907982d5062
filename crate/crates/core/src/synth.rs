//! Seeded synthetic sessions with ground truth.
//!
//! Synthesis is pixel-level. The depth scene is a static bed surface with
//! a body region lying on it; each scripted movement disturbs a rectangle
//! whose area is a fixed fraction band of the ROI for its kind. While a
//! movement lasts, the rectangle cycles through depth levels far apart from
//! each other and from the bed, so the background model cannot absorb it;
//! when it ends the scene reverts. Leaving the bed removes the body region
//! at the start of the item and returning restores it, so the model
//! re-adapts inside the item's own span. Luma is a flat ambient level that
//! light items step up or down, with the same regions at low contrast.
//! Audio is a Gaussian noise floor plus a tone for talk items.
//!
//! Every frame is generated on demand from `(seed, stream, index)`, so a
//! session is never held in memory unless asked for.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::events::{record_clips, Event};
use crate::frame::{Grid, Rgb, Roi, MAX_DEPTH};
use crate::scoring::{Channel, PCM_FULL_SCALE};
use crate::session::{SessionManifest, SessionSource};
use crate::sleep::EpochClass;

pub const VIDEO_RATE: u32 = 30;
pub const AUDIO_RATE: u32 = 16000;

/// Depth levels a disturbed rectangle cycles through; pairwise and from the
/// bed/body range they are further apart than the widest matching radius.
const FLICKER_LEVELS: [f64; 5] = [150.0, 1350.0, 400.0, 1600.0, 1850.0];
const BED_DEPTH: f64 = 950.0;
const BED_SLOPE: f64 = 100.0;
/// How much closer the body surface is than the bed.
const BODY_OFFSET: f64 = 120.0;
const DARK_LUMA: f64 = 20.0;
const BODY_LUMA_CONTRAST: f64 = 2.0;
const MOVE_LUMA_CONTRAST: f64 = 3.0;
const TALK_HZ: f64 = 220.0;
/// Rows at the top of the ROI that rectangles never cover (dead pixels live there).
const TOP_MARGIN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ItemKind {
    Calm,
    TinyTwitch,
    LimbMove,
    FullTurn,
    LeaveBed,
    ReturnBed,
    LightOn,
    LightOff,
    Talk,
}

impl ItemKind {
    pub const ALL: [ItemKind; 9] = [
        ItemKind::Calm,
        ItemKind::TinyTwitch,
        ItemKind::LimbMove,
        ItemKind::FullTurn,
        ItemKind::LeaveBed,
        ItemKind::ReturnBed,
        ItemKind::LightOn,
        ItemKind::LightOff,
        ItemKind::Talk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ItemKind::Calm => "calm",
            ItemKind::TinyTwitch => "tiny_twitch",
            ItemKind::LimbMove => "limb_move",
            ItemKind::FullTurn => "full_turn",
            ItemKind::LeaveBed => "leave_bed",
            ItemKind::ReturnBed => "return_bed",
            ItemKind::LightOn => "light_on",
            ItemKind::LightOff => "light_off",
            ItemKind::Talk => "talk",
        }
    }

    pub fn from_name(name: &str) -> Option<ItemKind> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Items that act on the depth scene (and so share one track).
    pub fn is_motion(self) -> bool {
        matches!(
            self,
            ItemKind::Calm
                | ItemKind::TinyTwitch
                | ItemKind::LimbMove
                | ItemKind::FullTurn
                | ItemKind::LeaveBed
                | ItemKind::ReturnBed
        )
    }

    pub fn is_light(self) -> bool {
        matches!(self, ItemKind::LightOn | ItemKind::LightOff)
    }

    /// Band of ROI fraction disturbed, for motion kinds.
    pub fn disturbance_band(self) -> (f64, f64) {
        match self {
            ItemKind::TinyTwitch => (0.007, 0.013),
            ItemKind::LimbMove => (0.03, 0.08),
            ItemKind::FullTurn => (0.15, 0.25),
            ItemKind::LeaveBed | ItemKind::ReturnBed => (0.35, 0.42),
            _ => (0.0, 0.0),
        }
    }

    /// Class the item's epochs carry in the ground truth.
    fn epoch_class(self) -> Option<EpochClass> {
        match self {
            ItemKind::TinyTwitch => Some(EpochClass::TinyMovement),
            ItemKind::LimbMove => Some(EpochClass::LimbMovement),
            ItemKind::FullTurn | ItemKind::LeaveBed | ItemKind::ReturnBed => Some(EpochClass::FullPostureChange),
            _ => None,
        }
    }

    /// Whether the default detector is expected to report this item.
    fn expected_channel(self) -> Option<Channel> {
        match self {
            ItemKind::LimbMove | ItemKind::FullTurn | ItemKind::LeaveBed | ItemKind::ReturnBed => Some(Channel::Depth),
            ItemKind::LightOn | ItemKind::LightOff => Some(Channel::Color),
            ItemKind::Talk => Some(Channel::Audio),
            _ => None,
        }
    }
}

/// One scripted item over whole seconds `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimelineItem {
    pub start: u32,
    pub end: u32,
    pub kind: ItemKind,
    /// Position within the kind's band, in [0, 1].
    pub magnitude: f64,
}

impl TimelineItem {
    pub fn new(start: u32, end: u32, kind: ItemKind, magnitude: f64) -> Self {
        TimelineItem { start, end, kind, magnitude }
    }

    /// ROI fraction a motion item disturbs.
    pub fn disturbed_fraction(&self) -> f64 {
        let (lo, hi) = self.kind.disturbance_band();
        lo + self.magnitude * (hi - lo)
    }

    fn overlaps(&self, other: &TimelineItem) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// Frame and ROI sizes of a synthetic session.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    pub frame_width: usize,
    pub frame_height: usize,
    pub roi: Roi,
}

impl Geometry {
    /// VGA with the 320x350 bed ROI.
    pub fn full() -> Self {
        Geometry { frame_width: 640, frame_height: 480, roi: Roi::default_for(640, 480) }
    }

    /// Full geometry scaled down by ten in each direction.
    pub fn desk() -> Self {
        Geometry { frame_width: 64, frame_height: 48, roi: Roi::new(16, 6, 32, 35) }
    }

    pub fn validate(&self) -> Result<()> {
        self.roi.check_inside(self.frame_width, self.frame_height)?;
        if self.roi.w < 8 || self.roi.h < 8 {
            return Err(Error::InvalidParameter("synthetic roi must be at least 8x8"));
        }
        Ok(())
    }
}

impl Default for Geometry {
    fn default() -> Self {
        Self::desk()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Seconds.
    pub duration: u32,
    pub seed: u64,
    pub timeline: Vec<TimelineItem>,
    /// Depth sensor noise, depth units (1 sigma).
    pub depth_noise: f64,
    /// Luma noise, 8-bit units (1 sigma).
    pub luma_noise: f64,
    /// Audio noise floor, PCM units (1 sigma).
    pub audio_noise: f64,
    pub geometry: Geometry,
}

impl Scenario {
    pub fn new(duration: u32, seed: u64) -> Self {
        Scenario {
            duration,
            seed,
            timeline: Vec::new(),
            depth_noise: 2.0,
            luma_noise: 1.5,
            audio_noise: 100.0,
            geometry: Geometry::default(),
        }
    }

    pub fn with_items(mut self, items: impl IntoIterator<Item = TimelineItem>) -> Self {
        self.timeline.extend(items);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |why: String| Err(Error::InvalidTimeline(why));
        if self.duration == 0 {
            return bad("duration must be positive".into());
        }
        for (name, v) in [("depth_noise", self.depth_noise), ("luma_noise", self.luma_noise), ("audio_noise", self.audio_noise)] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be a non-negative number"));
            }
        }
        self.geometry.validate()?;

        let mut last_start = 0;
        let mut motion: Option<&TimelineItem> = None;
        let mut light: Option<&TimelineItem> = None;
        let mut talk: Option<&TimelineItem> = None;
        let mut away = false;
        for (i, item) in self.timeline.iter().enumerate() {
            if item.start >= item.end || item.end > self.duration {
                return bad(format!("item {i} span {}..{} not inside 0..{}", item.start, item.end, self.duration));
            }
            if item.start < last_start {
                return bad(format!("item {i} is out of time order"));
            }
            last_start = item.start;
            if !(0.0..=1.0).contains(&item.magnitude) {
                return bad(format!("item {i} magnitude must be in [0, 1]"));
            }
            let light_was_on = light.is_some_and(|l| l.kind == ItemKind::LightOn);
            let track = if item.kind.is_motion() {
                &mut motion
            } else if item.kind.is_light() {
                &mut light
            } else {
                &mut talk
            };
            if let Some(prev) = track {
                if prev.overlaps(item) {
                    return bad(format!("item {i} overlaps an earlier {} item", prev.kind.name()));
                }
            }
            match item.kind {
                ItemKind::LightOn | ItemKind::LightOff => {
                    if (item.kind == ItemKind::LightOn) == light_was_on {
                        return bad(format!("item {i}: light_on and light_off must alternate, starting with light_on"));
                    }
                }
                ItemKind::LeaveBed if away => return bad(format!("item {i}: leave_bed while already out of bed")),
                ItemKind::ReturnBed if !away => return bad(format!("item {i}: return_bed without a preceding leave_bed")),
                ItemKind::TinyTwitch | ItemKind::LimbMove | ItemKind::FullTurn if away => {
                    return bad(format!("item {i}: {} while out of bed", item.kind.name()))
                }
                _ => {}
            }
            match item.kind {
                ItemKind::LeaveBed => away = true,
                ItemKind::ReturnBed => away = false,
                _ => {}
            }
            *track = Some(item);
        }
        Ok(())
    }

    pub fn frame_count(&self) -> usize {
        self.duration as usize * VIDEO_RATE as usize
    }

    pub fn manifest(&self) -> SessionManifest {
        let g = self.geometry;
        SessionManifest {
            depth_width: g.frame_width,
            depth_height: g.frame_height,
            color_width: g.frame_width,
            color_height: g.frame_height,
            video_rate: VIDEO_RATE,
            audio_rate: AUDIO_RATE,
            frame_count: self.frame_count(),
            roi: g.roi,
            ..SessionManifest::default()
        }
    }

    /// Number of items of each kind, in [`ItemKind::ALL`] order.
    pub fn item_counts(&self) -> [usize; 9] {
        let mut n = [0; 9];
        for item in &self.timeline {
            n[ItemKind::ALL.iter().position(|&k| k == item.kind).unwrap()] += 1;
        }
        n
    }
}

/// Expected detector output and epoch labels, derived from the timeline.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// Inclusive epoch spans per channel (depth, color, audio) with the
    /// nominal peak score of each.
    pub events: [Vec<(usize, usize, f64)>; 3],
    pub classes: Vec<EpochClass>,
    pub sleep_efficiency: f64,
}

impl GroundTruth {
    pub fn spans(&self, channel: Channel) -> Vec<(usize, usize)> {
        self.events[channel.index()].iter().map(|&(s, e, _)| (s, e)).collect()
    }

    /// Percent of epochs per class in [`EpochClass::ALL`] order.
    pub fn class_percentages(&self) -> [f64; 5] {
        let mut n = [0usize; 5];
        for c in &self.classes {
            n[c.index()] += 1;
        }
        let total = self.classes.len().max(1) as f64;
        n.map(|k| k as f64 * 100.0 / total)
    }

    /// Ground truth as event records, comparable with detector output.
    pub fn event_records(&self, manifest: &SessionManifest) -> Result<Vec<Event>> {
        let mut out = Vec::new();
        for channel in Channel::ALL {
            for &(start, end, peak) in &self.events[channel.index()] {
                let clip = record_clips(channel, start, end, manifest)?;
                out.push(Event { channel, start_epoch: start, end_epoch: end, peak_score: peak, clip });
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Rect {
    x: usize,
    y: usize,
    w: usize,
    h: usize,
}

impl Rect {
    #[inline]
    fn row_span(&self, y: usize) -> Option<Range<usize>> {
        (y >= self.y && y < self.y + self.h).then(|| self.x..self.x + self.w)
    }
}

/// Per-second scene state.
#[derive(Debug, Clone, Copy, Default)]
struct SecondState {
    /// Index of the active disturbing item.
    motion: Option<usize>,
    body_present: bool,
    luma_level: f64,
    talk_amplitude: f64,
}

/// A lazily generated session.
#[derive(Debug, Clone)]
pub struct SyntheticSession {
    scenario: Scenario,
    manifest: SessionManifest,
    seconds: Vec<SecondState>,
    /// Rectangles in frame coordinates, one per timeline item.
    rects: Vec<Option<Rect>>,
    body: Rect,
    dead: Rect,
    audio_cache: Option<(usize, Vec<i16>)>,
}

const STREAM_DEPTH: u64 = 1 << 56;
const STREAM_LUMA: u64 = 2 << 56;
const STREAM_AUDIO: u64 = 3 << 56;
const STREAM_LAYOUT: u64 = 4 << 56;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[inline]
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Rectangle of roughly `area` pixels inside the zone, placed by `rng`.
fn place_rect(area: usize, zone: Rect, rng: &mut ChaCha8Rng) -> Rect {
    let aspect = zone.h as f64 / zone.w as f64;
    let h = (libm::round(libm::sqrt(area as f64 * aspect)) as usize).clamp(3, zone.h);
    let w = area.div_ceil(h).clamp(3, zone.w);
    let x = zone.x + (rng.next_u64() % (zone.w - w + 1) as u64) as usize;
    let y = zone.y + (rng.next_u64() % (zone.h - h + 1) as u64) as usize;
    Rect { x, y, w, h }
}

impl SyntheticSession {
    fn build(scenario: &Scenario) -> Self {
        let g = scenario.geometry;
        let roi = g.roi;
        let body_w = (roi.w * 45).div_ceil(100);
        let body = Rect { x: roi.x, y: roi.y + roi.h / 20, w: body_w, h: roi.h - 2 * (roi.h / 20) };
        let dead = Rect { x: roi.x + roi.w - 2, y: roi.y, w: 2, h: 2 };
        let interior = Rect { x: roi.x + 1, y: roi.y + TOP_MARGIN, w: roi.w - 2, h: roi.h - TOP_MARGIN - 1 };
        let exit_zone = Rect {
            x: roi.x + body_w,
            y: interior.y,
            w: roi.w - body_w - 1,
            h: interior.h,
        };

        let mut layout = rng_for(scenario.seed, STREAM_LAYOUT);
        let rects = scenario
            .timeline
            .iter()
            .map(|item| {
                let fraction = item.disturbed_fraction();
                (fraction > 0.0).then(|| {
                    let area = libm::round(fraction * roi.area() as f64) as usize;
                    let zone = if matches!(item.kind, ItemKind::LeaveBed | ItemKind::ReturnBed) {
                        exit_zone
                    } else {
                        interior
                    };
                    place_rect(area, zone, &mut layout)
                })
            })
            .collect();

        let mut seconds = vec![
            SecondState { motion: None, body_present: true, luma_level: DARK_LUMA, talk_amplitude: 0.0 };
            scenario.duration as usize
        ];
        // state changes persist from the item start onwards
        for item in &scenario.timeline {
            let from = item.start as usize;
            match item.kind {
                ItemKind::LeaveBed | ItemKind::ReturnBed => {
                    let present = item.kind == ItemKind::ReturnBed;
                    seconds[from..].iter_mut().for_each(|s| s.body_present = present);
                }
                ItemKind::LightOn => {
                    let level = DARK_LUMA + 80.0 + 100.0 * item.magnitude;
                    seconds[from..].iter_mut().for_each(|s| s.luma_level = level);
                }
                ItemKind::LightOff => seconds[from..].iter_mut().for_each(|s| s.luma_level = DARK_LUMA),
                _ => {}
            }
        }
        for (i, item) in scenario.timeline.iter().enumerate() {
            let span = item.start as usize..item.end as usize;
            if item.disturbed_fraction() > 0.0 {
                seconds[span.clone()].iter_mut().for_each(|s| s.motion = Some(i));
            }
            if item.kind == ItemKind::Talk {
                let amp = (0.2 + 0.6 * item.magnitude) * (PCM_FULL_SCALE - 1.0);
                seconds[span].iter_mut().for_each(|s| s.talk_amplitude = amp);
            }
        }

        SyntheticSession {
            scenario: scenario.clone(),
            manifest: scenario.manifest(),
            seconds,
            rects,
            body,
            dead,
            audio_cache: None,
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    fn state(&self, frame: usize) -> SecondState {
        self.seconds[frame / VIDEO_RATE as usize]
    }

    fn active_rect(&self, state: &SecondState) -> Option<(Rect, usize)> {
        state.motion.and_then(|i| self.rects[i].map(|r| (r, i)))
    }

    /// Depth frame `index` into `out`.
    pub fn depth_into(&self, index: usize, out: &mut Grid<u16>) {
        let g = self.scenario.geometry;
        let (w, h) = (g.frame_width, g.frame_height);
        if out.dims() != (w, h) {
            *out = Grid::filled(w, h, 0);
        }
        let state = self.state(index);
        let active = self.active_rect(&state);
        let level = active.map(|(_, item)| {
            let offset = index - self.scenario.timeline[item].start as usize * VIDEO_RATE as usize;
            FLICKER_LEVELS[(offset + item) % FLICKER_LEVELS.len()]
        });
        let sigma = self.scenario.depth_noise;
        let mut rng = rng_for(self.scenario.seed, STREAM_DEPTH | index as u64);
        let data = out.as_mut_slice();
        for y in 0..h {
            let bed_row = BED_DEPTH + BED_SLOPE * y as f64 / h as f64;
            let body_cols = if state.body_present { self.body.row_span(y) } else { None };
            let rect_cols = active.and_then(|(r, _)| r.row_span(y));
            let dead_cols = self.dead.row_span(y);
            let row = &mut data[y * w..(y + 1) * w];
            for (x, px) in row.iter_mut().enumerate() {
                let mut base = bed_row + (x % 5) as f64;
                if body_cols.as_ref().is_some_and(|c| c.contains(&x)) {
                    base -= BODY_OFFSET;
                }
                if let (Some(cols), Some(l)) = (&rect_cols, level) {
                    if cols.contains(&x) {
                        base = l;
                    }
                }
                let v = libm::round(base + sigma * normal(&mut rng)).clamp(1.0, MAX_DEPTH as f64) as u16;
                *px = if dead_cols.as_ref().is_some_and(|c| c.contains(&x)) { 0 } else { v };
            }
        }
    }

    /// Color frame `index` (gray, so luma equals each channel) into `out`.
    pub fn color_into(&self, index: usize, out: &mut Grid<Rgb>) {
        let g = self.scenario.geometry;
        let (w, h) = (g.frame_width, g.frame_height);
        if out.dims() != (w, h) {
            *out = Grid::filled(w, h, [0; 3]);
        }
        let state = self.state(index);
        let active = self.active_rect(&state);
        let sigma = self.scenario.luma_noise;
        let mut rng = rng_for(self.scenario.seed, STREAM_LUMA | index as u64);
        let data = out.as_mut_slice();
        for y in 0..h {
            let body_cols = if state.body_present { self.body.row_span(y) } else { None };
            let rect_cols = active.and_then(|(r, _)| r.row_span(y));
            let row = &mut data[y * w..(y + 1) * w];
            for (x, px) in row.iter_mut().enumerate() {
                let mut base = state.luma_level;
                if body_cols.as_ref().is_some_and(|c| c.contains(&x)) {
                    base += BODY_LUMA_CONTRAST;
                }
                if rect_cols.as_ref().is_some_and(|c| c.contains(&x)) {
                    base += MOVE_LUMA_CONTRAST;
                }
                let v = libm::round(base + sigma * normal(&mut rng)).clamp(0.0, 255.0) as u8;
                *px = [v; 3];
            }
        }
    }

    fn audio_second(&self, second: usize) -> Vec<i16> {
        let rate = AUDIO_RATE as usize;
        let total = self.manifest.audio_len();
        let start = second * rate;
        let end = ((second + 1) * rate).min(total);
        let amp = self.seconds.get(second).map_or(0.0, |s| s.talk_amplitude);
        let sigma = self.scenario.audio_noise;
        let mut rng = rng_for(self.scenario.seed, STREAM_AUDIO | second as u64);
        (start..end)
            .map(|j| {
                let tone = amp * libm::sin(2.0 * core::f64::consts::PI * TALK_HZ * j as f64 / AUDIO_RATE as f64);
                let v = tone + sigma * normal(&mut rng);
                libm::round(v).clamp(i16::MIN as f64, i16::MAX as f64) as i16
            })
            .collect()
    }
}

impl SessionSource for SyntheticSession {
    fn manifest(&self) -> &SessionManifest {
        &self.manifest
    }

    fn read_depth(&mut self, index: usize, out: &mut Grid<u16>) -> Result<()> {
        if index >= self.manifest.frame_count {
            return Err(Error::CorruptSession);
        }
        self.depth_into(index, out);
        Ok(())
    }

    fn read_color(&mut self, index: usize, out: &mut Grid<Rgb>) -> Result<()> {
        if index >= self.manifest.frame_count {
            return Err(Error::CorruptSession);
        }
        self.color_into(index, out);
        Ok(())
    }

    fn audio_len(&self) -> usize {
        self.manifest.audio_len()
    }

    fn read_audio(&mut self, range: Range<usize>, out: &mut Vec<i16>) -> Result<()> {
        if range.end > self.audio_len() {
            return Err(Error::AudioUnderrun { chunk: 0 });
        }
        let rate = AUDIO_RATE as usize;
        let mut pos = range.start;
        while pos < range.end {
            let second = pos / rate;
            if self.audio_cache.as_ref().is_none_or(|(s, _)| *s != second) {
                self.audio_cache = Some((second, self.audio_second(second)));
            }
            let (_, buf) = self.audio_cache.as_ref().unwrap();
            let from = pos - second * rate;
            let to = (range.end - second * rate).min(buf.len());
            out.extend_from_slice(&buf[from..to]);
            pos = second * rate + to;
        }
        Ok(())
    }
}

fn ground_truth(scenario: &Scenario) -> GroundTruth {
    let n = scenario.duration as usize;
    let mut classes = vec![EpochClass::Calmness; n];
    let mut events: [Vec<(usize, usize, f64)>; 3] = Default::default();
    let mut left_at: Option<usize> = None;
    for item in &scenario.timeline {
        let (s, e) = (item.start as usize, item.end as usize);
        if let Some(class) = item.kind.epoch_class() {
            classes[s..e].iter_mut().for_each(|c| *c = class);
        }
        match item.kind {
            ItemKind::LeaveBed => left_at = Some(e),
            ItemKind::ReturnBed => {
                if let Some(from) = left_at.take() {
                    classes[from..s].iter_mut().for_each(|c| *c = EpochClass::OutOfView);
                }
            }
            _ => {}
        }
        if let Some(channel) = item.kind.expected_channel() {
            let (end, peak) = match channel {
                Channel::Depth => (e - 1, item.disturbed_fraction()),
                // the step is absorbed within about a second
                Channel::Color => (s, 1.0),
                Channel::Audio => (e - 1, (0.2 + 0.6 * item.magnitude) / core::f64::consts::SQRT_2),
            };
            events[channel.index()].push((s, end, peak));
        }
    }
    if let Some(from) = left_at {
        classes[from..].iter_mut().for_each(|c| *c = EpochClass::OutOfView);
    }
    let asleep = classes.iter().filter(|c| !c.is_wake()).count();
    GroundTruth { events, sleep_efficiency: asleep as f64 / n as f64, classes }
}

/// Builds the lazy session and its ground truth.
pub fn generate(scenario: &Scenario) -> Result<(SyntheticSession, GroundTruth)> {
    scenario.validate()?;
    Ok((SyntheticSession::build(scenario), ground_truth(scenario)))
}

pub const PRESETS: [&str; 3] = ["posture_test", "trouble_sleeping", "successful_sleeping"];

/// Default length of the successful-sleep preset (desk scale).
pub const SUCCESSFUL_DEFAULT_SECONDS: u32 = 20 * 60;

/// Named scenario, seed 0.
pub fn preset(name: &str) -> Result<Scenario> {
    match name {
        "posture_test" => Ok(posture_test()),
        "trouble_sleeping" => Ok(trouble_sleeping()),
        "successful_sleeping" => Ok(successful_sleeping(SUCCESSFUL_DEFAULT_SECONDS)),
        other => Err(Error::UnknownPreset(other.into())),
    }
}

/// Ten minutes on the back, turning over every two minutes, ending with a
/// two-minute rest.
pub fn posture_test() -> Scenario {
    Scenario::new(600, 0).with_items(
        [120, 240, 360, 480].map(|t| TimelineItem::new(t, t + 4, ItemKind::FullTurn, 0.5)),
    )
}

use ItemKind::*;

/// One restless minute: twitches, a limb movement and sometimes a turn.
fn restless_minute(at: u32, with_turn: bool, items: &mut Vec<TimelineItem>) {
    items.push(TimelineItem::new(at + 2, at + 14, TinyTwitch, 0.5));
    items.push(TimelineItem::new(at + 20, at + 23, LimbMove, 0.4));
    items.push(TimelineItem::new(at + 30, at + 45, TinyTwitch, 0.3));
    if with_turn {
        items.push(TimelineItem::new(at + 50, at + 52, FullTurn, 0.6));
    }
}

/// An hour of failing to fall asleep: restless minutes, a long motionless
/// but awake stretch, one talk burst, and an absence from bed during which
/// a light is switched on and off.
pub fn trouble_sleeping() -> Scenario {
    let mut items = Vec::new();
    let mut minute = 0;
    let mut restless = |from: u32, to: u32, items: &mut Vec<TimelineItem>| {
        let mut at = from;
        while at + 60 <= to {
            restless_minute(at, minute % 3 == 2, items);
            minute += 1;
            at += 60;
        }
    };
    restless(20, 560, &mut items);
    // motionless while awake
    items.push(TimelineItem::new(600, 1200, Calm, 0.0));
    restless(1200, 1500, &mut items);
    items.push(TimelineItem::new(1500, 1501, Talk, 0.5));
    restless(1510, 2390, &mut items);
    items.push(TimelineItem::new(2400, 2404, LeaveBed, 0.5));
    items.push(TimelineItem::new(2420, 2421, LightOn, 0.5));
    items.push(TimelineItem::new(2740, 2741, LightOff, 0.5));
    items.push(TimelineItem::new(2760, 2764, ReturnBed, 0.5));
    // settling back in; a silent stretch right after a return spike would
    // read as another departure
    items.push(TimelineItem::new(2765, 2775, TinyTwitch, 0.5));
    restless(2800, 3580, &mut items);
    items.sort_by_key(|i| i.start);
    Scenario::new(3600, 0).with_items(items)
}

/// A night of good sleep: restless settling at the start, rare twitches
/// and one turn while asleep, then waking, switching on a light and
/// leaving the bed. `duration` is in seconds (at least ten minutes).
pub fn successful_sleeping(duration: u32) -> Scenario {
    let d = duration.max(600);
    let mut items = Vec::new();
    for (k, at) in [20u32, 80, 140, 200].into_iter().enumerate() {
        items.push(TimelineItem::new(at + 2, at + 8, TinyTwitch, 0.5));
        items.push(TimelineItem::new(at + 20, at + 23, LimbMove, 0.5));
        if k < 2 {
            items.push(TimelineItem::new(at + 40, at + 42, FullTurn, 0.5));
        }
    }
    let sleep_end = d - 120;
    let mid = 300 + (sleep_end - 300) / 2;
    let mut at = 300;
    while at + 600 <= sleep_end {
        items.push(TimelineItem::new(at + 10, at + 13, TinyTwitch, 0.3));
        at += 600;
    }
    items.push(TimelineItem::new(mid + 30, mid + 32, FullTurn, 0.4));
    items.push(TimelineItem::new(d - 100, d - 99, LightOn, 0.5));
    items.push(TimelineItem::new(d - 90, d - 87, FullTurn, 0.5));
    items.push(TimelineItem::new(d - 80, d - 76, LeaveBed, 0.5));
    items.sort_by_key(|i| i.start);
    Scenario::new(d, 0).with_items(items)
}
