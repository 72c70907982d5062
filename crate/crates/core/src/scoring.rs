//! Per-frame scores on a common [0, 1] scale.
//!
//! Visual scores are the smoothed foreground area divided by the ROI area;
//! the audio score is the RMS of the samples aligned with each video slot,
//! divided by PCM full scale.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::background::{BackgroundModel, ChannelKind, GmmParams};
use crate::error::{Error, Result};
use crate::frame::{luma_roi_into, Grid, Rgb, Roi};
use crate::morphology::{foreground_area, ForegroundMask, MorphScratch};
use crate::session::{audio_boundary, AudioStream, SessionSource};

/// PCM full scale for signed 16-bit audio.
pub const PCM_FULL_SCALE: f64 = 32768.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    Depth,
    Color,
    Audio,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Depth, Channel::Color, Channel::Audio];

    /// Name of the events this channel produces.
    pub fn event_name(self) -> &'static str {
        match self {
            Channel::Depth => "motion",
            Channel::Color => "light",
            Channel::Audio => "noise",
        }
    }

    pub fn from_event_name(name: &str) -> Option<Channel> {
        Channel::ALL.into_iter().find(|c| c.event_name() == name)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Depth => "depth",
            Channel::Color => "color",
            Channel::Audio => "audio",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSeries {
    pub channel: Channel,
    pub values: Vec<f64>,
}

/// The three aligned series of one session.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    pub depth: ScoreSeries,
    pub color: ScoreSeries,
    pub audio: ScoreSeries,
}

impl ScoreSet {
    pub fn len(&self) -> usize {
        self.depth.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel(&self, c: Channel) -> &ScoreSeries {
        match c {
            Channel::Depth => &self.depth,
            Channel::Color => &self.color,
            Channel::Audio => &self.audio,
        }
    }
}

pub fn visual_score(mask: &ForegroundMask, roi_area: usize) -> f64 {
    if roi_area == 0 {
        return 0.0;
    }
    foreground_area(mask) as f64 / roi_area as f64
}

/// Sample range of video slot `slot`.
#[inline]
pub fn chunk_range(slot: usize, audio_rate: u32, video_rate: u32) -> Range<usize> {
    audio_boundary(slot, audio_rate, video_rate)..audio_boundary(slot + 1, audio_rate, video_rate)
}

/// Splits the stream prefix into `frame_count` windows, one per video slot.
pub fn chunk_audio(audio: &AudioStream, video_rate: u32, frame_count: usize) -> Result<Vec<Range<usize>>> {
    chunk_bounds(audio.samples.len(), audio.rate, video_rate, frame_count)
}

pub(crate) fn chunk_bounds(
    available: usize,
    audio_rate: u32,
    video_rate: u32,
    frame_count: usize,
) -> Result<Vec<Range<usize>>> {
    if video_rate == 0 || audio_rate == 0 {
        return Err(Error::InvalidParameter("rates must be positive"));
    }
    if audio_boundary(frame_count, audio_rate, video_rate) > available {
        // first slot whose end runs past the stream
        let mut chunk = frame_count - 1;
        while chunk > 0 && audio_boundary(chunk, audio_rate, video_rate) > available {
            chunk -= 1;
        }
        return Err(Error::AudioUnderrun { chunk });
    }
    Ok((0..frame_count).map(|i| chunk_range(i, audio_rate, video_rate)).collect())
}

/// `RMS / 32768`, clamped to [0, 1].
pub fn audio_score(chunk: &[i16]) -> Result<f64> {
    if chunk.is_empty() {
        return Err(Error::EmptyInput("audio chunk"));
    }
    let sum: f64 = chunk.iter().map(|&s| (s as f64) * (s as f64)).sum();
    let rms = libm::sqrt(sum / chunk.len() as f64);
    Ok((rms / PCM_FULL_SCALE).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameScores {
    pub depth: f64,
    pub color: f64,
    pub audio: f64,
}

/// Streaming scorer: feed one synchronized frame triple at a time.
#[derive(Debug, Clone)]
pub struct Scorer {
    roi: Roi,
    depth_model: BackgroundModel,
    color_model: BackgroundModel,
    depth_roi: Grid<u16>,
    luma_roi: Grid<u8>,
    depth_mask: ForegroundMask,
    color_mask: ForegroundMask,
    depth_scratch: MorphScratch,
    color_scratch: MorphScratch,
}

impl Scorer {
    pub fn new(roi: Roi, depth_model: BackgroundModel, color_model: BackgroundModel) -> Result<Self> {
        let dims = (roi.w, roi.h);
        for m in [&depth_model, &color_model] {
            if m.dims() != dims {
                return Err(Error::DimensionMismatch { expected: dims, found: m.dims() });
            }
        }
        Ok(Scorer {
            roi,
            depth_model,
            color_model,
            depth_roi: Grid::default(),
            luma_roi: Grid::default(),
            depth_mask: ForegroundMask::empty(roi.w, roi.h),
            color_mask: ForegroundMask::empty(roi.w, roi.h),
            depth_scratch: MorphScratch::new(),
            color_scratch: MorphScratch::new(),
        })
    }

    /// Initializes both models on the ROI of the given first frames.
    pub fn from_first_frames(
        roi: Roi,
        depth_params: GmmParams,
        luma_params: GmmParams,
        depth: &Grid<u16>,
        color: &Grid<Rgb>,
    ) -> Result<Self> {
        let (d, c) = init_models(roi, depth_params, luma_params, depth, color)?;
        Self::new(roi, d, c)
    }

    pub fn depth_model(&self) -> &BackgroundModel {
        &self.depth_model
    }

    pub fn color_model(&self) -> &BackgroundModel {
        &self.color_model
    }

    /// Smoothed masks of the last pushed frame.
    pub fn masks(&self) -> (&ForegroundMask, &ForegroundMask) {
        (&self.depth_mask, &self.color_mask)
    }

    pub fn push(&mut self, depth: &Grid<u16>, color: &Grid<Rgb>, audio_chunk: &[i16]) -> Result<FrameScores> {
        depth.crop_into(self.roi, &mut self.depth_roi)?;
        luma_roi_into(color, self.roi, &mut self.luma_roi)?;
        let area = self.roi.area();

        let depth_step = |model: &mut BackgroundModel, frame: &Grid<u16>, mask: &mut ForegroundMask, s: &mut MorphScratch| {
            model.update_into(frame, mask)?;
            s.smooth(mask);
            Ok::<f64, Error>(visual_score(mask, area))
        };
        let color_step = |model: &mut BackgroundModel, frame: &Grid<u8>, mask: &mut ForegroundMask, s: &mut MorphScratch| {
            model.update_into(frame, mask)?;
            s.smooth(mask);
            Ok::<f64, Error>(visual_score(mask, area))
        };

        #[cfg(feature = "parallel")]
        let (d, c) = rayon::join(
            || depth_step(&mut self.depth_model, &self.depth_roi, &mut self.depth_mask, &mut self.depth_scratch),
            || color_step(&mut self.color_model, &self.luma_roi, &mut self.color_mask, &mut self.color_scratch),
        );
        #[cfg(not(feature = "parallel"))]
        let (d, c) = (
            depth_step(&mut self.depth_model, &self.depth_roi, &mut self.depth_mask, &mut self.depth_scratch),
            color_step(&mut self.color_model, &self.luma_roi, &mut self.color_mask, &mut self.color_scratch),
        );

        Ok(FrameScores { depth: d?, color: c?, audio: audio_score(audio_chunk)? })
    }
}

/// Depth and luma models initialized on the ROI of the first frames.
pub fn init_models(
    roi: Roi,
    depth_params: GmmParams,
    luma_params: GmmParams,
    depth: &Grid<u16>,
    color: &Grid<Rgb>,
) -> Result<(BackgroundModel, BackgroundModel)> {
    let d = BackgroundModel::new(ChannelKind::Depth, depth_params, &depth.crop(roi)?)?;
    let mut luma = Grid::default();
    luma_roi_into(color, roi, &mut luma)?;
    let c = BackgroundModel::new(ChannelKind::Luma, luma_params, &luma)?;
    Ok((d, c))
}

/// Models initialized on frame 0 of `source`.
pub fn init_models_from<S: SessionSource + ?Sized>(
    source: &mut S,
    depth_params: GmmParams,
    luma_params: GmmParams,
) -> Result<(BackgroundModel, BackgroundModel)> {
    let roi = source.manifest().roi;
    let mut d = Grid::default();
    let mut c = Grid::default();
    source.read_depth(0, &mut d)?;
    source.read_color(0, &mut c)?;
    init_models(roi, depth_params, luma_params, &d, &c)
}

/// Scores every frame of `source` in order.
pub fn score_session<S: SessionSource + ?Sized>(
    source: &mut S,
    depth_model: BackgroundModel,
    color_model: BackgroundModel,
) -> Result<ScoreSet> {
    let m = source.manifest().clone();
    let chunks = chunk_bounds(source.audio_len(), m.audio_rate, m.video_rate, m.frame_count)?;
    let mut scorer = Scorer::new(m.roi, depth_model, color_model)?;

    let mut set = ScoreSet {
        depth: ScoreSeries { channel: Channel::Depth, values: Vec::with_capacity(m.frame_count) },
        color: ScoreSeries { channel: Channel::Color, values: Vec::with_capacity(m.frame_count) },
        audio: ScoreSeries { channel: Channel::Audio, values: Vec::with_capacity(m.frame_count) },
    };
    let mut depth = Grid::default();
    let mut color = Grid::default();
    let mut audio = Vec::new();
    for (i, range) in chunks.into_iter().enumerate() {
        source.read_depth(i, &mut depth)?;
        source.read_color(i, &mut color)?;
        audio.clear();
        source
            .read_audio(range, &mut audio)
            .map_err(|e| if matches!(e, Error::AudioUnderrun { .. }) { Error::AudioUnderrun { chunk: i } } else { e })?;
        let s = scorer.push(&depth, &color, &audio)?;
        set.depth.values.push(s.depth);
        set.color.values.push(s.color);
        set.audio.values.push(s.audio);
    }
    Ok(set)
}
