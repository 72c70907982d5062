//! Synchronized depth/color/audio sessions.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::frame::{ColorFrame, DepthFrame, Grid, Rgb, Roi};

/// Fixed-rate session metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionManifest {
    pub depth_width: usize,
    pub depth_height: usize,
    pub color_width: usize,
    pub color_height: usize,
    pub video_rate: u32,
    pub audio_rate: u32,
    pub frame_count: usize,
    pub roi: Roi,
    pub depth_file: String,
    pub color_file: String,
    pub audio_file: String,
}

impl Default for SessionManifest {
    fn default() -> Self {
        SessionManifest {
            depth_width: 640,
            depth_height: 480,
            color_width: 640,
            color_height: 480,
            video_rate: 30,
            audio_rate: 16000,
            frame_count: 0,
            roi: Roi::default_for(640, 480),
            depth_file: "depth.raw".into(),
            color_file: "color.raw".into(),
            audio_file: "audio.raw".into(),
        }
    }
}

impl SessionManifest {
    pub fn validate(&self) -> Result<()> {
        if self.video_rate == 0 {
            return Err(Error::InvalidParameter("video_rate must be positive"));
        }
        if self.audio_rate == 0 {
            return Err(Error::InvalidParameter("audio_rate must be positive"));
        }
        self.roi.check_inside(self.depth_width, self.depth_height)?;
        self.roi.check_inside(self.color_width, self.color_height)?;
        Ok(())
    }

    /// Number of audio samples that exactly cover `frame_count` video slots.
    pub fn audio_len(&self) -> usize {
        audio_boundary(self.frame_count, self.audio_rate, self.video_rate)
    }

    /// Whole seconds covered by the video streams.
    pub fn seconds(&self) -> usize {
        self.frame_count / self.video_rate as usize
    }

    pub fn frame_time(&self, index: usize) -> f64 {
        index as f64 / self.video_rate as f64
    }

    pub fn sample_time(&self, index: usize) -> f64 {
        index as f64 / self.audio_rate as f64
    }
}

/// First sample index of video slot `slot`: `floor(slot * audio_rate / video_rate)`.
#[inline]
pub fn audio_boundary(slot: usize, audio_rate: u32, video_rate: u32) -> usize {
    ((slot as u128 * audio_rate as u128) / video_rate as u128) as usize
}

/// Mono signed 16-bit PCM.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AudioStream {
    pub samples: Vec<i16>,
    pub rate: u32,
}

/// Random access to the three streams of a session.
///
/// Implemented by the in-memory [`Session`], by lazily generated synthetic
/// sessions and by the streaming file reader in the `sleepsense` crate.
pub trait SessionSource {
    fn manifest(&self) -> &SessionManifest;

    fn read_depth(&mut self, index: usize, out: &mut Grid<u16>) -> Result<()>;

    fn read_color(&mut self, index: usize, out: &mut Grid<Rgb>) -> Result<()>;

    /// Number of audio samples available.
    fn audio_len(&self) -> usize;

    /// Appends samples `range` to `out`. Fails with `AudioUnderrun` if the
    /// stream is shorter than `range.end`.
    fn read_audio(&mut self, range: Range<usize>, out: &mut Vec<i16>) -> Result<()>;
}

/// Fully materialized session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub manifest: SessionManifest,
    pub depth: Vec<DepthFrame>,
    pub color: Vec<ColorFrame>,
    pub audio: AudioStream,
}

impl Session {
    /// Checks every type invariant: manifest ranges, frame counts and sizes,
    /// depth range and audio length.
    pub fn validate(&self) -> Result<()> {
        let m = &self.manifest;
        m.validate()?;
        if self.depth.len() != m.frame_count || self.color.len() != m.frame_count {
            return Err(Error::ManifestMismatch("frame count"));
        }
        for (i, f) in self.depth.iter().enumerate() {
            if f.pixels.dims() != (m.depth_width, m.depth_height) {
                return Err(Error::ManifestMismatch("depth frame size"));
            }
            if f.index != i {
                return Err(Error::ManifestMismatch("depth frame index"));
            }
            f.validate()?;
        }
        for (i, f) in self.color.iter().enumerate() {
            if f.pixels.dims() != (m.color_width, m.color_height) {
                return Err(Error::ManifestMismatch("color frame size"));
            }
            if f.index != i {
                return Err(Error::ManifestMismatch("color frame index"));
            }
        }
        if self.audio.rate != m.audio_rate {
            return Err(Error::ManifestMismatch("audio rate"));
        }
        if self.audio.samples.len() != m.audio_len() {
            return Err(Error::ManifestMismatch("audio length"));
        }
        Ok(())
    }

    /// Reads every frame and sample of `source` into memory.
    pub fn materialize<S: SessionSource + ?Sized>(source: &mut S) -> Result<Session> {
        let manifest = source.manifest().clone();
        let mut depth = Vec::with_capacity(manifest.frame_count);
        let mut color = Vec::with_capacity(manifest.frame_count);
        for i in 0..manifest.frame_count {
            let mut d = Grid::default();
            source.read_depth(i, &mut d)?;
            depth.push(DepthFrame::new(i, d));
            let mut c = Grid::default();
            source.read_color(i, &mut c)?;
            color.push(ColorFrame::new(i, c));
        }
        let mut samples = Vec::with_capacity(manifest.audio_len());
        source.read_audio(0..manifest.audio_len(), &mut samples)?;
        let audio = AudioStream { samples, rate: manifest.audio_rate };
        Ok(Session { manifest, depth, color, audio })
    }
}

impl SessionSource for Session {
    fn manifest(&self) -> &SessionManifest {
        &self.manifest
    }

    fn read_depth(&mut self, index: usize, out: &mut Grid<u16>) -> Result<()> {
        let f = self.depth.get(index).ok_or(Error::CorruptSession)?;
        out.clone_from(&f.pixels);
        Ok(())
    }

    fn read_color(&mut self, index: usize, out: &mut Grid<Rgb>) -> Result<()> {
        let f = self.color.get(index).ok_or(Error::CorruptSession)?;
        out.clone_from(&f.pixels);
        Ok(())
    }

    fn audio_len(&self) -> usize {
        self.audio.samples.len()
    }

    fn read_audio(&mut self, range: Range<usize>, out: &mut Vec<i16>) -> Result<()> {
        match self.audio.samples.get(range.clone()) {
            Some(s) => {
                out.extend_from_slice(s);
                Ok(())
            }
            None => Err(Error::AudioUnderrun { chunk: 0 }),
        }
    }
}

impl<S: SessionSource + ?Sized> SessionSource for &mut S {
    fn manifest(&self) -> &SessionManifest {
        (**self).manifest()
    }
    fn read_depth(&mut self, index: usize, out: &mut Grid<u16>) -> Result<()> {
        (**self).read_depth(index, out)
    }
    fn read_color(&mut self, index: usize, out: &mut Grid<Rgb>) -> Result<()> {
        (**self).read_color(index, out)
    }
    fn audio_len(&self) -> usize {
        (**self).audio_len()
    }
    fn read_audio(&mut self, range: Range<usize>, out: &mut Vec<i16>) -> Result<()> {
        (**self).read_audio(range, out)
    }
}
