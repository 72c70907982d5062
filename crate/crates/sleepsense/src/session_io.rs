//! Session directories: a `manifest.txt` of key=value lines plus three raw
//! streams. Depth is little-endian u16 and color is packed RGB, both
//! row-major and frame after frame. Audio is little-endian i16 mono PCM.

use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Seek, SeekFrom, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};

use sleepsense_core::frame::{Grid, Rgb, Roi, MAX_DEPTH};
use sleepsense_core::session::{Session, SessionManifest, SessionSource};
use sleepsense_core::Error;

use crate::error::{CliError, Result};
use crate::kv::Fields;

pub const MANIFEST_FILE: &str = "manifest.txt";

pub fn manifest_to_string(m: &SessionManifest) -> String {
    format!(
        "depth_width={}\ndepth_height={}\ncolor_width={}\ncolor_height={}\nvideo_rate={}\naudio_rate={}\nframe_count={}\n\
         roi_x={}\nroi_y={}\nroi_w={}\nroi_h={}\ndepth_file={}\ncolor_file={}\naudio_file={}\n",
        m.depth_width,
        m.depth_height,
        m.color_width,
        m.color_height,
        m.video_rate,
        m.audio_rate,
        m.frame_count,
        m.roi.x,
        m.roi.y,
        m.roi.w,
        m.roi.h,
        m.depth_file,
        m.color_file,
        m.audio_file
    )
}

pub fn parse_manifest(text: &str, origin: &str) -> Result<SessionManifest> {
    let mut f = Fields::parse(text, origin)?;
    let m = SessionManifest {
        depth_width: f.require("depth_width")?,
        depth_height: f.require("depth_height")?,
        color_width: f.require("color_width")?,
        color_height: f.require("color_height")?,
        video_rate: f.require("video_rate")?,
        audio_rate: f.require("audio_rate")?,
        frame_count: f.require("frame_count")?,
        roi: Roi::new(f.require("roi_x")?, f.require("roi_y")?, f.require("roi_w")?, f.require("roi_h")?),
        depth_file: f.require("depth_file")?,
        color_file: f.require("color_file")?,
        audio_file: f.require("audio_file")?,
    };
    f.finish()?;
    for name in [&m.depth_file, &m.color_file, &m.audio_file] {
        if name.is_empty() || name.contains(['/', '\\']) || name == ".." {
            return Err(CliError::parse(origin, 0, format!("stream file '{name}' must be a plain file name")));
        }
    }
    m.validate()?;
    Ok(m)
}

pub fn read_manifest(dir: &Path) -> Result<SessionManifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(Error::CorruptSession.into()),
        Err(e) => return Err(CliError::io(&path)(e)),
    };
    parse_manifest(&text, &path.display().to_string())
}

/// Streaming reader over a session directory; frames are read on demand.
#[derive(Debug)]
pub struct FileSession {
    dir: PathBuf,
    manifest: SessionManifest,
    depth: File,
    color: File,
    audio: File,
    buf: Vec<u8>,
}

fn open_stream(path: &Path, expected: u64, what: &'static str) -> Result<File> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(Error::CorruptSession.into()),
        Err(e) => return Err(CliError::io(path)(e)),
    };
    let len = file.metadata().map_err(CliError::io(path))?.len();
    if len != expected {
        return Err(Error::ManifestMismatch(what).into());
    }
    Ok(file)
}

impl FileSession {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        let manifest = read_manifest(&dir)?;
        let m = &manifest;
        let n = m.frame_count as u64;
        let depth = open_stream(&dir.join(&m.depth_file), n * (m.depth_width * m.depth_height * 2) as u64, "depth stream size")?;
        let color = open_stream(&dir.join(&m.color_file), n * (m.color_width * m.color_height * 3) as u64, "color stream size")?;
        let audio = open_stream(&dir.join(&m.audio_file), m.audio_len() as u64 * 2, "audio stream size")?;
        Ok(FileSession { dir, manifest, depth, color, audio, buf: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn read_at(file: &mut File, buf: &mut Vec<u8>, offset: u64, len: usize) -> sleepsense_core::Result<()> {
        buf.resize(len, 0);
        file.seek(SeekFrom::Start(offset)).map_err(|_| Error::CorruptSession)?;
        file.read_exact(buf).map_err(|_| Error::CorruptSession)
    }
}

impl SessionSource for FileSession {
    fn manifest(&self) -> &SessionManifest {
        &self.manifest
    }

    fn read_depth(&mut self, index: usize, out: &mut Grid<u16>) -> sleepsense_core::Result<()> {
        let (w, h) = (self.manifest.depth_width, self.manifest.depth_height);
        if index >= self.manifest.frame_count {
            return Err(Error::CorruptSession);
        }
        let bytes = w * h * 2;
        Self::read_at(&mut self.depth, &mut self.buf, (index * bytes) as u64, bytes)?;
        if out.dims() != (w, h) {
            *out = Grid::filled(w, h, 0);
        }
        for (px, b) in out.as_mut_slice().iter_mut().zip(self.buf.chunks_exact(2)) {
            let v = u16::from_le_bytes([b[0], b[1]]);
            if v > MAX_DEPTH {
                return Err(Error::InvalidDepthSample { frame: index, value: v });
            }
            *px = v;
        }
        Ok(())
    }

    fn read_color(&mut self, index: usize, out: &mut Grid<Rgb>) -> sleepsense_core::Result<()> {
        let (w, h) = (self.manifest.color_width, self.manifest.color_height);
        if index >= self.manifest.frame_count {
            return Err(Error::CorruptSession);
        }
        let bytes = w * h * 3;
        Self::read_at(&mut self.color, &mut self.buf, (index * bytes) as u64, bytes)?;
        if out.dims() != (w, h) {
            *out = Grid::filled(w, h, [0; 3]);
        }
        for (px, b) in out.as_mut_slice().iter_mut().zip(self.buf.chunks_exact(3)) {
            *px = [b[0], b[1], b[2]];
        }
        Ok(())
    }

    fn audio_len(&self) -> usize {
        self.manifest.audio_len()
    }

    fn read_audio(&mut self, range: Range<usize>, out: &mut Vec<i16>) -> sleepsense_core::Result<()> {
        if range.end > self.audio_len() {
            return Err(Error::AudioUnderrun { chunk: 0 });
        }
        Self::read_at(&mut self.audio, &mut self.buf, range.start as u64 * 2, range.len() * 2)?;
        out.extend(self.buf.chunks_exact(2).map(|b| i16::from_le_bytes([b[0], b[1]])));
        Ok(())
    }
}

/// Reads a whole session into memory.
pub fn load_session(dir: impl AsRef<Path>) -> Result<Session> {
    let mut s = FileSession::open(dir)?;
    Ok(Session::materialize(&mut s)?)
}

/// Validates `session` completely, then writes it.
pub fn write_session(session: &Session, dir: impl AsRef<Path>) -> Result<()> {
    session.validate()?;
    let mut source = session.clone();
    write_source(&mut source, dir)
}

/// Streams any source to disk frame by frame. Depth frames are checked as
/// they are written.
pub fn write_source<S: SessionSource + ?Sized>(source: &mut S, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    let m = source.manifest().clone();
    m.validate()?;
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;

    let create = |name: &str| -> Result<(PathBuf, BufWriter<File>)> {
        let p = dir.join(name);
        let f = File::create(&p).map_err(CliError::io(&p))?;
        Ok((p, BufWriter::with_capacity(1 << 20, f)))
    };
    let (dp, mut depth) = create(&m.depth_file)?;
    let (cp, mut color) = create(&m.color_file)?;
    let (ap, mut audio) = create(&m.audio_file)?;

    let mut d = Grid::default();
    let mut c = Grid::default();
    let mut bytes = Vec::new();
    for i in 0..m.frame_count {
        source.read_depth(i, &mut d)?;
        if d.dims() != (m.depth_width, m.depth_height) {
            return Err(Error::ManifestMismatch("depth frame size").into());
        }
        bytes.clear();
        for &v in d.as_slice() {
            if v > MAX_DEPTH {
                return Err(Error::InvalidDepthSample { frame: i, value: v }.into());
            }
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        depth.write_all(&bytes).map_err(CliError::io(&dp))?;

        source.read_color(i, &mut c)?;
        if c.dims() != (m.color_width, m.color_height) {
            return Err(Error::ManifestMismatch("color frame size").into());
        }
        bytes.clear();
        bytes.extend(c.as_slice().iter().flatten());
        color.write_all(&bytes).map_err(CliError::io(&cp))?;
    }

    let total = m.audio_len();
    let mut samples = Vec::new();
    let mut pos = 0;
    while pos < total {
        let end = (pos + m.audio_rate as usize).min(total);
        samples.clear();
        source.read_audio(pos..end, &mut samples)?;
        bytes.clear();
        bytes.extend(samples.iter().flat_map(|s| s.to_le_bytes()));
        audio.write_all(&bytes).map_err(CliError::io(&ap))?;
        pos = end;
    }

    for (p, w) in [(dp, depth), (cp, color), (ap, audio)] {
        w.into_inner().map_err(|e| CliError::io(&p)(e.into_error()))?;
    }
    let mp = dir.join(MANIFEST_FILE);
    fs::write(&mp, manifest_to_string(&m)).map_err(CliError::io(&mp))
}
