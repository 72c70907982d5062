//! Raw media around each event, in the session stream layouts.

use std::fs;
use std::path::Path;

use sleepsense_core::events::Event;
use sleepsense_core::frame::Grid;
use sleepsense_core::session::SessionSource;

use crate::error::{CliError, Result};

pub const CLIPS_DIR: &str = "clips";

/// Writes `clips/<channel>_<start>_<end>.{depth,color,audio}.raw` for each event.
pub fn export_clips<'a, S: SessionSource + ?Sized>(
    source: &mut S,
    events: impl IntoIterator<Item = &'a Event>,
    out: &Path,
) -> Result<usize> {
    let dir = out.join(CLIPS_DIR);
    fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
    let mut written = 0;
    let mut depth = Grid::default();
    let mut color = Grid::default();
    for e in events {
        let stem = format!("{}_{:06}_{:06}", e.channel.event_name(), e.start_epoch, e.end_epoch);
        if let Some(r) = &e.clip.depth_frames {
            let mut bytes = Vec::new();
            for i in r.clone() {
                source.read_depth(i, &mut depth)?;
                bytes.extend(depth.as_slice().iter().flat_map(|v| v.to_le_bytes()));
            }
            let p = dir.join(format!("{stem}.depth.raw"));
            fs::write(&p, bytes).map_err(CliError::io(&p))?;
            written += 1;
        }
        if let Some(r) = &e.clip.color_frames {
            let mut bytes = Vec::new();
            for i in r.clone() {
                source.read_color(i, &mut color)?;
                bytes.extend(color.as_slice().iter().flatten());
            }
            let p = dir.join(format!("{stem}.color.raw"));
            fs::write(&p, bytes).map_err(CliError::io(&p))?;
            written += 1;
        }
        if let Some(r) = &e.clip.audio_samples {
            let mut samples = Vec::new();
            source.read_audio(r.clone(), &mut samples)?;
            let bytes: Vec<u8> = samples.iter().flat_map(|s| s.to_le_bytes()).collect();
            let p = dir.join(format!("{stem}.audio.raw"));
            fs::write(&p, bytes).map_err(CliError::io(&p))?;
            written += 1;
        }
    }
    Ok(written)
}
