//! Detection and analysis settings as key=value text. Missing keys keep
//! their defaults; unknown keys are rejected.

use std::fmt::Write as _;
use std::path::Path;

use sleepsense_core::background::GmmParams;
use sleepsense_core::events::DetectorConfig;
use sleepsense_core::sleep::ClassThresholds;

use crate::error::{CliError, Result};
use crate::kv::Fields;

pub const APPLIED_FILE: &str = "config.applied";

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub detector: DetectorConfig,
    pub classes: ClassThresholds,
    pub depth_gmm: GmmParams,
    pub luma_gmm: GmmParams,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            detector: DetectorConfig::default(),
            classes: ClassThresholds::default(),
            depth_gmm: GmmParams::depth_default(),
            luma_gmm: GmmParams::luma_default(),
        }
    }
}

fn fill_gmm(f: &mut Fields, prefix: &str, p: &mut GmmParams) -> Result<()> {
    f.fill(&format!("{prefix}_components"), &mut p.components)?;
    f.fill(&format!("{prefix}_learning_rate"), &mut p.learning_rate)?;
    f.fill(&format!("{prefix}_match_k"), &mut p.match_k)?;
    f.fill(&format!("{prefix}_background_fraction"), &mut p.background_fraction)?;
    f.fill(&format!("{prefix}_initial_variance"), &mut p.initial_variance)?;
    f.fill(&format!("{prefix}_variance_floor"), &mut p.variance_floor)?;
    f.fill(&format!("{prefix}_replacement_weight"), &mut p.replacement_weight)
}

fn write_gmm(out: &mut String, prefix: &str, p: &GmmParams) {
    let _ = write!(
        out,
        "{prefix}_components={}\n{prefix}_learning_rate={}\n{prefix}_match_k={}\n{prefix}_background_fraction={}\n\
         {prefix}_initial_variance={}\n{prefix}_variance_floor={}\n{prefix}_replacement_weight={}\n",
        p.components,
        p.learning_rate,
        p.match_k,
        p.background_fraction,
        p.initial_variance,
        p.variance_floor,
        p.replacement_weight
    );
}

impl Config {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut c = Config::default();
        let mut f = Fields::parse(text, origin)?;
        let d = &mut c.detector;
        f.fill("depth_threshold", &mut d.depth_threshold)?;
        f.fill("color_threshold", &mut d.color_threshold)?;
        f.fill("audio_threshold", &mut d.audio_threshold)?;
        f.fill("burn_in_seconds", &mut d.burn_in_seconds)?;
        let k = &mut c.classes;
        f.fill("class_tiny", &mut k.tiny)?;
        f.fill("class_limb", &mut k.limb)?;
        f.fill("class_full", &mut k.full)?;
        f.fill("class_exit", &mut k.exit)?;
        f.fill("class_absent", &mut k.absent)?;
        f.fill("class_min_absent_epochs", &mut k.min_absent_epochs)?;
        fill_gmm(&mut f, "depth_gmm", &mut c.depth_gmm)?;
        fill_gmm(&mut f, "luma_gmm", &mut c.luma_gmm)?;
        f.finish()?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        self.detector.validate()?;
        self.classes.validate()?;
        self.depth_gmm.validate()?;
        self.luma_gmm.validate()?;
        Ok(())
    }

    /// Every key with its effective value, in a fixed order.
    pub fn to_text(&self) -> String {
        let d = &self.detector;
        let k = &self.classes;
        let mut out = format!(
            "depth_threshold={}\ncolor_threshold={}\naudio_threshold={}\nburn_in_seconds={}\n\
             class_tiny={}\nclass_limb={}\nclass_full={}\nclass_exit={}\nclass_absent={}\nclass_min_absent_epochs={}\n",
            d.depth_threshold,
            d.color_threshold,
            d.audio_threshold,
            d.burn_in_seconds,
            k.tiny,
            k.limb,
            k.full,
            k.exit,
            k.absent,
            k.min_absent_epochs
        );
        write_gmm(&mut out, "depth_gmm", &self.depth_gmm);
        write_gmm(&mut out, "luma_gmm", &self.luma_gmm);
        out
    }
}
