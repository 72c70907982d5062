//! The four subcommands, callable without going through the binary.

use std::fs;
use std::path::{Path, PathBuf};

use sleepsense_core::analysis::analyze_series;
use sleepsense_core::events::run_detector;
use sleepsense_core::scoring::{init_models_from, Channel};
use sleepsense_core::synth::{self, generate as synthesize, Geometry, ItemKind, Scenario};
use sleepsense_core::Error;

use crate::clips::export_clips;
use crate::compare::{compare_events, ChannelMatch};
use crate::config::{Config, APPLIED_FILE};
use crate::error::{CliError, Result};
use crate::formats::{
    class_epochs_csv, epochs_csv, event_log, parse_event_log, parse_scenario, parse_scores_csv, report_text, scenario_text,
    scores_csv, EventRecord,
};
use crate::session_io::{read_manifest, write_source, FileSession};

pub const EVENTS_FILE: &str = "events.log";
pub const SCORES_FILE: &str = "scores.csv";
pub const EPOCHS_FILE: &str = "epochs.csv";
pub const REPORT_FILE: &str = "report.txt";
pub const GROUNDTRUTH_FILE: &str = "groundtruth.log";
pub const GROUNDTRUTH_EPOCHS_FILE: &str = "groundtruth_epochs.csv";
pub const SCENARIO_FILE: &str = "scenario.txt";

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(CliError::io(path))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(CliError::io(path))
}

#[derive(Debug, Clone, Default)]
pub struct GenerateArgs {
    pub preset: Option<String>,
    pub scenario: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Seconds; successful_sleeping only.
    pub duration: Option<u32>,
    pub full_resolution: bool,
    pub out: PathBuf,
}

pub fn resolve_scenario(args: &GenerateArgs) -> Result<Scenario> {
    let mut s = match (&args.preset, &args.scenario) {
        (Some(name), None) => match (name.as_str(), args.duration) {
            ("successful_sleeping", Some(d)) => synth::successful_sleeping(d),
            (_, Some(_)) => return Err(CliError::Usage("--duration only applies to the successful_sleeping preset".into())),
            _ => synth::preset(name)?,
        },
        (None, Some(path)) => {
            if args.duration.is_some() {
                return Err(CliError::Usage("--duration only applies to the successful_sleeping preset".into()));
            }
            parse_scenario(&read(path)?, &path.display().to_string())?
        }
        _ => return Err(CliError::Usage("give exactly one of --preset or --scenario".into())),
    };
    if let Some(seed) = args.seed {
        s.seed = seed;
    }
    if args.full_resolution {
        s.geometry = Geometry::full();
    }
    Ok(s)
}

pub fn generate(args: &GenerateArgs) -> Result<String> {
    let scenario = resolve_scenario(args)?;
    let (mut session, truth) = synthesize(&scenario)?;
    let out = &args.out;
    write_source(&mut session, out)?;
    let manifest = scenario.manifest();
    let records: Vec<EventRecord> = truth.event_records(&manifest)?.iter().map(EventRecord::from).collect();
    write(&out.join(GROUNDTRUTH_FILE), &event_log(&records))?;
    write(&out.join(GROUNDTRUTH_EPOCHS_FILE), &class_epochs_csv(&truth.classes))?;
    write(&out.join(SCENARIO_FILE), &scenario_text(&scenario))?;

    let mut summary = format!("duration={} frames={} seed={}", scenario.duration, manifest.frame_count, scenario.seed);
    for (kind, n) in ItemKind::ALL.iter().zip(scenario.item_counts()) {
        if n > 0 {
            summary.push_str(&format!(" {}={n}", kind.name()));
        }
    }
    Ok(summary)
}

#[derive(Debug, Clone, Default)]
pub struct DetectArgs {
    pub session: PathBuf,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    /// Worker threads; defaults to the available cores.
    pub threads: Option<usize>,
    pub export_clips: bool,
}

pub fn detect(args: &DetectArgs) -> Result<String> {
    let config = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let mut session = FileSession::open(&args.session)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let detection = pool.install(|| -> Result<_> {
        let (d, c) = init_models_from(&mut session, config.depth_gmm, config.luma_gmm)?;
        Ok(run_detector(&mut session, d, c, &config.detector)?)
    })?;

    let out = &args.out;
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let records: Vec<EventRecord> = detection.all_events().map(EventRecord::from).collect();
    write(&out.join(EVENTS_FILE), &event_log(&records))?;
    write(&out.join(SCORES_FILE), &scores_csv(&detection.scores))?;
    write(&out.join(EPOCHS_FILE), &epochs_csv(&detection.epochs))?;
    write(&out.join(APPLIED_FILE), &config.to_text())?;
    if args.export_clips {
        export_clips(&mut session, detection.all_events(), out)?;
    }
    Ok(format!(
        "frames={} motion={} light={} noise={}",
        detection.scores.len(),
        detection.events(Channel::Depth).len(),
        detection.events(Channel::Color).len(),
        detection.events(Channel::Audio).len()
    ))
}

#[derive(Debug, Clone, Default)]
pub struct ReportArgs {
    pub session: PathBuf,
    pub detection: PathBuf,
    /// Where report.txt goes; defaults to the detection directory.
    pub out: Option<PathBuf>,
}

pub fn report(args: &ReportArgs) -> Result<String> {
    let manifest = read_manifest(&args.session)?;
    let det = &args.detection;
    let config = Config::load(&det.join(APPLIED_FILE))?;
    let scores_path = det.join(SCORES_FILE);
    let [depth, _, _] = parse_scores_csv(&read(&scores_path)?, &scores_path.display().to_string())?;
    if depth.len() != manifest.frame_count {
        return Err(Error::ManifestMismatch("score rows").into());
    }
    let events_path = det.join(EVENTS_FILE);
    let events = parse_event_log(&read(&events_path)?, &events_path.display().to_string())?;
    let spans = |c: Channel| -> Vec<(usize, usize)> {
        events.iter().filter(|e| e.channel == c).map(|e| (e.start_epoch, e.end_epoch)).collect()
    };
    let burn_in_frames = (config.detector.burn_in_seconds * manifest.video_rate as usize).min(depth.len());
    let analysis = analyze_series(
        &depth,
        burn_in_frames,
        &spans(Channel::Color),
        &spans(Channel::Audio),
        manifest.video_rate,
        &config.classes,
    )?;
    let text = report_text(&analysis.report, analysis.comparison.as_ref());
    let out = args.out.as_deref().unwrap_or(det);
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    write(&out.join(REPORT_FILE), &text)?;
    Ok(text)
}

/// Per-channel summary lines and whether every channel matched perfectly.
pub fn compare(events: &Path, groundtruth: &Path, tolerance: usize) -> Result<(String, bool)> {
    let detected = parse_event_log(&read(events)?, &events.display().to_string())?;
    let expected = parse_event_log(&read(groundtruth)?, &groundtruth.display().to_string())?;
    let matches = compare_events(&detected, &expected, tolerance);
    let mut out = String::new();
    for m in &matches {
        out.push_str(&format!(
            "{} precision={:.3} recall={:.3} detected={} expected={}\n",
            m.channel.event_name(),
            m.precision(),
            m.recall(),
            m.detected,
            m.expected
        ));
    }
    Ok((out, matches.iter().all(ChannelMatch::perfect)))
}
