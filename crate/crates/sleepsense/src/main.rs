use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sleepsense::commands::{self, DetectArgs, GenerateArgs, ReportArgs};
use sleepsense::CliError;

#[derive(Parser)]
#[command(name = "sleepsense", version, about = "Depth/color/audio sleep monitoring on recorded sessions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic session with ground truth.
    Generate {
        /// posture_test, trouble_sleeping or successful_sleeping
        #[arg(long, conflicts_with = "scenario")]
        preset: Option<String>,
        /// Scenario file (key=value, one `item=` line per timeline item).
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Session length in seconds (successful_sleeping only).
        #[arg(long)]
        duration: Option<u32>,
        /// 640x480 frames with a 320x350 ROI instead of the small default.
        #[arg(long)]
        full_resolution: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a session and detect motion, light and noise events.
    Detect {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Also write raw media around each event under clips/.
        #[arg(long)]
        export_clips: bool,
    },
    /// Classify epochs and write report.txt.
    Report {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        detection: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Precision/recall of an event log against ground truth.
    Compare {
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        groundtruth: PathBuf,
        /// Epochs of slack when matching spans.
        #[arg(long, default_value_t = 2)]
        tolerance: usize,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Generate { preset, scenario, seed, duration, full_resolution, out } => {
            let args = GenerateArgs { preset, scenario, seed, duration, full_resolution, out };
            println!("{}", commands::generate(&args)?);
        }
        Command::Detect { session, config, out, threads, export_clips } => {
            println!("{}", commands::detect(&DetectArgs { session, config, out, threads, export_clips })?);
        }
        Command::Report { session, detection, out } => {
            print!("{}", commands::report(&ReportArgs { session, detection, out })?);
        }
        Command::Compare { events, groundtruth, tolerance } => {
            let (text, perfect) = commands::compare(&events, &groundtruth, tolerance)?;
            print!("{text}");
            return Ok(perfect);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
