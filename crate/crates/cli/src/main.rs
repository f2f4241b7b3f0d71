use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use seldkit::doaval::DEFAULT_TOLERANCE;
use seldkit::io::write_bytes_atomic;
use seldkit::metrics::{Average, EvalConfig};
use seldkit::pipeline::{
    encode_accdoa_file, encode_visual_file, evaluate_dirs, validate_files, AugmentJob, EvalReport, RirSource,
    SynthJob, Triple, AUDIO_DIR, METADATA_DIR, VIDEO_DIR,
};
use seldkit::synth::render::DEFAULT_FPS;
use seldkit::synth::scene::{SceneConfig, DEFAULT_DURATION, DEFAULT_MAX_POLYPHONY};
use seldkit::{FrameGeometry, SeldScores};

const FORMATS: &str = "\
File formats:
  audio      4-channel first-order Ambisonics WAV, ACN order (W, Y, Z, X), SN3D
             gains, 16-bit PCM or 32-bit float. Synthesized audio is 24 kHz PCM16.
  metadata   CSV without header, one row per active source per 100 ms frame:
             frame,class,source,azimuth,elevation  (integers, degrees; class 0-12,
             azimuth -180..180 counter-clockwise from the front, elevation -90..90).
             A sixth distance column is accepted and ignored.
  video      directory of PNG frames named 000000.png, 000001.png, ... holding
             2:1 equirectangular RGB images (azimuth 0 at the centre column).
  assets     CSV manifest, one asset per line: audio_path,class[,tile_dir]
             (mono WAV at the scene sample rate; optional directory of PNG tiles).
  rirs       CSV manifest, one response per line:
             path,azimuth,elevation,distance,room_id  (4-channel WAV; distance may
             be empty), or the word 'anechoic' for the built-in 10-degree grid.
  boxes      CSV without header: frame,cx,cy,w,h with coordinates normalised to [0,1].
  tensors    little-endian: eight u32 header words (magic, version, four dims, two
             zero words) followed by f32 values in row-major order.

Relative paths inside manifests are resolved against the manifest's directory.
Exit status: 0 success, 1 validation failure, 2 usage or runtime error.";

#[derive(Parser, Debug)]
#[command(name = "seldkit", version, about = "Augment, synthesize, label and score 360° spatial audio-visual scenes")]
#[command(after_long_help = FORMATS)]
struct Cli {
    /// Worker threads for multi-file jobs (default: number of CPUs).
    #[arg(long, global = true, env = "SELDKIT_JOBS")]
    jobs: Option<usize>,

    /// More log output on stderr (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write all eight channel/pixel-swapped versions of a clip.
    ///
    /// Outputs go to OUT/foa/<stem>_tN.wav, OUT/metadata/<stem>_tN.csv and
    /// OUT/video/<stem>_tN/ with N = 2*k + flip for a -90°·k azimuth rotation
    /// and an optional elevation flip; _t0 is the unchanged copy.
    Augment(AugmentArgs),
    /// Generate seeded synthetic scenes: FOA audio, metadata and 360° video.
    Synth(SynthArgs),
    /// Convert a metadata CSV into a frames x 3 x 13 x 3 multi-ACCDOA tensor.
    EncodeAccdoa(EncodeAccdoaArgs),
    /// Convert per-frame bounding boxes into a frames x 2 x 6 x 37 visual tensor.
    EncodeVisual(EncodeVisualArgs),
    /// Score predicted metadata against references (ER, F, LE, LR).
    Eval(EvalArgs),
    /// Check a clip's audio directions against its metadata.
    ValidateDoa(ValidateArgs),
}

#[derive(Args, Debug)]
struct AugmentArgs {
    /// Input FOA WAV.
    #[arg(long, required_unless_present = "dataset", requires = "meta", conflicts_with = "dataset")]
    audio: Option<PathBuf>,
    /// Input metadata CSV.
    #[arg(long, requires = "audio")]
    meta: Option<PathBuf>,
    /// Input frame directory.
    #[arg(long, requires = "audio")]
    video: Option<PathBuf>,
    /// Output stem (default: audio file stem).
    #[arg(long, requires = "audio")]
    stem: Option<String>,
    /// Augment every foa/<stem>.wav + metadata/<stem>.csv (+ video/<stem>/) under DIR.
    #[arg(long, value_name = "DIR")]
    dataset: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Number of scenes.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Scene length in seconds.
    #[arg(long, default_value_t = DEFAULT_DURATION)]
    duration: f64,
    /// Most events active in any 100 ms frame.
    #[arg(long, default_value_t = DEFAULT_MAX_POLYPHONY as u64, value_parser = clap::value_parser!(u64).range(1..))]
    max_polyphony: u64,
    /// Events per scene (default: one per three seconds).
    #[arg(long)]
    events: Option<usize>,
    /// Base seed; scene i uses a seed derived from it and i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Asset manifest.
    #[arg(long)]
    assets: PathBuf,
    /// RIR manifest, or 'anechoic'.
    #[arg(long, default_value = "anechoic")]
    rirs: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Skip video rendering.
    #[arg(long)]
    no_video: bool,
    /// Video frame rate.
    #[arg(long, default_value_t = DEFAULT_FPS)]
    fps: f64,
    /// Video frame width; height is half of it.
    #[arg(long, default_value_t = 1920)]
    width: usize,
    /// Sample rate of assets, RIRs and output.
    #[arg(long, default_value_t = 24_000)]
    sample_rate: u32,
}

#[derive(Args, Debug)]
struct EncodeAccdoaArgs {
    #[arg(long)]
    meta: PathBuf,
    /// Frames to encode (default: last labelled frame + 1).
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EncodeVisualArgs {
    /// Box CSV.
    #[arg(long)]
    boxes: PathBuf,
    /// Frames to encode (default: last frame with boxes + 1).
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AverageArg {
    Macro,
    Micro,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Directory of reference metadata CSVs.
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Directory of predicted metadata CSVs, paired with references by file stem.
    #[arg(long)]
    pred: PathBuf,
    /// Angular gate for a true positive, degrees.
    #[arg(long, default_value_t = 20.0)]
    threshold: f64,
    /// Label frames per scoring segment.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    segment: u32,
    #[arg(long, value_enum, default_value_t = AverageArg::Macro)]
    average: AverageArg,
    /// Also write per-file and aggregate scores as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Print the per-class table.
    #[arg(long)]
    per_class: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    audio: PathBuf,
    #[arg(long)]
    meta: PathBuf,
    /// Largest accepted error in degrees (use about 10 for measured RIRs).
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error + Send + Sync>>;

fn run(cmd: Command) -> AnyResult<ExitCode> {
    match cmd {
        Command::Augment(a) => augment(a),
        Command::Synth(a) => synth(a),
        Command::EncodeAccdoa(a) => {
            let t = encode_accdoa_file(&a.meta, a.frames, &a.out)?;
            println!("{}: {:?}", a.out.display(), t.shape());
            Ok(ExitCode::SUCCESS)
        }
        Command::EncodeVisual(a) => {
            let frames = encode_visual_file(&a.boxes, a.frames, &a.out)?;
            println!("{}: [{frames}, 2, 6, 37]", a.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval(a) => eval(a),
        Command::ValidateDoa(a) => validate(a),
    }
}

fn augment(a: AugmentArgs) -> AnyResult<ExitCode> {
    let jobs = match &a.dataset {
        Some(dir) => dataset_jobs(dir, &a.out)?,
        None => vec![AugmentJob {
            audio: a.audio.expect("clap enforces --audio"),
            metadata: a.meta.expect("clap enforces --meta"),
            video: a.video,
            out: a.out.clone(),
            stem: a.stem,
        }],
    };
    let results: Vec<_> = jobs.par_iter().map(|j| j.run().map_err(|e| format!("{}: {e}", j.audio.display()))).collect();
    let mut written = 0;
    for r in results {
        for t in r? {
            print_triple(&t);
            written += 1;
        }
    }
    log::info!("wrote {written} triples");
    Ok(ExitCode::SUCCESS)
}

fn dataset_jobs(dir: &Path, out: &Path) -> AnyResult<Vec<AugmentJob>> {
    let mut jobs = Vec::new();
    let mut audio: Vec<PathBuf> = std::fs::read_dir(dir.join(AUDIO_DIR))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("wav")))
        .collect();
    audio.sort();
    for wav in audio {
        let stem = wav.file_stem().unwrap().to_string_lossy().into_owned();
        let meta = dir.join(METADATA_DIR).join(format!("{stem}.csv"));
        if !meta.is_file() {
            log::warn!("{}: no metadata, skipped", wav.display());
            continue;
        }
        let video = dir.join(VIDEO_DIR).join(&stem);
        jobs.push(AugmentJob {
            audio: wav,
            metadata: meta,
            video: video.is_dir().then_some(video),
            out: out.to_path_buf(),
            stem: Some(stem),
        });
    }
    Ok(jobs)
}

fn print_triple(t: &Triple) {
    match &t.video {
        Some(v) => println!("{}\t{}\t{}", t.audio.display(), t.metadata.display(), v.display()),
        None => println!("{}\t{}", t.audio.display(), t.metadata.display()),
    }
}

fn synth(a: SynthArgs) -> AnyResult<ExitCode> {
    let rirs = if a.rirs.eq_ignore_ascii_case("anechoic") {
        RirSource::Anechoic
    } else {
        RirSource::Manifest(PathBuf::from(&a.rirs))
    };
    let video = if a.no_video {
        None
    } else {
        Some((FrameGeometry::new(a.width, a.width / 2)?, a.fps))
    };
    let job = SynthJob {
        count: a.count,
        seed: a.seed,
        assets: a.assets,
        rirs,
        out: a.out,
        scene: SceneConfig {
            duration: a.duration,
            max_polyphony: a.max_polyphony as usize,
            num_events: a.events,
            sample_rate: a.sample_rate,
        },
        video,
    }
    .prepare()?;
    let results: Vec<_> = (0..job.count()).into_par_iter().map(|i| job.render_scene(i)).collect();
    for r in results {
        print_triple(&r?);
    }
    Ok(ExitCode::SUCCESS)
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "undefined".into(), |v| format!("{v:.prec$}"))
}

fn eval(a: EvalArgs) -> AnyResult<ExitCode> {
    let cfg = EvalConfig {
        doa_threshold: a.threshold,
        segment: a.segment,
        average: match a.average {
            AverageArg::Macro => Average::Macro,
            AverageArg::Micro => Average::Micro,
        },
    };
    let report = evaluate_dirs(&a.reference, &a.pred, &cfg)?;
    print!("{}", eval_text(&report, a.per_class));
    if let Some(path) = &a.csv {
        write_bytes_atomic(path, eval_csv(&report).as_bytes())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn score_row(name: &str, s: &SeldScores<f64>) -> String {
    format!("{name:<32} {:>8.4} {:>8.4} {:>9} {:>8.4}\n", s.er20, s.f20, fmt_opt(s.le, 2), s.lr)
}

fn eval_text(r: &EvalReport, per_class: bool) -> String {
    let mut out = format!("{:<32} {:>8} {:>8} {:>9} {:>8}\n", "file", "ER20", "F20", "LE", "LR");
    for f in &r.files {
        out.push_str(&score_row(&f.stem, &f.scores));
    }
    out.push_str(&score_row("ALL", &r.scores));
    if per_class {
        let _ = writeln!(out, "\n{:<6} {:>6} {:>6} {:>6} {:>6} {:>8} {:>9} {:>8}", "class", "TP", "FP", "FN", "N", "F20", "LE", "LR");
        for c in r.total.class_table() {
            let _ = writeln!(
                out,
                "{:<6} {:>6} {:>6} {:>6} {:>6} {:>8.4} {:>9} {:>8}",
                c.class_idx,
                c.counts.tp,
                c.counts.fp,
                c.counts.fn_,
                c.counts.n_ref,
                c.f20,
                fmt_opt(c.le, 2),
                fmt_opt(c.lr, 4)
            );
        }
    }
    out
}

fn eval_csv(r: &EvalReport) -> String {
    let mut out = String::from("file,er20,f20,le,lr\n");
    let row = |name: &str, s: &SeldScores<f64>| {
        format!("{name},{},{},{},{}\n", s.er20, s.f20, s.le.map_or(String::new(), |v| v.to_string()), s.lr)
    };
    for f in &r.files {
        out.push_str(&row(&f.stem, &f.scores));
    }
    out.push_str(&row("ALL", &r.scores));
    out
}

fn validate(a: ValidateArgs) -> AnyResult<ExitCode> {
    let r = validate_files(&a.audio, &a.meta, a.tolerance)?;
    println!("{:<12} {:>5} {:>6} {:>16} {:>16} {:>8} result", "frames", "class", "source", "labelled", "estimated", "error");
    for run in &r.runs {
        let est = run
            .estimated
            .map_or_else(|| "silent".into(), |d| format!("({:.1}, {:.1})", d.azimuth(), d.elevation()));
        println!(
            "{:<12} {:>5} {:>6} {:>16} {:>16} {:>8} {}",
            format!("{}-{}", run.start_frame, run.end_frame - 1),
            run.class_idx,
            run.source_idx,
            format!("({:.1}, {:.1})", run.labeled.azimuth(), run.labeled.elevation()),
            est,
            fmt_opt(run.error_deg, 2),
            if run.passed { "pass" } else { "FAIL" }
        );
    }
    println!(
        "evaluated {} runs, {} failed, skipped {} overlapping and {} short (tolerance {}°)",
        r.evaluated(),
        r.failures(),
        r.skipped_overlap,
        r.skipped_short,
        a.tolerance
    );
    Ok(if r.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
