//! `envelope`: amplitude envelopes of WAV files from the command line.
//!
//! Exit codes: 0 success, 1 I/O or file-format error, 2 invalid arguments,
//! 3 benchmark over budget.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use envelope_core::audio_io::{read_wav, to_mono, write_csv, write_wav, MonoMode, SampleFormat};
use envelope_core::bench::bench_three_step;
use envelope_core::{
    butterworth_lowpass, compare_methods, frequency_response, generate, three_step_trace, EnvelopeParams,
    FilterSpec, MethodConfig, Preset, Signal, SyntheticKind, SyntheticSpec,
};

#[derive(Debug, Parser)]
#[command(name = "envelope", version, about = "Amplitude envelope estimation for audio signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the envelope of a WAV file.
    Envelope(EnvelopeArgs),
    /// Compare envelope methods on a WAV file or a synthetic AM tone.
    Compare(CompareArgs),
    /// Write a synthetic test signal and its true envelope.
    Synth(SynthArgs),
    /// Time the three-step pipeline against a runtime budget.
    Bench(BenchArgs),
    /// Print Butterworth coefficients and the frequency response.
    FilterDump(FilterDumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    #[value(name = "three_step")]
    ThreeStep,
    Follower,
    Rms,
    Hilbert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    Canary,
    Whale,
    Speech,
    Piano,
    None,
}

impl PresetArg {
    fn preset(self) -> Option<Preset> {
        match self {
            PresetArg::Canary => Some(Preset::Canary),
            PresetArg::Whale => Some(Preset::Whale),
            PresetArg::Speech => Some(Preset::Speech),
            PresetArg::Piano => Some(Preset::Piano),
            PresetArg::None => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Wav,
    Csv,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Bits {
    #[value(name = "16")]
    Pcm16,
    #[value(name = "32f")]
    Float32,
}

impl Bits {
    fn format(self) -> SampleFormat {
        match self {
            Bits::Pcm16 => SampleFormat::Pcm16,
            Bits::Float32 => SampleFormat::Float32,
        }
    }
}

fn parse_channel(s: &str) -> Result<MonoMode, String> {
    if s == "mean" {
        return Ok(MonoMode::Mean);
    }
    s.parse::<usize>()
        .map(MonoMode::Channel)
        .map_err(|_| format!("expected 'mean' or a channel index, got '{s}'"))
}

#[derive(Debug, Args)]
struct ThreeStepArgs {
    /// Samples per bunch.
    #[arg(long)]
    bunch: Option<usize>,
    /// Low-pass cutoff in Hz.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Butterworth order.
    #[arg(long, default_value_t = 4)]
    order: usize,
}

#[derive(Debug, Args)]
struct EnvelopeArgs {
    input: PathBuf,
    /// Output path; the extension picks the format unless --format is given.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Parameter preset (bunch size, cutoff); explicit flags override it.
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    #[command(flatten)]
    params: ThreeStepArgs,
    #[arg(long, value_enum, default_value = "three_step")]
    method: MethodArg,
    /// RMS window in samples.
    #[arg(long, default_value_t = 50)]
    rms_window: usize,
    /// `mean` or a zero-based channel index.
    #[arg(long, default_value = "mean", value_parser = parse_channel)]
    channel: MonoMode,
    #[arg(long, value_enum, default_value = "32f")]
    bits: Bits,
}

#[derive(Debug, Args)]
struct SynthShape {
    /// Carrier frequency in Hz (comma-separated for multi-carrier and chirp).
    #[arg(long, value_delimiter = ',', default_value = "2000")]
    carrier: Vec<f64>,
    #[arg(long, default_value_t = 5.0)]
    modulator: f64,
    #[arg(long, default_value_t = 0.5)]
    depth: f64,
    /// Seconds.
    #[arg(long, default_value_t = 2.0)]
    duration: f64,
    #[arg(long, default_value_t = 44100.0)]
    rate: f64,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// WAV input; a synthetic AM tone with known envelope is used when omitted.
    input: Option<PathBuf>,
    /// Report CSV path.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "three_step,follower,rms")]
    methods: Vec<MethodArg>,
    /// Add the Hilbert-magnitude baseline.
    #[arg(long)]
    with_hilbert: bool,
    #[arg(long, default_value_t = 35)]
    bunch: usize,
    #[arg(long, default_value_t = 120.0)]
    cutoff: f64,
    #[arg(long, default_value_t = 4)]
    order: usize,
    #[arg(long, default_value_t = 150.0)]
    follower_cutoff: f64,
    #[arg(long, default_value_t = 50)]
    rms_window: usize,
    #[arg(long, default_value = "mean", value_parser = parse_channel)]
    channel: MonoMode,
    #[command(flatten)]
    synth: SynthShape,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value = "am_tone")]
    kind: SyntheticKind,
    #[command(flatten)]
    shape: SynthShape,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum, default_value = "32f")]
    bits: Bits,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Signal length in seconds.
    #[arg(long, default_value_t = 1.5)]
    duration: f64,
    #[arg(long, default_value_t = 44100.0)]
    rate: f64,
    #[arg(long, default_value_t = 35)]
    bunch: usize,
    #[arg(long, default_value_t = 120.0)]
    cutoff: f64,
    #[arg(long, default_value_t = 4)]
    order: usize,
    #[arg(long, default_value_t = 500.0)]
    budget_ms: f64,
}

#[derive(Debug, Args)]
struct FilterDumpArgs {
    #[arg(long, default_value_t = 4)]
    order: usize,
    #[arg(long, default_value_t = 150.0)]
    cutoff: f64,
    #[arg(long, default_value_t = 44100.0)]
    rate: f64,
    /// Points of the uniform frequency grid (the cutoff is always included).
    #[arg(long, default_value_t = 512)]
    points: usize,
    /// Write the response table here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

enum Failure {
    Io(String),
    Invalid(String),
    OverBudget,
}

impl From<envelope_core::Error> for Failure {
    fn from(e: envelope_core::Error) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Envelope(a) => cmd_envelope(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Bench(a) => cmd_bench(a),
        Command::FilterDump(a) => cmd_filter_dump(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::OverBudget) => {
            eprintln!("error: runtime over budget");
            ExitCode::from(3)
        }
    }
}

/// Resolves `(csv path, wav path)` from the requested output and format.
fn output_paths(
    output: Option<&Path>,
    format: Option<Format>,
    fallback_base: &Path,
) -> (Option<PathBuf>, Option<PathBuf>) {
    let format = format.unwrap_or_else(|| match output.and_then(|p| p.extension()) {
        Some(ext) if ext.eq_ignore_ascii_case("wav") => Format::Wav,
        _ => Format::Csv,
    });
    let base = output.map(Path::to_path_buf).unwrap_or_else(|| fallback_base.to_path_buf());
    match format {
        Format::Csv if output.is_some() => (Some(base), None),
        Format::Wav if output.is_some() => (None, Some(base)),
        Format::Csv => (Some(base.with_extension("csv")), None),
        Format::Wav => (None, Some(base.with_extension("wav"))),
        Format::Both => (Some(base.with_extension("csv")), Some(base.with_extension("wav"))),
    }
}

fn load_mono(path: &Path, mode: MonoMode) -> Result<Signal, Failure> {
    let audio = read_wav(path)?;
    Ok(to_mono(&audio, mode)?)
}

fn cmd_envelope(a: EnvelopeArgs) -> CmdResult {
    let preset = a.preset.and_then(PresetArg::preset);
    let base = preset.map(Preset::params).unwrap_or_default();
    let params = EnvelopeParams::new(
        a.params.bunch.unwrap_or(base.bunch_size),
        a.params.cutoff.unwrap_or(base.cutoff_hz),
        a.params.order,
    );
    let config = match a.method {
        MethodArg::ThreeStep => MethodConfig::ThreeStep(params),
        MethodArg::Follower => MethodConfig::Follower {
            cutoff_hz: params.cutoff_hz,
            order: params.filter_order,
        },
        MethodArg::Rms => MethodConfig::Rms {
            window_samples: a.rms_window,
        },
        MethodArg::Hilbert => MethodConfig::Hilbert,
    };

    let signal = load_mono(&a.input, a.channel)?;
    let start = Instant::now();
    let (staircase, envelope) = match config {
        MethodConfig::ThreeStep(p) => {
            let trace = three_step_trace(&signal, &p)?;
            (Some(trace.staircase), trace.envelope)
        }
        other => (None, other.run(&signal)?.envelope),
    };
    let runtime = start.elapsed();

    let fallback = a.input.with_extension("envelope");
    let (csv_path, wav_path) = output_paths(a.output.as_deref(), a.format, &fallback);
    if let Some(path) = &csv_path {
        let abs = envelope_core::rectify(&signal);
        let mut columns: Vec<(&str, &Signal)> = vec![("signal", &signal), ("abs", &abs)];
        if let Some(st) = &staircase {
            columns.push(("staircase", st));
        }
        columns.push(("envelope", &envelope));
        write_csv(path, &columns)?;
    }
    if let Some(path) = &wav_path {
        write_wav(path, &envelope, a.bits.format())?;
    }
    let written: Vec<String> = csv_path
        .iter()
        .chain(wav_path.iter())
        .map(|p| p.display().to_string())
        .collect();
    println!(
        "{} samples @ {} Hz, method={} {}, runtime {:.3} ms -> {}",
        signal.len(),
        signal.sample_rate(),
        config.method(),
        config.summary(),
        runtime.as_secs_f64() * 1e3,
        written.join(", ")
    );
    Ok(())
}

fn synth_spec(kind: SyntheticKind, shape: &SynthShape, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        kind,
        carriers_hz: shape.carrier.clone(),
        modulator_hz: shape.modulator,
        depth: shape.depth,
        duration_s: shape.duration,
        sample_rate_hz: shape.rate,
        seed,
    }
}

fn cmd_compare(a: CompareArgs) -> CmdResult {
    let (signal, truth) = match &a.input {
        Some(path) => (load_mono(path, a.channel)?, None),
        None => {
            let (s, t) = generate(&synth_spec(SyntheticKind::AmTone, &a.synth, 0))?;
            (s, Some(t))
        }
    };
    let mut methods = a.methods.clone();
    if a.with_hilbert && !methods.contains(&MethodArg::Hilbert) {
        methods.push(MethodArg::Hilbert);
    }
    let configs: Vec<MethodConfig> = methods
        .iter()
        .map(|m| match m {
            MethodArg::ThreeStep => MethodConfig::ThreeStep(EnvelopeParams::new(a.bunch, a.cutoff, a.order)),
            MethodArg::Follower => MethodConfig::Follower {
                cutoff_hz: a.follower_cutoff,
                order: a.order,
            },
            MethodArg::Rms => MethodConfig::Rms {
                window_samples: a.rms_window,
            },
            MethodArg::Hilbert => MethodConfig::Hilbert,
        })
        .collect();
    let report = compare_methods(&signal, truth.as_ref(), &configs)?;
    print!("{report}");
    if let Some(path) = &a.output {
        std::fs::write(path, report.to_csv()).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> CmdResult {
    let (signal, truth) = generate(&synth_spec(a.kind, &a.shape, a.seed))?;
    let (csv_path, wav_path) = output_paths(Some(&a.output), a.format, &a.output);
    if let Some(path) = &csv_path {
        write_csv(path, &[("signal", &signal), ("truth", &truth)])?;
    }
    if let Some(path) = &wav_path {
        write_wav(path, &signal, a.bits.format())?;
        write_wav(path.with_extension("truth.wav"), &truth, a.bits.format())?;
    }
    println!(
        "{} {} samples @ {} Hz",
        a.kind,
        signal.len(),
        signal.sample_rate()
    );
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    if !(a.budget_ms.is_finite() && a.budget_ms >= 0.0) {
        return Err(Failure::Invalid(format!("invalid budget {} ms", a.budget_ms)));
    }
    let params = EnvelopeParams::new(a.bunch, a.cutoff, a.order);
    let result = bench_three_step(a.duration, a.rate, &params)?;
    let budget = Duration::from_secs_f64(a.budget_ms / 1e3);
    let pass = result.passes(budget);
    println!(
        "three_step {} samples ({} s @ {} Hz), median {:.3} ms, budget {} ms: {}",
        result.samples,
        a.duration,
        a.rate,
        result.median.as_secs_f64() * 1e3,
        a.budget_ms,
        if pass { "PASS" } else { "FAIL" }
    );
    if pass {
        Ok(())
    } else {
        Err(Failure::OverBudget)
    }
}

fn cmd_filter_dump(a: FilterDumpArgs) -> CmdResult {
    let design = butterworth_lowpass(&FilterSpec::new(a.order, a.cutoff, a.rate)?)?;
    let nyquist = a.rate / 2.0;
    let points = a.points.max(2);
    let mut freqs: Vec<f64> = (0..points).map(|i| nyquist * i as f64 / (points - 1) as f64).collect();
    if !freqs.contains(&a.cutoff) {
        freqs.push(a.cutoff);
        freqs.sort_by(f64::total_cmp);
    }
    let response = frequency_response(&design, &freqs, a.rate)?;
    let mut table = String::from("freq_hz,magnitude_db,phase_deg\n");
    for (f, h) in freqs.iter().zip(&response) {
        let db = 20.0 * h.norm().log10();
        table.push_str(&format!("{f},{db},{}\n", h.arg() * 180.0 / PI));
    }

    println!("# order {} cutoff {} Hz rate {} Hz", a.order, a.cutoff, a.rate);
    println!("# b0 b1 b2 a1 a2");
    print!("{}", design.coefficient_listing());
    match &a.output {
        Some(path) => {
            std::fs::write(path, table).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?
        }
        None => {
            println!();
            print!("{table}");
        }
    }
    Ok(())
}
