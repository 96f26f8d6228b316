//! Command-line driver for the two-photon interference simulator.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 validation
//! failure, 3 I/O error.

use homsim::{config, output, plot, validate};

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hom_core::clicksim::{estimate_visibility, run_scan};
use hom_core::field::SpectralModel;
use hom_core::paths::{
    baseline_probability, coincidence_probability, enumerate_paths, minimum_probability,
    oracle_visibility, PathLabel, SourceKind, SourceModel,
};

use config::{ConfigFile, Overrides, Scenario};
use plot::Series;

#[derive(Parser)]
#[command(
    name = "homsim",
    version,
    about = "Two-photon interference between weak coherent pulse trains",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a delay scan and write the curve as CSV plus a metadata side-car
    Scan(ScanArgs),
    /// Print the two-photon path table and its dip visibility
    Oracle(OracleArgs),
    /// Run the self-check suite
    Validate(ValidateArgs),
    /// Render a scan CSV as an SVG line plot
    Plot(PlotArgs),
}

#[derive(Args)]
struct ScanArgs {
    /// TOML config file; command-line flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named scenario (overrides the config file)
    #[arg(long, value_enum)]
    scenario: Option<Scenario>,
    /// Random seed for the trial streams
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per scan point
    #[arg(long)]
    trials: Option<u64>,
    /// Output CSV path (default: <scenario>.csv)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (affects speed only, never results)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SourceArg {
    /// Heralded single photons, one per input
    Single,
    /// Weak coherent pulses
    Coherent,
}

#[derive(Args)]
struct OracleArgs {
    /// What feeds the beamsplitter inputs
    #[arg(long, value_enum)]
    source: SourceArg,
    /// Mean photon number per coherent pulse
    #[arg(long, default_value_t = 0.1)]
    mu: f64,
    /// Slots of one input share a fixed phase relation (the default)
    #[arg(long, conflicts_with = "incoherent_within_input")]
    coherent_within_input: bool,
    /// Slots of one input carry independent phases
    #[arg(long)]
    incoherent_within_input: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Monte Carlo trials per sampled point; tolerances scale with 1/sqrt(trials)
    #[arg(long)]
    trials: Option<u64>,
    /// Random seed for the suite
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (affects speed only, never results)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    /// Scan CSV produced by `homsim scan`
    input: PathBuf,
    /// Output SVG path (default: input with .svg extension)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Which curve to draw
    #[arg(long, value_enum, default_value_t = Series::Coincidences)]
    series: Series,
}

enum Failure {
    Config(String),
    Validation(usize),
    Io(String),
}

impl Failure {
    fn report(&self) -> String {
        match self {
            Failure::Config(msg) => format!("configuration error: {msg}"),
            Failure::Validation(n) => format!("validation failed: {n} check(s) did not pass"),
            Failure::Io(msg) => format!("i/o error: {msg}"),
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage_only = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            // Bad flags are configuration errors under the exit contract.
            return if usage_only { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    let result = match cli.command {
        Command::Scan(args) => cmd_scan(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Plot(args) => cmd_plot(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.report());
            ExitCode::from(failure.code())
        }
    }
}

/// Runs `f` on a dedicated pool when a thread count is requested. The
/// trial streams are keyed per point and per trial, so the count changes
/// scheduling only, never output bytes.
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Failure::Config("threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Failure::Config(format!("thread pool: {e}"))),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("reading {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("writing {}: {e}", path.display())))
}

fn cmd_scan(args: ScanArgs) -> Result<(), Failure> {
    let file = match &args.config {
        Some(path) => {
            Some(ConfigFile::parse(&read_text(path)?).map_err(Failure::Config)?)
        }
        None => None,
    };
    let overrides = Overrides { scenario: args.scenario, seed: args.seed, trials: args.trials };
    let cfg = config::resolve(file.as_ref(), &overrides).map_err(Failure::Config)?;

    let pulse_train = cfg.pulse_train();
    let process = cfg.process();
    let detector = cfg.detector().map_err(Failure::Config)?;
    let deltas = cfg.scan.deltas();
    let result = with_threads(args.threads, || {
        run_scan(
            &pulse_train,
            &process,
            &detector,
            cfg.physics.slot_offset_m,
            &deltas,
            cfg.trials_per_point,
            cfg.seed,
        )
    })?
    .map_err(|e| Failure::Config(e.to_string()))?;

    let spectrum = SpectralModel::new(cfg.physics.wavelength_nm, cfg.physics.fwhm_bandwidth_nm)
        .map_err(|e| Failure::Config(e.to_string()))?;
    let estimate = estimate_visibility(&result.points, &spectrum).ok();

    let out = args.out.unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.scenario)));
    write_text(&out, &output::csv_document(&result, estimate.as_ref()))?;
    let sidecar = out.with_extension("meta.toml");
    write_text(&sidecar, &output::metadata_document(&cfg))?;

    println!(
        "wrote {} ({} points, {} trials/point, seed {})",
        out.display(),
        result.points.len(),
        cfg.trials_per_point,
        cfg.seed
    );
    println!("wrote {}", sidecar.display());
    match estimate {
        Some(v) => println!(
            "visibility {:.4} +/- {:.4} (dip at {:.2} um)",
            v.visibility, v.stderr, v.dip_position_um
        ),
        None => println!("no dip visibility for this scan (insufficient baseline coverage)"),
    }
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<(), Failure> {
    let kind = match args.source {
        SourceArg::Single => SourceKind::SingleHeralded,
        SourceArg::Coherent => SourceKind::WeakCoherent { mu: args.mu },
    };
    let source = SourceModel { kind, within_input_coherent: !args.incoherent_within_input };
    let paths = enumerate_paths(&source, 0.0, 0.0).map_err(|e| Failure::Config(e.to_string()))?;

    let describe = |label: PathLabel| match label {
        PathLabel::DirectPairing => "direct pairing",
        PathLabel::ExchangedPairing => "exchanged pairing",
        PathLabel::BothFromA => "both from input A",
        PathLabel::BothFromB => "both from input B",
    };
    match args.source {
        SourceArg::Single => println!("source: heralded single photons"),
        SourceArg::Coherent => println!("source: weak coherent pulses, mu = {}", args.mu),
    }
    println!(
        "within-input phases: {}",
        if source.within_input_coherent { "locked" } else { "independent" }
    );
    println!();
    println!("{:<20} {:>22} {:>12} {:>6}", "path", "amplitude", "|amplitude|", "class");
    for p in &paths {
        println!(
            "{:<20} {:>+11.6} {:>+9.6}i {:>12.6} {:>6}",
            describe(p.label),
            p.amplitude.re,
            p.amplitude.im,
            p.amplitude.norm(),
            p.class
        );
    }
    println!();
    let baseline = baseline_probability(&paths);
    println!("baseline probability   {:.6e}", baseline);
    println!("zero-delay probability {:.6e}", coincidence_probability(&paths, 0.0));
    println!("minimum probability    {:.6e}", minimum_probability(&paths));
    let v = oracle_visibility(&source).map_err(|e| Failure::Config(e.to_string()))?;
    println!("visibility             {v}");
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<(), Failure> {
    let trials = args.trials.unwrap_or(100_000);
    if trials == 0 {
        return Err(Failure::Config("trials must be at least 1".into()));
    }
    let seed = args.seed.unwrap_or(7);
    let reports = with_threads(args.threads, || validate::run_all(trials, seed))?;
    let mut failures = 0;
    for report in &reports {
        match &report.result {
            Ok(()) => println!("ok    {}", report.name),
            Err(msg) => {
                failures += 1;
                println!("FAIL  {}: {msg}", report.name);
            }
        }
    }
    println!("{} checks, {failures} failure(s)", reports.len());
    if failures > 0 {
        return Err(Failure::Validation(failures));
    }
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<(), Failure> {
    let text = read_text(&args.input)?;
    let (points, summary) = output::parse_csv(&text).map_err(Failure::Config)?;
    let title = args
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scan".into());
    let svg = plot::render_svg(&points, args.series, &title, summary)
        .map_err(Failure::Config)?;
    let out = args.out.unwrap_or_else(|| args.input.with_extension("svg"));
    write_text(&out, &svg)?;
    println!("wrote {}", out.display());
    Ok(())
}
