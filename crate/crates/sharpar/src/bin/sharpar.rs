//! Command-line front end. Exit codes: 0 success, 2 usage error, 3 data
//! error, 4 numerical degeneracy.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sharpar::arfit::{autocorrelations, fit_ar};
use sharpar::bandwidth::{rule_of_thumb, sharpen_adjust, BandwidthMode};
use sharpar::biasstudy::{run_study, study_preset};
use sharpar::boottest::{run_test, BootMode, DEFAULT_REPLICATES};
use sharpar::cheng::{cheng_curve, DEFAULT_LADDER_LEN};
use sharpar::io::{
    bundled_dataset, fmt_f64, read_series, series_checksum, sha256_hex, write_bands, write_curve,
    write_series, write_study, ColumnSpec, RunManifest, DATASET_NAMES,
};
use sharpar::kernels::KernelFamily;
use sharpar::localreg::{
    estimate_curve, lag_pairs, EstimatorKind, EstimatorSpec, Grid, Method, TimeSeries,
    DEFAULT_GRID_POINTS,
};
use sharpar::procedure::Procedure;
use sharpar::sharpen::sharpened_curve;
use sharpar::simulate::{
    replicate_stream, simulate_path, SimulationConfig, TrueFunction, DEFAULT_BURN_IN,
};
use sharpar::Error;

#[derive(Parser, Debug)]
#[command(
    name = "sharpar",
    version,
    about = "Local autoregression with data sharpening and bandwidth-regression bias reduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// Smoothing kernel
    #[arg(long, global = true, default_value = "epanechnikov")]
    kernel: KernelFamily,

    /// Seed for randomized subcommands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output file; stdout when absent. A run manifest is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (results do not depend on this)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Local constant or local linear estimate of g
    Estimate(EstimateArgs),
    /// Data-sharpened estimate of g
    Sharpen(SharpenArgs),
    /// Bias-reduced local linear estimate by regression on h²
    Cheng(ChengArgs),
    /// Linear AR(p) fit by conditional least squares
    Arfit(ArfitArgs),
    /// Simulate a nonlinear AR(1) path
    Simulate(SimulateArgs),
    /// Monte Carlo bias / MAE / decomposition study
    BiasStudy(BiasStudyArgs),
    /// Bootstrap linearity test bands
    BootTest(BootTestArgs),
    /// List bundled datasets, or print one
    Datasets(DatasetsArgs),
    /// Repeat a run from its manifest and check the output checksum
    Replay { manifest: PathBuf },
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// CSV file with the series
    #[arg(long, conflicts_with = "dataset")]
    input: Option<PathBuf>,

    /// Bundled dataset instead of a file
    #[arg(long)]
    dataset: Option<String>,

    /// Column name (header row expected) or zero-based index
    #[arg(long)]
    column: Option<String>,

    #[arg(long, value_enum, default_value_t = Transform::None)]
    transform: Transform,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Transform {
    None,
    Sqrt,
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    grid_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    grid_max: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid_n: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Lc,
    Ll,
}

impl From<Kind> for EstimatorKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Lc => EstimatorKind::LocalConstant,
            Kind::Ll => EstimatorKind::LocalLinear,
        }
    }
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Kind::Ll)]
    kind: Kind,
    /// Bandwidth, or `auto` for the rule of thumb
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    h: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum AdjustH {
    None,
    N45,
}

#[derive(Args, Debug)]
struct SharpenArgs {
    #[command(flatten)]
    estimate: EstimateArgs,
    /// Multiply the bandwidth by n^(4/45)
    #[arg(long, value_enum, default_value_t = AdjustH::None)]
    adjust_h: AdjustH,
}

#[derive(Args, Debug)]
struct ChengArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Base bandwidth, or `auto` for the rule of thumb
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    h: String,
    /// Number of bandwidths in the ladder
    #[arg(long, default_value_t = DEFAULT_LADDER_LEN)]
    m: usize,
}

#[derive(Args, Debug)]
struct ArfitArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 1)]
    order: usize,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// cos, xcos, sin, xsin, linear:a,b or zero
    #[arg(long, default_value = "xsin")]
    g: TrueFunction,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    z0: f64,
}

#[derive(Args, Debug)]
struct BiasStudyArgs {
    #[arg(long)]
    preset: String,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Override the preset's estimator kind
    #[arg(long, value_enum)]
    kind: Option<Kind>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CliMethod {
    Raw,
    Sharp,
    Cheng,
}

impl From<CliMethod> for Method {
    fn from(m: CliMethod) -> Self {
        match m {
            CliMethod::Raw => Method::Raw,
            CliMethod::Sharp => Method::Sharpened,
            CliMethod::Cheng => Method::Cheng,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CliMode {
    Direct,
    Residual,
}

#[derive(Args, Debug)]
struct BootTestArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = CliMode::Direct)]
    mode: CliMode,
    #[arg(long, default_value_t = 1)]
    order: usize,
    #[arg(long, value_enum, default_value_t = CliMethod::Raw)]
    method: CliMethod,
    #[arg(long = "B", default_value_t = DEFAULT_REPLICATES)]
    replicates: usize,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid_n: usize,
    /// Bandwidth: a number, `auto`, or `auto-sharp`
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    h: String,
    #[arg(long, value_enum, default_value_t = Kind::Ll)]
    kind: Kind,
}

#[derive(Args, Debug)]
struct DatasetsArgs {
    name: Option<String>,
}

struct Output {
    bytes: Vec<u8>,
    seed: Option<u64>,
    input_checksum: Option<String>,
}

fn load_input(args: &InputArgs) -> sharpar::Result<TimeSeries> {
    let series = match (&args.input, &args.dataset) {
        (Some(path), _) => {
            let column = args
                .column
                .as_deref()
                .map(ColumnSpec::parse)
                .unwrap_or_default();
            read_series(path, &column)?
        }
        (None, Some(name)) => bundled_dataset(name)?.values,
        (None, None) => {
            return Err(Error::InvalidArgument(
                "either --input or --dataset is required".into(),
            ))
        }
    };
    match args.transform {
        Transform::None => Ok(series),
        Transform::Sqrt => {
            if let Some(index) = series.values().iter().position(|v| *v < 0.0) {
                return Err(Error::NonFiniteValue { index });
            }
            series.map(f64::sqrt)
        }
    }
}

fn build_grid(args: &GridArgs, series: &TimeSeries) -> sharpar::Result<Grid> {
    let (lo, hi) = series.range();
    if lo == hi && args.grid_min.is_none() && args.grid_max.is_none() {
        return Err(Error::DegenerateDesign(
            "series is constant, so its range is a single point".into(),
        ));
    }
    Grid::linspace(
        args.grid_min.unwrap_or(lo),
        args.grid_max.unwrap_or(hi),
        args.grid_n,
    )
}

fn resolve_h(
    h: &str,
    series: &TimeSeries,
    kernel: KernelFamily,
) -> sharpar::Result<sharpar::kernels::Bandwidth> {
    match h.parse::<BandwidthMode>()? {
        BandwidthMode::Fixed(h) => Ok(h),
        BandwidthMode::RuleOfThumb => Ok(rule_of_thumb(&lag_pairs(series), kernel)?.h),
        BandwidthMode::RuleOfThumbSharpAdjusted => {
            sharpen_adjust(rule_of_thumb(&lag_pairs(series), kernel)?.h, series.len())
        }
    }
}

fn curve_output(
    series: &TimeSeries,
    global: &GlobalArgs,
    f: impl FnOnce() -> sharpar::Result<sharpar::localreg::CurveEstimate>,
) -> sharpar::Result<Output> {
    let curve = f()?;
    if curve.defined_count() == 0 {
        return Err(Error::DegenerateDesign(
            "the estimate is undefined at every grid point".into(),
        ));
    }
    let mut bytes = Vec::new();
    write_curve(&mut bytes, &curve)?;
    eprintln!(
        "{} {} estimate, kernel {}, h = {}, {} of {} points defined",
        curve.method,
        curve.spec.kind,
        global.kernel,
        fmt_f64(curve.spec.h.get()),
        curve.defined_count(),
        curve.grid.len()
    );
    Ok(Output {
        bytes,
        seed: None,
        input_checksum: Some(series_checksum(series)),
    })
}

fn run_command(command: &Command, global: &GlobalArgs) -> sharpar::Result<Output> {
    let kernel = global.kernel;
    match command {
        Command::Estimate(a) => {
            let series = load_input(&a.input)?;
            let grid = build_grid(&a.grid, &series)?;
            let spec = EstimatorSpec {
                kind: a.kind.into(),
                kernel,
                h: resolve_h(&a.h, &series, kernel)?,
            };
            curve_output(&series, global, || estimate_curve(&series, &grid, &spec))
        }
        Command::Sharpen(a) => {
            let e = &a.estimate;
            let series = load_input(&e.input)?;
            let grid = build_grid(&e.grid, &series)?;
            let mut h = resolve_h(&e.h, &series, kernel)?;
            if a.adjust_h == AdjustH::N45 {
                h = sharpen_adjust(h, series.len())?;
            }
            let spec = EstimatorSpec {
                kind: e.kind.into(),
                kernel,
                h,
            };
            curve_output(&series, global, || sharpened_curve(&series, &grid, &spec))
        }
        Command::Cheng(a) => {
            let series = load_input(&a.input)?;
            let grid = build_grid(&a.grid, &series)?;
            let h = resolve_h(&a.h, &series, kernel)?;
            curve_output(&series, global, || {
                cheng_curve(&series, &grid, h, kernel, a.m)
            })
        }
        Command::Arfit(a) => {
            let series = load_input(&a.input)?;
            let fit = fit_ar(&series, a.order)?;
            let mut bytes = Vec::new();
            writeln!(bytes, "parameter,value")?;
            writeln!(bytes, "intercept,{}", fmt_f64(fit.intercept))?;
            for (k, phi) in fit.coefficients.iter().enumerate() {
                writeln!(bytes, "phi{},{}", k + 1, fmt_f64(*phi))?;
            }
            writeln!(bytes, "noise_variance,{}", fmt_f64(fit.noise_variance))?;
            writeln!(bytes, "n_used,{}", fit.n_used)?;

            let lags: Vec<String> = fit
                .coefficients
                .iter()
                .enumerate()
                .map(|(k, phi)| format!("{phi:+.4} z[t-{}]", k + 1))
                .collect();
            eprintln!("AR({}) fit on {} values", fit.order, series.len());
            eprintln!(
                "  z[t] = {:.4} {} + e[t],  Var(e) = {:.4}",
                fit.intercept,
                lags.join(" "),
                fit.noise_variance
            );
            let acf = autocorrelations(&series, 10);
            let acf: Vec<String> = acf.iter().map(|r| format!("{r:.3}")).collect();
            eprintln!("  sample ACF lags 1-{}: {}", acf.len(), acf.join(" "));
            Ok(Output {
                bytes,
                seed: None,
                input_checksum: Some(series_checksum(&series)),
            })
        }
        Command::Simulate(a) => {
            let mut cfg = SimulationConfig::new(a.g, a.sigma, a.n, global.seed)?;
            cfg.burn_in = a.burn_in;
            cfg.z0 = a.z0;
            let series = simulate_path(&cfg, &mut replicate_stream(global.seed, 0))?;
            let mut bytes = Vec::new();
            write_series(&mut bytes, &series)?;
            Ok(Output {
                bytes,
                seed: Some(global.seed),
                input_checksum: None,
            })
        }
        Command::BiasStudy(a) => {
            let mut cfg = study_preset(&a.preset, a.n)?;
            cfg.sim.seed = global.seed;
            cfg.kernel = kernel;
            if let Some(r) = a.replicates {
                cfg.replicates = r;
            }
            if let Some(k) = a.kind {
                cfg.kind = k.into();
            }
            let result = run_study(&cfg)?;
            let mut bytes = Vec::new();
            write_study(&mut bytes, &result)?;
            eprintln!(
                "{}: n = {}, {} replicates, {} grid points",
                a.preset,
                cfg.sim.n,
                cfg.replicates,
                cfg.grid.len()
            );
            Ok(Output {
                bytes,
                seed: Some(global.seed),
                input_checksum: None,
            })
        }
        Command::BootTest(a) => {
            let series = load_input(&a.input)?;
            let procedure = Procedure::new(a.method.into(), a.kind.into(), kernel, a.h.parse()?)?;
            let mode = match a.mode {
                CliMode::Direct => BootMode::Direct,
                CliMode::Residual => BootMode::Residual,
            };
            let test = run_test(
                &series,
                mode,
                a.order,
                &procedure,
                a.grid_n,
                a.replicates,
                global.seed,
            )?;
            let mut bytes = Vec::new();
            write_bands(&mut bytes, &test.observed, &test.bands, &test.report)?;
            eprintln!(
                "{mode} test, {} method, B = {}: observed curve outside the bands at {:.1}% of grid points in {} region(s)",
                procedure.method,
                a.replicates,
                100.0 * test.report.fraction_outside,
                test.report.regions.len()
            );
            for r in &test.report.regions {
                eprintln!("  [{:.4}, {:.4}]", r.z_start, r.z_end);
            }
            Ok(Output {
                bytes,
                seed: Some(global.seed),
                input_checksum: Some(series_checksum(&series)),
            })
        }
        Command::Datasets(a) => {
            let mut bytes = Vec::new();
            match &a.name {
                None => {
                    for name in DATASET_NAMES {
                        match bundled_dataset(name) {
                            Ok(d) => writeln!(
                                bytes,
                                "{name}: {} values from {}. {}",
                                d.values.len(),
                                d.first_year,
                                d.provenance
                            )?,
                            Err(e) => writeln!(bytes, "{name}: unavailable ({e})")?,
                        }
                    }
                }
                Some(name) => {
                    let d = bundled_dataset(name)?;
                    write_series(&mut bytes, &d.values)?;
                }
            }
            Ok(Output {
                bytes,
                seed: None,
                input_checksum: None,
            })
        }
        Command::Replay { .. } => unreachable!("handled in main"),
    }
}

fn subcommand_name(command: &Command) -> &'static str {
    match command {
        Command::Estimate(_) => "estimate",
        Command::Sharpen(_) => "sharpen",
        Command::Cheng(_) => "cheng",
        Command::Arfit(_) => "arfit",
        Command::Simulate(_) => "simulate",
        Command::BiasStudy(_) => "bias-study",
        Command::BootTest(_) => "boot-test",
        Command::Datasets(_) => "datasets",
        Command::Replay { .. } => "replay",
    }
}

fn emit(cli: &Cli, args: &[String], output: Output) -> sharpar::Result<()> {
    match &cli.global.out {
        None => io::stdout().write_all(&output.bytes)?,
        Some(path) => {
            fs::write(path, &output.bytes)?;
            let manifest = RunManifest {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                subcommand: subcommand_name(&cli.command).to_string(),
                args: args.to_vec(),
                seed: output.seed,
                input_checksum: output.input_checksum,
                output_checksum: sha256_hex(&output.bytes),
            };
            manifest.write(&RunManifest::path_for(path))?;
        }
    }
    Ok(())
}

fn replay(manifest_path: &Path) -> sharpar::Result<()> {
    let manifest = RunManifest::read(manifest_path)?;
    let argv = std::iter::once("sharpar".to_string()).chain(manifest.args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let output = run_command(&cli.command, &cli.global)?;
    let checksum = sha256_hex(&output.bytes);
    if checksum != manifest.output_checksum {
        return Err(Error::InvalidArgument(format!(
            "replayed output checksum {checksum} differs from recorded {}",
            manifest.output_checksum
        )));
    }
    emit(&cli, &manifest.args, output)?;
    eprintln!("replay reproduced output {checksum}");
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoLocalData { .. } | Error::DegenerateDesign(_) => 4,
        Error::InvalidArgument(_)
        | Error::InvalidBandwidth(_)
        | Error::UnknownPreset { .. }
        | Error::EmptyGrid
        | Error::UnorderedGrid
        | Error::GridMismatch => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    if let Some(threads) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Replay { manifest } => replay(manifest),
        command => run_command(command, &cli.global).and_then(|out| emit(&cli, &args, out)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
