//! `shock`: batch front-end for the shock severity pipeline.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shock_severity::modal::{load_modal_model, predict_bounds, bounds_csv_row, BOUNDS_CSV_HEADER};
use shock_severity::plot::{dual_svg, srs_svg};
use shock_severity::signal::{
    gen_damped_sine_sum, gen_half_sine, load_signal_with_units, save_signal, DampedSine, SignalFormat,
};
use shock_severity::spectrum::{build_response_matrix, export_src, srs};
use shock_severity::ssi::{dual_spectra, ssi_extract, svd_nonneg, DEFAULT_RANK_TOL};
use shock_severity::verify::{verify_bounds, DEFAULT_SEED};
use shock_severity::{AnalysisConfig, Error, ModalModel, ResponseMatrix, Signal, Units};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_BOUND: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "shock", version, about = "Shock response spectrum and shock severity infimum")]
struct Cli {
    /// Lowest oscillator frequency (Hz).
    #[arg(long, global = true)]
    fmin: Option<f64>,
    /// Highest oscillator frequency (Hz).
    #[arg(long, global = true)]
    fmax: Option<f64>,
    /// Oscillators per octave.
    #[arg(long, global = true)]
    ppo: Option<usize>,
    /// Oscillator quality factor.
    #[arg(long, global = true)]
    q: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file with analysis settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomised checks.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Signal file (`time,accel` rows, or one value per row with --dt).
    signal: PathBuf,
    /// Sample interval for single-column files (s).
    #[arg(long)]
    dt: Option<f64>,
    /// Units of the acceleration column.
    #[arg(long, value_enum, default_value_t = UnitArg::Ms2)]
    units: UnitArg,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum UnitArg {
    Ms2,
    G,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maximax shock response spectrum.
    Srs(Input),
    /// Shock severity infimum (rank-one spectrum).
    Ssi(Input),
    /// SRS, SSI and their margin in dB.
    Dual(Input),
    /// Shock response contour over time and frequency.
    Src(Input),
    /// Modal-superposition response and its bounds.
    Predict {
        /// Signal files; one report row each.
        #[arg(required = true)]
        signals: Vec<PathBuf>,
        /// Modal table (`mode_no,freq_hz,gamma,phi[,m_eff_kg]`); the bundled cantilever beam if omitted.
        #[arg(long)]
        modal: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, value_enum, default_value_t = UnitArg::Ms2)]
        units: UnitArg,
    },
    /// Write a synthetic signal.
    Synth {
        #[command(subcommand)]
        kind: Synth,
    },
    /// Check the response bounds over random nonnegative weights.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Synth {
    /// Half-sine pulse followed by zero padding.
    HalfSine {
        /// Output file.
        output: PathBuf,
        #[arg(long, default_value_t = 1000.0)]
        amp: f64,
        #[arg(long, default_value_t = 0.001)]
        duration: f64,
        #[arg(long, default_value_t = 1e-5)]
        dt: f64,
        #[arg(long, default_value_t = 0.05)]
        pad: f64,
    },
    /// Sum of exponentially decaying sinusoids.
    DampedSine {
        output: PathBuf,
        /// `freq_hz,amplitude,decay[,phase]`; repeatable.
        #[arg(long = "component", required = true, value_parser = parse_component)]
        components: Vec<DampedSine>,
        #[arg(long, default_value_t = 0.05)]
        duration: f64,
        #[arg(long, default_value_t = 1e-5)]
        dt: f64,
    },
}

fn parse_component(s: &str) -> Result<DampedSine, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [f, a, d] => Ok(DampedSine::new(*f, *a, *d, 0.0)),
        [f, a, d, p] => Ok(DampedSine::new(*f, *a, *d, *p)),
        _ => Err("expected freq_hz,amplitude,decay[,phase]".into()),
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Pipeline(Error),
    Config(String),
    Bound(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Pipeline(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Config(_) => EXIT_INPUT,
            Failure::Bound(_) => EXIT_BOUND,
            Failure::Pipeline(e) => match e {
                Error::Io { .. } | Error::Parse { .. } | Error::EmptyInput(_) | Error::Sampling(_) => EXIT_INPUT,
                Error::DegenerateInput(_) => EXIT_DEGENERATE,
                Error::Parameter(_) | Error::Resolution(_) | Error::Alias { .. } | Error::Grid(_) | Error::Range(_) => {
                    EXIT_USAGE
                }
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Config(m) | Failure::Bound(m) => m.clone(),
            Failure::Pipeline(e) => e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    config: AnalysisConfig,
    seed: u64,
}

impl Ctx {
    fn from_cli(cli: &Cli) -> Result<Self, Failure> {
        let mut config = match &cli.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
                toml::from_str::<AnalysisConfig>(&text)
                    .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
            }
            None => AnalysisConfig::default(),
        };
        if let Some(v) = cli.fmin {
            config.fmin = v;
        }
        if let Some(v) = cli.fmax {
            config.fmax = v;
        }
        if let Some(v) = cli.ppo {
            config.points_per_octave = v;
        }
        if let Some(v) = cli.q {
            config.q = v;
        }
        if let Some(v) = &cli.out {
            config.output_dir = v.clone();
        }
        config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(Ctx { config, seed: cli.seed.unwrap_or(DEFAULT_SEED) })
    }

    fn out_path(&self, name: &str) -> Result<PathBuf, Failure> {
        let dir = &self.config.output_dir;
        fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
        Ok(dir.join(name))
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, Failure> {
        let path = self.out_path(name)?;
        fs::write(&path, contents).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        println!("wrote {}", path.display());
        Ok(path)
    }

    fn matrix(&self, signal: &Signal) -> Result<ResponseMatrix, Failure> {
        Ok(build_response_matrix(signal, &self.config.bank()?)?)
    }
}

fn units(u: UnitArg) -> Units {
    match u {
        UnitArg::Ms2 => Units::Ms2,
        UnitArg::G => Units::G,
    }
}

fn read_signal(path: &Path, dt: Option<f64>, u: UnitArg) -> Result<Signal, Failure> {
    let format = match dt {
        Some(dt) => SignalFormat::SingleColumn { dt },
        None => SignalFormat::TwoColumn,
    };
    let signal = load_signal_with_units(path, format, units(u))?;
    if signal.peak_abs() == 0.0 {
        eprintln!("warning: {} is identically zero", path.display());
    }
    Ok(signal)
}

fn load(input: &Input) -> Result<Signal, Failure> {
    read_signal(&input.signal, input.dt, input.units)
}

fn cmd_srs(ctx: &Ctx, input: &Input) -> Outcome {
    let signal = load(input)?;
    let spectrum = srs(&ctx.matrix(&signal)?);
    let label = signal.label();
    ctx.write(&format!("{label}_srs.csv"), &spectrum.to_csv())?;
    ctx.write(&format!("{label}_srs.svg"), &srs_svg(&spectrum, label))?;
    Ok(())
}

fn cmd_ssi(ctx: &Ctx, input: &Input) -> Outcome {
    let signal = load(input)?;
    let matrix = ctx.matrix(&signal)?;
    let ssi = ssi_extract(&svd_nonneg(&matrix, DEFAULT_RANK_TOL)?)?;
    ctx.write(&format!("{}_ssi.csv", signal.label()), &ssi.to_csv())?;
    println!("alpha = {:.6}", ssi.alpha);
    Ok(())
}

fn cmd_dual(ctx: &Ctx, input: &Input) -> Outcome {
    let signal = load(input)?;
    let matrix = ctx.matrix(&signal)?;
    let spectrum = srs(&matrix);
    let ssi = ssi_extract(&svd_nonneg(&matrix, DEFAULT_RANK_TOL)?)?;
    let dual = dual_spectra(&spectrum, &ssi)?;
    let label = signal.label();
    ctx.write(&format!("{label}_dual.csv"), &dual.to_csv())?;
    ctx.write(&format!("{label}_dual.svg"), &dual_svg(&dual, label))?;
    println!("alpha = {:.6}", ssi.alpha);
    let sigma: Vec<String> = ssi.sigma.iter().map(|s| format!("{s:.6e}")).collect();
    println!("sigma = [{}]", sigma.join(", "));
    Ok(())
}

fn cmd_src(ctx: &Ctx, input: &Input) -> Outcome {
    let signal = load(input)?;
    let matrix = ctx.matrix(&signal)?;
    let stem = ctx.out_path(&format!("{}_src", signal.label()))?;
    let (csv, svg) = export_src(&matrix, ctx.config.src_floor, ctx.config.src_ceiling, &stem)?;
    println!("wrote {}", csv.display());
    println!("wrote {}", svg.display());
    Ok(())
}

fn cmd_predict(ctx: &Ctx, signals: &[PathBuf], modal: Option<&Path>, dt: Option<f64>, u: UnitArg) -> Outcome {
    let model = match modal {
        Some(p) => load_modal_model(p)?,
        None => ModalModel::cantilever_beam(),
    };
    let mut report = String::from(BOUNDS_CSV_HEADER);
    report.push('\n');
    for path in signals {
        let signal = read_signal(path, dt, u)?;
        let matrix = ctx.matrix(&signal)?;
        let spectrum = srs(&matrix);
        let ssi = ssi_extract(&svd_nonneg(&matrix, DEFAULT_RANK_TOL)?)?;
        let bounds = predict_bounds(&matrix, &spectrum, &ssi, &model)?;
        if !bounds.right_bound_ok() || !bounds.signed_below_abs() {
            return Err(Failure::Bound(format!("{}: proved response bound violated: {bounds:?}", signal.label())));
        }
        if !bounds.left_bound_ok() {
            eprintln!("warning: {}: SSI bound exceeds the response maximum", signal.label());
        }
        report.push_str(&bounds_csv_row(signal.label(), &bounds));
        report.push('\n');
    }
    print!("{report}");
    ctx.write("bounds.csv", &report)?;
    Ok(())
}

fn cmd_synth(ctx: &Ctx, kind: &Synth) -> Outcome {
    let (signal, output) = match kind {
        Synth::HalfSine { output, amp, duration, dt, pad } => (gen_half_sine(*amp, *duration, *dt, *pad)?, output),
        Synth::DampedSine { output, components, duration, dt } => {
            (gen_damped_sine_sum(components, *duration, *dt)?, output)
        }
    };
    let path = if output.is_absolute() { output.clone() } else { ctx.out_path(&output.to_string_lossy())? };
    save_signal(&signal, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_verify(ctx: &Ctx, input: &Input, trials: usize) -> Outcome {
    let signal = load(input)?;
    let matrix = ctx.matrix(&signal)?;
    let decomp = svd_nonneg(&matrix, DEFAULT_RANK_TOL)?;
    let spectrum = srs(&matrix);
    let ssi = ssi_extract(&decomp)?;
    let report = verify_bounds(&matrix, &decomp, &spectrum, &ssi, trials, ctx.seed)?;
    let label = signal.label();

    println!("trials            {}", report.trials);
    println!("seed              {}", report.seed);
    println!("alpha             {:.6}", report.alpha);
    println!("trend failures    {}", report.trend_failures);
    println!("srs failures      {}", report.srs_failures);
    println!("identity failures {}", report.ssi_identity_failures);
    println!("left violations   {}", report.left_violations);
    println!(
        "gap min/median/max {:.6e} / {:.6e} / {:.6e}",
        report.gap_min, report.gap_median, report.gap_max
    );
    let text = toml::to_string(&report).map_err(|e| Failure::Usage(e.to_string()))?;
    ctx.write(&format!("{label}_verify.toml"), &text)?;

    if let Some(w) = &report.left_witness {
        eprintln!(
            "warning: empirical lower bound violated in {} of {} trials ({:.2}%)",
            report.left_violations,
            report.trials,
            100.0 * report.left_violation_rate()
        );
        let mut csv = String::from("freq_hz,weight\n");
        for (f, x) in matrix.freqs().iter().zip(w) {
            csv.push_str(&format!("{f:.10e},{x:.17e}\n"));
        }
        ctx.write(&format!("{label}_witness.csv"), &csv)?;
    }
    if !report.proved_bounds_hold() {
        return Err(Failure::Bound(format!("{label}: proved bound failed")));
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    let ctx = Ctx::from_cli(cli)?;
    match &cli.command {
        Command::Srs(i) => cmd_srs(&ctx, i),
        Command::Ssi(i) => cmd_ssi(&ctx, i),
        Command::Dual(i) => cmd_dual(&ctx, i),
        Command::Src(i) => cmd_src(&ctx, i),
        Command::Predict { signals, modal, dt, units } => cmd_predict(&ctx, signals, modal.as_deref(), *dt, *units),
        Command::Synth { kind } => cmd_synth(&ctx, kind),
        Command::Verify { input, trials } => cmd_verify(&ctx, input, *trials),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
