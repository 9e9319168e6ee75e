use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use polar_pilot::config::ExperimentConfig;
use polar_pilot::experiment::{build_plan, build_spec, info_set_from_file, run_untimed};
use polar_pilot::output::{plan_json, verify_json, write_csv, write_plot_data, PlotMetric};
use polar_pilot::{run_fer, run_mse, HarnessError};
use polar_pilot_core::construction::{
    bec_bhattacharyya, construct_info_set, db_to_linear, format_reliability_order, ga_llr_means, rank_by_reliability,
    validate_code_spec, CodeSpec, ConstructionMethod,
};
use polar_pilot_core::estimation::EstimatorKind;
use polar_pilot_core::pilots::{validate_plan, Scheme};

#[derive(Parser)]
#[command(name = "polar-pilot", version, about = "Pilot selection from coded symbols for systematic polar codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an information set and print it as a JSON array.
    Construct(ConstructArgs),
    /// Select pilots and print P_f, P_i and the throughput report as JSON.
    PlanPilots(PlanArgs),
    /// Validate a code and pilot plan; exits with status 2 on failure.
    Verify(PlanArgs),
    /// Frame/bit error rate sweep.
    SimulateFer(SimArgs),
    /// Channel estimation MSE sweep.
    SimulateMse(SimArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Ga,
    Bec,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Ga => "ga",
            Method::Bec => "bec",
        }
    }
}

#[derive(Args)]
struct ConstructArgs {
    /// Exponent: N = 2^n.
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 3.0)]
    design_ebno: f64,
    #[arg(long, value_enum, default_value_t = Method::Ga)]
    method: Method,
    /// Take A from a reliability-order file instead.
    #[arg(long)]
    order_file: Option<PathBuf>,
    /// Also write the full reliability order of the chosen method.
    #[arg(long)]
    write_order: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Ueps,
    Eps,
    Traditional,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Ueps => Scheme::Ueps,
            SchemeArg::Eps => Scheme::Eps,
            SchemeArg::Traditional => Scheme::TraditionalInsertion,
        }
    }
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Block length N.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    pilots: usize,
    /// Pilots placed inside A (UEPS split, or EPS pilots beyond D_f).
    #[arg(long)]
    info_pilots: Option<usize>,
    #[arg(long, default_value_t = 3.0)]
    design_ebno: f64,
    #[arg(long, value_enum, default_value_t = Method::Ga)]
    method: Method,
    #[arg(long)]
    order_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Ls,
    Mmse,
    Perfect,
}

impl From<EstimatorArg> for EstimatorKind {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Ls => EstimatorKind::Ls,
            EstimatorArg::Mmse => EstimatorKind::Mmse,
            EstimatorArg::Perfect => EstimatorKind::PerfectCsi,
        }
    }
}

#[derive(Args)]
struct SimArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the configured Doppler list.
    #[arg(long, value_delimiter = ',')]
    fd_hz: Option<Vec<f64>>,
    #[arg(long)]
    symbol_rate: Option<f64>,
    /// Overrides the configured Eb/N0 list.
    #[arg(long, value_delimiter = ',')]
    ebno_db: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    estimator: Option<EstimatorArg>,
    /// Write `curve,x,y` data for plotting to this file.
    #[arg(long)]
    emit_plot_data: Option<PathBuf>,
    /// Report wall_time_s as 0 so that repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Construct(a) => construct(a),
        Command::PlanPilots(a) => {
            let spec = plan_spec(&a)?;
            let plan = build_plan(&spec, a.scheme.into(), a.pilots, a.info_pilots)?;
            print_json(&plan_json(&spec, &plan))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(a) => {
            let spec = plan_spec(&a)?;
            let plan = build_plan(&spec, a.scheme.into(), a.pilots, a.info_pilots)?;
            let report = verify_json(&validate_code_spec(&spec), &validate_plan(&spec, &plan)?);
            print_json(&report)?;
            Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::SimulateFer(a) => simulate(a, true),
        Command::SimulateMse(a) => simulate(a, false),
    }
}

fn construct(a: ConstructArgs) -> Result<ExitCode, HarnessError> {
    let size = 1usize << a.n.min(31);
    let spec = match &a.order_file {
        Some(path) => CodeSpec::new(info_set_from_file(path, a.k)?)?,
        None => construct_info_set(a.n, a.k, a.design_ebno, &ConstructionMethod::from_name(a.method.name())?)?,
    };
    if let Some(path) = &a.write_order {
        let esno = a.k as f64 / size as f64 * db_to_linear(a.design_ebno);
        let order = match a.method {
            Method::Ga => rank_by_reliability(&ga_llr_means(a.n, 4.0 * esno)),
            Method::Bec => {
                let z: Vec<f64> = bec_bhattacharyya(a.n, (-esno).exp()).iter().map(|z| -z).collect();
                rank_by_reliability(&z)
            }
        };
        std::fs::write(path, format_reliability_order(&order))?;
    }
    print_json(&spec.info_set().as_slice())?;
    Ok(ExitCode::SUCCESS)
}

fn plan_spec(a: &PlanArgs) -> Result<CodeSpec, HarnessError> {
    let cfg = ExperimentConfig {
        n: a.n,
        k: a.k,
        design_ebno_db: a.design_ebno,
        method: a.method.name().into(),
        reliability_order: a.order_file.clone(),
        ..ExperimentConfig::default()
    };
    build_spec(&cfg)
}

fn simulate(a: SimArgs, decode: bool) -> Result<ExitCode, HarnessError> {
    let text = std::fs::read_to_string(&a.config)?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    if let Some(fd) = a.fd_hz {
        cfg.fd_hz = fd;
    }
    if let Some(r) = a.symbol_rate {
        cfg.symbol_rate = r;
    }
    if let Some(eb) = a.ebno_db {
        cfg.ebno_db = eb;
    }
    if let Some(e) = a.estimator {
        cfg.estimator = e.into();
    }
    cfg.validate()?;
    let rows = match (a.no_timing, decode) {
        (true, _) => run_untimed(&cfg, decode)?,
        (false, true) => run_fer(&cfg)?,
        (false, false) => run_mse(&cfg)?,
    };
    match &a.out {
        Some(path) => write_csv(&rows, BufWriter::new(File::create(path)?))?,
        None => write_csv(&rows, io::stdout().lock())?,
    }
    if let Some(path) = &a.emit_plot_data {
        let metric = if decode { PlotMetric::Fer } else { PlotMetric::MseFull };
        write_plot_data(&rows, metric, BufWriter::new(File::create(path)?))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn print_json<T: serde::Serialize + ?Sized>(value: &T) -> Result<(), HarnessError> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}
