//! Argument handling and grid runner behind the `gsrisk` binary.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gsrisk::exec::map_indexed;
use gsrisk::oracle::{exact_capacity_distribution_capped, DEFAULT_STATE_CAP};
use gsrisk::{
    estimate_cmcs, load_model, rts_model, run_fegs, run_study, AdamConfig, CmcsConfig, Error, EstimateResult,
    Execution, FegsConfig, Gaussian, SeedStream, StudyId, StudySpec, SystemModel, Uncertainty,
};

#[derive(Debug, Parser)]
#[command(name = "gsrisk", version, about = "Short-term generation risk by generalized splitting")]
#[command(args_conflicts_with_subcommands = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one of the bundled RTS studies and report its assertions.
    Study(StudyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Oracle,
    Cmcs,
    Fegs,
    /// All three methods, with estimator agreement against the oracle.
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A magnitude in MW, or a percentage of a reference value when suffixed
/// with `%`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spread {
    Mw(f64),
    Percent(f64),
}

impl Spread {
    pub fn resolve(self, reference: f64) -> f64 {
        match self {
            Spread::Mw(v) => v,
            Spread::Percent(p) => reference * p / 100.0,
        }
    }
}

impl FromStr for Spread {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (text, percent) = match s.strip_suffix('%') {
            Some(t) => (t, true),
            None => (s, false),
        };
        let v: f64 = text.trim().parse().map_err(|_| format!("not a number: '{s}'"))?;
        if !(v.is_finite() && v >= 0.0) {
            return Err(format!("spread must be finite and non-negative: '{s}'"));
        }
        Ok(if percent { Spread::Percent(v) } else { Spread::Mw(v) })
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Generating system TOML; the bundled RTS system when omitted.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fegs")]
    pub method: MethodArg,
    /// Comma-separated load grid in MW (load forecasts when uncertainty is on).
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub loads: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// FEGS states per stage.
    #[arg(long, default_value_t = 50_000)]
    pub samples: usize,
    /// Independent FEGS runs per grid point.
    #[arg(long, default_value_t = 10)]
    pub replications: usize,
    /// CMCS stopping relative error.
    #[arg(long, default_value_t = 0.10)]
    pub target_re: f64,
    /// CMCS evaluation cap.
    #[arg(long, default_value_t = 5_000_000)]
    pub max_evaluations: u64,
    /// ADAM quantile between consecutive levels.
    #[arg(long, default_value_t = 0.1)]
    pub rho: f64,
    /// ADAM pilot sample size.
    #[arg(long, default_value_t = 10_000)]
    pub pilot: usize,
    /// Load standard deviation: MW, or `%` of each grid load.
    #[arg(long)]
    pub sigma_load: Option<Spread>,
    #[arg(long)]
    pub wind_forecast: Option<f64>,
    /// Wind standard deviation: MW, or `%` of the forecast.
    #[arg(long, default_value = "10%")]
    pub sigma_wind: Spread,
    /// Restrict load and wind draws to non-negative values.
    #[arg(long)]
    pub truncate: bool,
    /// Override the lead time of the model, hours.
    #[arg(long)]
    pub lead_time: Option<f64>,
    /// Disable data parallelism.
    #[arg(long)]
    pub sequential: bool,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Also write the run manifest as JSON to this path.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StudyArgs {
    #[arg(value_parser = parse_study)]
    pub id: StudyId,
    /// Directory for `<id>.md` and `<id>.csv`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Replace the study's fixed seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub sequential: bool,
}

fn parse_study(s: &str) -> Result<StudyId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Everything needed to rerun a grid.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub model_source: String,
    pub lead_time_hours: f64,
    pub method: MethodArg,
    pub loads: Vec<f64>,
    pub seed: u64,
    pub samples: usize,
    pub replications: usize,
    pub target_re: f64,
    pub max_evaluations: u64,
    pub rho: f64,
    pub pilot: usize,
    pub sigma_load: Option<Spread>,
    pub wind_forecast: Option<f64>,
    pub sigma_wind: Spread,
    pub truncate: bool,
    pub parallel: bool,
}

/// One output row: a method evaluated at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub load: f64,
    pub method: String,
    pub risk: Option<f64>,
    pub relative_error: Option<f64>,
    pub evaluations: Option<u64>,
    pub pilot_evaluations: Option<u64>,
    pub wall_time: f64,
    pub seed: u64,
    /// Intermediate levels, `;`-separated.
    pub levels: String,
    /// `(estimate - exact) / SE` against the oracle, compare mode only.
    pub agreement: Option<f64>,
    pub config: String,
    pub error: String,
}

pub struct RunOutput {
    pub manifest: RunManifest,
    pub records: Vec<Record>,
}

impl RunOutput {
    pub fn has_errors(&self) -> bool {
        self.records.iter().any(|r| !r.error.is_empty())
    }
}

struct Plan {
    base: SystemModel,
    cmcs: CmcsConfig,
    adam: AdamConfig,
    fegs: FegsConfig,
}

impl RunArgs {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }

    fn uncertainty_enabled(&self) -> bool {
        self.sigma_load.is_some() || self.wind_forecast.is_some()
    }

    /// Model and importance threshold at grid load `load`.
    fn point_model(&self, base: &SystemModel, load: f64) -> gsrisk::Result<(SystemModel, f64)> {
        if !self.uncertainty_enabled() {
            return Ok((base.clone(), load));
        }
        let sigma = self.sigma_load.map_or(0.0, |s| s.resolve(load));
        let uncertainty = Uncertainty {
            load: Some(Gaussian::new(load, sigma)),
            wind: self.wind_forecast.map(|w| Gaussian::new(w, self.sigma_wind.resolve(w))),
            truncate_at_zero: self.truncate,
        };
        Ok((base.with_uncertainty(uncertainty)?, 0.0))
    }

    fn plan(&self) -> anyhow::Result<(Plan, RunManifest)> {
        let (mut base, source) = match &self.model {
            Some(path) => (load_model(path)?, path.display().to_string()),
            None => (rts_model(), "bundled:ieee_rts".to_string()),
        };
        if let Some(hours) = self.lead_time {
            base = SystemModel::new(base.stations().to_vec(), hours, *base.uncertainty())?;
        }
        if self.loads.iter().any(|l| !l.is_finite()) {
            bail!("loads must be finite");
        }
        let execution = self.execution();
        let cmcs = CmcsConfig {
            target_relative_error: self.target_re,
            max_evaluations: self.max_evaluations,
            execution,
            ..CmcsConfig::default()
        };
        let adam = AdamConfig {
            pilot_size: self.pilot,
            quantile: self.rho,
            execution,
            ..AdamConfig::default()
        };
        let fegs = FegsConfig {
            sample_size: self.samples,
            replications: self.replications,
            execution,
            ..FegsConfig::default()
        };
        if matches!(self.method, MethodArg::Cmcs | MethodArg::Compare) {
            cmcs.validate()?;
        }
        if matches!(self.method, MethodArg::Fegs | MethodArg::Compare) {
            adam.validate()?;
            fegs.validate()?;
        }
        for &load in &self.loads {
            self.point_model(&base, load)
                .with_context(|| format!("invalid uncertainty at load {load}"))?;
        }
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION"),
            model_source: source,
            lead_time_hours: base.lead_time(),
            method: self.method,
            loads: self.loads.clone(),
            seed: self.seed,
            samples: self.samples,
            replications: self.replications,
            target_re: self.target_re,
            max_evaluations: self.max_evaluations,
            rho: self.rho,
            pilot: self.pilot,
            sigma_load: self.sigma_load,
            wind_forecast: self.wind_forecast,
            sigma_wind: self.sigma_wind,
            truncate: self.truncate,
            parallel: execution == Execution::Parallel,
        };
        Ok((Plan { base, cmcs, adam, fegs }, manifest))
    }
}

fn record_from(
    load: f64,
    method: &str,
    seed: u64,
    config: String,
    started: Instant,
    outcome: gsrisk::Result<EstimateResult>,
) -> (Record, Option<EstimateResult>) {
    let wall_time = started.elapsed().as_secs_f64();
    let mut record = Record {
        load,
        method: method.to_string(),
        risk: None,
        relative_error: None,
        evaluations: None,
        pilot_evaluations: None,
        wall_time,
        seed,
        levels: String::new(),
        agreement: None,
        config,
        error: String::new(),
    };
    match outcome {
        Ok(r) => {
            record.risk = Some(r.risk);
            record.relative_error = r.relative_error;
            record.evaluations = Some(r.evaluations);
            record.pilot_evaluations = Some(r.pilot_evaluations);
            record.levels = r.levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(";");
            (record, Some(r))
        }
        Err(e) => {
            record.error = e.to_string();
            (record, None)
        }
    }
}

fn run_point(args: &RunArgs, plan: &Plan, load: f64) -> Vec<Record> {
    let streams = SeedStream::new(args.seed).child(load.to_bits());
    let (model, threshold) = match args.point_model(&plan.base, load) {
        Ok(m) => m,
        Err(e) => {
            let (r, _) = record_from(load, "model", args.seed, String::new(), Instant::now(), Err(e));
            return vec![r];
        }
    };
    let want = |m: MethodArg| args.method == m || args.method == MethodArg::Compare;
    let mut records = Vec::new();

    let mut exact = None;
    if want(MethodArg::Oracle) {
        let started = Instant::now();
        let outcome = exact_capacity_distribution_capped(&model, DEFAULT_STATE_CAP)
            .and_then(|d| d.risk(model.uncertainty(), threshold))
            .map(|risk| {
                exact = Some(risk);
                EstimateResult {
                    method: gsrisk::Method::Oracle,
                    risk,
                    relative_error: None,
                    evaluations: 0,
                    pilot_evaluations: 0,
                    seed: args.seed,
                    levels: Vec::new(),
                    stages: Vec::new(),
                    replicates: Vec::new(),
                }
            });
        let config = format!("state_cap={DEFAULT_STATE_CAP}");
        records.push(record_from(load, "oracle", args.seed, config, started, outcome).0);
    }
    let agreement = |r: &Option<EstimateResult>| {
        let (exact, r) = (exact?, r.as_ref()?);
        let se = r.standard_error()?;
        (se > 0.0).then(|| (r.risk - exact) / se)
    };
    if want(MethodArg::Cmcs) {
        let started = Instant::now();
        let outcome = estimate_cmcs(&model, threshold, &plan.cmcs, &streams.child(1));
        let config = format!(
            "target_re={};max_evaluations={};batch={}",
            plan.cmcs.target_relative_error, plan.cmcs.max_evaluations, plan.cmcs.batch_size
        );
        let (mut rec, res) = record_from(load, "cmcs", args.seed, config, started, outcome);
        rec.agreement = agreement(&res);
        records.push(rec);
    }
    if want(MethodArg::Fegs) {
        let started = Instant::now();
        let outcome = run_fegs(&model, threshold, &plan.adam, &plan.fegs, &streams.child(2));
        let config = format!(
            "samples={};replications={};rho={};pilot={}",
            plan.fegs.sample_size, plan.fegs.replications, plan.adam.quantile, plan.adam.pilot_size
        );
        let (mut rec, res) = record_from(load, "fegs", args.seed, config, started, outcome);
        rec.agreement = agreement(&res);
        records.push(rec);
    }
    records
}

/// Evaluates the grid. Points run concurrently; records come back in grid
/// order and, apart from `wall_time`, depend only on the arguments.
pub fn run(args: &RunArgs) -> anyhow::Result<RunOutput> {
    let (plan, manifest) = args.plan()?;
    let records = map_indexed(args.execution(), args.loads.len(), |i| run_point(args, &plan, args.loads[i]))
        .into_iter()
        .flatten()
        .collect();
    Ok(RunOutput { manifest, records })
}

pub fn write_output<W: Write>(output: &RunOutput, format: Format, writer: W) -> anyhow::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            for r in &output.records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let doc = serde_json::json!({ "manifest": output.manifest, "records": output.records });
            let mut writer = writer;
            serde_json::to_writer_pretty(&mut writer, &doc)?;
            writeln!(writer)?;
        }
    }
    Ok(())
}

/// Runs the CLI and returns the process exit code: 0 on success, 2 if any
/// grid point failed or a study assertion did not hold.
pub fn execute(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Some(Command::Study(args)) => {
            let mut spec = StudySpec::new(args.id);
            if let Some(seed) = args.seed {
                spec.seed = seed;
            }
            if args.sequential {
                spec.execution = Execution::Sequential;
                spec.cmcs.execution = Execution::Sequential;
                spec.adam.execution = Execution::Sequential;
                spec.fegs.execution = Execution::Sequential;
            }
            let report = run_study(&spec)?;
            if let Some(dir) = &args.out_dir {
                report.write_to_dir(dir)?;
            }
            print!("{}", report.to_markdown());
            Ok(if report.passed() { 0 } else { 2 })
        }
        None => {
            let args = cli.run;
            let output = run(&args)?;
            match &args.out {
                Some(path) => {
                    let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
                    write_output(&output, args.format, std::io::BufWriter::new(file))?;
                }
                None => write_output(&output, args.format, std::io::stdout().lock())?,
            }
            if let Some(path) = &args.manifest {
                std::fs::write(path, serde_json::to_string_pretty(&output.manifest)?)?;
            }
            for r in output.records.iter().filter(|r| !r.error.is_empty()) {
                eprintln!("load {} {}: {}", r.load, r.method, r.error);
            }
            Ok(if output.has_errors() { 2 } else { 0 })
        }
    }
}
