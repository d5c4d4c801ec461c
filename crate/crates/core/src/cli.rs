//! Command-line front end: `test`, `simulate` and `power`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::competing::{
    art_test_with, cce_t_test_with, im_test_layout, mnw_test_layout, nr_test_layout,
    wild_bootstrap_t_test_layout, ArtOptions, CceReference, TestResult, IM_DEFAULT_DRAWS,
    MNW_DEFAULT_DRAWS,
};
use crate::data::{build_layout, load_dataset, SchemaSpec};
use crate::dgp::{AppendixBConfig, Design, Model1Config, Model2Config, SigmaSpec};
use crate::error::Error;
use crate::mc::{parse_rho_grid, parse_tests, power_curve, run_mc, write_csv, McConfig, McTest};
use crate::randcore::DEFAULT_DRAWS;
use crate::regression::Grouping;
use crate::wcr::{wcr_test_layout, WcrOptions};

/// Version of the JSON report layout (see `docs/report.schema.json`).
pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "wcr",
    version,
    about = "Tests for the level of clustering in linear regression"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one test on a CSV dataset.
    Test(TestArgs),
    /// Monte Carlo rejection rates for one design.
    Simulate(SimulateArgs),
    /// Monte Carlo rejection rates over a grid of rho values.
    Power(PowerArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Wcr,
    Nr,
    Im,
    Mnw,
    Cce,
    Art,
    Wild,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupingArg {
    Coarse,
    Fine,
}

impl From<GroupingArg> for Grouping {
    fn from(g: GroupingArg) -> Self {
        match g {
            GroupingArg::Coarse => Grouping::Cluster,
            GroupingArg::Fine => Grouping::Subcluster,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub outcome: String,
    #[arg(long)]
    pub regressor: String,
    #[arg(long, value_delimiter = ',')]
    pub controls: Vec<String>,
    #[arg(long)]
    pub cluster: String,
    #[arg(long)]
    pub subcluster: String,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Draws: sign flips when q > 10, reference draws (im) or bootstrap
    /// draws (mnw, wild). Defaults to 1000, or 399 for mnw and wild.
    #[arg(long = "B")]
    pub draws: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Null value of β (cce, art, wild).
    #[arg(long, default_value_t = 0.0)]
    pub beta0: f64,
    /// Grouping for the β-inference methods (cce, art, wild).
    #[arg(long, value_enum, default_value_t = GroupingArg::Coarse)]
    pub grouping: GroupingArg,
    /// Use Student t critical values with G − 1 degrees of freedom (cce).
    #[arg(long)]
    pub student_t: bool,
    /// Evaluate every cutoff instead of the conservative-median window (wcr).
    #[arg(long)]
    pub no_prune: bool,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// The file has no header row; columns are named 1, 2, ...
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "appendixB", alias = "appendixb")]
    AppendixB,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub qk: Option<usize>,
    #[arg(long)]
    pub nj: Option<usize>,
    #[arg(long)]
    pub phi: Option<f64>,
    /// Error-scale overrides for model 1, e.g. "cluster1=10,subcluster2=5".
    #[arg(long)]
    pub sigma: Option<String>,
    /// Model 1 only: rescale the AR term to unit variance.
    #[arg(long)]
    pub unit_variance_normalization: bool,
    /// Comma-separated: wcr,nr,im,mnw and cce|art|wild-coarse|fine.
    #[arg(long)]
    pub tests: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = "WCR_JOBS", default_value_t = 0)]
    pub jobs: usize,
    /// Null value of β for cce/art/wild; defaults to the true β.
    #[arg(long)]
    pub beta0: Option<f64>,
    /// Omit the CSV header row.
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    #[arg(long)]
    pub rho: f64,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    /// START:STOP:STEP, inclusive.
    #[arg(long)]
    pub rho_grid: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffRow {
    pub cutoff: usize,
    pub threshold: f64,
    pub p_value: f64,
    /// The λ = 0 pattern.
    #[serde(default)]
    pub naive: bool,
}

/// Everything `wcr test` reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliReport {
    pub schema_version: u32,
    pub method: String,
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    #[serde(rename = "B")]
    pub draws: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_cutoff: Option<Vec<CutoffRow>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub group_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grouping: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub group_estimates: Option<Vec<f64>>,
    pub r: usize,
    pub q: usize,
    pub n: usize,
    pub data: String,
    pub elapsed_seconds: f64,
}

impl CliReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let decision = if self.reject {
            "reject"
        } else {
            "fail to reject"
        };
        s.push_str(&format!("method: {}\n", self.method));
        s.push_str(&format!(
            "data: {} (r = {}, q = {}, n = {})\n",
            self.data, self.r, self.q, self.n
        ));
        if let Some(g) = &self.grouping {
            s.push_str(&format!("grouping: {g}\n"));
        }
        if let Some(b) = self.beta0 {
            s.push_str(&format!("beta0: {b}\n"));
        }
        s.push_str(&format!("statistic: {:.6}\n", self.statistic));
        s.push_str(&format!("p-value: {:.3}\n", self.p_value));
        s.push_str(&format!("decision: {decision} at alpha = {}\n", self.alpha));
        s.push_str(&format!("B: {}\n", self.draws));
        if let Some(g) = self.group_size {
            s.push_str(&format!("randomization group size: {g}\n"));
        }
        s.push_str(&format!("seed: {}\n", self.seed));
        if let Some(rows) = &self.per_cutoff {
            s.push_str("per-cutoff p-values:\n");
            s.push_str(&format!(
                "  {:>6}  {:>14}  {:>8}\n",
                "cutoff", "threshold", "p-value"
            ));
            for row in rows {
                s.push_str(&format!(
                    "  {:>6}  {:>14.6}  {:>8.3}{}\n",
                    row.cutoff,
                    row.threshold,
                    row.p_value,
                    if row.naive { "  (lambda = 0)" } else { "" }
                ));
            }
        }
        s
    }
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn usage_error(kind: clap::error::ErrorKind, msg: impl std::fmt::Display) -> Failure {
    use clap::CommandFactory;
    let e = Cli::command().error(kind, msg);
    Failure::Usage(e.render().to_string())
}

fn cmd_test(args: &TestArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let start = Instant::now();
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(usage_error(
            clap::error::ErrorKind::ValueValidation,
            format!("--alpha must lie in (0, 1), got {}", args.alpha),
        ));
    }
    if args.draws == Some(0) {
        return Err(usage_error(
            clap::error::ErrorKind::ValueValidation,
            "--B must be at least 1",
        ));
    }
    if !args.delimiter.is_ascii() {
        return Err(usage_error(
            clap::error::ErrorKind::ValueValidation,
            "--delimiter must be a single ASCII character",
        ));
    }
    let seed = args.seed.unwrap_or_else(rand::random);
    let mut schema = SchemaSpec::new(
        &args.outcome,
        &args.regressor,
        args.controls.clone(),
        &args.cluster,
        &args.subcluster,
    );
    schema.delimiter = args.delimiter as u8;
    schema.has_header = !args.no_header;
    let ds = load_dataset(&args.data, &schema).map_err(|e| Failure::Data(e.to_string()))?;
    let layout = build_layout(&ds);
    let data_err = |e: Error| Failure::Data(e.to_string());

    let default_draws = match args.method {
        MethodArg::Mnw | MethodArg::Wild => MNW_DEFAULT_DRAWS,
        MethodArg::Im => IM_DEFAULT_DRAWS,
        _ => DEFAULT_DRAWS,
    };
    let draws = args.draws.unwrap_or(default_draws);
    let grouping: Grouping = args.grouping.into();
    let beta_method = matches!(
        args.method,
        MethodArg::Cce | MethodArg::Art | MethodArg::Wild
    );

    let mut per_cutoff = None;
    let mut group_size = None;
    let result: TestResult = match args.method {
        MethodArg::Wcr => {
            let opts = WcrOptions {
                alpha: args.alpha,
                draws,
                seed,
                prune: !args.no_prune,
                ..WcrOptions::default()
            };
            let w = wcr_test_layout(&ds, &layout, &opts).map_err(data_err)?;
            per_cutoff = Some(
                w.per_cutoff
                    .iter()
                    .map(|c| CutoffRow {
                        cutoff: c.cutoff,
                        threshold: c.threshold,
                        p_value: c.p_value,
                        naive: c.naive,
                    })
                    .collect(),
            );
            group_size = Some(w.group_size);
            TestResult::from(&w)
        }
        MethodArg::Nr => {
            let r = nr_test_layout(&ds, &layout, args.alpha, draws, seed).map_err(data_err)?;
            group_size = r.diagnostics.draws;
            r
        }
        MethodArg::Im => im_test_layout(&ds, &layout, args.alpha, draws, seed).map_err(data_err)?,
        MethodArg::Mnw => {
            mnw_test_layout(&ds, &layout, args.alpha, draws, seed).map_err(data_err)?
        }
        MethodArg::Cce => {
            let reference = if args.student_t {
                CceReference::StudentT
            } else {
                CceReference::Normal
            };
            cce_t_test_with(&ds, &layout, args.beta0, grouping, args.alpha, reference)
                .map_err(data_err)?
        }
        MethodArg::Art => art_test_with(
            &ds,
            &layout,
            args.beta0,
            grouping,
            args.alpha,
            &ArtOptions { draws, seed },
        )
        .map_err(data_err)?,
        MethodArg::Wild => wild_bootstrap_t_test_layout(
            &ds, &layout, args.beta0, grouping, draws, seed, args.alpha,
        )
        .map_err(data_err)?,
    };
    let report = CliReport {
        schema_version: REPORT_SCHEMA_VERSION,
        method: result.method.to_string(),
        statistic: result.statistic,
        p_value: result.p_value,
        reject: result.rejects(),
        alpha: args.alpha,
        draws,
        seed,
        per_cutoff,
        group_size,
        grouping: beta_method.then(|| grouping.name().to_string()),
        beta0: beta_method.then_some(args.beta0),
        group_estimates: result.diagnostics.group_estimates.clone(),
        r: layout.r(),
        q: layout.q(),
        n: layout.n(),
        data: args.data.display().to_string(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
    };
    let text = match args.format {
        Format::Text => report.to_text(),
        Format::Json => {
            let mut j = serde_json::to_string_pretty(&report).expect("report serializes");
            j.push('\n');
            j
        }
    };
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Data(e.to_string()))
}

fn mc_config(d: &DesignArgs, rho: f64) -> Result<(McConfig, bool), Failure> {
    use clap::error::ErrorKind;
    let dims = |name: &str, v: Option<usize>, default: Option<usize>| {
        v.or(default).ok_or_else(|| {
            usage_error(
                ErrorKind::MissingRequiredArgument,
                format!("--{name} is required for this model"),
            )
        })
    };
    let sigma: SigmaSpec = match &d.sigma {
        Some(s) => s.parse()?,
        None => SigmaSpec::default(),
    };
    if d.model != ModelArg::One && !sigma.is_default() {
        return Err(usage_error(
            ErrorKind::ArgumentConflict,
            "--sigma applies to model 1 only",
        ));
    }
    let design = match d.model {
        ModelArg::One => {
            let mut c = Model1Config::new(
                dims("r", d.r, None)?,
                dims("qk", d.qk, None)?,
                dims("nj", d.nj, None)?,
                rho,
            );
            if let Some(phi) = d.phi {
                c.phi = phi;
            }
            c.sigma = sigma;
            c.unit_variance_normalization = d.unit_variance_normalization;
            Design::Model1(c)
        }
        ModelArg::Two => {
            let mut c = Model2Config::new(
                dims("r", d.r, None)?,
                dims("qk", d.qk, None)?,
                dims("nj", d.nj, None)?,
                rho,
            );
            if let Some(phi) = d.phi {
                c.phi = phi;
            }
            Design::Model2(c)
        }
        ModelArg::AppendixB => {
            let base = AppendixBConfig::default();
            Design::AppendixB(AppendixBConfig {
                r: dims("r", d.r, Some(base.r))?,
                q_k: dims("qk", d.qk, Some(base.q_k))?,
                n_j: dims("nj", d.nj, Some(base.n_j))?,
                phi: d.phi.unwrap_or(base.phi),
                beta: base.beta,
            })
        }
    };
    let tests = match &d.tests {
        Some(list) => parse_tests(list)?,
        None if d.model == ModelArg::AppendixB => vec![
            McTest::Cce(Grouping::Cluster),
            McTest::Cce(Grouping::Subcluster),
            McTest::Art(Grouping::Cluster),
            McTest::Wild(Grouping::Cluster),
            McTest::Wild(Grouping::Subcluster),
        ],
        None => McTest::LEVEL_TESTS.to_vec(),
    };
    let seed = d.seed.unwrap_or_else(rand::random);
    let mut cfg = McConfig::new(design, tests, d.reps, seed);
    cfg.alpha = d.alpha;
    cfg.jobs = d.jobs;
    cfg.beta_null = d.beta0;
    cfg.validate()?;
    Ok((cfg, d.seed.is_none()))
}

fn announce_seed(seed: u64, drawn: bool, err: &mut dyn Write) {
    if drawn {
        let _ = writeln!(err, "seed: {seed}");
    }
}

fn cmd_simulate(
    args: &SimulateArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let (cfg, drawn) = mc_config(&args.design, args.rho)?;
    announce_seed(cfg.seed, drawn, err);
    let rows = run_mc(&cfg)?;
    write_csv(&rows, !args.design.no_header, out)?;
    Ok(())
}

fn cmd_power(args: &PowerArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let grid = parse_rho_grid(&args.rho_grid)?;
    let (cfg, drawn) = mc_config(&args.design, grid[0])?;
    announce_seed(cfg.seed, drawn, err);
    let rows = power_curve(&cfg, &grid)?;
    write_csv(&rows, !args.design.no_header, out)?;
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return e.exit_code();
        }
    };
    let res = match &cli.command {
        Command::Test(a) => cmd_test(a, out),
        Command::Simulate(a) => cmd_simulate(a, out, err),
        Command::Power(a) => cmd_power(a, out, err),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "{}", msg.trim_end());
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_DATA
        }
    }
}
