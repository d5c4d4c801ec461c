//! Monte Carlo harness: rejection rates over replications of a design.
//!
//! Replication `t` draws its dataset from `derive_seed(seed, t, 0)` and each
//! test from its own fixed salt, so the output depends only on the
//! configuration and never on how replications are scheduled.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::competing::{
    art_test_with, cce_t_test_with, im_test_layout, mnw_test_layout, nr_from_scores,
    wild_bootstrap_t_test_layout, ArtOptions, CceReference, IM_DEFAULT_DRAWS, MNW_DEFAULT_DRAWS,
};
use crate::data::build_layout;
use crate::dgp::Design;
use crate::error::{Error, Result};
use crate::randcore::{make_sign_group, DEFAULT_DRAWS};
use crate::regression::{Grouping, PiMode};
use crate::rng::derive_seed;
use crate::wcr::{scores_for, wcr_from_scores};

/// A procedure evaluated on every replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum McTest {
    Wcr,
    Nr,
    Im,
    Mnw,
    Cce(Grouping),
    Art(Grouping),
    Wild(Grouping),
}

impl McTest {
    /// The four tests for the clustering level.
    pub const LEVEL_TESTS: [McTest; 4] = [McTest::Nr, McTest::Wcr, McTest::Im, McTest::Mnw];

    fn seed_salt(self) -> u64 {
        let level = |g: Grouping| match g {
            Grouping::Cluster => 0,
            Grouping::Subcluster => 1,
            Grouping::Observation => 2,
        };
        match self {
            // WCR and NR share one sign group per replication
            McTest::Wcr | McTest::Nr => 1,
            McTest::Im => 2,
            McTest::Mnw => 3,
            McTest::Cce(g) => 10 + level(g),
            McTest::Art(g) => 20 + level(g),
            McTest::Wild(g) => 30 + level(g),
        }
    }
}

fn grouping_suffix(g: Grouping) -> &'static str {
    match g {
        Grouping::Cluster => "coarse",
        Grouping::Subcluster => "fine",
        Grouping::Observation => "obs",
    }
}

impl fmt::Display for McTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            McTest::Wcr => f.write_str("wcr"),
            McTest::Nr => f.write_str("nr"),
            McTest::Im => f.write_str("im"),
            McTest::Mnw => f.write_str("mnw"),
            McTest::Cce(g) => write!(f, "cce-{}", grouping_suffix(*g)),
            McTest::Art(g) => write!(f, "art-{}", grouping_suffix(*g)),
            McTest::Wild(g) => write!(f, "wild-{}", grouping_suffix(*g)),
        }
    }
}

impl FromStr for McTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let grouping = |suffix: &str| match suffix {
            "coarse" | "cluster" => Some(Grouping::Cluster),
            "fine" | "subcluster" => Some(Grouping::Subcluster),
            "obs" | "observation" => Some(Grouping::Observation),
            _ => None,
        };
        let parsed = match s.as_str() {
            "wcr" => Some(McTest::Wcr),
            "nr" => Some(McTest::Nr),
            "im" => Some(McTest::Im),
            "mnw" => Some(McTest::Mnw),
            other => other.split_once('-').and_then(|(head, tail)| {
                let g = grouping(tail)?;
                match head {
                    "cce" => Some(McTest::Cce(g)),
                    "art" => Some(McTest::Art(g)),
                    "wild" => Some(McTest::Wild(g)),
                    _ => None,
                }
            }),
        };
        parsed.ok_or_else(|| {
            Error::Config(format!(
                "unknown test `{s}`; expected wcr, nr, im, mnw or cce|art|wild-coarse|fine"
            ))
        })
    }
}

/// Parses a comma-separated test list.
pub fn parse_tests(list: &str) -> Result<Vec<McTest>> {
    let tests: Vec<McTest> = list
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if tests.is_empty() {
        return Err(Error::Config("the test list is empty".into()));
    }
    Ok(tests)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub design: Design,
    pub tests: Vec<McTest>,
    pub reps: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Worker threads; `0` lets the thread pool decide.
    pub jobs: usize,
    /// Sign-group draws for WCR and NR when `q > 10`.
    pub randomization_draws: usize,
    pub im_draws: usize,
    /// Bootstrap draws for MNW and the wild bootstrap.
    pub bootstrap_draws: usize,
    /// Hypothesized β for the β-inference tests; `None` uses the true value.
    pub beta_null: Option<f64>,
    pub cce_reference: CceReference,
}

impl McConfig {
    pub fn new(design: Design, tests: Vec<McTest>, reps: usize, seed: u64) -> Self {
        McConfig {
            design,
            tests,
            reps,
            alpha: 0.05,
            seed,
            jobs: 0,
            randomization_draws: DEFAULT_DRAWS,
            im_draws: IM_DEFAULT_DRAWS,
            bootstrap_draws: MNW_DEFAULT_DRAWS,
            beta_null: None,
            cce_reference: CceReference::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.design.validate()?;
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if self.tests.is_empty() {
            return Err(Error::Config("no tests requested".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    fn true_beta(&self) -> f64 {
        match &self.design {
            Design::Model1(c) => c.beta,
            Design::Model2(c) => c.beta[0],
            Design::AppendixB(c) => c.beta,
        }
    }
}

/// Outcome of one test on one replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RepOutcome {
    Ran { p_value: f64, reject: bool },
    Failed,
}

impl RepOutcome {
    pub fn p_value(self) -> Option<f64> {
        match self {
            RepOutcome::Ran { p_value, .. } => Some(p_value),
            RepOutcome::Failed => None,
        }
    }
}

/// Dataset seed of replication `rep`.
pub fn rep_seed(master: u64, rep: usize) -> u64 {
    derive_seed(master, rep as u64, 0)
}

/// Runs every configured test on replication `rep`, in `cfg.tests` order.
pub fn run_rep(cfg: &McConfig, rep: usize) -> Vec<RepOutcome> {
    let Ok(ds) = cfg.design.generate(rep_seed(cfg.seed, rep)) else {
        return vec![RepOutcome::Failed; cfg.tests.len()];
    };
    let layout = build_layout(&ds);
    let beta0 = cfg.beta_null.unwrap_or_else(|| cfg.true_beta());
    let test_seed = |t: McTest| derive_seed(cfg.seed, rep as u64, t.seed_salt());

    let mut scores = None;
    let mut group = None;
    cfg.tests
        .iter()
        .map(|&t| {
            let seed = test_seed(t);
            let res = match t {
                McTest::Wcr | McTest::Nr => {
                    let s = scores.get_or_insert_with(|| {
                        scores_for(&ds, &layout, PiMode::PerSubcluster).ok()
                    });
                    let g = group.get_or_insert_with(|| {
                        make_sign_group(layout.q(), cfg.randomization_draws, seed)
                    });
                    match s.as_ref() {
                        Some(s) if t == McTest::Wcr => {
                            wcr_from_scores(s, &layout, g, cfg.alpha, true, seed)
                                .map(|w| (w.p_value, w.decision.is_reject()))
                        }
                        Some(s) => nr_from_scores(s, &layout, g, cfg.alpha)
                            .map(|r| (r.p_value, r.rejects())),
                        None => Err(Error::Degenerate("regression stage failed".into())),
                    }
                }
                McTest::Im => im_test_layout(&ds, &layout, cfg.alpha, cfg.im_draws, seed)
                    .map(|r| (r.p_value, r.rejects())),
                McTest::Mnw => mnw_test_layout(&ds, &layout, cfg.alpha, cfg.bootstrap_draws, seed)
                    .map(|r| (r.p_value, r.rejects())),
                McTest::Cce(g) => {
                    cce_t_test_with(&ds, &layout, beta0, g, cfg.alpha, cfg.cce_reference)
                        .map(|r| (r.p_value, r.rejects()))
                }
                McTest::Art(g) => art_test_with(
                    &ds,
                    &layout,
                    beta0,
                    g,
                    cfg.alpha,
                    &ArtOptions {
                        draws: cfg.randomization_draws,
                        seed,
                    },
                )
                .map(|r| (r.p_value, r.rejects())),
                McTest::Wild(g) => wild_bootstrap_t_test_layout(
                    &ds,
                    &layout,
                    beta0,
                    g,
                    cfg.bootstrap_draws,
                    seed,
                    cfg.alpha,
                )
                .map(|r| (r.p_value, r.rejects())),
            };
            match res {
                Ok((p_value, reject)) => RepOutcome::Ran { p_value, reject },
                Err(_) => RepOutcome::Failed,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResultRow {
    pub model: String,
    pub r: usize,
    pub qk: usize,
    pub nj: usize,
    pub rho: f64,
    pub phi: f64,
    pub test: McTest,
    pub reps: usize,
    pub rejections: usize,
    /// Rejections over replications where the test ran.
    pub rate: f64,
    pub mc_se: f64,
    pub errors: usize,
    pub seed: u64,
    /// Seconds spent on the whole configuration (shared by its rows).
    pub wall_time: f64,
}

pub const CSV_HEADER: &str = "model,r,qk,nj,rho,phi,test,reps,rejections,rate,mc_se,errors,seed";

impl McResultRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{:.6},{:.6},{},{}",
            self.model,
            self.r,
            self.qk,
            self.nj,
            self.rho,
            self.phi,
            self.test,
            self.reps,
            self.rejections,
            self.rate,
            self.mc_se,
            self.errors,
            self.seed
        )
    }
}

pub fn write_csv<W: Write>(rows: &[McResultRow], header: bool, mut out: W) -> Result<()> {
    if header {
        writeln!(out, "{CSV_HEADER}")?;
    }
    for row in rows {
        writeln!(out, "{}", row.csv_line())?;
    }
    Ok(())
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Rejection rates of every configured test.
pub fn run_mc(cfg: &McConfig) -> Result<Vec<McResultRow>> {
    cfg.validate()?;
    let start = Instant::now();
    let k = cfg.tests.len();
    let (rejections, errors) = with_pool(cfg.jobs, || {
        (0..cfg.reps)
            .into_par_iter()
            .map(|rep| run_rep(cfg, rep))
            .fold(
                || (vec![0usize; k], vec![0usize; k]),
                |(mut rej, mut err), outcomes| {
                    for (i, o) in outcomes.into_iter().enumerate() {
                        match o {
                            RepOutcome::Ran { reject: true, .. } => rej[i] += 1,
                            RepOutcome::Ran { reject: false, .. } => {}
                            RepOutcome::Failed => err[i] += 1,
                        }
                    }
                    (rej, err)
                },
            )
            .reduce(
                || (vec![0usize; k], vec![0usize; k]),
                |(mut a, mut b), (c, d)| {
                    for i in 0..k {
                        a[i] += c[i];
                        b[i] += d[i];
                    }
                    (a, b)
                },
            )
    })?;
    let wall_time = start.elapsed().as_secs_f64();
    let (r, qk, nj) = cfg.design.dims();
    Ok(cfg
        .tests
        .iter()
        .enumerate()
        .map(|(i, &test)| {
            let valid = cfg.reps - errors[i];
            let rate = if valid == 0 {
                0.0
            } else {
                rejections[i] as f64 / valid as f64
            };
            let mc_se = if valid == 0 {
                0.0
            } else {
                (rate * (1.0 - rate) / valid as f64).sqrt()
            };
            McResultRow {
                model: cfg.design.name().to_string(),
                r,
                qk,
                nj,
                rho: cfg.design.rho(),
                phi: cfg.design.phi(),
                test,
                reps: cfg.reps,
                rejections: rejections[i],
                rate,
                mc_se,
                errors: errors[i],
                seed: cfg.seed,
                wall_time,
            }
        })
        .collect())
}

/// [`run_mc`] at every `ρ` in `grid`, with the same master seed throughout.
pub fn power_curve(cfg: &McConfig, rho_grid: &[f64]) -> Result<Vec<McResultRow>> {
    if rho_grid.is_empty() {
        return Err(Error::Config("the rho grid is empty".into()));
    }
    for &rho in rho_grid {
        cfg.design.with_rho(rho).validate()?;
    }
    let mut rows = Vec::new();
    for &rho in rho_grid {
        let point = McConfig {
            design: cfg.design.with_rho(rho),
            ..cfg.clone()
        };
        rows.extend(run_mc(&point)?);
    }
    Ok(rows)
}

/// `START:STOP:STEP`, inclusive of `STOP` up to rounding.
pub fn parse_rho_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || {
        Error::Config(format!(
            "cannot parse rho grid `{spec}`; expected START:STOP:STEP"
        ))
    };
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 {
        return Err(bad());
    }
    if stop < start {
        return Err(Error::Config(format!("rho grid `{spec}` is empty")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| {
            let v = start + step * i as f64;
            // trim float noise such as 0.30000000000000004
            (v * 1e9).round() / 1e9
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::Model1Config;

    #[test]
    fn test_names_round_trip() {
        for t in [
            McTest::Wcr,
            McTest::Nr,
            McTest::Im,
            McTest::Mnw,
            McTest::Cce(Grouping::Cluster),
            McTest::Art(Grouping::Subcluster),
            McTest::Wild(Grouping::Cluster),
        ] {
            assert_eq!(t.to_string().parse::<McTest>().unwrap(), t);
        }
        assert!("foo".parse::<McTest>().is_err());
        assert!(parse_tests(" , ").is_err());
        assert_eq!(
            parse_tests("nr,wcr").unwrap(),
            vec![McTest::Nr, McTest::Wcr]
        );
    }

    #[test]
    fn rho_grid_parsing() {
        assert_eq!(parse_rho_grid("0:2:0.25").unwrap().len(), 9);
        assert_eq!(parse_rho_grid("0:1:0.1").unwrap()[3], 0.3);
        assert_eq!(parse_rho_grid("0:0:1").unwrap(), vec![0.0]);
        assert!(parse_rho_grid("1:0:0.5").is_err());
        assert!(parse_rho_grid("0:1").is_err());
        assert!(parse_rho_grid("0:1:0").is_err());
    }

    #[test]
    fn single_rep_rate_is_zero_or_one() {
        let cfg = McConfig::new(
            Design::Model1(Model1Config::new(2, 3, 10, 0.0)),
            McTest::LEVEL_TESTS.to_vec(),
            1,
            3,
        );
        for row in run_mc(&cfg).unwrap() {
            assert!(row.rate == 0.0 || row.rate == 1.0);
        }
    }

    #[test]
    fn results_do_not_depend_on_jobs() {
        let mut cfg = McConfig::new(
            Design::Model1(Model1Config::new(3, 3, 10, 0.5)),
            McTest::LEVEL_TESTS.to_vec(),
            40,
            9,
        );
        cfg.jobs = 1;
        let a = run_mc(&cfg).unwrap();
        cfg.jobs = 4;
        let b = run_mc(&cfg).unwrap();
        let lines = |rows: &[McResultRow]| rows.iter().map(|r| r.csv_line()).collect::<Vec<_>>();
        assert_eq!(lines(&a), lines(&b));
    }

    #[test]
    fn power_curve_point_matches_run_mc() {
        let cfg = McConfig::new(
            Design::Model1(Model1Config::new(3, 3, 10, 0.0)),
            vec![McTest::Wcr, McTest::Nr],
            30,
            5,
        );
        let direct = run_mc(&cfg).unwrap();
        let curve = power_curve(&cfg, &[0.0, 1.0]).unwrap();
        assert_eq!(curve.len(), 4);
        assert_eq!(curve[0].csv_line(), direct[0].csv_line());
        assert_eq!(curve[1].csv_line(), direct[1].csv_line());
    }

    #[test]
    fn errors_are_counted() {
        // one sub-cluster per cluster and a single cluster: every level test fails
        let cfg = McConfig::new(
            Design::Model1(Model1Config::new(1, 1, 10, 0.0)),
            vec![McTest::Wcr, McTest::Im],
            5,
            1,
        );
        let rows = run_mc(&cfg).unwrap();
        assert!(rows.iter().all(|r| r.errors == 5 && r.rate == 0.0));
    }
}
