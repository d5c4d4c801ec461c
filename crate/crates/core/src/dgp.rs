//! Data-generating processes for the simulation designs.
//!
//! * Model 1: intercept-only regression; within each sub-cluster an AR(1)
//!   error, plus a cluster-wide shock `ρ V_{t,k}` shared by all sub-clusters
//!   of the cluster at the same time index.
//! * Model 2: two regressors and the error all load on ten AR(1) factors
//!   per cluster, so `ρ` moves the regressors and the error together.
//! * The fixed design with four clusters of twelve sub-clusters used for
//!   coarse-versus-fine inference on β.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{width, Dataset, Factor};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Number of factors per cluster in Model 2.
pub const MODEL2_FACTORS: usize = 10;

/// Error-scale overrides `σ_{j,k}`, written as `cluster1=10,subcluster2=5`
/// (1-based). A `clusterK` entry scales every sub-cluster of cluster `K`; a
/// `subclusterJ` entry scales the `J`-th sub-cluster of every cluster. When
/// both apply the factors multiply.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SigmaSpec {
    pub cluster: Vec<(usize, f64)>,
    pub subcluster: Vec<(usize, f64)>,
}

impl SigmaSpec {
    pub fn is_default(&self) -> bool {
        self.cluster.is_empty() && self.subcluster.is_empty()
    }

    /// `σ` for sub-cluster `j` of cluster `k` (both 0-based).
    pub fn sigma(&self, j: usize, k: usize) -> f64 {
        let c: f64 = self
            .cluster
            .iter()
            .filter(|(i, _)| *i == k + 1)
            .map(|(_, s)| s)
            .product();
        let s: f64 = self
            .subcluster
            .iter()
            .filter(|(i, _)| *i == j + 1)
            .map(|(_, s)| s)
            .product();
        c * s
    }

    fn validate(&self, r: usize, q_k: usize) -> Result<()> {
        for &(k, _) in &self.cluster {
            if k == 0 || k > r {
                return Err(Error::Config(format!(
                    "sigma override cluster{k} is outside 1..={r}"
                )));
            }
        }
        for &(j, _) in &self.subcluster {
            if j == 0 || j > q_k {
                return Err(Error::Config(format!(
                    "sigma override subcluster{j} is outside 1..={q_k}"
                )));
            }
        }
        Ok(())
    }
}

impl FromStr for SigmaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut spec = SigmaSpec::default();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let bad = || Error::Config(format!("cannot parse sigma override `{item}`"));
            let (key, value) = item.split_once('=').ok_or_else(bad)?;
            let value: f64 = value.trim().parse().map_err(|_| bad())?;
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!("sigma in `{item}` must be positive")));
            }
            let key = key.trim();
            if let Some(idx) = key.strip_prefix("subcluster") {
                spec.subcluster
                    .push((idx.parse().map_err(|_| bad())?, value));
            } else if let Some(idx) = key.strip_prefix("cluster") {
                spec.cluster.push((idx.parse().map_err(|_| bad())?, value));
            } else {
                return Err(bad());
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for SigmaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .cluster
            .iter()
            .map(|(k, s)| format!("cluster{k}={s}"))
            .chain(
                self.subcluster
                    .iter()
                    .map(|(j, s)| format!("subcluster{j}={s}")),
            )
            .collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model1Config {
    pub r: usize,
    pub q_k: usize,
    pub n_j: usize,
    pub rho: f64,
    pub phi: f64,
    pub sigma: SigmaSpec,
    pub beta: f64,
    /// Multiply the AR term by `1 − φ²` so that it has unit variance.
    pub unit_variance_normalization: bool,
}

impl Model1Config {
    pub fn new(r: usize, q_k: usize, n_j: usize, rho: f64) -> Self {
        Model1Config {
            r,
            q_k,
            n_j,
            rho,
            phi: 0.25,
            sigma: SigmaSpec::default(),
            beta: 1.0,
            unit_variance_normalization: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_counts(self.r, self.q_k, self.n_j)?;
        check_phi(self.phi)?;
        if !(self.rho.is_finite() && self.rho >= 0.0) {
            return Err(Error::Config(format!(
                "rho must be nonnegative, got {}",
                self.rho
            )));
        }
        self.sigma.validate(self.r, self.q_k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model2Config {
    pub r: usize,
    pub q_k: usize,
    pub n_j: usize,
    pub rho: f64,
    pub phi: f64,
    pub beta: [f64; 2],
}

impl Model2Config {
    pub fn new(r: usize, q_k: usize, n_j: usize, rho: f64) -> Self {
        Model2Config {
            r,
            q_k,
            n_j,
            rho,
            phi: 0.5,
            beta: [1.0, 1.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_counts(self.r, self.q_k, self.n_j)?;
        check_phi(self.phi)?;
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::Config(format!(
                "rho must lie in [0, 1] for model 2, got {}",
                self.rho
            )));
        }
        let m = self.q_k * self.n_j;
        if m < MODEL2_FACTORS {
            return Err(Error::Config(format!(
                "model 2 needs at least {MODEL2_FACTORS} observations per cluster, got {m}"
            )));
        }
        Ok(())
    }
}

/// Four clusters of twelve sub-clusters of 100 observations, no cluster
/// shock, AR(1) errors started from `U_1 ~ N(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixBConfig {
    pub r: usize,
    pub q_k: usize,
    pub n_j: usize,
    pub phi: f64,
    pub beta: f64,
}

impl Default for AppendixBConfig {
    fn default() -> Self {
        AppendixBConfig {
            r: 4,
            q_k: 12,
            n_j: 100,
            phi: 0.25,
            beta: 1.0,
        }
    }
}

impl AppendixBConfig {
    pub fn validate(&self) -> Result<()> {
        check_counts(self.r, self.q_k, self.n_j)?;
        check_phi(self.phi)
    }
}

fn check_counts(r: usize, q_k: usize, n_j: usize) -> Result<()> {
    if r == 0 || q_k == 0 || n_j == 0 {
        return Err(Error::Config("r, q_k and n_j must all be positive".into()));
    }
    Ok(())
}

fn check_phi(phi: f64) -> Result<()> {
    if !(phi.is_finite() && phi.abs() < 1.0) {
        return Err(Error::Config(format!("phi must lie in (-1, 1), got {phi}")));
    }
    Ok(())
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Factors for a balanced design with rows ordered cluster, sub-cluster,
/// then time; labels `K01` and `K01-J01`.
fn balanced_factors(r: usize, q_k: usize, n_j: usize) -> (Factor, Factor) {
    let kw = width(r);
    let jw = width(q_k);
    let clusters: Vec<String> = (1..=r).map(|k| format!("K{k:0kw$}")).collect();
    let subs: Vec<String> = (1..=r)
        .flat_map(|k| (1..=q_k).map(move |j| format!("K{k:0kw$}-J{j:0jw$}")))
        .collect();
    let n = r * q_k * n_j;
    let kc: Vec<u32> = (0..n).map(|i| (i / (q_k * n_j)) as u32).collect();
    let jc: Vec<u32> = (0..n).map(|i| (i / n_j) as u32).collect();
    (
        Factor::from_codes(clusters, kc).expect("codes in range"),
        Factor::from_codes(subs, jc).expect("codes in range"),
    )
}

/// One AR(1) path of length `n` with `U_1 ~ N(0, init_var)`.
fn ar1_path(rng: &mut ChaCha8Rng, n: usize, phi: f64, init_var: f64, out: &mut Vec<f64>) {
    let mut u = init_var.sqrt() * normal(rng);
    for t in 0..n {
        if t > 0 {
            u = phi * u + normal(rng);
        }
        out.push(u);
    }
}

pub fn gen_model1(cfg: &Model1Config, seed: u64) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = rng_from_seed(seed);
    let s2 = 1.0 - cfg.phi * cfg.phi;
    let ar_scale = if cfg.unit_variance_normalization {
        s2.sqrt()
    } else {
        1.0 / s2.sqrt()
    };
    let n = cfg.r * cfg.q_k * cfg.n_j;
    let mut y = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(cfg.n_j);
    for k in 0..cfg.r {
        let v: Vec<f64> = (0..cfg.n_j).map(|_| normal(&mut rng)).collect();
        for j in 0..cfg.q_k {
            let sigma = cfg.sigma.sigma(j, k);
            u.clear();
            ar1_path(&mut rng, cfg.n_j, cfg.phi, 1.0 / s2, &mut u);
            for t in 0..cfg.n_j {
                y.push(cfg.beta + sigma * (cfg.rho * v[t] + ar_scale * u[t]));
            }
        }
    }
    let (kf, jf) = balanced_factors(cfg.r, cfg.q_k, cfg.n_j);
    Dataset::from_factors(y, vec![1.0; n], vec![], kf, jf)
}

/// Factor-loaded draws for one cluster, in factor-block order.
fn factor_variable(rng: &mut ChaCha8Rng, m: usize, rho: f64, phi: f64) -> Vec<f64> {
    let mut xi = Vec::with_capacity(MODEL2_FACTORS);
    let mut prev = normal(rng);
    xi.push(prev);
    let innov = (1.0 - phi * phi).sqrt();
    for _ in 1..MODEL2_FACTORS {
        prev = phi * prev + innov * normal(rng);
        xi.push(prev);
    }
    let idio = (1.0 - rho * rho).max(0.0).sqrt();
    (0..m)
        .map(|i| rho * xi[model2_loading(i + 1, m) - 1] + idio * normal(rng))
        .collect()
}

/// Factor (1-based) loaded by observation `i` (1-based) of a cluster of size `m`.
pub fn model2_loading(i: usize, m: usize) -> usize {
    (i - 1) * MODEL2_FACTORS / m + 1
}

pub fn gen_model2(cfg: &Model2Config, seed: u64) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = rng_from_seed(seed);
    let m = cfg.q_k * cfg.n_j;
    let n = cfg.r * m;
    let mut y = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for _ in 0..cfg.r {
        let xk = factor_variable(&mut rng, m, cfg.rho, cfg.phi);
        let wk = factor_variable(&mut rng, m, cfg.rho, cfg.phi);
        let uk = factor_variable(&mut rng, m, cfg.rho, cfg.phi);
        // deal block-ordered observations round-robin into sub-clusters
        for j in 0..cfg.q_k {
            for i in (j..m).step_by(cfg.q_k) {
                x.push(xk[i]);
                w.push(wk[i]);
                y.push(cfg.beta[0] * xk[i] + cfg.beta[1] * wk[i] + uk[i]);
            }
        }
    }
    let (kf, jf) = balanced_factors(cfg.r, cfg.q_k, cfg.n_j);
    Dataset::from_factors(y, x, vec![w], kf, jf)
}

pub fn gen_appendix_b_with(cfg: &AppendixBConfig, seed: u64) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = rng_from_seed(seed);
    let scale = 1.0 / (1.0 - cfg.phi * cfg.phi).sqrt();
    let n = cfg.r * cfg.q_k * cfg.n_j;
    let mut y = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(cfg.n_j);
    for _ in 0..cfg.r * cfg.q_k {
        u.clear();
        ar1_path(&mut rng, cfg.n_j, cfg.phi, 1.0, &mut u);
        y.extend(u.iter().map(|e| cfg.beta + scale * e));
    }
    let (kf, jf) = balanced_factors(cfg.r, cfg.q_k, cfg.n_j);
    Dataset::from_factors(y, vec![1.0; n], vec![], kf, jf)
}

pub fn gen_appendix_b(seed: u64) -> Result<Dataset> {
    gen_appendix_b_with(&AppendixBConfig::default(), seed)
}

/// Any of the three designs, for the Monte Carlo harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Design {
    Model1(Model1Config),
    Model2(Model2Config),
    AppendixB(AppendixBConfig),
}

impl Design {
    pub fn generate(&self, seed: u64) -> Result<Dataset> {
        match self {
            Design::Model1(c) => gen_model1(c, seed),
            Design::Model2(c) => gen_model2(c, seed),
            Design::AppendixB(c) => gen_appendix_b_with(c, seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Design::Model1(c) => c.validate(),
            Design::Model2(c) => c.validate(),
            Design::AppendixB(c) => c.validate(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Design::Model1(_) => "1",
            Design::Model2(_) => "2",
            Design::AppendixB(_) => "appendixB",
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        match self {
            Design::Model1(c) => (c.r, c.q_k, c.n_j),
            Design::Model2(c) => (c.r, c.q_k, c.n_j),
            Design::AppendixB(c) => (c.r, c.q_k, c.n_j),
        }
    }

    /// Cluster-shock scale; the fixed design has none.
    pub fn rho(&self) -> f64 {
        match self {
            Design::Model1(c) => c.rho,
            Design::Model2(c) => c.rho,
            Design::AppendixB(_) => 0.0,
        }
    }

    pub fn phi(&self) -> f64 {
        match self {
            Design::Model1(c) => c.phi,
            Design::Model2(c) => c.phi,
            Design::AppendixB(c) => c.phi,
        }
    }

    /// Copy with a different `ρ` (ignored by the fixed design).
    pub fn with_rho(&self, rho: f64) -> Self {
        let mut d = self.clone();
        match &mut d {
            Design::Model1(c) => c.rho = rho,
            Design::Model2(c) => c.rho = rho,
            Design::AppendixB(_) => {}
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::build_layout;

    fn mean_var(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        (
            m,
            v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (n - 1.0),
        )
    }

    #[test]
    fn sigma_spec_round_trip() {
        let s: SigmaSpec = "cluster1=10, subcluster2=5".parse().unwrap();
        assert_eq!(s.cluster, vec![(1, 10.0)]);
        assert_eq!(s.subcluster, vec![(2, 5.0)]);
        assert_eq!(s.sigma(0, 0), 10.0);
        assert_eq!(s.sigma(1, 0), 50.0);
        assert_eq!(s.sigma(1, 1), 5.0);
        assert_eq!(s.sigma(0, 1), 1.0);
        assert_eq!(s.to_string().parse::<SigmaSpec>().unwrap(), s);
        assert!("cluster=1".parse::<SigmaSpec>().is_err());
        assert!("cluster1=-2".parse::<SigmaSpec>().is_err());
        assert!("block1=2".parse::<SigmaSpec>().is_err());
    }

    #[test]
    fn model1_layout_and_labels() {
        let ds = gen_model1(&Model1Config::new(4, 4, 25, 0.0), 1).unwrap();
        let l = build_layout(&ds);
        assert_eq!((l.r(), l.q(), l.n()), (4, 16, 400));
        assert_eq!(l.clusters()[0], "K01");
        assert_eq!(l.subclusters()[5], "K02-J02");
        assert_eq!(l.members_of(5)[0], 125);
    }

    #[test]
    fn model1_variance_matches_recursion() {
        // ρ = 0, φ = 0: Y − β is iid N(0, 1)
        let mut cfg = Model1Config::new(10, 10, 1000, 0.0);
        cfg.phi = 0.0;
        let ds = gen_model1(&cfg, 2).unwrap();
        let e: Vec<f64> = ds.y().iter().map(|y| y - 1.0).collect();
        assert!((mean_var(&e).1 - 1.0).abs() < 0.02);
        // φ = 0.25: stationary variance of U is 1/(1−φ²), scaled by 1/(1−φ²)
        let cfg = Model1Config::new(10, 10, 1000, 0.0);
        let ds = gen_model1(&cfg, 3).unwrap();
        let e: Vec<f64> = ds.y().iter().map(|y| y - 1.0).collect();
        let target = 1.0 / (1.0 - 0.0625f64).powi(2);
        assert!((mean_var(&e).1 / target - 1.0).abs() < 0.02);
    }

    #[test]
    fn model1_unit_variance_flag() {
        let mut cfg = Model1Config::new(10, 10, 1000, 0.0);
        cfg.unit_variance_normalization = true;
        let ds = gen_model1(&cfg, 4).unwrap();
        let e: Vec<f64> = ds.y().iter().map(|y| y - 1.0).collect();
        assert!((mean_var(&e).1 - 1.0).abs() < 0.02);
    }

    #[test]
    fn model1_lag_one_autocorrelation() {
        let ds = gen_model1(&Model1Config::new(1, 1, 10_000, 0.0), 5).unwrap();
        let e: Vec<f64> = ds.y().iter().map(|y| y - 1.0).collect();
        let (m, v) = mean_var(&e);
        let c: f64 =
            e.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum::<f64>() / (e.len() - 1) as f64;
        // s.e. of the sample autocorrelation is about 1/√n = 0.01
        assert!((c / v - 0.25).abs() < 0.03);
    }

    #[test]
    fn model1_cross_subcluster_covariance() {
        // same cluster, different sub-clusters, same t: covariance ρ²σ²
        let cfg = Model1Config::new(4000, 2, 5, 0.5);
        let ds = gen_model1(&cfg, 6).unwrap();
        let y = ds.y();
        let mut prod = 0.0;
        let mut cross = 0.0;
        let count = (cfg.r * cfg.n_j) as f64;
        for k in 0..cfg.r {
            for t in 0..cfg.n_j {
                let a = y[k * 10 + t] - 1.0;
                let b = y[k * 10 + 5 + t] - 1.0;
                prod += a * b;
                // different clusters: covariance 0
                let c = y[((k + 1) % cfg.r) * 10 + 5 + t] - 1.0;
                cross += a * c;
            }
        }
        // per-term variance is about 1.4, so s.e. ≈ 1.2/√20000 ≈ 0.008
        assert!((prod / count - 0.25).abs() < 0.03, "{}", prod / count);
        assert!((cross / count).abs() < 0.03);
    }

    #[test]
    fn model1_sigma_override_scales_cluster() {
        let mut cfg = Model1Config::new(2, 2, 3, 0.5);
        let base = gen_model1(&cfg, 7).unwrap();
        cfg.sigma = "cluster1=10".parse().unwrap();
        let scaled = gen_model1(&cfg, 7).unwrap();
        for i in 0..12 {
            let f = if i < 6 { 10.0 } else { 1.0 };
            assert!(((scaled.y()[i] - 1.0) - f * (base.y()[i] - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn model2_loading_formula() {
        assert_eq!(model2_loading(1, 50), 1);
        assert_eq!(model2_loading(5, 50), 1);
        assert_eq!(model2_loading(6, 50), 2);
        assert_eq!(model2_loading(50, 50), 10);
    }

    #[test]
    fn model2_rejects_bad_configs() {
        assert!(gen_model2(&Model2Config::new(2, 2, 4, 0.5), 1).is_err());
        assert!(gen_model2(&Model2Config::new(2, 2, 5, 1.2), 1).is_err());
        assert!(gen_model2(&Model2Config::new(2, 2, 5, 1.0), 1).is_ok());
    }

    #[test]
    fn model2_unit_marginals() {
        for rho in [0.0, 0.5, 1.0] {
            // the error is y − x − w; pool 10⁵ draws
            let ds = gen_model2(&Model2Config::new(1000, 10, 10, rho), 8).unwrap();
            let u: Vec<f64> = (0..ds.n())
                .map(|i| ds.y()[i] - ds.x()[i] - ds.controls()[0][i])
                .collect();
            let (m, v) = mean_var(&u);
            // factor draws are shared by blocks of ten observations
            assert!(m.abs() < 0.05);
            assert!((v - 1.0).abs() < 0.05, "rho {rho}: {v}");
            let (_, vx) = mean_var(ds.x());
            assert!((vx - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn model2_rho_zero_has_no_factor_term() {
        let ds = gen_model2(&Model2Config::new(50, 10, 100, 0.0), 9).unwrap();
        let u: Vec<f64> = (0..ds.n())
            .map(|i| ds.y()[i] - ds.x()[i] - ds.controls()[0][i])
            .collect();
        let (_, v) = mean_var(&u);
        assert!((v - 1.0).abs() < 0.02);
    }

    #[test]
    fn model2_subclusters_share_blocks_equally() {
        // with ρ = 1 there is no idiosyncratic term, so every value is a factor
        let ds = gen_model2(&Model2Config::new(1, 12, 100, 1.0), 10).unwrap();
        let l = build_layout(&ds);
        let mut distinct: Vec<f64> = ds.x().to_vec();
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        distinct.dedup();
        assert_eq!(distinct.len(), MODEL2_FACTORS);
        for j in 0..l.q() {
            for f in &distinct {
                let c = l.members_of(j).iter().filter(|&&i| ds.x()[i] == *f).count();
                assert_eq!(c, 10);
            }
        }
    }

    #[test]
    fn appendix_b_layout_and_independence() {
        let ds = gen_appendix_b(11).unwrap();
        let l = build_layout(&ds);
        assert_eq!((l.r(), l.q(), l.n()), (4, 48, 4800));
        // correlation between sub-cluster means across sub-clusters ≈ 0
        let mut a = Vec::new();
        let mut b = Vec::new();
        for rep in 0..2000 {
            let ds = gen_appendix_b_with(
                &AppendixBConfig {
                    r: 1,
                    q_k: 2,
                    n_j: 20,
                    ..AppendixBConfig::default()
                },
                1000 + rep,
            )
            .unwrap();
            a.push(ds.y()[..20].iter().sum::<f64>());
            b.push(ds.y()[20..].iter().sum::<f64>());
        }
        let (ma, va) = mean_var(&a);
        let (mb, vb) = mean_var(&b);
        let cov: f64 = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - ma) * (y - mb))
            .sum::<f64>()
            / 1999.0;
        assert!((cov / (va * vb).sqrt()).abs() < 0.07);
    }

    #[test]
    fn appendix_b_without_autocorrelation_is_iid_unit() {
        let cfg = AppendixBConfig {
            phi: 0.0,
            ..AppendixBConfig::default()
        };
        let ds = gen_appendix_b_with(&cfg, 12).unwrap();
        let e: Vec<f64> = ds.y().iter().map(|y| y - 1.0).collect();
        let (_, v) = mean_var(&e);
        assert!((v - 1.0).abs() < 0.05);
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = Model1Config::new(3, 3, 10, 0.7);
        assert_eq!(gen_model1(&cfg, 5).unwrap(), gen_model1(&cfg, 5).unwrap());
        assert_ne!(gen_model1(&cfg, 5).unwrap(), gen_model1(&cfg, 6).unwrap());
    }
}
