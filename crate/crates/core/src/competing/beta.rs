use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::competing::bootstrap::{rademacher, WildEngine};
use crate::competing::{Diagnostics, Method, TestResult};
use crate::data::{build_layout, ClusterLayout, Dataset};
use crate::error::{Error, Result};
use crate::linalg::{Qr, PIVOT_TOL};
use crate::randcore::{SignGroup, DEFAULT_DRAWS};
use crate::regression::{cce_sandwich, design_matrix, ols_fit, ols_fit_rows, Grouping};
use crate::rng::rng_from_seed;
use crate::wcr::Decision;

/// Reference distribution for the cluster-robust t statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CceReference {
    #[default]
    Normal,
    /// Student t with `G − 1` degrees of freedom.
    StudentT,
}

fn two_sided(t: f64, reference: CceReference, groups: usize) -> Result<f64> {
    let tail = match reference {
        CceReference::Normal => 1.0 - Normal::standard().cdf(t.abs()),
        CceReference::StudentT => {
            if groups < 2 {
                return Err(Error::Degenerate(
                    "a t reference needs at least two groups".into(),
                ));
            }
            let d = StudentsT::new(0.0, 1.0, (groups - 1) as f64)
                .map_err(|e| Error::Config(e.to_string()))?;
            1.0 - d.cdf(t.abs())
        }
    };
    Ok((2.0 * tail).clamp(0.0, 1.0))
}

fn critical_value(reference: CceReference, groups: usize, alpha: f64) -> f64 {
    let q = 1.0 - alpha / 2.0;
    match reference {
        CceReference::Normal => Normal::standard().inverse_cdf(q),
        CceReference::StudentT => StudentsT::new(0.0, 1.0, (groups.max(2) - 1) as f64)
            .expect("positive degrees of freedom")
            .inverse_cdf(q),
    }
}

/// Two-sided t-test of `β = beta_null` with the Liang–Zeger variance at
/// `grouping`.
pub fn cce_t_test_with(
    ds: &Dataset,
    layout: &ClusterLayout,
    beta_null: f64,
    grouping: Grouping,
    alpha: f64,
    reference: CceReference,
) -> Result<TestResult> {
    let fit = ols_fit(ds)?;
    let v = cce_sandwich(ds, layout, &fit, grouping)[(0, 0)];
    if v <= 0.0 {
        return Err(Error::Degenerate(
            "cluster-robust variance of β̂ is zero".into(),
        ));
    }
    let (_, g) = grouping.assign(layout);
    let t = (fit.beta_hat - beta_null) / v.sqrt();
    let p_value = two_sided(t, reference, g)?;
    Ok(TestResult {
        method: Method::Cce,
        statistic: t,
        p_value,
        decision: Decision::from_pvalue(p_value, alpha),
        alpha,
        diagnostics: Diagnostics {
            grouping: Some(grouping),
            groups: Some(g),
            critical_value: Some(critical_value(reference, g, alpha)),
            ..Diagnostics::default()
        },
    })
}

pub fn cce_t_test(
    ds: &Dataset,
    beta_null: f64,
    grouping: Grouping,
    alpha: f64,
) -> Result<TestResult> {
    cce_t_test_with(
        ds,
        &build_layout(ds),
        beta_null,
        grouping,
        alpha,
        CceReference::default(),
    )
}

/// Largest group count for which all `2^G` sign flips are enumerated.
pub const ART_FULL_ENUMERATION_MAX_G: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArtOptions {
    /// Flips drawn when `G` exceeds [`ART_FULL_ENUMERATION_MAX_G`].
    pub draws: usize,
    pub seed: u64,
}

impl Default for ArtOptions {
    fn default() -> Self {
        ArtOptions {
            draws: DEFAULT_DRAWS,
            seed: 0,
        }
    }
}

fn studentized_mean(v: &[f64]) -> f64 {
    let g = v.len() as f64;
    let mean = v.iter().sum::<f64>() / g;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (g - 1.0);
    if var <= 0.0 {
        return if mean == 0.0 { 0.0 } else { f64::INFINITY };
    }
    g.sqrt() * mean / var.sqrt()
}

/// Approximate randomization test over sign flips of group-level estimates,
/// without random tie-breaking.
pub fn art_test_with(
    ds: &Dataset,
    layout: &ClusterLayout,
    beta_null: f64,
    grouping: Grouping,
    alpha: f64,
    opts: &ArtOptions,
) -> Result<TestResult> {
    let (assign, g) = grouping.assign(layout);
    if g < 2 {
        return Err(Error::Degenerate("at least two groups are required".into()));
    }
    let mut rows = vec![Vec::new(); g];
    for (i, &a) in assign.iter().enumerate() {
        rows[a].push(i);
    }
    let estimates = rows
        .iter()
        .enumerate()
        .map(|(k, r)| {
            ols_fit_rows(ds, r).map(|f| f.beta_hat).map_err(|e| {
                Error::Infeasible(format!("β is not estimable within group {k} ({e})"))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let centered: Vec<f64> = estimates.iter().map(|b| b - beta_null).collect();
    let t = studentized_mean(&centered);

    // |t| is increasing in |Σ g_i δ_i| because Σ δ_i² is flip-invariant, so
    // the flips are ranked by the absolute signed sum.
    let abs_sum = |flip: &[i8]| -> f64 {
        centered
            .iter()
            .zip(flip)
            .map(|(d, &s)| d * s as f64)
            .sum::<f64>()
            .abs()
    };
    let group = if g <= ART_FULL_ENUMERATION_MAX_G {
        SignGroup::full(g)
    } else {
        SignGroup::stochastic(g, opts.draws.max(1), opts.seed)
    };
    let observed = abs_sum(group.flip(0));
    let scale: f64 = centered.iter().map(|d| d.abs()).sum();
    let tol = 1e-12 * scale;
    let hits = group
        .iter()
        .filter(|f| abs_sum(f) >= observed - tol)
        .count();
    let p_value = hits as f64 / group.len() as f64;
    Ok(TestResult {
        method: Method::Art,
        statistic: t.abs(),
        p_value,
        decision: Decision::from_pvalue(p_value, alpha),
        alpha,
        diagnostics: Diagnostics {
            group_estimates: Some(estimates),
            draws: Some(group.len()),
            grouping: Some(grouping),
            groups: Some(g),
            ..Diagnostics::default()
        },
    })
}

pub fn art_test(
    ds: &Dataset,
    beta_null: f64,
    grouping: Grouping,
    alpha: f64,
) -> Result<TestResult> {
    art_test_with(
        ds,
        &build_layout(ds),
        beta_null,
        grouping,
        alpha,
        &ArtOptions::default(),
    )
}

/// Residuals of `y − β₀x` on the controls.
fn restricted_residuals(ds: &Dataset, beta_null: f64) -> Result<Vec<f64>> {
    let yt: Vec<f64> = ds
        .y()
        .iter()
        .zip(ds.x())
        .map(|(y, x)| y - beta_null * x)
        .collect();
    if ds.d() == 0 {
        return Ok(yt);
    }
    let w = DMatrix::from_fn(ds.n(), ds.d(), |i, c| ds.controls()[c][i]);
    let qr = Qr::new(&w, false, PIVOT_TOL);
    if !qr.is_full_rank() {
        return Err(Error::Singular(
            "controls are rank deficient; drop collinear controls".into(),
        ));
    }
    let gamma = qr.solve(&yt);
    Ok((0..ds.n())
        .map(|i| yt[i] - (0..ds.d()).map(|c| w[(i, c)] * gamma[c]).sum::<f64>())
        .collect())
}

/// Wild cluster bootstrap-t with the null imposed on the residuals and
/// Rademacher weights at `grouping`.
#[allow(clippy::too_many_arguments)]
pub fn wild_bootstrap_t_test_layout(
    ds: &Dataset,
    layout: &ClusterLayout,
    beta_null: f64,
    grouping: Grouping,
    draws: usize,
    seed: u64,
    alpha: f64,
) -> Result<TestResult> {
    if draws == 0 {
        return Err(Error::Config(
            "at least one bootstrap draw is required".into(),
        ));
    }
    let fit = ols_fit(ds)?;
    let v = cce_sandwich(ds, layout, &fit, grouping)[(0, 0)];
    if v <= 0.0 {
        return Err(Error::Degenerate(
            "cluster-robust variance of β̂ is zero".into(),
        ));
    }
    let t = (fit.beta_hat - beta_null) / v.sqrt();

    let (assign, g) = grouping.assign(layout);
    let restricted = restricted_residuals(ds, beta_null)?;
    let m = design_matrix(ds, None);
    let engine = WildEngine::new(&m, &restricted, &assign, g, &fit.xtx_inverse);
    let mut rng = rng_from_seed(seed);
    let mut w = vec![0.0; g];
    let mut z = vec![0.0; g];
    let mut exceed = 0usize;
    for _ in 0..draws {
        rademacher(&mut rng, &mut w);
        // the restricted fit has β = β₀, so the refit shift is β̂* − β₀
        let shift = engine.draw(&w, &mut z);
        let var: f64 = z.iter().map(|v| v * v).sum();
        let t_star = if var > 0.0 { shift / var.sqrt() } else { 0.0 };
        if t_star.abs() >= t.abs() {
            exceed += 1;
        }
    }
    let p_value = (1 + exceed) as f64 / (draws + 1) as f64;
    Ok(TestResult {
        method: Method::Wild,
        statistic: t,
        p_value,
        decision: Decision::from_pvalue(p_value, alpha),
        alpha,
        diagnostics: Diagnostics {
            draws: Some(draws),
            grouping: Some(grouping),
            groups: Some(g),
            ..Diagnostics::default()
        },
    })
}

pub fn wild_bootstrap_t_test(
    ds: &Dataset,
    beta_null: f64,
    grouping: Grouping,
    draws: usize,
    seed: u64,
    alpha: f64,
) -> Result<TestResult> {
    wild_bootstrap_t_test_layout(
        ds,
        &build_layout(ds),
        beta_null,
        grouping,
        draws,
        seed,
        alpha,
    )
}
