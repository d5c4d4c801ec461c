use rand::Rng;
use rand_distr::StandardNormal;

use crate::competing::{Diagnostics, Method, TestResult};
use crate::data::{build_layout, ClusterLayout, Dataset};
use crate::error::{Error, Result};
use crate::regression::{design_matrix, group_scores, ols_fit_rows, sandwich_from_scores};
use crate::rng::rng_from_seed;
use crate::wcr::Decision;

/// Reference-distribution draws used by default.
pub const IM_DEFAULT_DRAWS: usize = 1000;

fn sample_variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|b| (b - mean) * (b - mean)).sum::<f64>() / (n - 1.0)
}

/// Cluster-by-cluster β̂_k and the within-cluster sub-cluster sandwich
/// variance of each.
fn cluster_estimates(ds: &Dataset, layout: &ClusterLayout) -> Result<(Vec<f64>, Vec<f64>)> {
    let sub = layout.subcluster_of_obs();
    let mut betas = Vec::with_capacity(layout.r());
    let mut omegas = Vec::with_capacity(layout.r());
    for k in 0..layout.r() {
        let rows = layout.cluster_members(k);
        let fit = ols_fit_rows(ds, &rows).map_err(|e| {
            Error::Infeasible(format!(
                "β is not estimable within cluster `{}` ({e})",
                layout.clusters()[k]
            ))
        })?;
        let start = layout.subclusters_of(k).start;
        let groups: Vec<usize> = rows.iter().map(|&i| sub[i] - start).collect();
        let m = design_matrix(ds, Some(&rows));
        let s = group_scores(&m, &fit.residuals, &groups, layout.q_k(k));
        let v = sandwich_from_scores(&fit.xtx_inverse, &s);
        betas.push(fit.beta_hat);
        omegas.push(v[(0, 0)].max(0.0));
    }
    Ok((betas, omegas))
}

pub fn im_test_layout(
    ds: &Dataset,
    layout: &ClusterLayout,
    alpha: f64,
    draws: usize,
    seed: u64,
) -> Result<TestResult> {
    if layout.r() < 2 {
        return Err(Error::Degenerate(
            "at least two clusters are required".into(),
        ));
    }
    if draws == 0 {
        return Err(Error::Config(
            "at least one reference draw is required".into(),
        ));
    }
    let (betas, omegas) = cluster_estimates(ds, layout)?;
    let v_hat = sample_variance(&betas);
    let sd: Vec<f64> = omegas.iter().map(|o| o.sqrt()).collect();

    let mut rng = rng_from_seed(seed);
    let mut w = vec![0.0; layout.r()];
    let mut reference: Vec<f64> = (0..draws)
        .map(|_| {
            for (wk, s) in w.iter_mut().zip(&sd) {
                let z: f64 = rng.sample(StandardNormal);
                *wk = s * z;
            }
            sample_variance(&w)
        })
        .collect();
    let p_value = reference.iter().filter(|&&v| v >= v_hat).count() as f64 / draws as f64;
    reference.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let idx = (((1.0 - alpha) * draws as f64).ceil() as usize).clamp(1, draws) - 1;
    let critical = reference[idx];
    let decision = if v_hat > critical {
        Decision::Reject
    } else {
        Decision::FailToReject
    };
    Ok(TestResult {
        method: Method::Im,
        statistic: v_hat,
        p_value,
        decision,
        alpha,
        diagnostics: Diagnostics {
            group_estimates: Some(betas),
            draws: Some(draws),
            critical_value: Some(critical),
            ..Diagnostics::default()
        },
    })
}

/// Test based on the dispersion of cluster-by-cluster estimates, with a
/// Gaussian reference distribution built from within-cluster sandwich
/// variances.
pub fn im_test(ds: &Dataset, alpha: f64, draws: usize, seed: u64) -> Result<TestResult> {
    im_test_layout(ds, &build_layout(ds), alpha, draws, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(r: usize, qk: usize, nj: usize) -> (Vec<String>, Vec<String>) {
        let mut c = Vec::new();
        let mut s = Vec::new();
        for k in 0..r {
            for j in 0..qk {
                for _ in 0..nj {
                    c.push(format!("K{k}"));
                    s.push(format!("K{k}-J{j}"));
                }
            }
        }
        (c, s)
    }

    #[test]
    fn identical_cluster_estimates_never_reject() {
        let (c, s) = labels(3, 2, 3);
        // y is the same pattern in every cluster, so every β̂_k agrees
        let pattern = [0.3, -1.0, 2.0, 0.1, 0.9, -0.4];
        let y: Vec<f64> = (0..18).map(|i| pattern[i % 6]).collect();
        let ds = Dataset::new(y, vec![1.0; 18], vec![], &c, &s).unwrap();
        let res = im_test(&ds, 0.05, 200, 3).unwrap();
        assert!(res.statistic.abs() < 1e-24);
        assert!(!res.rejects());
        assert!(res.p_value > 0.99);
    }

    #[test]
    fn rank_deficient_cluster_is_infeasible() {
        let (c, s) = labels(2, 2, 3);
        // x constant within cluster K0 alongside an intercept control
        let x: Vec<f64> = (0..12)
            .map(|i| if i < 6 { 1.0 } else { i as f64 })
            .collect();
        let y: Vec<f64> = (0..12).map(|i| (i * 7 % 5) as f64).collect();
        let ds = Dataset::new(y, x, vec![vec![1.0; 12]], &c, &s).unwrap();
        assert!(matches!(
            im_test(&ds, 0.05, 100, 1),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn relabeling_clusters_keeps_statistic() {
        let (c, s) = labels(3, 2, 4);
        let y: Vec<f64> = (0..24).map(|i| ((i * 37 % 11) as f64).sin()).collect();
        let ds = Dataset::new(y.clone(), vec![1.0; 24], vec![], &c, &s).unwrap();
        let renamed: Vec<String> = c
            .iter()
            .map(|l| format!("Z{}", 9 - l[1..].parse::<u32>().unwrap()))
            .collect();
        let sub: Vec<String> = s.iter().map(|l| format!("Z{l}")).collect();
        let ds2 = Dataset::new(y, vec![1.0; 24], vec![], &renamed, &sub).unwrap();
        let a = im_test(&ds, 0.05, 50, 1).unwrap();
        let b = im_test(&ds2, 0.05, 50, 1).unwrap();
        assert!((a.statistic - b.statistic).abs() < 1e-12);
    }
}
