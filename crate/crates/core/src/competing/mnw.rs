use crate::competing::bootstrap::{rademacher, WildEngine};
use crate::competing::{Diagnostics, Method, TestResult};
use crate::data::{build_layout, ClusterLayout, Dataset};
use crate::error::{Error, Result};
use crate::regression::{cce_sandwich, design_matrix, ols_fit, Grouping, RegressionFit};
use crate::rng::rng_from_seed;
use crate::wcr::Decision;

/// Bootstrap draws used by default.
pub const MNW_DEFAULT_DRAWS: usize = 399;

/// β-entry of the `coarse` sandwich minus that of the `fine` sandwich.
pub fn mnw_statistic(
    ds: &Dataset,
    layout: &ClusterLayout,
    fit: &RegressionFit,
    coarse: Grouping,
    fine: Grouping,
) -> f64 {
    let vc = cce_sandwich(ds, layout, fit, coarse);
    let vf = cce_sandwich(ds, layout, fit, fine);
    vc[(0, 0)] - vf[(0, 0)]
}

pub fn mnw_test_layout(
    ds: &Dataset,
    layout: &ClusterLayout,
    alpha: f64,
    draws: usize,
    seed: u64,
) -> Result<TestResult> {
    if layout.q() < 2 {
        return Err(Error::Degenerate(format!(
            "at least two sub-clusters are required, found {}",
            layout.q()
        )));
    }
    if draws == 0 {
        return Err(Error::Config(
            "at least one bootstrap draw is required".into(),
        ));
    }
    let fit = ols_fit(ds)?;
    let tau = mnw_statistic(ds, layout, &fit, Grouping::Cluster, Grouping::Subcluster);

    let m = design_matrix(ds, None);
    let engine = WildEngine::new(
        &m,
        &fit.residuals,
        layout.subcluster_of_obs(),
        layout.q(),
        &fit.xtx_inverse,
    );
    let mut rng = rng_from_seed(seed);
    let mut w = vec![0.0; engine.units()];
    let mut z = vec![0.0; engine.units()];
    let mut exceed = 0usize;
    for _ in 0..draws {
        rademacher(&mut rng, &mut w);
        engine.draw(&w, &mut z);
        let fine: f64 = z.iter().map(|v| v * v).sum();
        let coarse: f64 = layout
            .blocks()
            .iter()
            .map(|b| {
                let s: f64 = z[b.clone()].iter().sum();
                s * s
            })
            .sum();
        if (coarse - fine).abs() >= tau.abs() {
            exceed += 1;
        }
    }
    let p_value = (1 + exceed) as f64 / (draws + 1) as f64;
    Ok(TestResult {
        method: Method::Mnw,
        statistic: tau,
        p_value,
        decision: Decision::from_pvalue(p_value, alpha),
        alpha,
        diagnostics: Diagnostics {
            draws: Some(draws),
            ..Diagnostics::default()
        },
    })
}

/// Hausman-type comparison of the cluster-level and sub-cluster-level
/// sandwich variances of β̂, calibrated by a sub-cluster wild bootstrap.
pub fn mnw_test(ds: &Dataset, alpha: f64, draws: usize, seed: u64) -> Result<TestResult> {
    mnw_test_layout(ds, &build_layout(ds), alpha, draws, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(cluster_is_sub: bool) -> Dataset {
        let n = 40;
        let y: Vec<f64> = (0..n).map(|i| ((i * 17 % 13) as f64).sin() * 2.0).collect();
        let x: Vec<f64> = (0..n).map(|i| ((i * 7 % 5) as f64) - 2.0).collect();
        let sub: Vec<String> = (0..n).map(|i| format!("S{}", i / 5)).collect();
        let cl: Vec<String> = if cluster_is_sub {
            sub.clone()
        } else {
            (0..n).map(|i| format!("C{}", i / 20)).collect()
        };
        Dataset::new(y, x, vec![vec![1.0; n]], &cl, &sub).unwrap()
    }

    #[test]
    fn identical_partitions_give_zero_tau() {
        let ds = dataset(true);
        let res = mnw_test(&ds, 0.05, 99, 1).unwrap();
        assert_eq!(res.statistic, 0.0);
        assert_eq!(res.p_value, 1.0);
    }

    #[test]
    fn swapping_roles_negates_tau() {
        let ds = dataset(false);
        let layout = build_layout(&ds);
        let fit = ols_fit(&ds).unwrap();
        let a = mnw_statistic(&ds, &layout, &fit, Grouping::Cluster, Grouping::Subcluster);
        let b = mnw_statistic(&ds, &layout, &fit, Grouping::Subcluster, Grouping::Cluster);
        assert_ne!(a, 0.0);
        assert_eq!(a, -b);
    }

    #[test]
    fn pvalue_has_plus_one_convention() {
        let ds = dataset(false);
        let res = mnw_test(&ds, 0.05, 9, 4).unwrap();
        assert!(res.p_value >= 0.1 && res.p_value <= 1.0);
        assert_eq!((res.p_value * 10.0).round(), res.p_value * 10.0);
        assert!(matches!(mnw_test(&ds, 0.05, 0, 4), Err(Error::Config(_))));
    }
}
