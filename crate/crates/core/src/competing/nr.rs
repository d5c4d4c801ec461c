use crate::competing::{Diagnostics, Method, TestResult};
use crate::data::{build_layout, ClusterLayout, Dataset};
use crate::error::Result;
use crate::randcore::{
    make_sign_group, randomization_pvalue, test_statistic, SignGroup, SignVector,
};
use crate::regression::{PiMode, SubclusterScores};
use crate::wcr::{check_q, compute_ratios, scores_for, Decision};

/// Naive randomization test on the signs of `N_j` (λ = 0).
pub fn nr_from_scores(
    scores: &SubclusterScores,
    layout: &ClusterLayout,
    group: &SignGroup,
    alpha: f64,
) -> Result<TestResult> {
    check_q(layout)?;
    let zero = compute_ratios(scores)?.zero_set;
    let signs = SignVector::from_scores(&scores.numerator, &zero);
    let p_value = randomization_pvalue(&signs, layout, group);
    Ok(TestResult {
        method: Method::Nr,
        statistic: test_statistic(&signs, layout).value(),
        p_value,
        decision: Decision::from_pvalue(p_value, alpha),
        alpha,
        diagnostics: Diagnostics {
            draws: Some(group.len()),
            ..Diagnostics::default()
        },
    })
}

pub fn nr_test_layout(
    ds: &Dataset,
    layout: &ClusterLayout,
    alpha: f64,
    draws: usize,
    seed: u64,
) -> Result<TestResult> {
    check_q(layout)?;
    let scores = scores_for(ds, layout, PiMode::PerSubcluster)?;
    let group = make_sign_group(layout.q(), draws, seed);
    nr_from_scores(&scores, layout, &group, alpha)
}

pub fn nr_test(ds: &Dataset, alpha: f64, draws: usize, seed: u64) -> Result<TestResult> {
    nr_test_layout(ds, &build_layout(ds), alpha, draws, seed)
}
