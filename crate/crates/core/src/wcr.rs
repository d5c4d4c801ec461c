//! The worst-case randomization test.
//!
//! For scalar β the nuisance shift λ enters every sub-cluster score as
//! `N_j + λ D_j`, so the sign of sub-cluster `j` only depends on whether
//! `R_j = N_j / D_j` clears the threshold `−λ`. Sweeping λ over the real line
//! therefore visits at most one sign pattern per distinct value of `R`: sort
//! the ratios in descending order and mark the top `m` entries positive. The
//! test takes the largest randomization p-value over those patterns, after
//! discarding cutoffs that lie outside the window `[R⁻, R⁺]` spanned by the
//! per-cluster conservative medians.

use serde::{Deserialize, Serialize};

use crate::data::{build_layout, ClusterLayout, Dataset};
use crate::error::{Error, Result};
use crate::randcore::{
    make_sign_group, pvalue_blocks, test_statistic, GroupMode, SignGroup, SignVector, DEFAULT_DRAWS,
};
use crate::regression::{compute_score_components, estimate_pi, ols_fit, PiMode, SubclusterScores};

/// `R_j = N_j / D_j`, with sub-clusters where `D_j = 0` flagged instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    /// Zero for flagged sub-clusters; the flag, not the value, is authoritative.
    pub ratios: Vec<f64>,
    pub zero_set: Vec<bool>,
}

impl Ratios {
    fn active(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.ratios.len()).filter(move |&j| !self.zero_set[j])
    }

    /// Active sub-clusters sorted by descending ratio (ties by index).
    pub fn descending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = self.active().collect();
        order.sort_by(|&a, &b| {
            self.ratios[b]
                .partial_cmp(&self.ratios[a])
                .expect("ratios are finite")
                .then(a.cmp(&b))
        });
        order
    }
}

pub fn compute_ratios(scores: &SubclusterScores) -> Result<Ratios> {
    let zero_set: Vec<bool> = scores.denominator.iter().map(|&d| d <= 0.0).collect();
    if zero_set.iter().all(|&z| z) {
        return Err(Error::Degenerate(
            "the residualized regressor is zero in every sub-cluster".into(),
        ));
    }
    let ratios = scores
        .numerator
        .iter()
        .zip(&scores.denominator)
        .zip(&zero_set)
        .map(|((n, d), &z)| if z { 0.0 } else { n / d })
        .collect();
    Ok(Ratios { ratios, zero_set })
}

/// Upper and lower conservative medians of one cluster's ratios: the
/// smallest value that is at least a strict majority of the values, and the
/// largest value that is at most a strict majority.
pub fn cluster_medians(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("ratios are finite"));
    let m = v.len();
    Some((v[m / 2], v[(m - 1) / 2]))
}

/// `(R⁺, R⁻) = (max_k R⁺_k, min_k R⁻_k)` over clusters with at least one
/// active sub-cluster.
pub fn conservative_medians(ratios: &Ratios, layout: &ClusterLayout) -> Result<(f64, f64)> {
    let mut plus = f64::NEG_INFINITY;
    let mut minus = f64::INFINITY;
    for block in layout.blocks() {
        let vals: Vec<f64> = block
            .clone()
            .filter(|&j| !ratios.zero_set[j])
            .map(|j| ratios.ratios[j])
            .collect();
        if let Some((hi, lo)) = cluster_medians(&vals) {
            plus = plus.max(hi);
            minus = minus.min(lo);
        }
    }
    if plus == f64::NEG_INFINITY {
        return Err(Error::Degenerate(
            "no sub-cluster has a usable ratio".into(),
        ));
    }
    Ok((plus, minus))
}

/// One sign pattern reachable by some λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// Number of active sub-clusters marked positive.
    pub cutoff: usize,
    /// Smallest ratio on the positive side (`−λ`); `+∞` when `cutoff == 0`.
    pub threshold: f64,
    pub signs: SignVector,
}

/// Distinct-value cutoffs `m ∈ {0, …, q̃}` (a cutoff never splits tied ratios).
fn boundaries(ratios: &Ratios, order: &[usize]) -> Vec<usize> {
    let qt = order.len();
    let mut out = vec![0];
    for m in 1..=qt {
        if m == qt || ratios.ratios[order[m - 1]] > ratios.ratios[order[m]] {
            out.push(m);
        }
    }
    out
}

fn candidate_at(ratios: &Ratios, order: &[usize], m: usize) -> Candidate {
    let mut signs = vec![0i8; ratios.ratios.len()];
    for (pos, &j) in order.iter().enumerate() {
        signs[j] = if pos < m { 1 } else { -1 };
    }
    Candidate {
        cutoff: m,
        threshold: if m == 0 {
            f64::INFINITY
        } else {
            ratios.ratios[order[m - 1]]
        },
        signs: SignVector(signs),
    }
}

/// Cutoffs whose threshold lies in `[R⁻, R⁺]`.
///
/// When `R⁺` itself is a tied value, the cutoff just above it is added too:
/// with ties the pattern at `R⁺` puts the whole tie group on the positive
/// side, which can balance a cluster that the next cutoff leaves unbalanced.
pub fn candidate_sign_vectors(
    ratios: &Ratios,
    r_plus: f64,
    r_minus: f64,
    _layout: &ClusterLayout,
) -> Vec<Candidate> {
    let order = ratios.descending_order();
    let bounds = boundaries(ratios, &order);
    let mut cutoffs: Vec<usize> = bounds
        .iter()
        .copied()
        .filter(|&m| m > 0)
        .filter(|&m| {
            let t = ratios.ratios[order[m - 1]];
            r_minus <= t && t <= r_plus
        })
        .collect();

    let tied_at_plus = order
        .iter()
        .filter(|&&j| ratios.ratios[j] == r_plus)
        .count()
        > 1;
    if tied_at_plus {
        if let Some(&m) = bounds
            .iter()
            .rfind(|&&m| m > 0 && ratios.ratios[order[m - 1]] > r_plus)
        {
            cutoffs.push(m);
        }
    }
    cutoffs.sort_unstable();
    cutoffs.dedup();
    cutoffs
        .into_iter()
        .map(|m| candidate_at(ratios, &order, m))
        .collect()
}

/// Randomization p-values of the patterns "top `m` positive, rest negative"
/// for every `m` in `cutoffs` (ascending), sharing one pass over the group.
///
/// Moving from one cutoff to the next flips a contiguous run of sorted
/// positions from − to +, so each flip costs `O(q)` for all cutoffs together.
fn cutoff_pvalues(
    order: &[usize],
    cutoffs: &[usize],
    layout: &ClusterLayout,
    group: &SignGroup,
) -> Vec<f64> {
    debug_assert!(cutoffs.windows(2).all(|w| w[0] < w[1]));
    let r = layout.r();
    let cluster: Vec<usize> = order.iter().map(|&j| layout.cluster_of(j)).collect();

    let sums_for = |flip: &[i8], m: usize, sums: &mut [i64]| {
        sums.iter_mut().for_each(|s| *s = 0);
        for (pos, &j) in order.iter().enumerate() {
            let s = if pos < m { 1 } else { -1 };
            sums[cluster[pos]] += (s * flip[j]) as i64;
        }
    };
    let total = |sums: &[i64]| sums.iter().map(|s| s.abs()).sum::<i64>();

    let identity = vec![1i8; group.q()];
    let mut sums = vec![0i64; r];
    let mut observed = Vec::with_capacity(cutoffs.len());
    for &m in cutoffs {
        sums_for(&identity, m, &mut sums);
        observed.push(total(&sums));
    }

    let mut hits = vec![0usize; cutoffs.len()];
    for flip in group.iter() {
        let first = cutoffs[0];
        sums_for(flip, first, &mut sums);
        let mut t = total(&sums);
        let mut prev = first;
        for (c, &m) in cutoffs.iter().enumerate() {
            for pos in prev..m {
                let k = cluster[pos];
                let old = sums[k].abs();
                sums[k] += 2 * flip[order[pos]] as i64;
                t += sums[k].abs() - old;
            }
            prev = m;
            if t >= observed[c] {
                hits[c] += 1;
            }
        }
    }
    let total_flips = group.len() as f64;
    hits.into_iter().map(|h| h as f64 / total_flips).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Reject,
    FailToReject,
}

impl Decision {
    pub fn from_pvalue(p: f64, alpha: f64) -> Self {
        if p <= alpha {
            Decision::Reject
        } else {
            Decision::FailToReject
        }
    }

    pub fn is_reject(self) -> bool {
        self == Decision::Reject
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffPValue {
    pub cutoff: usize,
    pub threshold: f64,
    pub signs: SignVector,
    pub p_value: f64,
    /// Whether this is the λ = 0 (naive) pattern.
    pub naive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WcrResult {
    /// Imbalance statistic `T` of the worst-case pattern.
    pub statistic: f64,
    pub p_value: f64,
    pub decision: Decision,
    pub alpha: f64,
    pub per_cutoff: Vec<CutoffPValue>,
    pub ratios: Vec<f64>,
    pub zero_set: Vec<bool>,
    pub r_plus: f64,
    pub r_minus: f64,
    pub group_mode: GroupMode,
    /// Number of flips in the randomization group.
    pub group_size: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WcrOptions {
    pub alpha: f64,
    /// Draws for the stochastic group (used when `q > 10`).
    pub draws: usize,
    pub seed: u64,
    pub pi_mode: PiMode,
    /// Restrict cutoffs to the `[R⁻, R⁺]` window.
    pub prune: bool,
}

impl Default for WcrOptions {
    fn default() -> Self {
        WcrOptions {
            alpha: 0.05,
            draws: DEFAULT_DRAWS,
            seed: 0,
            pi_mode: PiMode::PerSubcluster,
            prune: true,
        }
    }
}

/// Regression stage shared by the randomization tests.
pub fn scores_for(
    ds: &Dataset,
    layout: &ClusterLayout,
    pi_mode: PiMode,
) -> Result<SubclusterScores> {
    let fit = ols_fit(ds)?;
    let pi = estimate_pi(ds, layout, pi_mode);
    Ok(compute_score_components(ds, layout, &fit, &pi))
}

/// Runs the search on precomputed scores with a caller-supplied group.
///
/// Besides the window cutoffs, the λ = 0 pattern is always evaluated. Under
/// full enumeration this never changes the supremum (the window already
/// attains it); with a stochastic group it keeps the result at least as
/// large as the naive test on the same flips.
pub fn wcr_from_scores(
    scores: &SubclusterScores,
    layout: &ClusterLayout,
    group: &SignGroup,
    alpha: f64,
    prune: bool,
    seed: u64,
) -> Result<WcrResult> {
    check_q(layout)?;
    let ratios = compute_ratios(scores)?;
    let (r_plus, r_minus) = conservative_medians(&ratios, layout)?;
    let order = ratios.descending_order();

    let mut cutoffs: Vec<usize> = if prune {
        candidate_sign_vectors(&ratios, r_plus, r_minus, layout)
            .into_iter()
            .map(|c| c.cutoff)
            .collect()
    } else {
        boundaries(&ratios, &order)
            .into_iter()
            .filter(|&m| m > 0)
            .collect()
    };
    // λ = 0: positive iff R_j ≥ 0. The all-negative pattern has the same
    // p-value as the all-positive one, so m = 0 maps to m = q̃.
    let naive_m = match order.iter().filter(|&&j| ratios.ratios[j] >= 0.0).count() {
        0 => order.len(),
        m => m,
    };
    cutoffs.push(naive_m);
    cutoffs.sort_unstable();
    cutoffs.dedup();

    let pvals = cutoff_pvalues(&order, &cutoffs, layout, group);
    let per_cutoff: Vec<CutoffPValue> = cutoffs
        .iter()
        .zip(&pvals)
        .map(|(&m, &p)| {
            let c = candidate_at(&ratios, &order, m);
            CutoffPValue {
                cutoff: m,
                threshold: c.threshold,
                signs: c.signs,
                p_value: p,
                naive: m == naive_m,
            }
        })
        .collect();
    let p_value = pvals.iter().copied().fold(0.0, f64::max);
    let worst = per_cutoff
        .iter()
        .find(|c| c.p_value == p_value)
        .expect("at least one cutoff is evaluated");
    let statistic = test_statistic(&worst.signs, layout).value();
    Ok(WcrResult {
        statistic,
        p_value,
        decision: Decision::from_pvalue(p_value, alpha),
        alpha,
        per_cutoff,
        ratios: ratios.ratios,
        zero_set: ratios.zero_set,
        r_plus,
        r_minus,
        group_mode: group.mode(),
        group_size: group.len(),
        seed,
    })
}

pub(crate) fn check_q(layout: &ClusterLayout) -> Result<()> {
    if layout.q() < 2 {
        return Err(Error::Degenerate(format!(
            "at least two sub-clusters are required, found {}",
            layout.q()
        )));
    }
    Ok(())
}

pub fn wcr_test_with(ds: &Dataset, opts: &WcrOptions) -> Result<WcrResult> {
    let layout = build_layout(ds);
    wcr_test_layout(ds, &layout, opts)
}

pub fn wcr_test_layout(
    ds: &Dataset,
    layout: &ClusterLayout,
    opts: &WcrOptions,
) -> Result<WcrResult> {
    check_q(layout)?;
    let scores = scores_for(ds, layout, opts.pi_mode)?;
    let group = make_sign_group(layout.q(), opts.draws, opts.seed);
    wcr_from_scores(&scores, layout, &group, opts.alpha, opts.prune, opts.seed)
}

/// Worst-case randomization test with default options.
pub fn wcr_test(ds: &Dataset, alpha: f64, draws: usize, seed: u64) -> Result<WcrResult> {
    wcr_test_with(
        ds,
        &WcrOptions {
            alpha,
            draws,
            seed,
            ..WcrOptions::default()
        },
    )
}

/// Brute-force supremum over a λ grid: every midpoint between consecutive
/// distinct values of `−R`, plus `±padding · max|R|`. Signs are computed
/// directly from `N_j + λ D_j` and each p-value by plain enumeration of the
/// group.
pub fn sup_pvalue_oracle_scores(
    scores: &SubclusterScores,
    layout: &ClusterLayout,
    group: &SignGroup,
    padding: f64,
) -> Result<f64> {
    let ratios = compute_ratios(scores)?;
    let zero = &ratios.zero_set;
    let mut lambdas: Vec<f64> = ratios
        .ratios
        .iter()
        .zip(zero)
        .filter(|(_, &z)| !z)
        .map(|(r, _)| -r)
        .collect();
    lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lambdas.dedup();
    let span = lambdas.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut grid: Vec<f64> = lambdas.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    grid.push(padding * span);
    grid.push(-padding * span);

    let mut best = 0.0f64;
    for lambda in grid {
        let s: Vec<f64> = scores
            .numerator
            .iter()
            .zip(&scores.denominator)
            .map(|(n, d)| n + lambda * d)
            .collect();
        let signs = SignVector::from_scores(&s, zero);
        best = best.max(pvalue_blocks(&signs.0, layout.blocks(), group));
    }
    Ok(best)
}

/// Oracle on a dataset, using the same group as [`wcr_test`] would.
pub fn sup_pvalue_oracle(ds: &Dataset, draws: usize, seed: u64, padding: f64) -> Result<f64> {
    let layout = build_layout(ds);
    check_q(&layout)?;
    let scores = scores_for(ds, &layout, PiMode::PerSubcluster)?;
    let group = make_sign_group(layout.q(), draws, seed);
    sup_pvalue_oracle_scores(&scores, &layout, &group, padding)
}

/// Supremum over every distinct-value cutoff (no window), each p-value by
/// plain enumeration.
pub fn unpruned_sup(
    scores: &SubclusterScores,
    layout: &ClusterLayout,
    group: &SignGroup,
) -> Result<f64> {
    let ratios = compute_ratios(scores)?;
    let order = ratios.descending_order();
    Ok(boundaries(&ratios, &order)
        .into_iter()
        .map(|m| {
            let c = candidate_at(&ratios, &order, m);
            pvalue_blocks(&c.signs.0, layout.blocks(), group)
        })
        .fold(0.0, f64::max))
}
