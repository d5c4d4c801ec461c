#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use wcr::data::{ClusterLayout, Dataset};
use wcr::regression::SubclusterScores;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Balanced Gaussian instance with rows ordered by cluster then sub-cluster.
/// `extra_controls` Gaussian columns are added after an intercept.
pub fn gaussian_instance(
    rng: &mut ChaCha8Rng,
    r: usize,
    q_k: usize,
    n_j: usize,
    extra_controls: usize,
) -> Dataset {
    let n = r * q_k * n_j;
    let mut cluster = Vec::with_capacity(n);
    let mut sub = Vec::with_capacity(n);
    for k in 0..r {
        for j in 0..q_k {
            for _ in 0..n_j {
                cluster.push(format!("K{k}"));
                sub.push(format!("K{k}-J{j}"));
            }
        }
    }
    let mut controls = vec![vec![1.0; n]];
    for _ in 0..extra_controls {
        controls.push((0..n).map(|_| normal(rng)).collect());
    }
    let x: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
    let y: Vec<f64> = x.iter().map(|xi| xi + normal(rng)).collect();
    Dataset::new(y, x, controls, &cluster, &sub).unwrap()
}

/// Imbalance numerator `Σ_k |Σ_{j∈k} s_j|`.
pub fn imbalance(signs: &[i32], layout: &ClusterLayout) -> i32 {
    (0..layout.r())
        .map(|k| {
            layout
                .subclusters_of(k)
                .map(|j| signs[j])
                .sum::<i32>()
                .abs()
        })
        .sum()
}

/// p-value by enumerating all `2^q` flips.
pub fn enumerated_pvalue(signs: &[i32], layout: &ClusterLayout) -> f64 {
    let q = signs.len();
    let observed = imbalance(signs, layout);
    let mut hits = 0u64;
    let mut flipped = vec![0i32; q];
    for mask in 0u64..(1 << q) {
        for j in 0..q {
            flipped[j] = if mask >> j & 1 == 1 {
                -signs[j]
            } else {
                signs[j]
            };
        }
        if imbalance(&flipped, layout) >= observed {
            hits += 1;
        }
    }
    hits as f64 / (1u64 << q) as f64
}

fn score_signs(scores: &SubclusterScores, lambda: f64) -> Vec<i32> {
    scores
        .numerator
        .iter()
        .zip(&scores.denominator)
        .map(|(n, d)| {
            if *d == 0.0 {
                0
            } else if n + lambda * d >= 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Supremum of the enumerated p-value over λ: the sign pattern of
/// `N_j + λ D_j` changes only at `λ = −N_j/D_j`, so one λ strictly inside
/// each gap, plus one beyond each end, visits every pattern.
pub fn sweep_sup_pvalue(scores: &SubclusterScores, layout: &ClusterLayout) -> f64 {
    let mut knots: Vec<f64> = scores
        .numerator
        .iter()
        .zip(&scores.denominator)
        .filter(|(_, d)| **d != 0.0)
        .map(|(n, d)| -n / d)
        .collect();
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup();
    let mut lambdas: Vec<f64> = knots.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    if let (Some(lo), Some(hi)) = (knots.first(), knots.last()) {
        lambdas.push(lo - 1.0 - lo.abs());
        lambdas.push(hi + 1.0 + hi.abs());
    }
    lambdas
        .into_iter()
        .map(|l| enumerated_pvalue(&score_signs(scores, l), layout))
        .fold(0.0, f64::max)
}

/// Naive p-value: signs of `N_j`.
pub fn naive_pvalue(scores: &SubclusterScores, layout: &ClusterLayout) -> f64 {
    enumerated_pvalue(&score_signs(scores, 0.0), layout)
}
