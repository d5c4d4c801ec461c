//! Sign-change randomization: the within-cluster sign-imbalance statistic,
//! the group of sign flips, and randomization p-values.

use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::ClusterLayout;
use crate::rng::rng_from_seed;

/// Largest `q` for which the full group of `2^q` flips is enumerated.
pub const FULL_ENUMERATION_MAX_Q: usize = 10;

/// Default number of draws for the stochastic approximation.
pub const DEFAULT_DRAWS: usize = 1000;

/// Ternary sign per sub-cluster (−1, 0, +1), in layout order. A zero marks a
/// sub-cluster with no identifying variation; it stays zero under any flip.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignVector(pub Vec<i8>);

impl SignVector {
    /// Signs of real scores using `1{s ≥ 0} − 1{s < 0}`; entries flagged in
    /// `zero` become 0.
    pub fn from_scores(scores: &[f64], zero: &[bool]) -> Self {
        SignVector(
            scores
                .iter()
                .zip(zero)
                .map(|(&s, &z)| match (z, s >= 0.0) {
                    (true, _) => 0,
                    (false, true) => 1,
                    (false, false) => -1,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negated(&self) -> Self {
        SignVector(self.0.iter().map(|s| -s).collect())
    }
}

/// The statistic `T = (1/r) Σ_k |Σ_{j∈J_k} sign_j|`, kept as the integer
/// numerator over `r` so comparisons are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TStat {
    pub numerator: i64,
    pub r: usize,
}

impl TStat {
    pub fn value(self) -> f64 {
        self.numerator as f64 / self.r as f64
    }
}

pub(crate) fn imbalance(signs: &[i8], blocks: &[Range<usize>]) -> i64 {
    blocks
        .iter()
        .map(|b| {
            signs[b.clone()]
                .iter()
                .map(|&s| s as i64)
                .sum::<i64>()
                .abs()
        })
        .sum()
}

fn flipped_imbalance(signs: &[i8], flip: &[i8], blocks: &[Range<usize>]) -> i64 {
    blocks
        .iter()
        .map(|b| {
            b.clone()
                .map(|j| (signs[j] * flip[j]) as i64)
                .sum::<i64>()
                .abs()
        })
        .sum()
}

pub fn test_statistic(s: &SignVector, layout: &ClusterLayout) -> TStat {
    TStat {
        numerator: imbalance(&s.0, layout.blocks()),
        r: layout.r(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupMode {
    Full,
    Stochastic,
}

/// A set of ±1 flip vectors. The first flip is always the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignGroup {
    q: usize,
    /// Flat storage, `len() × q`.
    flips: Vec<i8>,
    mode: GroupMode,
}

impl SignGroup {
    /// All `2^q` flips. Flip `b` has `−1` at position `j` when bit `q−1−j`
    /// of `b` is set, so `b = 0` is the identity.
    pub fn full(q: usize) -> Self {
        assert!(q <= 24, "full enumeration of 2^{q} flips is not supported");
        let count = 1usize << q;
        let mut flips = Vec::with_capacity(count * q);
        for b in 0..count {
            for j in 0..q {
                let bit = (b >> (q - 1 - j)) & 1;
                flips.push(if bit == 1 { -1 } else { 1 });
            }
        }
        SignGroup {
            q,
            flips,
            mode: GroupMode::Full,
        }
    }

    /// Identity followed by `draws − 1` independent uniform flips.
    pub fn stochastic(q: usize, draws: usize, seed: u64) -> Self {
        assert!(draws >= 1, "at least one flip is required");
        let mut rng = rng_from_seed(seed);
        let mut flips = vec![1i8; q];
        flips.reserve((draws - 1) * q);
        for _ in 1..draws {
            let mut word = 0u64;
            for j in 0..q {
                if j % 64 == 0 {
                    word = rng.random();
                }
                flips.push(if (word >> (j % 64)) & 1 == 1 { -1 } else { 1 });
            }
        }
        SignGroup {
            q,
            flips,
            mode: GroupMode::Stochastic,
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.flips.len().checked_div(self.q).unwrap_or(1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mode(&self) -> GroupMode {
        self.mode
    }

    pub fn flip(&self, b: usize) -> &[i8] {
        &self.flips[b * self.q..(b + 1) * self.q]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i8]> + '_ {
        (0..self.len()).map(move |b| self.flip(b))
    }
}

/// Full enumeration when `q ≤ 10`, otherwise `draws` stochastic flips.
pub fn make_sign_group(q: usize, draws: usize, seed: u64) -> SignGroup {
    if q <= FULL_ENUMERATION_MAX_Q {
        SignGroup::full(q)
    } else {
        SignGroup::stochastic(q, draws, seed)
    }
}

/// `|{g : T(g⊙s) ≥ T(s)}| / |G|`.
pub fn randomization_pvalue(s: &SignVector, layout: &ClusterLayout, group: &SignGroup) -> f64 {
    pvalue_blocks(&s.0, layout.blocks(), group)
}

pub(crate) fn pvalue_blocks(signs: &[i8], blocks: &[Range<usize>], group: &SignGroup) -> f64 {
    assert_eq!(
        signs.len(),
        group.q(),
        "sign vector and group disagree on q"
    );
    let observed = imbalance(signs, blocks);
    let hits = group
        .iter()
        .filter(|g| flipped_imbalance(signs, g, blocks) >= observed)
        .count();
    hits as f64 / group.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[i8]) -> SignVector {
        SignVector(v.to_vec())
    }

    #[test]
    fn statistic_examples() {
        let one = ClusterLayout::synthetic(&[4], 1);
        assert_eq!(test_statistic(&sv(&[1, 1, 1, 1]), &one).value(), 4.0);
        assert_eq!(test_statistic(&sv(&[1, 0, -1, 0]), &one).value(), 0.0);
        let two = ClusterLayout::synthetic(&[2, 2], 1);
        let t = test_statistic(&sv(&[1, -1, 1, 1]), &two);
        assert_eq!((t.numerator, t.r), (2, 2));
        assert_eq!(t.value(), 1.0);
    }

    #[test]
    fn full_group_q2() {
        let g = SignGroup::full(2);
        let flips: Vec<Vec<i8>> = g.iter().map(|f| f.to_vec()).collect();
        assert_eq!(
            flips,
            vec![vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]]
        );
        assert_eq!(make_sign_group(2, 1000, 0).mode(), GroupMode::Full);
    }

    #[test]
    fn stochastic_group_shape_and_determinism() {
        let g = make_sign_group(11, 1000, 42);
        assert_eq!(g.mode(), GroupMode::Stochastic);
        assert_eq!(g.len(), 1000);
        assert!(g.flip(0).iter().all(|&s| s == 1));
        assert_eq!(g, make_sign_group(11, 1000, 42));
        assert_ne!(g, make_sign_group(11, 1000, 43));
    }

    #[test]
    fn pvalue_single_cluster_enumerations() {
        let l2 = ClusterLayout::synthetic(&[2], 1);
        assert_eq!(
            randomization_pvalue(&sv(&[1, 1]), &l2, &SignGroup::full(2)),
            0.5
        );
        let l3 = ClusterLayout::synthetic(&[3], 1);
        assert_eq!(
            randomization_pvalue(&sv(&[1, 1, 1]), &l3, &SignGroup::full(3)),
            0.25
        );
    }

    #[test]
    fn balanced_signs_give_p_one() {
        let l = ClusterLayout::synthetic(&[4], 1);
        assert_eq!(
            randomization_pvalue(&sv(&[1, -1, -1, 1]), &l, &SignGroup::full(4)),
            1.0
        );
    }

    #[test]
    fn zeros_are_fixed_under_flips() {
        let l = ClusterLayout::synthetic(&[3], 1);
        // only the two non-zero entries move: T = 2 reached by 2 of 4 patterns
        let p = randomization_pvalue(&sv(&[1, 0, 1]), &l, &SignGroup::full(3));
        assert_eq!(p, 0.5);
    }
}
