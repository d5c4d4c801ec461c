//! Competing tests for the clustering level (naive randomization, IM, MNW)
//! and inference procedures for β under a chosen grouping (CCE t-test,
//! conservative ART, wild cluster bootstrap).

mod beta;
mod bootstrap;
mod im;
mod mnw;
mod nr;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use beta::{
    art_test, art_test_with, cce_t_test, cce_t_test_with, wild_bootstrap_t_test,
    wild_bootstrap_t_test_layout, ArtOptions, CceReference, ART_FULL_ENUMERATION_MAX_G,
};
pub use im::{im_test, im_test_layout, IM_DEFAULT_DRAWS};
pub use mnw::{mnw_statistic, mnw_test, mnw_test_layout, MNW_DEFAULT_DRAWS};
pub use nr::{nr_from_scores, nr_test, nr_test_layout};

use crate::regression::Grouping;
use crate::wcr::{Decision, WcrResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Wcr,
    Nr,
    Im,
    Mnw,
    Cce,
    Art,
    Wild,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Wcr => "wcr",
            Method::Nr => "nr",
            Method::Im => "im",
            Method::Mnw => "mnw",
            Method::Cce => "cce",
            Method::Art => "art",
            Method::Wild => "wild",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// Side information that some procedures report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Per-cluster (IM) or per-group (ART) coefficient estimates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_estimates: Option<Vec<f64>>,
    /// Bootstrap or reference-distribution draws actually used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grouping: Option<Grouping>,
    /// Number of groups `G` for the β-inference procedures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<usize>,
    /// Critical value the statistic was compared against, where one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    pub statistic: f64,
    pub p_value: f64,
    pub decision: Decision,
    pub alpha: f64,
    pub diagnostics: Diagnostics,
}

impl TestResult {
    pub fn rejects(&self) -> bool {
        self.decision.is_reject()
    }
}

impl From<&WcrResult> for TestResult {
    fn from(w: &WcrResult) -> Self {
        TestResult {
            method: Method::Wcr,
            statistic: w.statistic,
            p_value: w.p_value,
            decision: w.decision,
            alpha: w.alpha,
            diagnostics: Diagnostics {
                draws: Some(w.group_size),
                ..Diagnostics::default()
            },
        }
    }
}
