//! Inference on a scalar coefficient with clustered data, and tests for
//! whether a coarse clustering level is needed.
//!
//! The centerpiece is [`wcr::wcr_test`], a worst-case randomization test of
//! the null that sub-clusters (the fine level) are independent, against the
//! alternative that dependence extends to the coarse clusters. Competing
//! procedures live in [`competing`], data generators for simulation studies
//! in [`dgp`], and the Monte Carlo harness in [`mc`].

pub mod cli;
pub mod competing;
pub mod data;
pub mod dgp;
pub mod error;
pub mod linalg;
pub mod mc;
pub mod randcore;
pub mod regression;
pub mod rng;
pub mod wcr;

pub use data::{build_layout, load_dataset, ClusterLayout, Dataset, SchemaSpec};
pub use error::{Error, Result};
pub use wcr::{wcr_test, wcr_test_with, WcrOptions, WcrResult};
