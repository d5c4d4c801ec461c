// The four tests for the clustering level on one simulated sample.

use std::error::Error;

use wcr::competing::{im_test, mnw_test, nr_test};
use wcr::dgp::{gen_model1, Model1Config};
use wcr::wcr_test;

pub fn run(rho: f64, seed: u64) -> Result<(), Box<dyn Error>> {
    // 8 clusters of 8 sub-clusters, 50 periods each; rho scales the cluster shock
    let ds = gen_model1(&Model1Config::new(8, 8, 50, rho), seed)?;

    let wcr = wcr_test(&ds, 0.05, 1000, seed)?;
    println!("rho = {rho}");
    println!("  wcr  T = {:>8.3}  p = {:.3}", wcr.statistic, wcr.p_value);
    for res in [
        nr_test(&ds, 0.05, 1000, seed)?,
        im_test(&ds, 0.05, 1000, seed)?,
        mnw_test(&ds, 0.05, 399, seed)?,
    ] {
        println!(
            "  {:<4} T = {:>8.3}  p = {:.3}",
            res.method, res.statistic, res.p_value
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run(0.0, 1)?;
    run(1.5, 1)
}
