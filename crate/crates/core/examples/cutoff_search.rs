// What the pruned search evaluates, compared with sweeping λ by brute force.

use std::error::Error;

use wcr::randcore::SignGroup;
use wcr::regression::SubclusterScores;
use wcr::wcr::{sup_pvalue_oracle_scores, unpruned_sup, wcr_from_scores};
use wcr::ClusterLayout;

pub fn run() -> Result<(), Box<dyn Error>> {
    // two clusters of four sub-clusters; ratios N/D are 3, 1, -1, 2 | 0.5, -2, 4, -0.5
    let layout = ClusterLayout::synthetic(&[4, 4], 1);
    let scores = SubclusterScores {
        numerator: vec![3.0, 1.0, -1.0, 4.0, 0.5, -4.0, 4.0, -0.5],
        denominator: vec![1.0, 1.0, 1.0, 2.0, 1.0, 2.0, 1.0, 1.0],
        n_j: vec![1; 8],
    };
    let group = SignGroup::full(8);
    let res = wcr_from_scores(&scores, &layout, &group, 0.05, true, 0)?;

    println!("R- = {}, R+ = {}", res.r_minus, res.r_plus);
    for c in &res.per_cutoff {
        println!(
            "  cutoff {} (R >= {:>5}): signs {:?}  p = {:.4}",
            c.cutoff, c.threshold, c.signs.0, c.p_value
        );
    }
    println!("pruned sup     {:.4}", res.p_value);
    println!(
        "all cutoffs    {:.4}",
        unpruned_sup(&scores, &layout, &group)?
    );
    println!(
        "lambda sweep   {:.4}",
        sup_pvalue_oracle_scores(&scores, &layout, &group, 10.0)?
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
