// Worst-case randomization test on a CSV file.
//
// ```text
// cargo run --example wcr_on_csv -- data/demo_single_cluster.csv
// ```

use std::error::Error;

use wcr::{load_dataset, wcr_test, SchemaSpec};

pub fn run(path: &str) -> Result<(), Box<dyn Error>> {
    let schema = SchemaSpec::new("y", "x", vec!["w".into()], "cluster", "subcluster");
    let ds = load_dataset(path, &schema)?;
    let res = wcr_test(&ds, 0.05, 1000, 7)?;

    println!(
        "n = {}, T = {:.3}, p = {:.4}, {:?}",
        ds.n(),
        res.statistic,
        res.p_value,
        res.decision
    );
    println!(
        "window [R-, R+] = [{:.4}, {:.4}], {} flips",
        res.r_minus, res.r_plus, res.group_size
    );
    for c in &res.per_cutoff {
        let tag = if c.naive { "  (lambda = 0)" } else { "" };
        println!(
            "  top {:>2} positive at R >= {:>9.4}: p = {:.4}{tag}",
            c.cutoff, c.threshold, c.p_value
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/data/demo_single_cluster.csv").into()
    });
    run(&path)
}
