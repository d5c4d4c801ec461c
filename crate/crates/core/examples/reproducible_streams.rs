// Replication seeds are derived from the master seed, so results do not
// depend on the number of worker threads.

use std::error::Error;

use wcr::dgp::{Design, Model1Config};
use wcr::mc::{rep_seed, run_mc, McConfig, McTest};

pub fn run(reps: usize) -> Result<(), Box<dyn Error>> {
    println!(
        "first replication seeds: {:?}",
        (0..3).map(|r| rep_seed(42, r)).collect::<Vec<_>>()
    );
    let design = Design::Model1(Model1Config::new(4, 4, 25, 1.0));
    let mut cfg = McConfig::new(design, vec![McTest::Wcr, McTest::Nr], reps, 42);
    for jobs in [1, 2, 8] {
        cfg.jobs = jobs;
        let rows = run_mc(&cfg)?;
        let lines: Vec<String> = rows.iter().map(|r| r.csv_line()).collect();
        println!("jobs = {jobs}: {}", lines.join(" | "));
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run(200)
}
