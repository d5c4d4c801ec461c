// Monte Carlo rejection rates under the null, written as CSV.

use std::error::Error;
use std::io;

use wcr::dgp::{Design, Model1Config};
use wcr::mc::{run_mc, write_csv, McConfig, McTest};

pub fn run(reps: usize) -> Result<(), Box<dyn Error>> {
    let mut rows = Vec::new();
    for (r, q_k, n_j) in [(4, 4, 25), (8, 8, 50)] {
        let design = Design::Model1(Model1Config::new(r, q_k, n_j, 0.0));
        let cfg = McConfig::new(design, McTest::LEVEL_TESTS.to_vec(), reps, 1);
        rows.extend(run_mc(&cfg)?);
    }
    write_csv(&rows, true, io::stdout().lock())?;
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    let reps = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(1000);
    run(reps)
}
