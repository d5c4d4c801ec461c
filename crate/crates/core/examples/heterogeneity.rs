// Scaling the error variance of one cluster by ten: the worst-case test is
// unaffected while the variance-comparison tests lose power.

use std::error::Error;

use wcr::dgp::{Design, Model1Config, SigmaSpec};
use wcr::mc::{run_mc, McConfig, McTest};

pub fn run(reps: usize) -> Result<(), Box<dyn Error>> {
    let hetero: SigmaSpec = "cluster1=10".parse()?;
    let tests = vec![McTest::Wcr, McTest::Im, McTest::Mnw];
    println!(
        "{:>4}  {:<8} {:>8} {:>8}",
        "rho",
        "test",
        "sigma=1",
        hetero.to_string()
    );
    for rho in [0.0, 1.0, 2.0] {
        let mut cfg = Model1Config::new(8, 8, 100, rho);
        let base = run_mc(&McConfig::new(
            Design::Model1(cfg.clone()),
            tests.clone(),
            reps,
            2,
        ))?;
        cfg.sigma = hetero.clone();
        let het = run_mc(&McConfig::new(Design::Model1(cfg), tests.clone(), reps, 2))?;
        for (b, h) in base.iter().zip(&het) {
            println!(
                "{rho:>4.1}  {:<8} {:>8.3} {:>8.3}",
                b.test.to_string(),
                b.rate,
                h.rate
            );
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    let reps = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(500);
    run(reps)
}
