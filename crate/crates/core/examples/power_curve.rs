// Rejection rate as a function of ρ under the factor design.

use std::error::Error;

use wcr::dgp::{Design, Model2Config};
use wcr::mc::{parse_rho_grid, power_curve, McConfig, McTest};

pub fn run(reps: usize) -> Result<(), Box<dyn Error>> {
    let design = Design::Model2(Model2Config::new(8, 8, 50, 0.0));
    let cfg = McConfig::new(design, vec![McTest::Wcr, McTest::Nr], reps, 5);
    let grid = parse_rho_grid("0:1:0.25")?;

    println!("{:>5}  {:>6}  {:>6}", "rho", "wcr", "nr");
    for rows in power_curve(&cfg, &grid)?.chunks(2) {
        println!(
            "{:>5.2}  {:>6.3}  {:>6.3}",
            rows[0].rho, rows[0].rate, rows[1].rate
        );
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
