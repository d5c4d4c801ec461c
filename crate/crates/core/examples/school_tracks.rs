// Field-experiment style data: students in classroom groups nested in
// school tracks, with individual-level treatment and controls.

use std::error::Error;

use wcr::competing::{im_test, mnw_test, nr_test};
use wcr::{build_layout, load_dataset, wcr_test, SchemaSpec};

pub fn run(path: &str) -> Result<(), Box<dyn Error>> {
    let schema = SchemaSpec::new(
        "attempted",
        "treatment",
        vec!["female".into(), "question".into(), "const".into()],
        "school_track",
        "group",
    );
    let ds = load_dataset(path, &schema)?;
    let layout = build_layout(&ds);
    println!(
        "{} observations, {} tracks, {} groups",
        ds.n(),
        layout.r(),
        layout.q()
    );
    for k in 0..layout.r() {
        println!("  {:<12} {:>3} groups", layout.clusters()[k], layout.q_k(k));
    }

    println!("wcr p = {:.3}", wcr_test(&ds, 0.05, 1000, 11)?.p_value);
    for res in [
        nr_test(&ds, 0.05, 1000, 11)?,
        im_test(&ds, 0.05, 1000, 11)?,
        mnw_test(&ds, 0.05, 399, 11)?,
    ] {
        println!("{} p = {:.3}", res.method, res.p_value);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/data/school_tracks_synthetic.csv"
        )
        .into()
    });
    run(&path)
}
