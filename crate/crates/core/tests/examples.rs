macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/examples/",
                stringify!($name),
                ".rs"
            ));
        }
    };
}

example!(wcr_on_csv);
example!(compare_level_tests);
example!(beta_inference);
example!(null_rejection_rates);
example!(power_curve);
example!(heterogeneity);
example!(school_tracks);
example!(cutoff_search);
example!(reproducible_streams);

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn examples_run() {
    wcr_on_csv::run(&data("demo_single_cluster.csv")).unwrap();
    compare_level_tests::run(0.5, 2).unwrap();
    beta_inference::run(4).unwrap();
    null_rejection_rates::run(20).unwrap();
    power_curve::run(20).unwrap();
    heterogeneity::run(20).unwrap();
    school_tracks::run(&data("school_tracks_synthetic.csv")).unwrap();
    cutoff_search::run().unwrap();
    reproducible_streams::run(50).unwrap();
}
