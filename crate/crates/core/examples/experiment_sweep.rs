//! A (k, m) sweep through the experiment runner, emitted as CSV.

use robust_coreset::bench::{format_report, run_experiment, ExperimentConfig, ReportFormat};

fn main() -> robust_coreset::Result<()> {
    let cfg = ExperimentConfig::parse(
        r#"
        [dataset]
        n = 600
        satellites = 1
        satellite_distance = 12
        seed = 1

        [algorithm]
        reduction = "one"
        builder = "sensitivity"
        samples = 150
        eps = 0.2
        k = [1, 2]
        m = [1, 2]

        [verification]
        pool_grid = 0
        "#,
    )?;
    let rows = run_experiment(&cfg, 42)?;
    print!("{}", format_report(&rows, ReportFormat::Csv)?);
    Ok(())
}
