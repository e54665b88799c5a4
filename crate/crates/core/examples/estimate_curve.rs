//! Classifier-based estimate on a five-versus-three cluster benchmark,
//! compared with the rectangle it should reproduce.

use prcurve::curve::default_lambda_grid;
use prcurve::ensemble::TrainingConfig;
use prcurve::estimator::estimate_pr_curve;
use prcurve::synthetic::{class_subset_experiment, theoretical_rectangle_curve, ClusterGeometry};

fn main() -> prcurve::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let experiment = class_subset_experiment(3, 400, seed, &ClusterGeometry::default())?;
    let grid = default_lambda_grid(11)?;

    let config = TrainingConfig::default().with_seed(seed);
    let estimate = estimate_pr_curve(&experiment.data, &config, &grid)?;
    let reference = theoretical_rectangle_curve(&experiment.spec, &grid);

    println!(
        "{} held-out samples, {} ensemble members",
        estimate.scored.len(),
        estimate.model.members.len()
    );
    println!("{:>9} {:>15} {:>15}", "lambda", "estimate", "reference");
    for (e, r) in estimate.curve.points().iter().zip(reference.points()) {
        println!(
            "{:>9.4}   ({:.3}, {:.3})   ({:.3}, {:.3})",
            e.lambda, e.alpha, e.beta, r.alpha, r.beta
        );
    }
    Ok(())
}
