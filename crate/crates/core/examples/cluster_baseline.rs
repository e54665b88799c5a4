//! Forty real and forty fake clusters with nothing in common: the k-means
//! histogram baseline with 20 bins reports heavy overlap, the classifier
//! reports none.

use prcurve::clustering::histogram_prd;
use prcurve::curve::LambdaGrid;
use prcurve::ensemble::TrainingConfig;
use prcurve::estimator::estimate_pr_curve;
use prcurve::synthetic::{class_overlap_experiment, ClusterGeometry};

fn main() -> prcurve::Result<()> {
    let experiment = class_overlap_experiment(40, 0.0, 50, 1, &ClusterGeometry::default())?;
    let grid = LambdaGrid::new(vec![1.0])?;
    let (real, fake) = (experiment.data.real(), experiment.data.fake());

    for k in [5, 20, 80] {
        let baseline = histogram_prd(real, fake, k, &grid, 1)?;
        println!(
            "k-means, k = {k:>2}: alpha_1 = {:.3}",
            baseline.points()[0].alpha
        );
    }
    let estimate = estimate_pr_curve(&experiment.data, &TrainingConfig::default(), &grid)?;
    println!(
        "classifier:       alpha_1 = {:.3}",
        estimate.curve.points()[0].alpha
    );
    Ok(())
}
