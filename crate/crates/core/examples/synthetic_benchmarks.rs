//! The benchmark generators and their reference curves.

use prcurve::curve::LambdaGrid;
use prcurve::synthetic::{
    class_overlap_experiment, class_subset_experiment, gaussian_optimal_curve,
    reweighting_experiment, ClusterGeometry,
};

fn main() -> prcurve::Result<()> {
    let geometry = ClusterGeometry::default();

    for q in [1, 3, 5, 7, 9] {
        let e = class_subset_experiment(q, 50, 0, &geometry)?;
        println!(
            "class subset q={q}: {} x {} samples, max precision {:.3}, max recall {:.3}",
            e.data.len(),
            e.data.dim(),
            e.spec.max_precision,
            e.spec.max_recall
        );
    }
    for ratio in [0.0, 0.25, 0.5] {
        let e = class_overlap_experiment(80, ratio, 10, 0, &geometry)?;
        println!(
            "overlap {ratio}: reference corner ({}, {})",
            e.spec.max_precision, e.spec.max_recall
        );
    }
    let e = reweighting_experiment(0.6, 1000, 0, &geometry)?;
    let labels = e.data.real().labels().unwrap_or_default();
    let share = labels.iter().filter(|l| **l == 0).count() as f64 / labels.len() as f64;
    println!("reweighting: {share:.3} of the reference draws come from the shared cluster");

    let grid = LambdaGrid::new(vec![0.5, 1.0, 2.0])?;
    for gap in [0.5, 2.0, 4.0] {
        let c = gaussian_optimal_curve(0.0, gap, 1.0, &grid)?;
        let alphas: Vec<String> = c.alphas().iter().map(|a| format!("{a:.4}")).collect();
        println!(
            "gaussians {gap} sigma apart: alpha at 0.5, 1, 2 = {}",
            alphas.join(", ")
        );
    }
    Ok(())
}
