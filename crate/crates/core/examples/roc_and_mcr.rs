//! ROC frontier of classifier scores and the mode-collapse frontier of two
//! histograms.

use prcurve::curve::default_lambda_grid;
use prcurve::estimator::{error_rates_from_scores, estimate_prd, ScoredTestSet};
use prcurve::measures::DiscreteDistribution;
use prcurve::roc::{mcr_frontier_discrete, roc_from_scores};

fn main() -> prcurve::Result<()> {
    // origin 1 marks real samples, which should score high
    let scores = [0.05, 0.2, 0.3, 0.35, 0.5, 0.6, 0.65, 0.8, 0.9, 0.95];
    let origins = [0, 0, 1, 0, 0, 1, 0, 1, 1, 1];
    let scored = ScoredTestSet::from_parts(&scores, &origins)?;

    println!("ROC frontier (fpr, tpr):");
    for p in roc_from_scores(&scored) {
        println!("  ({:.2}, {:.2})", p.fpr, p.tpr);
    }

    // every curve point is a supporting line of the ROC frontier
    let curve = estimate_prd(&error_rates_from_scores(&scored), &default_lambda_grid(5)?)?;
    for pt in curve.points() {
        println!(
            "lambda {:.3}: alpha {:.3}, beta {:.3}",
            pt.lambda, pt.alpha, pt.beta
        );
    }

    let p = DiscreteDistribution::new(vec![0.4, 0.3, 0.2, 0.1])?;
    let q = DiscreteDistribution::new(vec![0.1, 0.1, 0.3, 0.5])?;
    println!("mode-collapse frontier (epsilon, delta):");
    for m in mcr_frontier_discrete(&p, &q, 32)? {
        println!("  ({:.2}, {:.2})", m.epsilon, m.delta);
    }
    Ok(())
}
