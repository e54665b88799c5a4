//! Exact precision-recall curve between two histograms, checked against the
//! membership test.

use prcurve::curve::default_lambda_grid;
use prcurve::measures::{exact_pr_curve, prd_membership, DiscreteDistribution};

fn main() -> prcurve::Result<()> {
    // reference: uniform over five bins; model: uniform over the first three
    let p = DiscreteDistribution::uniform_prefix(5, 5)?;
    let q = DiscreteDistribution::uniform_prefix(5, 3)?;

    let grid = default_lambda_grid(9)?.with_endpoints();
    let curve = exact_pr_curve(&p, &q, &grid)?;
    println!("{:>12} {:>8} {:>8}", "lambda", "alpha", "beta");
    for pt in curve.points() {
        println!("{:>12.4} {:>8.4} {:>8.4}", pt.lambda, pt.alpha, pt.beta);
    }

    for (alpha, beta) in [(1.0, 0.6), (0.9, 0.5), (1.0, 0.61)] {
        println!(
            "({alpha}, {beta}) achievable: {}",
            prd_membership(&p, &q, alpha, beta)?
        );
    }

    // reversing the roles mirrors the curve
    let mirrored = exact_pr_curve(&q, &p, &grid.reciprocal())?;
    let max_err = curve
        .swapped()
        .points()
        .iter()
        .zip(mirrored.points())
        .map(|(a, b)| (a.alpha - b.alpha).abs().max((a.beta - b.beta).abs()))
        .fold(0.0, f64::max);
    println!("swap symmetry error: {max_err:.1e}");
    Ok(())
}
