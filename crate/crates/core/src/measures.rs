//! Exact precision-recall mathematics for distributions on a finite support.
//!
//! Both distributions live on the implicit support `0..k`. The frontier is
//! computed through the ratio parameterization
//! `alpha_lambda = sum_i min(lambda p_i, q_i)`, `beta_lambda = alpha_lambda / lambda`,
//! while [`prd_membership`] checks a pair `(alpha, beta)` directly against the
//! existence of a shared component measure.

use crate::curve::{clamp_unit, LambdaGrid, PrCurve, PrPoint};
use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a distribution.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Weights at or below this are treated as outside the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Membership slack used by [`prd_membership`].
pub const MEMBERSHIP_SLACK: f64 = 1e-9;

/// Probability weights over the support `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    weights: Vec<f64>,
}

impl DiscreteDistribution {
    /// Validates nonnegativity and unit mass; weights are never renormalized.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("distribution has an empty support"));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::invalid(format!(
                "weight {i} must be finite and nonnegative, got {w}"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(DiscreteDistribution { weights })
    }

    /// Normalizes nonnegative counts into a distribution.
    pub fn from_counts(counts: &[f64]) -> Result<Self> {
        let total: f64 = counts.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::invalid("counts must have a positive finite total"));
        }
        if counts.iter().any(|c| *c < 0.0) {
            return Err(Error::invalid("counts must be nonnegative"));
        }
        Self::new(counts.iter().map(|c| c / total).collect())
    }

    /// Uniform mass over the first `active` ids of a support of size `len`.
    pub fn uniform_prefix(len: usize, active: usize) -> Result<Self> {
        if active == 0 || active > len {
            return Err(Error::invalid(format!(
                "cannot spread mass over {active} of {len} ids"
            )));
        }
        let w = 1.0 / active as f64;
        let mut weights = vec![0.0; len];
        weights[..active].iter_mut().for_each(|x| *x = w);
        Self::new(weights)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Mass of the ids where `other` is supported.
    pub fn mass_on_support_of(&self, other: &DiscreteDistribution) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .filter(|(_, o)| **o > SUPPORT_THRESHOLD)
            .map(|(w, _)| w)
            .sum()
    }
}

fn check_support(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::SupportMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(())
}

/// Elementwise minimum of two measures on the same support.
pub fn min_measure(p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
    check_support(p, q)?;
    Ok(p.iter().zip(q).map(|(a, b)| a.min(*b)).collect())
}

/// Total mass of `min(lambda P, Q)`.
fn scaled_overlap(p: &[f64], q: &[f64], lambda: f64) -> f64 {
    p.iter().zip(q).map(|(a, b)| (lambda * a).min(*b)).sum()
}

/// Frontier point for a finite positive ratio `lambda`.
pub fn exact_pr_point(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    lambda: f64,
) -> Result<PrPoint> {
    check_support(p.weights(), q.weights())?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!(
            "lambda must be finite and positive, got {lambda}; use exact_pr_endpoints"
        )));
    }
    let alpha = scaled_overlap(p.weights(), q.weights(), lambda);
    let beta = alpha / lambda;
    Ok(PrPoint::new(lambda, clamp_unit(alpha), clamp_unit(beta)))
}

/// The `lambda = 0` and `lambda = +inf` points.
///
/// `beta_0 = P(supp Q)` and `alpha_inf = Q(supp P)`.
pub fn exact_pr_endpoints(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<(PrPoint, PrPoint)> {
    check_support(p.weights(), q.weights())?;
    let beta_zero = clamp_unit(p.mass_on_support_of(q));
    let alpha_inf = clamp_unit(q.mass_on_support_of(p));
    Ok((
        PrPoint::new(0.0, 0.0, beta_zero),
        PrPoint::new(f64::INFINITY, alpha_inf, 0.0),
    ))
}

/// Frontier sampled on `grid`, plus the endpoints when the grid requests them.
pub fn exact_pr_curve(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    grid: &LambdaGrid,
) -> Result<PrCurve> {
    check_support(p.weights(), q.weights())?;
    let mut points = Vec::with_capacity(grid.len() + 2);
    if grid.has_endpoints() {
        let (zero, inf) = exact_pr_endpoints(p, q)?;
        points.push(zero);
        points.push(inf);
    }
    for &lambda in grid.values() {
        points.push(exact_pr_point(p, q, lambda)?);
    }
    Ok(PrCurve::from_points(points))
}

/// Whether `(alpha, beta)` is an achievable precision-recall pair.
///
/// Checked against the defining condition: some probability measure `mu`
/// satisfies `P >= beta mu` and `Q >= alpha mu`. For positive `alpha` and
/// `beta` the largest admissible `mu` has mass `sum_i min(p_i / beta, q_i / alpha)`.
/// Pairs on an axis use the support conventions `alpha <= Q(supp P)` and
/// `beta <= P(supp Q)`.
pub fn prd_membership(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    alpha: f64,
    beta: f64,
) -> Result<bool> {
    check_support(p.weights(), q.weights())?;
    if !(alpha >= 0.0 && beta >= 0.0) {
        return Err(Error::invalid(format!(
            "precision and recall must be nonnegative, got ({alpha}, {beta})"
        )));
    }
    let member = match (alpha > 0.0, beta > 0.0) {
        (false, false) => true,
        (true, false) => alpha <= q.mass_on_support_of(p) + MEMBERSHIP_SLACK,
        (false, true) => beta <= p.mass_on_support_of(q) + MEMBERSHIP_SLACK,
        (true, true) => {
            let mass: f64 = p
                .weights()
                .iter()
                .zip(q.weights())
                .map(|(pi, qi)| (pi / beta).min(qi / alpha))
                .sum();
            mass >= 1.0 - MEMBERSHIP_SLACK
        }
    };
    Ok(member)
}

/// Maps `(lambda, alpha, beta)` to `(1/lambda, beta, alpha)`.
pub fn symmetry_swap(curve: &PrCurve) -> PrCurve {
    curve.swapped()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::default_lambda_grid;
    use proptest::prelude::*;

    fn dist(w: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(w.to_vec()).unwrap()
    }

    #[test]
    fn min_measure_examples() {
        let m = min_measure(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert_eq!(m, vec![0.5, 0.5]);
        let m = min_measure(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(m.iter().sum::<f64>(), 0.0);
        let t = 1.0 / 3.0;
        let m = min_measure(&[0.2; 5], &[t, t, t, 0.0, 0.0]).unwrap();
        assert!((m.iter().sum::<f64>() - 0.6).abs() < 1e-15);
        assert!(matches!(
            min_measure(&[1.0], &[0.5, 0.5]),
            Err(Error::SupportMismatch { .. })
        ));
    }

    #[test]
    fn distribution_validation() {
        assert!(DiscreteDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(DiscreteDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(DiscreteDistribution::new(vec![]).is_err());
        assert!(DiscreteDistribution::new(vec![0.5, 0.5 + 1e-10]).is_ok());
        let d = DiscreteDistribution::from_counts(&[1.0, 3.0]).unwrap();
        assert_eq!(d.weights(), &[0.25, 0.75]);
    }

    #[test]
    fn point_examples() {
        let u = dist(&[0.5, 0.5]);
        let pt = exact_pr_point(&u, &u, 0.5).unwrap();
        assert_eq!((pt.alpha, pt.beta), (0.5, 1.0));

        let p5 = DiscreteDistribution::uniform_prefix(5, 5).unwrap();
        let q3 = DiscreteDistribution::uniform_prefix(5, 3).unwrap();
        let pt = exact_pr_point(&p5, &q3, 1.0).unwrap();
        assert!((pt.alpha - 0.6).abs() < 1e-12);
        assert!((pt.beta - 0.6).abs() < 1e-12);

        let a = dist(&[1.0, 0.0]);
        let b = dist(&[0.0, 1.0]);
        let pt = exact_pr_point(&a, &b, 7.0).unwrap();
        assert_eq!((pt.alpha, pt.beta), (0.0, 0.0));

        assert!(exact_pr_point(&a, &b, 0.0).is_err());
        assert!(exact_pr_point(&a, &b, -1.0).is_err());
    }

    #[test]
    fn endpoint_examples() {
        let u = dist(&[0.25; 4]);
        let (z, i) = exact_pr_endpoints(&u, &u).unwrap();
        assert_eq!((z.beta, i.alpha), (1.0, 1.0));

        let p5 = DiscreteDistribution::uniform_prefix(5, 5).unwrap();
        let q3 = DiscreteDistribution::uniform_prefix(5, 3).unwrap();
        let (z, i) = exact_pr_endpoints(&p5, &q3).unwrap();
        assert!((i.alpha - 1.0).abs() < 1e-12);
        assert!((z.beta - 0.6).abs() < 1e-12);
        assert_eq!((z.alpha, i.beta), (0.0, 0.0));

        let (z, i) = exact_pr_endpoints(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap();
        assert_eq!((z.beta, i.alpha), (0.0, 0.0));
    }

    #[test]
    fn rectangular_curves() {
        let grid = LambdaGrid::new(vec![0.3, 5.0 / 3.0, 4.0]).unwrap();
        let p5 = DiscreteDistribution::uniform_prefix(10, 5).unwrap();
        let q3 = DiscreteDistribution::uniform_prefix(10, 3).unwrap();
        let c = exact_pr_curve(&p5, &q3, &grid).unwrap();
        let corner = c.at(5.0 / 3.0).unwrap();
        assert!((corner.alpha - 1.0).abs() < 1e-12);
        assert!((corner.beta - 0.6).abs() < 1e-12);

        let q8 = DiscreteDistribution::uniform_prefix(10, 8).unwrap();
        let c = exact_pr_curve(&p5, &q8, &LambdaGrid::new(vec![0.625]).unwrap()).unwrap();
        let corner = c.points()[0];
        assert!((corner.alpha - 0.625).abs() < 1e-12);
        assert!((corner.beta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_curve_is_min_lambda_one() {
        let u = dist(&[0.1, 0.2, 0.3, 0.4]);
        let grid = default_lambda_grid(51).unwrap().with_endpoints();
        let c = exact_pr_curve(&u, &u, &grid).unwrap();
        assert_eq!(c.len(), 53);
        for pt in c
            .points()
            .iter()
            .filter(|p| p.lambda > 0.0 && p.lambda.is_finite())
        {
            assert!((pt.alpha - pt.lambda.min(1.0)).abs() < 1e-12);
            assert!((pt.beta - (1.0 / pt.lambda).min(1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn membership_examples() {
        let p5 = DiscreteDistribution::uniform_prefix(5, 5).unwrap();
        let q3 = DiscreteDistribution::uniform_prefix(5, 3).unwrap();
        assert!(prd_membership(&p5, &q3, 0.0, 0.0).unwrap());
        assert!(prd_membership(&p5, &p5, 1.0, 1.0).unwrap());
        assert!(!prd_membership(&p5, &q3, 1.0, 1.0).unwrap());
        assert!(!prd_membership(&p5, &q3, 0.7, 0.7).unwrap());
        assert!(prd_membership(&p5, &q3, 1.0, 0.6).unwrap());
        assert!(prd_membership(&p5, &q3, 0.0, 0.6).unwrap());
        assert!(!prd_membership(&p5, &q3, 0.0, 0.61).unwrap());
        assert!(prd_membership(&p5, &q3, 1.0, 0.0).unwrap());
        assert!(prd_membership(&p5, &q3, -0.1, 0.0).is_err());
    }

    #[test]
    fn swap_matches_reversed_roles() {
        let p = dist(&[0.1, 0.5, 0.4, 0.0]);
        let q = dist(&[0.3, 0.3, 0.0, 0.4]);
        let grid = default_lambda_grid(31).unwrap().with_endpoints();
        let forward = exact_pr_curve(&p, &q, &grid).unwrap().swapped();
        let reverse = exact_pr_curve(&q, &p, &grid.reciprocal()).unwrap();
        assert_eq!(forward.len(), reverse.len());
        for (a, b) in forward.points().iter().zip(reverse.points()) {
            assert!(
                a.lambda == b.lambda || (a.lambda - b.lambda).abs() <= 1e-12 * a.lambda.max(1.0)
            );
            assert!((a.alpha - b.alpha).abs() < 1e-12);
            assert!((a.beta - b.beta).abs() < 1e-12);
        }
    }

    fn distribution_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], len).prop_filter_map(
            "needs positive mass",
            |raw| {
                let total: f64 = raw.iter().sum();
                (total > 1e-6).then(|| raw.iter().map(|r| r / total).collect())
            },
        )
    }

    fn pair_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..=8).prop_flat_map(|k| (distribution_strategy(k), distribution_strategy(k)))
    }

    proptest! {
        #[test]
        fn frontier_bounds_and_monotonicity((pw, qw) in pair_strategy()) {
            let p = DiscreteDistribution::new(pw).unwrap();
            let q = DiscreteDistribution::new(qw).unwrap();
            let grid = default_lambda_grid(40).unwrap();
            let curve = exact_pr_curve(&p, &q, &grid).unwrap();
            for pt in curve.points() {
                prop_assert!(pt.alpha <= pt.lambda.min(1.0) + 1e-9);
                prop_assert!(pt.beta <= (1.0 / pt.lambda).min(1.0) + 1e-9);
                prop_assert!((pt.alpha - pt.lambda * pt.beta).abs() <= 1e-9);
            }
            for w in curve.points().windows(2) {
                prop_assert!(w[1].alpha >= w[0].alpha - 1e-12);
                prop_assert!(w[1].beta <= w[0].beta + 1e-12);
            }
        }

        #[test]
        fn membership_is_downward_closed(
            (pw, qw) in pair_strategy(),
            alpha in 0.0f64..1.0,
            beta in 0.0f64..1.0,
            shrink_a in 0.0f64..=1.0,
            shrink_b in 0.0f64..=1.0,
        ) {
            let p = DiscreteDistribution::new(pw).unwrap();
            let q = DiscreteDistribution::new(qw).unwrap();
            if prd_membership(&p, &q, alpha, beta).unwrap() {
                prop_assert!(prd_membership(&p, &q, alpha * shrink_a, beta * shrink_b).unwrap());
            }
        }

        #[test]
        fn self_curve_is_exact(pw in (1usize..10).prop_flat_map(distribution_strategy), lambda in 0.01f64..100.0) {
            let p = DiscreteDistribution::new(pw).unwrap();
            let pt = exact_pr_point(&p, &p, lambda).unwrap();
            prop_assert!((pt.alpha - lambda.min(1.0)).abs() <= 1e-12);
        }
    }
}
