//! ROC frontier from classifier scores, and the mode-collapse-region frontier
//! of two discrete distributions.

use crate::error::{Error, Result};
use crate::estimator::{error_rates_from_scores, ScoredTestSet};
use crate::measures::DiscreteDistribution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub fpr: f64,
    /// `1 - fnr`.
    pub tpr: f64,
}

/// One achievable `(epsilon, delta) = (Q(A), P(A))` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McrPoint {
    pub epsilon: f64,
    pub delta: f64,
}

/// Keeps the points not dominated by another (lower-or-equal x with
/// higher-or-equal y). Input must be sorted by x then y ascending; output is
/// sorted by x.
fn upper_left_staircase<T: Copy>(sorted: &[T], xy: impl Fn(&T) -> (f64, f64)) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for p in sorted {
        let (x, y) = xy(p);
        // a later point with the same x and larger y replaces the current one
        while let Some(last) = out.last() {
            let (lx, ly) = xy(last);
            if lx == x && ly <= y {
                out.pop();
            } else {
                break;
            }
        }
        match out.last() {
            Some(last) if xy(last).1 >= y => {}
            _ => out.push(*p),
        }
    }
    out
}

/// Pareto-dominant `(fpr, tpr)` pairs over all thresholds, sorted by `fpr`.
pub fn roc_from_scores(scored: &ScoredTestSet) -> Vec<RocPoint> {
    let mut pts: Vec<RocPoint> = error_rates_from_scores(scored)
        .into_iter()
        .map(|e| RocPoint {
            fpr: e.fpr,
            tpr: 1.0 - e.fnr,
        })
        .collect();
    pts.sort_by(|a, b| a.fpr.total_cmp(&b.fpr).then(a.tpr.total_cmp(&b.tpr)));
    pts.dedup();
    upper_left_staircase(&pts, |p| (p.fpr, p.tpr))
}

/// Upper-left frontier of the mode collapse region of `(p, q)`.
///
/// Optimal witness sets are likelihood-ratio superlevel sets
/// `A = {i : p_i / q_i >= tau}`, with `q_i = 0` ranking as `+inf`. Thresholds
/// are the distinct observed ratios plus `resolution` log-spaced values; each
/// distinct set contributes `(Q(A), P(A))`, and the non-dominated points are
/// returned sorted by `epsilon`. These points are the vertices of the concave
/// hull of `(Q(A), P(A))` over all subsets `A`.
pub fn mcr_frontier_discrete(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    resolution: usize,
) -> Result<Vec<McrPoint>> {
    if p.len() != q.len() {
        return Err(Error::SupportMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let (pw, qw) = (p.weights(), q.weights());
    // ids carrying no mass in either distribution never change (Q(A), P(A))
    let ratios: Vec<Option<f64>> = pw
        .iter()
        .zip(qw)
        .map(|(pi, qi)| match (*pi > 0.0, *qi > 0.0) {
            (false, false) => None,
            (_, false) => Some(f64::INFINITY),
            _ => Some(pi / qi),
        })
        .collect();

    let mut thresholds: Vec<f64> = ratios.iter().flatten().copied().collect();
    let finite: Vec<f64> = thresholds
        .iter()
        .copied()
        .filter(|r| r.is_finite() && *r > 0.0)
        .collect();
    if let (Some(lo), Some(hi)) = (
        finite.iter().copied().reduce(f64::min),
        finite.iter().copied().reduce(f64::max),
    ) {
        if resolution >= 2 && hi > lo {
            let (llo, lhi) = (lo.ln(), hi.ln());
            thresholds.extend(
                (0..resolution)
                    .map(|i| (llo + (lhi - llo) * i as f64 / (resolution - 1) as f64).exp()),
            );
        }
    }
    thresholds.push(f64::INFINITY);
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();

    let mut sets: Vec<Vec<bool>> = Vec::new();
    // the empty set
    sets.push(vec![false; pw.len()]);
    for tau in thresholds {
        let mask: Vec<bool> = ratios.iter().map(|r| r.is_some_and(|r| r >= tau)).collect();
        if sets.last() != Some(&mask) {
            sets.push(mask);
        }
    }

    let mut pts: Vec<McrPoint> = sets.iter().map(|m| mass_point(pw, qw, m)).collect();
    pts.sort_by(|a, b| {
        a.epsilon
            .total_cmp(&b.epsilon)
            .then(a.delta.total_cmp(&b.delta))
    });
    pts.dedup();
    Ok(upper_left_staircase(&pts, |p| (p.epsilon, p.delta)))
}

/// `(Q(A), P(A))` summed in index order.
pub(crate) fn mass_point(p: &[f64], q: &[f64], mask: &[bool]) -> McrPoint {
    let mut epsilon = 0.0;
    let mut delta = 0.0;
    for i in 0..mask.len() {
        if mask[i] {
            epsilon += q[i];
            delta += p[i];
        }
    }
    McrPoint { epsilon, delta }
}
