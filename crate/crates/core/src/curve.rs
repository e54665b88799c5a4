//! Precision-recall curve values shared by the exact and estimated routes.
//!
//! A curve is a list of `(lambda, alpha, beta)` triples where `lambda` is the
//! precision/recall ratio, `alpha` the precision and `beta` the recall. Points
//! are kept sorted by `lambda`; the optional endpoints sit at `lambda = 0` and
//! `lambda = +inf`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// One point of a precision-recall curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl PrPoint {
    pub fn new(lambda: f64, alpha: f64, beta: f64) -> Self {
        PrPoint {
            lambda,
            alpha,
            beta,
        }
    }
}

/// Strictly increasing set of positive ratios, with optional `0` / `+inf`
/// endpoint markers.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaGrid {
    values: Vec<f64>,
    endpoints: bool,
}

impl LambdaGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("lambda grid is empty"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::invalid(format!(
                "lambda grid values must be finite and positive, got {v}"
            )));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("lambda grid must be strictly increasing"));
        }
        Ok(LambdaGrid {
            values,
            endpoints: false,
        })
    }

    /// Same grid, also requesting the `lambda = 0` and `lambda = +inf` points.
    pub fn with_endpoints(mut self) -> Self {
        self.endpoints = true;
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn has_endpoints(&self) -> bool {
        self.endpoints
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid of reciprocals, re-sorted. Endpoint markers are kept.
    pub fn reciprocal(&self) -> Self {
        let values = self.values.iter().rev().map(|v| 1.0 / v).collect();
        LambdaGrid {
            values,
            endpoints: self.endpoints,
        }
    }
}

/// Angularly uniform grid: `lambda_i = tan(i * pi / (2 (resolution + 1)))`
/// for `i = 1..=resolution`.
///
/// The grid is closed under `lambda -> 1/lambda` up to rounding.
pub fn default_lambda_grid(resolution: usize) -> Result<LambdaGrid> {
    if resolution < 2 {
        return Err(Error::invalid(format!(
            "lambda grid resolution must be at least 2, got {resolution}"
        )));
    }
    let step = PI / (2.0 * (resolution as f64 + 1.0));
    let values = (1..=resolution).map(|i| (i as f64 * step).tan()).collect();
    LambdaGrid::new(values)
}

/// Resolution used when the caller does not choose one.
pub const DEFAULT_RESOLUTION: usize = 1001;

/// A precision-recall curve, sorted by `lambda`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PrCurve {
    points: Vec<PrPoint>,
}

impl PrCurve {
    /// Builds a curve, sorting by `lambda`.
    pub fn from_points(mut points: Vec<PrPoint>) -> Self {
        points.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        PrCurve { points }
    }

    pub fn points(&self) -> &[PrPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lambda).collect()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.alpha).collect()
    }

    pub fn betas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.beta).collect()
    }

    /// Maps `(lambda, alpha, beta)` to `(1/lambda, beta, alpha)`.
    ///
    /// The exact curve of `(P, Q)` sent through this map is the exact curve of
    /// `(Q, P)` on the reciprocal grid.
    pub fn swapped(&self) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| PrPoint::new(reciprocal(p.lambda), p.beta, p.alpha))
            .collect();
        PrCurve::from_points(points)
    }

    /// Largest precision reached by a curve point whose recall is at least
    /// `recall`, or 0 when no point reaches it.
    pub fn precision_at_recall(&self, recall: f64) -> f64 {
        self.points
            .iter()
            .filter(|p| p.beta >= recall)
            .map(|p| p.alpha)
            .fold(0.0, f64::max)
    }

    /// Largest recall reached by a curve point whose precision is at least
    /// `precision`, or 0 when no point reaches it.
    pub fn recall_at_precision(&self, precision: f64) -> f64 {
        self.points
            .iter()
            .filter(|p| p.alpha >= precision)
            .map(|p| p.beta)
            .fold(0.0, f64::max)
    }

    /// Point at `lambda`, matched exactly.
    pub fn at(&self, lambda: f64) -> Option<&PrPoint> {
        self.points.iter().find(|p| p.lambda == lambda)
    }

    /// Point whose `lambda` is closest to the requested value (log scale).
    pub fn nearest(&self, lambda: f64) -> Option<&PrPoint> {
        let target = lambda.ln();
        self.points
            .iter()
            .filter(|p| p.lambda > 0.0 && p.lambda.is_finite())
            .min_by(|a, b| {
                let da = (a.lambda.ln() - target).abs();
                let db = (b.lambda.ln() - target).abs();
                da.total_cmp(&db)
            })
    }
}

pub(crate) fn reciprocal(lambda: f64) -> f64 {
    if lambda == 0.0 {
        f64::INFINITY
    } else if lambda.is_infinite() {
        0.0
    } else {
        1.0 / lambda
    }
}

pub(crate) fn clamp_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}
