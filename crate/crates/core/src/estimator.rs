//! Classifier-based estimation of the precision-recall curve.
//!
//! Each pair `(X_i, Y_i)` sends one member to training and the other to the
//! test set, chosen by a fair coin. A classifier trained on the first half
//! scores the second; every observed score is used as a threshold, producing
//! empirical `(fpr, fnr)` pairs, and
//! `alpha_lambda = min (lambda fpr + fnr)` over those pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curve::{clamp_unit, LambdaGrid, PrCurve, PrPoint};
use crate::data::{LabeledTrainSet, PairedDataset};
use crate::ensemble::{self, EnsembleModel, TrainingConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub train: LabeledTrainSet,
    pub test: LabeledTrainSet,
}

/// Random coin flips deciding, per pair, which member goes to training.
///
/// `U_i = 1` sends `(X_i, 1)` to train and `(Y_i, 0)` to test; `U_i = 0` does
/// the opposite.
pub fn create_train_test(data: &PairedDataset, seed: u64) -> Result<SplitResult> {
    let n = data.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 sample pairs, got {n}"
        )));
    }
    let d = data.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_x = Vec::with_capacity(n * d);
    let mut test_x = Vec::with_capacity(n * d);
    let mut train_u = Vec::with_capacity(n);
    let mut test_u = Vec::with_capacity(n);
    for i in 0..n {
        let u: bool = rng.random_bool(0.5);
        let (real, fake) = (data.real().row(i), data.fake().row(i));
        if u {
            train_x.extend_from_slice(real);
            test_x.extend_from_slice(fake);
        } else {
            train_x.extend_from_slice(fake);
            test_x.extend_from_slice(real);
        }
        train_u.push(u8::from(u));
        test_u.push(u8::from(!u));
    }
    Ok(SplitResult {
        train: LabeledTrainSet::new(train_x, d, train_u)?,
        test: LabeledTrainSet::new(test_x, d, test_u)?,
    })
}

/// Classifier scores on held-out samples with their origin (1 = reference).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredTestSet {
    entries: Vec<(f64, u8)>,
}

impl ScoredTestSet {
    pub fn new(entries: Vec<(f64, u8)>) -> Result<Self> {
        if entries.iter().any(|(_, o)| *o > 1) {
            return Err(Error::invalid("origins must be 0 or 1"));
        }
        if let Some((s, _)) = entries.iter().find(|(s, _)| !s.is_finite()) {
            return Err(Error::invalid(format!("score {s} is not finite")));
        }
        let reals = entries.iter().filter(|(_, o)| *o == 1).count();
        if reals == 0 || reals == entries.len() {
            return Err(Error::SingleClass(
                "scored set must contain both origins".into(),
            ));
        }
        Ok(ScoredTestSet { entries })
    }

    pub fn from_parts(scores: &[f64], origins: &[u8]) -> Result<Self> {
        if scores.len() != origins.len() {
            return Err(Error::DimensionMismatch {
                expected: scores.len(),
                found: origins.len(),
            });
        }
        Self::new(
            scores
                .iter()
                .copied()
                .zip(origins.iter().copied())
                .collect(),
        )
    }

    pub fn entries(&self) -> &[(f64, u8)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Empirical type I / type II error rates at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRatePoint {
    /// Fraction of reference samples scored below the threshold.
    pub fpr: f64,
    /// Fraction of compared samples scored at or above the threshold.
    pub fnr: f64,
}

impl ErrorRatePoint {
    pub fn new(fpr: f64, fnr: f64) -> Self {
        ErrorRatePoint { fpr, fnr }
    }
}

/// One error-rate point per distinct observed score `t`, using
/// `fpr(t) = #{real: s < t} / N1` and `fnr(t) = #{fake: s >= t} / N0`,
/// followed by the endpoints `(1, 0)` and `(0, 1)`.
pub fn error_rates_from_scores(scored: &ScoredTestSet) -> Vec<ErrorRatePoint> {
    let mut sorted = scored.entries().to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n_real = sorted.iter().filter(|(_, o)| *o == 1).count();
    let n_fake = sorted.len() - n_real;
    let (n_real_f, n_fake_f) = (n_real as f64, n_fake as f64);

    let mut points = Vec::new();
    // counts of samples strictly below the current threshold
    let mut real_below = 0usize;
    let mut fake_below = 0usize;
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i].0;
        points.push(ErrorRatePoint::new(
            real_below as f64 / n_real_f,
            (n_fake - fake_below) as f64 / n_fake_f,
        ));
        while i < sorted.len() && sorted[i].0 == t {
            if sorted[i].1 == 1 {
                real_below += 1;
            } else {
                fake_below += 1;
            }
            i += 1;
        }
    }
    points.push(ErrorRatePoint::new(1.0, 0.0));
    points.push(ErrorRatePoint::new(0.0, 1.0));
    points
}

/// Precision-recall curve from error-rate points: per `lambda`,
/// `alpha = min(lambda fpr + fnr)` and `beta = alpha / lambda`, both clamped
/// to `[0, 1]`.
///
/// Endpoint markers on the grid yield the `lambda -> 0` and `lambda -> inf`
/// limits of that minimization.
pub fn estimate_prd(error_rates: &[ErrorRatePoint], grid: &LambdaGrid) -> Result<PrCurve> {
    if error_rates.is_empty() {
        return Err(Error::invalid("no error-rate points"));
    }
    let mut points: Vec<PrPoint> = grid
        .values()
        .par_iter()
        .map(|&lambda| {
            let alpha = error_rates
                .iter()
                .map(|e| lambda * e.fpr + e.fnr)
                .fold(f64::INFINITY, f64::min);
            PrPoint::new(lambda, clamp_unit(alpha), clamp_unit(alpha / lambda))
        })
        .collect();

    if grid.has_endpoints() {
        let min_fnr = error_rates
            .iter()
            .map(|e| e.fnr)
            .fold(f64::INFINITY, f64::min);
        let min_fpr = error_rates
            .iter()
            .map(|e| e.fpr)
            .fold(f64::INFINITY, f64::min);
        // beta_0: cheapest fpr among points with the smallest fnr
        let beta_zero = if min_fnr > 0.0 {
            1.0
        } else {
            error_rates
                .iter()
                .filter(|e| e.fnr == 0.0)
                .map(|e| e.fpr)
                .fold(f64::INFINITY, f64::min)
        };
        // alpha_inf: cheapest fnr among points with zero fpr
        let alpha_inf = if min_fpr > 0.0 {
            1.0
        } else {
            error_rates
                .iter()
                .filter(|e| e.fpr == 0.0)
                .map(|e| e.fnr)
                .fold(f64::INFINITY, f64::min)
        };
        points.push(PrPoint::new(
            0.0,
            clamp_unit(min_fnr),
            clamp_unit(beta_zero),
        ));
        points.push(PrPoint::new(
            f64::INFINITY,
            clamp_unit(alpha_inf),
            clamp_unit(min_fpr),
        ));
    }
    Ok(PrCurve::from_points(points))
}

/// Everything produced by one estimation run.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub curve: PrCurve,
    pub model: EnsembleModel,
    pub scored: ScoredTestSet,
}

/// Split, train, score the held-out half, sweep thresholds and minimize.
///
/// The split uses stream 0 of `config.seed`; ensemble members use the
/// following streams.
pub fn estimate_pr_curve(
    data: &PairedDataset,
    config: &TrainingConfig,
    grid: &LambdaGrid,
) -> Result<Estimate> {
    if data.len() < 4 {
        return Err(Error::invalid(format!(
            "need at least 4 sample pairs, got {}",
            data.len()
        )));
    }
    let split = create_train_test(data, config.seed)?;
    let model = ensemble::train(&split.train, config)?;
    let scores = ensemble::predict(&model, split.test.features(), split.test.cols())?;
    let scored = ScoredTestSet::from_parts(&scores, split.test.targets())?;
    let rates = error_rates_from_scores(&scored);
    let curve = estimate_prd(&rates, grid)?;
    Ok(Estimate {
        curve,
        model,
        scored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::default_lambda_grid;
    use crate::data::SampleSet;
    use proptest::prelude::*;

    fn paired(n: usize) -> PairedDataset {
        let real = SampleSet::new((0..n).map(|i| i as f64).collect(), n, 1).unwrap();
        let fake = SampleSet::new((0..n).map(|i| -(i as f64) - 1.0).collect(), n, 1).unwrap();
        PairedDataset::new(real, fake).unwrap()
    }

    #[test]
    fn split_is_complementary_and_deterministic() {
        let data = paired(4);
        let s = create_train_test(&data, 11).unwrap();
        assert_eq!(s.train.len(), 4);
        assert_eq!(s.test.len(), 4);
        for i in 0..4 {
            assert_eq!(s.train.targets()[i] + s.test.targets()[i], 1);
            let (tr, te) = (s.train.row(i)[0], s.test.row(i)[0]);
            if s.train.targets()[i] == 1 {
                assert_eq!((tr, te), (i as f64, -(i as f64) - 1.0));
            } else {
                assert_eq!((te, tr), (i as f64, -(i as f64) - 1.0));
            }
        }
        assert_eq!(s, create_train_test(&data, 11).unwrap());
        assert!(create_train_test(&paired(1), 0).is_err());
    }

    #[test]
    fn split_coin_is_fair() {
        let data = paired(10_000);
        let s = create_train_test(&data, 5).unwrap();
        let frac = s.train.count_of(1) as f64 / 10_000.0;
        assert!((0.47..=0.53).contains(&frac), "{frac}");
    }

    fn contains(points: &[ErrorRatePoint], fpr: f64, fnr: f64) -> bool {
        points.iter().any(|p| p.fpr == fpr && p.fnr == fnr)
    }

    #[test]
    fn error_rates_for_perfect_scores() {
        let s = ScoredTestSet::from_parts(&[0.9, 0.8, 0.1, 0.2], &[1, 1, 0, 0]).unwrap();
        let rates = error_rates_from_scores(&s);
        assert!(contains(&rates, 0.0, 0.0));
    }

    #[test]
    fn error_rates_for_constant_scores() {
        let s = ScoredTestSet::from_parts(&[0.4; 4], &[1, 0, 1, 0]).unwrap();
        let rates = error_rates_from_scores(&s);
        assert_eq!(
            rates,
            vec![
                ErrorRatePoint::new(0.0, 1.0),
                ErrorRatePoint::new(1.0, 0.0),
                ErrorRatePoint::new(0.0, 1.0)
            ]
        );
    }

    #[test]
    fn error_rates_for_inverted_scores() {
        let s = ScoredTestSet::from_parts(&[0.3, 0.7], &[1, 0]).unwrap();
        let rates = error_rates_from_scores(&s);
        assert_eq!(rates[0], ErrorRatePoint::new(0.0, 1.0));
        assert_eq!(rates[1], ErrorRatePoint::new(1.0, 1.0));
        assert!(contains(&rates, 1.0, 0.0));
    }

    #[test]
    fn single_origin_rejected() {
        assert!(ScoredTestSet::from_parts(&[0.1, 0.2], &[1, 1]).is_err());
        assert!(ScoredTestSet::from_parts(&[0.1, 0.2], &[0, 0]).is_err());
    }

    #[test]
    fn estimate_examples() {
        let grid = default_lambda_grid(21).unwrap();
        let c = estimate_prd(
            &[ErrorRatePoint::new(0.0, 0.0), ErrorRatePoint::new(1.0, 0.0)],
            &grid,
        )
        .unwrap();
        assert!(c.points().iter().all(|p| p.alpha == 0.0 && p.beta == 0.0));

        let c = estimate_prd(
            &[ErrorRatePoint::new(0.0, 1.0), ErrorRatePoint::new(1.0, 0.0)],
            &grid,
        )
        .unwrap();
        for p in c.points() {
            assert!((p.alpha - p.lambda.min(1.0)).abs() < 1e-12);
            assert!((p.beta - (1.0 / p.lambda).min(1.0)).abs() < 1e-12);
        }

        let one = LambdaGrid::new(vec![1.0]).unwrap();
        let c = estimate_prd(&[ErrorRatePoint::new(0.5, 0.5)], &one).unwrap();
        assert_eq!((c.points()[0].alpha, c.points()[0].beta), (1.0, 1.0));

        assert!(estimate_prd(&[], &one).is_err());
    }

    #[test]
    fn estimate_endpoints() {
        let grid = LambdaGrid::new(vec![1.0]).unwrap().with_endpoints();
        let rates = [
            ErrorRatePoint::new(0.6, 0.0),
            ErrorRatePoint::new(0.0, 1.0),
            ErrorRatePoint::new(1.0, 0.0),
        ];
        let c = estimate_prd(&rates, &grid).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.points()[0], PrPoint::new(0.0, 0.0, 0.6));
        assert_eq!(c.points()[2], PrPoint::new(f64::INFINITY, 1.0, 0.0));
    }

    fn rates_strategy() -> impl Strategy<Value = Vec<ErrorRatePoint>> {
        prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..30).prop_map(|v| {
            v.into_iter()
                .map(|(a, b)| ErrorRatePoint::new(a, b))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn estimate_is_monotone_and_lipschitz(rates in rates_strategy()) {
            let grid = default_lambda_grid(50).unwrap();
            let c = estimate_prd(&rates, &grid).unwrap();
            for w in c.points().windows(2) {
                prop_assert!(w[1].alpha >= w[0].alpha - 1e-12);
                prop_assert!(w[1].beta <= w[0].beta + 1e-12);
                prop_assert!(w[1].alpha - w[0].alpha <= (w[1].lambda - w[0].lambda) + 1e-12);
            }
        }

        #[test]
        fn more_points_never_raise_alpha(rates in rates_strategy(), extra in rates_strategy()) {
            let grid = default_lambda_grid(30).unwrap();
            let base = estimate_prd(&rates, &grid).unwrap();
            let mut all = rates.clone();
            all.extend(extra);
            let more = estimate_prd(&all, &grid).unwrap();
            for (a, b) in base.points().iter().zip(more.points()) {
                prop_assert!(b.alpha <= a.alpha);
                prop_assert!(b.beta <= a.beta);
            }
        }
    }
}
