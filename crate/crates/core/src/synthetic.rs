//! Synthetic benchmarks with known precision-recall curves.
//!
//! Image classes are replaced by isotropic Gaussian clusters; see
//! [`ClusterGeometry`] for where their centers sit.

use std::f64::consts::SQRT_2;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::curve::{clamp_unit, LambdaGrid, PrCurve, PrPoint};
use crate::data::{PairedDataset, SampleSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureComponent {
    pub mean: Vec<f64>,
    pub stddev: f64,
    pub weight: f64,
}

/// Mixture of isotropic Gaussians.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    components: Vec<MixtureComponent>,
}

impl MixtureSpec {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        let dim = components
            .first()
            .map(|c| c.mean.len())
            .ok_or_else(|| Error::invalid("mixture has no components"))?;
        if dim == 0 {
            return Err(Error::invalid("component means must be nonempty"));
        }
        for (i, c) in components.iter().enumerate() {
            if c.mean.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.mean.len(),
                });
            }
            if !(c.stddev.is_finite() && c.stddev > 0.0) {
                return Err(Error::invalid(format!(
                    "component {i}: stddev must be positive"
                )));
            }
            if !(c.weight.is_finite() && c.weight >= 0.0) {
                return Err(Error::invalid(format!(
                    "component {i}: weight must be nonnegative"
                )));
            }
            if c.mean.iter().any(|m| !m.is_finite()) {
                return Err(Error::invalid(format!(
                    "component {i}: mean must be finite"
                )));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum: total });
        }
        Ok(MixtureSpec { components })
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components[0].mean.len()
    }
}

/// `n` i.i.d. draws; labels hold the component index.
pub fn sample_mixture(spec: &MixtureSpec, n: usize, seed: u64) -> Result<SampleSet> {
    sample_with(spec, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn sample_with(spec: &MixtureSpec, n: usize, rng: &mut ChaCha8Rng) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::invalid("sample count must be positive"));
    }
    let chooser = WeightedIndex::new(spec.components.iter().map(|c| c.weight))
        .map_err(|e| Error::invalid(format!("mixture weights: {e}")))?;
    let dim = spec.dim();
    let mut features = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let j = chooser.sample(rng);
        let c = &spec.components[j];
        for m in &c.mean {
            let z: f64 = rng.sample(StandardNormal);
            features.push(m + c.stddev * z);
        }
        labels.push(j as i32);
    }
    SampleSet::new(features, n, dim)?.with_labels(labels)
}

/// Maximum precision and recall of a rectangular reference curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TheoreticalCurveSpec {
    pub max_precision: f64,
    pub max_recall: f64,
}

impl TheoreticalCurveSpec {
    pub fn new(max_precision: f64, max_recall: f64) -> Result<Self> {
        for v in [max_precision, max_recall] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!(
                    "curve bounds must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(TheoreticalCurveSpec {
            max_precision,
            max_recall,
        })
    }
}

/// `alpha = min(lambda b, a)`, `beta = min(b, a / lambda)` with
/// `a = max_precision`, `b = max_recall`.
pub fn theoretical_rectangle_curve(spec: &TheoreticalCurveSpec, grid: &LambdaGrid) -> PrCurve {
    let (a, b) = (spec.max_precision, spec.max_recall);
    let mut points: Vec<PrPoint> = grid
        .values()
        .iter()
        .map(|&l| PrPoint::new(l, (l * b).min(a), b.min(a / l)))
        .collect();
    if grid.has_endpoints() {
        points.push(PrPoint::new(0.0, 0.0, b));
        points.push(PrPoint::new(f64::INFINITY, a, 0.0));
    }
    PrCurve::from_points(points)
}

/// Layout of the stand-in class clusters.
///
/// Axis 0 carries the role of a cluster: real-only clusters sit at
/// `-separation / 2`, shared ones at 0 and fake-only ones at `+separation / 2`
/// (in units of `sigma`). The remaining axes hold a binary lattice with
/// spacing `2 * separation`. Shared clusters get their own lattice site; the
/// `i`-th real-only and `i`-th fake-only clusters share one, so they are
/// exactly `separation` apart and every other pair is farther.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterGeometry {
    pub dim: usize,
    /// Minimum distance between cluster centers, in units of `sigma`.
    pub separation: f64,
    pub sigma: f64,
}

impl Default for ClusterGeometry {
    fn default() -> Self {
        ClusterGeometry {
            dim: 16,
            separation: 10.0,
            sigma: 1.0,
        }
    }
}

/// Cluster centers grouped by role.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterLayout {
    pub shared: Vec<Vec<f64>>,
    pub real_only: Vec<Vec<f64>>,
    pub fake_only: Vec<Vec<f64>>,
}

impl ClusterGeometry {
    fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::invalid("cluster dimension must be at least 2"));
        }
        if !(self.separation >= 10.0 && self.separation.is_finite()) {
            return Err(Error::invalid(
                "cluster separation must be at least 10 sigma",
            ));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid("sigma must be positive"));
        }
        Ok(())
    }

    fn site(&self, slot: usize, role: f64) -> Vec<f64> {
        let unit = self.separation * self.sigma;
        let mut c = vec![0.0; self.dim];
        c[0] = 0.5 * unit * role;
        for (t, x) in c.iter_mut().enumerate().skip(1) {
            if (slot >> (t - 1)) & 1 == 1 {
                *x = 2.0 * unit;
            }
        }
        c
    }

    pub fn layout(
        &self,
        shared: usize,
        real_only: usize,
        fake_only: usize,
    ) -> Result<ClusterLayout> {
        self.validate()?;
        let slots = shared + real_only.max(fake_only);
        let capacity_bits = (self.dim - 1).min(usize::BITS as usize - 1);
        if slots > 1usize << capacity_bits {
            return Err(Error::invalid(format!(
                "{slots} lattice sites do not fit in dimension {}",
                self.dim
            )));
        }
        Ok(ClusterLayout {
            shared: (0..shared).map(|i| self.site(i, 0.0)).collect(),
            real_only: (0..real_only)
                .map(|i| self.site(shared + i, -1.0))
                .collect(),
            fake_only: (0..fake_only).map(|i| self.site(shared + i, 1.0)).collect(),
        })
    }

    /// Mixture over `centers` with the given weights.
    pub fn mixture(&self, centers: &[(&[f64], f64)]) -> Result<MixtureSpec> {
        MixtureSpec::new(
            centers
                .iter()
                .map(|&(mean, weight)| MixtureComponent {
                    mean: mean.to_vec(),
                    stddev: self.sigma,
                    weight,
                })
                .collect(),
        )
    }

    fn uniform(&self, groups: &[&[Vec<f64>]]) -> Result<MixtureSpec> {
        let centers: Vec<&[f64]> = groups
            .iter()
            .flat_map(|g| g.iter().map(|c| c.as_slice()))
            .collect();
        let w = 1.0 / centers.len() as f64;
        self.mixture(&centers.iter().map(|c| (*c, w)).collect::<Vec<_>>())
    }
}

/// A generated dataset together with its reference curve.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub data: PairedDataset,
    pub spec: TheoreticalCurveSpec,
}

fn paired_draws(
    real: &MixtureSpec,
    fake: &MixtureSpec,
    n: usize,
    seed: u64,
) -> Result<PairedDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(101);
    let real = sample_with(real, n, &mut rng)?;
    rng.set_stream(102);
    let fake = sample_with(fake, n, &mut rng)?;
    PairedDataset::new(real, fake)
}

/// Number of reference classes in the class-subset benchmark.
pub const SUBSET_REFERENCE_CLASSES: usize = 5;

/// Reference set uniform over classes `0..5`, compared set uniform over
/// classes `0..q`; `5 * per_class` samples on each side.
pub fn class_subset_experiment(
    q: usize,
    per_class: usize,
    seed: u64,
    geometry: &ClusterGeometry,
) -> Result<Experiment> {
    if !(1..=9).contains(&q) {
        return Err(Error::invalid(format!(
            "class count q must be in 1..=9, got {q}"
        )));
    }
    if per_class == 0 {
        return Err(Error::invalid("per-class count must be positive"));
    }
    let total = SUBSET_REFERENCE_CLASSES;
    let common = q.min(total);
    let layout = geometry.layout(common, total - common, q - common)?;
    let data = paired_draws(
        &geometry.uniform(&[&layout.shared, &layout.real_only])?,
        &geometry.uniform(&[&layout.shared, &layout.fake_only])?,
        total * per_class,
        seed,
    )?;
    let qf = q as f64;
    let spec = TheoreticalCurveSpec::new((5.0 / qf).min(1.0), (qf / 5.0).min(1.0))?;
    Ok(Experiment { data, spec })
}

/// Both sets uniform over `total_classes` clusters, sharing exactly
/// `ratio * total_classes` of them.
pub fn class_overlap_experiment(
    total_classes: usize,
    ratio: f64,
    per_class: usize,
    seed: u64,
    geometry: &ClusterGeometry,
) -> Result<Experiment> {
    if total_classes == 0 || per_class == 0 {
        return Err(Error::invalid(
            "class and per-class counts must be positive",
        ));
    }
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::invalid(format!(
            "overlap ratio must be in [0, 1], got {ratio}"
        )));
    }
    let shared_f = ratio * total_classes as f64;
    let shared = shared_f.round();
    if (shared_f - shared).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "ratio {ratio} of {total_classes} classes is not a whole number of classes"
        )));
    }
    let shared = shared as usize;
    let own = total_classes - shared;
    let layout = geometry.layout(shared, own, own)?;
    let data = paired_draws(
        &geometry.uniform(&[&layout.shared, &layout.real_only])?,
        &geometry.uniform(&[&layout.shared, &layout.fake_only])?,
        total_classes * per_class,
        seed,
    )?;
    let spec = TheoreticalCurveSpec::new(ratio, ratio)?;
    Ok(Experiment { data, spec })
}

/// Reference `weight_a * A + (1 - weight_a) * B` against `A` alone.
///
/// The reference curve is `alpha = min(weight_a lambda, 1)`,
/// `beta = min(weight_a, 1 / lambda)`: full precision up to recall `weight_a`.
pub fn reweighting_experiment(
    weight_a: f64,
    per_side: usize,
    seed: u64,
    geometry: &ClusterGeometry,
) -> Result<Experiment> {
    if !(weight_a > 0.0 && weight_a < 1.0) {
        return Err(Error::invalid(format!(
            "weight of A must be in (0, 1), got {weight_a}"
        )));
    }
    if per_side == 0 {
        return Err(Error::invalid("sample count must be positive"));
    }
    let layout = geometry.layout(1, 1, 0)?;
    let (a, b) = (layout.shared[0].as_slice(), layout.real_only[0].as_slice());
    let data = paired_draws(
        &geometry.mixture(&[(a, weight_a), (b, 1.0 - weight_a)])?,
        &geometry.mixture(&[(a, 1.0)])?,
        per_side,
        seed,
    )?;
    let spec = TheoreticalCurveSpec::new(1.0, weight_a)?;
    Ok(Experiment { data, spec })
}

/// `P(Z <= x)` for a standard normal `Z`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Optimal curve between `N(mu1, sigma^2)` (reference) and `N(mu2, sigma^2)`.
///
/// The likelihood-ratio test `lambda p(z) >= q(z)` accepts
/// `z <= z* = (mu1 + mu2) / 2 + sigma^2 ln(lambda) / (mu2 - mu1)` when
/// `mu2 > mu1`; `alpha = lambda P(reject | P) + Q(accept)`.
pub fn gaussian_optimal_curve(
    mu1: f64,
    mu2: f64,
    sigma: f64,
    grid: &LambdaGrid,
) -> Result<PrCurve> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("sigma must be positive"));
    }
    if !(mu1.is_finite() && mu2.is_finite()) {
        return Err(Error::invalid("means must be finite"));
    }
    // reflect so that the compared mean is the larger one
    let (m1, m2) = if mu2 >= mu1 { (mu1, mu2) } else { (-mu1, -mu2) };
    let gap = m2 - m1;
    let mut points: Vec<PrPoint> = grid
        .values()
        .iter()
        .map(|&l| {
            let alpha = if gap == 0.0 {
                l.min(1.0)
            } else {
                let z = 0.5 * (m1 + m2) + sigma * sigma * l.ln() / gap;
                let miss_real = normal_cdf(-(z - m1) / sigma);
                let accept_fake = normal_cdf((z - m2) / sigma);
                l * miss_real + accept_fake
            };
            PrPoint::new(l, clamp_unit(alpha), clamp_unit(alpha / l))
        })
        .collect();
    if grid.has_endpoints() {
        points.push(PrPoint::new(0.0, 0.0, 1.0));
        points.push(PrPoint::new(f64::INFINITY, 1.0, 0.0));
    }
    Ok(PrCurve::from_points(points))
}

/// Draws `n` samples of `N(mean, sigma^2)` as a 1-column set.
pub fn sample_gaussian_1d(mean: f64, sigma: f64, n: usize, seed: u64) -> Result<SampleSet> {
    let spec = MixtureSpec::new(vec![MixtureComponent {
        mean: vec![mean],
        stddev: sigma,
        weight: 1.0,
    }])?;
    sample_mixture(&spec, n, seed)
}
