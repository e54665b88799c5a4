//! K-means discretization baseline.
//!
//! Both sample sets are pooled and clustered; the per-set cluster histograms
//! are then compared with the exact discrete curve.

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curve::{LambdaGrid, PrCurve};
use crate::data::SampleSet;
use crate::error::{Error, Result};
use crate::measures::{exact_pr_curve, DiscreteDistribution};

pub const MAX_ITERATIONS: usize = 300;
pub const DEFAULT_RESTARTS: usize = 10;
pub const DEFAULT_CLUSTERS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansModel {
    /// `k x d`, row-major.
    centroids: Vec<f64>,
    k: usize,
    dim: usize,
    wcss: f64,
}

impl KMeansModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn centroid(&self, j: usize) -> &[f64] {
        &self.centroids[j * self.dim..(j + 1) * self.dim]
    }

    /// Within-cluster sum of squares on the fitted data.
    pub fn wcss(&self) -> f64 {
        self.wcss
    }

    /// Nearest centroid; ties go to the lowest index.
    pub fn assign(&self, x: &[f64]) -> usize {
        nearest(&self.centroids, self.dim, x).0
    }

    /// Normalized cluster occupancy of `set`.
    pub fn histogram(&self, set: &SampleSet) -> Result<DiscreteDistribution> {
        if set.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: set.cols(),
            });
        }
        let mut counts = vec![0.0; self.k];
        for row in set.iter_rows() {
            counts[self.assign(row)] += 1.0;
        }
        DiscreteDistribution::from_counts(&counts)
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(centroids: &[f64], dim: usize, x: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.chunks_exact(dim).enumerate() {
        let d = sq_dist(c, x);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn plus_plus_seeds(data: &SampleSet, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = data.rows();
    let dim = data.cols();
    let mut centroids = Vec::with_capacity(k * dim);
    centroids.extend_from_slice(data.row(rng.random_range(0..n)));
    let mut dists: Vec<f64> = data
        .iter_rows()
        .map(|r| sq_dist(r, &centroids[..dim]))
        .collect();
    while centroids.len() < k * dim {
        let next = match WeightedIndex::new(&dists) {
            Ok(w) => w.sample(rng),
            // all remaining points coincide with a chosen seed
            Err(_) => rng.random_range(0..n),
        };
        let start = centroids.len();
        centroids.extend_from_slice(data.row(next));
        let c = &centroids[start..];
        for (d, r) in dists.iter_mut().zip(data.iter_rows()) {
            *d = d.min(sq_dist(r, c));
        }
    }
    centroids
}

/// Moves, for every empty cluster, the point of the largest cluster that lies
/// farthest from its centroid.
fn repair_empty(data: &SampleSet, centroids: &mut [f64], assignment: &mut [usize], k: usize) {
    let dim = data.cols();
    loop {
        let mut sizes = vec![0usize; k];
        assignment.iter().for_each(|a| sizes[*a] += 1);
        let Some(empty) = sizes.iter().position(|s| *s == 0) else {
            return;
        };
        let largest = (0..k)
            .max_by_key(|j| (sizes[*j], std::cmp::Reverse(*j)))
            .unwrap_or(0);
        if sizes[largest] <= 1 {
            return;
        }
        let c = centroids[largest * dim..(largest + 1) * dim].to_vec();
        let mut far = (usize::MAX, -1.0);
        for (i, row) in data.iter_rows().enumerate() {
            if assignment[i] == largest {
                let d = sq_dist(row, &c);
                if d > far.1 {
                    far = (i, d);
                }
            }
        }
        assignment[far.0] = empty;
        centroids[empty * dim..(empty + 1) * dim].copy_from_slice(data.row(far.0));
    }
}

fn update_centroids(data: &SampleSet, centroids: &mut [f64], assignment: &[usize], k: usize) {
    let dim = data.cols();
    let mut sums = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    for (row, &a) in data.iter_rows().zip(assignment) {
        counts[a] += 1;
        sums[a * dim..(a + 1) * dim]
            .iter_mut()
            .zip(row)
            .for_each(|(s, x)| *s += x);
    }
    for j in 0..k {
        if counts[j] > 0 {
            let inv = 1.0 / counts[j] as f64;
            for t in 0..dim {
                centroids[j * dim + t] = sums[j * dim + t] * inv;
            }
        }
    }
}

fn lloyd(data: &SampleSet, k: usize, rng: &mut ChaCha8Rng) -> KMeansModel {
    let dim = data.cols();
    let mut centroids = plus_plus_seeds(data, k, rng);
    let mut assignment = vec![usize::MAX; data.rows()];
    for _ in 0..MAX_ITERATIONS {
        let mut next: Vec<usize> = data
            .iter_rows()
            .map(|r| nearest(&centroids, dim, r).0)
            .collect();
        repair_empty(data, &mut centroids, &mut next, k);
        if next == assignment {
            break;
        }
        assignment = next;
        update_centroids(data, &mut centroids, &assignment, k);
    }
    let wcss = data
        .iter_rows()
        .map(|r| nearest(&centroids, dim, r).1)
        .sum();
    KMeansModel {
        centroids,
        k,
        dim,
        wcss,
    }
}

/// Lloyd iterations from k-means++ seeds, best of `restarts` runs by WCSS.
///
/// Restart `r` draws from stream `r` of `seed`; WCSS ties keep the lower
/// restart index.
pub fn fit_kmeans(pooled: &SampleSet, k: usize, seed: u64, restarts: usize) -> Result<KMeansModel> {
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    if restarts == 0 {
        return Err(Error::invalid("restarts must be positive"));
    }
    if pooled.rows() < k {
        return Err(Error::invalid(format!(
            "cannot fit {k} clusters to {} points",
            pooled.rows()
        )));
    }
    let runs: Vec<KMeansModel> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            lloyd(pooled, k, &mut rng)
        })
        .collect();
    let best = runs
        .into_iter()
        .reduce(|best, run| if run.wcss < best.wcss { run } else { best })
        .expect("at least one restart");
    Ok(best)
}

/// Clusters the pooled sets and compares their cluster histograms exactly.
pub fn histogram_prd(
    real: &SampleSet,
    fake: &SampleSet,
    k: usize,
    grid: &LambdaGrid,
    seed: u64,
) -> Result<PrCurve> {
    histogram_prd_with_restarts(real, fake, k, grid, seed, DEFAULT_RESTARTS)
}

pub fn histogram_prd_with_restarts(
    real: &SampleSet,
    fake: &SampleSet,
    k: usize,
    grid: &LambdaGrid,
    seed: u64,
    restarts: usize,
) -> Result<PrCurve> {
    let pooled = real.concat(fake)?;
    let model = fit_kmeans(&pooled, k, seed, restarts)?;
    let p = model.histogram(real)?;
    let q = model.histogram(fake)?;
    exact_pr_curve(&p, &q, grid)
}
