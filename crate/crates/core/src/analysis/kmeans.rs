//! Lloyd's k-means with greedy k-means++ seeding.
//!
//! Seeding draws `2 + ⌊ln k⌋` candidates per step from the `D²` distribution
//! and keeps the one that lowers the potential most. Lloyd iterations stop
//! when an assignment pass changes nothing, or after `max_iter` passes.
//! A cluster that loses all its points is re-seeded at the point farthest
//! from its own centroid. All randomness comes from a ChaCha8 stream seeded
//! with `seed`, and every reduction runs in index order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    /// Lloyd passes performed.
    pub iterations: usize,
    pub converged: bool,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index drawn with probability proportional to `weights`.
fn weighted_pick(weights: &[f64], total: f64, rng: &mut ChaCha8Rng) -> usize {
    if total <= 0.0 {
        return rng.random_range(0..weights.len());
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
        }
        acc += w;
        if acc > target && w > 0.0 {
            return i;
        }
    }
    last_positive
}

fn seed_centroids(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let trials = 2 + (k as f64).ln().floor() as usize;
    let first = rng.random_range(0..n);
    let mut centroids = vec![points[first].clone()];
    let mut closest: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[first])).collect();
    let mut potential: f64 = closest.iter().sum();

    while centroids.len() < k {
        let mut best: Option<(usize, f64, Vec<f64>)> = None;
        for _ in 0..trials {
            let cand = weighted_pick(&closest, potential, rng);
            let updated: Vec<f64> = points
                .iter()
                .zip(&closest)
                .map(|(p, &c)| c.min(sq_dist(p, &points[cand])))
                .collect();
            let pot: f64 = updated.iter().sum();
            if best.as_ref().is_none_or(|(_, b, _)| pot < *b) {
                best = Some((cand, pot, updated));
            }
        }
        let (cand, pot, updated) = best.expect("at least two trials");
        centroids.push(points[cand].clone());
        closest = updated;
        potential = pot;
    }
    centroids
}

/// Nearest centroid per point (ties to the lower index) and its squared distance.
fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    points
        .iter()
        .map(|p| {
            let mut best = (0, f64::INFINITY);
            for (c, centroid) in centroids.iter().enumerate() {
                let d = sq_dist(p, centroid);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip()
}

fn update(
    points: &[Vec<f64>],
    assignments: &[usize],
    distances: &[f64],
    centroids: &mut [Vec<f64>],
) {
    let d = points[0].len();
    let k = centroids.len();
    let mut sums = vec![vec![0.0; d]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignments) {
        counts[a] += 1;
        for (s, v) in sums[a].iter_mut().zip(p) {
            *s += v;
        }
    }
    let mut taken = vec![false; points.len()];
    for c in 0..k {
        if counts[c] > 0 {
            let n = counts[c] as f64;
            centroids[c] = sums[c].iter().map(|s| s / n).collect();
            continue;
        }
        // Farthest point from its own centroid that has not been used yet.
        let far = (0..points.len())
            .filter(|&i| !taken[i])
            .fold(None::<usize>, |best, i| match best {
                Some(b) if distances[b] >= distances[i] => Some(b),
                _ => Some(i),
            });
        if let Some(i) = far {
            taken[i] = true;
            centroids[c] = points[i].clone();
        }
    }
}

pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, max_iter: usize) -> Result<KMeansResult> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument("k-means on an empty input".into()));
    }
    if k > points.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds the {} points",
            points.len()
        )));
    }
    let d = points[0].len();
    if let Some(i) = points.iter().position(|p| p.len() != d) {
        return Err(Error::DimensionMismatch {
            record: Some(i),
            expected: d,
            found: points[i].len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centroids(points, k, &mut rng);
    let (mut assignments, mut distances) = assign(points, &centroids);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        update(points, &assignments, &distances, &mut centroids);
        let (next, next_dist) = assign(points, &centroids);
        iterations += 1;
        distances = next_dist;
        if next == assignments {
            converged = true;
            break;
        }
        assignments = next;
    }
    Ok(KMeansResult {
        inertia: distances.iter().sum(),
        assignments,
        centroids,
        iterations,
        converged,
    })
}
