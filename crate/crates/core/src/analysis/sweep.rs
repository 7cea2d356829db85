//! Incremental clustering evaluation: for each `k`, cluster the objects of the
//! first `k` categories (in ascending label order) into `k` clusters and score
//! the result against the labels.

use crate::error::{check_dims, Error, Result};

use super::kmeans::{kmeans, DEFAULT_MAX_ITER};
use super::metrics::{cluster_metrics, ClusterReport};

pub fn cluster_eval_sweep(
    points: &[Vec<f64>],
    labels: &[usize],
    k_range: impl IntoIterator<Item = usize>,
    seed: u64,
) -> Result<Vec<ClusterReport>> {
    check_dims(points.len(), labels.len())?;
    let mut categories = labels.to_vec();
    categories.sort_unstable();
    categories.dedup();

    let mut reports = Vec::new();
    for k in k_range {
        if k == 0 || k > categories.len() {
            return Err(Error::InvalidArgument(format!(
                "k = {k} outside 1..={} categories",
                categories.len()
            )));
        }
        let included = &categories[..k];
        let (subset, truth): (Vec<Vec<f64>>, Vec<usize>) = points
            .iter()
            .zip(labels)
            .filter(|(_, l)| included.binary_search(l).is_ok())
            .map(|(p, &l)| (p.clone(), l))
            .unzip();
        let result = kmeans(&subset, k, seed, DEFAULT_MAX_ITER)?;
        reports.push(ClusterReport {
            k,
            seed,
            iterations: result.iterations,
            scores: cluster_metrics(&truth, &result.assignments)?,
        });
    }
    Ok(reports)
}
