//! External cluster-validity scores: homogeneity, completeness, V-measure,
//! adjusted Rand index and adjusted mutual information.
//!
//! Entropies use natural logarithms. AMI uses the expected mutual information
//! under the permutation (hypergeometric) model and normalizes by
//! `max(H(truth), H(pred))`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Denominators below this (relative to the entropy scale) are treated as zero.
const DEGENERATE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterScores {
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
    pub ari: f64,
    pub ami: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    pub k: usize,
    pub seed: u64,
    pub iterations: usize,
    #[serde(flatten)]
    pub scores: ClusterScores,
}

/// Dense contingency table with its marginals.
#[derive(Debug, Clone)]
pub struct Contingency {
    pub n: usize,
    /// `cells[i][j]`: points of class `i` placed in cluster `j`.
    pub cells: Vec<Vec<usize>>,
    pub class_sizes: Vec<usize>,
    pub cluster_sizes: Vec<usize>,
}

fn relabel(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut ids = BTreeMap::new();
    for &l in labels {
        let next = ids.len();
        ids.entry(l).or_insert(next);
    }
    // Dense ids in ascending label order.
    for (i, v) in ids.values_mut().enumerate() {
        *v = i;
    }
    (labels.iter().map(|l| ids[l]).collect(), ids.len())
}

impl Contingency {
    pub fn new(truth: &[usize], pred: &[usize]) -> Result<Self> {
        if truth.len() != pred.len() {
            return Err(Error::DimensionMismatch {
                record: None,
                expected: truth.len(),
                found: pred.len(),
            });
        }
        if truth.is_empty() {
            return Err(Error::InvalidArgument("cluster metrics on empty labelings".into()));
        }
        let (t, nc) = relabel(truth);
        let (p, nk) = relabel(pred);
        let mut cells = vec![vec![0usize; nk]; nc];
        for (&i, &j) in t.iter().zip(&p) {
            cells[i][j] += 1;
        }
        let class_sizes = cells.iter().map(|row| row.iter().sum()).collect();
        let cluster_sizes = (0..nk).map(|j| cells.iter().map(|row| row[j]).sum()).collect();
        Ok(Contingency {
            n: truth.len(),
            cells,
            class_sizes,
            cluster_sizes,
        })
    }
}

fn entropy(sizes: &[usize], n: usize) -> f64 {
    let ln_n = (n as f64).ln();
    sizes
        .iter()
        .filter(|&&a| a > 0)
        .map(|&a| (a as f64 / n as f64) * (ln_n - (a as f64).ln()))
        .sum()
}

fn mutual_info(c: &Contingency) -> f64 {
    let ln_n = (c.n as f64).ln();
    let mut mi = 0.0;
    for (i, row) in c.cells.iter().enumerate() {
        let ln_a = (c.class_sizes[i] as f64).ln();
        for (j, &nij) in row.iter().enumerate() {
            if nij == 0 {
                continue;
            }
            let ln_b = (c.cluster_sizes[j] as f64).ln();
            mi += (nij as f64 / c.n as f64) * ((((nij as f64).ln() - ln_a) - ln_b) + ln_n);
        }
    }
    mi.max(0.0)
}

fn comb2(x: usize) -> u128 {
    let x = x as u128;
    x * x.saturating_sub(1) / 2
}

pub fn adjusted_rand_index(c: &Contingency) -> f64 {
    let total = comb2(c.n);
    let index: u128 = c.cells.iter().flatten().map(|&v| comb2(v)).sum();
    let sum_a: u128 = c.class_sizes.iter().map(|&v| comb2(v)).sum();
    let sum_b: u128 = c.cluster_sizes.iter().map(|&v| comb2(v)).sum();
    if total == 0 {
        return 1.0;
    }
    let expected = sum_a as f64 * sum_b as f64 / total as f64;
    let max_index = (sum_a as f64 + sum_b as f64) / 2.0;
    if max_index == expected {
        // Both partitions are all-singletons or single-cluster in the same way.
        return 1.0;
    }
    (index as f64 - expected) / (max_index - expected)
}

fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Expected mutual information between random labelings with the same
/// marginals.
pub fn expected_mutual_info(c: &Contingency) -> f64 {
    let n = c.n;
    let lf = log_factorials(n);
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in &c.class_sizes {
        for &b in &c.cluster_sizes {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            for nij in lo..=hi {
                let x = nij as f64;
                let term = (x / nf) * ((nf * x) / (a as f64 * b as f64)).ln();
                let log_p = lf[a] + lf[b] + lf[n - a] + lf[n - b]
                    - lf[n]
                    - lf[nij]
                    - lf[a - nij]
                    - lf[b - nij]
                    - lf[n + nij - a - b];
                emi += term * log_p.exp();
            }
        }
    }
    emi
}

/// `(MI - E[MI]) / (max(H(U), H(V)) - E[MI])`. When the denominator
/// vanishes every permutation of the labels scores the maximum, which
/// happens only for two single-cluster or two all-singleton labelings; the
/// score is then 1.
pub fn adjusted_mutual_info(c: &Contingency) -> f64 {
    let mi = mutual_info(c);
    let emi = expected_mutual_info(c);
    let normalizer = entropy(&c.class_sizes, c.n).max(entropy(&c.cluster_sizes, c.n));
    let denominator = normalizer - emi;
    if denominator.abs() <= DEGENERATE_EPS * normalizer.max(1.0) {
        return 1.0;
    }
    (mi - emi) / denominator
}

/// Homogeneity, completeness and their harmonic mean.
pub fn homogeneity_completeness_v(c: &Contingency) -> (f64, f64, f64) {
    let h_class = entropy(&c.class_sizes, c.n);
    let h_cluster = entropy(&c.cluster_sizes, c.n);
    let mi = mutual_info(c);
    let h = if h_class == 0.0 { 1.0 } else { (mi / h_class).clamp(0.0, 1.0) };
    let comp = if h_cluster == 0.0 {
        1.0
    } else {
        (mi / h_cluster).clamp(0.0, 1.0)
    };
    let v = if h + comp == 0.0 { 0.0 } else { 2.0 * h * comp / (h + comp) };
    (h, comp, v)
}

pub fn cluster_metrics(truth: &[usize], pred: &[usize]) -> Result<ClusterScores> {
    let c = Contingency::new(truth, pred)?;
    let (homogeneity, completeness, v_measure) = homogeneity_completeness_v(&c);
    Ok(ClusterScores {
        homogeneity,
        completeness,
        v_measure,
        ari: adjusted_rand_index(&c),
        ami: adjusted_mutual_info(&c),
    })
}
