//! Brute-force reference implementations for the cluster scores.
//!
//! Written independently of the library: label counts go through hash maps,
//! the Rand index is counted over all point pairs, and the expected mutual
//! information uses exact integer binomials instead of log-factorials.

#![allow(dead_code)]

use std::collections::HashMap;

fn counts(labels: &[usize]) -> HashMap<usize, usize> {
    let mut out = HashMap::new();
    for &l in labels {
        *out.entry(l).or_insert(0) += 1;
    }
    out
}

pub fn entropy(labels: &[usize]) -> f64 {
    let n = labels.len() as f64;
    counts(labels)
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

pub fn mutual_info(truth: &[usize], pred: &[usize]) -> f64 {
    let n = truth.len() as f64;
    let a = counts(truth);
    let b = counts(pred);
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    for (&t, &p) in truth.iter().zip(pred) {
        *joint.entry((t, p)).or_insert(0) += 1;
    }
    joint
        .iter()
        .map(|(&(t, p), &nij)| {
            let pij = nij as f64 / n;
            pij * (pij / ((a[&t] as f64 / n) * (b[&p] as f64 / n))).ln()
        })
        .sum()
}

pub fn homogeneity(truth: &[usize], pred: &[usize]) -> f64 {
    let h = entropy(truth);
    if h == 0.0 {
        1.0
    } else {
        mutual_info(truth, pred) / h
    }
}

pub fn completeness(truth: &[usize], pred: &[usize]) -> f64 {
    homogeneity(pred, truth)
}

pub fn v_measure(truth: &[usize], pred: &[usize]) -> f64 {
    let h = homogeneity(truth, pred);
    let c = completeness(truth, pred);
    if h + c == 0.0 {
        0.0
    } else {
        2.0 * h * c / (h + c)
    }
}

/// Adjusted Rand index from the pair-confusion counts over all `n(n-1)/2`
/// pairs.
pub fn ari(truth: &[usize], pred: &[usize]) -> f64 {
    let n = truth.len();
    let (mut both, mut only_truth, mut only_pred, mut neither) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..n {
        for j in i + 1..n {
            match (truth[i] == truth[j], pred[i] == pred[j]) {
                (true, true) => both += 1.0,
                (true, false) => only_truth += 1.0,
                (false, true) => only_pred += 1.0,
                (false, false) => neither += 1.0,
            }
        }
    }
    if only_truth == 0.0 && only_pred == 0.0 {
        return 1.0;
    }
    2.0 * (both * neither - only_truth * only_pred)
        / ((both + only_truth) * (only_truth + neither) + (both + only_pred) * (only_pred + neither))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Expected mutual information under the hypergeometric model, summing
/// `P(n_ij) = C(a, n_ij) C(N - a, b - n_ij) / C(N, b)` directly.
pub fn expected_mutual_info(truth: &[usize], pred: &[usize]) -> f64 {
    let n = truth.len();
    let nf = n as f64;
    let a_sizes: Vec<usize> = counts(truth).into_values().collect();
    let b_sizes: Vec<usize> = counts(pred).into_values().collect();
    let mut emi = 0.0;
    for &a in &a_sizes {
        for &b in &b_sizes {
            let total = binomial(n, b) as f64;
            for nij in 1..=a.min(b) {
                let ways = binomial(a, nij) * binomial(n - a, b - nij);
                if ways == 0 {
                    continue;
                }
                let p = ways as f64 / total;
                let x = nij as f64;
                emi += p * (x / nf) * (nf * x / (a as f64 * b as f64)).ln();
            }
        }
    }
    emi
}

/// AMI with max-entropy normalization. Vanishing denominators (two
/// single-cluster or two all-singleton labelings) score 1.
pub fn ami(truth: &[usize], pred: &[usize]) -> f64 {
    let mi = mutual_info(truth, pred);
    let emi = expected_mutual_info(truth, pred);
    let norm = entropy(truth).max(entropy(pred));
    let den = norm - emi;
    if den.abs() <= 1e-12 * norm.max(1.0) {
        return 1.0;
    }
    (mi - emi) / den
}
