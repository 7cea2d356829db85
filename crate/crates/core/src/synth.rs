//! Synthetic feature sets with a fitted linear head.
//!
//! Each category is an isotropic unit-variance Gaussian in `ℝ^m`. Category
//! means are `separation / √2` times independent random unit vectors, so two
//! means sit about `separation` apart. With `support` set, each mean direction
//! lives on that many randomly chosen coordinates and is zero elsewhere. The head is a multinomial logistic
//! regression trained by full-batch gradient descent from zero weights for a
//! fixed number of steps. Features and weights are rounded to `f32` so the
//! in-memory data equals what the interchange formats store.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::interchange::{FeatureRecord, FeatureSet, HeadParams};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_categories: usize,
    pub per_category: usize,
    pub m: usize,
    pub separation: f64,
    pub seed: u64,
    /// Number of coordinates carrying each category's mean offset; `None`
    /// spreads it over all `m` coordinates.
    pub support: Option<usize>,
    /// Gradient-descent steps for the head.
    pub steps: usize,
}

impl SynthConfig {
    pub fn new(n_categories: usize, per_category: usize, m: usize, separation: f64, seed: u64) -> Self {
        SynthConfig {
            n_categories,
            per_category,
            m,
            separation,
            seed,
            support: None,
            steps: 200,
        }
    }
}

fn quantize(v: f64) -> f64 {
    f64::from(v as f32)
}

pub fn generate(config: &SynthConfig) -> Result<(FeatureSet, HeadParams)> {
    let &SynthConfig {
        n_categories,
        per_category,
        m,
        separation,
        seed,
        support,
        steps,
    } = config;
    if n_categories == 0 || per_category == 0 || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "counts must be positive (categories {n_categories}, per category {per_category}, m {m})"
        )));
    }
    if !separation.is_finite() || separation < 0.0 {
        return Err(Error::InvalidArgument(format!("separation {separation} must be finite and >= 0")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = separation / std::f64::consts::SQRT_2;
    let support = support.unwrap_or(m);
    if support == 0 || support > m {
        return Err(Error::InvalidArgument(format!("support {support} outside 1..={m}")));
    }
    let means: Vec<Vec<f64>> = (0..n_categories)
        .map(|_| {
            let active = rand::seq::index::sample(&mut rng, m, support);
            let mut dir = vec![0.0; m];
            for j in active.iter() {
                dir[j] = StandardNormal.sample(&mut rng);
            }
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            dir.into_iter().map(|v| radius * v / norm).collect()
        })
        .collect();

    let cat_width = (n_categories - 1).to_string().len();
    let idx_width = (per_category - 1).to_string().len();
    let mut objects = Vec::with_capacity(n_categories * per_category);
    for (c, mean) in means.iter().enumerate() {
        for i in 0..per_category {
            let features = mean
                .iter()
                .map(|&mu| {
                    let noise: f64 = StandardNormal.sample(&mut rng);
                    quantize(mu + noise)
                })
                .collect();
            objects.push(FeatureRecord {
                id: format!("c{c:0cat_width$}_{i:0idx_width$}"),
                label: c,
                features,
            });
        }
    }
    let set = FeatureSet::new(m, objects, None)?;
    let head = fit_softmax_head(&set, n_categories, steps)?;
    Ok((set, head))
}

/// Multinomial logistic regression by full-batch gradient descent from zero.
/// The step size is the reciprocal of the mean squared feature norm.
pub fn fit_softmax_head(set: &FeatureSet, n_categories: usize, steps: usize) -> Result<HeadParams> {
    let m = set.m();
    let objs = set.objects();
    let n = objs.len() as f64;
    let mean_sq_norm = objs
        .iter()
        .map(|o| 1.0 + o.features.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        / n.max(1.0);
    let step = 1.0 / mean_sq_norm.max(1.0);

    let mut weights = vec![vec![0.0; m]; n_categories];
    let mut biases = vec![0.0; n_categories];
    let mut probs = vec![0.0; n_categories];
    for _ in 0..steps {
        let mut grad_w = vec![vec![0.0; m]; n_categories];
        let mut grad_b = vec![0.0; n_categories];
        for obj in objs {
            let x = &obj.features;
            let mut max_logit = f64::NEG_INFINITY;
            for (c, p) in probs.iter_mut().enumerate() {
                *p = weights[c].iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + biases[c];
                max_logit = max_logit.max(*p);
            }
            let mut total = 0.0;
            for p in probs.iter_mut() {
                *p = (*p - max_logit).exp();
                total += *p;
            }
            for (c, p) in probs.iter().enumerate() {
                let err = p / total - if c == obj.label { 1.0 } else { 0.0 };
                grad_b[c] += err;
                for (g, v) in grad_w[c].iter_mut().zip(x) {
                    *g += err * v;
                }
            }
        }
        for c in 0..n_categories {
            biases[c] -= step * grad_b[c] / n;
            for (w, g) in weights[c].iter_mut().zip(&grad_w[c]) {
                *w -= step * g / n;
            }
        }
    }
    let weights = weights
        .into_iter()
        .map(|row| row.into_iter().map(quantize).collect())
        .collect();
    let biases = biases.into_iter().map(quantize).collect();
    HeadParams::new(m, weights, biases)
}
