//! Semantic prototypes and the scalar quantities evaluated against them.
//!
//! A prototype for category `i` bundles the per-feature mean and population
//! standard deviation of the category's typical members with that category's
//! row of the classifier head (`omega`, `bias`). Typical members are the
//! objects whose label agrees with the head's Top-1 prediction.
//!
//! With `omega = Ω_i`, `mean = M_i`:
//!
//! * semantic value: `ẑ(a) = Σ_j ω_j a_j + b`
//! * prototypical distance: `δ(F) = Σ_j |ω_j| |f_j - μ_j|`
//! * object distance: `δ(F1, F2) = Σ_j |ω_j| |f1_j - f2_j|`
//! * typicality score: `1 / δ(F)`, infinite at the prototype itself
//!
//! `δ(F1, F2)` is a pseudometric: any zero entry in `omega` lets distinct
//! feature vectors sit at distance zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::interchange::{FeatureSet, HeadParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticPrototype {
    category: usize,
    mean: Vec<f64>,
    std_dev: Vec<f64>,
    omega: Vec<f64>,
    bias: f64,
    n_typical: usize,
}

impl SemanticPrototype {
    pub fn new(
        category: usize,
        mean: Vec<f64>,
        std_dev: Vec<f64>,
        omega: Vec<f64>,
        bias: f64,
        n_typical: usize,
    ) -> Result<Self> {
        let proto = SemanticPrototype {
            category,
            mean,
            std_dev,
            omega,
            bias,
            n_typical,
        };
        proto.validate()?;
        Ok(proto)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let m = self.mean.len();
        check_dims(m, self.std_dev.len())?;
        check_dims(m, self.omega.len())?;
        if m == 0 {
            return Err(Error::InvalidArgument("prototype with m = 0".into()));
        }
        if self.n_typical == 0 {
            return Err(Error::InvalidArgument("prototype with n_typical = 0".into()));
        }
        let finite = self
            .mean
            .iter()
            .chain(&self.std_dev)
            .chain(&self.omega)
            .all(|v| v.is_finite())
            && self.bias.is_finite();
        if !finite {
            return Err(Error::InvalidArgument(format!(
                "prototype {} has non-finite entries",
                self.category
            )));
        }
        if self.std_dev.iter().any(|&s| s < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "prototype {} has negative standard deviation",
                self.category
            )));
        }
        Ok(())
    }

    pub fn category(&self) -> usize {
        self.category
    }

    pub fn m(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std_dev(&self) -> &[f64] {
        &self.std_dev
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn n_typical(&self) -> usize {
        self.n_typical
    }

    /// Copy with the standard deviations replaced; used to build degenerate
    /// category signatures.
    pub fn with_std_dev(&self, std_dev: Vec<f64>) -> Result<Self> {
        let mut out = self.clone();
        out.std_dev = std_dev;
        out.validate()?;
        Ok(out)
    }

    /// `Σ ω_j a_j + b`, accumulated in order.
    pub fn semantic_value(&self, a: &[f64]) -> Result<f64> {
        check_dims(self.m(), a.len())?;
        let dot: f64 = self.omega.iter().zip(a).map(|(w, x)| w * x).sum();
        Ok(dot + self.bias)
    }

    /// The category's central semantic value `ẑ_i = ẑ(M_i)`.
    pub fn central_value(&self) -> f64 {
        self.omega
            .iter()
            .zip(&self.mean)
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + self.bias
    }

    pub fn prototypical_distance(&self, features: &[f64]) -> Result<f64> {
        self.object_distance(features, &self.mean)
    }

    pub fn object_distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        check_dims(self.m(), a.len())?;
        check_dims(self.m(), b.len())?;
        Ok(self
            .omega
            .iter()
            .zip(a.iter().zip(b))
            .map(|(w, (x, y))| w.abs() * (x - y).abs())
            .sum())
    }

    /// `1/δ`, or `f64::INFINITY` when the features coincide with the mean on
    /// every weighted dimension.
    pub fn typicality_score(&self, features: &[f64]) -> Result<f64> {
        let delta = self.prototypical_distance(features)?;
        Ok(if delta == 0.0 {
            f64::INFINITY
        } else {
            1.0 / delta
        })
    }
}

/// Top-1 category under the linear head: `argmax_i (Ω_i·F + b_i)`, ties to
/// the smallest index.
pub fn classify(features: &[f64], head: &HeadParams) -> Result<usize> {
    check_dims(head.m(), features.len())?;
    argmax_scores(head.rows().map(|(w, b)| dot(w, features) + b))
        .ok_or_else(|| Error::InvalidArgument("head has no categories".into()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn argmax_scores(scores: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.enumerate() {
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((i, s)),
        }
    }
    best.map(|(i, _)| i)
}

/// Members of `category` that the head also assigns to `category`, in set
/// order.
pub fn select_typical<'a>(
    set: &'a FeatureSet,
    head: &HeadParams,
    category: usize,
) -> Result<Vec<&'a [f64]>> {
    check_dims(head.m(), set.m())?;
    let mut out = Vec::new();
    for obj in set.members(category) {
        if classify(&obj.features, head)? == category {
            out.push(obj.features.as_slice());
        }
    }
    Ok(out)
}

/// Builds the prototype of `category` from its typical members.
pub fn build_prototype(
    set: &FeatureSet,
    head: &HeadParams,
    category: usize,
) -> Result<SemanticPrototype> {
    if category >= head.n() {
        return Err(Error::UnknownCategory(category));
    }
    let typical = select_typical(set, head, category)?;
    if typical.is_empty() {
        return Err(Error::NoTypicalMembers { category });
    }
    let (mean, std_dev) = mean_and_std(&typical, set.m());
    SemanticPrototype::new(
        category,
        mean,
        std_dev,
        head.weights(category).to_vec(),
        head.bias(category),
        typical.len(),
    )
}

/// Two-pass per-dimension mean and population standard deviation.
fn mean_and_std(rows: &[&[f64]], m: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let mut mean = vec![0.0; m];
    for row in rows {
        for (acc, v) in mean.iter_mut().zip(row.iter()) {
            *acc += v;
        }
    }
    for v in &mut mean {
        *v /= n;
    }
    let mut var = vec![0.0; m];
    for row in rows {
        for ((acc, v), mu) in var.iter_mut().zip(row.iter()).zip(&mean) {
            let d = v - mu;
            *acc += d * d;
        }
    }
    let std_dev = var.into_iter().map(|s| (s / n).sqrt()).collect();
    (mean, std_dev)
}

/// All prototypes of one model, keyed by category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrototypeStore {
    m: usize,
    prototypes: BTreeMap<usize, SemanticPrototype>,
}

impl PrototypeStore {
    pub fn new(m: usize) -> Self {
        PrototypeStore {
            m,
            prototypes: BTreeMap::new(),
        }
    }

    /// Builds one prototype per category of `head`. Categories without typical
    /// members are skipped and returned in the second slot.
    pub fn build(set: &FeatureSet, head: &HeadParams) -> Result<(Self, Vec<usize>)> {
        check_dims(head.m(), set.m())?;
        let mut store = PrototypeStore::new(set.m());
        let mut skipped = Vec::new();
        for category in 0..head.n() {
            match build_prototype(set, head, category) {
                Ok(p) => store.insert(p)?,
                Err(Error::NoTypicalMembers { category }) => skipped.push(category),
                Err(e) => return Err(e),
            }
        }
        Ok((store, skipped))
    }

    pub fn insert(&mut self, proto: SemanticPrototype) -> Result<()> {
        check_dims(self.m, proto.m())?;
        if self.prototypes.contains_key(&proto.category()) {
            return Err(Error::InvalidArgument(format!(
                "duplicate prototype for category {}",
                proto.category()
            )));
        }
        self.prototypes.insert(proto.category(), proto);
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.prototypes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prototypes.is_empty()
    }

    pub fn get(&self, category: usize) -> Result<&SemanticPrototype> {
        self.prototypes
            .get(&category)
            .ok_or(Error::UnknownCategory(category))
    }

    pub fn iter(&self) -> impl Iterator<Item = &SemanticPrototype> {
        self.prototypes.values()
    }

    /// Top-1 category among the stored prototypes' head rows. Equals
    /// [`classify`] whenever every category of the head has a prototype.
    pub fn classify(&self, features: &[f64]) -> Result<usize> {
        check_dims(self.m, features.len())?;
        let protos: Vec<&SemanticPrototype> = self.prototypes.values().collect();
        argmax_scores(protos.iter().map(|p| dot(&p.omega, features) + p.bias))
            .map(|i| protos[i].category)
            .ok_or_else(|| Error::InvalidArgument("empty prototype store".into()))
    }

    pub(crate) fn validate(&self) -> Result<()> {
        for (&category, proto) in &self.prototypes {
            proto.validate()?;
            check_dims(self.m, proto.m())?;
            if category != proto.category {
                return Err(Error::InvalidArgument(format!(
                    "prototype keyed {category} claims category {}",
                    proto.category
                )));
            }
        }
        Ok(())
    }
}
