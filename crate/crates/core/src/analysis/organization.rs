//! Maps from objects (features or signatures) to the plane `(ẑ, δ)`.
//!
//! `ρ(F) = (ẑ(F), δ(F))` reads the features directly; `γ(ψ)` reads the same
//! two numbers back from the halves of a signature. Both land in `(ℝ², l1)`.
//!
//! For two members of one category
//! `|ẑ1 - ẑ2| ≤ δ(o1, o2)` and `|δ1 - δ2| ≤ δ(o1, o2)`, so
//! `l1(ρ(o1), ρ(o2)) ≤ 2 δ(o1, o2)`. The matching lower bound
//! `δ(o1, o2) ≤ l1` does not hold in general (two objects placed
//! symmetrically around the prototype map to the same point), so it is only
//! measured.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interchange::{FeatureSet, SignatureRecord};
use crate::prototype::SemanticPrototype;

/// Absolute slack allowed on the upper continuity bound.
pub const UPPER_BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointSource {
    /// `ρ`, computed from features.
    Features,
    /// `γ`, recovered from a signature.
    Signature,
}

impl PointSource {
    pub fn name(self) -> &'static str {
        match self {
            PointSource::Features => "features",
            PointSource::Signature => "signature",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrganizationPoint {
    pub object_id: String,
    pub z: f64,
    pub delta: f64,
    pub source: PointSource,
}

impl OrganizationPoint {
    pub fn l1(&self, other: &OrganizationPoint) -> f64 {
        (self.z - other.z).abs() + (self.delta - other.delta).abs()
    }
}

pub fn map_rho(set: &FeatureSet, proto: &SemanticPrototype) -> Result<Vec<OrganizationPoint>> {
    set.objects()
        .iter()
        .map(|o| {
            Ok(OrganizationPoint {
                object_id: o.id.clone(),
                z: proto.semantic_value(&o.features)?,
                delta: proto.prototypical_distance(&o.features)?,
                source: PointSource::Features,
            })
        })
        .collect()
}

pub fn map_gamma(records: &[SignatureRecord]) -> Vec<OrganizationPoint> {
    records
        .iter()
        .map(|r| OrganizationPoint {
            object_id: r.id.clone(),
            z: r.signature.recover_semantic_value(),
            delta: r.signature.recover_prototypical_distance(),
            source: PointSource::Signature,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityReport {
    pub samples: usize,
    /// Pairs with `l1(ρ1, ρ2) > 2δ(o1, o2) + 1e-9`.
    pub violations: usize,
    /// Largest `l1 / δ` over sampled pairs with `δ > 0`.
    pub max_ratio: f64,
    /// Pairs with `l1(ρ1, ρ2) < δ(o1, o2) - 1e-9`; informational.
    pub lower_bound_failures: usize,
    /// Smallest `l1 / δ` over sampled pairs with `δ > 0`.
    pub min_ratio: f64,
}

/// Samples `samples` random member pairs (with replacement) and checks the
/// continuity bounds of `ρ`.
pub fn verify_continuity_bound(
    set: &FeatureSet,
    proto: &SemanticPrototype,
    samples: usize,
    seed: u64,
) -> Result<ContinuityReport> {
    let n = set.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "continuity check needs at least 2 members, got {n}"
        )));
    }
    let points = map_rho(set, proto)?;
    let objects = set.objects();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ContinuityReport {
        samples,
        violations: 0,
        max_ratio: 0.0,
        lower_bound_failures: 0,
        min_ratio: f64::INFINITY,
    };
    for _ in 0..samples {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        let delta = proto.object_distance(&objects[i].features, &objects[j].features)?;
        let l1 = points[i].l1(&points[j]);
        if l1 > 2.0 * delta + UPPER_BOUND_SLACK {
            report.violations += 1;
        }
        if l1 < delta - UPPER_BOUND_SLACK {
            report.lower_bound_failures += 1;
        }
        if delta > 0.0 {
            let ratio = l1 / delta;
            report.max_ratio = report.max_ratio.max(ratio);
            report.min_ratio = report.min_ratio.min(ratio);
        }
    }
    Ok(report)
}
