//! Batch property checks over a labelled dataset and its head.
//!
//! Everything here goes through the public API, so a passing run also
//! exercises the library end to end. Each suite reports how many checks it
//! ran and the worst case it saw. Sampling is driven by one ChaCha8 stream
//! per suite, so the report text is a function of the inputs and the seed.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{rank_members, rank_signatures, verify_continuity_bound};
use crate::descriptor::{
    describe_abstract_prototype, describe_category, describe_object, plan_grid, BINS,
};
use crate::error::Result;
use crate::interchange::{FeatureSet, HeadParams, SignatureRecord};
use crate::prototype::PrototypeStore;

/// Relative tolerance for the two sum-recovery properties.
pub const RECOVERY_TOLERANCE: f64 = 1e-6;
/// Relative tolerance for the triangle inequality.
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub r: usize,
    pub seed: u64,
    /// Random triples per category for the pseudometric suite.
    pub triples: usize,
    /// Random pairs per category for the continuity suite.
    pub pairs: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            r: crate::descriptor::DEFAULT_BLOCK_SIDE,
            seed: 0,
            triples: 1_000,
            pairs: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
    /// Categories present in the data with no typical member.
    pub skipped: Vec<usize>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.suites {
            let tag = if s.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {} ({} checks): {}", s.name, s.checks, s.detail)?;
        }
        if !self.skipped.is_empty() {
            writeln!(f, "skipped categories without typical members: {:?}", self.skipped)?;
        }
        Ok(())
    }
}

fn suite(name: &'static str, failures: usize, checks: usize, detail: String) -> SuiteResult {
    SuiteResult {
        name,
        passed: failures == 0,
        checks,
        detail: format!("{failures} failures; {detail}"),
    }
}

/// Builds prototypes from `set` and `head`, describes every member of every
/// prototyped category against its own prototype, and checks the properties.
pub fn verify_dataset(set: &FeatureSet, head: &HeadParams, options: &VerifyOptions) -> Result<VerifyReport> {
    let (store, skipped) = PrototypeStore::build(set, head)?;
    let config = plan_grid(set.m(), options.r)?;
    let mut suites = Vec::new();

    let mut records: Vec<(usize, Vec<SignatureRecord>)> = Vec::new();
    for proto in store.iter() {
        let recs = set
            .members(proto.category())
            .map(|o| {
                Ok(SignatureRecord {
                    id: o.id.clone(),
                    signature: describe_object(&o.features, proto, &config)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        records.push((proto.category(), recs));
    }

    // Signature length against the block count.
    let blocks = set.m().div_ceil(options.r * options.r);
    let expected_len = 2 * BINS * blocks;
    let mut checks = 0;
    let mut failures = usize::from(config.signature_len() != expected_len);
    for (_, recs) in &records {
        for rec in recs {
            checks += 1;
            failures += usize::from(rec.signature.len() != expected_len);
        }
    }
    suites.push(suite(
        "signature-size",
        failures,
        checks + 1,
        format!("m {} r {} length {}", set.m(), options.r, config.signature_len()),
    ));

    // Sum recovery of the semantic value and the prototypical distance.
    let (mut z_fail, mut d_fail, mut n) = (0, 0, 0);
    let (mut z_worst, mut d_worst) = (0.0f64, 0.0f64);
    for (category, recs) in &records {
        let proto = store.get(*category)?;
        for (o, rec) in set.members(*category).zip(recs) {
            n += 1;
            let z = proto.semantic_value(&o.features)?;
            let dz = (rec.signature.recover_semantic_value() - z).abs() / (1.0 + z.abs());
            z_worst = z_worst.max(dz);
            z_fail += usize::from(dz > RECOVERY_TOLERANCE);
            let d = proto.prototypical_distance(&o.features)?;
            let dd = (rec.signature.recover_prototypical_distance() - d).abs() / (1.0 + d);
            d_worst = d_worst.max(dd);
            d_fail += usize::from(dd > RECOVERY_TOLERANCE);
        }
    }
    suites.push(suite("semantic-value-recovery", z_fail, n, format!("worst relative error {z_worst:.3e}")));
    suites.push(suite("distance-recovery", d_fail, n, format!("worst relative error {d_worst:.3e}")));

    // Degenerate taxonomies.
    let mut failures = 0;
    for proto in store.iter() {
        let abstract_sig = describe_abstract_prototype(proto, &config)?;
        failures += usize::from(abstract_sig.difference().iter().any(|&v| v != 0.0));
        let flat = proto.with_std_dev(vec![0.0; proto.m()])?;
        let category_sig = describe_category(&flat, &config)?;
        failures += usize::from(category_sig.values() != abstract_sig.values());
    }
    suites.push(suite(
        "degenerate-taxonomies",
        failures,
        2 * store.len(),
        "abstract difference half zero; zero-spread category equals abstract".into(),
    ));

    // Object distance axioms on sampled member triples.
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let (mut failures, mut checks) = (0, 0);
    let mut worst = 0.0f64;
    for proto in store.iter() {
        let members: Vec<&[f64]> = set.members(proto.category()).map(|o| o.features.as_slice()).collect();
        for _ in 0..options.triples {
            let [a, b, c] = [0; 3].map(|_| members[rng.random_range(0..members.len())]);
            let ab = proto.object_distance(a, b)?;
            let ba = proto.object_distance(b, a)?;
            let bc = proto.object_distance(b, c)?;
            let ac = proto.object_distance(a, c)?;
            let aa = proto.object_distance(a, a)?;
            checks += 1;
            let excess = (ac - (ab + bc)) / (ab + bc).max(f64::MIN_POSITIVE);
            worst = worst.max(excess);
            let ok = ab == ba && ab >= 0.0 && aa == 0.0 && ac <= (ab + bc) * (1.0 + TRIANGLE_TOLERANCE);
            failures += usize::from(!ok);
        }
    }
    suites.push(suite("pseudometric", failures, checks, format!("worst triangle excess {worst:.3e}")));

    // Feature ranking equals signature ranking.
    let mut failures = 0;
    for (category, recs) in &records {
        let by_features = rank_members(&set.subset(*category), store.get(*category)?)?;
        let by_signatures = rank_signatures(recs);
        let same = by_features
            .iter()
            .map(|e| &e.object_id)
            .eq(by_signatures.iter().map(|e| &e.object_id));
        failures += usize::from(!same);
    }
    suites.push(suite("ranking-consistency", failures, records.len(), "per-category permutations".into()));

    // Upper continuity bound of the (ẑ, δ) map.
    let (mut failures, mut checks) = (0, 0);
    let mut max_ratio = 0.0f64;
    let mut lower = 0;
    for (i, proto) in store.iter().enumerate() {
        let members = set.subset(proto.category());
        if members.len() < 2 {
            continue;
        }
        let report =
            verify_continuity_bound(&members, proto, options.pairs, options.seed.wrapping_add(i as u64))?;
        failures += report.violations;
        checks += report.samples;
        max_ratio = max_ratio.max(report.max_ratio);
        lower += report.lower_bound_failures;
    }
    suites.push(suite(
        "continuity-upper-bound",
        failures,
        checks,
        format!("max l1/delta {max_ratio:.4}; lower bound missed by {lower} pairs (informational)"),
    ));

    Ok(VerifyReport { suites, skipped })
}
