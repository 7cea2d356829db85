//! Acceptance run: every headline requirement, one line each.
//!
//! `cargo test -p gsdp-cli --test acceptance` prints `[PASS]` or `[FAIL]` per
//! criterion with its runtime and exits nonzero if any criterion fails.

#[path = "../../core/tests/common/oracles.rs"]
mod oracles;

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gsdp_core::analysis::{
    cluster_metrics, kmeans, map_rho, rank_members, rank_signatures, verify_continuity_bound,
};
use gsdp_core::interchange::{read_feature_set, read_head};
use gsdp_core::{
    describe_abstract_prototype, describe_category, describe_object, plan_grid, FeatureRecord,
    FeatureSet, Format, HeadParams, PrototypeStore, SemanticPrototype, SignatureRecord,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

type Check = fn(&Path) -> Outcome;

const DIMS: [usize; 4] = [4, 100, 512, 4096];
const PAIRS_PER_DIM: usize = 1000;

fn gsdp(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gsdp"))
        .args(args)
        .output()
        .expect("gsdp binary runs")
}

fn synth(dir: &Path, args: &[&str]) -> (PathBuf, PathBuf) {
    let mut all = vec!["synth", "--out", dir.to_str().unwrap()];
    all.extend_from_slice(args);
    let out = gsdp(&all);
    assert!(out.status.success(), "synth failed: {}", String::from_utf8_lossy(&out.stderr));
    (dir.join("features.bin"), dir.join("head.bin"))
}

fn load(features: &Path, head: &Path) -> (FeatureSet, HeadParams) {
    (
        read_feature_set(features, Format::Binary).unwrap(),
        read_head(head, Format::Binary).unwrap(),
    )
}

/// The ranking dataset: 10 categories of 200, m = 64, separation 10, seed 0.
fn ranking_dataset(root: &Path) -> (PathBuf, PathBuf) {
    let dir = root.join("ranking");
    if dir.join("features.bin").exists() {
        return (dir.join("features.bin"), dir.join("head.bin"));
    }
    synth(
        &dir,
        &["--categories", "10", "--per-category", "200", "--m", "64", "--separation", "10", "--seed", "0"],
    )
}

fn random_proto(rng: &mut ChaCha8Rng, m: usize) -> SemanticPrototype {
    SemanticPrototype::new(
        0,
        (0..m).map(|_| rng.random_range(-5.0..5.0)).collect(),
        (0..m).map(|_| rng.random_range(0.0..3.0)).collect(),
        (0..m).map(|_| rng.random_range(-2.0..2.0)).collect(),
        rng.random_range(-20.0..20.0),
        1,
    )
    .unwrap()
}

/// The same seeded (prototype, features) pairs for both recovery suites.
fn for_each_pair(mut f: impl FnMut(&SemanticPrototype, &[f64], &gsdp_core::Signature)) {
    for (i, &m) in DIMS.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
        let config = plan_grid(m, 16).unwrap();
        for _ in 0..PAIRS_PER_DIM {
            let proto = random_proto(&mut rng, m);
            let features: Vec<f64> = (0..m).map(|_| rng.random_range(-10.0..10.0)).collect();
            let sig = describe_object(&features, &proto, &config).unwrap();
            f(&proto, &features, &sig);
        }
    }
}

fn signature_sizes(_: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut parts = Vec::new();
    let mut ok = true;
    for (m, want) in [(4096, 256), (512, 32)] {
        let config = plan_grid(m, 16).unwrap();
        let proto = random_proto(&mut rng, m);
        let f = vec![1.0; m];
        let got = describe_object(&f, &proto, &config).unwrap().len();
        ok &= got == want && config.signature_len() == want;
        parts.push(format!("m={m} r=16 -> {got} (want {want})"));
    }
    outcome(ok, parts.join(", "))
}

fn property_semantic_value(_: &Path) -> Outcome {
    let (mut worst, mut fails, mut n) = (0.0f64, 0, 0);
    for_each_pair(|proto, f, sig| {
        let z = proto.semantic_value(f).unwrap();
        let err = (sig.meaning().iter().sum::<f64>() - z).abs() / (1.0 + z.abs());
        worst = worst.max(err);
        fails += usize::from(err > 1e-6);
        n += 1;
    });
    outcome(
        fails == 0,
        format!("{n} pairs over m in {DIMS:?}; worst |sum - z|/(1+|z|) = {worst:.2e}; {fails} over 1e-6"),
    )
}

fn property_distance(_: &Path) -> Outcome {
    let (mut worst, mut fails, mut n) = (0.0f64, 0, 0);
    for_each_pair(|proto, f, sig| {
        let d = proto.prototypical_distance(f).unwrap();
        let err = (sig.difference().iter().sum::<f64>() - d).abs() / (1.0 + d);
        worst = worst.max(err);
        fails += usize::from(err > 1e-6);
        n += 1;
    });
    outcome(
        fails == 0,
        format!("{n} pairs over m in {DIMS:?}; worst |sum - delta|/(1+delta) = {worst:.2e}; {fails} over 1e-6"),
    )
}

fn property_taxonomies(_: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut zero_half, mut flat_equal, mut n) = (true, true, 0);
    for &m in &DIMS {
        let config = plan_grid(m, 16).unwrap();
        for _ in 0..25 {
            let proto = random_proto(&mut rng, m);
            let abs = describe_abstract_prototype(&proto, &config).unwrap();
            zero_half &= abs.difference().iter().all(|&v| v == 0.0);
            let flat = proto.with_std_dev(vec![0.0; m]).unwrap();
            flat_equal &= describe_category(&flat, &config).unwrap().values() == abs.values();
            n += 1;
        }
    }
    outcome(
        zero_half && flat_equal,
        format!(
            "{n} prototypes; abstract difference half exactly zero: {zero_half}; \
             zero-spread category == abstract exactly: {flat_equal}"
        ),
    )
}

fn pseudometric(_: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut asym, mut neg, mut tri, mut worst) = (0, 0, 0, 0.0f64);
    for i in 0..10_000 {
        let m = DIMS[i % 3];
        let proto = random_proto(&mut rng, m);
        let pts: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..m).map(|_| rng.random_range(-10.0..10.0)).collect())
            .collect();
        let d = |a: usize, b: usize| proto.object_distance(&pts[a], &pts[b]).unwrap();
        let (ab, ba, bc, ac) = (d(0, 1), d(1, 0), d(1, 2), d(0, 2));
        asym += usize::from(ab != ba);
        neg += usize::from(ab < 0.0 || bc < 0.0 || ac < 0.0 || d(0, 0) != 0.0);
        tri += usize::from(ac > (ab + bc) * (1.0 + 1e-9));
        worst = worst.max((ac - ab - bc) / (ab + bc));
    }
    // Zero weight on the second coordinate: distinct points at distance zero.
    let witness = SemanticPrototype::new(0, vec![0.0; 2], vec![0.0; 2], vec![1.0, 0.0], 0.0, 1).unwrap();
    let w = witness.object_distance(&[1.0, 5.0], &[1.0, -3.0]).unwrap();
    let ok = asym == 0 && neg == 0 && tri == 0 && w == 0.0;
    outcome(
        ok,
        format!(
            "10000 triples: {asym} asymmetric, {neg} negative or d(x,x)!=0, {tri} triangle violations \
             (worst relative excess {worst:.2e}); witness omega=(1,0): d((1,5),(1,-3)) = {w} (pseudometric)"
        ),
    )
}

fn cross_domain_ranking(root: &Path) -> Outcome {
    let (features, head) = ranking_dataset(root);
    let (set, head) = load(&features, &head);
    let (store, skipped) = PrototypeStore::build(&set, &head).unwrap();
    let config = plan_grid(set.m(), 16).unwrap();
    let mut equal = 0;
    let mut total = 0;
    for proto in store.iter() {
        let members = set.subset(proto.category());
        let by_features = rank_members(&members, proto).unwrap();
        let records: Vec<SignatureRecord> = members
            .objects()
            .iter()
            .map(|o| SignatureRecord {
                id: o.id.clone(),
                signature: describe_object(&o.features, proto, &config).unwrap(),
            })
            .collect();
        let by_signatures = rank_signatures(&records);
        total += 1;
        equal += usize::from(
            by_features
                .iter()
                .map(|e| &e.object_id)
                .eq(by_signatures.iter().map(|e| &e.object_id)),
        );
    }
    outcome(
        equal == 10 && total == 10 && skipped.is_empty(),
        format!("10 x 200, m=64, separation 10, seed 0: {equal}/{total} categories with identical permutations"),
    )
}

fn continuity(root: &Path) -> Outcome {
    let (features, head) = ranking_dataset(root);
    let (set, head) = load(&features, &head);
    let (store, _) = PrototypeStore::build(&set, &head).unwrap();
    let (mut samples, mut violations, mut lower, mut max_ratio, mut min_ratio) = (0, 0, 0, 0.0f64, f64::INFINITY);
    for (i, proto) in store.iter().enumerate() {
        let r = verify_continuity_bound(&set.subset(proto.category()), proto, 10_000, i as u64).unwrap();
        samples += r.samples;
        violations += r.violations;
        lower += r.lower_bound_failures;
        max_ratio = max_ratio.max(r.max_ratio);
        min_ratio = min_ratio.min(r.min_ratio);
    }
    // Two objects placed symmetrically about the prototype share (z, delta).
    let proto = SemanticPrototype::new(0, vec![0.0; 2], vec![0.0; 2], vec![1.0, 1.0], 0.0, 1).unwrap();
    let pair = FeatureSet::new(
        2,
        vec![
            FeatureRecord { id: "f1".into(), label: 0, features: vec![1.0, 0.0] },
            FeatureRecord { id: "f2".into(), label: 0, features: vec![0.0, 1.0] },
        ],
        None,
    )
    .unwrap();
    let pts = map_rho(&pair, &proto).unwrap();
    let l1 = pts[0].l1(&pts[1]);
    let delta = proto.object_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
    outcome(
        samples == 100_000 && violations == 0,
        format!(
            "{samples} same-category pairs: {violations} upper-bound violations, l1/delta in \
             [{min_ratio:.4}, {max_ratio:.4}]; lower bound missed by {lower} sampled pairs; \
             counterexample omega=(1,1), M=(0,0), F1=(1,0), F2=(0,1): l1 = {l1} < delta = {delta}"
        ),
    )
}

fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            let top = p.iter().max().map_or(0, |m| m + 1);
            for l in 0..=top {
                let mut q = p.clone();
                q.push(l);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn metric_gap(truth: &[usize], pred: &[usize]) -> f64 {
    let s = cluster_metrics(truth, pred).unwrap();
    [
        s.homogeneity - oracles::homogeneity(truth, pred),
        s.completeness - oracles::completeness(truth, pred),
        s.v_measure - oracles::v_measure(truth, pred),
        s.ari - oracles::ari(truth, pred),
        s.ami - oracles::ami(truth, pred),
    ]
    .iter()
    .fold(0.0f64, |a, d| a.max(d.abs()))
}

fn signature_points(set: &FeatureSet, store: &PrototypeStore) -> Vec<Vec<f64>> {
    let config = plan_grid(set.m(), 16).unwrap();
    set.objects()
        .iter()
        .map(|o| {
            let proto = store.get(store.classify(&o.features).unwrap()).unwrap();
            describe_object(&o.features, proto, &config).unwrap().values().to_vec()
        })
        .collect()
}

fn ari_pair(set: &FeatureSet, head: &HeadParams, k: usize) -> (f64, f64) {
    let (store, _) = PrototypeStore::build(set, head).unwrap();
    let labels = set.labels();
    let raw: Vec<Vec<f64>> = set.objects().iter().map(|o| o.features.clone()).collect();
    let sigs = signature_points(set, &store);
    let raw_ari = cluster_metrics(&labels, &kmeans(&raw, k, 0, 300).unwrap().assignments).unwrap().ari;
    let sig_ari = cluster_metrics(&labels, &kmeans(&sigs, k, 0, 300).unwrap().assignments).unwrap().ari;
    (raw_ari, sig_ari)
}

fn clustering(root: &Path) -> Outcome {
    let mut worst = 0.0f64;
    let mut instances = 0;
    for n in 1..=6 {
        let parts = partitions(n);
        for t in &parts {
            for p in &parts {
                worst = worst.max(metric_gap(t, p));
                instances += 1;
            }
        }
    }
    for n in 7..=40 {
        for seed in 0..40u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed * 1000 + n as u64);
            let (a, b) = (rng.random_range(1..=n.min(8)), rng.random_range(1..=n.min(8)));
            let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..a)).collect();
            let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..b)).collect();
            worst = worst.max(metric_gap(&truth, &pred));
            instances += 1;
        }
    }
    let oracle_ok = worst <= 1e-12;

    let (features, head) = synth(
        &root.join("clusters"),
        &[
            "--categories", "20", "--per-category", "200", "--m", "64", "--separation", "100", "--support", "8",
            "--seed", "0",
        ],
    );
    let (set, head) = load(&features, &head);
    let (raw_ari, sig_ari) = ari_pair(&set, &head, 20);
    let ari_ok = raw_ari >= 0.8 && sig_ari >= 0.8 && (raw_ari - sig_ari).abs() <= 0.05;
    outcome(
        oracle_ok && ari_ok,
        format!(
            "{instances} labelings, max oracle gap {worst:.1e}; 20 x 200 (m=64, support 8, separation 100, seed 0): \
             ARI raw {raw_ari:.4}, signatures {sig_ari:.4}"
        ),
    )
}

fn verify_command(root: &Path) -> Outcome {
    let (features, head) = ranking_dataset(root);
    let out = gsdp(&["verify", "--features", features.to_str().unwrap(), "--head", head.to_str().unwrap()]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let passes = stdout.lines().filter(|l| l.starts_with("PASS")).count();
    outcome(
        out.status.code() == Some(0),
        format!("exit {:?}, {passes} suites passed", out.status.code()),
    )
}

/// Not a criterion: the same comparison on dense means at separation 10.
fn dense_clustering_note(root: &Path) -> String {
    let (features, head) = synth(
        &root.join("dense"),
        &["--categories", "20", "--per-category", "200", "--m", "64", "--separation", "10", "--seed", "0"],
    );
    let (set, head) = load(&features, &head);
    let (raw_ari, sig_ari) = ari_pair(&set, &head, 20);
    format!("dense means, separation 10: ARI raw {raw_ari:.4}, signatures {sig_ari:.4}")
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let root = tmp.path();
    let criteria: [(&str, Check, Option<u64>); 9] = [
        ("signature sizes", signature_sizes, Some(1)),
        ("semantic value recovery", property_semantic_value, Some(30)),
        ("prototypical distance recovery", property_distance, Some(30)),
        ("degenerate taxonomies", property_taxonomies, None),
        ("pseudometric", pseudometric, None),
        ("cross-domain ranking", cross_domain_ranking, None),
        ("continuity upper bound", continuity, None),
        ("clustering", clustering, Some(120)),
        ("verify command", verify_command, None),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let result = check(root);
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= Duration::from_secs(b));
        let passed = result.passed && in_time;
        failed += usize::from(!passed);
        let timing = match budget {
            Some(b) => format!("{:.2}s of {b}s", elapsed.as_secs_f64()),
            None => format!("{:.2}s", elapsed.as_secs_f64()),
        };
        println!(
            "[{}] {name} ({timing}): {}",
            if passed { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!("[INFO] {}", dense_clustering_note(root));
    if failed == 0 {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
