use std::collections::HashMap;
use std::path::Path;

use gsdp_core::analysis::{
    closest_and_farthest, cluster_eval_sweep, map_gamma, map_rho, rank_members, OrganizationPoint,
};
use gsdp_core::interchange::{
    read_feature_set, read_head, read_signatures, read_store, write_feature_set, write_head,
    write_signatures, write_store, Sidecar,
};
use gsdp_core::synth::{generate, SynthConfig};
use gsdp_core::verify::{verify_dataset, VerifyOptions};
use gsdp_core::{
    describe_abstract_prototype, describe_category, describe_object, plan_grid, Error, FeatureSet,
    Format, PrototypeStore, Result, SignatureRecord, Taxonomy,
};

use crate::manifest::{ensure_dir, ensure_parent, RunManifest};
use crate::{
    AssignArg, ClusterEvalArgs, DescribeArgs, OrganizeArgs, PrototypeArgs, RankArgs, SynthArgs,
    VerifyArgs, EXIT_SUITE_FAILED,
};

fn load_features(path: &Path) -> Result<FeatureSet> {
    read_feature_set(path, Format::from_path(path))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    ensure_parent(path)?;
    let file = std::fs::File::create(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::Writer::from_writer(file))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.into())
}

pub fn synth(args: SynthArgs) -> Result<u8> {
    let config = SynthConfig {
        support: args.support,
        ..SynthConfig::new(args.categories, args.per_category, args.m, args.separation, args.seed)
    };
    let (set, head) = generate(&config)?;
    ensure_dir(&args.out)?;
    let format: Format = args.format.into();
    let features = args.out.join(format!("features.{}", format.extension()));
    let head_path = args.out.join(format!("head.{}", format.extension()));
    write_feature_set(&set, &features, format)?;
    write_head(&head, &head_path, format)?;
    let mut provenance = vec![
        "synthetic isotropic Gaussian categories".to_string(),
        format!(
            "categories {} per_category {} m {} separation {} seed {} steps {}",
            config.n_categories, config.per_category, config.m, config.separation, config.seed, config.steps
        ),
    ];
    if let Some(s) = config.support {
        provenance.push(format!("support {s}"));
    }
    Sidecar {
        category_names: None,
        provenance,
    }
    .write_for(&features)?;

    let mut manifest = RunManifest::new("synth");
    manifest.seed = Some(args.seed);
    manifest.output(&features);
    manifest.output(&Sidecar::path_for(&features));
    manifest.output(&head_path);
    manifest.write(&args.out.join("manifest.json"))?;
    Ok(0)
}

pub fn prototype(args: PrototypeArgs) -> Result<u8> {
    let set = load_features(&args.features)?;
    let head = read_head(&args.head, Format::from_path(&args.head))?;
    let (store, skipped) = PrototypeStore::build(&set, &head)?;
    ensure_parent(&args.out)?;
    write_store(&store, &args.out)?;

    let mut manifest = RunManifest::new("prototype");
    manifest.input(&args.features);
    manifest.input(&args.head);
    manifest.output(&args.out);
    for c in &skipped {
        eprintln!("warning: category {c} has no typical members; skipped");
        manifest.warnings.push(format!("category {c} has no typical members"));
    }
    manifest.skipped_categories = skipped;
    manifest.write(&RunManifest::path_beside(&args.out))?;
    Ok(0)
}

pub fn describe(args: DescribeArgs) -> Result<u8> {
    let store = read_store(&args.prototypes)?;
    let config = plan_grid(store.m(), args.r)?;
    let taxonomy: Taxonomy = args.taxonomy.into();
    let mut manifest = RunManifest::new("describe");
    manifest.r = Some(args.r);

    let mut records = Vec::new();
    match taxonomy {
        Taxonomy::Object => {
            let path = args.features.as_deref().ok_or_else(|| {
                Error::InvalidArgument("--features is required for object signatures".into())
            })?;
            let set = load_features(path)?;
            manifest.input(path);
            for o in set.objects() {
                let category = match args.assign {
                    AssignArg::Predicted => store.classify(&o.features)?,
                    AssignArg::Label => o.label,
                };
                let Ok(proto) = store.get(category) else {
                    manifest.warnings.push(format!("{}: no prototype for category {category}", o.id));
                    continue;
                };
                records.push(SignatureRecord {
                    id: o.id.clone(),
                    signature: describe_object(&o.features, proto, &config)?,
                });
            }
        }
        Taxonomy::AbstractPrototype | Taxonomy::Category => {
            for proto in store.iter() {
                let (id, signature) = if taxonomy == Taxonomy::Category {
                    (format!("category:{}", proto.category()), describe_category(proto, &config)?)
                } else {
                    (
                        format!("prototype:{}", proto.category()),
                        describe_abstract_prototype(proto, &config)?,
                    )
                };
                records.push(SignatureRecord { id, signature });
            }
        }
    }
    manifest.input(&args.prototypes);

    let format = args.format.map_or_else(|| Format::from_path(&args.out), Format::from);
    ensure_parent(&args.out)?;
    write_signatures(&records, &args.out, format)?;
    manifest.output(&args.out);
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    manifest.write(&RunManifest::path_beside(&args.out))?;
    Ok(0)
}

pub fn rank(args: RankArgs) -> Result<u8> {
    let set = load_features(&args.features)?;
    let store = read_store(&args.prototypes)?;
    let proto = store.get(args.category)?;
    let ranking = rank_members(&set.subset(args.category), proto)?;

    let mut wtr = csv_writer(&args.out)?;
    wtr.write_record(["id", "delta", "rank"]).map_err(csv_err)?;
    for e in closest_and_farthest(&ranking, args.k) {
        wtr.write_record([e.object_id.clone(), e.delta.to_string(), e.rank.to_string()])
            .map_err(csv_err)?;
    }
    wtr.flush()?;

    let mut manifest = RunManifest::new("rank");
    manifest.input(&args.features);
    manifest.input(&args.prototypes);
    manifest.output(&args.out);
    manifest.write(&RunManifest::path_beside(&args.out))?;
    Ok(0)
}

pub fn organize(args: OrganizeArgs) -> Result<u8> {
    let mut manifest = RunManifest::new("organize");
    let points: Vec<OrganizationPoint> = if let Some(path) = &args.signatures {
        manifest.input(path);
        let records: Vec<SignatureRecord> = read_signatures(path, Format::from_path(path))?
            .into_iter()
            .filter(|r| args.category.is_none_or(|c| r.signature.category() == c))
            .collect();
        map_gamma(&records)
    } else {
        let features = args.features.as_deref().expect("clap requires features");
        let store_path = args.prototypes.as_deref().expect("clap requires prototypes");
        manifest.input(features);
        manifest.input(store_path);
        let set = load_features(features)?;
        let store = read_store(store_path)?;
        let mut points = Vec::new();
        for category in set.labels_present() {
            if args.category.is_some_and(|c| c != category) {
                continue;
            }
            match store.get(category) {
                Ok(proto) => points.extend(map_rho(&set.subset(category), proto)?),
                Err(_) => manifest
                    .warnings
                    .push(format!("category {category} has no prototype; members skipped")),
            }
        }
        points
    };

    let mut wtr = csv_writer(&args.out)?;
    wtr.write_record(["id", "z", "delta", "source"]).map_err(csv_err)?;
    for p in &points {
        wtr.write_record([
            p.object_id.clone(),
            p.z.to_string(),
            p.delta.to_string(),
            p.source.name().to_string(),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush()?;
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    manifest.output(&args.out);
    manifest.write(&RunManifest::path_beside(&args.out))?;
    Ok(0)
}

pub fn cluster_eval(args: ClusterEvalArgs) -> Result<u8> {
    let mut manifest = RunManifest::new("cluster-eval");
    manifest.seed = Some(args.seed);
    let (points, labels) = if let Some(path) = &args.signatures {
        let label_path = args.labels.as_deref().expect("clap requires labels");
        manifest.input(path);
        manifest.input(label_path);
        let records = read_signatures(path, Format::from_path(path))?;
        let set = load_features(label_path)?;
        let by_id: HashMap<&str, usize> = set.objects().iter().map(|o| (o.id.as_str(), o.label)).collect();
        let mut points = Vec::with_capacity(records.len());
        let mut labels = Vec::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            let label = by_id.get(r.id.as_str()).ok_or_else(|| Error::Parse {
                record: i,
                message: format!("no label for signature id {:?}", r.id),
            })?;
            points.push(r.signature.values().to_vec());
            labels.push(*label);
        }
        (points, labels)
    } else {
        let path = args.features.as_deref().expect("clap requires features");
        manifest.input(path);
        let set = load_features(path)?;
        let labels = set.labels();
        let points = set.into_objects().into_iter().map(|o| o.features).collect();
        (points, labels)
    };

    let mut distinct = labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let k_max = args.k_max.unwrap_or(distinct.len());
    let k_min = args.k_min.unwrap_or(3.min(k_max));
    if k_min == 0 || k_min > k_max {
        return Err(Error::InvalidArgument(format!("empty k range {k_min}..={k_max}")));
    }
    let reports = cluster_eval_sweep(&points, &labels, k_min..=k_max, args.seed)?;

    let mut wtr = csv_writer(&args.out)?;
    wtr.write_record(["k", "H", "C", "V", "ARI", "AMI", "seed"]).map_err(csv_err)?;
    for r in &reports {
        let s = &r.scores;
        wtr.write_record([
            r.k.to_string(),
            s.homogeneity.to_string(),
            s.completeness.to_string(),
            s.v_measure.to_string(),
            s.ari.to_string(),
            s.ami.to_string(),
            r.seed.to_string(),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush()?;
    manifest.output(&args.out);
    manifest.write(&RunManifest::path_beside(&args.out))?;
    Ok(0)
}

pub fn verify(args: VerifyArgs) -> Result<u8> {
    let set = load_features(&args.features)?;
    let head = read_head(&args.head, Format::from_path(&args.head))?;
    let options = VerifyOptions {
        r: args.r,
        seed: args.seed,
        triples: args.triples,
        pairs: args.pairs,
    };
    let report = verify_dataset(&set, &head, &options)?;
    print!("{report}");
    if report.all_passed() {
        println!("all {} suites passed", report.suites.len());
        Ok(0)
    } else {
        println!("property suites failed");
        Ok(EXIT_SUITE_FAILED)
    }
}
