//! Prototype-based global semantic description of feature vectors.
//!
//! The crate builds per-category semantic prototypes from labelled feature
//! vectors and a linear classifier head, evaluates semantic values and
//! prototypical distances against them, and compresses objects into compact
//! signatures whose two halves sum back to exactly those two quantities.
//!
//! * [`interchange`]: feature sets, head parameters and file formats
//! * [`prototype`]: prototype construction and scalar semantics
//! * [`descriptor`]: the block/angle reduction and signature taxonomies
//! * [`analysis`]: rankings, organization maps, k-means and cluster scores
//! * [`synth`]: synthetic data with a fitted head
//! * [`verify`]: batch property checks over a dataset

pub mod analysis;
pub mod descriptor;
pub mod error;
pub mod interchange;
pub mod prototype;
pub mod synth;
pub mod verify;

pub use descriptor::{
    angle_grid, describe_abstract_prototype, describe_category, describe_object, plan_grid,
    reduce, signature_l1, AngleGrid, ReductionConfig, ReductionKind, Signature, Taxonomy,
};
pub use error::{Error, Result};
pub use interchange::{FeatureRecord, FeatureSet, Format, HeadParams, SignatureRecord};
pub use prototype::{build_prototype, classify, select_typical, PrototypeStore, SemanticPrototype};
