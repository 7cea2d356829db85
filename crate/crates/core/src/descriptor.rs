//! Global semantic descriptor signatures.
//!
//! An object's description has two `m`-dimensional parts: the semantic
//! meaning vector `ω ⊙ F + b̄` and the semantic difference vector
//! `|ω| ⊙ |F - M|`. Each part is compressed by [`reduce`]:
//!
//! 1. pad the vector (and `ω`) with zeros to `m_padded`, a multiple of `r²`,
//!    and spread the bias evenly, `b̄ = b / m_padded`;
//! 2. reshape row-major into a `p × q` matrix and tile it into `r × r` blocks;
//! 3. give every cell of a block the angle of its position around the block
//!    centre and add its value into one of eight 45° bins.
//!
//! Every block yields eight bin sums, so a half-signature has
//! `8 · m_padded / r²` entries. Nothing is discarded and values are summed
//! with their sign, which is why the sum of the meaning half equals the
//! semantic value and the sum of the difference half equals the prototypical
//! distance.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::prototype::SemanticPrototype;

/// Number of angular bins per block.
pub const BINS: usize = 8;

/// Block side used when none is given. With `m = 4096` it yields signatures
/// of length 256, and with `m = 512` signatures of length 32.
pub const DEFAULT_BLOCK_SIDE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReductionConfig {
    pub r: usize,
    pub m: usize,
    pub m_padded: usize,
    pub p: usize,
    pub q: usize,
}

impl ReductionConfig {
    pub fn blocks(&self) -> usize {
        self.m_padded / (self.r * self.r)
    }

    pub fn half_len(&self) -> usize {
        self.blocks() * BINS
    }

    pub fn signature_len(&self) -> usize {
        2 * self.half_len()
    }

    /// Checks the structural invariants; used when configs come from disk.
    pub fn validate(&self) -> Result<()> {
        let cell = self.r.checked_mul(self.r);
        let ok = self.r >= 2
            && self.m >= 1
            && self.p.checked_mul(self.q) == Some(self.m_padded)
            && self.p.is_multiple_of(self.r)
            && self.q.is_multiple_of(self.r)
            && self.m_padded >= self.m
            && cell.is_some_and(|c| self.m_padded.is_multiple_of(c) && self.m_padded - self.m < c);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "inconsistent reduction config {self:?}"
            )))
        }
    }
}

/// Smallest padding to a multiple of `r²`, then the factorization
/// `m_padded = p·q` (both multiples of `r`) with the least `|p - q|`, `p ≤ q`.
pub fn plan_grid(m: usize, r: usize) -> Result<ReductionConfig> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!("block side r = {r} must be >= 2")));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("feature dimensionality m = 0".into()));
    }
    let cell = r * r;
    let blocks = m.div_ceil(cell);
    let m_padded = blocks * cell;
    // Largest divisor a ≤ √blocks gives the most balanced a × (blocks / a).
    let a = (1..=blocks)
        .take_while(|a| a * a <= blocks)
        .filter(|a| blocks.is_multiple_of(*a))
        .last()
        .unwrap_or(1);
    Ok(ReductionConfig {
        r,
        m,
        m_padded,
        p: r * a,
        q: r * (blocks / a),
    })
}

/// Per-cell angles (degrees, in `(0, 360]`) of an `r × r` block, measured
/// around the block centre with `x` to the right and `y` up.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    r: usize,
    angles: Vec<f64>,
    bins: Vec<u8>,
}

impl AngleGrid {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn angle(&self, row: usize, col: usize) -> f64 {
        self.angles[row * self.r + col]
    }

    /// Zero-based bin index `l - 1` of the cell.
    pub fn bin(&self, row: usize, col: usize) -> usize {
        self.bins[row * self.r + col] as usize
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

/// Doubled offsets from the block centre keep everything in integers:
/// `dx2 = 2·col - (r-1)`, `dy2 = (r-1) - 2·row`.
fn offsets(r: usize, row: usize, col: usize) -> (i64, i64) {
    let span = r as i64 - 1;
    (2 * col as i64 - span, span - 2 * row as i64)
}

/// Bin `l - 1` such that the angle lies in `(45(l-1), 45l]`, decided exactly
/// from the integer offsets. The centre cell counts as 360°.
fn bin_of(dx: i64, dy: i64) -> u8 {
    use std::cmp::Ordering::*;
    match (dy.cmp(&0), dx.cmp(&0)) {
        (Equal, Equal) => 7,
        (Greater, Greater) => if dy <= dx { 0 } else { 1 },
        (Greater, Equal) => 1,
        (Greater, Less) => if dy >= -dx { 2 } else { 3 },
        (Equal, Less) => 3,
        (Less, Less) => if -dy <= -dx { 4 } else { 5 },
        (Less, Equal) => 5,
        (Less, Greater) => if -dy >= dx { 6 } else { 7 },
        (Equal, Greater) => 7,
    }
}

fn angle_of(dx: i64, dy: i64) -> f64 {
    if dx == 0 && dy == 0 {
        return 360.0;
    }
    // Axis and diagonal cells get their exact value.
    if dx == 0 || dy == 0 || dx.abs() == dy.abs() {
        let octant = match (dx.signum(), dy.signum()) {
            (1, 0) => 8,
            (1, 1) => 1,
            (0, 1) => 2,
            (-1, 1) => 3,
            (-1, 0) => 4,
            (-1, -1) => 5,
            (0, -1) => 6,
            _ => 7,
        };
        return 45.0 * octant as f64;
    }
    let deg = (dy as f64).atan2(dx as f64).to_degrees();
    if deg <= 0.0 {
        deg + 360.0
    } else {
        deg
    }
}

pub fn angle_grid(r: usize) -> AngleGrid {
    let mut angles = Vec::with_capacity(r * r);
    let mut bins = Vec::with_capacity(r * r);
    for row in 0..r {
        for col in 0..r {
            let (dx, dy) = offsets(r, row, col);
            angles.push(angle_of(dx, dy));
            bins.push(bin_of(dx, dy));
        }
    }
    AngleGrid { r, angles, bins }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionKind {
    /// `ω ⊙ α + b̄`
    Meaning,
    /// `|ω| ⊙ α`
    Difference,
}

/// Compresses `alpha` into a half-signature of `8 · blocks` bin sums.
pub fn reduce(
    alpha: &[f64],
    proto: &SemanticPrototype,
    kind: ReductionKind,
    config: &ReductionConfig,
) -> Result<Vec<f64>> {
    check_dims(config.m, alpha.len())?;
    check_dims(config.m, proto.m())?;
    let grid = angle_grid(config.r);
    Ok(reduce_with(alpha, proto, kind, config, &grid.bins))
}

fn reduce_with(
    alpha: &[f64],
    proto: &SemanticPrototype,
    kind: ReductionKind,
    config: &ReductionConfig,
    bins: &[u8],
) -> Vec<f64> {
    let ReductionConfig { r, m, m_padded, p, q } = *config;
    let omega = proto.omega();
    let spread_bias = proto.bias() / m_padded as f64;
    let blocks_across = q / r;
    let mut out = vec![0.0; config.half_len()];
    for bj in 0..p / r {
        for bk in 0..blocks_across {
            let base = (bj * blocks_across + bk) * BINS;
            for a in 0..r {
                let row_start = (bj * r + a) * q + bk * r;
                for c in 0..r {
                    let flat = row_start + c;
                    let (x, w) = if flat < m {
                        (alpha[flat], omega[flat])
                    } else {
                        (0.0, 0.0)
                    };
                    let z = match kind {
                        ReductionKind::Meaning => w * x + spread_bias,
                        ReductionKind::Difference => w.abs() * x,
                    };
                    out[base + bins[a * r + c] as usize] += z;
                }
            }
        }
    }
    out
}

/// Which of the three signature kinds a signature represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Taxonomy {
    /// `ψ(F, |F - M|)`: one object.
    Object,
    /// `ψ(M, 0)`: the category centre; the difference half is zero.
    AbstractPrototype,
    /// `ψ(M, Σ)`: the category with its spread as difference half.
    Category,
}

impl Taxonomy {
    pub fn code(self) -> u8 {
        match self {
            Taxonomy::Object => 0,
            Taxonomy::AbstractPrototype => 1,
            Taxonomy::Category => 2,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Taxonomy::Object),
            1 => Ok(Taxonomy::AbstractPrototype),
            2 => Ok(Taxonomy::Category),
            other => Err(Error::InvalidArgument(format!("unknown taxonomy code {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Taxonomy::Object => "object",
            Taxonomy::AbstractPrototype => "abstract-prototype",
            Taxonomy::Category => "category",
        }
    }
}

impl std::str::FromStr for Taxonomy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "object" => Ok(Taxonomy::Object),
            "abstract-prototype" | "prototype" => Ok(Taxonomy::AbstractPrototype),
            "category" => Ok(Taxonomy::Category),
            other => Err(Error::InvalidArgument(format!("unknown taxonomy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    values: Vec<f64>,
    taxonomy: Taxonomy,
    category: usize,
    config: ReductionConfig,
}

impl Signature {
    pub fn new(
        values: Vec<f64>,
        taxonomy: Taxonomy,
        category: usize,
        config: ReductionConfig,
    ) -> Result<Self> {
        config.validate()?;
        check_dims(config.signature_len(), values.len())?;
        if taxonomy == Taxonomy::AbstractPrototype
            && values[config.half_len()..].iter().any(|&v| v != 0.0)
        {
            return Err(Error::InvalidArgument(
                "abstract-prototype signature with non-zero difference half".into(),
            ));
        }
        Ok(Signature {
            values,
            taxonomy,
            category,
            config,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn taxonomy(&self) -> Taxonomy {
        self.taxonomy
    }

    pub fn category(&self) -> usize {
        self.category
    }

    pub fn config(&self) -> &ReductionConfig {
        &self.config
    }

    pub fn meaning(&self) -> &[f64] {
        &self.values[..self.values.len() / 2]
    }

    pub fn difference(&self) -> &[f64] {
        &self.values[self.values.len() / 2..]
    }

    /// Sum of the meaning half: the semantic value of the described vector.
    pub fn recover_semantic_value(&self) -> f64 {
        self.meaning().iter().sum()
    }

    /// Sum of the difference half. For object signatures this is the
    /// prototypical distance; for category signatures it is `Σ |ω_j| σ_j`,
    /// which is not a distance.
    pub fn recover_prototypical_distance(&self) -> f64 {
        self.difference().iter().sum()
    }
}

fn check_config(proto: &SemanticPrototype, config: &ReductionConfig) -> Result<()> {
    config.validate()?;
    check_dims(config.m, proto.m())
}

fn assemble(
    meaning_input: &[f64],
    difference_input: Option<&[f64]>,
    proto: &SemanticPrototype,
    config: &ReductionConfig,
    taxonomy: Taxonomy,
) -> Result<Signature> {
    let bins = angle_grid(config.r).bins;
    let mut values = reduce_with(meaning_input, proto, ReductionKind::Meaning, config, &bins);
    match difference_input {
        Some(d) => values.extend(reduce_with(d, proto, ReductionKind::Difference, config, &bins)),
        None => values.resize(config.signature_len(), 0.0),
    }
    Ok(Signature {
        values,
        taxonomy,
        category: proto.category(),
        config: *config,
    })
}

/// `reduce(F, meaning) ⊕ reduce(|F - M|, difference)`.
pub fn describe_object(
    features: &[f64],
    proto: &SemanticPrototype,
    config: &ReductionConfig,
) -> Result<Signature> {
    check_config(proto, config)?;
    check_dims(config.m, features.len())?;
    let residual: Vec<f64> = features
        .iter()
        .zip(proto.mean())
        .map(|(f, mu)| (f - mu).abs())
        .collect();
    assemble(features, Some(&residual), proto, config, Taxonomy::Object)
}

/// `reduce(M, meaning) ⊕ 0`.
pub fn describe_abstract_prototype(
    proto: &SemanticPrototype,
    config: &ReductionConfig,
) -> Result<Signature> {
    check_config(proto, config)?;
    assemble(proto.mean(), None, proto, config, Taxonomy::AbstractPrototype)
}

/// `reduce(M, meaning) ⊕ reduce(Σ, difference)`.
pub fn describe_category(proto: &SemanticPrototype, config: &ReductionConfig) -> Result<Signature> {
    check_config(proto, config)?;
    assemble(
        proto.mean(),
        Some(proto.std_dev()),
        proto,
        config,
        Taxonomy::Category,
    )
}

pub fn signature_l1(a: &Signature, b: &Signature) -> Result<f64> {
    l1(a.values(), b.values())
}

pub(crate) fn l1(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}
