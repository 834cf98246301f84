//! Projection maps and the family registry.
//!
//! Every map sends an order-N tensor to a k-vector whose component i is
//! scale * <row_i, x> with scale = 1/sqrt(k). The four families differ only
//! in how rows are built: TT rows, CP rows, dense Gaussian rows, or very
//! sparse sign rows. Each family sits behind [`ProjectionFamily`] and is
//! looked up by name at runtime, so experiment drivers stay family-agnostic.
//!
//! Dispatch inside [`Projection::project`] keeps everything in low-rank
//! formats: TT/CP rows contract natively against TT, CP or dense inputs;
//! dense and sparse rows need vec(x) and densify a low-rank input first,
//! which is refused above the configured cap.

use crate::error::{Error, Result};
use crate::matrix::{khatri_rao, Matrix};
use crate::random;
use crate::seed::Seed;
use crate::tensor::{
    cp_inner_cp, cp_inner_dense, tt_inner_cp, tt_inner_dense, tt_inner_tt, CPTensor, DenseTensor,
    Shape, TTTensor, TensorRef, DEFAULT_ORACLE_CAP,
};

/// Image of one tensor under a projection map.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    values: Vec<f64>,
}

impl Embedding {
    pub fn new(values: Vec<f64>) -> Self {
        Embedding { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Euclidean distance to another embedding of the same length.
    pub fn distance(&self, other: &Embedding) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }
}

/// A sampled projection map, ready to apply to inputs of one shape.
pub trait Projection: Send + Sync {
    /// Registry name of the family this map belongs to.
    fn family(&self) -> &'static str;

    /// Embedding dimension.
    fn k(&self) -> usize;

    /// Row rank, for the low-rank families.
    fn rank(&self) -> Option<usize>;

    /// Applies the map. Accepts any input format of the right shape.
    fn project(&self, x: TensorRef<'_>) -> Result<Embedding>;
}

/// TT projection: k independent TT rows over a fixed shape.
#[derive(Debug, Clone)]
pub struct TTProjection {
    shape: Shape,
    rank: usize,
    k: usize,
    scale: f64,
    rows: Vec<TTTensor>,
}

impl TTProjection {
    pub fn new(shape: Shape, rank: usize, rows: Vec<TTTensor>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("a projection needs at least one row".into()));
        }
        for row in &rows {
            if row.shape() != &shape {
                return Err(Error::ShapeMismatch(shape, row.shape().clone()));
            }
            if row.rank() != rank {
                return Err(Error::InvalidParameter(format!(
                    "row rank {} does not match projection rank {rank}",
                    row.rank()
                )));
            }
        }
        let k = rows.len();
        Ok(TTProjection { shape, rank, k, scale: 1.0 / (k as f64).sqrt(), rows })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn rows(&self) -> &[TTTensor] {
        &self.rows
    }
}

impl Projection for TTProjection {
    fn family(&self) -> &'static str {
        TT_FAMILY.name()
    }

    fn k(&self) -> usize {
        self.k
    }

    fn rank(&self) -> Option<usize> {
        Some(self.rank)
    }

    fn project(&self, x: TensorRef<'_>) -> Result<Embedding> {
        if x.shape() != &self.shape {
            return Err(Error::ShapeMismatch(self.shape.clone(), x.shape().clone()));
        }
        let mut out = Vec::with_capacity(self.k);
        for row in &self.rows {
            let v = match x {
                TensorRef::Tt(t) => tt_inner_tt(row, t)?,
                TensorRef::Cp(c) => tt_inner_cp(row, c)?,
                TensorRef::Dense(d) => tt_inner_dense(row, d)?,
            };
            out.push(self.scale * v);
        }
        Ok(Embedding::new(out))
    }
}

/// CP projection: k independent CP rows over a fixed shape.
#[derive(Debug, Clone)]
pub struct CPProjection {
    shape: Shape,
    rank: usize,
    k: usize,
    scale: f64,
    rows: Vec<CPTensor>,
}

impl CPProjection {
    pub fn new(shape: Shape, rank: usize, rows: Vec<CPTensor>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("a projection needs at least one row".into()));
        }
        for row in &rows {
            if row.shape() != &shape {
                return Err(Error::ShapeMismatch(shape, row.shape().clone()));
            }
            if row.rank() != rank {
                return Err(Error::InvalidParameter(format!(
                    "row rank {} does not match projection rank {rank}",
                    row.rank()
                )));
            }
        }
        let k = rows.len();
        Ok(CPProjection { shape, rank, k, scale: 1.0 / (k as f64).sqrt(), rows })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn rows(&self) -> &[CPTensor] {
        &self.rows
    }
}

impl Projection for CPProjection {
    fn family(&self) -> &'static str {
        CP_FAMILY.name()
    }

    fn k(&self) -> usize {
        self.k
    }

    fn rank(&self) -> Option<usize> {
        Some(self.rank)
    }

    fn project(&self, x: TensorRef<'_>) -> Result<Embedding> {
        if x.shape() != &self.shape {
            return Err(Error::ShapeMismatch(self.shape.clone(), x.shape().clone()));
        }
        let mut out = Vec::with_capacity(self.k);
        for row in &self.rows {
            let v = match x {
                TensorRef::Tt(t) => tt_inner_cp(t, row)?,
                TensorRef::Cp(c) => cp_inner_cp(row, c)?,
                TensorRef::Dense(d) => cp_inner_dense(row, d)?,
            };
            out.push(self.scale * v);
        }
        Ok(Embedding::new(out))
    }
}

/// Dense Gaussian projection on vec(x): k x D matrix of N(0, 1) entries.
#[derive(Debug, Clone)]
pub struct DenseGaussianProjection {
    dim: usize,
    k: usize,
    scale: f64,
    rows: Vec<Vec<f64>>,
    /// Cap applied when a low-rank input must be densified first.
    pub densify_cap: usize,
}

impl DenseGaussianProjection {
    pub fn new(dim: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("a projection needs at least one row".into()));
        }
        for row in &rows {
            if row.len() != dim {
                return Err(Error::LengthMismatch(dim, row.len()));
            }
        }
        let k = rows.len();
        Ok(DenseGaussianProjection {
            dim,
            k,
            scale: 1.0 / (k as f64).sqrt(),
            rows,
            densify_cap: DEFAULT_ORACLE_CAP,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

impl Projection for DenseGaussianProjection {
    fn family(&self) -> &'static str {
        GAUSSIAN_FAMILY.name()
    }

    fn k(&self) -> usize {
        self.k
    }

    fn rank(&self) -> Option<usize> {
        None
    }

    fn project(&self, x: TensorRef<'_>) -> Result<Embedding> {
        if x.shape().size() != self.dim {
            return Err(Error::LengthMismatch(self.dim, x.shape().size()));
        }
        let owned;
        let vec = match x {
            TensorRef::Dense(d) => d.values(),
            _ => {
                owned = x.to_dense_capped(self.densify_cap)?;
                owned.values()
            }
        };
        let out = self
            .rows
            .iter()
            .map(|row| self.scale * row.iter().zip(vec).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        Ok(Embedding::new(out))
    }
}

/// One stored row of a very sparse projection: index/value pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseRow {
    pub fn new(indices: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(indices.len(), values.len());
        SparseRow { indices, values }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn dot(&self, vec: &[f64]) -> f64 {
        self.indices.iter().zip(&self.values).map(|(&i, &v)| v * vec[i]).sum()
    }
}

/// Very sparse sign projection: entries +-sqrt(s) with probability 1/(2s)
/// each, zero otherwise, stored row-sparse.
#[derive(Debug, Clone)]
pub struct VerySparseProjection {
    dim: usize,
    k: usize,
    sparsity: f64,
    scale: f64,
    rows: Vec<SparseRow>,
    /// Cap applied when a low-rank input must be densified first.
    pub densify_cap: usize,
}

impl VerySparseProjection {
    pub fn new(dim: usize, sparsity: f64, rows: Vec<SparseRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("a projection needs at least one row".into()));
        }
        if !(sparsity >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sparsity must be at least 1, got {sparsity}"
            )));
        }
        for row in &rows {
            if row.indices.iter().any(|&i| i >= dim) {
                return Err(Error::InvalidParameter("sparse row index out of range".into()));
            }
        }
        let k = rows.len();
        Ok(VerySparseProjection {
            dim,
            k,
            sparsity,
            scale: 1.0 / (k as f64).sqrt(),
            rows,
            densify_cap: DEFAULT_ORACLE_CAP,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sparsity(&self) -> f64 {
        self.sparsity
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }
}

impl Projection for VerySparseProjection {
    fn family(&self) -> &'static str {
        VERY_SPARSE_FAMILY.name()
    }

    fn k(&self) -> usize {
        self.k
    }

    fn rank(&self) -> Option<usize> {
        None
    }

    fn project(&self, x: TensorRef<'_>) -> Result<Embedding> {
        if x.shape().size() != self.dim {
            return Err(Error::LengthMismatch(self.dim, x.shape().size()));
        }
        let owned;
        let vec = match x {
            TensorRef::Dense(d) => d.values(),
            _ => {
                owned = x.to_dense_capped(self.densify_cap)?;
                owned.values()
            }
        };
        let out = self.rows.iter().map(|row| self.scale * row.dot(vec)).collect();
        Ok(Embedding::new(out))
    }
}

/// Per-family sampling knobs. `rank` feeds the TT and CP families,
/// `sparsity` the very sparse family (None means sqrt(D)), `densify_cap`
/// bounds how large an input the dense-row families will vectorize.
#[derive(Debug, Clone)]
pub struct FamilyConfig {
    pub rank: usize,
    pub sparsity: Option<f64>,
    pub densify_cap: usize,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig { rank: 1, sparsity: None, densify_cap: DEFAULT_ORACLE_CAP }
    }
}

impl FamilyConfig {
    pub fn with_rank(rank: usize) -> Self {
        FamilyConfig { rank, ..Default::default() }
    }
}

/// A registered projection family: a named strategy for sampling maps.
pub trait ProjectionFamily: Send + Sync {
    /// Registry name, as accepted on the command line.
    fn name(&self) -> &'static str;

    /// Whether `FamilyConfig::rank` participates in sampling.
    fn uses_rank(&self) -> bool;

    /// Samples a k-row map for tensors of `shape`.
    fn sample(
        &self,
        shape: &Shape,
        cfg: &FamilyConfig,
        k: usize,
        seed: Seed,
    ) -> Result<Box<dyn Projection>>;
}

pub struct TtFamily;
pub struct CpFamily;
pub struct GaussianFamily;
pub struct VerySparseFamily;

pub static TT_FAMILY: TtFamily = TtFamily;
pub static CP_FAMILY: CpFamily = CpFamily;
pub static GAUSSIAN_FAMILY: GaussianFamily = GaussianFamily;
pub static VERY_SPARSE_FAMILY: VerySparseFamily = VerySparseFamily;

impl ProjectionFamily for TtFamily {
    fn name(&self) -> &'static str {
        "tt"
    }

    fn uses_rank(&self) -> bool {
        true
    }

    fn sample(
        &self,
        shape: &Shape,
        cfg: &FamilyConfig,
        k: usize,
        seed: Seed,
    ) -> Result<Box<dyn Projection>> {
        Ok(Box::new(random::sample_tt_projection(shape, cfg.rank, k, seed)?))
    }
}

impl ProjectionFamily for CpFamily {
    fn name(&self) -> &'static str {
        "cp"
    }

    fn uses_rank(&self) -> bool {
        true
    }

    fn sample(
        &self,
        shape: &Shape,
        cfg: &FamilyConfig,
        k: usize,
        seed: Seed,
    ) -> Result<Box<dyn Projection>> {
        Ok(Box::new(random::sample_cp_projection(shape, cfg.rank, k, seed)?))
    }
}

impl ProjectionFamily for GaussianFamily {
    fn name(&self) -> &'static str {
        "gaussian"
    }

    fn uses_rank(&self) -> bool {
        false
    }

    fn sample(
        &self,
        shape: &Shape,
        cfg: &FamilyConfig,
        k: usize,
        seed: Seed,
    ) -> Result<Box<dyn Projection>> {
        let mut p = random::sample_gaussian_rp(shape.size(), k, seed)?;
        p.densify_cap = cfg.densify_cap;
        Ok(Box::new(p))
    }
}

impl ProjectionFamily for VerySparseFamily {
    fn name(&self) -> &'static str {
        "very-sparse"
    }

    fn uses_rank(&self) -> bool {
        false
    }

    fn sample(
        &self,
        shape: &Shape,
        cfg: &FamilyConfig,
        k: usize,
        seed: Seed,
    ) -> Result<Box<dyn Projection>> {
        let dim = shape.size();
        let s = cfg.sparsity.unwrap_or_else(|| (dim as f64).sqrt());
        let mut p = random::sample_very_sparse_rp(dim, k, s, seed)?;
        p.densify_cap = cfg.densify_cap;
        Ok(Box::new(p))
    }
}

/// All registered families, in registry order.
pub static FAMILIES: [&dyn ProjectionFamily; 4] =
    [&TT_FAMILY, &CP_FAMILY, &GAUSSIAN_FAMILY, &VERY_SPARSE_FAMILY];

/// Looks a family up by its registry name.
pub fn family_by_name(name: &str) -> Option<&'static dyn ProjectionFamily> {
    FAMILIES.iter().copied().find(|f| f.name() == name)
}

/// Registry names, in registry order.
pub fn family_names() -> Vec<&'static str> {
    FAMILIES.iter().map(|f| f.name()).collect()
}

/// Rank-one Khatri-Rao projection of a dense tensor:
/// component j is scale * <a^N_j (x) ... (x) a^1_j, vec(x)>.
///
/// `factors[n]` is d_n x k with unit-variance entries. The chain is folded
/// last factor outermost so that column j lines up with the
/// first-index-fastest vec(x); this is exactly the rank-1 CP map built from
/// the same columns.
pub fn trp_project(factors: &[Matrix], x: &DenseTensor) -> Result<Embedding> {
    let dims = x.shape().dims();
    if factors.len() != dims.len() {
        return Err(Error::OrderMismatch { expected: dims.len(), got: factors.len() });
    }
    let k = factors[0].cols();
    for (ix, (f, &d)) in factors.iter().zip(dims).enumerate() {
        if f.rows() != d {
            return Err(Error::InvalidParameter(format!(
                "factor {ix} has {} rows, expected {d}",
                f.rows()
            )));
        }
        if f.cols() != k {
            return Err(Error::ColumnMismatch(k, f.cols()));
        }
    }
    let mut chain = factors[0].clone();
    for f in &factors[1..] {
        chain = khatri_rao(f, &chain)?;
    }
    let scale = 1.0 / (k as f64).sqrt();
    let mut out = vec![0.0; k];
    for (p, &xv) in x.values().iter().enumerate() {
        for (o, &cv) in out.iter_mut().zip(chain.row(p)) {
            *o += cv * xv;
        }
    }
    for o in &mut out {
        *o *= scale;
    }
    Ok(Embedding::new(out))
}

/// Average of T independent rank-one projections, rescaled by 1/sqrt(T).
/// With T draws this is the same map as a rank-T CP projection.
pub fn averaged_trp_project(outputs: &[Embedding]) -> Result<Embedding> {
    let first = outputs
        .first()
        .ok_or_else(|| Error::InvalidParameter("need at least one projection output".into()))?;
    let k = first.len();
    let mut sum = vec![0.0; k];
    for e in outputs {
        if e.len() != k {
            return Err(Error::LengthMismatch(k, e.len()));
        }
        for (s, &v) in sum.iter_mut().zip(e.values()) {
            *s += v;
        }
    }
    let scale = 1.0 / (outputs.len() as f64).sqrt();
    for s in &mut sum {
        *s *= scale;
    }
    Ok(Embedding::new(sum))
}
