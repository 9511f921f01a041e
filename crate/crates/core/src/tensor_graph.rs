//! Tensor-spherical graph embeddings.
//!
//! A graph with edge set `E` over a codebook is embedded as the `d x d`
//! matrix `G = sum_{(a, b) in E} x_a x_b^T`. Queries are bilinear forms in
//! `G` and graph operations are matrix algebra: powers compose edges,
//! transposition reverses them, and conjugation by a projector restricts to
//! a vertex subset. With an exactly orthonormal codebook every result equals
//! the corresponding adjacency-matrix computation; with spherical codes the
//! results carry noise whose variance shrinks like `1/d` per dot product.
//!
//! Values are immutable; every operation returns a new embedding.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector, DVectorView};
use serde::{Deserialize, Serialize};

use crate::codebook::Codebook;
use crate::envelope::Embedding;
use crate::error::{check_dim, check_index, Error, Result};

/// Directed edge `(domain, codomain)` between codebook indices.
pub type Edge = (usize, usize);

/// Which side of the embedding a set query walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Vertices reached from the set: `S^T G`.
    Out,
    /// Vertices pointing into the set: `G S`.
    In,
}

/// A `d x d` superposition of outer-product edges.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphEmbedding {
    matrix: DMatrix<f64>,
    codebook_ref: String,
}

/// A sum of vertex codes.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSuperposition(pub DVector<f64>);

impl VertexSuperposition {
    pub fn from_vertices(cb: &Codebook, vertices: &[usize]) -> Result<Self> {
        Ok(VertexSuperposition(cb.superpose(vertices)?))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.0
    }
}

/// Vertices recovered from a superposition with their scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedSet {
    /// `(vertex, score)` pairs in increasing vertex order.
    pub members: Vec<(usize, f64)>,
    pub threshold: f64,
}

impl DecodedSet {
    pub fn vertices(&self) -> Vec<usize> {
        self.members.iter().map(|&(v, _)| v).collect()
    }
}

/// Default decoding threshold, halfway between the ideal scores 0 and 1.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Members of `sup`: every vertex whose code scores at least `threshold`.
pub fn decode(sup: &VertexSuperposition, cb: &Codebook, threshold: f64) -> Result<DecodedSet> {
    check_dim(cb.dim(), sup.dim())?;
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "decode threshold must be positive, got {threshold}"
        )));
    }
    let scores = cb.matrix().tr_mul(&sup.0);
    let members = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= threshold)
        .map(|(v, &s)| (v, s))
        .collect();
    Ok(DecodedSet { members, threshold })
}

impl GraphEmbedding {
    /// Embedding of the empty graph.
    pub fn zeros(dim: usize, codebook_ref: impl Into<String>) -> Self {
        GraphEmbedding {
            matrix: DMatrix::zeros(dim, dim),
            codebook_ref: codebook_ref.into(),
        }
    }

    pub fn from_matrix(matrix: DMatrix<f64>, codebook_ref: impl Into<String>) -> Result<Self> {
        check_dim(matrix.nrows(), matrix.ncols())?;
        Ok(GraphEmbedding {
            matrix,
            codebook_ref: codebook_ref.into(),
        })
    }

    /// `G = sum_i x_{d_i} x_{c_i}^T`; duplicate edges accumulate.
    pub fn embed(edges: &[Edge], cb: &Codebook) -> Result<Self> {
        let mut g = GraphEmbedding::zeros(cb.dim(), cb.id());
        for &(a, b) in edges {
            g.accumulate(cb, a, b, 1.0)?;
        }
        Ok(g)
    }

    fn accumulate(&mut self, cb: &Codebook, a: usize, b: usize, weight: f64) -> Result<()> {
        check_dim(self.dim(), cb.dim())?;
        let x = cb.try_code(a)?;
        let y = cb.try_code(b)?;
        self.matrix.ger(weight, &x, &y, 1.0);
        Ok(())
    }

    /// Adds `w * a b^T` for arbitrary codes.
    pub fn add_outer(&mut self, a: DVectorView<'_, f64>, b: DVectorView<'_, f64>, weight: f64) {
        self.matrix.ger(weight, &a, &b, 1.0);
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn codebook_ref(&self) -> &str {
        &self.codebook_ref
    }

    fn derived(&self, matrix: DMatrix<f64>) -> Self {
        GraphEmbedding {
            matrix,
            codebook_ref: self.codebook_ref.clone(),
        }
    }

    pub fn add_edge(&self, cb: &Codebook, a: usize, b: usize) -> Result<Self> {
        let mut g = self.clone();
        g.accumulate(cb, a, b, 1.0)?;
        Ok(g)
    }

    /// Subtracts `a b^T`. Removing an absent edge leaves a `-1`-weighted
    /// ghost edge; the embedding cannot tell membership exactly.
    pub fn remove_edge(&self, cb: &Codebook, a: usize, b: usize) -> Result<Self> {
        let mut g = self.clone();
        g.accumulate(cb, a, b, -1.0)?;
        Ok(g)
    }

    /// `a^T G b` for arbitrary codes.
    pub fn bilinear(&self, a: DVectorView<'_, f64>, b: DVectorView<'_, f64>) -> f64 {
        let gb = &self.matrix * b;
        a.dot(&gb)
    }

    /// `x_a^T G x_b`: about 1 when the edge is present, about 0 otherwise.
    pub fn edge_query(&self, cb: &Codebook, a: usize, b: usize) -> Result<f64> {
        check_dim(self.dim(), cb.dim())?;
        Ok(self.bilinear(cb.try_code(a)?, cb.try_code(b)?))
    }

    /// Row query `x_v^T G`, the superposition of out-neighbours of `v`.
    pub fn out_neighbors(&self, cb: &Codebook, v: usize) -> Result<VertexSuperposition> {
        check_dim(self.dim(), cb.dim())?;
        Ok(VertexSuperposition(self.matrix.tr_mul(&cb.try_code(v)?)))
    }

    /// Column query `G x_v`, the superposition of in-neighbours of `v`.
    pub fn in_neighbors(&self, cb: &Codebook, v: usize) -> Result<VertexSuperposition> {
        check_dim(self.dim(), cb.dim())?;
        Ok(VertexSuperposition(&self.matrix * cb.try_code(v)?))
    }

    /// `S^T G` (side `Out`) or `G S` (side `In`), unnormalized.
    pub fn neighbors_of_set(&self, s: &VertexSuperposition, side: Side) -> Result<VertexSuperposition> {
        check_dim(self.dim(), s.dim())?;
        let v = match side {
            Side::Out => self.matrix.tr_mul(&s.0),
            Side::In => &self.matrix * &s.0,
        };
        Ok(VertexSuperposition(v))
    }

    /// `G^2`: composed edges, i.e. paths of length two.
    pub fn compose(&self) -> Self {
        self.derived(&self.matrix * &self.matrix)
    }

    /// `G^k` for `k >= 1`: paths of length `k`.
    pub fn power(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "power needs k >= 1; G^0 is not a graph embedding".into(),
            ));
        }
        let mut result = self.matrix.clone();
        for _ in 1..k {
            result = &result * &self.matrix;
        }
        Ok(self.derived(result))
    }

    /// `x_v^T G^k`: vertices reachable from `v` by a `k`-path.
    pub fn flow_from(&self, cb: &Codebook, v: usize, k: u32) -> Result<VertexSuperposition> {
        self.power(k)?.out_neighbors(cb, v)
    }

    /// `G^k x_v`: vertices reaching `v` by a `k`-path.
    pub fn flow_to(&self, cb: &Codebook, v: usize, k: u32) -> Result<VertexSuperposition> {
        self.power(k)?.in_neighbors(cb, v)
    }

    /// `G^T`, every edge reversed.
    pub fn dual(&self) -> Self {
        self.derived(self.matrix.transpose())
    }

    /// `G + G^T`, the undirected version (not normalized).
    pub fn symmetrize(&self) -> Self {
        self.derived(&self.matrix + self.matrix.transpose())
    }

    /// `G - G^T`.
    pub fn alternize(&self) -> Self {
        self.derived(&self.matrix - self.matrix.transpose())
    }

    /// `P_S G P_S`, edges with both endpoints in `S`.
    pub fn subgraph(&self, vertices: &[usize], cb: &Codebook) -> Result<Self> {
        check_dim(self.dim(), cb.dim())?;
        let p = projector(cb, vertices)?;
        Ok(self.derived(&p * &self.matrix * &p))
    }

    /// `P_S G`, edges whose domain is in `S`.
    pub fn restrict_domain(&self, vertices: &[usize], cb: &Codebook) -> Result<Self> {
        check_dim(self.dim(), cb.dim())?;
        let p = projector(cb, vertices)?;
        Ok(self.derived(&p * &self.matrix))
    }

    /// `G P_S`, edges whose codomain is in `S`.
    pub fn restrict_codomain(&self, vertices: &[usize], cb: &Codebook) -> Result<Self> {
        check_dim(self.dim(), cb.dim())?;
        let p = projector(cb, vertices)?;
        Ok(self.derived(&self.matrix * &p))
    }

    /// Re-expresses the embedding in another codebook enumerating the same
    /// vertices: `Psi G Psi^T` with `Psi = Phi_to Phi_from^T`.
    pub fn translate(&self, from: &Codebook, to: &Codebook) -> Result<Self> {
        check_dim(from.len(), to.len())?;
        check_dim(self.dim(), from.dim())?;
        let psi = to.matrix() * from.matrix().transpose();
        let m = &psi * &self.matrix * psi.transpose();
        Ok(GraphEmbedding {
            matrix: m,
            codebook_ref: to.id(),
        })
    }

    /// `tr(G)`, the (approximate) number of self-loops.
    pub fn self_loop_count(&self) -> f64 {
        self.matrix.trace()
    }

    /// `tr(G^T G) = ||G||_F^2`, the (approximate) number of edges. Not
    /// rounded: pseudo-orthogonal codes give non-integral values.
    pub fn edge_count(&self) -> f64 {
        self.matrix.norm_squared()
    }

    /// `||G - H||_F`; with orthonormal codes the square root of the number of
    /// differing edges.
    pub fn distance(&self, other: &GraphEmbedding) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok((&self.matrix - &other.matrix).norm())
    }

    /// Joint in-degree `x_v^T (G^T G) x_w`; `v == w` gives the in-degree.
    pub fn in_degree(&self, cb: &Codebook, v: usize, w: usize) -> Result<f64> {
        check_dim(self.dim(), cb.dim())?;
        let gv = &self.matrix * cb.try_code(v)?;
        let gw = &self.matrix * cb.try_code(w)?;
        Ok(gv.dot(&gw))
    }

    /// Joint out-degree `x_v^T (G G^T) x_w`.
    pub fn out_degree(&self, cb: &Codebook, v: usize, w: usize) -> Result<f64> {
        check_dim(self.dim(), cb.dim())?;
        let gv = self.matrix.tr_mul(&cb.try_code(v)?);
        let gw = self.matrix.tr_mul(&cb.try_code(w)?);
        Ok(gv.dot(&gw))
    }

    /// Adds a self-loop on every vertex of `vertices`, so that the trace
    /// counts them.
    pub fn augment_self_loops(&self, vertices: &[usize], cb: &Codebook) -> Result<Self> {
        let mut g = self.clone();
        for &v in vertices {
            g.accumulate(cb, v, v, 1.0)?;
        }
        Ok(g)
    }

    pub(crate) fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    pub(crate) fn from_rows(dim: usize, codebook_ref: String, rows: &[Vec<f64>]) -> Result<Self> {
        check_dim(dim, rows.len())?;
        for row in rows {
            check_dim(dim, row.len())?;
        }
        Ok(GraphEmbedding {
            matrix: DMatrix::from_fn(dim, dim, |i, j| rows[i][j]),
            codebook_ref,
        })
    }

    /// JSON `{scheme, dim, codebook_ref, matrix}` with the matrix as
    /// row-major rows.
    pub fn to_json(&self) -> Result<String> {
        Embedding::Tensor(self.clone()).to_json()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        match Embedding::from_json(s)? {
            Embedding::Tensor(g) => Ok(g),
            Embedding::Hdc(_) => Err(Error::Unsupported(
                "expected a tensor embedding, found a Hadamard embedding".into(),
            )),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// `P_S = sum_{s in S} x_s x_s^T`.
pub fn projector(cb: &Codebook, vertices: &[usize]) -> Result<DMatrix<f64>> {
    let d = cb.dim();
    let mut p = DMatrix::zeros(d, d);
    for &s in vertices {
        let x = cb.try_code(s)?;
        p.ger(1.0, &x, &x, 1.0);
    }
    Ok(p)
}

/// Graph homomorphism coefficient `tr(f(G)^T H) / |E_G|`.
///
/// `f[v]` is the image in `H`'s codebook of vertex `v` of `G`'s codebook;
/// `f(G)` is computed by the transition map `Psi = sum_v y_{f(v)} x_v^T`.
/// `edge_count` is the symbolic `|E_G|` when the caller knows it; otherwise
/// `tr(G^T G)` is used.
pub fn homomorphism_coefficient(
    g: &GraphEmbedding,
    h: &GraphEmbedding,
    f: &[usize],
    cb_g: &Codebook,
    cb_h: &Codebook,
    edge_count: Option<f64>,
) -> Result<f64> {
    check_dim(g.dim(), cb_g.dim())?;
    check_dim(h.dim(), cb_h.dim())?;
    check_dim(cb_g.len(), f.len())?;
    let count = edge_count.unwrap_or_else(|| g.edge_count());
    if count <= 0.0 {
        return Err(Error::InvalidArgument(
            "homomorphism coefficient of an empty graph is undefined".into(),
        ));
    }
    let mut psi = DMatrix::zeros(cb_h.dim(), cb_g.dim());
    for (v, &fv) in f.iter().enumerate() {
        check_index(fv, cb_h.len())?;
        psi.ger(1.0, &cb_h.code(fv), &cb_g.code(v), 1.0);
    }
    let image = &psi * g.matrix() * psi.transpose();
    Ok(image.dot(h.matrix()) / count)
}
