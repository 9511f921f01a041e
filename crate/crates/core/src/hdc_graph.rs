//! Hadamard-Rademacher graph embeddings.
//!
//! Edges are bound by the entrywise product of Rademacher codes and summed
//! into a single `D`-vector. An edge is queried by unbinding it from the
//! embedding and summing the result. Composition binds the embedding with
//! itself. The plain scheme is symmetric in its arguments, so it cannot tell
//! an edge from its reverse; the permuted scheme `P a ⊙ b` is directed but
//! loses composition.

use nalgebra::{DVector, DVectorView};

use crate::binding::Permutation;
use crate::codebook::{Codebook, CodebookKind};
use crate::envelope::Embedding;
use crate::error::{check_dim, Error, Result};
use crate::tensor_graph::Edge;

/// Binding used by an embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HdcScheme {
    /// `a ⊙ b`.
    Plain,
    /// `P a ⊙ b`.
    Permuted(Permutation),
}

/// Superposition of Hadamard-bound edges.
#[derive(Debug, Clone, PartialEq)]
pub struct HdcEmbedding {
    vector: DVector<f64>,
    codebook_ref: String,
    scheme: HdcScheme,
}

fn check_kind(cb: &Codebook) -> Result<()> {
    match cb.kind() {
        CodebookKind::Rademacher | CodebookKind::NormalizedRademacher => Ok(()),
        other => Err(Error::InvalidArgument(format!(
            "Hadamard embeddings need a Rademacher codebook, got {other}"
        ))),
    }
}

/// Binds two codes under `scheme`.
pub fn bind(scheme: &HdcScheme, a: DVectorView<'_, f64>, b: DVectorView<'_, f64>) -> Result<DVector<f64>> {
    check_dim(a.len(), b.len())?;
    Ok(match scheme {
        HdcScheme::Plain => a.component_mul(&b),
        HdcScheme::Permuted(p) => {
            check_dim(p.len(), a.len())?;
            let perm = p.as_slice();
            DVector::from_fn(a.len(), |i, _| a[perm[i]] * b[i])
        }
    })
}

impl HdcEmbedding {
    pub fn zeros(dim: usize, codebook_ref: impl Into<String>, scheme: HdcScheme) -> Self {
        HdcEmbedding {
            vector: DVector::zeros(dim),
            codebook_ref: codebook_ref.into(),
            scheme,
        }
    }

    pub(crate) fn from_parts(
        dim: usize,
        codebook_ref: String,
        vector: Vec<f64>,
        scheme: HdcScheme,
    ) -> Result<Self> {
        check_dim(dim, vector.len())?;
        if let HdcScheme::Permuted(p) = &scheme {
            check_dim(dim, p.len())?;
        }
        Ok(HdcEmbedding {
            vector: DVector::from_vec(vector),
            codebook_ref,
            scheme,
        })
    }

    /// Sum of bound edges. `permuted` selects the one-step cyclic shift.
    pub fn embed(edges: &[Edge], cb: &Codebook, permuted: bool) -> Result<Self> {
        let scheme = if permuted {
            HdcScheme::Permuted(Permutation::cyclic_shift(cb.dim(), 1))
        } else {
            HdcScheme::Plain
        };
        Self::embed_with(edges, cb, scheme)
    }

    pub fn embed_with(edges: &[Edge], cb: &Codebook, scheme: HdcScheme) -> Result<Self> {
        check_kind(cb)?;
        let mut g = HdcEmbedding::zeros(cb.dim(), cb.id(), scheme);
        for &(a, b) in edges {
            let e = bind(&g.scheme, cb.try_code(a)?, cb.try_code(b)?)?;
            g.vector += e;
        }
        Ok(g)
    }

    /// Adds `w * bind(a, b)` for arbitrary codes.
    pub fn add_bound(&mut self, a: DVectorView<'_, f64>, b: DVectorView<'_, f64>, weight: f64) -> Result<()> {
        check_dim(self.dim(), a.len())?;
        let e = bind(&self.scheme, a, b)?;
        self.vector.axpy(weight, &e, 1.0);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.vector
    }

    pub fn codebook_ref(&self) -> &str {
        &self.codebook_ref
    }

    pub fn scheme(&self) -> &HdcScheme {
        &self.scheme
    }

    /// `sum(bind(a, b) ⊙ G)` for arbitrary codes, unnormalized.
    pub fn query_codes(&self, a: DVectorView<'_, f64>, b: DVectorView<'_, f64>) -> Result<f64> {
        check_dim(self.dim(), a.len())?;
        Ok(bind(&self.scheme, a, b)?.dot(&self.vector))
    }

    /// Edge score, about `D` (or 1 when `normalize`) for present edges.
    pub fn edge_query(&self, cb: &Codebook, a: usize, b: usize, normalize: bool) -> Result<f64> {
        check_dim(self.dim(), cb.dim())?;
        let s = self.query_codes(cb.try_code(a)?, cb.try_code(b)?)?;
        Ok(if normalize { s / self.dim() as f64 } else { s })
    }

    /// Entrywise square `G ⊙ G`, keeping the scheme tag, for any scheme.
    /// Under a permutation the result carries no composed-edge signal.
    pub fn self_bind(&self) -> Self {
        HdcEmbedding {
            vector: self.vector.component_mul(&self.vector),
            codebook_ref: self.codebook_ref.clone(),
            scheme: self.scheme.clone(),
        }
    }

    /// Edge composition `G ⊙ G`, only defined for the plain scheme.
    pub fn compose(&self) -> Result<Self> {
        match self.scheme {
            HdcScheme::Plain => Ok(self.self_bind()),
            HdcScheme::Permuted(_) => Err(Error::Unsupported(
                "edge composition is not defined for the permuted Hadamard scheme".into(),
            )),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Embedding::Hdc(self.clone()).to_json()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        match Embedding::from_json(s)? {
            Embedding::Hdc(h) => Ok(h),
            Embedding::Tensor(_) => Err(Error::Unsupported(
                "expected a Hadamard embedding, found a tensor embedding".into(),
            )),
        }
    }
}
