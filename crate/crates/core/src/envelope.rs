//! Shared JSON file format for both embedding schemes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::binding::Permutation;
use crate::error::Result;
use crate::hdc_graph::{HdcEmbedding, HdcScheme};
use crate::tensor_graph::GraphEmbedding;

/// Either kind of embedding, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Embedding {
    Tensor(GraphEmbedding),
    Hdc(HdcEmbedding),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
enum EmbeddingFile {
    TensorSpherical {
        dim: usize,
        codebook_ref: String,
        matrix: Vec<Vec<f64>>,
    },
    HadamardRademacher {
        dim: usize,
        codebook_ref: String,
        vector: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        permutation: Option<Permutation>,
    },
}

impl Embedding {
    pub fn scheme_name(&self) -> &'static str {
        match self {
            Embedding::Tensor(_) => "tensor_spherical",
            Embedding::Hdc(_) => "hadamard_rademacher",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Embedding::Tensor(g) => g.dim(),
            Embedding::Hdc(h) => h.dim(),
        }
    }

    pub fn codebook_ref(&self) -> &str {
        match self {
            Embedding::Tensor(g) => g.codebook_ref(),
            Embedding::Hdc(h) => h.codebook_ref(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = match self {
            Embedding::Tensor(g) => EmbeddingFile::TensorSpherical {
                dim: g.dim(),
                codebook_ref: g.codebook_ref().to_string(),
                matrix: g.rows(),
            },
            Embedding::Hdc(h) => EmbeddingFile::HadamardRademacher {
                dim: h.dim(),
                codebook_ref: h.codebook_ref().to_string(),
                vector: h.vector().iter().copied().collect(),
                permutation: match h.scheme() {
                    HdcScheme::Plain => None,
                    HdcScheme::Permuted(p) => Some(p.clone()),
                },
            },
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        match serde_json::from_str(s)? {
            EmbeddingFile::TensorSpherical {
                dim,
                codebook_ref,
                matrix,
            } => Ok(Embedding::Tensor(GraphEmbedding::from_rows(
                dim,
                codebook_ref,
                &matrix,
            )?)),
            EmbeddingFile::HadamardRademacher {
                dim,
                codebook_ref,
                vector,
                permutation,
            } => {
                let scheme = match permutation {
                    None => HdcScheme::Plain,
                    Some(p) => HdcScheme::Permuted(p),
                };
                Ok(Embedding::Hdc(HdcEmbedding::from_parts(
                    dim,
                    codebook_ref,
                    vector,
                    scheme,
                )?))
            }
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
