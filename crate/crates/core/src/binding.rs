//! Binding operations: the outer (tensor) product and its compressions.
//!
//! The Hadamard product, circular convolution and circular correlation are
//! all linear images of the outer product `a b^T`: the main diagonal, the
//! sums along wrapped anti-diagonals (`i + j = k mod d`) and the sums along
//! wrapped diagonals (`j - i = k mod d`) respectively. Convolution and
//! correlation are circular, indices taken mod `d`.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Outer product of a domain and a codomain code.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundEdgeMatrix(pub DMatrix<f64>);

impl Deref for BoundEdgeMatrix {
    type Target = DMatrix<f64>;
    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Output of a compressed (vector-valued) binding.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundEdgeVector(pub DVector<f64>);

impl Deref for BoundEdgeVector {
    type Target = DVector<f64>;
    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

/// A permutation of `0..d`, acting on vectors by `(P a)[i] = a[perm[i]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let d = perm.len();
        let mut seen = vec![false; d];
        for &p in &perm {
            if p >= d || seen[p] {
                return Err(Error::InvalidArgument(format!(
                    "not a permutation of 0..{d}: {perm:?}"
                )));
            }
            seen[p] = true;
        }
        Ok(Permutation(perm))
    }

    pub fn identity(d: usize) -> Self {
        Permutation((0..d).collect())
    }

    /// `(P a)[i] = a[i - shift mod d]`.
    pub fn cyclic_shift(d: usize, shift: usize) -> Self {
        let s = if d == 0 { 0 } else { shift % d };
        Permutation((0..d).map(|i| (i + d - s) % d).collect())
    }

    /// Index negation `(P a)[i] = a[-i mod d]`.
    pub fn flip(d: usize) -> Self {
        Permutation((0..d).map(|i| (d - i) % d).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, a: &[f64]) -> Result<DVector<f64>> {
        check_dim(self.0.len(), a.len())?;
        Ok(DVector::from_iterator(a.len(), self.0.iter().map(|&p| a[p])))
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.0
    }
}

/// `M[i][j] = a[i] * b[j]`.
pub fn outer(a: &[f64], b: &[f64]) -> Result<BoundEdgeMatrix> {
    check_dim(a.len(), b.len())?;
    let d = a.len();
    Ok(BoundEdgeMatrix(DMatrix::from_fn(d, d, |i, j| a[i] * b[j])))
}

/// Entrywise product.
pub fn hadamard(a: &[f64], b: &[f64]) -> Result<BoundEdgeVector> {
    check_dim(a.len(), b.len())?;
    Ok(BoundEdgeVector(DVector::from_iterator(
        a.len(),
        a.iter().zip(b).map(|(x, y)| x * y),
    )))
}

/// `P a ⊙ b`.
pub fn permuted_hadamard(a: &[f64], b: &[f64], p: &Permutation) -> Result<BoundEdgeVector> {
    check_dim(a.len(), b.len())?;
    let pa = p.apply(a)?;
    hadamard(pa.as_slice(), b)
}

/// `[a * b]_k = sum_i a_i b_{k-i}`, direct O(d^2) sum.
pub fn convolution(a: &[f64], b: &[f64]) -> Result<BoundEdgeVector> {
    check_dim(a.len(), b.len())?;
    let d = a.len();
    let out = DVector::from_fn(d, |k, _| {
        (0..d).map(|i| a[i] * b[(k + d - i) % d]).sum::<f64>()
    });
    Ok(BoundEdgeVector(out))
}

/// `[a ⋆ b]_k = sum_i a_i b_{k+i}`, direct O(d^2) sum.
pub fn circular_correlation(a: &[f64], b: &[f64]) -> Result<BoundEdgeVector> {
    check_dim(a.len(), b.len())?;
    let d = a.len();
    let out = DVector::from_fn(d, |k, _| {
        (0..d).map(|i| a[i] * b[(k + i) % d]).sum::<f64>()
    });
    Ok(BoundEdgeVector(out))
}

/// Circular convolution through the FFT. Agrees with [`convolution`] to
/// rounding error.
pub fn convolution_fft(a: &[f64], b: &[f64]) -> Result<BoundEdgeVector> {
    check_dim(a.len(), b.len())?;
    let d = a.len();
    if d == 0 {
        return Ok(BoundEdgeVector(DVector::zeros(0)));
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(d);
    let inv = planner.plan_fft_inverse(d);
    let mut fa: Vec<Complex<f64>> = a.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let mut fb: Vec<Complex<f64>> = b.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    let mut prod: Vec<Complex<f64>> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
    inv.process(&mut prod);
    let scale = 1.0 / d as f64;
    Ok(BoundEdgeVector(DVector::from_iterator(
        d,
        prod.iter().map(|c| c.re * scale),
    )))
}

/// Circular correlation through the FFT, as convolution of the flipped first
/// argument.
pub fn circular_correlation_fft(a: &[f64], b: &[f64]) -> Result<BoundEdgeVector> {
    check_dim(a.len(), b.len())?;
    let flipped = Permutation::flip(a.len()).apply(a)?;
    convolution_fft(flipped.as_slice(), b)
}

/// Sums of `m` along wrapped anti-diagonals `i + j = k mod d`.
pub fn antidiagonal_sums(m: &DMatrix<f64>) -> DVector<f64> {
    let d = m.nrows();
    let mut out = DVector::zeros(d);
    for i in 0..d {
        for j in 0..d {
            out[(i + j) % d] += m[(i, j)];
        }
    }
    out
}

/// Sums of `m` along wrapped diagonals `j - i = k mod d`.
pub fn diagonal_sums(m: &DMatrix<f64>) -> DVector<f64> {
    let d = m.nrows();
    let mut out = DVector::zeros(d);
    for i in 0..d {
        for j in 0..d {
            out[(j + d - i) % d] += m[(i, j)];
        }
    }
    out
}
