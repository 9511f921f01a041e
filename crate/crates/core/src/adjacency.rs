//! Symbolic graphs, the adjacency-matrix oracle, and the bridge between
//! adjacency matrices and tensor embeddings.
//!
//! Under an exactly orthonormal codebook `B` with code matrix `P`, the
//! embedding of a graph is `P A P^T`. The functions here check that
//! equivalence, measure how far a pseudo-orthonormal embedding sits from the
//! nearest such conjugate, and build the generalized Laplacian.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::codebook::{Codebook, CodebookKind};
use crate::error::{check_dim, check_index, Error, Result};
use crate::par::{map_indexed, Execution};
use crate::tensor_graph::{Edge, GraphEmbedding};

/// A directed graph on `0..num_vertices` with set semantics.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EdgeListGraph {
    num_vertices: usize,
    edges: BTreeSet<Edge>,
}

impl EdgeListGraph {
    pub fn new(num_vertices: usize) -> Self {
        EdgeListGraph {
            num_vertices,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(num_vertices: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut g = EdgeListGraph::new(num_vertices);
        for (a, b) in edges {
            g.insert(a, b)?;
        }
        Ok(g)
    }

    /// Inserts an edge; returns false if it was already present.
    pub fn insert(&mut self, a: usize, b: usize) -> Result<bool> {
        check_index(a, self.num_vertices)?;
        check_index(b, self.num_vertices)?;
        Ok(self.edges.insert((a, b)))
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a, b))
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_vec(&self) -> Vec<Edge> {
        self.edges.iter().copied().collect()
    }

    /// Parses the text format with numeric vertex indices.
    ///
    /// Either a header `n <num_vertices>` followed by `src dst` lines, or CSV
    /// with a header row and `src,dst` records. Blank lines and lines starting
    /// with `#` are skipped. Without an `n` header the vertex count is one
    /// more than the largest index.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, None, |tok, line| {
            tok.parse::<usize>().map_err(|_| Error::Parse {
                line,
                msg: format!("invalid vertex index `{tok}`"),
            })
        })
    }

    /// Parses with vertex names resolved through `names`; the vertex count is
    /// `names.len()`.
    pub fn parse_named(text: &str, names: &[String]) -> Result<Self> {
        Self::parse_with(text, Some(names.len()), |tok, line| {
            names.iter().position(|n| n == tok).ok_or_else(|| Error::Parse {
                line,
                msg: format!("unknown vertex `{tok}`"),
            })
        })
    }

    fn parse_with(
        text: &str,
        fixed_n: Option<usize>,
        resolve: impl Fn(&str, usize) -> Result<usize>,
    ) -> Result<Self> {
        let mut header_n = None;
        let mut pairs = Vec::new();
        let mut csv = false;
        let mut first = true;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if first {
                first = false;
                if line.contains(',') {
                    csv = true;
                    continue;
                }
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() == 2 && toks[0] == "n" {
                    let n = toks[1].parse::<usize>().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("invalid vertex count `{}`", toks[1]),
                    })?;
                    header_n = Some(n);
                    continue;
                }
            }
            let toks: Vec<&str> = if csv {
                line.split(',').map(str::trim).collect()
            } else {
                line.split_whitespace().collect()
            };
            if toks.len() != 2 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected `src dst`, got `{line}`"),
                });
            }
            pairs.push((resolve(toks[0], line_no)?, resolve(toks[1], line_no)?, line_no));
        }
        let max_index = pairs.iter().map(|&(a, b, _)| a.max(b) + 1).max().unwrap_or(0);
        let n = match (fixed_n, header_n) {
            (Some(f), Some(h)) if h > f => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("header declares {h} vertices but only {f} are named"),
                })
            }
            (Some(f), _) => f,
            (None, Some(h)) => h,
            (None, None) => max_index,
        };
        let mut g = EdgeListGraph::new(n);
        for (a, b, line) in pairs {
            g.insert(a, b).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        }
        Ok(g)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// The `n <count>` / `src dst` text format.
    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.num_vertices);
        for (a, b) in &self.edges {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }
}

/// `n x n` 0/1 matrix with `A[i][j] = 1` exactly for edges `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix(pub DMatrix<f64>);

pub fn to_adjacency(g: &EdgeListGraph) -> AdjacencyMatrix {
    let n = g.num_vertices();
    let mut a = DMatrix::zeros(n, n);
    for (i, j) in g.edges() {
        a[(i, j)] = 1.0;
    }
    AdjacencyMatrix(a)
}

impl AdjacencyMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }

    /// `A^k`; entry `(i, j)` counts `k`-paths from `i` to `j`.
    pub fn power(&self, k: u32) -> DMatrix<f64> {
        let mut r = DMatrix::identity(self.len(), self.len());
        for _ in 0..k {
            r = &r * &self.0;
        }
        r
    }

    /// Number of common in-neighbours, `(A^T A)[v][w]`.
    pub fn joint_in_degree(&self, v: usize, w: usize) -> f64 {
        self.0.column(v).dot(&self.0.column(w))
    }

    /// Number of common out-neighbours, `(A A^T)[v][w]`.
    pub fn joint_out_degree(&self, v: usize, w: usize) -> f64 {
        self.0.row(v).dot(&self.0.row(w))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn edge_count(&self) -> f64 {
        self.0.sum()
    }

    /// `Diag(A) - A`, the oracle for the generalized Laplacian.
    pub fn diagonal_laplacian(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.0.diagonal()) - &self.0
    }

    /// `D_out - A` with out-degrees on the diagonal.
    pub fn out_degree_laplacian(&self) -> DMatrix<f64> {
        let deg = self.0.column_sum();
        DMatrix::from_diagonal(&deg) - &self.0
    }

    /// `D_in - A` with in-degrees on the diagonal.
    pub fn in_degree_laplacian(&self) -> DMatrix<f64> {
        let deg = self.0.row_sum().transpose();
        DMatrix::from_diagonal(&deg) - &self.0
    }
}

/// Fraction of edges `(a, b)` of `g` with `(f[a], f[b])` an edge of `h`,
/// counted by enumeration.
pub fn symbolic_homomorphism_fraction(g: &EdgeListGraph, h: &EdgeListGraph, f: &[usize]) -> Result<f64> {
    check_dim(g.num_vertices(), f.len())?;
    if g.num_edges() == 0 {
        return Err(Error::InvalidArgument(
            "homomorphism coefficient of an empty graph is undefined".into(),
        ));
    }
    let hits = g.edges().filter(|&(a, b)| h.contains(f[a], f[b])).count();
    Ok(hits as f64 / g.num_edges() as f64)
}

/// Haar-random orthogonal `d x d` matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal folded into `Q`.
pub fn random_rotation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let m = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = m.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Codebook whose codes are the columns of a random rotation.
pub fn rotated_basis<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Codebook {
    let q = random_rotation(d, rng);
    Codebook::from_matrix(CodebookKind::Custom, 0, q).expect("rotation columns are finite")
}

fn gram_deviation(cb: &Codebook) -> f64 {
    let gram = cb.matrix().tr_mul(cb.matrix());
    (gram - DMatrix::identity(cb.len(), cb.len())).amax()
}

/// `||embed(g, B) - P A P^T||_F` for an exactly orthonormal `B` whose first
/// `num_vertices` codes form the columns of `P`.
pub fn basis_change_equivalence(g: &EdgeListGraph, b: &Codebook) -> Result<f64> {
    if b.len() < g.num_vertices() {
        return Err(Error::InvalidArgument(format!(
            "codebook has {} codes for {} vertices",
            b.len(),
            g.num_vertices()
        )));
    }
    if gram_deviation(b) > 1e-10 {
        return Err(Error::InvalidArgument(
            "basis change needs an exactly orthonormal codebook".into(),
        ));
    }
    let emb = GraphEmbedding::embed(&g.edge_vec(), b)?;
    let p = b.matrix().columns(0, g.num_vertices());
    let a = to_adjacency(g);
    let conj = p * a.matrix() * p.transpose();
    Ok((emb.matrix() - conj).norm())
}

/// Distance from a pseudo-orthonormal embedding to its Gram-Schmidt
/// counterpart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximityReport {
    /// `||G_V - G_U||_F`.
    pub frobenius_gap: f64,
    /// `n * m * epsilon`.
    pub bound: f64,
    /// `frobenius_gap / bound`, 0 when the bound vanishes.
    pub ratio: f64,
    /// Largest pairwise `|<v_i, v_j>|` among the codes.
    pub epsilon: f64,
    pub n_edges: usize,
    pub m_codes: usize,
    /// `||v_i - u_i||` for each code.
    pub residual_norms: Vec<f64>,
}

/// Orthonormalizes the codebook by Gram-Schmidt, embeds `g` with both the
/// original codes and the orthonormalized ones, and reports the gap.
pub fn gram_schmidt_proximity(cb: &Codebook, g: &EdgeListGraph) -> Result<ProximityReport> {
    let m = cb.len();
    let d = cb.dim();
    if m > d {
        return Err(Error::InvalidArgument(format!(
            "Gram-Schmidt needs at most d = {d} codes, got {m}"
        )));
    }
    if g.num_vertices() > m {
        return Err(Error::InvalidArgument(format!(
            "graph has {} vertices but the codebook only {m} codes",
            g.num_vertices()
        )));
    }
    let v = cb.matrix();
    let mut u = v.clone();
    for i in 0..m {
        for j in 0..i {
            let proj = u.column(j).dot(&u.column(i));
            let uj = u.column(j).clone_owned();
            u.column_mut(i).axpy(-proj, &uj, 1.0);
        }
        let norm = u.column(i).norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument(format!("code {i} is linearly dependent")));
        }
        u.column_mut(i).unscale_mut(norm);
    }
    let mut epsilon: f64 = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            epsilon = epsilon.max(v.column(i).dot(&v.column(j)).abs());
        }
    }
    let residual_norms = (0..m).map(|i| (v.column(i) - u.column(i)).norm()).collect();
    let ortho = Codebook::from_matrix(CodebookKind::Custom, cb.seed(), u)?;
    let edges = g.edge_vec();
    let gv = GraphEmbedding::embed(&edges, cb)?;
    let gu = GraphEmbedding::embed(&edges, &ortho)?;
    let frobenius_gap = gv.distance(&gu)?;
    let bound = edges.len() as f64 * m as f64 * epsilon;
    let ratio = if bound > 0.0 { frobenius_gap / bound } else { 0.0 };
    Ok(ProximityReport {
        frobenius_gap,
        bound,
        ratio,
        epsilon,
        n_edges: edges.len(),
        m_codes: m,
        residual_norms,
    })
}

/// `Diag_V(G) = sum_v (v v^T) G (v v^T) = sum_v (v^T G v) v v^T`.
pub fn diagonalize(g: &GraphEmbedding, cb: &Codebook) -> Result<GraphEmbedding> {
    diagonalize_with(g, cb, Execution::default())
}

pub fn diagonalize_with(g: &GraphEmbedding, cb: &Codebook, exec: Execution) -> Result<GraphEmbedding> {
    check_dim(g.dim(), cb.dim())?;
    let coeffs = map_indexed(cb.len(), exec, |v| g.bilinear(cb.code(v), cb.code(v)));
    let mut out = GraphEmbedding::zeros(g.dim(), g.codebook_ref());
    for (v, c) in coeffs.into_iter().enumerate() {
        out.add_outer(cb.code(v), cb.code(v), c);
    }
    Ok(out)
}

/// `L(G) = Diag_V(G) - G`.
pub fn generalized_laplacian(g: &GraphEmbedding, cb: &Codebook) -> Result<DMatrix<f64>> {
    Ok(diagonalize(g, cb)?.matrix() - g.matrix())
}

fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    m.is_square() && (m - m.transpose()).amax() <= tol
}

/// Eigenvalues sorted by real part, then imaginary part. Symmetric inputs
/// use the symmetric solver.
pub fn spectrum(m: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let mut ev: Vec<Complex<f64>> = if is_symmetric(m, 1e-12) {
        m.clone()
            .symmetric_eigenvalues()
            .iter()
            .map(|&x| Complex::new(x, 0.0))
            .collect()
    } else {
        m.complex_eigenvalues().iter().copied().collect()
    };
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

/// Coefficients `e_1..e_n` of the characteristic polynomial
/// `x^n - e_1 x^{n-1} + e_2 x^{n-2} - ...`, from the power sums `tr(M^j)`.
pub fn characteristic_coefficients(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut p = Vec::with_capacity(n);
    let mut pow = DMatrix::identity(n, n);
    for _ in 0..n {
        pow = &pow * m;
        p.push(pow.trace());
    }
    let mut e = vec![1.0];
    for k in 1..=n {
        let mut s = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            s += sign * e[k - i] * p[i - 1];
        }
        e.push(s / k as f64);
    }
    e.split_off(1)
}

/// True when `a` and `b` have the same eigenvalue multiset within `tol`.
///
/// Symmetric pairs compare sorted eigenvalues. Non-symmetric Laplacians are
/// often defective, where computed eigenvalues scatter by `eps^(1/k)` for a
/// `k`-block, so general pairs compare characteristic polynomial
/// coefficients instead, with `tol` relative to each coefficient's size.
pub fn spectra_match(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    if a.shape() != b.shape() || !a.is_square() {
        return false;
    }
    if is_symmetric(a, 1e-12) && is_symmetric(b, 1e-12) {
        let sa = spectrum(a);
        let sb = spectrum(b);
        return sa.iter().zip(&sb).all(|(x, y)| (x - y).norm() <= tol);
    }
    let ca = characteristic_coefficients(a);
    let cb = characteristic_coefficients(b);
    ca.iter()
        .zip(&cb)
        .all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

/// Parameter counts of the common storage formats for one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamCounts {
    pub dense: usize,
    pub dok: usize,
    pub coo: usize,
    pub csr: usize,
    /// `d^2` when a code dimension is given.
    pub tensor_spherical: Option<usize>,
}

/// Dense `n^2`, DoK and COO `3k`, CSR `2k + n + 1`, tensor `d^2`.
pub fn sparse_param_counts(g: &EdgeListGraph, d: Option<usize>) -> ParamCounts {
    let n = g.num_vertices();
    let k = g.num_edges();
    ParamCounts {
        dense: n * n,
        dok: 3 * k,
        coo: 3 * k,
        csr: 2 * k + n + 1,
        tensor_spherical: d.map(|d| d * d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::task_rng;
    use approx::assert_abs_diff_eq;

    #[test]
    fn adjacency_basics() {
        let e = to_adjacency(&EdgeListGraph::new(3));
        assert!(e.matrix().iter().all(|&x| x == 0.0));
        let a = to_adjacency(&EdgeListGraph::from_edges(2, [(0, 1)]).unwrap());
        assert_eq!(a.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        let cyc = to_adjacency(&EdgeListGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap());
        let c3 = cyc.power(3);
        assert!((0..3).all(|i| c3[(i, i)] == 1.0));
    }

    #[test]
    fn set_semantics() {
        let mut g = EdgeListGraph::new(2);
        assert!(g.insert(0, 1).unwrap());
        assert!(!g.insert(0, 1).unwrap());
        assert!(g.insert(2, 0).is_err());
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn parse_formats() {
        let g = EdgeListGraph::parse("n 4\n0 1\n# c\n\n2 3\n").unwrap();
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(g.edge_vec(), vec![(0, 1), (2, 3)]);
        let c = EdgeListGraph::parse("src,dst\n0,1\n2, 3\n").unwrap();
        assert_eq!(c.num_vertices(), 4);
        assert_eq!(c.edge_vec(), g.edge_vec());
        assert_eq!(EdgeListGraph::parse(&g.to_text()).unwrap(), g);
        assert!(matches!(
            EdgeListGraph::parse("n 2\n0 5\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(EdgeListGraph::parse("n 2\n0 x\n").is_err());
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let named = EdgeListGraph::parse_named("a b\na c\n", &names).unwrap();
        assert_eq!(named.edge_vec(), vec![(0, 1), (0, 2)]);
        assert!(EdgeListGraph::parse_named("a z\n", &names).is_err());
        assert_eq!(EdgeListGraph::parse("").unwrap().num_vertices(), 0);
    }

    #[test]
    fn basis_change_standard_and_rotated() {
        let g = EdgeListGraph::from_edges(4, [(0, 1), (1, 2), (3, 3)]).unwrap();
        let std = Codebook::standard_basis(4);
        assert_eq!(basis_change_equivalence(&g, &std).unwrap(), 0.0);
        let mut rng = task_rng(1, 0);
        let rot = rotated_basis(4, &mut rng);
        assert!(basis_change_equivalence(&g, &rot).unwrap() < 1e-9);
        assert_eq!(basis_change_equivalence(&EdgeListGraph::new(4), &rot).unwrap(), 0.0);
        let sph = Codebook::generate(CodebookKind::Spherical, 4, 4, 1).unwrap();
        assert!(basis_change_equivalence(&g, &sph).is_err());
    }

    #[test]
    fn rotation_is_orthogonal() {
        let q = random_rotation(7, &mut task_rng(3, 0));
        let err = (q.tr_mul(&q) - DMatrix::identity(7, 7)).amax();
        assert!(err < 1e-12);
    }

    #[test]
    fn proximity_orthonormal_is_exact() {
        let g = EdgeListGraph::from_edges(3, [(0, 1), (2, 0)]).unwrap();
        let r = gram_schmidt_proximity(&Codebook::standard_basis(3), &g).unwrap();
        assert_eq!(r.frobenius_gap, 0.0);
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn proximity_single_edge_bound() {
        let cb = Codebook::generate(CodebookKind::Spherical, 2, 16, 4).unwrap();
        let g = EdgeListGraph::from_edges(2, [(0, 1)]).unwrap();
        let r = gram_schmidt_proximity(&cb, &g).unwrap();
        let (d1, d2) = (r.residual_norms[0], r.residual_norms[1]);
        assert!(r.frobenius_gap <= d1 + d2 + d1 * d2 + 1e-15);
        assert!(r.frobenius_gap > 0.0);
    }

    #[test]
    fn proximity_rejects_overfull_books() {
        let cb = Codebook::generate(CodebookKind::Spherical, 5, 4, 1).unwrap();
        assert!(gram_schmidt_proximity(&cb, &EdgeListGraph::new(5)).is_err());
    }

    #[test]
    fn diagonalize_keeps_self_loops() {
        let cb = Codebook::standard_basis(3);
        let g = GraphEmbedding::embed(&[(0, 0), (0, 1), (2, 2)], &cb).unwrap();
        let d = diagonalize(&g, &cb).unwrap();
        let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0, 1.0]));
        assert_eq!(d.matrix(), &want);
        let noloops = GraphEmbedding::embed(&[(0, 1), (1, 2)], &cb).unwrap();
        assert!(diagonalize(&noloops, &cb).unwrap().matrix().iter().all(|&x| x == 0.0));
        let seq = diagonalize_with(&g, &cb, Execution::Sequential).unwrap();
        let par = diagonalize_with(&g, &cb, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn laplacian_examples() {
        let cb = Codebook::standard_basis(3);
        let empty = GraphEmbedding::zeros(3, "x");
        let l = generalized_laplacian(&empty, &cb).unwrap();
        assert!(l.iter().all(|&x| x == 0.0));
        let loop0 = GraphEmbedding::embed(&[(0, 0)], &cb).unwrap();
        let l0 = generalized_laplacian(&loop0, &cb).unwrap();
        assert!(l0.iter().all(|&x| x == 0.0));
        let g = EdgeListGraph::from_edges(3, [(0, 1), (1, 2), (1, 1)]).unwrap();
        let emb = GraphEmbedding::embed(&g.edge_vec(), &cb).unwrap();
        let lg = generalized_laplacian(&emb, &cb).unwrap();
        assert_eq!(lg, to_adjacency(&g).diagonal_laplacian());
    }

    #[test]
    fn rotated_laplacian_spectrum() {
        let g = EdgeListGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 3)]).unwrap();
        let rot = rotated_basis(4, &mut task_rng(8, 0));
        let emb = GraphEmbedding::embed(&g.edge_vec(), &rot).unwrap();
        let l = generalized_laplacian(&emb, &rot).unwrap();
        assert!(spectra_match(&l, &to_adjacency(&g).diagonal_laplacian(), 1e-6));
        let other = EdgeListGraph::from_edges(4, [(0, 1), (1, 0)]).unwrap();
        assert!(!spectra_match(&l, &to_adjacency(&other).diagonal_laplacian(), 1e-6));
    }

    #[test]
    fn characteristic_polynomial_small() {
        // eigenvalues 2 and 3: x^2 - 5x + 6
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 3.0]);
        let c = characteristic_coefficients(&m);
        assert_abs_diff_eq!(c[0], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c[1], 6.0, epsilon = 1e-12);
    }

    #[test]
    fn param_counts() {
        let mut g = EdgeListGraph::new(128);
        for i in 0..64 {
            g.insert(i, i + 1).unwrap();
        }
        let c = sparse_param_counts(&g, Some(16));
        assert_eq!(c.dense, 16384);
        assert_eq!(c.tensor_spherical, Some(256));
        assert_eq!(c.dense / 256, 64);
        let e = sparse_param_counts(&EdgeListGraph::new(5), None);
        assert_eq!((e.dok, e.coo, e.csr), (0, 0, 6));
        let full = EdgeListGraph::from_edges(3, (0..3).flat_map(|a| (0..3).map(move |b| (a, b)))).unwrap();
        let f = sparse_param_counts(&full, None);
        assert!(f.dense < f.coo);
    }

    #[test]
    fn homomorphism_oracle() {
        let path = EdgeListGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(symbolic_homomorphism_fraction(&path, &path, &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(symbolic_homomorphism_fraction(&path, &path, &[1, 2, 0]).unwrap(), 0.5);
        assert!(symbolic_homomorphism_fraction(&EdgeListGraph::new(3), &path, &[0, 1, 2]).is_err());
    }
}
