//! Vertex codebooks and their dot-product statistics.
//!
//! A [`Codebook`] is an ordered set of `n` code vectors of dimension `d`,
//! stored as the columns of a `d x n` matrix. Vertex `i` is column `i`.
//! Random codebooks are a pure function of `(kind, n, d, seed)`; the
//! generator is ChaCha8 (`rand_chacha`), and spherical codes are drawn by
//! normalizing i.i.d. standard Gaussian vectors.
//!
//! A one-dimensional spherical codebook degenerates to codes in `{-1, +1}`.
//! It is accepted, though it carries no useful near-orthogonality.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, DVectorView};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, Binomial, ChiSquared, ContinuousCDF, Discrete};

use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Distribution family a codebook was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookKind {
    /// Uniform on the unit sphere `S^{d-1}`.
    Spherical,
    /// I.i.d. `±1` entries.
    Rademacher,
    /// Rademacher scaled by `1/sqrt(d)`.
    NormalizedRademacher,
    /// I.i.d. `N(0, 1)` entries.
    Gaussian,
    /// I.i.d. standard Cauchy entries.
    Cauchy,
    /// I.i.d. `Uniform[0, 1]` entries.
    Uniform01,
    /// Caller-supplied codes (orthonormal bases, rotations, Gram-Schmidt output).
    Custom,
}

impl CodebookKind {
    pub fn name(self) -> &'static str {
        match self {
            CodebookKind::Spherical => "spherical",
            CodebookKind::Rademacher => "rademacher",
            CodebookKind::NormalizedRademacher => "normalized_rademacher",
            CodebookKind::Gaussian => "gaussian",
            CodebookKind::Cauchy => "cauchy",
            CodebookKind::Uniform01 => "uniform01",
            CodebookKind::Custom => "custom",
        }
    }

    fn is_unit_norm(self) -> bool {
        matches!(
            self,
            CodebookKind::Spherical | CodebookKind::NormalizedRademacher
        )
    }

    fn is_continuous_ratio(self) -> bool {
        matches!(
            self,
            CodebookKind::Gaussian | CodebookKind::Cauchy | CodebookKind::Uniform01
        )
    }
}

impl fmt::Display for CodebookKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodebookKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "spherical" => CodebookKind::Spherical,
            "rademacher" => CodebookKind::Rademacher,
            "normalized_rademacher" | "nr" => CodebookKind::NormalizedRademacher,
            "gaussian" => CodebookKind::Gaussian,
            "cauchy" => CodebookKind::Cauchy,
            "uniform01" | "uniform" => CodebookKind::Uniform01,
            "custom" => CodebookKind::Custom,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown codebook kind `{other}`"
                )))
            }
        };
        Ok(kind)
    }
}

const NORM_TOL: f64 = 1e-12;

/// Draws one code of `kind` into `out`.
pub(crate) fn sample_code<R: Rng + ?Sized>(kind: CodebookKind, rng: &mut R, out: &mut [f64]) {
    match kind {
        CodebookKind::Spherical => loop {
            for x in out.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
            let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                out.iter_mut().for_each(|x| *x /= norm);
                break;
            }
        },
        CodebookKind::Rademacher => {
            for x in out.iter_mut() {
                *x = if rng.random::<bool>() { 1.0 } else { -1.0 };
            }
        }
        CodebookKind::NormalizedRademacher => {
            let s = 1.0 / (out.len() as f64).sqrt();
            for x in out.iter_mut() {
                *x = if rng.random::<bool>() { s } else { -s };
            }
        }
        CodebookKind::Gaussian => {
            for x in out.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
        }
        CodebookKind::Cauchy => {
            let c = Cauchy::new(0.0, 1.0).expect("valid scale");
            for x in out.iter_mut() {
                *x = c.sample(rng);
            }
        }
        CodebookKind::Uniform01 => {
            for x in out.iter_mut() {
                *x = rng.random::<f64>();
            }
        }
        CodebookKind::Custom => panic!("custom codebooks cannot be sampled"),
    }
}

/// Ordered vertex codes with generation metadata. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    kind: CodebookKind,
    seed: u64,
    codes: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct CodebookFile {
    kind: CodebookKind,
    dim: usize,
    n: usize,
    seed: u64,
    codes: Vec<Vec<f64>>,
}

impl Codebook {
    /// Draws `n` codes of dimension `d` from `kind`, deterministically in `seed`.
    pub fn generate(kind: CodebookKind, n: usize, d: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::generate_with(kind, n, d, seed, &mut rng)
    }

    /// Draws from an existing generator; `seed` is recorded as metadata only.
    pub fn generate_with<R: Rng + ?Sized>(
        kind: CodebookKind,
        n: usize,
        d: usize,
        seed: u64,
        rng: &mut R,
    ) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidArgument(format!(
                "codebook needs n >= 1 and d >= 1 (got n={n}, d={d})"
            )));
        }
        if kind == CodebookKind::Custom {
            return Err(Error::InvalidArgument(
                "custom codebooks are built from explicit codes".into(),
            ));
        }
        let mut codes = DMatrix::zeros(d, n);
        for mut col in codes.column_iter_mut() {
            sample_code(kind, rng, col.as_mut_slice());
        }
        Ok(Codebook { kind, seed, codes })
    }

    /// Builds a codebook from explicit codes (one inner vector per vertex),
    /// checking the invariants of `kind`.
    pub fn from_codes(kind: CodebookKind, seed: u64, codes: &[Vec<f64>]) -> Result<Self> {
        let n = codes.len();
        if n == 0 {
            return Err(Error::InvalidArgument("codebook must be non-empty".into()));
        }
        let d = codes[0].len();
        if d == 0 {
            return Err(Error::InvalidArgument("codes must have dimension >= 1".into()));
        }
        for c in codes {
            crate::error::check_dim(d, c.len())?;
        }
        let m = DMatrix::from_fn(d, n, |i, j| codes[j][i]);
        Self::from_matrix(kind, seed, m)
    }

    /// Builds a codebook whose codes are the columns of `codes`.
    pub fn from_matrix(kind: CodebookKind, seed: u64, codes: DMatrix<f64>) -> Result<Self> {
        if codes.ncols() == 0 || codes.nrows() == 0 {
            return Err(Error::InvalidArgument("codebook must be non-empty".into()));
        }
        let cb = Codebook { kind, seed, codes };
        cb.validate()?;
        Ok(cb)
    }

    /// The standard basis `e_0..e_{n-1}` of `R^n`.
    pub fn standard_basis(n: usize) -> Self {
        assert!(n >= 1, "standard basis needs n >= 1");
        Codebook {
            kind: CodebookKind::Custom,
            seed: 0,
            codes: DMatrix::identity(n, n),
        }
    }

    fn validate(&self) -> Result<()> {
        match self.kind {
            k if k.is_unit_norm() => {
                for (j, c) in self.codes.column_iter().enumerate() {
                    let norm = c.norm();
                    if (norm - 1.0).abs() > NORM_TOL {
                        return Err(Error::InvalidArgument(format!(
                            "code {j} has norm {norm}, expected 1"
                        )));
                    }
                }
            }
            CodebookKind::Rademacher if self.codes.iter().any(|&x| x != 1.0 && x != -1.0) => {
                return Err(Error::InvalidArgument(
                    "rademacher codes must have entries in {-1, +1}".into(),
                ));
            }
            _ => {}
        }
        if self.codes.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("codes must be finite".into()));
        }
        Ok(())
    }

    pub fn kind(&self) -> CodebookKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of codes.
    pub fn len(&self) -> usize {
        self.codes.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.ncols() == 0
    }

    /// Code dimension `d`.
    pub fn dim(&self) -> usize {
        self.codes.nrows()
    }

    pub fn code(&self, i: usize) -> DVectorView<'_, f64> {
        self.codes.column(i)
    }

    pub fn try_code(&self, i: usize) -> Result<DVectorView<'_, f64>> {
        crate::error::check_index(i, self.len())?;
        Ok(self.codes.column(i))
    }

    /// The `d x n` matrix whose columns are the codes.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.codes
    }

    /// Sum of the codes of `vertices`.
    pub fn superpose(&self, vertices: &[usize]) -> Result<DVector<f64>> {
        let mut s = DVector::zeros(self.dim());
        for &v in vertices {
            s += self.try_code(v)?;
        }
        Ok(s)
    }

    /// A short identifier recorded by embeddings built from this codebook.
    pub fn id(&self) -> String {
        format!(
            "{}-n{}-d{}-s{}",
            self.kind,
            self.len(),
            self.dim(),
            self.seed
        )
    }

    /// True when the Gram matrix is within `tol` of the identity (entrywise).
    pub fn is_orthonormal(&self, tol: f64) -> bool {
        let gram = self.codes.transpose() * &self.codes;
        let n = gram.nrows();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let target = if i == j { 1.0 } else { 0.0 };
                (gram[(i, j)] - target).abs() <= tol
            })
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let file = CodebookFile {
            kind: self.kind,
            dim: self.dim(),
            n: self.len(),
            seed: self.seed,
            codes: self
                .codes
                .column_iter()
                .map(|c| c.iter().copied().collect())
                .collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: CodebookFile = serde_json::from_str(s)?;
        if file.codes.len() != file.n {
            return Err(Error::DimensionMismatch {
                expected: file.n,
                found: file.codes.len(),
            });
        }
        let cb = Self::from_codes(file.kind, file.seed, &file.codes)?;
        crate::error::check_dim(file.dim, cb.dim())?;
        Ok(cb)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// Pairwise dot-product statistics of a codebook.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub max_abs_dot: f64,
    pub mean_dot: f64,
    pub var_dot: f64,
    pub epsilon: f64,
    /// Unordered pairs with `|<x_i, x_j>| >= epsilon`.
    pub violations: usize,
    pub pairs: usize,
}

/// Statistics over all unordered pairs of distinct codes.
pub fn coherence(cb: &Codebook, epsilon: f64) -> Result<CoherenceReport> {
    let n = cb.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "coherence needs at least 2 codes".into(),
        ));
    }
    let gram = cb.matrix().transpose() * cb.matrix();
    let mut dots = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            dots.push(gram[(i, j)]);
        }
    }
    let (mean_dot, var_dot) = par::mean_var(&dots);
    let max_abs_dot = dots.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let violations = dots.iter().filter(|x| x.abs() >= epsilon).count();
    Ok(CoherenceReport {
        max_abs_dot,
        mean_dot,
        var_dot: if dots.len() < 2 { 0.0 } else { var_dot },
        epsilon,
        violations,
        pairs: dots.len(),
    })
}

/// Equal-width histogram over `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn build(values: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let mut counts = vec![0u64; bins.max(1)];
        let width = (hi - lo) / counts.len() as f64;
        for &v in values {
            let mut b = ((v - lo) / width).floor();
            if b < 0.0 {
                b = 0.0;
            }
            let b = (b as usize).min(counts.len() - 1);
            counts[b] += 1;
        }
        Histogram { lo, hi, counts }
    }
}

/// Empirical distribution of the dot product of two independent codes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DotProductSummary {
    pub kind: CodebookKind,
    pub dim: usize,
    pub trials: usize,
    pub mean: f64,
    pub variance: f64,
    pub histogram: Histogram,
    #[serde(skip)]
    pub samples: Vec<f64>,
}

/// Samples `<x, y>` for `trials` independent pairs of codes of `kind`.
pub fn dot_product_sample(
    kind: CodebookKind,
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<DotProductSummary> {
    if trials == 0 || d == 0 {
        return Err(Error::InvalidArgument(
            "dot_product_sample needs trials >= 1 and d >= 1".into(),
        ));
    }
    if kind == CodebookKind::Custom {
        return Err(Error::InvalidArgument("cannot sample custom codes".into()));
    }
    let samples = par::map_indexed(trials, Execution::default(), |t| {
        let mut rng = par::task_rng(seed, t as u64);
        let mut x = vec![0.0; d];
        let mut y = vec![0.0; d];
        sample_code(kind, &mut rng, &mut x);
        sample_code(kind, &mut rng, &mut y);
        x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>()
    });
    let (mean, variance) = par::mean_var(&samples);
    let (lo, hi) = match kind {
        CodebookKind::Spherical | CodebookKind::NormalizedRademacher => (-1.0, 1.0),
        CodebookKind::Rademacher => (-(d as f64), d as f64),
        _ => {
            let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi.max(lo + f64::EPSILON))
        }
    };
    Ok(DotProductSummary {
        kind,
        dim: d,
        trials,
        mean,
        variance,
        histogram: Histogram::build(&samples, lo, hi, 50),
        samples,
    })
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and a
/// continuous `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (f - lo).abs().max((hi - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Result of a chi-square goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl DotProductSummary {
    /// KS distance of `(X + 1) / 2` from `Beta((d-1)/2, (d-1)/2)`. Only
    /// defined for spherical codes with `d >= 2`.
    pub fn ks_beta(&self) -> Option<f64> {
        if self.kind != CodebookKind::Spherical || self.dim < 2 {
            return None;
        }
        let shape = (self.dim as f64 - 1.0) / 2.0;
        let beta = Beta::new(shape, shape).ok()?;
        let transformed: Vec<f64> = self.samples.iter().map(|x| (x + 1.0) / 2.0).collect();
        Some(ks_distance(&transformed, |y| beta.cdf(y.clamp(0.0, 1.0))))
    }

    /// True when every `(X + d) / 2` is an integer in `0..=d`. Rademacher only.
    pub fn binomial_support_ok(&self) -> bool {
        let d = self.dim as f64;
        self.kind == CodebookKind::Rademacher
            && self.samples.iter().all(|x| {
                let y = (x + d) / 2.0;
                y.fract() == 0.0 && (0.0..=d).contains(&y)
            })
    }

    /// Chi-square test of `(X + d) / 2` against `Binomial(d, 1/2)`, merging
    /// tail cells until each expected count is at least 5.
    pub fn chi_square_binomial(&self) -> Option<ChiSquareTest> {
        if self.kind != CodebookKind::Rademacher {
            return None;
        }
        let d = self.dim;
        let n = self.samples.len() as f64;
        let binom = Binomial::new(0.5, d as u64).ok()?;
        let mut observed = vec![0f64; d + 1];
        for x in &self.samples {
            let y = ((x + d as f64) / 2.0).round() as usize;
            observed[y.min(d)] += 1.0;
        }
        let expected: Vec<f64> = (0..=d).map(|k| n * binom.pmf(k as u64)).collect();

        // Merge cells from both tails inward.
        let mut cells: Vec<(f64, f64)> = Vec::new();
        let (mut o_acc, mut e_acc) = (0.0, 0.0);
        for k in 0..=d {
            o_acc += observed[k];
            e_acc += expected[k];
            if e_acc >= 5.0 {
                cells.push((o_acc, e_acc));
                o_acc = 0.0;
                e_acc = 0.0;
            }
        }
        if e_acc > 0.0 {
            match cells.last_mut() {
                Some(last) => {
                    last.0 += o_acc;
                    last.1 += e_acc;
                }
                None => cells.push((o_acc, e_acc)),
            }
        }
        if cells.len() < 2 {
            return None;
        }
        let statistic: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
        let dof = cells.len() - 1;
        let chi = ChiSquared::new(dof as f64).ok()?;
        Some(ChiSquareTest {
            statistic,
            dof,
            p_value: 1.0 - chi.cdf(statistic),
        })
    }
}

/// Running variance of a sample prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrefixVariance {
    pub len: usize,
    pub variance: f64,
}

/// Heavy-tail evidence for entrywise ratios `t / u` of continuous codes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub kind: CodebookKind,
    pub dim: usize,
    pub trials: usize,
    pub max_abs_ratio: f64,
    /// Sample variance of prefixes of length 10, 100, 1000, ... and the full sample.
    pub prefix_variances: Vec<PrefixVariance>,
    /// Variance of the full sample over variance of its first tenth, when
    /// `trials >= 20`.
    pub variance_growth: Option<f64>,
    #[serde(skip)]
    pub samples: Vec<f64>,
}

/// Draws `trials` independent pairs `t, u` of `d`-dim codes and records the
/// mean of the entrywise ratios `t_i / u_i` per trial, which is what an
/// unbinding by division accumulates.
pub fn heavy_tail_demo(
    kind: CodebookKind,
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<TailReport> {
    if !kind.is_continuous_ratio() {
        return Err(Error::InvalidArgument(format!(
            "heavy-tail demo needs a gaussian, cauchy or uniform01 code, got {kind}"
        )));
    }
    if trials == 0 || d == 0 {
        return Err(Error::InvalidArgument(
            "heavy_tail_demo needs trials >= 1 and d >= 1".into(),
        ));
    }
    let samples = par::map_indexed(trials, Execution::default(), |t| {
        let mut rng = par::task_rng(seed, t as u64);
        let mut num = vec![0.0; d];
        let mut den = vec![0.0; d];
        sample_code(kind, &mut rng, &mut num);
        sample_code(kind, &mut rng, &mut den);
        let total: f64 = num
            .iter()
            .zip(&den)
            .map(|(a, b)| {
                // an exact zero denominator is replaced by the smallest normal
                let b = if b.abs() < f64::MIN_POSITIVE {
                    f64::MIN_POSITIVE.copysign(*b)
                } else {
                    *b
                };
                a / b
            })
            .sum();
        total / d as f64
    });
    let max_abs_ratio = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut prefix_variances = Vec::new();
    let mut len = 10;
    while len < trials {
        prefix_variances.push(PrefixVariance {
            len,
            variance: par::mean_var(&samples[..len]).1,
        });
        len *= 10;
    }
    prefix_variances.push(PrefixVariance {
        len: trials,
        variance: par::mean_var(&samples).1,
    });
    let variance_growth = (trials >= 20).then(|| {
        let head = par::mean_var(&samples[..trials / 10]).1;
        par::mean_var(&samples).1 / head
    });
    Ok(TailReport {
        kind,
        dim: d,
        trials,
        max_abs_ratio,
        prefix_variances,
        variance_growth,
        samples,
    })
}
