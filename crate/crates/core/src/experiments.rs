//! Seeded Monte-Carlo trials for edge queries and edge composition.
//!
//! A trial draws a fresh codebook and a random graph, embeds it under one of
//! the two schemes, and records the score of a single probe edge. Trial `i`
//! of a run seeded with `s` uses its own ChaCha stream `(s, i)`, so a report
//! is a pure function of its configuration and does not depend on the
//! execution policy.
//!
//! Two graph constructions are supported:
//!
//! - [`Sampling::Table`] samples `k` ordered vertex pairs without replacement
//!   from a codebook of `n` codes. The first sampled pair is the query edge.
//!   A spurious edge query removes the query edge before querying it.
//!   Composition appends an edge from the query edge's target to a fresh
//!   vertex `w` and probes `(u, w)`, or a fresh pair for the spurious case.
//! - [`Sampling::Distinct`] gives every edge fresh vertices, except for `L`
//!   nuisance edges that share the source vertex `u` with the signal edge.
//!   Spurious probes are fresh disjoint pairs.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::codebook::{Codebook, CodebookKind};
use crate::error::{Error, Result};
use crate::hdc_graph::{HdcEmbedding, HdcScheme};
use crate::par::{map_indexed, mean_var, task_rng, Execution};
use crate::tensor_graph::{Edge, GraphEmbedding};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    TensorSpherical,
    HadamardRademacher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    EdgeQuery,
    EdgeComposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    #[default]
    Positive,
    Spurious,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Pairs drawn without replacement from a fixed codebook.
    #[default]
    Table,
    /// Fresh vertices for every edge, with `L` edges sharing `u`.
    Distinct,
}

macro_rules! named_enum {
    ($ty:ident { $($var:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn name(self) -> &'static str {
                match self { $($ty::$var => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($ty::$var),)+
                    _ => Err(Error::InvalidArgument(format!(
                        concat!("unknown ", stringify!($ty), " `{}`"), s
                    ))),
                }
            }
        }
    };
}

named_enum!(Scheme { TensorSpherical => "tensor_spherical", HadamardRademacher => "hadamard_rademacher" });
named_enum!(Task { EdgeQuery => "edge_query", EdgeComposition => "edge_composition" });
named_enum!(Polarity { Positive => "positive", Spurious => "spurious" });
named_enum!(Sampling { Table => "table", Distinct => "distinct" });

fn default_trials() -> usize {
    200
}

fn default_spurious() -> usize {
    1
}

/// One Monte-Carlo cell.
///
/// `k` counts differently per construction: under table sampling it is the
/// number of sampled edges, query edge included; under distinct sampling it
/// is the number of nuisance edges beside the signal edge for queries, and
/// the total edge count including the composable pair for composition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub scheme: Scheme,
    /// Vertex code dimension; for the Hadamard scheme this is `D`.
    pub d: usize,
    pub k: usize,
    /// Codebook size for table sampling.
    #[serde(default)]
    pub n: usize,
    /// Nuisance edges sharing the source vertex, distinct sampling only.
    #[serde(default, alias = "L")]
    pub shared: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    pub task: Task,
    pub polarity: Polarity,
    /// Divide Hadamard scores by `D`.
    #[serde(default)]
    pub normalize: bool,
    #[serde(default)]
    pub sampling: Sampling,
    /// Number of spurious competitors `M` for recovery runs.
    #[serde(default = "default_spurious", alias = "M")]
    pub spurious_count: usize,
}

impl TrialConfig {
    pub fn new(scheme: Scheme, task: Task, polarity: Polarity, d: usize, k: usize) -> Self {
        TrialConfig {
            scheme,
            d,
            k,
            n: 0,
            shared: 0,
            trials: default_trials(),
            seed: 0,
            task,
            polarity,
            normalize: scheme == Scheme::HadamardRademacher,
            sampling: Sampling::Distinct,
            spurious_count: 1,
        }
    }

    /// Table sampling from a codebook of `n` codes.
    pub fn table(mut self, n: usize) -> Self {
        self.sampling = Sampling::Table;
        self.n = n;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_shared(mut self, shared: usize) -> Self {
        self.shared = shared;
        self
    }

    pub fn with_normalize(mut self, normalize: bool) -> Self {
        self.normalize = normalize;
        self
    }

    pub fn with_polarity(mut self, polarity: Polarity) -> Self {
        self.polarity = polarity;
        self
    }

    /// `d^2` for the tensor scheme, `D` for the Hadamard scheme.
    pub fn embedding_dim(&self) -> usize {
        match self.scheme {
            Scheme::TensorSpherical => self.d * self.d,
            Scheme::HadamardRademacher => self.d,
        }
    }

    fn kind(&self) -> CodebookKind {
        match self.scheme {
            Scheme::TensorSpherical => CodebookKind::Spherical,
            Scheme::HadamardRademacher => CodebookKind::Rademacher,
        }
    }

    fn scale(&self) -> f64 {
        if self.scheme == Scheme::HadamardRademacher && self.normalize {
            self.d as f64
        } else {
            1.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.d == 0 {
            return bad("d must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        match self.sampling {
            Sampling::Table => {
                if self.n < 2 {
                    return bad(format!("table sampling needs n >= 2, got {}", self.n));
                }
                if self.k == 0 {
                    return bad("table sampling needs k >= 1".into());
                }
                let pairs = self.n * (self.n - 1);
                if self.k > pairs {
                    return bad(format!(
                        "cannot sample {} distinct edges from {} ordered pairs of {} vertices",
                        self.k, pairs, self.n
                    ));
                }
                if self.shared != 0 {
                    return bad("the shared-vertex count applies to distinct sampling only".into());
                }
            }
            Sampling::Distinct => match self.task {
                Task::EdgeQuery if self.shared > self.k => {
                    return bad(format!("L = {} exceeds k = {}", self.shared, self.k));
                }
                Task::EdgeComposition if self.k < 2 => {
                    return bad("composition needs k >= 2 edges".into());
                }
                Task::EdgeComposition if self.shared > self.k - 2 => {
                    return bad(format!(
                        "L = {} exceeds the k - 2 = {} nuisance edges",
                        self.shared,
                        self.k - 2
                    ));
                }
                _ => {}
            },
        }
        Ok(())
    }
}

/// Summary of one Monte-Carlo cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub config: TrialConfig,
    pub mean: f64,
    pub sd: f64,
    pub trials: usize,
    pub theory_mean: f64,
    pub theory_var: f64,
    /// Fraction of trials whose true score beat all `M` spurious scores.
    pub recovery_rate: Option<f64>,
    /// Lower bound on the recovery probability for the configuration.
    pub recovery_bound: Option<f64>,
    /// Average number of nuisance edges sharing a vertex with the probe.
    pub mean_shared: f64,
    #[serde(skip)]
    pub scores: Vec<f64>,
}

impl TrialReport {
    pub fn variance(&self) -> f64 {
        self.sd * self.sd
    }
}

/// Closed-form moments of the probe score for each scheme, task and polarity.
pub mod theory {
    /// Signal edge plus `k` nuisance edges, `l` of them sharing `u`.
    pub fn query_true_var_tensor(k: usize, l: usize, d: usize) -> f64 {
        let d = d as f64;
        l as f64 / d + (k - l) as f64 / (d * d)
    }

    /// Disjoint probe on a graph with `edges` edges.
    pub fn query_spurious_var_tensor(edges: usize, d: usize) -> f64 {
        edges as f64 / (d * d) as f64
    }

    /// True composed-edge variance over `k` edges including the composable
    /// pair, `l` nuisance edges sharing `u`. The two direct terms
    /// `<u,v><v,w>`-type products coincide, which this count keeps.
    pub fn composition_true_var_tensor(k: usize, l: usize, d: usize) -> f64 {
        let d = d as f64;
        let l = l as f64;
        let m = k as f64 - 2.0 - l;
        l / d
            + (4.0 + 2.0 * l + 2.0 * m + l * l + l * m) / (d * d)
            + (1.0 + l + 2.0 * m + l * m + m * m) / (d * d * d)
    }

    /// `(2k - 2)/d^2 + (k - 1)^2/d^3`, the count that treats every product
    /// of two dot products as independent.
    pub fn composition_true_var_tensor_independent(k: usize, d: usize) -> f64 {
        let k = k as f64;
        let d = d as f64;
        (2.0 * k - 2.0) / (d * d) + (k - 1.0) * (k - 1.0) / (d * d * d)
    }

    pub fn composition_spurious_var_tensor(k: usize, d: usize) -> f64 {
        let d = d as f64;
        let k = k as f64;
        1.0 / (d * d) + (k * k - 1.0) / (d * d * d)
    }

    /// Raw Hadamard query: `k` nuisance edges.
    pub fn query_true_var_hadamard(k: usize, dim: usize) -> f64 {
        (k * dim) as f64
    }

    pub fn query_spurious_var_hadamard(edges: usize, dim: usize) -> f64 {
        (edges * dim) as f64
    }

    /// Raw mean of the composed-edge score: the signal pair contributes
    /// twice through the cross term `2 (u⊙v)⊙(v⊙w)`.
    pub fn composition_true_mean_hadamard(dim: usize) -> f64 {
        2.0 * dim as f64
    }

    pub fn composition_true_var_hadamard(k: usize, dim: usize) -> f64 {
        let k = k as f64;
        dim as f64 * (3.0 * k * k - 2.0 * k - 4.0)
    }

    pub fn composition_spurious_var_hadamard(k: usize, dim: usize) -> f64 {
        let k = k as f64;
        dim as f64 * (3.0 * k * k - 2.0 * k)
    }

    /// Bernstein tail of a sum with variance `var`, terms bounded by 1,
    /// exceeding 1.
    fn bernstein_unit(var: f64) -> f64 {
        (-0.5 / (var + 1.0 / 3.0)).exp()
    }

    /// `1 - M exp(-1/2 / ((2L+1)/d + 2(k-L)/d^2 + 1/3))`, clamped to `[0, 1]`.
    pub fn recovery_bound_query_tensor(k: usize, l: usize, d: usize, m: usize) -> f64 {
        let df = d as f64;
        let var = (2 * l + 1) as f64 / df + 2.0 * (k - l) as f64 / (df * df);
        (1.0 - m as f64 * bernstein_unit(var)).clamp(0.0, 1.0)
    }

    /// `1 - M exp(-1/2 / (sigma^2 + 1/3))` with
    /// `sigma^2 = (2k-1)/d^2 + (2k^2-2k)/d^3`.
    pub fn recovery_bound_composition_tensor(k: usize, d: usize, m: usize) -> f64 {
        let kf = k as f64;
        let df = d as f64;
        let var = (2.0 * kf - 1.0) / (df * df) + (2.0 * kf * kf - 2.0 * kf) / (df * df * df);
        (1.0 - m as f64 * bernstein_unit(var)).clamp(0.0, 1.0)
    }

    /// Bernstein bound for a sum of `terms` Rademachers exceeding `dim`.
    fn rademacher_tail(terms: f64, dim: usize) -> f64 {
        let t = dim as f64;
        (-t * t / (2.0 * (terms + t / 3.0))).exp()
    }

    pub fn recovery_bound_query_hadamard(k: usize, dim: usize, m: usize) -> f64 {
        let terms = ((2 * k + 1) * dim) as f64;
        (1.0 - m as f64 * rademacher_tail(terms, dim)).clamp(0.0, 1.0)
    }

    pub fn recovery_bound_composition_hadamard(k: usize, dim: usize, m: usize) -> f64 {
        let kf = k as f64;
        let terms = (2.0 * kf * kf - 1.0) * dim as f64;
        (1.0 - m as f64 * rademacher_tail(terms, dim)).clamp(0.0, 1.0)
    }
}

/// `(mean, variance)` of the probe score predicted for `cfg`, on the same
/// scale as the reported scores. Table sampling uses the distinct-vertex
/// formulas with the sampled graph's edge count.
pub fn theory_moments(cfg: &TrialConfig) -> (f64, f64) {
    let d = cfg.d;
    let (l, nuisance, edges, total) = match cfg.sampling {
        Sampling::Table => (0, cfg.k - 1, cfg.k - 1, cfg.k + 1),
        Sampling::Distinct => (cfg.shared, cfg.k, cfg.k + 1, cfg.k),
    };
    let (mean, var) = match (cfg.scheme, cfg.task, cfg.polarity) {
        (Scheme::TensorSpherical, Task::EdgeQuery, Polarity::Positive) => {
            (1.0, theory::query_true_var_tensor(nuisance, l, d))
        }
        (Scheme::TensorSpherical, Task::EdgeQuery, Polarity::Spurious) => {
            (0.0, theory::query_spurious_var_tensor(edges, d))
        }
        (Scheme::TensorSpherical, Task::EdgeComposition, Polarity::Positive) => {
            (1.0, theory::composition_true_var_tensor(total, l, d))
        }
        (Scheme::TensorSpherical, Task::EdgeComposition, Polarity::Spurious) => {
            (0.0, theory::composition_spurious_var_tensor(total, d))
        }
        (Scheme::HadamardRademacher, Task::EdgeQuery, Polarity::Positive) => {
            (d as f64, theory::query_true_var_hadamard(nuisance, d))
        }
        (Scheme::HadamardRademacher, Task::EdgeQuery, Polarity::Spurious) => {
            (0.0, theory::query_spurious_var_hadamard(edges, d))
        }
        (Scheme::HadamardRademacher, Task::EdgeComposition, Polarity::Positive) => (
            theory::composition_true_mean_hadamard(d),
            theory::composition_true_var_hadamard(total, d),
        ),
        (Scheme::HadamardRademacher, Task::EdgeComposition, Polarity::Spurious) => {
            (0.0, theory::composition_spurious_var_hadamard(total, d))
        }
    };
    let s = cfg.scale();
    (mean / s, var / (s * s))
}

/// Lower bound on the recovery probability against `m` spurious edges.
pub fn recovery_bound(cfg: &TrialConfig, m: usize) -> f64 {
    let (l, k) = match cfg.sampling {
        Sampling::Table => (0, cfg.k - 1),
        Sampling::Distinct => (cfg.shared, cfg.k),
    };
    match (cfg.scheme, cfg.task) {
        (Scheme::TensorSpherical, Task::EdgeQuery) => theory::recovery_bound_query_tensor(k, l, cfg.d, m),
        (Scheme::TensorSpherical, Task::EdgeComposition) => {
            theory::recovery_bound_composition_tensor(k, cfg.d, m)
        }
        (Scheme::HadamardRademacher, Task::EdgeQuery) => theory::recovery_bound_query_hadamard(k, cfg.d, m),
        (Scheme::HadamardRademacher, Task::EdgeComposition) => {
            theory::recovery_bound_composition_hadamard(k, cfg.d, m)
        }
    }
}

/// A sampled graph with the probe and competitor edges it will be queried on.
struct TrialGraph {
    cb: Codebook,
    edges: Vec<Edge>,
    probe: Edge,
    fresh: Vec<Edge>,
    shared: usize,
}

fn build_trial(cfg: &TrialConfig, polarity: Polarity, fresh_pairs: usize, trial: usize) -> Result<TrialGraph> {
    let mut rng = task_rng(cfg.seed, trial as u64);
    let comp = cfg.task == Task::EdgeComposition;
    match cfg.sampling {
        Sampling::Table => {
            let n = cfg.n;
            let extra = if comp { 3 } else { 0 };
            let cb = Codebook::generate_with(cfg.kind(), n + extra + 2 * fresh_pairs, cfg.d, cfg.seed, &mut rng)?;
            let mut edges: Vec<Edge> = index::sample(&mut rng, n * (n - 1), cfg.k)
                .into_iter()
                .map(|ix| {
                    let s = ix / (n - 1);
                    let t = ix % (n - 1);
                    (s, if t >= s { t + 1 } else { t })
                })
                .collect();
            let (u, v) = edges[0];
            let shared = edges[1..]
                .iter()
                .filter(|&&(a, b)| a == u || a == v || b == u || b == v)
                .count();
            let base = n + extra;
            let fresh = (0..fresh_pairs).map(|i| (base + 2 * i, base + 2 * i + 1)).collect();
            let probe = if comp {
                edges.push((v, n));
                match polarity {
                    Polarity::Positive => (u, n),
                    Polarity::Spurious => (n + 1, n + 2),
                }
            } else {
                if polarity == Polarity::Spurious {
                    edges.remove(0);
                }
                (u, v)
            };
            Ok(TrialGraph { cb, edges, probe, fresh, shared })
        }
        Sampling::Distinct => {
            let l = cfg.shared;
            let fresh_pairs = fresh_pairs.max(1);
            let (head, free) = if comp {
                (3, cfg.k - 2 - l)
            } else {
                (2, cfg.k - l)
            };
            let count = head + l + 2 * free + 2 * fresh_pairs;
            let cb = Codebook::generate_with(cfg.kind(), count, cfg.d, cfg.seed, &mut rng)?;
            let mut edges = vec![(0, 1)];
            if comp {
                edges.push((1, 2));
            }
            edges.extend((0..l).map(|j| (0, head + j)));
            let base = head + l;
            edges.extend((0..free).map(|j| (base + 2 * j, base + 2 * j + 1)));
            let base = base + 2 * free;
            let fresh: Vec<Edge> = (0..fresh_pairs).map(|i| (base + 2 * i, base + 2 * i + 1)).collect();
            let probe = match polarity {
                Polarity::Positive if comp => (0, 2),
                Polarity::Positive => (0, 1),
                Polarity::Spurious => fresh[0],
            };
            Ok(TrialGraph { cb, edges, probe, fresh, shared: l })
        }
    }
}

enum Store {
    Tensor(GraphEmbedding),
    Hdc(HdcEmbedding),
}

impl Store {
    fn build(cfg: &TrialConfig, g: &TrialGraph) -> Result<Self> {
        let s = match cfg.scheme {
            Scheme::TensorSpherical => {
                let e = GraphEmbedding::embed(&g.edges, &g.cb)?;
                Store::Tensor(if cfg.task == Task::EdgeComposition { e.compose() } else { e })
            }
            Scheme::HadamardRademacher => {
                let e = HdcEmbedding::embed_with(&g.edges, &g.cb, HdcScheme::Plain)?;
                Store::Hdc(if cfg.task == Task::EdgeComposition { e.compose()? } else { e })
            }
        };
        Ok(s)
    }

    fn score(&self, cfg: &TrialConfig, cb: &Codebook, (a, b): Edge) -> Result<f64> {
        match self {
            Store::Tensor(g) => g.edge_query(cb, a, b),
            Store::Hdc(h) => Ok(h.query_codes(cb.code(a), cb.code(b))? / cfg.scale()),
        }
    }
}

struct Outcome {
    score: f64,
    shared: usize,
    recovered: bool,
}

fn run_trial(cfg: &TrialConfig, polarity: Polarity, m: usize, trial: usize) -> Result<Outcome> {
    let g = build_trial(cfg, polarity, m, trial)?;
    let store = Store::build(cfg, &g)?;
    let score = store.score(cfg, &g.cb, g.probe)?;
    let mut recovered = true;
    if m > 0 {
        for &pair in &g.fresh[..m] {
            if store.score(cfg, &g.cb, pair)? >= score {
                recovered = false;
            }
        }
    }
    Ok(Outcome { score, shared: g.shared, recovered })
}

fn run_cell(cfg: &TrialConfig, exec: Execution, m: usize) -> Result<TrialReport> {
    cfg.validate()?;
    let polarity = if m > 0 { Polarity::Positive } else { cfg.polarity };
    let outcomes = map_indexed(cfg.trials, exec, |i| run_trial(cfg, polarity, m, i));
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let scores: Vec<f64> = outcomes.iter().map(|o| o.score).collect();
    let (mean, var) = mean_var(&scores);
    let mean_shared = outcomes.iter().map(|o| o.shared as f64).sum::<f64>() / cfg.trials as f64;
    let mut config = cfg.clone();
    config.polarity = polarity;
    let (theory_mean, theory_var) = theory_moments(&config);
    let (recovery_rate, recovery_bound) = if m > 0 {
        let hits = outcomes.iter().filter(|o| o.recovered).count();
        config.spurious_count = m;
        (Some(hits as f64 / cfg.trials as f64), Some(recovery_bound(&config, m)))
    } else {
        (None, None)
    };
    Ok(TrialReport {
        config,
        mean,
        sd: var.sqrt(),
        trials: cfg.trials,
        theory_mean,
        theory_var,
        recovery_rate,
        recovery_bound,
        mean_shared,
        scores,
    })
}

fn require_task(cfg: &TrialConfig, task: Task) -> Result<()> {
    if cfg.task == task {
        Ok(())
    } else {
        Err(Error::Config(format!("expected task {task}, got {}", cfg.task)))
    }
}

pub fn run_query_trials(cfg: &TrialConfig) -> Result<TrialReport> {
    run_query_trials_with(cfg, Execution::default())
}

pub fn run_query_trials_with(cfg: &TrialConfig, exec: Execution) -> Result<TrialReport> {
    require_task(cfg, Task::EdgeQuery)?;
    run_cell(cfg, exec, 0)
}

pub fn run_composition_trials(cfg: &TrialConfig) -> Result<TrialReport> {
    run_composition_trials_with(cfg, Execution::default())
}

pub fn run_composition_trials_with(cfg: &TrialConfig, exec: Execution) -> Result<TrialReport> {
    require_task(cfg, Task::EdgeComposition)?;
    run_cell(cfg, exec, 0)
}

/// Runs whichever task `cfg` names.
pub fn run_trials_with(cfg: &TrialConfig, exec: Execution) -> Result<TrialReport> {
    run_cell(cfg, exec, 0)
}

/// Fraction of trials in which the true probe scores strictly above `m`
/// fresh spurious probes on the same embedding. The report's moments are
/// those of the true score.
pub fn recovery_probability(cfg: &TrialConfig, m: usize) -> Result<TrialReport> {
    recovery_probability_with(cfg, m, Execution::default())
}

pub fn recovery_probability_with(cfg: &TrialConfig, m: usize, exec: Execution) -> Result<TrialReport> {
    if m == 0 {
        return Err(Error::Config("recovery needs at least one spurious edge".into()));
    }
    run_cell(cfg, exec, m)
}

/// Column header shared by every CSV the harness writes.
pub const CSV_HEADER: &str =
    "scheme,task,polarity,d,D,k,n,L,M,trials,mean,sd,theory_mean,theory_var,recovery_rate";

/// One CSV record for `r`. `L` is the mean shared-vertex count and `M` is
/// empty for plain runs.
pub fn csv_row(r: &TrialReport) -> String {
    let c = &r.config;
    let m = if r.recovery_rate.is_some() { c.spurious_count.to_string() } else { String::new() };
    let rate = r.recovery_rate.map(|x| format!("{x:.6}")).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{:.6},{},{},{:.6},{:.6},{:.6},{:.6},{}",
        c.scheme,
        c.task,
        c.polarity,
        c.d,
        c.embedding_dim(),
        c.k,
        c.n,
        r.mean_shared,
        m,
        r.trials,
        r.mean,
        r.sd,
        r.theory_mean,
        r.theory_var,
        rate
    )
}

pub fn to_csv(reports: &[TrialReport]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in reports {
        s.push_str(&csv_row(r));
        s.push('\n');
    }
    s
}

/// Capacity at unit error variance for one code dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityPoint {
    pub d: usize,
    /// Interpolated edge count at which the variance crosses 1, if the
    /// sweep brackets it.
    pub k_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<TrialReport>,
    pub capacities: Vec<CapacityPoint>,
    /// Least-squares slope of `log k*` against `log d`.
    pub slope: Option<f64>,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        to_csv(&self.rows)
    }
}

/// Log-log interpolation of the first crossing of `target` by `(k, var)`.
pub fn crossing(points: &[(f64, f64)], target: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (k0, v0) = w[0];
        let (k1, v1) = w[1];
        if v0 < target && v1 >= target && v0 > 0.0 {
            let t = (target.ln() - v0.ln()) / (v1.ln() - v0.ln());
            Some((k0.ln() + t * (k1.ln() - k0.ln())).exp())
        } else {
            None
        }
    })
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn ols_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Positive-probe variance over the `(d, k)` grid under distinct sampling,
/// Hadamard scores normalized by `D`, plus the capacity-at-unit-variance fit.
pub fn variance_scaling_sweep(
    scheme: Scheme,
    task: Task,
    d_values: &[usize],
    k_values: &[usize],
    trials: usize,
    seed: u64,
) -> Result<SweepResult> {
    variance_scaling_sweep_with(scheme, task, d_values, k_values, trials, seed, Execution::default())
}

pub fn variance_scaling_sweep_with(
    scheme: Scheme,
    task: Task,
    d_values: &[usize],
    k_values: &[usize],
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<SweepResult> {
    if d_values.is_empty() || k_values.is_empty() {
        return Err(Error::Config("sweep ranges must be non-empty".into()));
    }
    let mut ks = k_values.to_vec();
    ks.sort_unstable();
    let mut rows = Vec::new();
    let mut capacities = Vec::new();
    for &d in d_values {
        let mut points = Vec::new();
        for &k in &ks {
            let cfg = TrialConfig::new(scheme, task, Polarity::Positive, d, k)
                .with_trials(trials)
                .with_seed(seed);
            let r = run_trials_with(&cfg, exec)?;
            points.push((k as f64, r.variance()));
            rows.push(r);
        }
        capacities.push(CapacityPoint { d, k_star: crossing(&points, 1.0) });
    }
    let fit: Vec<(f64, f64)> = capacities
        .iter()
        .filter_map(|c| c.k_star.map(|k| ((c.d as f64).ln(), k.ln())))
        .collect();
    let slope = if fit.len() == capacities.len() { ols_slope(&fit) } else { None };
    Ok(SweepResult { rows, capacities, slope })
}

/// A grid of cells described in a JSON or TOML file. Every `(d, k)`
/// combination becomes one row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub scheme: Scheme,
    pub task: Task,
    #[serde(default)]
    pub polarity: Polarity,
    pub d: Vec<usize>,
    pub k: Vec<usize>,
    #[serde(default)]
    pub n: usize,
    #[serde(default, alias = "L")]
    pub shared: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub normalize: bool,
    /// Defaults to table sampling when `n` is set and distinct otherwise.
    #[serde(default)]
    pub sampling: Option<Sampling>,
    /// When set, runs recovery against this many spurious edges.
    #[serde(default, alias = "M")]
    pub recovery: Option<usize>,
}

impl SweepConfig {
    pub fn parse(text: &str, toml_format: bool) -> Result<Self> {
        if toml_format {
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
        } else {
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
        }
    }

    /// Reads TOML for `.toml` paths and JSON otherwise.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let is_toml = path.extension().is_some_and(|e| e == "toml");
        Self::parse(&text, is_toml)
    }

    pub fn sampling(&self) -> Sampling {
        self.sampling.unwrap_or(if self.n > 0 { Sampling::Table } else { Sampling::Distinct })
    }

    pub fn cells(&self) -> Vec<TrialConfig> {
        let mut out = Vec::new();
        for &d in &self.d {
            for &k in &self.k {
                out.push(TrialConfig {
                    scheme: self.scheme,
                    d,
                    k,
                    n: self.n,
                    shared: self.shared,
                    trials: self.trials,
                    seed: self.seed,
                    task: self.task,
                    polarity: self.polarity,
                    normalize: self.normalize,
                    sampling: self.sampling(),
                    spurious_count: self.recovery.unwrap_or(1),
                });
            }
        }
        out
    }

    pub fn run(&self, exec: Execution) -> Result<Vec<TrialReport>> {
        if self.d.is_empty() || self.k.is_empty() {
            return Err(Error::Config("d and k lists must be non-empty".into()));
        }
        self.cells()
            .iter()
            .map(|c| match self.recovery {
                Some(m) => recovery_probability_with(c, m, exec),
                None => run_trials_with(c, exec),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let ok = TrialConfig::new(Scheme::TensorSpherical, Task::EdgeQuery, Polarity::Positive, 16, 8);
        assert!(ok.validate().is_ok());
        assert!(ok.clone().table(4).with_trials(1).validate().is_ok());
        let mut big = ok.clone().table(3);
        big.k = 7;
        assert!(matches!(big.validate(), Err(Error::Config(_))));
        assert!(ok.clone().with_shared(9).validate().is_err());
        let comp = TrialConfig::new(Scheme::TensorSpherical, Task::EdgeComposition, Polarity::Positive, 16, 8);
        assert!(comp.clone().with_shared(6).validate().is_ok());
        assert!(comp.with_shared(7).validate().is_err());
        assert!(run_composition_trials(&ok).is_err());
    }

    #[test]
    fn orthonormal_limit_scores_one() {
        // a single edge in d = n = 2 with the basis as codebook
        let cb = Codebook::standard_basis(2);
        let g = GraphEmbedding::embed(&[(0, 1)], &cb).unwrap();
        assert_eq!(g.edge_query(&cb, 0, 1).unwrap(), 1.0);
        let cb3 = Codebook::standard_basis(3);
        let chain = GraphEmbedding::embed(&[(0, 1), (1, 2)], &cb3).unwrap();
        assert_eq!(chain.compose().edge_query(&cb3, 0, 2).unwrap(), 1.0);
    }

    #[test]
    fn zero_nuisance_query_is_exact() {
        let cfg = TrialConfig::new(Scheme::TensorSpherical, Task::EdgeQuery, Polarity::Positive, 8, 0)
            .with_trials(20);
        let r = run_query_trials(&cfg).unwrap();
        assert!(r.scores.iter().all(|s| (s - 1.0).abs() < 1e-12));
        let h = TrialConfig::new(Scheme::HadamardRademacher, Task::EdgeQuery, Polarity::Positive, 64, 0)
            .with_normalize(false)
            .with_trials(20);
        let r = run_query_trials(&h).unwrap();
        assert!(r.scores.iter().all(|&s| s == 64.0));
    }

    #[test]
    fn execution_policies_agree() {
        let cfg = TrialConfig::new(Scheme::TensorSpherical, Task::EdgeComposition, Polarity::Positive, 16, 8)
            .table(64)
            .with_trials(50)
            .with_seed(3);
        let a = run_composition_trials_with(&cfg, Execution::Sequential).unwrap();
        let b = run_composition_trials_with(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.scores, b.scores);
    }

    #[test]
    fn table_sampling_counts_shared_vertices() {
        let cfg = TrialConfig::new(Scheme::TensorSpherical, Task::EdgeQuery, Polarity::Positive, 16, 64)
            .table(64)
            .with_trials(200);
        let r = run_query_trials(&cfg).unwrap();
        // 4n - 7 of the other n(n-1) - 1 ordered pairs touch the query edge
        let want = 63.0 * (4.0 * 64.0 - 7.0) / (64.0 * 63.0 - 1.0);
        assert!((r.mean_shared - want).abs() < 0.4, "{}", r.mean_shared);
    }

    #[test]
    fn theory_reference_values() {
        assert_eq!(theory::query_true_var_tensor(64, 0, 16), 0.25);
        assert_eq!(theory::query_true_var_tensor(8, 4, 16), 0.25 + 4.0 / 256.0);
        let exact = theory::composition_true_var_tensor(8, 0, 16);
        assert!((exact - (16.0 / 256.0 + 49.0 / 4096.0)).abs() < 1e-15);
        let indep = theory::composition_true_var_tensor_independent(8, 16);
        assert!((indep - (14.0 / 256.0 + 49.0 / 4096.0)).abs() < 1e-15);
        assert_eq!(theory::query_true_var_hadamard(8, 256), 2048.0);
        assert_eq!(theory::composition_true_var_hadamard(2, 256), 256.0 * 4.0);
    }

    #[test]
    fn recovery_bounds_are_probabilities() {
        for k in [1, 16, 1024] {
            for m in [1, 8, 100] {
                for b in [
                    theory::recovery_bound_query_tensor(k, 0, 32, m),
                    theory::recovery_bound_composition_tensor(k, 32, m),
                    theory::recovery_bound_query_hadamard(k, 256, m),
                    theory::recovery_bound_composition_hadamard(k, 256, m),
                ] {
                    assert!((0.0..=1.0).contains(&b));
                }
            }
        }
        assert!(theory::recovery_bound_query_hadamard(1, 4096, 1) > 0.99);
    }

    #[test]
    fn crossing_and_slope() {
        let pts = [(1.0, 0.25), (2.0, 0.5), (4.0, 1.0), (8.0, 2.0)];
        assert!((crossing(&pts, 1.0).unwrap() - 4.0).abs() < 1e-12);
        let pts = [(1.0, 0.25), (2.0, 0.5)];
        assert!(crossing(&pts, 1.0).is_none());
        let line = [(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)];
        assert!((ols_slope(&line).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_config_formats() {
        let json = r#"{"scheme":"tensor_spherical","task":"edge_query","polarity":"positive",
            "d":[8,16],"k":[4,8,16],"trials":10,"sampling":"distinct"}"#;
        let c = SweepConfig::parse(json, false).unwrap();
        assert_eq!(c.cells().len(), 6);
        let toml = "scheme = \"hadamard_rademacher\"\ntask = \"edge_composition\"\npolarity = \"spurious\"\nd = [64]\nk = [4]\nn = 32\n";
        let t = SweepConfig::parse(toml, true).unwrap();
        assert_eq!(t.sampling(), Sampling::Table);
        assert_eq!(c.sampling(), Sampling::Distinct);
        assert_eq!(t.trials, 200);
        assert!(SweepConfig::parse("{", false).is_err());
        let rows = c.run(Execution::Sequential).unwrap();
        assert_eq!(to_csv(&rows).lines().count(), 7);
    }

    #[test]
    fn csv_row_shape() {
        let cfg = TrialConfig::new(Scheme::HadamardRademacher, Task::EdgeQuery, Polarity::Positive, 64, 4)
            .with_trials(10);
        let r = recovery_probability(&cfg, 3).unwrap();
        let row = csv_row(&r);
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.starts_with("hadamard_rademacher,edge_query,positive,64,64,4,"));
        assert!(r.recovery_rate.is_some());
    }
}
