//! The `tsgraph` command line.
//!
//! Exit codes: 0 success, 1 tolerance failure under `--strict`, 2 usage or
//! configuration error, 3 operation not defined for the given inputs.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::adjacency::EdgeListGraph;
use crate::codebook::{coherence, Codebook, CodebookKind};
use crate::envelope::Embedding;
use crate::error::Error;
use crate::experiments::{to_csv, Polarity, Sampling, Scheme, SweepConfig, Task};
use crate::hdc_graph::{HdcEmbedding, HdcScheme};
use crate::par::Execution;
use crate::tables::{reproduce_table_with, Table};
use crate::tensor_graph::{decode, GraphEmbedding, DEFAULT_THRESHOLD};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SEMANTIC: i32 = 3;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Semantic(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Unsupported(_) | Error::DimensionMismatch { .. } | Error::IndexOutOfRange { .. } => {
                CliError::Semantic(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "tsgraph", version, about = "Tensor-spherical graph embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a codebook and write it as JSON.
    GenCodebook {
        /// spherical, rademacher, normalized_rademacher, gaussian, cauchy,
        /// uniform01, or basis (the first n standard basis vectors)
        kind: String,
        n: usize,
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "codebook.json")]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Embed an edge-list graph with a codebook.
    Embed {
        graph: PathBuf,
        codebook: PathBuf,
        #[arg(long, value_enum, default_value_t = SchemeArg::Tensor)]
        scheme: SchemeArg,
        #[arg(long, default_value = "embedding.json")]
        out: PathBuf,
        /// File with one vertex name per line; the graph then uses names.
        #[arg(long)]
        names: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Query an embedding.
    Query {
        embedding: PathBuf,
        /// Defaults to `<embedding>.manifest.json` when that file exists.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Overrides the codebook named in the manifest.
        #[arg(long)]
        codebook: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Divide Hadamard scores by the dimension.
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        json: bool,
        #[command(subcommand)]
        op: QueryOp,
    },
    /// Reproduce a reference table or run a configured sweep.
    Experiment {
        #[arg(long)]
        table: Option<u32>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Exit with status 1 when a gated cell misses its tolerance.
        #[arg(long)]
        strict: bool,
        /// Run trials on the calling thread.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        sweep: SweepArgs,
    },
}

/// Sweep described on the command line instead of a config file.
#[derive(clap::Args, Debug, Default)]
struct SweepArgs {
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    task: Option<Task>,
    #[arg(long)]
    polarity: Option<Polarity>,
    #[arg(long = "d", value_delimiter = ',')]
    d: Vec<usize>,
    #[arg(long = "k", value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    shared: usize,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    sampling: Option<Sampling>,
    #[arg(long)]
    recovery: Option<usize>,
}

impl SweepArgs {
    fn given(&self) -> bool {
        self.scheme.is_some() || self.task.is_some() || !self.d.is_empty() || !self.k.is_empty()
    }

    fn into_config(self) -> CliResult<SweepConfig> {
        let (Some(scheme), Some(task)) = (self.scheme, self.task) else {
            return Err(CliError::Usage("a flag sweep needs --scheme and --task".into()));
        };
        Ok(SweepConfig {
            scheme,
            task,
            polarity: self.polarity.unwrap_or_default(),
            d: self.d,
            k: self.k,
            n: self.n,
            shared: self.shared,
            trials: self.trials,
            seed: 0,
            normalize: self.normalize,
            sampling: self.sampling,
            recovery: self.recovery,
        })
    }
}

#[derive(Subcommand, Debug)]
enum QueryOp {
    /// Score of the edge `u -> v`.
    Edge { u: String, v: String },
    /// Decoded out-neighbours of `u`.
    Out { u: String },
    /// Decoded in-neighbours of `v`.
    In { v: String },
    /// Embedding of length-`k` paths; with `u v`, the score of `u -> v` in it.
    Compose {
        k: u32,
        u: Option<String>,
        v: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// In- and out-degree of `v`.
    Degree { v: String },
    /// Subgraph on the listed vertices.
    Subgraph {
        #[arg(required = true)]
        vertices: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Frobenius distance to another embedding.
    Distance { other: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Tensor,
    Hdc,
    HdcPermuted,
}

/// Vertex names and file locations that go with an embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub vertex_names: Vec<String>,
    pub codebook_path: PathBuf,
    pub embedding_path: PathBuf,
    pub scheme: String,
}

impl Manifest {
    pub fn validate(&self, codebook_len: usize) -> Result<(), Error> {
        let mut seen = std::collections::BTreeSet::new();
        for n in &self.vertex_names {
            if !seen.insert(n) {
                return Err(Error::Config(format!("duplicate vertex name `{n}`")));
            }
        }
        if self.vertex_names.len() > codebook_len {
            return Err(Error::Config(format!(
                "{} vertex names for a codebook of {codebook_len} codes",
                self.vertex_names.len()
            )));
        }
        Ok(())
    }

    pub fn path_for(embedding: &Path) -> PathBuf {
        let mut s = embedding.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

fn emit(json: bool, value: Value, human: String) {
    if json {
        println!("{}", serde_json::to_string_pretty(&value).expect("values serialize"));
    } else {
        println!("{human}");
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Semantic(m)) => {
            eprintln!("error: {m}");
            EXIT_SEMANTIC
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<i32> {
    match cmd {
        Command::GenCodebook { kind, n, d, seed, out, json } => gen_codebook(&kind, n, d, seed, &out, json),
        Command::Embed { graph, codebook, scheme, out, names, json } => {
            embed(&graph, &codebook, scheme, &out, names.as_deref(), json)
        }
        Command::Query { embedding, manifest, codebook, threshold, normalize, json, op } => {
            let ctx = QueryContext::load(&embedding, manifest.as_deref(), codebook.as_deref())?;
            query(&ctx, op, threshold, normalize, json)
        }
        Command::Experiment { table, config, out, seed, strict, sequential, sweep } => {
            let exec = if sequential { Execution::Sequential } else { Execution::default() };
            experiment(table, config.as_deref(), sweep, &out, seed, strict, exec)
        }
    }
}

fn gen_codebook(kind: &str, n: usize, d: usize, seed: u64, out: &Path, json: bool) -> CliResult<i32> {
    if n == 0 || d == 0 {
        return Err(CliError::Usage(format!("n and d must be positive (got n={n}, d={d})")));
    }
    let cb = if kind == "basis" {
        if n > d {
            return Err(CliError::Usage(format!("a basis has at most d = {d} vectors, asked for {n}")));
        }
        Codebook::from_matrix(CodebookKind::Custom, seed, DMatrix::identity(d, n))?
    } else {
        let kind: CodebookKind = kind.parse()?;
        Codebook::generate(kind, n, d, seed)?
    };
    cb.save(out)?;
    let eps = 0.1;
    let summary = if n >= 2 { Some(coherence(&cb, eps)?) } else { None };
    let mut value = json!({
        "path": out.display().to_string(),
        "kind": cb.kind().name(),
        "n": n,
        "d": d,
        "seed": seed,
        "id": cb.id(),
    });
    let mut human = format!("wrote {} ({} codes, d = {d}, kind {})", out.display(), n, cb.kind());
    if let Some(c) = summary {
        value["coherence"] = serde_json::to_value(&c)?;
        human.push_str(&format!(
            "\nmax |dot| {}\nmean dot {}\nvar dot {}\npairs with |dot| >= {}: {} of {}",
            fmt6(c.max_abs_dot),
            fmt6(c.mean_dot),
            fmt6(c.var_dot),
            fmt6(eps),
            c.violations,
            c.pairs
        ));
    }
    emit(json, value, human);
    Ok(EXIT_OK)
}

fn read_names(path: &Path) -> CliResult<Vec<String>> {
    Ok(fs::read_to_string(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn embed(graph: &Path, codebook: &Path, scheme: SchemeArg, out: &Path, names: Option<&Path>, json: bool) -> CliResult<i32> {
    let cb = Codebook::load(codebook)?;
    let text = fs::read_to_string(graph)?;
    let (g, vertex_names) = match names {
        Some(p) => {
            let names = read_names(p)?;
            (EdgeListGraph::parse_named(&text, &names)?, names)
        }
        None => {
            let g = EdgeListGraph::parse(&text)?;
            let names = (0..g.num_vertices()).map(|i| i.to_string()).collect();
            (g, names)
        }
    };
    if g.num_vertices() > cb.len() {
        return Err(CliError::Semantic(format!(
            "graph has {} vertices but the codebook only {} codes",
            g.num_vertices(),
            cb.len()
        )));
    }
    let edges = g.edge_vec();
    let (embedding, edge_count) = match scheme {
        SchemeArg::Tensor => {
            let e = GraphEmbedding::embed(&edges, &cb)?;
            let c = e.edge_count();
            (Embedding::Tensor(e), c)
        }
        SchemeArg::Hdc | SchemeArg::HdcPermuted => {
            let e = HdcEmbedding::embed(&edges, &cb, scheme == SchemeArg::HdcPermuted)?;
            let c = e.vector().norm_squared() / e.dim() as f64;
            (Embedding::Hdc(e), c)
        }
    };
    embedding.save(out)?;
    let manifest = Manifest {
        vertex_names,
        codebook_path: absolute(codebook),
        embedding_path: absolute(out),
        scheme: embedding.scheme_name().to_string(),
    };
    manifest.validate(cb.len())?;
    let manifest_path = Manifest::path_for(out);
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    let value = json!({
        "path": out.display().to_string(),
        "manifest": manifest_path.display().to_string(),
        "scheme": embedding.scheme_name(),
        "dim": embedding.dim(),
        "edges": g.num_edges(),
        "edge_count": edge_count,
    });
    let human = format!(
        "wrote {} ({}, dim {})\nedges {}\nedge_count {}",
        out.display(),
        embedding.scheme_name(),
        embedding.dim(),
        g.num_edges(),
        fmt6(edge_count)
    );
    emit(json, value, human);
    Ok(EXIT_OK)
}

fn absolute(p: &Path) -> PathBuf {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf())
}

struct QueryContext {
    embedding: Embedding,
    codebook: Codebook,
    names: Vec<String>,
}

impl QueryContext {
    fn load(embedding: &Path, manifest: Option<&Path>, codebook: Option<&Path>) -> CliResult<Self> {
        let emb = Embedding::load(embedding)?;
        let default_manifest = Manifest::path_for(embedding);
        let manifest_path = match manifest {
            Some(p) => Some(p.to_path_buf()),
            None if default_manifest.exists() => Some(default_manifest),
            None => None,
        };
        let manifest: Option<Manifest> = match &manifest_path {
            Some(p) => Some(serde_json::from_str(&fs::read_to_string(p)?)?),
            None => None,
        };
        let cb_path = match (codebook, &manifest) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(m)) => m.codebook_path.clone(),
            (None, None) => {
                return Err(CliError::Usage(
                    "no manifest found; pass --codebook or --manifest".into(),
                ))
            }
        };
        let cb = Codebook::load(&cb_path)?;
        if cb.dim() != emb.dim() {
            return Err(CliError::Semantic(format!(
                "codebook dimension {} does not match embedding dimension {}",
                cb.dim(),
                emb.dim()
            )));
        }
        let names = match manifest {
            Some(m) => {
                m.validate(cb.len())?;
                m.vertex_names
            }
            None => (0..cb.len()).map(|i| i.to_string()).collect(),
        };
        Ok(QueryContext { embedding: emb, codebook: cb, names })
    }

    fn resolve(&self, name: &str) -> CliResult<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| CliError::Semantic(format!("unknown vertex `{name}`")))
    }

    fn tensor(&self, op: &str) -> CliResult<&GraphEmbedding> {
        match &self.embedding {
            Embedding::Tensor(g) => Ok(g),
            Embedding::Hdc(_) => Err(CliError::Semantic(format!(
                "`{op}` is not defined for Hadamard embeddings"
            ))),
        }
    }
}

fn decoded(ctx: &QueryContext, sup: &crate::tensor_graph::VertexSuperposition, threshold: f64, json: bool) -> CliResult<()> {
    let set = decode(sup, &ctx.codebook, threshold)?;
    let members: Vec<(String, f64)> = set
        .members
        .iter()
        .filter(|&&(v, _)| v < ctx.names.len())
        .map(|&(v, s)| (ctx.names[v].clone(), s))
        .collect();
    let value = json!({
        "threshold": threshold,
        "members": members.iter().map(|(n, s)| json!({"vertex": n, "score": s})).collect::<Vec<_>>(),
    });
    let list: Vec<&str> = members.iter().map(|(n, _)| n.as_str()).collect();
    let mut human = format!("{{{}}}", list.join(", "));
    for (n, s) in &members {
        human.push_str(&format!("\n{n} {}", fmt6(*s)));
    }
    emit(json, value, human);
    Ok(())
}

fn query(ctx: &QueryContext, op: QueryOp, threshold: f64, normalize: bool, json: bool) -> CliResult<i32> {
    let cb = &ctx.codebook;
    match op {
        QueryOp::Edge { u, v } => {
            let (a, b) = (ctx.resolve(&u)?, ctx.resolve(&v)?);
            let score = match &ctx.embedding {
                Embedding::Tensor(g) => g.edge_query(cb, a, b)?,
                Embedding::Hdc(h) => h.edge_query(cb, a, b, normalize)?,
            };
            emit(json, json!({"u": u, "v": v, "score": score}), fmt6(score));
        }
        QueryOp::Out { u } => {
            let sup = ctx.tensor("out")?.out_neighbors(cb, ctx.resolve(&u)?)?;
            decoded(ctx, &sup, threshold, json)?;
        }
        QueryOp::In { v } => {
            let sup = ctx.tensor("in")?.in_neighbors(cb, ctx.resolve(&v)?)?;
            decoded(ctx, &sup, threshold, json)?;
        }
        QueryOp::Compose { k, u, v, out } => {
            let composed = match &ctx.embedding {
                Embedding::Tensor(g) => Embedding::Tensor(g.power(k)?),
                Embedding::Hdc(h) => {
                    if k != 2 {
                        return Err(CliError::Semantic(
                            "Hadamard embeddings only compose pairs of edges (k = 2)".into(),
                        ));
                    }
                    if let HdcScheme::Permuted(_) = h.scheme() {
                        return Err(CliError::Semantic(
                            "edge composition is not defined for the permuted Hadamard scheme".into(),
                        ));
                    }
                    Embedding::Hdc(h.compose()?)
                }
            };
            if let Some(p) = &out {
                composed.save(p)?;
            }
            let mut value = json!({"k": k});
            let mut human = Vec::new();
            if let Some(p) = &out {
                value["path"] = json!(p.display().to_string());
                human.push(format!("wrote {}", p.display()));
            }
            match (u, v) {
                (Some(u), Some(v)) => {
                    let (a, b) = (ctx.resolve(&u)?, ctx.resolve(&v)?);
                    let score = match &composed {
                        Embedding::Tensor(g) => g.edge_query(cb, a, b)?,
                        Embedding::Hdc(h) => h.edge_query(cb, a, b, normalize)?,
                    };
                    value["u"] = json!(u);
                    value["v"] = json!(v);
                    value["score"] = json!(score);
                    human.push(fmt6(score));
                }
                (None, None) => {
                    if let Embedding::Tensor(g) = &composed {
                        value["edge_count"] = json!(g.edge_count());
                        human.push(format!("edge_count {}", fmt6(g.edge_count())));
                    }
                }
                _ => return Err(CliError::Usage("compose takes both u and v or neither".into())),
            }
            emit(json, value, human.join("\n"));
        }
        QueryOp::Degree { v } => {
            let g = ctx.tensor("degree")?;
            let i = ctx.resolve(&v)?;
            let din = g.in_degree(cb, i, i)?;
            let dout = g.out_degree(cb, i, i)?;
            emit(
                json,
                json!({"vertex": v, "in_degree": din, "out_degree": dout}),
                format!("in {}\nout {}", fmt6(din), fmt6(dout)),
            );
        }
        QueryOp::Subgraph { vertices, out } => {
            let g = ctx.tensor("subgraph")?;
            let idx = vertices.iter().map(|n| ctx.resolve(n)).collect::<CliResult<Vec<_>>>()?;
            let sub = g.subgraph(&idx, cb)?;
            if let Some(p) = &out {
                sub.save(p)?;
            }
            let mut value = json!({"vertices": vertices, "edge_count": sub.edge_count()});
            let mut human = format!("edge_count {}", fmt6(sub.edge_count()));
            if let Some(p) = &out {
                value["path"] = json!(p.display().to_string());
                human.push_str(&format!("\nwrote {}", p.display()));
            }
            emit(json, value, human);
        }
        QueryOp::Distance { other } => {
            let g = ctx.tensor("distance")?;
            let h = match Embedding::load(&other)? {
                Embedding::Tensor(h) => h,
                Embedding::Hdc(_) => {
                    return Err(CliError::Semantic("cannot compare with a Hadamard embedding".into()))
                }
            };
            let dist = g.distance(&h)?;
            emit(json, json!({"other": other.display().to_string(), "distance": dist}), fmt6(dist));
        }
    }
    Ok(EXIT_OK)
}

fn experiment(
    table: Option<u32>,
    config: Option<&Path>,
    sweep: SweepArgs,
    out: &Path,
    seed: Option<u64>,
    strict: bool,
    exec: Execution,
) -> CliResult<i32> {
    let flags = sweep.given();
    match (table, config) {
        (Some(t), None) if !flags => {
            let which = Table::from_number(t)
                .ok_or_else(|| CliError::Usage(format!("--table must be 1 or 2, got {t}")))?;
            let seed = seed.unwrap_or(0);
            let r = reproduce_table_with(which, seed, exec)?;
            fs::create_dir_all(out)?;
            let csv = out.join(format!("table{t}.csv"));
            let diff = out.join(format!("table{t}_diff.json"));
            fs::write(&csv, r.to_csv())?;
            fs::write(&diff, r.diff_json()?)?;
            let gated = r.cells.iter().filter(|c| c.gated).count();
            let failed = r.gated_failures().len();
            println!("wrote {} and {}", csv.display(), diff.display());
            println!("gated cells within tolerance: {} of {gated}", gated - failed);
            for c in r.gated_failures() {
                println!(
                    "outside tolerance: {} {} {} {}: mean {} (reference {}), sd {} (reference {})",
                    c.scheme,
                    c.task,
                    c.polarity,
                    c.column,
                    fmt6(c.mean),
                    fmt6(c.reference_mean),
                    fmt6(c.sd),
                    fmt6(c.reference_sd)
                );
            }
            Ok(if strict && failed > 0 { EXIT_TOLERANCE } else { EXIT_OK })
        }
        (None, config) if config.is_some() != flags => {
            let mut cfg = match config {
                Some(path) => SweepConfig::load(path)?,
                None => sweep.into_config()?,
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let rows = cfg.run(exec)?;
            fs::create_dir_all(out)?;
            let csv = out.join("sweep.csv");
            let js = out.join("sweep.json");
            fs::write(&csv, to_csv(&rows))?;
            fs::write(&js, serde_json::to_string_pretty(&rows)?)?;
            println!("wrote {} rows to {} and {}", rows.len(), csv.display(), js.display());
            Ok(EXIT_OK)
        }
        _ => Err(CliError::Usage("pass exactly one of --table, --config, or sweep flags".into())),
    }
}
