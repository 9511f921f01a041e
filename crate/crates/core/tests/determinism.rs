use tsgraph::adjacency::diagonalize_with;
use tsgraph::codebook::{heavy_tail_demo, Codebook, CodebookKind};
use tsgraph::experiments::{
    recovery_probability_with, run_trials_with, variance_scaling_sweep_with, Polarity, Scheme, Task, TrialConfig,
};
use tsgraph::par::Execution;
use tsgraph::tables::{reproduce_table_with, Table};
use tsgraph::tensor_graph::GraphEmbedding;

fn configs() -> Vec<TrialConfig> {
    let mut out = Vec::new();
    for scheme in [Scheme::TensorSpherical, Scheme::HadamardRademacher] {
        for task in [Task::EdgeQuery, Task::EdgeComposition] {
            for polarity in [Polarity::Positive, Polarity::Spurious] {
                let d = if scheme == Scheme::TensorSpherical { 16 } else { 128 };
                out.push(TrialConfig::new(scheme, task, polarity, d, 12).with_trials(64).with_seed(21));
                out.push(TrialConfig::new(scheme, task, polarity, d, 12).table(40).with_trials(64).with_seed(21));
            }
        }
    }
    out
}

#[test]
fn sequential_and_parallel_agree_bitwise() {
    for cfg in configs() {
        let s = run_trials_with(&cfg, Execution::Sequential).unwrap();
        let p = run_trials_with(&cfg, Execution::Parallel).unwrap();
        assert_eq!(s.scores, p.scores, "{cfg:?}");
        assert_eq!(s.mean.to_bits(), p.mean.to_bits());
        assert_eq!(s.sd.to_bits(), p.sd.to_bits());
    }
}

#[test]
fn seeds_change_results() {
    let cfg = TrialConfig::new(Scheme::TensorSpherical, Task::EdgeQuery, Polarity::Positive, 16, 8).with_trials(32);
    let a = run_trials_with(&cfg.clone().with_seed(1), Execution::Parallel).unwrap();
    let b = run_trials_with(&cfg.with_seed(2), Execution::Parallel).unwrap();
    assert_ne!(a.scores, b.scores);
}

#[test]
fn recovery_and_sweeps_repeat() {
    let cfg = TrialConfig::new(Scheme::TensorSpherical, Task::EdgeQuery, Polarity::Positive, 16, 16).with_trials(100);
    let a = recovery_probability_with(&cfg, 10, Execution::Sequential).unwrap();
    let b = recovery_probability_with(&cfg, 10, Execution::Parallel).unwrap();
    assert_eq!(a.recovery_rate, b.recovery_rate);
    let sweep = |exec| {
        variance_scaling_sweep_with(Scheme::HadamardRademacher, Task::EdgeQuery, &[16, 32], &[8, 16, 32, 64], 40, 3, exec)
            .unwrap()
            .to_csv()
    };
    assert_eq!(sweep(Execution::Sequential), sweep(Execution::Parallel));
}

#[test]
fn tables_repeat() {
    let a = reproduce_table_with(Table::Table1, 4, Execution::Sequential).unwrap();
    let b = reproduce_table_with(Table::Table1, 4, Execution::Parallel).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.diff_json().unwrap(), b.diff_json().unwrap());
}

#[test]
fn library_helpers_repeat() {
    let cb = Codebook::generate(CodebookKind::Spherical, 30, 24, 5).unwrap();
    assert_eq!(cb, Codebook::generate(CodebookKind::Spherical, 30, 24, 5).unwrap());
    let edges: Vec<_> = (0..40).map(|i| (i % 30, (i * 7) % 30)).collect();
    let g = GraphEmbedding::embed(&edges, &cb).unwrap();
    assert_eq!(
        diagonalize_with(&g, &cb, Execution::Sequential).unwrap(),
        diagonalize_with(&g, &cb, Execution::Parallel).unwrap()
    );
    let t1 = heavy_tail_demo(CodebookKind::Gaussian, 4, 500, 8).unwrap();
    let t2 = heavy_tail_demo(CodebookKind::Gaussian, 4, 500, 8).unwrap();
    assert_eq!(t1.samples, t2.samples);
}
