use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rrcover::forest::forest_recursion_with;
use rrcover::rotor::{check_group_axioms, DEFAULT_ENUMERATION_CAP};
use rrcover::sandpile::count_spanning_trees_bruteforce;
use rrcover::{BaseGraph, Execution, WiredTree};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn brute_force(c: &mut Criterion) {
    let w = WiredTree::build(&BaseGraph::fibonacci(), 0, 5).unwrap();
    let mut group = c.benchmark_group("spanning_tree_bruteforce");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "fibonacci/1/5"), |b| {
            b.iter(|| count_spanning_trees_bruteforce(black_box(&w), DEFAULT_ENUMERATION_CAP, exec).unwrap())
        });
    }
    group.finish();
}

fn group_axioms(c: &mut Criterion) {
    let w = WiredTree::build(&BaseGraph::biregular(2, 3).unwrap(), 1, 3).unwrap();
    let mut group = c.benchmark_group("group_axioms");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "biregular:2,3/2/3"), |b| {
            b.iter(|| check_group_axioms(black_box(&w), DEFAULT_ENUMERATION_CAP, exec).unwrap())
        });
    }
    group.finish();
}

fn enumerate(c: &mut Criterion) {
    let w = WiredTree::build(&BaseGraph::fibonacci(), 0, 5).unwrap();
    let mut group = c.benchmark_group("enumerate_recurrent");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "fibonacci/1/5"), |b| {
            b.iter(|| w.enumerate_recurrent(DEFAULT_ENUMERATION_CAP, exec).unwrap())
        });
    }
    group.finish();
}

fn forest(c: &mut Criterion) {
    let g = BaseGraph::new(vec![vec![0, 1, 1, 1], vec![1, 0, 1, 1], vec![1, 1, 0, 1], vec![1, 1, 1, 0]]).unwrap();
    let mut group = c.benchmark_group("forest_recursion");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "k4/12"), |b| {
            b.iter(|| forest_recursion_with(black_box(&g), 12, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, brute_force, group_axioms, enumerate, forest);
criterion_main!(benches);
