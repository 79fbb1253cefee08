mod common;

use std::path::{Path, PathBuf};

use graphorder::apps::random_partition;
use graphorder::don::{
    don_order_graph, init_don, sample_training_batch, sample_without_replacement, soft_label, train_step, PartialSolution,
    TrainingExample,
};
use graphorder::nn::Adam;
use graphorder::policy::SamplingDistribution;
use graphorder::{
    brute_force_optimal, f_score_graph, go_order, go_order_with, read_edge_list, Error, Graph, Similarity,
    SimilarityMatrix, WindowSize,
};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn five_graph() -> Graph {
    read_edge_list(&fixture("five_graph.txt")).unwrap().graph
}

fn five_vertex_matrix() -> SimilarityMatrix {
    SimilarityMatrix::parse(&std::fs::read_to_string(fixture("five_similarity.txt")).unwrap()).unwrap()
}

fn w(x: usize) -> WindowSize {
    WindowSize::new(x).unwrap()
}

#[test]
fn graph_fixture_realizes_matrix() {
    let g = five_graph();
    let s = five_vertex_matrix();
    let a = common::adjacency(&g);
    for u in 0..5 {
        for v in 0..5 {
            assert_eq!(s.sim(u, v), common::naive_similarity(&a, u, v), "({u},{v})");
            assert_eq!(g.sim(u, v), s.sim(u, v));
        }
    }
}

#[test]
fn greedy_on_fixture_is_optimal() {
    let g = five_graph();
    let perm = go_order(&g, w(3));
    assert_eq!(perm.order(), &[0, 1, 3, 4, 2]);
    assert_eq!(f_score_graph(&g, &perm, w(3)), 7);
    assert_eq!(go_order_with(&five_vertex_matrix(), w(3)), perm);
    let (_, best) = brute_force_optimal(&five_vertex_matrix(), w(3)).unwrap();
    assert_eq!(best, 7);
}

#[test]
fn fixture_soft_label() {
    let label = soft_label(&five_vertex_matrix(), &[0, 1], 5);
    let expected = [0.0, 0.0, 0.2, 0.4, 0.4];
    for (a, b) in label.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12, "{label:?}");
    }
}

#[test]
fn memorized_model_decodes_optimally() {
    let g = five_graph();
    let n = 5;
    let mut batch = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            batch.push(TrainingExample {
                input_set: PartialSolution::new(vec![a, b], n).unwrap(),
                soft_label: soft_label(&g, &[a, b], n),
            });
        }
    }
    // Single vertices also occur at the first decode step.
    for a in 0..n {
        batch.push(TrainingExample {
            input_set: PartialSolution::new(vec![a], n).unwrap(),
            soft_label: soft_label(&g, &[a], n),
        });
    }
    let mut model = init_don(n, 32, 16, 32, 1).unwrap();
    let mut opt = Adam::default();
    for _ in 0..3000 {
        train_step(&mut model, &mut opt, &batch, 1e-2).unwrap();
    }
    let perm = don_order_graph(&g, &model, w(3)).unwrap();
    assert!(f_score_graph(&g, &perm, w(3)) >= 7);
}

#[test]
fn brute_force_refuses_large_inputs() {
    let g = Graph::empty(11);
    assert!(matches!(brute_force_optimal(&g, w(2)), Err(Error::Refused(_))));
}

#[test]
fn uniform_sampling_inclusion_frequency() {
    let n = 20;
    let k = 4;
    let draws = 10_000;
    let mut rng = common::rng(1);
    let mut counts = vec![0usize; n];
    let weights = vec![1.0; n];
    for _ in 0..draws {
        for v in sample_without_replacement(&weights, k, &mut rng) {
            counts[v] += 1;
        }
    }
    let p = k as f64 / n as f64;
    let mean = draws as f64 * p;
    let sd = (draws as f64 * p * (1.0 - p)).sqrt();
    for (v, &c) in counts.iter().enumerate() {
        assert!((c as f64 - mean).abs() < 3.0 * sd + 1.0, "vertex {v}: {c}");
    }
}

#[test]
fn concentrated_distribution_dominates_sets() {
    let g = graphorder::gen_erdos_renyi(30, 0.2, 2).unwrap();
    let mut weights = vec![1e-9; 30];
    weights[7] = 1.0;
    let prob = SamplingDistribution::from_weights(&weights, 1e-9).unwrap();
    let batch = sample_training_batch(&g, &prob, w(4), 200, &mut common::rng(3)).unwrap();
    let hits = batch.iter().filter(|e| e.input_set.members().contains(&7)).count();
    assert!(hits >= 198, "{hits}");
}

#[test]
fn random_partition_is_roughly_uniform() {
    let g = graphorder::gen_erdos_renyi(120, 0.2, 5).unwrap();
    let k = 4;
    let part = random_partition(&g, k, 9).unwrap();
    let m = part.edge_count() as f64;
    let p = 1.0 / k as f64;
    let sd = (m * p * (1.0 - p)).sqrt();
    for size in part.part_sizes() {
        assert!((size as f64 - m * p).abs() < 3.0 * sd, "{size} of {m}");
    }
}
