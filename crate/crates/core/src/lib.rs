//! Locality-preserving vertex orderings for directed graphs.
//!
//! Provides the window score and its greedy maximizer, a learned set scorer
//! (DON) with an optional policy network that tunes its training
//! distribution, exact oracles for small graphs, fan merging, and two
//! downstream applications: block compression cost and edge partitioning.

pub mod apps;
pub mod checkpoint;
pub mod config;
pub mod don;
pub mod error;
pub mod generate;
pub mod graph;
pub mod greedy;
pub mod locality;
pub mod merge;
pub mod nn;
pub mod policy;
pub mod render;
pub mod train;

pub use apps::{
    compression_cost, greedy_partition, partition_from_order, random_partition, replication_factor,
    CompressionCost, EdgePartition,
};
pub use checkpoint::Checkpoint;
pub use config::Config;
pub use don::{don_order, don_order_graph, init_don, DonModel, PartialSolution, TrainingExample};
pub use error::{Error, Result};
pub use generate::{gen_erdos_renyi, gen_power_law};
pub use graph::{load_edge_list, read_edge_list, Graph};
pub use greedy::{brute_force_optimal, degree_order, go_order, go_order_with};
pub use locality::{
    f_score, f_score_graph, f_score_order, similarity, Permutation, Similarity, SimilarityIndex,
    SimilarityMatrix, WindowSize,
};
pub use merge::{expand_permutation, merge_degree_one, VertexGroups};
pub use policy::{init_policy, PolicyModel, SamplingDistribution};
pub use train::{train_don, train_don_rl, TrainOutcome};
