//! Network graphs and models: construction from states, reconstruction,
//! perfect-map and graphoid verification, DOT export.

pub mod dot;
pub mod graph;
pub mod model;
pub mod perfect_map;

pub use dot::export_dot;
pub use graph::{build_graph, build_graph_strict, node_separation, GraphBuild, MenGraph};
pub use model::{
    extract_men, q_value, random_graph_model, reconstruct_state, MenModel, QFunctionTable,
};
pub use perfect_map::{
    check_graphoid_axioms, verify_perfect_map, GraphoidAxiom, GraphoidReport, PerfectMapReport,
};
