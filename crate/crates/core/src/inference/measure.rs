use crate::men::{build_graph, MenGraph};
use crate::state::PureState;
use crate::{MenError, Result, ToleranceConfig};

/// Outcome of measuring one qubit in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementUpdate {
    pub probability: f64,
    /// Post-measurement state on all `n` qubits.
    pub state: PureState,
    /// Graph rebuilt from `state`.
    pub graph: MenGraph,
    /// Edges of `graph` outside `edges(prior) - incident(qubit)`; empty when
    /// the containment guarantee holds.
    pub unexpected_edges: Vec<(usize, usize)>,
}

/// Measures `qubit`, collapses onto `outcome` and rebuilds the graph.
pub fn measure_and_update(
    psi: &PureState,
    prior: &MenGraph,
    qubit: usize,
    outcome: u8,
    tol: &ToleranceConfig,
) -> Result<MeasurementUpdate> {
    if prior.num_nodes() != psi.num_qubits() {
        return Err(MenError::InvalidQuery(format!(
            "graph has {} nodes, state has {} qubits",
            prior.num_nodes(),
            psi.num_qubits()
        )));
    }
    let (probability, state) = psi.measure_qubit(qubit, outcome, tol)?;
    let graph = build_graph(&state, tol).graph;
    let unexpected_edges = graph
        .edges()
        .into_iter()
        .filter(|&(a, b)| a == qubit || b == qubit || !prior.has_edge(a, b))
        .collect();
    Ok(MeasurementUpdate {
        probability,
        state,
        graph,
        unexpected_edges,
    })
}
