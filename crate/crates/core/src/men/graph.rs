use std::collections::{BTreeSet, VecDeque};

use crate::assignment::QubitSet;
use crate::separability::{slices_rank_one, ZeroAmplitudeWarning};
use crate::state::PureState;
use crate::{MenError, Result, ToleranceConfig};

/// Undirected graph over qubits `1..=n`; an edge marks conditional
/// entanglement of its endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MenGraph {
    num_nodes: usize,
    adjacency: Vec<BTreeSet<usize>>,
}

impl MenGraph {
    pub fn empty(num_nodes: usize) -> Self {
        MenGraph {
            num_nodes,
            adjacency: vec![BTreeSet::new(); num_nodes],
        }
    }

    pub fn with_edges<I: IntoIterator<Item = (usize, usize)>>(
        num_nodes: usize,
        edges: I,
    ) -> Result<Self> {
        let mut g = Self::empty(num_nodes);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    /// Path `1 - 2 - ... - n`.
    pub fn chain(num_nodes: usize) -> Self {
        Self::with_edges(num_nodes, (1..num_nodes).map(|i| (i, i + 1)))
            .expect("path edges are valid")
    }

    pub fn complete(num_nodes: usize) -> Self {
        Self::with_edges(
            num_nodes,
            (1..=num_nodes).flat_map(|i| (i + 1..=num_nodes).map(move |j| (i, j))),
        )
        .expect("complete graph edges are valid")
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        let n = self.num_nodes;
        if i == j || i == 0 || j == 0 || i > n || j > n {
            return Err(MenError::InvalidModel(format!(
                "edge {{{i},{j}}} is invalid for {n} nodes"
            )));
        }
        self.adjacency[i - 1].insert(j);
        self.adjacency[j - 1].insert(i);
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i >= 1 && i <= self.num_nodes && self.adjacency[i - 1].contains(&j)
    }

    /// Neighbor set `U(i)`, ascending.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.adjacency[i - 1].iter().copied().collect()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i - 1].len()
    }

    /// Edges as `(i, j)` with `i < j`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(k, nb)| {
                let i = k + 1;
                nb.iter().filter(move |&&j| j > i).map(move |&j| (i, j))
            })
            .collect()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn is_chain(&self) -> bool {
        self.num_edges() + 1 == self.num_nodes.max(1)
            && (1..self.num_nodes).all(|i| self.has_edge(i, i + 1))
    }

    pub fn is_subgraph_of(&self, other: &MenGraph) -> bool {
        self.num_nodes == other.num_nodes
            && self.edges().iter().all(|&(i, j)| other.has_edge(i, j))
    }

    /// Whether every path from `a` to `b` passes through `c`.
    pub fn separates(&self, a: &QubitSet, b: &QubitSet, c: &QubitSet) -> Result<bool> {
        let n = self.num_nodes;
        for s in [a, b, c] {
            s.check_range(n)?;
        }
        if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
            return Err(MenError::InvalidPartition(format!(
                "sets {a}, {b}, {c} overlap"
            )));
        }
        let mut seen = vec![false; n + 1];
        let mut queue: VecDeque<usize> = a.iter().collect();
        for q in a.iter() {
            seen[q] = true;
        }
        for q in c.iter() {
            seen[q] = true;
        }
        while let Some(u) = queue.pop_front() {
            if b.contains(u) {
                return Ok(false);
            }
            for &v in &self.adjacency[u - 1] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        Ok(true)
    }
}

/// Free-function form of [`MenGraph::separates`].
pub fn node_separation(g: &MenGraph, a: &QubitSet, b: &QubitSet, c: &QubitSet) -> Result<bool> {
    g.separates(a, b, c)
}

/// Result of [`build_graph`]; carries a warning when the state has
/// amplitudes at or below the zero threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphBuild {
    pub graph: MenGraph,
    pub zero_amplitude_warning: Option<ZeroAmplitudeWarning>,
}

/// Pairwise construction: `{i, j}` is an edge iff qubits `i` and `j` are
/// conditionally entangled given all other qubits (robust mode).
pub fn build_graph(psi: &PureState, tol: &ToleranceConfig) -> GraphBuild {
    let n = psi.num_qubits();
    let mut graph = MenGraph::empty(n);
    for i in 1..=n {
        for j in i + 1..=n {
            let a = QubitSet::from([i]);
            let b = QubitSet::from([j]);
            if !slices_rank_one(psi, &a, &b, tol) {
                graph.add_edge(i, j).expect("valid pair");
            }
        }
    }
    GraphBuild {
        graph,
        zero_amplitude_warning: ZeroAmplitudeWarning::check(psi, tol),
    }
}

/// Like [`build_graph`] but rejects states with near-zero amplitudes.
pub fn build_graph_strict(psi: &PureState, tol: &ToleranceConfig) -> Result<MenGraph> {
    if !psi.all_nonzero(tol) {
        return Err(MenError::ZeroAmplitude {
            min_modulus: psi.min_modulus(),
        });
    }
    Ok(build_graph(psi, tol).graph)
}
