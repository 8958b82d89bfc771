use std::fmt::Write;

use crate::men::graph::MenGraph;

/// Graphviz text: one `qI;` line per node, then one `qI -- qJ;` line per
/// edge in lexicographic order.
pub fn export_dot(g: &MenGraph) -> String {
    let mut out = String::from("graph men {\n");
    for i in 1..=g.num_nodes() {
        writeln!(out, "  q{i};").unwrap();
    }
    for (i, j) in g.edges() {
        writeln!(out, "  q{i} -- q{j};").unwrap();
    }
    out.push_str("}\n");
    out
}
