//! Graphviz output for networks, posets and dual networks.

use std::fmt::Write;

use crate::flow::FlowNetwork;
use crate::poset::MarkedPoset;
use crate::subdivision::ReductionTree;
use crate::transform::{BoundedEmbedding, DualNetwork};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Vertices are labelled `i (b_i)`; parallel edges are drawn separately
/// and labelled by index.
pub fn network_dot(g: &FlowNetwork, labels: Option<&[String]>) -> String {
    let mut s = String::from("digraph G {\n  rankdir=LR;\n");
    for v in 0..g.vertex_count() {
        let name = labels.map_or_else(|| v.to_string(), |l| l[v].clone());
        let _ = writeln!(s, "  v{v} [label={}];", quote(&format!("{name} ({})", g.netflow()[v])));
    }
    for (k, (a, b)) in g.edges().iter().enumerate() {
        let _ = writeln!(s, "  v{a} -> v{b} [label=\"e{k}\"];");
    }
    s.push_str("}\n");
    s
}

pub fn dual_network_dot(emb: &BoundedEmbedding, dn: &DualNetwork) -> String {
    let labels: Vec<String> = (0..dn.network.vertex_count()).map(|v| dn.label_name(emb, v)).collect();
    network_dot(&dn.network, Some(&labels))
}

/// Hasse diagram, bottom to top, with marks in the labels.
pub fn poset_dot(mp: &MarkedPoset) -> String {
    let p = mp.poset();
    let mut s = String::from("digraph P {\n  rankdir=BT;\n  edge [arrowhead=none];\n");
    for v in 0..p.len() {
        let label = match mp.mark(v) {
            Some(m) => format!("{} = {m}", p.id(v)),
            None => p.id(v).to_string(),
        };
        let shape = if mp.is_marked(v) { "box" } else { "ellipse" };
        let _ = writeln!(s, "  p{v} [label={}, shape={shape}];", quote(&label));
    }
    for (a, b) in p.covers() {
        let _ = writeln!(s, "  p{a} -> p{b};");
    }
    s.push_str("}\n");
    s
}

/// One node per graph in the tree; edges carry the reduced vertex and the
/// noncrossing tree used.
pub fn reduction_tree_dot(t: &ReductionTree) -> String {
    let mut s = String::from("digraph R {\n  node [shape=box];\n");
    for (k, n) in t.nodes.iter().enumerate() {
        let g = &n.reduced.network;
        let label = format!("#{k}\\n{} edges\\nnetflow {:?}", g.edges().len(), g.netflow());
        let _ = writeln!(s, "  n{k} [label=\"{label}\"];");
    }
    for (k, n) in t.nodes.iter().enumerate() {
        if let (Some(p), Some((v, tree))) = (n.parent, &n.step) {
            let _ = writeln!(s, "  n{p} -> n{k} [label={}];", quote(&format!("v{v} {:?}", tree.edges())));
        }
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn network_has_every_edge() {
        let g = FlowNetwork::new(3, vec![(0, 1), (0, 1), (1, 2)], vec![1, 0, -1]).unwrap();
        let d = network_dot(&g, None);
        assert_eq!(d.matches("->").count(), 3);
        assert!(d.contains("0 (1)"));
    }

    #[test]
    fn reduction_tree_nodes() {
        let t = crate::subdivision::canonical_reduction_tree(&crate::corpus::reduction_fixture()).unwrap();
        let d = reduction_tree_dot(&t);
        assert_eq!(d.matches(" -> ").count(), t.nodes.len() - 1);
    }
}
