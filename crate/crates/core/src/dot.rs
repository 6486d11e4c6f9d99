//! Graphviz export of ABPs and of the identified digraph.

use std::collections::BTreeSet;
use std::fmt::Write;

use num_traits::Zero;

use crate::abp::{Abp, EdgeId, LinearLabel};
use crate::flow::IdentifiedGraph;

/// Human-readable label text, e.g. `x1 + (2ε^-1)·x2 + 1`.
pub fn label_text(abp: &Abp, l: &LinearLabel) -> String {
    let coeff = |c: &crate::laurent::LaurentEps| match c.as_rational() {
        Some(r) if r == num_rational::BigRational::from_integer(1.into()) => String::new(),
        Some(r) => format!("{r}·"),
        None => format!("({c})·"),
    };
    let mut parts: Vec<String> = l
        .terms
        .iter()
        .map(|(v, c)| format!("{}{}", coeff(c), abp.variables[*v]))
        .collect();
    if !l.constant.is_zero() {
        parts.push(format!("{}", l.constant));
    }
    parts.join(" + ")
}

fn node(layer: usize, v: usize) -> String {
    format!("v{}_{}", layer + 1, v + 1)
}

/// Layered drawing; vertex layer `d+1` is drawn separately from layer 1.
/// With `bold_parity`, parity-preserving edges are drawn bold.
pub fn abp_to_dot(abp: &Abp, bold_parity: bool) -> String {
    let d = abp.degree();
    let mut s = String::from("digraph abp {\n  rankdir=LR;\n  node [shape=circle, fontsize=10];\n");
    for layer in 0..=d {
        let _ = write!(s, "  {{ rank=same;");
        for v in 0..abp.format.width(layer) {
            let _ = write!(s, " {};", node(layer, v));
        }
        s.push_str(" }\n");
    }
    for (e, l) in &abp.labels {
        let style = if bold_parity && e.is_parity_preserving() { ", style=bold" } else { "" };
        let _ = writeln!(
            s,
            "  {} -> {} [label=\"{}\"{style}];",
            node(e.layer, e.from),
            node(e.layer + 1, e.to),
            label_text(abp, l).replace('"', "\\\"")
        );
    }
    s.push_str("}\n");
    s
}

/// `Γ̃` with the given tree edges highlighted.
pub fn identified_graph_to_dot(g: &IdentifiedGraph, tree: &BTreeSet<EdgeId>) -> String {
    let mut s = String::from("digraph identified {\n  node [shape=circle, fontsize=10];\n");
    for (layer, v) in g.vertices() {
        let _ = writeln!(s, "  {};", node(layer, v));
    }
    for &e in g.edges() {
        let (t, h) = (g.tail(e), g.head(e));
        let style = if tree.contains(&e) { " [color=red, penwidth=2]" } else { "" };
        let _ = writeln!(s, "  {} -> {}{style};", node(t.0, t.1), node(h.0, h.1));
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abp::Format;
    use crate::family::f_eps_abp;
    use crate::flow::spanning_tree_tau;

    #[test]
    fn abp_dot_marks_preserving_edges() {
        let f = Format::new(vec![2, 2, 2]).unwrap();
        let dot = abp_to_dot(&f_eps_abp(&f), true);
        assert_eq!(dot.matches("style=bold").count(), 6);
        assert!(dot.contains("v1_1 -> v2_2 [label=\"x1_1_2\"]"));
    }

    #[test]
    fn tree_highlight() {
        let f = Format::new(vec![2, 2, 2]).unwrap();
        let dot = identified_graph_to_dot(&IdentifiedGraph::complete(&f), &spanning_tree_tau(&f));
        assert_eq!(dot.matches("color=red").count(), 5);
        assert!(dot.contains("v3_1 -> v1_2"));
    }
}
