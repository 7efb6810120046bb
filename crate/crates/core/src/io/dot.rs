//! Graphviz export.
//!
//! Rule exports put the left and right graphs side by side in two clusters.
//! Elements that the rule deletes, creates or relabels carry
//! `class="changed"` and are drawn red; the context carries
//! `class="context"` and is drawn black.

use std::fmt::Write;

use crate::chemistry::ReactionNetwork;
use crate::graph::MolGraph;
use crate::rule::{Rule, Side};

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

const CHANGED: &str = "class=\"changed\", color=\"red\", fontcolor=\"red\", penwidth=2";
const CONTEXT: &str = "class=\"context\", color=\"black\"";

pub fn graph_to_dot(g: &MolGraph) -> String {
    let mut out = String::from("graph G {\n  node [shape=circle];\n");
    for (i, l) in g.labels().iter().enumerate() {
        writeln!(out, "  v{i} [label=\"{}\"];", esc(l.as_str())).unwrap();
    }
    for e in g.edges() {
        writeln!(out, "  v{} -- v{} [label=\"{}\"];", e.source, e.target, esc(e.label.as_str())).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn rule_to_dot(r: &Rule) -> String {
    let mut out = format!("graph \"{}\" {{\n  node [shape=circle];\n", esc(r.name()));
    for (side, tag, title) in [(Side::Left, "l", "left"), (Side::Right, "r", "right")] {
        writeln!(out, "  subgraph cluster_{title} {{\n    label=\"{title}\";").unwrap();
        for (i, v) in r.vertices().iter().enumerate() {
            let label = match side {
                Side::Left => &v.left,
                Side::Right => &v.right,
            };
            if let Some(l) = label {
                let role = if v.left == v.right { CONTEXT } else { CHANGED };
                writeln!(out, "    {tag}{i} [label=\"{}\", {role}];", esc(l.as_str())).unwrap();
            }
        }
        for e in r.edges() {
            let label = match side {
                Side::Left => &e.left,
                Side::Right => &e.right,
            };
            if let Some(l) = label {
                let role = if e.is_unchanged() { CONTEXT } else { CHANGED };
                writeln!(
                    out,
                    "    {tag}{} -- {tag}{} [label=\"{}\", {role}];",
                    e.source,
                    e.target,
                    esc(l.as_str())
                )
                .unwrap();
            }
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

/// Species are ellipses labelled with their formula; every hyperedge is a
/// box labelled `(i, rule)` with `i` counting from 1.
pub fn network_to_dot(net: &ReactionNetwork) -> String {
    let mut out = String::from("digraph network {\n  rankdir=LR;\n");
    for (i, s) in net.species.iter().enumerate() {
        writeln!(out, "  s{i} [shape=ellipse, label=\"{}\"];", esc(&s.graph.formula())).unwrap();
    }
    for (i, h) in net.hyperedges.iter().enumerate() {
        writeln!(out, "  h{i} [shape=box, label=\"({}, {})\"];", i + 1, esc(&h.rule)).unwrap();
        for &s in &h.inputs {
            writeln!(out, "  s{s} -> h{i};").unwrap();
        }
        for &s in &h.outputs {
            writeln!(out, "  h{i} -> s{s};").unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemistry::{formose_cycle_network, formose_ruleset, molecules, ReactionNetwork};

    #[test]
    fn p1_has_three_changed_edges_per_side() {
        let rs = formose_ruleset();
        let dot = rule_to_dot(rs.rule("p1").unwrap());
        assert_eq!(dot.matches("subgraph cluster_").count(), 2);
        let changed = |tag: &str| {
            dot.lines()
                .filter(|l| l.trim_start().starts_with(tag) && l.contains(" -- ") && l.contains("changed"))
                .count()
        };
        assert_eq!(changed("l"), 3);
        assert_eq!(changed("r"), 3);
    }

    #[test]
    fn single_species_network() {
        let mut net = ReactionNetwork::new();
        net.add_species(&molecules::water(), 0);
        let dot = network_to_dot(&net);
        assert_eq!(dot.matches("shape=ellipse").count(), 1);
        assert_eq!(dot.matches("shape=box").count(), 0);
    }

    #[test]
    fn cycle_network_has_nine_boxes() {
        let net = formose_cycle_network(&formose_ruleset()).unwrap();
        let dot = network_to_dot(&net);
        assert_eq!(dot.matches("shape=box").count(), 9);
        assert!(dot.contains("label=\"(9, p1)\""));
    }

    #[test]
    fn graph_export_is_deterministic() {
        let g = molecules::glycolaldehyde();
        assert_eq!(graph_to_dot(&g), graph_to_dot(&g.clone()));
        assert_eq!(graph_to_dot(&g).matches(" -- ").count(), 7);
    }
}
