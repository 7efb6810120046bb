//! Text formats: GML-style graph and rule documents and Graphviz export.

mod dot;
mod gml;

pub use dot::{graph_to_dot, network_to_dot, rule_to_dot};
pub use gml::{parse_graph, parse_rule, serialize_graph, serialize_rule};
