//! DPO rules stored as one merged graph.
//!
//! Each vertex and edge carries an optional left label and an optional right
//! label. `L` is everything with a left label, `R` everything with a right
//! label and `K` the elements carrying both. Shared vertex indices realise
//! the atom mapping between the three graphs.

use std::collections::BTreeSet;
use std::fmt;

use crate::canon::{self, CanonicalCode, LabelledGraph};
use crate::graph::{Label, MolGraph};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleVertex {
    pub left: Option<Label>,
    pub right: Option<Label>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleEdge {
    pub source: usize,
    pub target: usize,
    pub left: Option<Label>,
    pub right: Option<Label>,
}

impl RuleVertex {
    pub fn context(label: impl Into<Label>) -> Self {
        let l = label.into();
        RuleVertex { left: Some(l.clone()), right: Some(l) }
    }
}

impl RuleEdge {
    pub fn new(source: usize, target: usize, left: Option<&str>, right: Option<&str>) -> Self {
        RuleEdge {
            source,
            target,
            left: left.map(Label::from),
            right: right.map(Label::from),
        }
    }

    pub fn other(&self, v: usize) -> usize {
        if self.source == v {
            self.target
        } else {
            self.source
        }
    }

    /// Context element whose label does not change.
    pub fn is_unchanged(&self) -> bool {
        self.left.is_some() && self.left == self.right
    }
}

/// One side (`L`, `K` or `R`) of a rule as a plain graph, with the rule
/// element behind every graph element.
#[derive(Debug, Clone)]
pub struct SideGraph {
    pub graph: MolGraph,
    /// graph vertex -> rule vertex
    pub vertices: Vec<usize>,
    /// graph edge -> rule edge
    pub edges: Vec<usize>,
}

impl SideGraph {
    /// rule vertex -> graph vertex
    pub fn vertex_index(&self, rule_vertex_count: usize) -> Vec<Option<usize>> {
        let mut index = vec![None; rule_vertex_count];
        for (i, &v) in self.vertices.iter().enumerate() {
            index[v] = Some(i);
        }
        index
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyRule,
    UnlabelledVertex(usize),
    UnlabelledEdge(usize),
    UnknownVertex { edge: usize, vertex: usize },
    SelfLoop(usize),
    DanglingEdge { edge: usize, side: Side },
    ParallelEdge(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyRule => write!(f, "empty rule"),
            Violation::UnlabelledVertex(v) => write!(f, "vertex {v} has neither a left nor a right label"),
            Violation::UnlabelledEdge(e) => write!(f, "edge {e} has neither a left nor a right label"),
            Violation::UnknownVertex { edge, vertex } => {
                write!(f, "edge {edge} references unknown vertex {vertex}")
            }
            Violation::SelfLoop(e) => write!(f, "edge {e} is a self-loop"),
            Violation::DanglingEdge { edge, side } => {
                write!(f, "dangling edge {edge}: an endpoint is missing from the {side:?} graph")
            }
            Violation::ParallelEdge(u, v) => write!(f, "parallel edge between {u} and {v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    name: String,
    vertices: Vec<RuleVertex>,
    edges: Vec<RuleEdge>,
}

impl Rule {
    /// Builds a rule and validates it.
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<RuleVertex>,
        edges: Vec<RuleEdge>,
    ) -> Result<Self, Vec<Violation>> {
        let rule = Self::from_parts(name, vertices, edges);
        rule.validate()?;
        Ok(rule)
    }

    /// Builds a rule without validation.
    pub fn from_parts(name: impl Into<String>, vertices: Vec<RuleVertex>, edges: Vec<RuleEdge>) -> Self {
        let edges = edges
            .into_iter()
            .map(|mut e| {
                if e.source > e.target {
                    std::mem::swap(&mut e.source, &mut e.target);
                }
                e
            })
            .collect();
        Rule { name: name.into(), vertices, edges }
    }

    /// The rule `(empty, empty, g)`: creates a copy of `g`.
    pub fn creating(name: impl Into<String>, g: &MolGraph) -> Self {
        Self::from_graph(name, g, Side::Right)
    }

    /// The rule `(g, empty, empty)`: destroys a copy of `g`.
    pub fn destroying(name: impl Into<String>, g: &MolGraph) -> Self {
        Self::from_graph(name, g, Side::Left)
    }

    /// The rule `(g, g, g)`: pure context.
    pub fn identity(name: impl Into<String>, g: &MolGraph) -> Self {
        let vertices = g.labels().iter().map(|l| RuleVertex::context(l.clone())).collect();
        let edges = g
            .edges()
            .iter()
            .map(|e| RuleEdge {
                source: e.source,
                target: e.target,
                left: Some(e.label.clone()),
                right: Some(e.label.clone()),
            })
            .collect();
        Rule::from_parts(name, vertices, edges)
    }

    fn from_graph(name: impl Into<String>, g: &MolGraph, side: Side) -> Self {
        let wrap = |l: &Label| match side {
            Side::Left => (Some(l.clone()), None),
            Side::Right => (None, Some(l.clone())),
        };
        let vertices = g
            .labels()
            .iter()
            .map(|l| {
                let (left, right) = wrap(l);
                RuleVertex { left, right }
            })
            .collect();
        let edges = g
            .edges()
            .iter()
            .map(|e| {
                let (left, right) = wrap(&e.label);
                RuleEdge { source: e.source, target: e.target, left, right }
            })
            .collect();
        Rule::from_parts(name, vertices, edges)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn vertices(&self) -> &[RuleVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[RuleEdge] {
        &self.edges
    }

    /// Every rule invariant; `Ok` when none is violated.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        if self.vertices.is_empty() {
            violations.push(Violation::EmptyRule);
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.left.is_none() && v.right.is_none() {
                violations.push(Violation::UnlabelledVertex(i));
            }
        }
        let mut pairs = BTreeSet::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.left.is_none() && e.right.is_none() {
                violations.push(Violation::UnlabelledEdge(i));
            }
            let n = self.vertices.len();
            if e.source >= n || e.target >= n {
                violations.push(Violation::UnknownVertex {
                    edge: i,
                    vertex: e.source.max(e.target),
                });
                continue;
            }
            if e.source == e.target {
                violations.push(Violation::SelfLoop(i));
                continue;
            }
            if !pairs.insert((e.source, e.target)) {
                violations.push(Violation::ParallelEdge(e.source, e.target));
            }
            let (s, t) = (&self.vertices[e.source], &self.vertices[e.target]);
            if e.left.is_some() && (s.left.is_none() || t.left.is_none()) {
                violations.push(Violation::DanglingEdge { edge: i, side: Side::Left });
            }
            if e.right.is_some() && (s.right.is_none() || t.right.is_none()) {
                violations.push(Violation::DanglingEdge { edge: i, side: Side::Right });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    fn side(&self, pick: impl Fn(&Option<Label>, &Option<Label>) -> Option<Label>) -> SideGraph {
        let mut graph = MolGraph::new();
        let mut index = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if let Some(l) = pick(&v.left, &v.right) {
                index[i] = graph.add_vertex(l);
                vertices.push(i);
            }
        }
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if let Some(l) = pick(&e.left, &e.right) {
                graph
                    .add_edge(index[e.source], index[e.target], l)
                    .expect("side graph of a valid rule is simple");
                edges.push(i);
            }
        }
        SideGraph { graph, vertices, edges }
    }

    pub fn left_graph(&self) -> SideGraph {
        self.side(|l, _| l.clone())
    }

    pub fn right_graph(&self) -> SideGraph {
        self.side(|_, r| r.clone())
    }

    /// `K`. Elements whose label changes keep their left label here.
    pub fn context_graph(&self) -> SideGraph {
        self.side(|l, r| if r.is_some() { l.clone() } else { None })
    }

    /// Swaps left and right.
    pub fn inverse(&self, name: impl Into<String>) -> Rule {
        Rule {
            name: name.into(),
            vertices: self
                .vertices
                .iter()
                .map(|v| RuleVertex { left: v.right.clone(), right: v.left.clone() })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| RuleEdge {
                    source: e.source,
                    target: e.target,
                    left: e.right.clone(),
                    right: e.left.clone(),
                })
                .collect(),
        }
    }

    /// Atoms are neither created, destroyed nor retyped.
    pub fn is_atom_conserving(&self) -> bool {
        self.vertices
            .iter()
            .all(|v| v.left.is_some() && v.left == v.right)
    }

    pub fn left_component_count(&self) -> usize {
        self.left_graph().graph.connected_components().count()
    }

    pub fn right_component_count(&self) -> usize {
        self.right_graph().graph.connected_components().count()
    }

    /// Rule isomorphism code: the merged graph with each element labelled by
    /// its (left, right) label pair. The name does not participate.
    pub fn canonical_code(&self) -> CanonicalCode {
        canon::canonical_form(&self.labelled()).0
    }

    /// Canonical code together with the canonical vertex order.
    pub fn canonical_form(&self) -> (CanonicalCode, Vec<usize>) {
        canon::canonical_form(&self.labelled())
    }

    /// Copy with vertices renumbered into canonical order and edges sorted;
    /// isomorphic rules become identical up to the name.
    pub fn canonicalised(&self) -> Rule {
        let (_, order) = self.canonical_form();
        self.reordered(&order)
    }

    /// `order[i]` becomes vertex `i`.
    pub fn reordered(&self, order: &[usize]) -> Rule {
        let mut position = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let vertices = order.iter().map(|&v| self.vertices[v].clone()).collect();
        let mut edges: Vec<RuleEdge> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (position[e.source], position[e.target]);
                RuleEdge { source: a.min(b), target: a.max(b), left: e.left.clone(), right: e.right.clone() }
            })
            .collect();
        edges.sort_by_key(|e| (e.source, e.target));
        Rule { name: self.name.clone(), vertices, edges }
    }

    fn labelled(&self) -> LabelledGraph {
        LabelledGraph {
            vertex_labels: self
                .vertices
                .iter()
                .map(|v| encode_pair(&v.left, &v.right))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| (e.source, e.target, encode_pair(&e.left, &e.right)))
                .collect(),
        }
    }
}

fn encode_pair(left: &Option<Label>, right: &Option<Label>) -> Vec<u8> {
    let mut out = Vec::new();
    for l in [left, right] {
        match l {
            None => out.push(0),
            Some(l) => {
                out.push(1);
                out.extend_from_slice(&(l.as_str().len() as u32).to_be_bytes());
                out.extend_from_slice(l.as_str().as_bytes());
            }
        }
    }
    out
}
