//! Undirected, simple, vertex- and edge-labelled graphs.
//!
//! Vertex ids are dense indices `0..n` local to one graph. Anything that
//! relates two graphs does so through an explicit index map.

use std::collections::BTreeMap;
use std::fmt;

use crate::canon::{self, CanonicalCode};
use crate::error::GraphError;

/// Atom or bond symbol. Never empty.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(text: impl Into<String>) -> Result<Self, GraphError> {
        let text = text.into();
        if text.is_empty() {
            return Err(GraphError::EmptyLabel);
        }
        Ok(Label(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    /// Panics on the empty string; use [`Label::new`] for untrusted input.
    fn from(s: &str) -> Self {
        Label::new(s).expect("label must not be empty")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Smaller endpoint.
    pub source: usize,
    /// Larger endpoint.
    pub target: usize,
    pub label: Label,
}

impl Edge {
    pub fn other(&self, v: usize) -> usize {
        if self.source == v {
            self.target
        } else {
            self.source
        }
    }
}

/// A molecule or a molecule pattern.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MolGraph {
    labels: Vec<Label>,
    edges: Vec<Edge>,
    // (neighbour, edge index), kept sorted by neighbour
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl MolGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, label: impl Into<Label>) -> usize {
        self.labels.push(label.into());
        self.adjacency.push(Vec::new());
        self.labels.len() - 1
    }

    /// Adds an undirected edge. Rejects self-loops, unknown endpoints and
    /// parallel edges.
    pub fn add_edge(
        &mut self,
        u: usize,
        v: usize,
        label: impl Into<Label>,
    ) -> Result<usize, GraphError> {
        let n = self.labels.len();
        if u >= n || v >= n {
            return Err(GraphError::UnknownVertex(u.max(v)));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.edge_between(u, v).is_some() {
            return Err(GraphError::ParallelEdge(u.min(v), u.max(v)));
        }
        let idx = self.edges.len();
        self.edges.push(Edge {
            source: u.min(v),
            target: u.max(v),
            label: label.into(),
        });
        insert_sorted(&mut self.adjacency[u], (v, idx));
        insert_sorted(&mut self.adjacency[v], (u, idx));
        Ok(idx)
    }

    /// Builds a graph from plain lists; convenient for fixtures.
    pub fn from_parts(labels: &[&str], edges: &[(usize, usize, &str)]) -> Result<Self, GraphError> {
        let mut g = MolGraph::new();
        for l in labels {
            g.add_vertex(Label::new(*l)?);
        }
        for &(u, v, l) in edges {
            g.add_edge(u, v, Label::new(l)?)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> &Label {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn neighbours(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let adj = self.adjacency.get(u)?;
        adj.binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| adj[i].1)
    }

    /// Multiset of vertex labels, used for atom-conservation checks.
    pub fn label_counts(&self) -> BTreeMap<Label, usize> {
        let mut counts = BTreeMap::new();
        for l in &self.labels {
            *counts.entry(l.clone()).or_insert(0) += 1;
        }
        counts
    }

    /// Connected component id per vertex, components numbered by their
    /// smallest vertex.
    pub fn component_ids(&self) -> (Vec<usize>, usize) {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.adjacency[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.component_ids().1 == 1
    }

    /// Subgraph induced by `vertices`, in the given order. Returns the graph;
    /// vertex `i` of the result is `vertices[i]` of `self`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> MolGraph {
        let mut index = vec![usize::MAX; self.vertex_count()];
        let mut g = MolGraph::new();
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
            g.add_vertex(self.labels[v].clone());
        }
        for e in &self.edges {
            let (a, b) = (index[e.source], index[e.target]);
            if a != usize::MAX && b != usize::MAX {
                g.add_edge(a, b, e.label.clone())
                    .expect("induced subgraph of a simple graph is simple");
            }
        }
        g
    }

    /// Splits the graph into its connected components together with the
    /// original vertex ids of each component.
    pub fn components_with_vertices(&self) -> Vec<(MolGraph, Vec<usize>)> {
        let (comp, count) = self.component_ids();
        let mut members = vec![Vec::new(); count];
        for (v, &c) in comp.iter().enumerate() {
            members[c].push(v);
        }
        members
            .into_iter()
            .map(|vs| (self.induced_subgraph(&vs), vs))
            .collect()
    }

    pub fn connected_components(&self) -> ComponentMultiset {
        ComponentMultiset {
            components: self
                .components_with_vertices()
                .into_iter()
                .map(|(g, _)| g)
                .collect(),
        }
    }

    /// Appends a copy of `other`; returns the offset of its vertex ids.
    pub fn extend_disjoint(&mut self, other: &MolGraph) -> usize {
        let offset = self.vertex_count();
        for l in &other.labels {
            self.add_vertex(l.clone());
        }
        for e in &other.edges {
            self.add_edge(e.source + offset, e.target + offset, e.label.clone())
                .expect("disjoint copy cannot create parallel edges");
        }
        offset
    }

    /// Relabels vertex ids: vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> MolGraph {
        assert_eq!(perm.len(), self.vertex_count());
        let mut inverse = vec![0; perm.len()];
        for (v, &p) in perm.iter().enumerate() {
            inverse[p] = v;
        }
        let mut g = MolGraph::new();
        for &v in &inverse {
            g.add_vertex(self.labels[v].clone());
        }
        for e in &self.edges {
            g.add_edge(perm[e.source], perm[e.target], e.label.clone())
                .expect("permutation preserves simplicity");
        }
        g
    }

    pub fn canonical_code(&self) -> CanonicalCode {
        canon::graph_code(self)
    }

    pub fn is_isomorphic(&self, other: &MolGraph) -> bool {
        is_isomorphic(self, other)
    }

    /// Hill-style formula, e.g. `C2H4O2`.
    pub fn formula(&self) -> String {
        let counts = self.label_counts();
        let mut out = String::new();
        let mut push = |l: &str, n: usize| {
            out.push_str(l);
            if n > 1 {
                out.push_str(&n.to_string());
            }
        };
        for first in ["C", "H"] {
            if let Some(&n) = counts.get(&Label::from(first)) {
                push(first, n);
            }
        }
        for (l, &n) in &counts {
            if l.as_str() != "C" && l.as_str() != "H" {
                push(l.as_str(), n);
            }
        }
        out
    }
}

fn insert_sorted(list: &mut Vec<(usize, usize)>, item: (usize, usize)) {
    let pos = list.partition_point(|x| x.0 < item.0);
    list.insert(pos, item);
}

/// A graph viewed as the multiset of its connected components.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComponentMultiset {
    components: Vec<MolGraph>,
}

impl ComponentMultiset {
    /// Every member must be connected.
    pub fn new(components: Vec<MolGraph>) -> Result<Self, GraphError> {
        for (i, c) in components.iter().enumerate() {
            if !c.is_connected() {
                return Err(GraphError::NotConnected(i));
            }
        }
        Ok(ComponentMultiset { components })
    }

    pub fn components(&self) -> &[MolGraph] {
        &self.components
    }

    pub fn count(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Disjoint union of all components plus the vertex offset of each.
    pub fn union(&self) -> (MolGraph, Vec<usize>) {
        let mut g = MolGraph::new();
        let offsets = self.components.iter().map(|c| g.extend_disjoint(c)).collect();
        (g, offsets)
    }

    /// Sorted canonical codes of the members.
    pub fn codes(&self) -> Vec<CanonicalCode> {
        let mut codes: Vec<_> = self.components.iter().map(|c| c.canonical_code()).collect();
        codes.sort();
        codes
    }

    /// Multiset equality up to per-component isomorphism.
    pub fn is_isomorphic(&self, other: &ComponentMultiset) -> bool {
        self.count() == other.count() && self.codes() == other.codes()
    }

    pub fn label_counts(&self) -> BTreeMap<Label, usize> {
        let mut counts = BTreeMap::new();
        for c in &self.components {
            for (l, n) in c.label_counts() {
                *counts.entry(l).or_insert(0) += n;
            }
        }
        counts
    }
}

impl FromIterator<MolGraph> for ComponentMultiset {
    /// Disconnected items are split into their components.
    fn from_iter<T: IntoIterator<Item = MolGraph>>(iter: T) -> Self {
        let mut components = Vec::new();
        for g in iter {
            components.extend(g.connected_components().components);
        }
        ComponentMultiset { components }
    }
}

pub fn connected_components(g: &MolGraph) -> ComponentMultiset {
    g.connected_components()
}

pub fn is_isomorphic(g: &MolGraph, h: &MolGraph) -> bool {
    if g.vertex_count() != h.vertex_count() || g.edge_count() != h.edge_count() {
        return false;
    }
    if g.label_counts() != h.label_counts() {
        return false;
    }
    g.canonical_code() == h.canonical_code()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemistry::molecules;

    #[test]
    fn rejects_parallel_edges_and_loops() {
        let mut g = MolGraph::new();
        let c = g.add_vertex("C");
        let o = g.add_vertex("O");
        g.add_edge(c, o, "=").unwrap();
        assert_eq!(g.add_edge(o, c, "-"), Err(GraphError::ParallelEdge(0, 1)));
        assert_eq!(g.add_edge(c, c, "-"), Err(GraphError::SelfLoop(0)));
        assert_eq!(g.add_edge(c, 7, "-"), Err(GraphError::UnknownVertex(7)));
        assert!(Label::new("").is_err());
    }

    #[test]
    fn component_counts() {
        assert_eq!(molecules::glycolaldehyde().connected_components().count(), 1);
        let mut both = molecules::formaldehyde();
        both.extend_disjoint(&molecules::glycolaldehyde());
        assert_eq!(both.connected_components().count(), 2);
        assert_eq!(MolGraph::new().connected_components().count(), 0);
    }

    #[test]
    fn multiset_rejects_disconnected_members() {
        let mut both = molecules::formaldehyde();
        both.extend_disjoint(&molecules::formaldehyde());
        assert_eq!(
            ComponentMultiset::new(vec![both.clone()]),
            Err(GraphError::NotConnected(0))
        );
        let split: ComponentMultiset = std::iter::once(both).collect();
        assert_eq!(split.count(), 2);
    }

    #[test]
    fn isomorphism_examples() {
        let g0 = molecules::formaldehyde();
        let perm = [2, 0, 3, 1];
        assert!(is_isomorphic(&g0, &g0.permuted(&perm)));
        assert!(!is_isomorphic(&g0, &molecules::glycolaldehyde()));
        assert!(!is_isomorphic(
            &molecules::glycolaldehyde(),
            &molecules::ethenediol()
        ));
    }

    #[test]
    fn formula() {
        assert_eq!(molecules::glycolaldehyde().formula(), "C2H4O2");
        assert_eq!(molecules::formaldehyde().formula(), "CH2O");
    }
}
