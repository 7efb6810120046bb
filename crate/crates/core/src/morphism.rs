//! Label-preserving injective subgraph embeddings (non-induced).

use crate::graph::MolGraph;

/// Injective, label-preserving map of a pattern into a host.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Embedding {
    /// `vertex_map[p]` is the host vertex of pattern vertex `p`.
    pub vertex_map: Vec<usize>,
    /// `edge_map[e]` is the host edge of pattern edge `e`.
    pub edge_map: Vec<usize>,
}

impl Embedding {
    /// Checks every embedding invariant against the two graphs.
    pub fn is_valid(&self, pattern: &MolGraph, host: &MolGraph) -> bool {
        if self.vertex_map.len() != pattern.vertex_count()
            || self.edge_map.len() != pattern.edge_count()
        {
            return false;
        }
        let mut used = vec![false; host.vertex_count()];
        for (p, &h) in self.vertex_map.iter().enumerate() {
            if h >= host.vertex_count() || used[h] || pattern.label(p) != host.label(h) {
                return false;
            }
            used[h] = true;
        }
        pattern.edges().iter().zip(&self.edge_map).all(|(e, &he)| {
            let (a, b) = (self.vertex_map[e.source], self.vertex_map[e.target]);
            host.edge_between(a, b) == Some(he) && host.edge(he).label == e.label
        })
    }
}

/// All embeddings of `pattern` into `host`, sorted by `vertex_map`.
pub fn enumerate_embeddings(pattern: &MolGraph, host: &MolGraph) -> Vec<Embedding> {
    let mut out = Vec::new();
    for_each_embedding(pattern, host, |e| {
        out.push(e);
        true
    });
    out.sort();
    out
}

/// Component-to-component variant; both graphs must be connected.
pub fn enumerate_component_embeddings(
    pattern_component: &MolGraph,
    host_component: &MolGraph,
) -> Result<Vec<Embedding>, NotConnected> {
    if !pattern_component.is_connected() {
        return Err(NotConnected::Pattern);
    }
    if !host_component.is_connected() {
        return Err(NotConnected::Host);
    }
    Ok(enumerate_embeddings(pattern_component, host_component))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum NotConnected {
    #[error("pattern component is not connected")]
    Pattern,
    #[error("host component is not connected")]
    Host,
}

/// True if at least one embedding exists.
pub fn has_embedding(pattern: &MolGraph, host: &MolGraph) -> bool {
    let mut found = false;
    for_each_embedding(pattern, host, |_| {
        found = true;
        false
    });
    found
}

/// Backtracking search. Pattern vertices are visited in a connectivity
/// order (each vertex after the first of its component has an already
/// mapped neighbour), host candidates in ascending id. The callback returns
/// `false` to stop.
pub fn for_each_embedding<F>(pattern: &MolGraph, host: &MolGraph, mut visit: F)
where
    F: FnMut(Embedding) -> bool,
{
    let np = pattern.vertex_count();
    if np > host.vertex_count() || pattern.edge_count() > host.edge_count() {
        return;
    }
    let order = search_order(pattern);
    let mut state = Search {
        pattern,
        host,
        order: &order,
        map: vec![usize::MAX; np],
        used: vec![false; host.vertex_count()],
    };
    state.extend(0, &mut visit);
}

/// Orders pattern vertices so that later vertices are anchored to earlier
/// ones. Components start at their highest-degree vertex.
fn search_order(pattern: &MolGraph) -> Vec<(usize, Option<usize>)> {
    let n = pattern.vertex_count();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let root = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (pattern.degree(v), std::cmp::Reverse(v)))
            .unwrap();
        placed[root] = true;
        order.push((root, None));
        let mut i = order.len() - 1;
        while i < order.len() {
            let v = order[i].0;
            i += 1;
            for &(w, _) in pattern.neighbours(v) {
                if !placed[w] {
                    placed[w] = true;
                    order.push((w, Some(v)));
                }
            }
        }
    }
    order
}

struct Search<'a> {
    pattern: &'a MolGraph,
    host: &'a MolGraph,
    order: &'a [(usize, Option<usize>)],
    map: Vec<usize>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn extend<F: FnMut(Embedding) -> bool>(&mut self, depth: usize, visit: &mut F) -> bool {
        if depth == self.order.len() {
            return visit(self.finish());
        }
        let (p, anchor) = self.order[depth];
        match anchor {
            Some(a) => {
                let ha = self.map[a];
                let candidates: Vec<usize> =
                    self.host.neighbours(ha).iter().map(|&(h, _)| h).collect();
                for h in candidates {
                    if self.feasible(p, h) && !self.descend(p, h, depth, visit) {
                        return false;
                    }
                }
            }
            None => {
                for h in 0..self.host.vertex_count() {
                    if self.feasible(p, h) && !self.descend(p, h, depth, visit) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn descend<F: FnMut(Embedding) -> bool>(
        &mut self,
        p: usize,
        h: usize,
        depth: usize,
        visit: &mut F,
    ) -> bool {
        self.map[p] = h;
        self.used[h] = true;
        let go_on = self.extend(depth + 1, visit);
        self.used[h] = false;
        self.map[p] = usize::MAX;
        go_on
    }

    fn feasible(&self, p: usize, h: usize) -> bool {
        if self.used[h]
            || self.pattern.label(p) != self.host.label(h)
            || self.pattern.degree(p) > self.host.degree(h)
        {
            return false;
        }
        self.pattern.neighbours(p).iter().all(|&(q, e)| {
            let hq = self.map[q];
            if hq == usize::MAX {
                return true;
            }
            match self.host.edge_between(h, hq) {
                Some(he) => self.host.edge(he).label == self.pattern.edge(e).label,
                None => false,
            }
        })
    }

    fn finish(&self) -> Embedding {
        let edge_map = self
            .pattern
            .edges()
            .iter()
            .map(|e| {
                self.host
                    .edge_between(self.map[e.source], self.map[e.target])
                    .expect("feasibility checked every pattern edge")
            })
            .collect();
        Embedding {
            vertex_map: self.map.clone(),
            edge_map,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemistry::molecules;

    fn carbonyl() -> MolGraph {
        MolGraph::from_parts(&["C", "O"], &[(0, 1, "=")]).unwrap()
    }

    #[test]
    fn carbonyl_in_small_molecules() {
        assert_eq!(enumerate_embeddings(&carbonyl(), &molecules::formaldehyde()).len(), 1);
        assert_eq!(enumerate_embeddings(&carbonyl(), &molecules::glycolaldehyde()).len(), 1);
        assert!(enumerate_embeddings(&carbonyl(), &molecules::ethenediol()).is_empty());
    }

    #[test]
    fn single_hydrogen_and_flip() {
        let h = MolGraph::from_parts(&["H"], &[]).unwrap();
        assert_eq!(enumerate_embeddings(&h, &molecules::formaldehyde()).len(), 2);
        let cc = MolGraph::from_parts(&["C", "C"], &[(0, 1, "-")]).unwrap();
        let found = enumerate_embeddings(&cc, &cc);
        assert_eq!(found.len(), 2);
        assert_eq!(found[0].vertex_map, vec![0, 1]);
        assert_eq!(found[1].vertex_map, vec![1, 0]);
    }

    #[test]
    fn larger_pattern_finds_nothing() {
        assert!(enumerate_embeddings(&molecules::glycolaldehyde(), &molecules::formaldehyde())
            .is_empty());
    }

    #[test]
    fn component_variant_requires_connectivity() {
        let mut two = carbonyl();
        two.extend_disjoint(&carbonyl());
        assert_eq!(
            enumerate_component_embeddings(&two, &molecules::formaldehyde()),
            Err(NotConnected::Pattern)
        );
        assert_eq!(
            enumerate_component_embeddings(&carbonyl(), &two),
            Err(NotConnected::Host)
        );
    }

    #[test]
    fn non_induced_semantics() {
        // a path pattern still matches inside a triangle
        let path = MolGraph::from_parts(&["C", "C", "C"], &[(0, 1, "-"), (1, 2, "-")]).unwrap();
        let triangle =
            MolGraph::from_parts(&["C", "C", "C"], &[(0, 1, "-"), (1, 2, "-"), (0, 2, "-")])
                .unwrap();
        let found = enumerate_embeddings(&path, &triangle);
        assert_eq!(found.len(), 6);
        assert!(found.iter().all(|e| e.is_valid(&path, &triangle)));
    }
}
