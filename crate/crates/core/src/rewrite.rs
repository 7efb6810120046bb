//! Applying rules to multisets of molecules.

use std::collections::BTreeMap;

use crate::error::RewriteError;
use crate::graph::{ComponentMultiset, Label, MolGraph};
use crate::morphism::{enumerate_embeddings, Embedding};
use crate::rule::Rule;

pub use crate::rule::Violation;

pub fn validate_rule(r: &Rule) -> Result<(), Vec<Violation>> {
    r.validate()
}

/// One direct derivation `G =(p,m)=> H`.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub rule: Rule,
    pub inputs: ComponentMultiset,
    /// Embedding of the rule's left graph (as returned by
    /// [`Rule::left_graph`]) into the disjoint union of the inputs.
    pub matching: Embedding,
    pub outputs: ComponentMultiset,
    /// For every vertex of the input union: its `(output component,
    /// vertex)` or `None` when the rule deleted it.
    pub atom_map: Vec<Option<(usize, usize)>>,
    input_offsets: Vec<usize>,
}

impl Derivation {
    /// Input components that the match touches.
    pub fn touched_inputs(&self) -> Vec<bool> {
        let mut touched = vec![false; self.inputs.count()];
        for &h in &self.matching.vertex_map {
            touched[component_of(&self.input_offsets, h)] = true;
        }
        touched
    }
}

fn component_of(offsets: &[usize], v: usize) -> usize {
    offsets.partition_point(|&o| o <= v) - 1
}

/// All embeddings of the left graph into the disjoint union of `hosts`.
/// Each left component necessarily lands inside one host component.
pub fn find_matches(r: &Rule, hosts: &ComponentMultiset) -> Vec<Embedding> {
    let left = r.left_graph();
    let (union, _) = hosts.union();
    enumerate_embeddings(&left.graph, &union)
}

/// False when the rule would create an edge between two matched vertices
/// that are already adjacent in the host.
pub fn check_gluing(r: &Rule, m: &Embedding, hosts: &ComponentMultiset) -> bool {
    let (union, _) = hosts.union();
    gluing_conflict(r, m, &union).is_none()
}

fn gluing_conflict(r: &Rule, m: &Embedding, host: &MolGraph) -> Option<(usize, usize)> {
    let left = r.left_graph();
    let index = left.vertex_index(r.vertices().len());
    r.edges()
        .iter()
        .filter(|e| e.left.is_none() && e.right.is_some())
        .find_map(|e| {
            let a = m.vertex_map[index[e.source]?];
            let b = m.vertex_map[index[e.target]?];
            host.edge_between(a, b).map(|_| (a, b))
        })
}

pub fn apply_at(r: &Rule, hosts: &ComponentMultiset, m: &Embedding) -> Result<Derivation, RewriteError> {
    r.validate()
        .map_err(|v| RewriteError::InvalidRule(v[0].to_string()))?;
    let left = r.left_graph();
    let (union, offsets) = hosts.union();
    if !m.is_valid(&left.graph, &union) {
        return Err(RewriteError::InvalidMatch(r.name().to_string()));
    }
    if let Some((a, b)) = gluing_conflict(r, m, &union) {
        return Err(RewriteError::Gluing(a, b));
    }

    let index = left.vertex_index(r.vertices().len());
    let mut labels: Vec<Option<Label>> = union.labels().iter().cloned().map(Some).collect();
    let mut edges: BTreeMap<(usize, usize), Label> = union
        .edges()
        .iter()
        .map(|e| ((e.source, e.target), e.label.clone()))
        .collect();

    // host vertex of every rule vertex, created ones appended
    let mut image = vec![usize::MAX; r.vertices().len()];
    for (i, v) in r.vertices().iter().enumerate() {
        match (index[i], &v.right) {
            (Some(li), right) => {
                let h = m.vertex_map[li];
                image[i] = h;
                labels[h] = right.clone();
            }
            (None, right) => {
                labels.push(right.clone());
                image[i] = labels.len() - 1;
            }
        }
    }
    for e in r.edges() {
        let (a, b) = (image[e.source], image[e.target]);
        let key = (a.min(b), a.max(b));
        match &e.right {
            Some(l) => {
                edges.insert(key, l.clone());
            }
            None => {
                edges.remove(&key);
            }
        }
    }
    for &(a, b) in edges.keys() {
        for v in [a, b] {
            if labels[v].is_none() {
                return Err(RewriteError::DanglingEdge(v));
            }
        }
    }

    let mut position = vec![usize::MAX; labels.len()];
    let mut result = MolGraph::new();
    for (v, l) in labels.iter().enumerate() {
        if let Some(l) = l {
            position[v] = result.add_vertex(l.clone());
        }
    }
    for (&(a, b), l) in &edges {
        result
            .add_edge(position[a], position[b], l.clone())
            .expect("rewritten host stays simple");
    }

    let split = result.components_with_vertices();
    let mut location = vec![(0, 0); result.vertex_count()];
    for (c, (_, vs)) in split.iter().enumerate() {
        for (i, &v) in vs.iter().enumerate() {
            location[v] = (c, i);
        }
    }
    let atom_map = (0..union.vertex_count())
        .map(|v| (position[v] != usize::MAX).then(|| location[position[v]]))
        .collect();
    let outputs = ComponentMultiset::new(split.into_iter().map(|(g, _)| g).collect())
        .expect("components are connected");

    Ok(Derivation {
        rule: r.clone(),
        inputs: hosts.clone(),
        matching: m.clone(),
        outputs,
        atom_map,
        input_offsets: offsets,
    })
}

/// A derivation is proper when no input component is both untouched by the
/// match and isomorphic to some output component.
pub fn is_proper(d: &Derivation) -> bool {
    let touched = d.touched_inputs();
    let output_codes = d.outputs.codes();
    d.inputs
        .components()
        .iter()
        .zip(touched)
        .all(|(g, t)| t || output_codes.binary_search(&g.canonical_code()).is_err())
}

/// All gluing-valid derivations of `r` on `hosts`, in match order.
pub fn derivations(r: &Rule, hosts: &ComponentMultiset) -> Vec<Derivation> {
    find_matches(r, hosts)
        .iter()
        .filter_map(|m| apply_at(r, hosts, m).ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemistry::{formose_ruleset, molecules};
    use crate::rule::{RuleEdge, RuleVertex};

    fn single(g: MolGraph) -> ComponentMultiset {
        ComponentMultiset::new(vec![g]).unwrap()
    }

    #[test]
    fn p0_on_glycolaldehyde_has_two_matches() {
        let rs = formose_ruleset();
        let p0 = rs.rule("p0").unwrap();
        let hosts = single(molecules::glycolaldehyde());
        let matches = find_matches(p0, &hosts);
        assert_eq!(matches.len(), 2);
        let products: Vec<_> = matches
            .iter()
            .map(|m| apply_at(p0, &hosts, m).unwrap().outputs)
            .collect();
        assert!(products[0].is_isomorphic(&products[1]));
        assert!(products[0].is_isomorphic(&single(molecules::ethenediol())));
        assert!(find_matches(p0, &single(molecules::formaldehyde())).is_empty());
    }

    #[test]
    fn p1_turns_ethenediol_into_glycolaldehyde() {
        let rs = formose_ruleset();
        let p1 = rs.rule("p1").unwrap();
        let hosts = single(molecules::ethenediol());
        for d in derivations(p1, &hosts) {
            assert!(d.outputs.is_isomorphic(&single(molecules::glycolaldehyde())));
            assert!(is_proper(&d));
            assert_eq!(d.inputs.label_counts(), d.outputs.label_counts());
        }
    }

    #[test]
    fn aldol_addition_builds_glyceraldehyde() {
        let rs = formose_ruleset();
        let p2 = rs.rule("p2").unwrap();
        let hosts =
            ComponentMultiset::new(vec![molecules::ethenediol(), molecules::formaldehyde()])
                .unwrap();
        let ds: Vec<_> = derivations(p2, &hosts)
            .into_iter()
            .filter(|d| d.touched_inputs().iter().all(|&t| t))
            .collect();
        assert!(!ds.is_empty());
        for d in &ds {
            assert!(d.outputs.is_isomorphic(&single(molecules::glyceraldehyde())));
        }
    }

    #[test]
    fn spectator_makes_derivation_improper() {
        let rs = formose_ruleset();
        let p1 = rs.rule("p1").unwrap();
        let hosts =
            ComponentMultiset::new(vec![molecules::ethenediol(), molecules::formaldehyde()])
                .unwrap();
        let d = derivations(p1, &hosts).remove(0);
        assert!(!is_proper(&d));
    }

    #[test]
    fn gluing_violation_is_rejected() {
        // rule creates C-C between two context carbons
        let rule = Rule::new(
            "bond",
            vec![RuleVertex::context("C"), RuleVertex::context("C")],
            vec![RuleEdge::new(0, 1, None, Some("-"))],
        )
        .unwrap();
        let host = single(MolGraph::from_parts(&["C", "C"], &[(0, 1, "-")]).unwrap());
        let m = &find_matches(&rule, &host)[0];
        assert!(!check_gluing(&rule, m, &host));
        assert_eq!(apply_at(&rule, &host, m).unwrap_err(), RewriteError::Gluing(0, 1));
    }

    #[test]
    fn pure_context_always_glues() {
        let rule = Rule::identity("id", &molecules::formaldehyde());
        let host = single(molecules::formaldehyde());
        for m in find_matches(&rule, &host) {
            assert!(check_gluing(&rule, &m, &host));
            let d = apply_at(&rule, &host, &m).unwrap();
            assert!(d.outputs.is_isomorphic(&host));
        }
    }

    #[test]
    fn deleting_a_vertex_with_foreign_edges_fails() {
        let rule = Rule::destroying("kill-o", &MolGraph::from_parts(&["O"], &[]).unwrap());
        let host = single(molecules::formaldehyde());
        let m = &find_matches(&rule, &host)[0];
        assert!(matches!(
            apply_at(&rule, &host, m),
            Err(RewriteError::DanglingEdge(_))
        ));
    }

    #[test]
    fn atom_map_tracks_vertices() {
        let rs = formose_ruleset();
        let p0 = rs.rule("p0").unwrap();
        let hosts = single(molecules::glycolaldehyde());
        let d = derivations(p0, &hosts).remove(0);
        let g = &d.inputs.components()[0];
        for (v, slot) in d.atom_map.iter().enumerate() {
            let (c, w) = slot.expect("chemical rules keep atoms");
            assert_eq!(g.label(v), d.outputs.components()[c].label(w));
        }
    }
}
