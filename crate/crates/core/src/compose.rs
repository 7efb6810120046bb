//! Rule composition.
//!
//! `p2 ∘_μ p1` glues the left graph of `p2` onto the right graph of `p1`
//! along a partial matching μ. Every connected component of `L2` is either
//! embedded wholly inside one component of `R1` or left unmatched, in which
//! case it becomes an extra component of the composite's left graph.
//!
//! The matchings are enumerated from a match matrix: rows are the
//! components of `L2`, columns the components of `R1` plus one virtual
//! column meaning "unmatched". A selection picks one entry per row.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::canon::CanonicalCode;
use crate::error::Rejection;
use crate::graph::{Label, MolGraph};
use crate::morphism::{enumerate_embeddings, Embedding};
use crate::rule::{Rule, RuleEdge, RuleVertex};

/// Rules deduplicated up to isomorphism, ordered by canonical code.
pub type RuleSet = BTreeMap<CanonicalCode, Rule>;

/// One embedding of an `L2` component into an `R1` component, expressed on
/// rule elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentMatch {
    /// Embedding of the row component graph into the column component graph.
    pub embedding: Embedding,
    /// (p1 rule vertex, p2 rule vertex)
    pub vertex_pairs: Vec<(usize, usize)>,
    /// (p1 rule edge, p2 rule edge)
    pub edge_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct MatchMatrix {
    /// Components of `L2`, as sorted p2 rule vertices.
    pub rows: Vec<Vec<usize>>,
    /// Components of `R1`, as sorted p1 rule vertices.
    pub columns: Vec<Vec<usize>>,
    /// `cells[row][column]`; the virtual column is implicit.
    pub cells: Vec<Vec<Vec<ComponentMatch>>>,
}

impl MatchMatrix {
    /// Embedding counts per cell, without the virtual column.
    pub fn counts(&self) -> Vec<Vec<usize>> {
        self.cells
            .iter()
            .map(|row| row.iter().map(Vec::len).collect())
            .collect()
    }

    /// Counts with the virtual column appended (always 1).
    pub fn extended_counts(&self) -> Vec<Vec<usize>> {
        self.counts()
            .into_iter()
            .map(|mut row| {
                row.push(1);
                row
            })
            .collect()
    }

    /// Number of selections of one entry per row, including the all-virtual
    /// one and overlapping ones.
    pub fn raw_selection_count(&self) -> usize {
        self.extended_counts()
            .iter()
            .map(|row| row.iter().sum::<usize>())
            .product()
    }

    fn cell(&self, row: usize, selection: Selection) -> Option<&ComponentMatch> {
        match selection {
            Selection::Unmatched => None,
            Selection::Match { column, index } => Some(&self.cells[row][column][index]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Selection {
    Match { column: usize, index: usize },
    /// The virtual column.
    Unmatched,
}

/// μ: a component-respecting one-to-one relation between elements of `R1`
/// and `L2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMatching {
    pub selections: Vec<Selection>,
    /// (p1 rule vertex, p2 rule vertex)
    pub vertex_pairs: Vec<(usize, usize)>,
    /// (p1 rule edge, p2 rule edge)
    pub edge_pairs: Vec<(usize, usize)>,
}

impl PartialMatching {
    pub fn is_full(&self) -> bool {
        self.selections.iter().all(|s| *s != Selection::Unmatched)
    }
}

fn edge_lookup(r: &Rule) -> HashMap<(usize, usize), usize> {
    r.edges()
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.source, e.target), i))
        .collect()
}

fn pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Components of one side of a rule as (graph, rule vertices).
fn side_components(side: &crate::rule::SideGraph) -> Vec<(MolGraph, Vec<usize>)> {
    side.graph
        .components_with_vertices()
        .into_iter()
        .map(|(g, vs)| (g, vs.into_iter().map(|v| side.vertices[v]).collect()))
        .collect()
}

pub fn build_match_matrix(p1: &Rule, p2: &Rule) -> MatchMatrix {
    let rows = side_components(&p2.left_graph());
    let columns = side_components(&p1.right_graph());
    let edges1 = edge_lookup(p1);
    let edges2 = edge_lookup(p2);

    let cells = rows
        .iter()
        .map(|(row_graph, row_vertices)| {
            columns
                .iter()
                .map(|(col_graph, col_vertices)| {
                    enumerate_embeddings(row_graph, col_graph)
                        .into_iter()
                        .map(|embedding| {
                            let vertex_pairs: Vec<(usize, usize)> = embedding
                                .vertex_map
                                .iter()
                                .enumerate()
                                .map(|(p, &h)| (col_vertices[h], row_vertices[p]))
                                .collect();
                            let edge_pairs = row_graph
                                .edges()
                                .iter()
                                .map(|e| {
                                    let (a1, a2) = vertex_pairs[e.source];
                                    let (b1, b2) = vertex_pairs[e.target];
                                    (edges1[&pair(a1, b1)], edges2[&pair(a2, b2)])
                                })
                                .collect();
                            ComponentMatch { embedding, vertex_pairs, edge_pairs }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    MatchMatrix {
        rows: rows.into_iter().map(|(_, vs)| vs).collect(),
        columns: columns.into_iter().map(|(_, vs)| vs).collect(),
        cells,
    }
}

/// Options of one row: every real entry in column order, then the virtual
/// column.
fn row_options(mm: &MatchMatrix, row: usize) -> Vec<Selection> {
    let mut options = Vec::new();
    for (column, cell) in mm.cells[row].iter().enumerate() {
        for index in 0..cell.len() {
            options.push(Selection::Match { column, index });
        }
    }
    options.push(Selection::Unmatched);
    options
}

/// Every selection with at least one real entry whose entries sharing a
/// column are vertex-disjoint. The first row varies fastest.
pub fn enumerate_matchings(mm: &MatchMatrix) -> Vec<PartialMatching> {
    enumerate_selections(mm)
        .into_iter()
        .filter_map(|s| matching_from_selection(mm, &s).ok())
        .collect()
}

/// Raw selections in enumeration order, minus the all-virtual one.
pub fn enumerate_selections(mm: &MatchMatrix) -> Vec<Vec<Selection>> {
    let options: Vec<Vec<Selection>> = (0..mm.rows.len()).map(|r| row_options(mm, r)).collect();
    if options.is_empty() {
        return Vec::new();
    }
    let mut counters = vec![0usize; options.len()];
    let mut out = Vec::new();
    loop {
        let selection: Vec<Selection> = counters
            .iter()
            .zip(&options)
            .map(|(&c, opts)| opts[c])
            .collect();
        if selection.iter().any(|s| *s != Selection::Unmatched) {
            out.push(selection);
        }
        // mixed-radix increment, row 0 least significant
        let mut r = 0;
        loop {
            if r == counters.len() {
                return out;
            }
            counters[r] += 1;
            if counters[r] < options[r].len() {
                break;
            }
            counters[r] = 0;
            r += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidSelection {
    AllUnmatched,
    Overlap { column: usize },
}

/// Builds μ from one selection, checking the selection invariants.
pub fn matching_from_selection(
    mm: &MatchMatrix,
    selections: &[Selection],
) -> Result<PartialMatching, InvalidSelection> {
    if selections.iter().all(|s| *s == Selection::Unmatched) {
        return Err(InvalidSelection::AllUnmatched);
    }
    let mut owner: HashMap<usize, usize> = HashMap::new();
    let mut vertex_pairs = Vec::new();
    let mut edge_pairs = Vec::new();
    for (row, &s) in selections.iter().enumerate() {
        let Some(cm) = mm.cell(row, s) else { continue };
        for &(v1, v2) in &cm.vertex_pairs {
            if owner.insert(v1, v2).is_some() {
                let Selection::Match { column, .. } = s else { unreachable!() };
                return Err(InvalidSelection::Overlap { column });
            }
            vertex_pairs.push((v1, v2));
        }
        edge_pairs.extend_from_slice(&cm.edge_pairs);
    }
    vertex_pairs.sort_unstable();
    edge_pairs.sort_unstable();
    Ok(PartialMatching {
        selections: selections.to_vec(),
        vertex_pairs,
        edge_pairs,
    })
}

/// Name given to `p2 ∘ p1`.
pub fn composite_name(p1: &Rule, p2: &Rule) -> String {
    format!("{} ∘ {}", p2.name(), p1.name())
}

/// Builds `p2 ∘_μ p1`.
///
/// Every element keeps its left label from `p1` and takes its right label
/// from `p2` where μ relates it to an `L2` element. Elements created by
/// `p1` and deleted by `p2` disappear.
pub fn compose(p1: &Rule, p2: &Rule, mu: &PartialMatching) -> Result<Rule, Rejection> {
    let mut vertices: Vec<RuleVertex> = p1.vertices().to_vec();
    let mut edges: Vec<RuleEdge> = p1.edges().to_vec();

    let mut image2 = vec![usize::MAX; p2.vertices().len()];
    for &(v1, v2) in &mu.vertex_pairs {
        if p1.vertices()[v1].right != p2.vertices()[v2].left {
            return Err(Rejection::LabelMismatch);
        }
        image2[v2] = v1;
        vertices[v1].right = p2.vertices()[v2].right.clone();
    }
    for (v2, slot) in image2.iter_mut().enumerate() {
        if *slot == usize::MAX {
            *slot = vertices.len();
            vertices.push(p2.vertices()[v2].clone());
        }
    }

    let mut matched2 = vec![false; p2.edges().len()];
    for &(e1, e2) in &mu.edge_pairs {
        if p1.edges()[e1].right != p2.edges()[e2].left {
            return Err(Rejection::LabelMismatch);
        }
        matched2[e2] = true;
        edges[e1].right = p2.edges()[e2].right.clone();
    }

    let mut lookup: HashMap<(usize, usize), usize> = edges
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.source, e.target), i))
        .collect();
    for (e2, f) in p2.edges().iter().enumerate() {
        if matched2[e2] {
            continue;
        }
        let (a, b) = pair(image2[f.source], image2[f.target]);
        match lookup.get(&(a, b)) {
            None => {
                lookup.insert((a, b), edges.len());
                edges.push(RuleEdge { source: a, target: b, left: f.left.clone(), right: f.right.clone() });
            }
            Some(&i) => {
                // only an edge that p1 deleted may be recreated by p2
                let existing = &mut edges[i];
                if existing.right.is_some() || f.left.is_some() {
                    return Err(Rejection::ParallelEdge(a, b));
                }
                existing.right = f.right.clone();
            }
        }
    }

    let alive = |v: &RuleVertex| v.left.is_some() || v.right.is_some();
    edges.retain(|e| e.left.is_some() || e.right.is_some());
    for e in &edges {
        for v in [e.source, e.target] {
            if !alive(&vertices[v]) {
                return Err(Rejection::DanglingEdge(v));
            }
        }
        let has = |v: usize, pick: fn(&RuleVertex) -> &Option<Label>| pick(&vertices[v]).is_some();
        if e.right.is_some() && !(has(e.source, |x| &x.right) && has(e.target, |x| &x.right)) {
            let v = if has(e.source, |x| &x.right) { e.target } else { e.source };
            return Err(Rejection::DanglingEdge(v));
        }
    }

    let mut position = vec![usize::MAX; vertices.len()];
    let mut kept = Vec::new();
    for (i, v) in vertices.into_iter().enumerate() {
        if alive(&v) {
            position[i] = kept.len();
            kept.push(v);
        }
    }
    let edges = edges
        .into_iter()
        .map(|e| RuleEdge {
            source: position[e.source],
            target: position[e.target],
            left: e.left,
            right: e.right,
        })
        .collect();
    let rule = Rule::from_parts(composite_name(p1, p2), kept, edges);
    debug_assert!(rule.validate().is_ok() || rule.vertices().is_empty());
    Ok(rule)
}

/// Every composite `p2 ∘_μ p1`, deduplicated by canonical code.
pub fn compose_all(p1: &Rule, p2: &Rule) -> RuleSet {
    let mut out = RuleSet::new();
    for r in compose_all_list(p1, p2) {
        out.entry(r.canonical_code()).or_insert(r);
    }
    out
}

/// Every non-empty composite `p2 ∘_μ p1`, one per accepted matching, in
/// matching order.
pub fn compose_all_list(p1: &Rule, p2: &Rule) -> Vec<Rule> {
    let mm = build_match_matrix(p1, p2);
    enumerate_matchings(&mm)
        .iter()
        .filter_map(|mu| compose(p1, p2, mu).ok())
        .filter(|r| !r.vertices().is_empty())
        .collect()
}

/// Partial application of `p` to the graph `g`: `p ∘ (∅, ∅, g)`.
pub fn bind(g: &MolGraph, p: &Rule) -> RuleSet {
    compose_all(&binding_rule(g), p)
}

/// The rule `(∅, ∅, g)`.
pub fn binding_rule(g: &MolGraph) -> Rule {
    Rule::creating(format!("bind {}", g.formula()), g)
}

/// The rule `(g, ∅, ∅)`.
pub fn unbind(g: &MolGraph) -> Rule {
    Rule::destroying(format!("unbind {}", g.formula()), g)
}

/// Extends every rule of `current` by `next`, in parallel; the result does
/// not depend on the thread count.
pub fn compose_step(current: &RuleSet, next: &Rule) -> RuleSet {
    let parts: Vec<RuleSet> = current
        .par_iter()
        .map(|(_, r)| compose_all(r, next))
        .collect();
    let mut out = RuleSet::new();
    for part in parts {
        for (code, r) in part {
            out.entry(code).or_insert(r);
        }
    }
    out
}

/// Folds `rules`, written outermost first (`pk ∘ … ∘ p1`), from the
/// innermost rule outwards, branching over every composite at each step.
pub fn compose_sequence(rules: &[Rule]) -> RuleSet {
    let mut iter = rules.iter().rev();
    let Some(first) = iter.next() else {
        return RuleSet::new();
    };
    let mut current = RuleSet::new();
    current.insert(first.canonical_code(), first.clone());
    for r in iter {
        if current.is_empty() {
            break;
        }
        current = compose_step(&current, r);
    }
    current
}

/// Like [`compose_sequence`] but returns every level (level 0 holds the
/// innermost rule), each composite remembering the code of one parent.
pub fn compose_sequence_traced(rules: &[Rule]) -> Vec<BTreeMap<CanonicalCode, (Rule, Option<CanonicalCode>)>> {
    let mut levels = Vec::new();
    let mut iter = rules.iter().rev();
    let Some(first) = iter.next() else {
        return levels;
    };
    let mut level = BTreeMap::new();
    level.insert(first.canonical_code(), (first.clone(), None));
    levels.push(level);
    for r in iter {
        let prev = levels.last().unwrap();
        let parts: Vec<(CanonicalCode, RuleSet)> = prev
            .par_iter()
            .map(|(code, (p, _))| (code.clone(), compose_all(p, r)))
            .collect();
        let mut next = BTreeMap::new();
        for (parent, part) in parts {
            for (code, rule) in part {
                next.entry(code).or_insert((rule, Some(parent.clone())));
            }
        }
        let empty = next.is_empty();
        levels.push(next);
        if empty {
            break;
        }
    }
    levels
}

/// Orders (given innermost first, as indices into `rules`) for which the
/// fold is non-empty. Rules with equal canonical codes are interchangeable;
/// each distinct order is reported once using the lowest free indices.
/// Prefixes whose fold is already empty are pruned.
pub fn find_orders(rules: &[Rule]) -> Vec<Vec<usize>> {
    let codes: Vec<CanonicalCode> = rules.iter().map(|r| r.canonical_code()).collect();
    let mut out = Vec::new();
    let mut used = vec![false; rules.len()];
    let mut prefix = Vec::new();
    order_search(rules, &codes, &mut used, &mut prefix, None, &mut out);
    out
}

fn order_search(
    rules: &[Rule],
    codes: &[CanonicalCode],
    used: &mut [bool],
    prefix: &mut Vec<usize>,
    state: Option<&RuleSet>,
    out: &mut Vec<Vec<usize>>,
) {
    if prefix.len() == rules.len() {
        out.push(prefix.clone());
        return;
    }
    for i in 0..rules.len() {
        if used[i] {
            continue;
        }
        // one representative per group of identical rules
        if (0..i).any(|j| !used[j] && codes[j] == codes[i]) {
            continue;
        }
        let next = match state {
            None => {
                let mut s = RuleSet::new();
                s.insert(codes[i].clone(), rules[i].clone());
                s
            }
            Some(s) => compose_step(s, &rules[i]),
        };
        if next.is_empty() {
            continue;
        }
        used[i] = true;
        prefix.push(i);
        order_search(rules, codes, used, prefix, Some(&next), out);
        prefix.pop();
        used[i] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemistry::{formose_ruleset, molecules};

    #[test]
    fn all_virtual_matrix_has_no_matchings() {
        let rs = formose_ruleset();
        // R(p0) holds an enol; L(p0) needs a carbonyl
        let p0 = rs.rule("p0").unwrap();
        let mm = build_match_matrix(p0, p0);
        assert!(mm.counts().iter().flatten().all(|&c| c == 0));
        assert!(enumerate_matchings(&mm).is_empty());
        assert!(compose_all(p0, p0).is_empty());
    }

    #[test]
    fn single_entry_matrix_gives_one_matching() {
        let g = MolGraph::from_parts(&["C", "O"], &[(0, 1, "=")]).unwrap();
        let creator = Rule::creating("make", &g);
        let keeper = Rule::identity("keep", &g);
        let mm = build_match_matrix(&creator, &keeper);
        assert_eq!(mm.extended_counts(), vec![vec![1, 1]]);
        assert_eq!(enumerate_matchings(&mm).len(), 1);
    }

    #[test]
    fn p1_after_p3_is_a_full_composition() {
        let rs = formose_ruleset();
        let (p1, p3) = (rs.rule("p1").unwrap(), rs.rule("p3").unwrap());
        let mm = build_match_matrix(p3, p1);
        assert_eq!(mm.counts(), vec![vec![1, 0]]);
        let mus = enumerate_matchings(&mm);
        assert_eq!(mus.len(), 1);
        assert!(mus[0].is_full());
        let composite = compose(p3, p1, &mus[0]).unwrap();
        assert_eq!(composite.validate(), Ok(()));
        // left is the aldol pattern of p3
        assert!(composite.left_graph().graph.is_isomorphic(&p3.left_graph().graph));
        // right: carbonyl fragment plus keto product
        let right = composite.right_graph().graph.connected_components();
        assert_eq!(right.count(), 2);
        let carbonyl = |g: &MolGraph| {
            g.edges().iter().filter(|e| e.label.as_str() == "=").count()
        };
        for c in right.components() {
            assert_eq!(carbonyl(c), 1);
            let double = c.edges().iter().find(|e| e.label.as_str() == "=").unwrap();
            let ends = [c.label(double.source).as_str(), c.label(double.target).as_str()];
            assert!(ends.contains(&"O"), "keto form expected, found {ends:?}");
        }
    }

    #[test]
    fn matched_labels_chain_through() {
        let rs = formose_ruleset();
        let (p1, p3) = (rs.rule("p1").unwrap(), rs.rule("p3").unwrap());
        let mm = build_match_matrix(p3, p1);
        let mu = &enumerate_matchings(&mm)[0];
        let composite = compose(p3, p1, mu).unwrap();
        // p3's vertices keep their indices in the composite
        for &(e1, e2) in &mu.edge_pairs {
            let (left, right) = (&p3.edges()[e1].left, &p1.edges()[e2].right);
            let ends = (p3.edges()[e1].source, p3.edges()[e1].target);
            match composite.edges().iter().find(|e| (e.source, e.target) == ends) {
                Some(c) => {
                    assert_eq!(&c.left, left);
                    assert_eq!(&c.right, right);
                }
                // created by p3 and deleted by p1
                None => assert!(left.is_none() && right.is_none()),
            }
        }
    }

    #[test]
    fn binding_formaldehyde_to_p0_is_empty() {
        let rs = formose_ruleset();
        assert!(bind(&molecules::formaldehyde(), rs.rule("p0").unwrap()).is_empty());
    }

    #[test]
    fn binding_glycolaldehyde_to_p0_gives_ethenediol() {
        let rs = formose_ruleset();
        let bound = bind(&molecules::glycolaldehyde(), rs.rule("p0").unwrap());
        assert_eq!(bound.len(), 1);
        let r = bound.values().next().unwrap();
        assert!(r.left_graph().graph.is_empty());
        assert!(r.right_graph().graph.is_isomorphic(&molecules::ethenediol()));
    }

    #[test]
    fn binding_keeps_unmatched_enol_pattern() {
        let rs = formose_ruleset();
        let p2 = rs.rule("p2").unwrap();
        let bound = bind(&molecules::glycolaldehyde(), p2);
        assert!(!bound.is_empty());
        // component 0 of L(p2) is the enol (it holds vertex 0)
        let enol = &p2.left_graph().graph.connected_components().components()[0]
            .clone();
        for r in bound.values() {
            let left = r.left_graph().graph.connected_components();
            assert_eq!(left.count(), 1);
            assert!(left.components()[0].is_isomorphic(enol));
        }
    }

    #[test]
    fn unbind_removes_created_component() {
        let w = molecules::water();
        let created = Rule::creating("make water", &w);
        let composites = compose_all(&created, &unbind(&w));
        // creating then destroying the same molecule leaves nothing
        assert!(composites.is_empty());
        let both = {
            let mut g = w.clone();
            g.extend_disjoint(&molecules::formaldehyde());
            Rule::creating("make both", &g)
        };
        let composites = compose_all(&both, &unbind(&w));
        assert_eq!(composites.len(), 1);
        let r = composites.values().next().unwrap();
        assert!(r.right_graph().graph.is_isomorphic(&molecules::formaldehyde()));
    }

    #[test]
    fn parallel_edge_creation_is_rejected() {
        // p1 creates C-C; p2 takes two separate carbons and bonds them
        let make = Rule::new(
            "make",
            vec![RuleVertex::context("C"), RuleVertex::context("C")],
            vec![RuleEdge::new(0, 1, None, Some("-"))],
        )
        .unwrap();
        let again = make.clone().with_name("again");
        let mm = build_match_matrix(&make, &again);
        assert_eq!(mm.counts(), vec![vec![2], vec![2]]);
        let outcomes: Vec<_> = enumerate_matchings(&mm)
            .iter()
            .map(|mu| compose(&make, &again, mu))
            .collect();
        // both carbons matched onto the bonded pair: the bond would be doubled
        let rejected = outcomes
            .iter()
            .filter(|o| matches!(o, Err(Rejection::ParallelEdge(..))))
            .count();
        assert_eq!(rejected, 2);
        assert!(outcomes.iter().filter(|o| o.is_ok()).count() > 0);
    }

    #[test]
    fn singleton_sequence() {
        let rs = formose_ruleset();
        let p = rs.rule("p2").unwrap().clone();
        let set = compose_sequence(std::slice::from_ref(&p));
        assert_eq!(set.len(), 1);
        assert_eq!(set.keys().next().unwrap(), &p.canonical_code());
    }

    #[test]
    fn dead_sequence_is_empty() {
        let rs = formose_ruleset();
        let seq = [rs.rule("p0").unwrap().clone(), binding_rule(&molecules::formaldehyde())];
        assert!(compose_sequence(&seq).is_empty());
    }

    #[test]
    fn orders_of_single_and_incompatible_rules() {
        let rs = formose_ruleset();
        let p = rs.rule("p0").unwrap().clone();
        assert_eq!(find_orders(std::slice::from_ref(&p)), vec![vec![0]]);
        let a = Rule::creating("a", &MolGraph::from_parts(&["N"], &[]).unwrap());
        let b = Rule::identity("b", &MolGraph::from_parts(&["S"], &[]).unwrap());
        let c = Rule::identity("c", &MolGraph::from_parts(&["P"], &[]).unwrap());
        assert!(find_orders(&[b.clone(), c.clone()]).is_empty());
        assert!(find_orders(&[a, b]).is_empty());
    }
}
