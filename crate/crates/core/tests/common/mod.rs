#![allow(dead_code)]

use std::collections::BTreeSet;

use dpoc::chemistry::molecules;
use dpoc::compose;
use dpoc::rewrite::{apply_at, derivations, Derivation};
use dpoc::{ComponentMultiset, Embedding, MolGraph, Rule, RuleEdge, RuleVertex};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

/// Every injective label-preserving vertex map that also preserves edges
/// and their labels, found by trying all of them.
pub fn brute_force_embeddings(pattern: &MolGraph, host: &MolGraph) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    let mut map = Vec::new();
    let mut used = vec![false; host.vertex_count()];
    fn rec(p: &MolGraph, h: &MolGraph, map: &mut Vec<usize>, used: &mut [bool], out: &mut BTreeSet<Vec<usize>>) {
        if map.len() == p.vertex_count() {
            let ok = p.edges().iter().all(|e| {
                h.edge_between(map[e.source], map[e.target])
                    .is_some_and(|he| h.edge(he).label == e.label)
            });
            if ok {
                out.insert(map.clone());
            }
            return;
        }
        for v in 0..h.vertex_count() {
            if !used[v] {
                used[v] = true;
                map.push(v);
                rec(p, h, map, used, out);
                map.pop();
                used[v] = false;
            }
        }
    }
    rec(pattern, host, &mut map, &mut used, &mut out);
    out.retain(|m| m.iter().enumerate().all(|(p, &h)| pattern.label(p) == host.label(h)));
    out
}

/// Isomorphism by trying every bijection.
pub fn brute_force_isomorphic(a: &MolGraph, b: &MolGraph) -> bool {
    a.vertex_count() == b.vertex_count()
        && a.edge_count() == b.edge_count()
        && !brute_force_embeddings(a, b).is_empty()
}

pub fn random_graph(rng: &mut StdRng, max_vertices: usize) -> MolGraph {
    let n = rng.gen_range(1..=max_vertices);
    let mut g = MolGraph::new();
    for _ in 0..n {
        g.add_vertex(*["C", "O", "N"].choose(rng).unwrap());
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.35) {
                g.add_edge(a, b, *["-", "="].choose(rng).unwrap()).unwrap();
            }
        }
    }
    g
}

/// Built-in molecules with at most `max` vertices.
pub fn small_molecules(max: usize) -> Vec<MolGraph> {
    [molecules::formaldehyde(), molecules::glycolaldehyde(), molecules::ethenediol(), molecules::water()]
        .into_iter()
        .filter(|g| g.vertex_count() <= max)
        .collect()
}

/// A rule keeping all vertices of `subset` (host vertices of `host`) and
/// rewriting the bonds among them. Returns the rule and its match.
pub fn random_edge_rule(rng: &mut StdRng, name: &str, host: &MolGraph, subset: &[usize]) -> Option<(Rule, Embedding)> {
    let vertices: Vec<RuleVertex> = subset.iter().map(|&v| RuleVertex::context(host.label(v).clone())).collect();
    let mut edges = Vec::new();
    let mut changed = false;
    for i in 0..subset.len() {
        for j in i + 1..subset.len() {
            let (a, b) = (subset[i], subset[j]);
            match host.edge_between(a, b) {
                Some(e) => {
                    let l = host.edge(e).label.as_str().to_string();
                    match rng.gen_range(0..4) {
                        0 => {}
                        1 => edges.push(RuleEdge::new(i, j, Some(&l), Some(&l))),
                        2 => {
                            edges.push(RuleEdge::new(i, j, Some(&l), None));
                            changed = true;
                        }
                        _ => {
                            let other = if l == "-" { "=" } else { "-" };
                            edges.push(RuleEdge::new(i, j, Some(&l), Some(other)));
                            changed = true;
                        }
                    }
                }
                None => {
                    if rng.gen_bool(0.4) {
                        edges.push(RuleEdge::new(i, j, None, Some(["-", "="].choose(rng).unwrap())));
                        changed = true;
                    }
                }
            }
        }
    }
    if !changed {
        return None;
    }
    let rule = Rule::new(name, vertices, edges).ok()?;
    let left = rule.left_graph();
    let vertex_map: Vec<usize> = left.vertices.iter().map(|&rv| subset[rv]).collect();
    let edge_map = left
        .graph
        .edges()
        .iter()
        .map(|e| host.edge_between(vertex_map[e.source], vertex_map[e.target]))
        .collect::<Option<Vec<_>>>()?;
    Some((rule, Embedding { vertex_map, edge_map }))
}

pub struct Chain {
    pub start: ComponentMultiset,
    pub p1: Rule,
    pub p2: Rule,
    pub first: Derivation,
    pub second: Derivation,
}

/// Where the L2 components of the second step sit relative to the image
/// of R1 in the intermediate graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overlap {
    /// Every component is wholly inside or wholly outside R1, and at
    /// least one is inside.
    Disciplined,
    /// Some component straddles the boundary or uses a host bond that R1
    /// does not contain.
    Partial,
    /// No component touches R1.
    Independent,
}

pub fn classify(chain: &Chain) -> Overlap {
    let (_, mid_offsets) = chain.first.outputs.union();
    let to_mid = |v: usize| chain.first.atom_map[v].map(|(c, i)| mid_offsets[c] + i);
    let left1 = chain.p1.left_graph();
    let image: Vec<usize> = (0..chain.p1.vertices().len())
        .map(|rv| {
            let li = left1.vertex_index(chain.p1.vertices().len())[rv].unwrap();
            to_mid(chain.first.matching.vertex_map[li]).unwrap()
        })
        .collect();
    let r_vertices: BTreeSet<usize> = image.iter().copied().collect();
    let r_edges: BTreeSet<(usize, usize)> = chain
        .p1
        .edges()
        .iter()
        .filter(|e| e.right.is_some())
        .map(|e| {
            let (a, b) = (image[e.source], image[e.target]);
            (a.min(b), a.max(b))
        })
        .collect();

    let left2 = chain.p2.left_graph();
    let m2 = &chain.second.matching;
    let mut inside = 0;
    for (_, vs) in left2.graph.components_with_vertices() {
        let hits = vs.iter().filter(|&&v| r_vertices.contains(&m2.vertex_map[v])).count();
        if hits == 0 {
            continue;
        }
        if hits < vs.len() {
            return Overlap::Partial;
        }
        let set: BTreeSet<usize> = vs.iter().copied().collect();
        let edges_inside = left2.graph.edges().iter().filter(|e| set.contains(&e.source)).all(|e| {
            let (a, b) = (m2.vertex_map[e.source], m2.vertex_map[e.target]);
            r_edges.contains(&(a.min(b), a.max(b)))
        });
        if !edges_inside {
            return Overlap::Partial;
        }
        inside += 1;
    }
    if inside == 0 {
        Overlap::Independent
    } else {
        Overlap::Disciplined
    }
}

/// A random chain of two edge-rewriting derivations on a graph with at
/// most `max_vertices` vertices, or `None` when the draw is unusable.
pub fn random_chain(rng: &mut StdRng, max_vertices: usize) -> Option<Chain> {
    let g = random_graph(rng, max_vertices);
    let start = g.connected_components();
    let (union, _) = start.union();
    let n = union.vertex_count();
    if n < 2 {
        return None;
    }
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    let k = rng.gen_range(2..=n.min(4));
    let mut s1 = all[..k].to_vec();
    s1.sort_unstable();
    let (p1, m1) = random_edge_rule(rng, "p1", &union, &s1)?;
    let first = apply_at(&p1, &start, &m1).ok()?;

    let (mid, mid_offsets) = first.outputs.union();
    let image: Vec<usize> = s1
        .iter()
        .map(|&v| first.atom_map[v].map(|(c, i)| mid_offsets[c] + i).unwrap())
        .collect();
    let mut pool: Vec<usize> = (0..mid.vertex_count()).collect();
    pool.shuffle(rng);
    let k2 = rng.gen_range(2..=mid.vertex_count().min(4));
    let mut s2: Vec<usize> = if rng.gen_bool(0.7) {
        let mut seeded = image.clone();
        seeded.shuffle(rng);
        seeded.truncate(k2);
        for v in pool {
            if seeded.len() >= k2 {
                break;
            }
            if !seeded.contains(&v) {
                seeded.push(v);
            }
        }
        seeded
    } else {
        pool[..k2].to_vec()
    };
    s2.sort_unstable();
    let (p2, m2) = random_edge_rule(rng, "p2", &mid, &s2)?;
    let second = apply_at(&p2, &first.outputs, &m2).ok()?;
    Some(Chain { start, p1, p2, first, second })
}

/// Some composite `p2 ∘_μ p1` derives the chain's final graph from its
/// start graph.
pub fn realized(chain: &Chain) -> bool {
    let target = &chain.second.outputs;
    compose::compose_all_list(&chain.p1, &chain.p2)
        .iter()
        .any(|r| derivations(r, &chain.start).iter().any(|d| d.outputs.is_isomorphic(target)))
}

/// Rules that create an edge between two vertices already bonded in the
/// host, or delete a vertex that keeps other bonds. Each comes with its
/// host and a match that violates the gluing condition.
pub fn gluing_violations() -> Vec<(Rule, ComponentMultiset, Embedding)> {
    let mut out = Vec::new();
    for g in small_molecules(8) {
        let hosts = ComponentMultiset::new(vec![g.clone()]).unwrap();
        let (union, _) = hosts.union();
        for e in union.edges() {
            let vertices = vec![
                RuleVertex::context(union.label(e.source).clone()),
                RuleVertex::context(union.label(e.target).clone()),
            ];
            let rule = Rule::new("bond", vertices, vec![RuleEdge::new(0, 1, None, Some("#"))]).unwrap();
            let m = Embedding { vertex_map: vec![e.source, e.target], edge_map: vec![] };
            out.push((rule, hosts.clone(), m));
        }
        for v in 0..union.vertex_count() {
            if union.degree(v) == 0 {
                continue;
            }
            let vertex = RuleVertex { left: Some(union.label(v).clone()), right: None };
            let rule = Rule::new("drop", vec![vertex], vec![]).unwrap();
            let m = Embedding { vertex_map: vec![v], edge_map: vec![] };
            out.push((rule, hosts.clone(), m));
        }
    }
    out
}
