//! Canonical codes for labelled graphs.
//!
//! Colour refinement followed by individualisation search. Each connected
//! component is canonised on its own and the component certificates are
//! sorted, so repeated components never multiply the search. Inside a
//! component, candidates that are twins of an already explored candidate
//! (same label, same labelled neighbourhood) are skipped: swapping two twins
//! is an automorphism that fixes everything individualised so far.

use std::fmt;

use sha2::{Digest, Sha256};

use crate::graph::MolGraph;

/// Byte string that is equal for two graphs exactly when they are isomorphic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Hex SHA-256 of the code; used for file names.
    pub fn hash_hex(&self) -> String {
        let digest = Sha256::digest(&self.0);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({})", &self.hash_hex()[..16])
    }
}

/// Generic labelled graph description fed to the canoniser. Labels are
/// opaque byte strings.
pub struct LabelledGraph {
    pub vertex_labels: Vec<Vec<u8>>,
    pub edges: Vec<(usize, usize, Vec<u8>)>,
}

/// Canonical code plus a canonical vertex order (`order[i]` is the vertex
/// placed at position `i`).
pub fn canonical_form(graph: &LabelledGraph) -> (CanonicalCode, Vec<usize>) {
    let n = graph.vertex_labels.len();
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, &(u, v, _)) in graph.edges.iter().enumerate() {
        adjacency[u].push((v, i));
        adjacency[v].push((u, i));
    }

    // components via DFS
    let mut comp = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = members.len();
        let mut list = vec![start];
        comp[start] = id;
        let mut i = 0;
        while i < list.len() {
            let v = list[i];
            i += 1;
            for &(w, _) in &adjacency[v] {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    list.push(w);
                }
            }
        }
        list.sort_unstable();
        members.push(list);
    }

    let mut parts: Vec<(Vec<u8>, Vec<usize>)> = members
        .iter()
        .map(|vs| canonise_component(graph, &adjacency, vs))
        .collect();
    parts.sort();

    let mut code = Vec::new();
    push_u32(&mut code, parts.len());
    let mut order = Vec::with_capacity(n);
    for (cert, vs) in parts {
        push_u32(&mut code, cert.len());
        code.extend_from_slice(&cert);
        order.extend(vs);
    }
    (CanonicalCode(code), order)
}

pub fn graph_code(g: &MolGraph) -> CanonicalCode {
    canonical_form(&labelled(g)).0
}

pub(crate) fn labelled(g: &MolGraph) -> LabelledGraph {
    LabelledGraph {
        vertex_labels: g.labels().iter().map(|l| l.as_str().as_bytes().to_vec()).collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| (e.source, e.target, e.label.as_str().as_bytes().to_vec()))
            .collect(),
    }
}

fn push_u32(out: &mut Vec<u8>, x: usize) {
    out.extend_from_slice(&(x as u32).to_be_bytes());
}

struct Component<'a> {
    vertices: &'a [usize],
    labels: Vec<&'a [u8]>,
    // local adjacency: (neighbour, edge label rank), sorted
    adjacency: Vec<Vec<(usize, u32)>>,
    edges: Vec<(usize, usize, &'a [u8])>,
}

fn canonise_component(
    graph: &LabelledGraph,
    adjacency: &[Vec<(usize, usize)>],
    vertices: &[usize],
) -> (Vec<u8>, Vec<usize>) {
    let local = |v: usize| vertices.binary_search(&v).expect("vertex in component");

    let mut edge_labels: Vec<&[u8]> = Vec::new();
    let mut edges = Vec::new();
    for &v in vertices {
        for &(w, e) in &adjacency[v] {
            if v < w {
                let label = graph.edges[e].2.as_slice();
                edge_labels.push(label);
                edges.push((local(v), local(w), label));
            }
        }
    }
    edge_labels.sort_unstable();
    edge_labels.dedup();
    let edge_rank = |l: &[u8]| edge_labels.binary_search(&l).unwrap() as u32;

    let local_adjacency = vertices
        .iter()
        .map(|&v| {
            let mut list: Vec<(usize, u32)> = adjacency[v]
                .iter()
                .map(|&(w, e)| (local(w), edge_rank(&graph.edges[e].2)))
                .collect();
            list.sort_unstable();
            list
        })
        .collect();

    let component = Component {
        vertices,
        labels: vertices.iter().map(|&v| graph.vertex_labels[v].as_slice()).collect(),
        adjacency: local_adjacency,
        edges,
    };

    let mut vertex_labels = component.labels.clone();
    vertex_labels.sort_unstable();
    vertex_labels.dedup();
    let initial: Vec<u32> = component
        .labels
        .iter()
        .map(|l| vertex_labels.binary_search(l).unwrap() as u32)
        .collect();

    let colours = refine(&component, initial);
    let mut best: Option<(Vec<u8>, Vec<usize>)> = None;
    search(&component, colours, &mut best);
    let (cert, local_order) = best.expect("search visits at least one leaf");
    let order = local_order.into_iter().map(|i| vertices[i]).collect();
    (cert, order)
}

/// Colours are dense ranks `0..k`; refinement keeps the old colour as the
/// primary sort key so the result always refines the input.
fn refine(c: &Component<'_>, mut colours: Vec<u32>) -> Vec<u32> {
    let n = colours.len();
    let mut cells = count_cells(&colours);
    loop {
        if cells == n {
            return colours;
        }
        let signatures: Vec<(u32, Vec<(u32, u32)>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<(u32, u32)> = c.adjacency[v]
                    .iter()
                    .map(|&(w, el)| (el, colours[w]))
                    .collect();
                nb.sort_unstable();
                (colours[v], nb)
            })
            .collect();
        let mut sorted: Vec<&(u32, Vec<(u32, u32)>)> = signatures.iter().collect();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() == cells {
            return colours;
        }
        colours = signatures
            .iter()
            .map(|s| sorted.binary_search(&s).unwrap() as u32)
            .collect();
        cells = sorted.len();
    }
}

fn count_cells(colours: &[u32]) -> usize {
    let mut seen = colours.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

fn are_twins(c: &Component<'_>, u: usize, w: usize) -> bool {
    if c.labels[u] != c.labels[w] || c.adjacency[u].len() != c.adjacency[w].len() {
        return false;
    }
    let strip = |v: usize, other: usize| {
        c.adjacency[v]
            .iter()
            .filter(move |&&(x, _)| x != other)
            .copied()
    };
    strip(u, w).eq(strip(w, u))
}

fn search(c: &Component<'_>, colours: Vec<u32>, best: &mut Option<(Vec<u8>, Vec<usize>)>) {
    let n = colours.len();
    let mut sizes = vec![0usize; n];
    for &col in &colours {
        sizes[col as usize] += 1;
    }
    let Some(target) = sizes.iter().position(|&s| s > 1) else {
        let mut order = vec![0; n];
        for (v, &col) in colours.iter().enumerate() {
            order[col as usize] = v;
        }
        let cert = certificate(c, &colours, &order);
        if best.as_ref().is_none_or(|(b, _)| cert < *b) {
            *best = Some((cert, order));
        }
        return;
    };

    let cell: Vec<usize> = (0..n).filter(|&v| colours[v] as usize == target).collect();
    let mut tried: Vec<usize> = Vec::new();
    for &v in &cell {
        if tried.iter().any(|&u| are_twins(c, u, v)) {
            continue;
        }
        tried.push(v);
        // split v off in front of the rest of its cell
        let individualised: Vec<u32> = colours
            .iter()
            .enumerate()
            .map(|(u, &col)| {
                if col as usize > target || (col as usize == target && u != v) {
                    col + 1
                } else {
                    col
                }
            })
            .collect();
        search(c, refine(c, individualised), best);
    }
}

fn certificate(c: &Component<'_>, position: &[u32], order: &[usize]) -> Vec<u8> {
    let mut out = Vec::new();
    push_u32(&mut out, order.len());
    for &v in order {
        push_u32(&mut out, c.labels[v].len());
        out.extend_from_slice(c.labels[v]);
    }
    let mut edges: Vec<(u32, u32, &[u8])> = c
        .edges
        .iter()
        .map(|&(a, b, l)| {
            let (pa, pb) = (position[a], position[b]);
            (pa.min(pb), pa.max(pb), l)
        })
        .collect();
    edges.sort_unstable();
    push_u32(&mut out, edges.len());
    for (a, b, l) in edges {
        out.extend_from_slice(&a.to_be_bytes());
        out.extend_from_slice(&b.to_be_bytes());
        push_u32(&mut out, l.len());
        out.extend_from_slice(l);
    }
    debug_assert_eq!(order.len(), c.vertices.len());
    out
}
