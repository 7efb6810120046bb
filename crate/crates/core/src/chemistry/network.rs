use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::canon::CanonicalCode;
use crate::graph::{ComponentMultiset, MolGraph};
use crate::rewrite::{self, Derivation};

use super::molecules::heavy_atom_count;
use super::Ruleset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_species: usize,
    /// Non-hydrogen atoms per species.
    pub max_atoms_per_species: usize,
    pub max_rounds: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_species: 10_000, max_atoms_per_species: 14, max_rounds: 8 }
    }
}

#[derive(Debug, Clone)]
pub struct Species {
    pub graph: MolGraph,
    pub code: CanonicalCode,
    /// Round in which the species first appeared; seeds have round 0.
    pub round: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperedge {
    /// Species ids, sorted.
    pub inputs: Vec<usize>,
    /// Species ids, sorted.
    pub outputs: Vec<usize>,
    pub rule: String,
    pub round: usize,
}

/// Directed hypergraph of canonical species and rule-labelled reactions.
#[derive(Debug, Clone, Default)]
pub struct ReactionNetwork {
    pub species: Vec<Species>,
    pub hyperedges: Vec<Hyperedge>,
    index: BTreeMap<CanonicalCode, usize>,
}

impl ReactionNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn species_id(&self, code: &CanonicalCode) -> Option<usize> {
        self.index.get(code).copied()
    }

    /// Returns the id and whether the species is new.
    pub fn add_species(&mut self, graph: &MolGraph, round: usize) -> (usize, bool) {
        let code = graph.canonical_code();
        if let Some(&id) = self.index.get(&code) {
            return (id, false);
        }
        let id = self.species.len();
        self.index.insert(code.clone(), id);
        self.species.push(Species { graph: graph.clone(), code, round });
        (id, true)
    }

    pub fn contains_edge(&self, rule: &str, inputs: &[usize], outputs: &[usize]) -> bool {
        self.hyperedges
            .iter()
            .any(|h| h.rule == rule && h.inputs == inputs && h.outputs == outputs)
    }

    /// Adds a hyperedge unless an identical one exists; species must
    /// already be present.
    pub fn add_hyperedge(&mut self, mut edge: Hyperedge) -> bool {
        edge.inputs.sort_unstable();
        edge.outputs.sort_unstable();
        if self.contains_edge(&edge.rule, &edge.inputs, &edge.outputs) {
            return false;
        }
        self.hyperedges.push(edge);
        true
    }

    pub fn inputs_of(&self, h: &Hyperedge) -> ComponentMultiset {
        ComponentMultiset::new(h.inputs.iter().map(|&i| self.species[i].graph.clone()).collect())
            .expect("species are connected")
    }

    pub fn outputs_of(&self, h: &Hyperedge) -> ComponentMultiset {
        ComponentMultiset::new(h.outputs.iter().map(|&i| self.species[i].graph.clone()).collect())
            .expect("species are connected")
    }
}

/// Breadth-first network closure. Each round applies every rule to every
/// multiset of known species (at most one per left component, at least one
/// of them new in the previous round) and keeps proper, gluing-valid
/// derivations whose products respect the atom limit. Products join the
/// pool in the next round.
pub fn expand_network(seeds: &[MolGraph], rs: &Ruleset, limits: Limits) -> ReactionNetwork {
    let mut net = ReactionNetwork::new();
    for s in seeds {
        for c in s.connected_components().components() {
            net.add_species(c, 0);
        }
    }
    let mut fresh: BTreeSet<usize> = (0..net.species.len()).collect();

    for round in 1..=limits.max_rounds {
        if fresh.is_empty() {
            break;
        }
        let known = net.species.len();
        let mut jobs: Vec<(usize, Vec<usize>)> = Vec::new();
        for (ri, rule) in rs.rules.iter().enumerate() {
            for size in 1..=rule.left_component_count() {
                for pick in multisets(known, size) {
                    if pick.iter().any(|i| fresh.contains(i)) {
                        jobs.push((ri, pick));
                    }
                }
            }
        }

        let results: Vec<Vec<Derivation>> = jobs
            .par_iter()
            .map(|(ri, pick)| {
                let rule = &rs.rules[*ri];
                let hosts = ComponentMultiset::new(
                    pick.iter().map(|&i| net.species[i].graph.clone()).collect(),
                )
                .expect("species are connected");
                rewrite::derivations(rule, &hosts)
                    .into_iter()
                    .filter(|d| {
                        d.touched_inputs().iter().all(|&t| t)
                            && rewrite::is_proper(d)
                            && d.outputs
                                .components()
                                .iter()
                                .all(|g| heavy_atom_count(g) <= limits.max_atoms_per_species)
                    })
                    .collect()
            })
            .collect();

        let mut next_fresh = BTreeSet::new();
        'jobs: for ((ri, pick), derivations) in jobs.iter().zip(results) {
            for d in derivations {
                let new_count = d
                    .outputs
                    .components()
                    .iter()
                    .filter(|g| net.species_id(&g.canonical_code()).is_none())
                    .count();
                if net.species.len() + new_count > limits.max_species {
                    break 'jobs;
                }
                let outputs: Vec<usize> = d
                    .outputs
                    .components()
                    .iter()
                    .map(|g| {
                        let (id, new) = net.add_species(g, round);
                        if new {
                            next_fresh.insert(id);
                        }
                        id
                    })
                    .collect();
                net.add_hyperedge(Hyperedge {
                    inputs: pick.clone(),
                    outputs,
                    rule: rs.rules[*ri].name().to_string(),
                    round,
                });
            }
        }
        fresh = next_fresh;
    }
    net
}

/// Non-decreasing index sequences of length `k` over `0..n`.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}
