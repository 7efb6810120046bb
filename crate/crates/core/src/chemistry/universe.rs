use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::compose::{self, RuleSet};
use crate::graph::MolGraph;
use crate::rule::Rule;

use super::Ruleset;

/// How composites are identified when deduplicating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dedup {
    /// Rules are equal when their merged labelled graphs are isomorphic.
    #[default]
    Isomorphism,
    /// Rules are equal only when their vertex and edge lists coincide.
    Syntactic,
}

/// Everything reachable from bound graphs by up to `max_len` compositions.
#[derive(Debug, Clone)]
pub struct UniverseReport {
    /// Distinct composites (up to isomorphism) over lengths `1..=max_len`,
    /// not counting rules isomorphic to a bound seed.
    pub rules: RuleSet,
    /// `new_per_length[k - 1]`: composites first reached with `k` rules.
    pub new_per_length: Vec<usize>,
    /// Seeds `(∅, ∅, g)` that some composite is isomorphic to.
    pub seeds_rederived: usize,
}

impl UniverseReport {
    pub fn count(&self) -> usize {
        self.rules.len()
    }

    /// Count when only sequences of at most `k` rules are admitted.
    pub fn count_up_to(&self, k: usize) -> usize {
        self.new_per_length.iter().take(k).sum()
    }
}

fn seeds(bindables: &[MolGraph]) -> RuleSet {
    bindables
        .iter()
        .map(|g| {
            let b = compose::binding_rule(g);
            (b.canonical_code(), b)
        })
        .collect()
}

/// Breadth-first closure: start from `(∅, ∅, g)` for every bindable `g`,
/// then left-compose every rule of `rs` in every matching. Each level is
/// deduplicated by canonical code against everything seen before, so only
/// new composites are extended further.
pub fn composition_universe(rs: &Ruleset, bindables: &[MolGraph], max_len: usize) -> UniverseReport {
    let mut frontier = seeds(bindables);
    let mut seen: BTreeSet<_> = frontier.keys().cloned().collect();
    let mut seeds_rederived = BTreeSet::new();

    let mut rules = RuleSet::new();
    let mut new_per_length = Vec::with_capacity(max_len);
    for _ in 0..max_len {
        let parts: Vec<RuleSet> = frontier
            .par_iter()
            .flat_map_iter(|(_, inner)| rs.rules.iter().map(move |p| compose::compose_all(inner, p)))
            .collect();
        let mut next = RuleSet::new();
        for part in parts {
            for (code, r) in part {
                if !seen.contains(&code) {
                    next.entry(code).or_insert(r);
                } else if !rules.contains_key(&code) {
                    seeds_rederived.insert(code);
                }
            }
        }
        seen.extend(next.keys().cloned());
        new_per_length.push(next.len());
        rules.extend(next.iter().map(|(c, r)| (c.clone(), r.clone())));
        frontier = next;
    }
    UniverseReport { rules, new_per_length, seeds_rederived: seeds_rederived.len() }
}

fn syntactic_digest(r: &Rule) -> [u8; 32] {
    let mut h = Sha256::new();
    for v in r.vertices() {
        for side in [&v.left, &v.right] {
            h.update(side.as_ref().map_or("", |l| l.as_str()));
            h.update([0]);
        }
    }
    h.update([1]);
    for e in r.edges() {
        h.update((e.source as u64).to_le_bytes());
        h.update((e.target as u64).to_le_bytes());
        for side in [&e.left, &e.right] {
            h.update(side.as_ref().map_or("", |l| l.as_str()));
            h.update([0]);
        }
    }
    h.finalize().into()
}

/// The same closure with a chosen identity. Under [`Dedup::Syntactic`]
/// every composite produced by a distinct matching whose vertex numbering
/// differs is kept. Returns the number of new composites per length.
pub fn universe_counts(
    rs: &Ruleset,
    bindables: &[MolGraph],
    max_len: usize,
    dedup: Dedup,
) -> Vec<usize> {
    if dedup == Dedup::Isomorphism {
        return composition_universe(rs, bindables, max_len).new_per_length;
    }
    let mut frontier: Vec<Rule> = seeds(bindables).into_values().collect();
    let mut seen: HashSet<[u8; 32]> = frontier.iter().map(syntactic_digest).collect();
    let mut out = Vec::with_capacity(max_len);
    for len in 1..=max_len {
        let keep = len < max_len;
        let mut next = Vec::new();
        let mut count = 0;
        for chunk in frontier.chunks(2048) {
            let parts: Vec<(Rule, [u8; 32])> = chunk
                .par_iter()
                .flat_map_iter(|inner| rs.rules.iter().flat_map(move |p| compose::compose_all_list(inner, p)))
                .map(|r| {
                    let d = syntactic_digest(&r);
                    (r, d)
                })
                .collect();
            for (r, d) in parts {
                if seen.insert(d) {
                    count += 1;
                    if keep {
                        next.push(r);
                    }
                }
            }
        }
        out.push(count);
        frontier = next;
    }
    out
}
