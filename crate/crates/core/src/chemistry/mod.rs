//! The Formose grammar, reaction-network expansion and composition
//! experiments on top of it.

pub mod molecules;
mod network;
mod universe;

pub use network::{expand_network, Hyperedge, Limits, ReactionNetwork, Species};
pub use universe::{composition_universe, universe_counts, Dedup, UniverseReport};

use crate::compose::{self, RuleSet};
use crate::graph::{ComponentMultiset, MolGraph};
use crate::rewrite::{self, Derivation};
use crate::rule::{Rule, RuleEdge, RuleVertex};

#[derive(Debug, Clone)]
pub struct Ruleset {
    pub rules: Vec<Rule>,
    /// Named species that may be bound to rules.
    pub graphs: Vec<(String, MolGraph)>,
    /// Every rule must conserve atoms.
    pub chemical: bool,
}

impl Ruleset {
    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name() == name)
    }

    pub fn graph(&self, name: &str) -> Option<&MolGraph> {
        self.graphs.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }

    /// Names of rules that break the chemical flag.
    pub fn non_conserving(&self) -> Vec<&str> {
        if !self.chemical {
            return Vec::new();
        }
        self.rules
            .iter()
            .filter(|r| !r.is_atom_conserving())
            .map(|r| r.name())
            .collect()
    }
}

/// Backward keto-enol tautomerism, enol to keto.
fn keto_enol_backward() -> Rule {
    // 0 H, 1 O, 2 C (carbinol carbon), 3 C (alpha carbon)
    let vertices = ["H", "O", "C", "C"].map(RuleVertex::context).to_vec();
    let edges = vec![
        RuleEdge::new(0, 1, Some("-"), None),
        RuleEdge::new(1, 2, Some("-"), Some("=")),
        RuleEdge::new(2, 3, Some("="), Some("-")),
        RuleEdge::new(0, 3, None, Some("-")),
    ];
    Rule::new("p1", vertices, edges).expect("p1 is valid")
}

/// Backward aldol addition (retro-aldol). With `context_hydrogens` the
/// carbinol and alpha carbons must each carry a hydrogen.
fn aldol_backward(context_hydrogens: bool) -> Rule {
    // 0 H, 1 O (hydroxyl), 2 C (carbinol), 3 C (alpha), 4 C (carbonyl),
    // 5 O (carbonyl oxygen), 6 H on 2, 7 H on 3
    let mut vertices = ["H", "O", "C", "C", "C", "O"].map(RuleVertex::context).to_vec();
    let mut edges = vec![
        RuleEdge::new(0, 1, Some("-"), None),
        RuleEdge::new(1, 2, Some("-"), Some("=")),
        RuleEdge::new(2, 3, Some("-"), None),
        RuleEdge::new(3, 4, Some("-"), Some("=")),
        RuleEdge::new(4, 5, Some("="), Some("-")),
        RuleEdge::new(0, 5, None, Some("-")),
    ];
    if context_hydrogens {
        vertices.extend(["H", "H"].map(RuleVertex::context));
        edges.push(RuleEdge::new(2, 6, Some("-"), Some("-")));
        edges.push(RuleEdge::new(3, 7, Some("-"), Some("-")));
    }
    Rule::new("p3", vertices, edges).expect("p3 is valid")
}

/// Which spectator atoms the aldol rules carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AldolContext {
    /// Only the six atoms whose bonds change.
    Minimal,
    /// Additionally one hydrogen on each of the two carbons that lose or
    /// gain the C-C bond.
    #[default]
    WithHydrogens,
}

/// p0/p1 keto-enol tautomerism and p2/p3 aldol addition, plus
/// formaldehyde (g0) and glycolaldehyde (g1).
pub fn formose_ruleset() -> Ruleset {
    formose_ruleset_with(AldolContext::default())
}

pub fn formose_ruleset_with(aldol: AldolContext) -> Ruleset {
    let p1 = keto_enol_backward();
    let p0 = p1.inverse("p0");
    let p3 = aldol_backward(aldol == AldolContext::WithHydrogens);
    let p2 = p3.inverse("p2");
    Ruleset {
        rules: vec![p0, p1, p2, p3],
        graphs: vec![
            ("g0".to_string(), molecules::formaldehyde()),
            ("g1".to_string(), molecules::glycolaldehyde()),
        ],
        chemical: true,
    }
}

/// Rule names along the autocatalytic cycle, in application order.
pub const FORMOSE_CYCLE: [&str; 8] = ["p0", "p2", "p0", "p2", "p0", "p1", "p3", "p1"];

/// The cycle as a composition chain written outermost first, with
/// glycolaldehyde bound innermost.
pub fn formose_chain(rs: &Ruleset) -> Vec<Rule> {
    let mut chain: Vec<Rule> = FORMOSE_CYCLE
        .iter()
        .rev()
        .map(|n| rs.rule(n).expect("Formose rule").clone())
        .collect();
    chain.push(compose::binding_rule(rs.graph("g1").expect("g1")));
    chain
}

/// Searches for a chain of proper derivations that applies `rules` in
/// order, starting from `start`, consuming molecules from the pool and
/// ending in a pool isomorphic to `target`. Each step picks its inputs from
/// the current pool. Returns the derivations of the first chain found.
pub fn find_derivation_chain(
    start: &ComponentMultiset,
    rules: &[&Rule],
    target: &ComponentMultiset,
) -> Option<Vec<Derivation>> {
    let mut trail = Vec::new();
    chain_search(start.components().to_vec(), rules, target, &mut trail).then_some(trail)
}

fn chain_search(
    pool: Vec<MolGraph>,
    rules: &[&Rule],
    target: &ComponentMultiset,
    trail: &mut Vec<Derivation>,
) -> bool {
    let Some((rule, rest)) = rules.split_first() else {
        let pool = ComponentMultiset::new(pool).expect("pool members are connected");
        return pool.is_isomorphic(target);
    };
    let max_inputs = rule.left_component_count().min(pool.len());
    for size in 1..=max_inputs {
        for pick in combinations(pool.len(), size) {
            let hosts = ComponentMultiset::new(pick.iter().map(|&i| pool[i].clone()).collect())
                .expect("pool members are connected");
            for d in rewrite::derivations(rule, &hosts) {
                if !d.touched_inputs().iter().all(|&t| t) || !rewrite::is_proper(&d) {
                    continue;
                }
                let mut next: Vec<MolGraph> = pool
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !pick.contains(i))
                    .map(|(_, g)| g.clone())
                    .collect();
                next.extend(d.outputs.components().iter().cloned());
                trail.push(d);
                if chain_search(next, rest, target, trail) {
                    return true;
                }
                trail.pop();
            }
        }
    }
    false
}

/// k-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// The Formose cycle replayed molecule by molecule: starting from
/// glycolaldehyde and two formaldehydes, the eight derivations of the
/// cycle end in two glycolaldehydes.
pub fn formose_cycle_derivations(rs: &Ruleset) -> Option<Vec<Derivation>> {
    let g0 = rs.graph("g0")?;
    let g1 = rs.graph("g1")?;
    let start = ComponentMultiset::new(vec![g1.clone(), g0.clone(), g0.clone()]).ok()?;
    let target = ComponentMultiset::new(vec![g1.clone(), g1.clone()]).ok()?;
    let rules: Vec<&Rule> = FORMOSE_CYCLE.iter().map(|n| rs.rule(n)).collect::<Option<_>>()?;
    find_derivation_chain(&start, &rules, &target)
}

/// Name of the hyperedge that feeds formaldehyde into the cycle network.
pub const INFLUX: &str = "influx";

/// The cycle as a reaction network: one influx hyperedge creating
/// formaldehyde, then the eight derivations of
/// [`formose_cycle_derivations`] in order.
pub fn formose_cycle_network(rs: &Ruleset) -> Option<ReactionNetwork> {
    let derivations = formose_cycle_derivations(rs)?;
    let mut net = ReactionNetwork::new();
    let (g0, _) = net.add_species(rs.graph("g0")?, 0);
    net.add_hyperedge(Hyperedge { inputs: vec![], outputs: vec![g0], rule: INFLUX.to_string(), round: 0 });
    for (i, d) in derivations.iter().enumerate() {
        let mut ids = |m: &ComponentMultiset| -> Vec<usize> {
            m.components().iter().map(|g| net.add_species(g, i + 1).0).collect()
        };
        let inputs = ids(&d.inputs);
        let outputs = ids(&d.outputs);
        net.add_hyperedge(Hyperedge { inputs, outputs, rule: d.rule.name().to_string(), round: i + 1 });
    }
    Some(net)
}

/// Composites of the Formose chain whose application to two formaldehydes
/// yields two glycolaldehydes.
pub fn formose_meta_rules(rs: &Ruleset) -> RuleSet {
    let g0 = rs.graph("g0").expect("g0");
    let g1 = rs.graph("g1").expect("g1");
    let inputs = ComponentMultiset::new(vec![g0.clone(), g0.clone()]).unwrap();
    let target = ComponentMultiset::new(vec![g1.clone(), g1.clone()]).unwrap();
    compose::compose_sequence(&formose_chain(rs))
        .into_iter()
        .filter(|(_, r)| produces(r, &inputs, &target))
        .collect()
}

/// True if some gluing-valid match of `r` on `inputs` yields `target`.
pub fn produces(r: &Rule, inputs: &ComponentMultiset, target: &ComponentMultiset) -> bool {
    rewrite::derivations(r, inputs)
        .iter()
        .any(|d| d.outputs.is_isomorphic(target))
}

/// A connected component repeated in a rule side.
#[derive(Debug, Clone)]
pub struct PolymerPattern {
    pub unit: MolGraph,
    pub multiplicity: usize,
}

/// Largest connected component of `L` (or else `R`) that occurs at least
/// twice up to isomorphism.
pub fn detect_polymer_pattern(r: &Rule) -> Option<PolymerPattern> {
    for side in [r.left_graph().graph, r.right_graph().graph] {
        let comps = side.connected_components();
        let mut groups: std::collections::BTreeMap<_, (MolGraph, usize)> = Default::default();
        for c in comps.components() {
            groups
                .entry(c.canonical_code())
                .or_insert_with(|| (c.clone(), 0))
                .1 += 1;
        }
        let best = groups
            .into_values()
            .filter(|(_, n)| *n >= 2)
            .max_by(|(a, na), (b, nb)| {
                a.vertex_count()
                    .cmp(&b.vertex_count())
                    .then(a.edge_count().cmp(&b.edge_count()))
                    .then(na.cmp(nb))
            });
        if let Some((unit, multiplicity)) = best {
            return Some(PolymerPattern { unit, multiplicity });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ruleset_is_chemical() {
        let rs = formose_ruleset();
        assert!(rs.non_conserving().is_empty());
        assert_eq!(rs.rules.len(), 4);
        let p2 = rs.rule("p2").unwrap();
        assert_eq!(p2.left_component_count(), 2);
        assert_eq!(p2.right_component_count(), 1);
        assert_eq!(rs.rule("p3").unwrap().left_component_count(), 1);
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(
            combinations(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(2, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn cycle_replays() {
        let rs = formose_ruleset();
        let chain = formose_cycle_derivations(&rs).expect("cycle exists");
        assert_eq!(chain.len(), 8);
        for d in &chain {
            assert_eq!(d.inputs.label_counts(), d.outputs.label_counts());
        }
        // the retro-aldol step splits one molecule into two
        assert_eq!(chain[6].inputs.count(), 1);
        assert_eq!(chain[6].outputs.count(), 2);
    }

    #[test]
    fn polymer_detection() {
        let p1 = formose_ruleset().rule("p1").unwrap().clone();
        assert!(detect_polymer_pattern(&p1).is_none());
        let cc = MolGraph::from_parts(&["C", "C"], &[(0, 1, "-")]).unwrap();
        let mut three = cc.clone();
        three.extend_disjoint(&cc);
        three.extend_disjoint(&cc);
        let found = detect_polymer_pattern(&Rule::destroying("x", &three)).unwrap();
        assert_eq!(found.multiplicity, 3);
        assert!(found.unit.is_isomorphic(&cc));
    }
}
