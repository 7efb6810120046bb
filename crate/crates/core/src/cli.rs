//! The `dpoc` command line.
//!
//! Exit codes: 0 on success, 1 when the operation has no result (no match,
//! every composition rejected, empty fold), 2 on usage and input errors.
//! Result files are named by the SHA-256 of their canonical code and are
//! only written once the whole command has succeeded.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::canon::CanonicalCode;
use crate::chemistry::{self, Dedup, Limits, Ruleset};
use crate::compose::{self, RuleSet};
use crate::graph::{ComponentMultiset, MolGraph};
use crate::io;
use crate::rewrite;
use crate::rule::Rule;

#[derive(Debug, Parser)]
#[command(name = "dpoc", version, about = "Double-pushout rule application and composition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Gml,
    Dot,
}

#[derive(Debug, Args)]
struct Common {
    /// Rule document; repeatable, order matters.
    #[arg(long = "rule", value_name = "FILE")]
    rules: Vec<PathBuf>,
    /// Graph document; repeatable.
    #[arg(long = "graph", value_name = "FILE")]
    graphs: Vec<PathBuf>,
    /// Directory for result files; results go to stdout when absent.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gml")]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply one rule to the multiset of all given graphs.
    Apply {
        #[command(flatten)]
        common: Common,
        /// Report every derivation instead of the first.
        #[arg(long)]
        all_matches: bool,
        /// Keep proper derivations only.
        #[arg(long)]
        proper_only: bool,
    },
    /// Full compositions of the second rule after the first (every left
    /// component of the second rule matched).
    Compose {
        #[command(flatten)]
        common: Common,
    },
    /// Every composite of the second rule after the first.
    ComposeAll {
        #[command(flatten)]
        common: Common,
    },
    /// Composites of (∅, ∅, G) followed by the rule.
    Bind {
        #[command(flatten)]
        common: Common,
    },
    /// Fold a chain given outermost first; a --graph is bound innermost.
    Sequence {
        #[command(flatten)]
        common: Common,
    },
    /// Application orders of the given rules with a non-empty fold.
    Orders {
        #[command(flatten)]
        common: Common,
    },
    /// Expand a reaction network from seed graphs.
    Expand {
        #[command(flatten)]
        common: Common,
        /// Maximum number of non-hydrogen atoms per species.
        #[arg(long, default_value_t = 14)]
        max_atoms: usize,
        #[arg(long, default_value_t = 10_000)]
        max_species: usize,
        #[arg(long, default_value_t = 8)]
        max_rounds: usize,
    },
    /// Count composites reachable from bound graphs.
    Universe {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        max_len: usize,
        /// Also count with syntactic instead of isomorphism dedup.
        #[arg(long)]
        syntactic: bool,
    },
    /// Built-in demonstrations.
    Demo {
        #[arg(value_enum)]
        which: Demo,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "gml")]
        format: Format,
    },
    /// Print the canonical-code hash of every given graph and rule.
    Canon {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Demo {
    Formose,
}

enum Failure {
    /// exit code 1
    Domain(String),
    /// exit code 2
    Input(String),
}

type Outcome = Result<(), Failure>;

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

/// A result file: name stem and contents.
struct Artifact {
    stem: String,
    text: String,
}

struct Session<'a> {
    out: &'a mut dyn Write,
    artifacts: Vec<Artifact>,
    format: Format,
}

impl Session<'_> {
    fn say(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", line.as_ref());
    }

    fn rule(&mut self, r: &Rule) {
        let text = match self.format {
            Format::Gml => io::serialize_rule(r),
            Format::Dot => io::rule_to_dot(r),
        };
        self.artifacts.push(Artifact { stem: r.canonical_code().hash_hex(), text });
    }

    fn graph(&mut self, g: &MolGraph) {
        let text = match self.format {
            Format::Gml => io::serialize_graph(g),
            Format::Dot => io::graph_to_dot(g),
        };
        self.artifacts.push(Artifact { stem: g.canonical_code().hash_hex(), text });
    }

    fn rules(&mut self, rs: &RuleSet) {
        for r in rs.values() {
            self.rule(r);
        }
    }

    fn finish(&mut self, dir: Option<&Path>) -> Outcome {
        let ext = match self.format {
            Format::Gml => "gml",
            Format::Dot => "dot",
        };
        let Some(dir) = dir else {
            for a in &self.artifacts {
                let _ = self.out.write_all(a.text.as_bytes());
            }
            return Ok(());
        };
        fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
        let mut written = Vec::new();
        for a in &self.artifacts {
            let path = dir.join(format!("{}.{ext}", a.stem));
            if let Err(e) = fs::write(&path, &a.text) {
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                return Err(input(format!("{}: {e}", path.display())));
            }
            written.push(path);
        }
        for p in &written {
            let _ = writeln!(self.out, "{}", p.display());
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_rules(paths: &[PathBuf]) -> Result<Vec<Rule>, Failure> {
    paths
        .iter()
        .map(|p| {
            let r = io::parse_rule(&read(p)?).map_err(|e| input(format!("{}: {e}", p.display())))?;
            if r.name().is_empty() {
                let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                return Ok(r.with_name(stem));
            }
            Ok(r)
        })
        .collect()
}

fn load_graphs(paths: &[PathBuf]) -> Result<Vec<MolGraph>, Failure> {
    paths
        .iter()
        .map(|p| io::parse_graph(&read(p)?).map_err(|e| input(format!("{}: {e}", p.display()))))
        .collect()
}

fn exactly<T>(items: Vec<T>, n: usize, what: &str) -> Result<Vec<T>, Failure> {
    if items.len() != n {
        return Err(Failure::Input(format!("expected exactly {n} {what}, got {}", items.len())));
    }
    Ok(items)
}

fn summary(r: &Rule) -> String {
    let l = r.left_graph().graph.connected_components();
    let rr = r.right_graph().graph.connected_components();
    let list = |m: &ComponentMultiset| {
        if m.is_empty() {
            return "∅".to_string();
        }
        m.components().iter().map(MolGraph::formula).collect::<Vec<_>>().join(" + ")
    };
    format!("{}: {} -> {}", r.name(), list(&l), list(&rr))
}

fn non_empty(rs: RuleSet, what: &str) -> Result<RuleSet, Failure> {
    if rs.is_empty() {
        return Err(Failure::Domain(format!("no {what}")));
    }
    Ok(rs)
}

fn ruleset(rules: Vec<Rule>) -> Ruleset {
    Ruleset { rules, graphs: Vec::new(), chemical: true }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Outcome {
    let (common, dir, format) = match &cli.command {
        Command::Demo { out, format, .. } => (None, out.clone(), *format),
        Command::Apply { common, .. }
        | Command::Compose { common }
        | Command::ComposeAll { common }
        | Command::Bind { common }
        | Command::Sequence { common }
        | Command::Orders { common }
        | Command::Expand { common, .. }
        | Command::Universe { common, .. }
        | Command::Canon { common } => (Some(common), common.out.clone(), common.format),
    };
    let mut s = Session { out, artifacts: Vec::new(), format };
    let rules = common.map(|c| load_rules(&c.rules)).transpose()?.unwrap_or_default();
    let graphs = common.map(|c| load_graphs(&c.graphs)).transpose()?.unwrap_or_default();

    match cli.command {
        Command::Apply { all_matches, proper_only, .. } => {
            let [rule] = <[Rule; 1]>::try_from(exactly(rules, 1, "--rule")?).ok().unwrap();
            if graphs.is_empty() {
                return Err(Failure::Input("apply needs at least one --graph".into()));
            }
            let hosts: Vec<MolGraph> =
                graphs.iter().flat_map(|g| g.connected_components().components().to_vec()).collect();
            let hosts = ComponentMultiset::new(hosts).expect("components are connected");
            let mut found: Vec<(CanonicalCode, MolGraph)> = Vec::new();
            for d in rewrite::derivations(&rule, &hosts) {
                if proper_only && !rewrite::is_proper(&d) {
                    continue;
                }
                let (g, _) = d.outputs.union();
                let code = g.canonical_code();
                if found.iter().any(|(c, _)| *c == code) {
                    continue;
                }
                s.say(format!(
                    "{} -> {}",
                    hosts.components().iter().map(MolGraph::formula).collect::<Vec<_>>().join(" + "),
                    d.outputs.components().iter().map(MolGraph::formula).collect::<Vec<_>>().join(" + ")
                ));
                found.push((code, g));
                if !all_matches {
                    break;
                }
            }
            if found.is_empty() {
                return Err(Failure::Domain(format!("rule {} has no valid match", rule.name())));
            }
            found.sort_by(|a, b| a.0.cmp(&b.0));
            for (_, g) in &found {
                s.graph(g);
            }
        }
        Command::Compose { .. } | Command::ComposeAll { .. } => {
            let full = matches!(cli.command, Command::Compose { .. });
            let [p1, p2] = <[Rule; 2]>::try_from(exactly(rules, 2, "--rule")?).ok().unwrap();
            let mm = compose::build_match_matrix(&p1, &p2);
            let selections = compose::enumerate_selections(&mm);
            let matchings = compose::enumerate_matchings(&mm);
            s.say(format!(
                "{} raw selections, 1 all-unmatched, {} overlapping",
                mm.raw_selection_count(),
                selections.len() - matchings.len()
            ));
            let mut set = RuleSet::new();
            let mut rejected = 0;
            for mu in matchings {
                if full && !mu.is_full() {
                    continue;
                }
                match compose::compose(&p1, &p2, &mu) {
                    Ok(r) if !r.vertices().is_empty() => {
                        set.entry(r.canonical_code()).or_insert(r);
                    }
                    Ok(_) => {}
                    Err(_) => rejected += 1,
                }
            }
            let set = non_empty(set, "valid composition")?;
            s.say(format!("{} composite rules, {} matchings rejected", set.len(), rejected));
            for r in set.values() {
                s.say(summary(r));
            }
            s.rules(&set);
        }
        Command::Bind { .. } => {
            let [g] = <[MolGraph; 1]>::try_from(exactly(graphs, 1, "--graph")?).ok().unwrap();
            let mut set = RuleSet::new();
            for r in &rules {
                set.extend(compose::bind(&g, r));
            }
            if rules.is_empty() {
                return Err(Failure::Input("bind needs at least one --rule".into()));
            }
            let set = non_empty(set, "binding")?;
            s.say(format!("{} bound rules", set.len()));
            s.rules(&set);
        }
        Command::Sequence { .. } => {
            let mut chain = rules;
            if graphs.len() > 1 {
                return Err(Failure::Input("sequence takes at most one --graph".into()));
            }
            if let Some(g) = graphs.first() {
                chain.push(compose::binding_rule(g));
            }
            if chain.is_empty() {
                return Err(Failure::Input("sequence needs at least one --rule".into()));
            }
            let set = non_empty(compose::compose_sequence(&chain), "composite for this sequence")?;
            s.say(format!("{} composite rules", set.len()));
            for r in set.values() {
                s.say(summary(r));
            }
            s.rules(&set);
        }
        Command::Orders { .. } => {
            if rules.is_empty() {
                return Err(Failure::Input("orders needs at least one --rule".into()));
            }
            let orders = compose::find_orders(&rules);
            if orders.is_empty() {
                return Err(Failure::Domain("no order composes".into()));
            }
            for o in orders {
                s.say(o.iter().map(|&i| rules[i].name()).collect::<Vec<_>>().join(" "));
            }
        }
        Command::Expand { max_atoms, max_species, max_rounds, .. } => {
            if graphs.is_empty() || rules.is_empty() {
                return Err(Failure::Input("expand needs --graph and --rule".into()));
            }
            let limits = Limits { max_species, max_atoms_per_species: max_atoms, max_rounds };
            let net = chemistry::expand_network(&graphs, &ruleset(rules), limits);
            s.say(format!("{} species, {} reactions", net.species.len(), net.hyperedges.len()));
            match s.format {
                Format::Dot => s.artifacts.push(Artifact { stem: "network".into(), text: io::network_to_dot(&net) }),
                Format::Gml => {
                    for sp in &net.species {
                        s.graph(&sp.graph);
                    }
                }
            }
        }
        Command::Universe { max_len, syntactic, .. } => {
            if graphs.is_empty() || rules.is_empty() {
                return Err(Failure::Input("universe needs --graph and --rule".into()));
            }
            let rs = ruleset(rules);
            let report = chemistry::composition_universe(&rs, &graphs, max_len);
            s.say(report.count().to_string());
            s.say(format!(
                "new per length: {}",
                report.new_per_length.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
            ));
            s.say(format!(
                "binding counted within k: {}",
                report.count_up_to(max_len.saturating_sub(1))
            ));
            s.say(format!("including rederived bound graphs: {}", report.count() + report.seeds_rederived));
            if syntactic {
                let counts = chemistry::universe_counts(&rs, &graphs, max_len, Dedup::Syntactic);
                s.say(format!("syntactic dedup: {}", counts.iter().sum::<usize>()));
                s.say(format!(
                    "syntactic dedup, binding counted within k: {}",
                    counts.iter().take(max_len.saturating_sub(1)).sum::<usize>()
                ));
            }
        }
        Command::Demo { which: Demo::Formose, .. } => {
            let rs = chemistry::formose_ruleset();
            let chain = chemistry::formose_chain(&rs);
            let levels = compose::compose_sequence_traced(&chain);
            let metas = chemistry::formose_meta_rules(&rs);
            let Some((code, meta)) = metas.iter().next() else {
                return Err(Failure::Domain("the Formose chain yields no meta-rule".into()));
            };
            let mut path = vec![meta.clone()];
            let mut parent = levels.last().and_then(|l| l.get(code)).and_then(|(_, p)| p.clone());
            for level in levels.iter().rev().skip(1) {
                let Some(p) = parent else { break };
                let (r, pp) = &level[&p];
                path.push(r.clone());
                parent = pp.clone();
            }
            path.reverse();
            for (i, r) in path.iter().enumerate() {
                s.say(format!("{} {}", i + 1, summary(r)));
            }
            let l = meta.left_graph().graph.connected_components().count();
            let r = meta.right_graph().graph.connected_components().count();
            s.say(format!("{l} carbonyl components → {r} product components"));
            for (i, r) in path.iter().enumerate() {
                let text = match s.format {
                    Format::Gml => io::serialize_rule(r),
                    Format::Dot => io::rule_to_dot(r),
                };
                s.artifacts.push(Artifact { stem: format!("{:02}-{}", i + 1, r.canonical_code().hash_hex()), text });
            }
        }
        Command::Canon { .. } => {
            if graphs.is_empty() && rules.is_empty() {
                return Err(Failure::Input("canon needs --graph or --rule".into()));
            }
            for g in &graphs {
                s.say(format!("graph {}", g.canonical_code().hash_hex()));
            }
            for r in &rules {
                s.say(format!("rule {} {}", r.name(), r.canonical_code().hash_hex()));
            }
        }
    }
    s.finish(dir.as_deref())
}

/// Runs the command line on `args` (program name first) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
