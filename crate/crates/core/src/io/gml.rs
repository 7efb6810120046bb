//! GML-style documents for graphs and rules.
//!
//! ```text
//! graph [
//!   node [ id 0 label "C" ]
//!   node [ id 1 label "O" ]
//!   edge [ source 0 target 1 label "=" ]
//! ]
//! ```
//!
//! A rule document has `left`, `context` and `right` sections, each holding
//! nodes and edges. Ids are shared between the sections.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::ParseError;
use crate::graph::{Label, MolGraph};
use crate::rule::{Rule, RuleEdge, RuleVertex, Violation};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Key(String),
    Int(i64),
    Str(String),
    Open,
    Close,
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn syntax(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line: pos.line, column: pos.column, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<(Token, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        if c.is_whitespace() {
            bump!();
        } else if c == '#' {
            while !matches!(chars.peek(), None | Some('\n')) {
                bump!();
            }
        } else if c == '[' {
            bump!();
            out.push((Token::Open, pos));
        } else if c == ']' {
            bump!();
            out.push((Token::Close, pos));
        } else if c == '"' {
            bump!();
            let mut s = String::new();
            loop {
                match bump!() {
                    None => return Err(syntax(pos, "unterminated string")),
                    Some('"') => break,
                    Some('\\') => match bump!() {
                        Some(e @ ('"' | '\\')) => s.push(e),
                        Some('n') => s.push('\n'),
                        _ => return Err(syntax(Pos { line, column }, "invalid escape")),
                    },
                    Some(ch) => s.push(ch),
                }
            }
            out.push((Token::Str(s), pos));
        } else if c == '-' || c.is_ascii_digit() {
            let mut s = String::new();
            s.push(bump!().unwrap());
            while chars.peek().is_some_and(|d| d.is_ascii_digit()) {
                s.push(bump!().unwrap());
            }
            let n = s.parse().map_err(|_| syntax(pos, format!("invalid integer {s:?}")))?;
            out.push((Token::Int(n), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while chars.peek().is_some_and(|d| d.is_ascii_alphanumeric() || *d == '_') {
                s.push(bump!().unwrap());
            }
            out.push((Token::Key(s), pos));
        } else {
            return Err(syntax(pos, format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum Value {
    Int(i64),
    Str(String),
    List(Vec<Entry>),
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: Value,
    pos: Pos,
}

struct Parser {
    tokens: Vec<(Token, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(text)?;
        let lines = text.split('\n').count();
        let last = text.rsplit('\n').next().unwrap_or("");
        let end = Pos { line: lines, column: last.chars().count() + 1 };
        Ok(Parser { tokens, at: 0, end })
    }

    fn pos(&self) -> Pos {
        self.tokens.get(self.at).map_or(self.end, |t| t.1)
    }

    fn entries(&mut self, nested: bool) -> Result<Vec<Entry>, ParseError> {
        let mut out = Vec::new();
        loop {
            let Some((tok, pos)) = self.tokens.get(self.at).cloned() else {
                if nested {
                    return Err(syntax(self.end, "missing ']'"));
                }
                return Ok(out);
            };
            self.at += 1;
            let key = match tok {
                Token::Close if nested => return Ok(out),
                Token::Key(k) => k,
                other => return Err(syntax(pos, format!("expected a key, found {}", describe(&other)))),
            };
            let vpos = self.pos();
            let value = match self.tokens.get(self.at).cloned() {
                Some((Token::Int(n), _)) => Value::Int(n),
                Some((Token::Str(s), _)) => Value::Str(s),
                Some((Token::Open, _)) => {
                    self.at += 1;
                    Value::List(self.entries(true)?)
                }
                Some((other, _)) => {
                    return Err(syntax(vpos, format!("expected a value for {key:?}, found {}", describe(&other))))
                }
                None => return Err(syntax(vpos, format!("expected a value for {key:?}"))),
            };
            if !matches!(value, Value::List(_)) {
                self.at += 1;
            }
            out.push(Entry { key, value, pos });
        }
    }
}

fn describe(t: &Token) -> String {
    match t {
        Token::Key(k) => format!("key {k:?}"),
        Token::Int(n) => format!("integer {n}"),
        Token::Str(s) => format!("string {s:?}"),
        Token::Open => "'['".to_string(),
        Token::Close => "']'".to_string(),
    }
}

/// The single top-level `name [ ... ]` block.
fn top_level(text: &str, name: &str) -> Result<(Vec<Entry>, Pos), ParseError> {
    let mut p = Parser::new(text)?;
    let entries = p.entries(false)?;
    let mut found = None;
    for e in entries {
        match (&e.value, found.is_some()) {
            (Value::List(items), false) if e.key == name => found = Some((items.clone(), e.pos)),
            _ => return Err(syntax(e.pos, format!("expected exactly one top-level {name:?} block"))),
        }
    }
    found.ok_or_else(|| syntax(Pos { line: 1, column: 1 }, format!("missing {name:?} block")))
}

#[derive(Debug)]
struct Node {
    id: i64,
    label: Label,
}

#[derive(Debug)]
struct EdgeEntry {
    source: i64,
    target: i64,
    label: Label,
    pos: Pos,
}

fn int_field(items: &[Entry], key: &str, owner: Pos) -> Result<i64, ParseError> {
    let mut found = None;
    for e in items.iter().filter(|e| e.key == key) {
        match (&e.value, found) {
            (Value::Int(n), None) => found = Some(*n),
            (Value::Int(_), Some(_)) => return Err(syntax(e.pos, format!("repeated {key:?}"))),
            _ => return Err(syntax(e.pos, format!("{key:?} must be an integer"))),
        }
    }
    found.ok_or_else(|| syntax(owner, format!("missing {key:?}")))
}

fn label_field(items: &[Entry], owner: Pos) -> Result<Label, ParseError> {
    let mut found = None;
    for e in items.iter().filter(|e| e.key == "label") {
        match (&e.value, &found) {
            (Value::Str(s), None) => {
                found = Some(Label::new(s.clone()).map_err(|_| syntax(e.pos, "empty label"))?)
            }
            (Value::Str(_), Some(_)) => return Err(syntax(e.pos, "repeated \"label\"")),
            _ => return Err(syntax(e.pos, "label must be a quoted string")),
        }
    }
    found.ok_or_else(|| syntax(owner, "missing \"label\""))
}

fn check_keys(items: &[Entry], allowed: &[&str]) -> Result<(), ParseError> {
    match items.iter().find(|e| !allowed.contains(&e.key.as_str())) {
        Some(e) => Err(syntax(e.pos, format!("unknown key {:?}", e.key))),
        None => Ok(()),
    }
}

/// Nodes and edges of one section, in document order.
fn elements(items: &[Entry]) -> Result<(Vec<Node>, Vec<EdgeEntry>), ParseError> {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for e in items {
        let Value::List(fields) = &e.value else {
            return Err(syntax(e.pos, format!("{:?} must be a block", e.key)));
        };
        match e.key.as_str() {
            "node" => {
                check_keys(fields, &["id", "label"])?;
                nodes.push(Node {
                    id: int_field(fields, "id", e.pos)?,
                    label: label_field(fields, e.pos)?,
                });
            }
            "edge" => {
                check_keys(fields, &["source", "target", "label"])?;
                edges.push(EdgeEntry {
                    source: int_field(fields, "source", e.pos)?,
                    target: int_field(fields, "target", e.pos)?,
                    label: label_field(fields, e.pos)?,
                    pos: e.pos,
                });
            }
            other => return Err(syntax(e.pos, format!("unknown key {other:?}"))),
        }
    }
    Ok((nodes, edges))
}

fn pair(a: i64, b: i64) -> (i64, i64) {
    (a.min(b), a.max(b))
}

/// Parses a graph document. Vertices are numbered in order of their ids.
pub fn parse_graph(text: &str) -> Result<MolGraph, ParseError> {
    let (items, _) = top_level(text, "graph")?;
    let (nodes, edges) = elements(&items)?;
    let mut labels: BTreeMap<i64, Label> = BTreeMap::new();
    for n in nodes {
        if labels.insert(n.id, n.label).is_some() {
            return Err(ParseError::DuplicateId(n.id));
        }
    }
    let index: BTreeMap<i64, usize> = labels.keys().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut g = MolGraph::new();
    for l in labels.into_values() {
        g.add_vertex(l);
    }
    for e in edges {
        let s = *index.get(&e.source).ok_or(ParseError::Dangling(e.source))?;
        let t = *index.get(&e.target).ok_or(ParseError::Dangling(e.target))?;
        if s == t {
            return Err(syntax(e.pos, format!("self-loop at node {}", e.source)));
        }
        if g.edge_between(s, t).is_some() {
            let (a, b) = pair(e.source, e.target);
            return Err(ParseError::ParallelEdge(a, b));
        }
        g.add_edge(s, t, e.label).expect("endpoints checked");
    }
    Ok(g)
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn write_node(out: &mut String, indent: &str, id: usize, label: &Label) {
    writeln!(out, "{indent}node [ id {id} label {} ]", quote(label.as_str())).unwrap();
}

fn write_edge(out: &mut String, indent: &str, s: usize, t: usize, label: &Label) {
    writeln!(out, "{indent}edge [ source {s} target {t} label {} ]", quote(label.as_str())).unwrap();
}

/// Nodes sorted by id, then edges sorted by endpoints.
pub fn serialize_graph(g: &MolGraph) -> String {
    let mut out = String::from("graph [\n");
    for (i, l) in g.labels().iter().enumerate() {
        write_node(&mut out, "  ", i, l);
    }
    let mut edges: Vec<_> = g.edges().iter().collect();
    edges.sort_by_key(|e| (e.source, e.target));
    for e in edges {
        write_edge(&mut out, "  ", e.source, e.target, &e.label);
    }
    out.push_str("]\n");
    out
}

#[derive(Default)]
struct Sides {
    left: Option<Label>,
    context: Option<Label>,
    right: Option<Label>,
}

/// Parses a rule document. Each id gets its left label from `left` or
/// `context` and its right label from `right` or `context`; an entry in
/// `left` or `right` overrides the context label on that side.
pub fn parse_rule(text: &str) -> Result<Rule, ParseError> {
    let (items, _) = top_level(text, "rule")?;
    let mut name = None;
    let mut sections: [Option<(Vec<Node>, Vec<EdgeEntry>)>; 3] = [None, None, None];
    for e in &items {
        let slot = match e.key.as_str() {
            "ruleID" => {
                let Value::Str(s) = &e.value else {
                    return Err(syntax(e.pos, "ruleID must be a quoted string"));
                };
                if name.replace(s.clone()).is_some() {
                    return Err(syntax(e.pos, "repeated \"ruleID\""));
                }
                continue;
            }
            "left" => 0,
            "context" => 1,
            "right" => 2,
            other => return Err(syntax(e.pos, format!("unknown key {other:?}"))),
        };
        let Value::List(fields) = &e.value else {
            return Err(syntax(e.pos, format!("{:?} must be a block", e.key)));
        };
        if sections[slot].is_some() {
            return Err(syntax(e.pos, format!("repeated {:?}", e.key)));
        }
        sections[slot] = Some(elements(fields)?);
    }
    let [left, context, right] = sections.map(Option::unwrap_or_default);

    let mut nodes: BTreeMap<i64, Sides> = BTreeMap::new();
    for (slot, (section, _)) in [&left, &context, &right].into_iter().enumerate() {
        for n in section {
            let entry = nodes.entry(n.id).or_default();
            let place = match slot {
                0 => &mut entry.left,
                1 => &mut entry.context,
                _ => &mut entry.right,
            };
            if place.replace(n.label.clone()).is_some() {
                return Err(ParseError::DuplicateId(n.id));
            }
        }
    }
    let index: BTreeMap<i64, usize> = nodes.keys().enumerate().map(|(i, &id)| (id, i)).collect();
    let vertices: Vec<RuleVertex> = nodes
        .values()
        .map(|s| RuleVertex {
            left: s.left.clone().or_else(|| s.context.clone()),
            right: s.right.clone().or_else(|| s.context.clone()),
        })
        .collect();

    let mut edges: BTreeMap<(i64, i64), (Sides, Pos)> = BTreeMap::new();
    for (slot, (_, section)) in [&left, &context, &right].into_iter().enumerate() {
        for e in section {
            if e.source == e.target {
                return Err(syntax(e.pos, format!("self-loop at node {}", e.source)));
            }
            let key = pair(e.source, e.target);
            let entry = edges.entry(key).or_insert_with(|| (Sides::default(), e.pos));
            let place = match slot {
                0 => &mut entry.0.left,
                1 => &mut entry.0.context,
                _ => &mut entry.0.right,
            };
            if place.replace(e.label.clone()).is_some() {
                return Err(ParseError::ParallelEdge(key.0, key.1));
            }
        }
    }
    let mut rule_edges = Vec::new();
    for (&(a, b), (s, _)) in &edges {
        let left = s.left.clone().or_else(|| s.context.clone());
        let right = s.right.clone().or_else(|| s.context.clone());
        for id in [a, b] {
            let Some(&v) = index.get(&id) else {
                return Err(ParseError::Dangling(id));
            };
            let vx = &vertices[v];
            if (left.is_some() && vx.left.is_none()) || (right.is_some() && vx.right.is_none()) {
                return Err(ParseError::Dangling(id));
            }
        }
        rule_edges.push(RuleEdge { source: index[&a], target: index[&b], left, right });
    }
    Rule::new(name.unwrap_or_default(), vertices, rule_edges).map_err(|v| {
        ParseError::Invalid(v.iter().map(Violation::to_string).collect::<Vec<_>>().join("; "))
    })
}

/// Unchanged elements go to `context`; everything else is split over
/// `left` and `right`.
pub fn serialize_rule(r: &Rule) -> String {
    let mut sections = [String::new(), String::new(), String::new()];
    let ind = "    ";
    for (i, v) in r.vertices().iter().enumerate() {
        match (&v.left, &v.right) {
            (Some(l), Some(rl)) if l == rl => write_node(&mut sections[1], ind, i, l),
            (l, rl) => {
                if let Some(l) = l {
                    write_node(&mut sections[0], ind, i, l);
                }
                if let Some(rl) = rl {
                    write_node(&mut sections[2], ind, i, rl);
                }
            }
        }
    }
    let mut edges: Vec<_> = r.edges().iter().collect();
    edges.sort_by_key(|e| (e.source, e.target));
    for e in edges {
        match (&e.left, &e.right) {
            (Some(l), Some(rl)) if l == rl => write_edge(&mut sections[1], ind, e.source, e.target, l),
            (l, rl) => {
                if let Some(l) = l {
                    write_edge(&mut sections[0], ind, e.source, e.target, l);
                }
                if let Some(rl) = rl {
                    write_edge(&mut sections[2], ind, e.source, e.target, rl);
                }
            }
        }
    }
    let mut out = format!("rule [\n  ruleID {}\n", quote(r.name()));
    for (key, body) in ["left", "context", "right"].iter().zip(&sections) {
        writeln!(out, "  {key} [").unwrap();
        out.push_str(body);
        out.push_str("  ]\n");
    }
    out.push_str("]\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemistry::{formose_ruleset, molecules};

    #[test]
    fn formaldehyde_document() {
        let text = r#"
            # CH2O
            graph [
              node [ id 10 label "C" ] node [ id 11 label "O" ]
              node [ id 12 label "H" ] node [ id 13 label "H" ]
              edge [ source 10 target 11 label "=" ]
              edge [ source 10 target 12 label "-" ]
              edge [ source 13 target 10 label "-" ]
            ]"#;
        let g = parse_graph(text).unwrap();
        assert!(g.is_isomorphic(&molecules::formaldehyde()));
        assert_eq!(g.connected_components().count(), 1);
    }

    #[test]
    fn graph_errors() {
        let dup = "graph [ node [ id 1 label \"C\" ] node [ id 1 label \"O\" ] ]";
        assert_eq!(parse_graph(dup), Err(ParseError::DuplicateId(1)));
        let dangling = "graph [ node [ id 1 label \"C\" ] edge [ source 1 target 2 label \"-\" ] ]";
        assert_eq!(parse_graph(dangling), Err(ParseError::Dangling(2)));
        let parallel = "graph [ node [ id 1 label \"C\" ] node [ id 2 label \"C\" ]
            edge [ source 1 target 2 label \"-\" ] edge [ source 2 target 1 label \"=\" ] ]";
        assert_eq!(parse_graph(parallel), Err(ParseError::ParallelEdge(1, 2)));
        match parse_graph("graph [\n  node [ id x ]\n]") {
            Err(ParseError::Syntax { line: 2, column: 13, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_graph("graph [ node [ id 1 label \"C\" ]"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn graph_round_trip() {
        let g = molecules::glycolaldehyde();
        let text = serialize_graph(&g);
        assert_eq!(parse_graph(&text).unwrap(), g);
        assert_eq!(serialize_graph(&parse_graph(&text).unwrap()), text);
    }

    #[test]
    fn p1_document_layout() {
        let p1 = formose_ruleset().rule("p1").unwrap().clone();
        let text = serialize_rule(&p1);
        let (items, _) = top_level(&text, "rule").unwrap();
        let count = |key: &str, kind: &str| {
            items
                .iter()
                .filter(|e| e.key == key)
                .map(|e| match &e.value {
                    Value::List(l) => l.iter().filter(|x| x.key == kind).count(),
                    _ => 0,
                })
                .sum::<usize>()
        };
        assert_eq!(count("context", "node"), 4);
        assert_eq!(count("left", "node") + count("right", "node"), 0);
        assert_eq!(count("left", "edge"), 3);
        assert_eq!(count("right", "edge"), 3);
        assert_eq!(count("context", "edge"), 0);
        assert_eq!(parse_rule(&text).unwrap().canonical_code(), p1.canonical_code());
    }

    #[test]
    fn dangling_rule_edge() {
        let text = r#"rule [ ruleID "bad"
            left [ node [ id 1 label "C" ] ]
            context [ node [ id 2 label "C" ] ]
            right [ edge [ source 1 target 2 label "-" ] ] ]"#;
        let err = parse_rule(text).unwrap_err();
        assert_eq!(err, ParseError::Dangling(1));
        assert!(err.to_string().contains("dangling"));
    }

    #[test]
    fn context_label_override() {
        let text = r#"rule [ ruleID "relabel"
            context [ node [ id 0 label "C" ] ]
            right [ node [ id 0 label "N" ] ] ]"#;
        let r = parse_rule(text).unwrap();
        assert_eq!(r.vertices()[0].left, Some(Label::from("C")));
        assert_eq!(r.vertices()[0].right, Some(Label::from("N")));
    }
}
