// SPDX-License-Identifier: Apache-2.0

//! Text format for lattices, graphs, morphisms and rules.
//!
//! ```text
//! # comments run to the end of the line
//! lattice L flat { a b c }
//! lattice P poset { elements: lo mid hi; covers: lo < mid, mid < hi }
//! graph G over L { node x : a; node y; edge e : x -> y : b }
//! morphism f : G -> H { x -> u; y -> v; e -> d }
//! rule r { L G; K G0; R G1; L' T; K' T0; l f0; r f1; tL f2; tK f3; l' f4 }
//! ```
//!
//! Newlines separate items like `;`. Omitted labels are ⊥. Identifiers that
//! contain separators or spaces can be written in double quotes. A rule may
//! add `R' g; r' m; tR m` to fix its right-hand type graph.

use std::fmt::{self, Write as _};
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use crate::graph::{GraphBuilder, GraphRef, LGraph, Morphism};
use crate::lattice::Lattice;
use crate::rewrite::{PbpoRule, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownReference,
    DuplicateName,
    Invalid,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::UnknownReference => "unknown reference",
            ParseErrorKind::DuplicateName => "duplicate name",
            ParseErrorKind::Invalid => "invalid declaration",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Open,
    Close,
    Semi,
    Newline,
    Colon,
    Comma,
    Less,
    Arrow,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SPECIAL: &[char] = &['{', '}', ';', ':', ',', '<', '"', '#'];

fn is_ident_char(c: char) -> bool {
    !c.is_whitespace() && !SPECIAL.contains(&c)
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        let tok = match c {
            '\n' => {
                bump(&mut chars);
                Tok::Newline
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
                continue;
            }
            c if c.is_whitespace() => {
                bump(&mut chars);
                continue;
            }
            '{' | '}' | ';' | ':' | ',' | '<' => {
                bump(&mut chars);
                match c {
                    '{' => Tok::Open,
                    '}' => Tok::Close,
                    ';' => Tok::Semi,
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    _ => Tok::Less,
                }
            }
            '"' => {
                bump(&mut chars);
                let mut s = String::new();
                loop {
                    match bump(&mut chars) {
                        Some('"') => break,
                        Some('\\') => match bump(&mut chars) {
                            Some(c) => s.push(c),
                            None => break,
                        },
                        Some('\n') | None => {
                            return Err(ParseError {
                                kind: ParseErrorKind::Syntax,
                                line: l0,
                                col: c0,
                                message: "unterminated string".into(),
                            })
                        }
                        Some(c) => s.push(c),
                    }
                }
                Tok::Quoted(s)
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_ident_char(c) {
                        break;
                    }
                    if c == '-' {
                        let mut ahead = chars.clone();
                        ahead.next();
                        if ahead.peek() == Some(&'>') {
                            break;
                        }
                    }
                    s.push(c);
                    bump(&mut chars);
                }
                if s.is_empty() {
                    // "->"
                    bump(&mut chars);
                    bump(&mut chars);
                    Tok::Arrow
                } else {
                    Tok::Ident(s)
                }
            }
        };
        out.push(Token { tok, line: l0, col: c0 });
    }
    Ok(out)
}

/// A graph together with the name of its lattice.
#[derive(Debug, Clone)]
pub struct GraphDecl {
    pub lattice: String,
    pub graph: GraphRef,
}

#[derive(Debug, Clone)]
pub struct MorphismDecl {
    pub source: String,
    pub target: String,
    pub morphism: Morphism,
}

/// The names a rule declaration refers to, in declaration order.
#[derive(Debug, Clone)]
pub struct RuleDecl {
    pub parts: Vec<(String, String)>,
    pub rule: Rule,
    /// Present when the declaration fixes `R′`, `r′` and `t_R`.
    pub pbpo: Option<PbpoRule>,
}

#[derive(Debug, Clone)]
pub struct LatticeDecl {
    pub lattice: Arc<Lattice>,
    /// Base elements when declared flat.
    pub flat: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub lattices: IndexMap<String, LatticeDecl>,
    pub graphs: IndexMap<String, GraphDecl>,
    pub morphisms: IndexMap<String, MorphismDecl>,
    pub rules: IndexMap<String, RuleDecl>,
}

const GRAPH_PARTS: [&str; 5] = ["L", "K", "R", "L'", "K'"];
const MORPHISM_PARTS: [&str; 5] = ["l", "r", "tL", "tK", "l'"];
const PBPO_PARTS: [&str; 3] = ["R'", "r'", "tR"];

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(src: &str) -> Result<Workspace, ParseError> {
        let mut ws = Workspace::new();
        ws.extend_from_str(src)?;
        Ok(ws)
    }

    /// Adds the declarations in `src`; earlier declarations stay visible.
    pub fn extend_from_str(&mut self, src: &str) -> Result<(), ParseError> {
        let toks = lex(src)?;
        Parser { toks, pos: 0, ws: self }.file()
    }

    pub fn graph(&self, name: &str) -> Option<&GraphRef> {
        self.graphs.get(name).map(|d| &d.graph)
    }

    pub fn morphism(&self, name: &str) -> Option<&Morphism> {
        self.morphisms.get(name).map(|d| &d.morphism)
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.get(name).map(|d| &d.rule)
    }

    pub fn lattice(&self, name: &str) -> Option<&Arc<Lattice>> {
        self.lattices.get(name).map(|d| &d.lattice)
    }

    /// Name of a lattice that is the same object as `lat`.
    pub fn lattice_name(&self, lat: &Arc<Lattice>) -> Option<&str> {
        self.lattices.iter().find(|(_, d)| Arc::ptr_eq(&d.lattice, lat)).map(|(n, _)| n.as_str())
    }

    /// Adds a graph under a fresh name, registering an anonymous lattice name
    /// if needed.
    pub fn insert_graph(&mut self, name: &str, graph: GraphRef) {
        let lattice = match self.lattice_name(graph.lattice()) {
            Some(n) => n.to_string(),
            None => {
                let n = fresh_name(&self.lattices, "lattice");
                self.lattices.insert(n.clone(), LatticeDecl { lattice: graph.lattice().clone(), flat: None });
                n
            }
        };
        self.graphs.insert(name.to_string(), GraphDecl { lattice, graph });
    }

    /// Adds a rule together with its graphs and morphisms, which are named
    /// `<name>_<part>` with primes spelled `p`.
    pub fn insert_rule(&mut self, name: &str, rule: &PbpoRule, with_rhs_type: bool) {
        let r = rule.rule();
        let mut graphs = vec![
            ("L", r.lhs()),
            ("K", r.interface()),
            ("R", r.rhs()),
            ("L'", r.lhs_type()),
            ("K'", r.interface_type()),
        ];
        let mut morphisms = vec![
            ("l", r.l(), "K", "L"),
            ("r", r.r(), "K", "R"),
            ("tL", r.t_l(), "L", "L'"),
            ("tK", r.t_k(), "K", "K'"),
            ("l'", r.l_prime(), "K'", "L'"),
        ];
        if with_rhs_type {
            graphs.push(("R'", rule.rhs_type()));
            morphisms.extend([("r'", rule.r_prime(), "K'", "R'"), ("tR", rule.t_r(), "R", "R'")]);
        }
        let part = |role: &str| format!("{name}_{}", role.replace('\'', "p"));
        let mut parts = Vec::new();
        for (role, g) in graphs {
            self.insert_graph(&part(role), g.clone());
            parts.push((role.to_string(), part(role)));
        }
        for (role, m, source, target) in morphisms {
            let decl = MorphismDecl { source: part(source), target: part(target), morphism: m.clone() };
            self.morphisms.insert(part(role), decl);
            parts.push((role.to_string(), part(role)));
        }
        let pbpo = with_rhs_type.then(|| rule.clone());
        self.rules.insert(name.to_string(), RuleDecl { parts, rule: r.clone(), pbpo });
    }
}

fn fresh_name<V>(map: &IndexMap<String, V>, base: &str) -> String {
    (0..).map(|i| format!("{base}{i}")).find(|n| !map.contains_key(n)).expect("unbounded")
}

struct Parser<'w> {
    toks: Vec<Token>,
    pos: usize,
    ws: &'w mut Workspace,
}

type PResult<T> = Result<T, ParseError>;

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().or(self.toks.last()).map_or((1, 1), |t| (t.line, t.col))
    }

    fn err<T>(&self, kind: ParseErrorKind, message: impl Into<String>) -> PResult<T> {
        let (line, col) = self.here();
        Err(ParseError { kind, line, col, message: message.into() })
    }

    fn err_at<T>(&self, at: (usize, usize), kind: ParseErrorKind, message: impl Into<String>) -> PResult<T> {
        Err(ParseError { kind, line: at.0, col: at.1, message: message.into() })
    }

    fn skip_newlines(&mut self) {
        while self.peek().is_some_and(|t| t.tok == Tok::Newline) {
            self.pos += 1;
        }
    }

    fn skip_separators(&mut self) {
        while self.peek().is_some_and(|t| matches!(t.tok, Tok::Newline | Tok::Semi)) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if self.peek().is_some_and(|t| t.tok == tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(ParseErrorKind::Syntax, format!("expected {what}"))
        }
    }

    fn eat(&mut self, tok: Tok) -> bool {
        if self.peek().is_some_and(|t| t.tok == tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// An identifier or quoted string, with its position.
    fn name(&mut self, what: &str) -> PResult<(String, (usize, usize))> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s) | Tok::Quoted(s), line, col }) => {
                let out = (s.clone(), (*line, *col));
                self.pos += 1;
                Ok(out)
            }
            _ => self.err(ParseErrorKind::Syntax, format!("expected {what}")),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), .. }) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(ParseErrorKind::Syntax, format!("expected `{kw}`")),
        }
    }

    fn file(&mut self) -> PResult<()> {
        loop {
            self.skip_separators();
            let Some(t) = self.peek() else { return Ok(()) };
            match &t.tok {
                Tok::Ident(kw) if kw == "lattice" => self.lattice()?,
                Tok::Ident(kw) if kw == "graph" => self.graph()?,
                Tok::Ident(kw) if kw == "morphism" => self.morphism()?,
                Tok::Ident(kw) if kw == "rule" => self.rule()?,
                _ => return self.err(ParseErrorKind::Syntax, "expected `lattice`, `graph`, `morphism` or `rule`"),
            }
        }
    }

    fn fresh<V>(&self, map: &IndexMap<String, V>, name: &str, at: (usize, usize), kind: &str) -> PResult<()> {
        if map.contains_key(name) {
            return self.err_at(at, ParseErrorKind::DuplicateName, format!("{kind} `{name}` already declared"));
        }
        Ok(())
    }

    fn lattice(&mut self) -> PResult<()> {
        self.pos += 1;
        let (name, at) = self.name("lattice name")?;
        self.fresh(&self.ws.lattices, &name, at, "lattice")?;
        let (kind, kind_at) = self.name("`flat` or `poset`")?;
        self.skip_newlines();
        self.expect(Tok::Open, "`{`")?;
        let decl = match kind.as_str() {
            "flat" => {
                let mut base = Vec::new();
                loop {
                    self.skip_separators();
                    if self.eat(Tok::Close) {
                        break;
                    }
                    base.push(self.name("element")?.0);
                    self.eat(Tok::Comma);
                }
                match Lattice::flat(&base) {
                    Ok(l) => LatticeDecl { lattice: Arc::new(l), flat: Some(base) },
                    Err(e) => return self.err_at(at, ParseErrorKind::Invalid, e.to_string()),
                }
            }
            "poset" => {
                self.skip_separators();
                self.keyword("elements")?;
                self.expect(Tok::Colon, "`:`")?;
                let mut elements = Vec::new();
                while let Some(Token { tok: Tok::Ident(_) | Tok::Quoted(_), .. }) = self.peek() {
                    elements.push(self.name("element")?.0);
                    self.eat(Tok::Comma);
                }
                self.skip_separators();
                let mut covers = Vec::new();
                if !self.eat(Tok::Close) {
                    self.keyword("covers")?;
                    self.expect(Tok::Colon, "`:`")?;
                    loop {
                        self.skip_newlines();
                        if matches!(self.peek().map(|t| &t.tok), Some(Tok::Close | Tok::Semi)) {
                            break;
                        }
                        let lo = self.name("element")?.0;
                        self.expect(Tok::Less, "`<`")?;
                        let hi = self.name("element")?.0;
                        covers.push((lo, hi));
                        if !self.eat(Tok::Comma) {
                            break;
                        }
                    }
                    self.skip_separators();
                    self.expect(Tok::Close, "`}`")?;
                }
                match Lattice::from_poset(&elements, &covers) {
                    Ok(l) => LatticeDecl { lattice: Arc::new(l), flat: None },
                    Err(e) => return self.err_at(at, ParseErrorKind::Invalid, e.to_string()),
                }
            }
            _ => return self.err_at(kind_at, ParseErrorKind::Syntax, "expected `flat` or `poset`"),
        };
        self.ws.lattices.insert(name, decl);
        Ok(())
    }

    fn graph(&mut self) -> PResult<()> {
        self.pos += 1;
        let (name, at) = self.name("graph name")?;
        self.fresh(&self.ws.graphs, &name, at, "graph")?;
        self.keyword("over")?;
        let (lname, lat_at) = self.name("lattice name")?;
        let Some(lat) = self.ws.lattice(&lname).cloned() else {
            return self.err_at(lat_at, ParseErrorKind::UnknownReference, format!("no lattice `{lname}`"));
        };
        self.skip_newlines();
        self.expect(Tok::Open, "`{`")?;
        let mut b = GraphBuilder::new(lat.clone());
        let mut vertices: Vec<String> = Vec::new();
        let mut edges: Vec<String> = Vec::new();
        loop {
            self.skip_separators();
            if self.eat(Tok::Close) {
                break;
            }
            let (kw, kw_at) = self.name("`node` or `edge`")?;
            match kw.as_str() {
                "node" => {
                    let (id, id_at) = self.name("node id")?;
                    if vertices.contains(&id) || edges.contains(&id) {
                        return self.err_at(id_at, ParseErrorKind::DuplicateName, format!("`{id}` already declared"));
                    }
                    let label = self.opt_label(&lat)?;
                    b.vertex(id.clone(), label);
                    vertices.push(id);
                }
                "edge" => {
                    let (id, id_at) = self.name("edge id")?;
                    if vertices.contains(&id) || edges.contains(&id) {
                        return self.err_at(id_at, ParseErrorKind::DuplicateName, format!("`{id}` already declared"));
                    }
                    self.expect(Tok::Colon, "`:`")?;
                    let (s, s_at) = self.name("source node")?;
                    self.expect(Tok::Arrow, "`->`")?;
                    let (t, t_at) = self.name("target node")?;
                    for (v, v_at) in [(&s, s_at), (&t, t_at)] {
                        if !vertices.contains(v) {
                            return self.err_at(v_at, ParseErrorKind::UnknownReference, format!("no node `{v}`"));
                        }
                    }
                    let label = self.opt_label(&lat)?;
                    b.edge(id.clone(), s, t, label);
                    edges.push(id);
                }
                _ => return self.err_at(kw_at, ParseErrorKind::Syntax, "expected `node` or `edge`"),
            }
        }
        let graph = match b.build() {
            Ok(g) => Arc::new(g),
            Err(e) => return self.err_at(at, ParseErrorKind::Invalid, e.to_string()),
        };
        self.ws.graphs.insert(name, GraphDecl { lattice: lname, graph });
        Ok(())
    }

    fn opt_label(&mut self, lat: &Lattice) -> PResult<crate::lattice::Label> {
        if !self.eat(Tok::Colon) {
            return Ok(lat.bottom());
        }
        let (l, at) = self.name("label")?;
        match lat.get(&l) {
            Ok(x) => Ok(x),
            Err(_) => self.err_at(at, ParseErrorKind::UnknownReference, format!("no label `{l}`")),
        }
    }

    fn morphism(&mut self) -> PResult<()> {
        self.pos += 1;
        let (name, at) = self.name("morphism name")?;
        self.fresh(&self.ws.morphisms, &name, at, "morphism")?;
        self.expect(Tok::Colon, "`:`")?;
        let (sname, s_at) = self.name("source graph")?;
        self.expect(Tok::Arrow, "`->`")?;
        let (tname, t_at) = self.name("target graph")?;
        let mut ends = Vec::new();
        for (n, n_at) in [(&sname, s_at), (&tname, t_at)] {
            match self.ws.graph(n) {
                Some(g) => ends.push(g.clone()),
                None => return self.err_at(n_at, ParseErrorKind::UnknownReference, format!("no graph `{n}`")),
            }
        }
        let (src, tgt) = (ends[0].clone(), ends[1].clone());
        self.skip_newlines();
        self.expect(Tok::Open, "`{`")?;
        let mut vmap: Vec<Option<usize>> = vec![None; src.vertex_count()];
        let mut emap: Vec<Option<usize>> = vec![None; src.edge_count()];
        loop {
            self.skip_separators();
            if self.eat(Tok::Close) {
                break;
            }
            let (a, a_at) = self.name("source element")?;
            self.expect(Tok::Arrow, "`->`")?;
            let (b, b_at) = self.name("target element")?;
            if let Some(v) = src.vertex_index(&a) {
                let Some(w) = tgt.vertex_index(&b) else {
                    return self.err_at(b_at, ParseErrorKind::UnknownReference, format!("no node `{b}` in `{tname}`"));
                };
                if vmap[v].replace(w).is_some() {
                    return self.err_at(a_at, ParseErrorKind::DuplicateName, format!("`{a}` mapped twice"));
                }
            } else if let Some(e) = src.edge_index(&a) {
                let Some(d) = tgt.edge_index(&b) else {
                    return self.err_at(b_at, ParseErrorKind::UnknownReference, format!("no edge `{b}` in `{tname}`"));
                };
                if emap[e].replace(d).is_some() {
                    return self.err_at(a_at, ParseErrorKind::DuplicateName, format!("`{a}` mapped twice"));
                }
            } else {
                return self.err_at(a_at, ParseErrorKind::UnknownReference, format!("no element `{a}` in `{sname}`"));
            }
        }
        if let Some(v) = vmap.iter().position(Option::is_none) {
            let id = &src.vertices()[v].id;
            return self.err_at(at, ParseErrorKind::Invalid, format!("node `{id}` is not mapped"));
        }
        if let Some(e) = emap.iter().position(Option::is_none) {
            let id = &src.edges()[e].id;
            return self.err_at(at, ParseErrorKind::Invalid, format!("edge `{id}` is not mapped"));
        }
        let morphism = Morphism::new(
            src,
            tgt,
            vmap.into_iter().map(Option::unwrap).collect(),
            emap.into_iter().map(Option::unwrap).collect(),
        );
        match morphism {
            Ok(morphism) => {
                self.ws.morphisms.insert(name, MorphismDecl { source: sname, target: tname, morphism });
                Ok(())
            }
            Err(e) => self.err_at(at, ParseErrorKind::Invalid, e.to_string()),
        }
    }

    fn rule(&mut self) -> PResult<()> {
        self.pos += 1;
        let (name, at) = self.name("rule name")?;
        self.fresh(&self.ws.rules, &name, at, "rule")?;
        self.skip_newlines();
        self.expect(Tok::Open, "`{`")?;
        let mut parts: Vec<(String, String)> = Vec::new();
        let mut graphs: IndexMap<&str, GraphRef> = IndexMap::new();
        let mut morphisms: IndexMap<&str, Morphism> = IndexMap::new();
        loop {
            self.skip_separators();
            if self.eat(Tok::Close) {
                break;
            }
            let (role, role_at) = self.name("rule component")?;
            let (target, target_at) = self.name("component name")?;
            let role_key =
                GRAPH_PARTS.iter().chain(MORPHISM_PARTS.iter()).chain(PBPO_PARTS.iter()).find(|r| **r == role).copied();
            let Some(role_key) = role_key else {
                return self.err_at(role_at, ParseErrorKind::Syntax, format!("unknown rule component `{role}`"));
            };
            if parts.iter().any(|(r, _)| r == role_key) {
                return self.err_at(role_at, ParseErrorKind::DuplicateName, format!("component `{role}` given twice"));
            }
            if ["L", "K", "R", "L'", "K'", "R'"].contains(&role_key) {
                let Some(g) = self.ws.graph(&target) else {
                    return self.err_at(target_at, ParseErrorKind::UnknownReference, format!("no graph `{target}`"));
                };
                graphs.insert(role_key, g.clone());
            } else {
                let Some(m) = self.ws.morphism(&target) else {
                    return self.err_at(target_at, ParseErrorKind::UnknownReference, format!("no morphism `{target}`"));
                };
                morphisms.insert(role_key, m.clone());
            }
            parts.push((role_key.to_string(), target));
        }
        let missing: Vec<&str> = GRAPH_PARTS
            .iter()
            .filter(|r| !graphs.contains_key(*r))
            .chain(MORPHISM_PARTS.iter().filter(|r| !morphisms.contains_key(*r)))
            .copied()
            .collect();
        if !missing.is_empty() {
            return self.err_at(at, ParseErrorKind::Invalid, format!("missing components: {}", missing.join(", ")));
        }
        let pbpo_given = PBPO_PARTS.iter().filter(|r| graphs.contains_key(*r) || morphisms.contains_key(*r)).count();
        if pbpo_given != 0 && pbpo_given != 3 {
            return self.err_at(at, ParseErrorKind::Invalid, "`R'`, `r'` and `tR` must be given together");
        }
        // each morphism must connect the graphs named for its role
        let ends = [
            ("l", "K", "L"),
            ("r", "K", "R"),
            ("tL", "L", "L'"),
            ("tK", "K", "K'"),
            ("l'", "K'", "L'"),
            ("r'", "K'", "R'"),
            ("tR", "R", "R'"),
        ];
        for (m, s, t) in ends {
            if let Some(mor) = morphisms.get(m) {
                if !Arc::ptr_eq(mor.source(), &graphs[s]) || !Arc::ptr_eq(mor.target(), &graphs[t]) {
                    return self.err_at(at, ParseErrorKind::Invalid, format!("`{m}` must go from `{s}` to `{t}`"));
                }
            }
        }
        let m = |k: &str| morphisms[k].clone();
        let rule = match Rule::new(m("l"), m("r"), m("tL"), m("tK"), m("l'")) {
            Ok(r) => r,
            Err(e) => return self.err_at(at, ParseErrorKind::Invalid, e.to_string()),
        };
        let pbpo = if pbpo_given == 3 {
            match PbpoRule::new(rule.clone(), m("r'"), m("tR")) {
                Ok(p) => Some(p),
                Err(e) => return self.err_at(at, ParseErrorKind::Invalid, e.to_string()),
            }
        } else {
            None
        };
        self.ws.rules.insert(name, RuleDecl { parts, rule, pbpo });
        Ok(())
    }
}

/// Writes `id` bare when the lexer would read it back as one identifier.
pub fn quote(id: &str) -> String {
    let bare = !id.is_empty() && id.chars().all(is_ident_char) && !id.contains("->");
    if bare {
        id.to_string()
    } else {
        let mut s = String::from("\"");
        for c in id.chars() {
            if c == '"' || c == '\\' {
                s.push('\\');
            }
            s.push(c);
        }
        s.push('"');
        s
    }
}

/// One graph declaration.
pub fn write_graph(out: &mut String, name: &str, lattice: &str, g: &LGraph) {
    let lat = g.lattice();
    let label = |x| {
        if x == lat.bottom() {
            String::new()
        } else {
            format!(" : {}", quote(lat.name(x)))
        }
    };
    let _ = writeln!(out, "graph {} over {} {{", quote(name), quote(lattice));
    for v in g.vertices() {
        let _ = writeln!(out, "  node {}{}", quote(&v.id), label(v.label));
    }
    for e in g.edges() {
        let (s, t) = (&g.vertices()[e.src].id, &g.vertices()[e.tgt].id);
        let _ = writeln!(out, "  edge {} : {} -> {}{}", quote(&e.id), quote(s), quote(t), label(e.label));
    }
    out.push_str("}\n");
}

impl fmt::Display for Workspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (name, d) in &self.lattices {
            match &d.flat {
                Some(base) => {
                    let base: Vec<String> = base.iter().map(|b| quote(b)).collect();
                    let _ = writeln!(out, "lattice {} flat {{ {} }}", quote(name), base.join(" "));
                }
                None => {
                    let lat = &d.lattice;
                    let elems: Vec<String> = lat.labels().map(|x| quote(lat.name(x))).collect();
                    let covers: Vec<String> = lat
                        .covers()
                        .into_iter()
                        .map(|(a, b)| format!("{} < {}", quote(lat.name(a)), quote(lat.name(b))))
                        .collect();
                    let _ = write!(out, "lattice {} poset {{ elements: {}", quote(name), elems.join(" "));
                    if !covers.is_empty() {
                        let _ = write!(out, "; covers: {}", covers.join(", "));
                    }
                    out.push_str(" }\n");
                }
            }
        }
        for (name, d) in &self.graphs {
            write_graph(&mut out, name, &d.lattice, &d.graph);
        }
        for (name, d) in &self.morphisms {
            let m = &d.morphism;
            let (s, t) = (m.source(), m.target());
            let mut pairs: Vec<String> = (0..s.vertex_count())
                .map(|v| format!("{} -> {}", quote(&s.vertices()[v].id), quote(&t.vertices()[m.vertex(v)].id)))
                .collect();
            pairs.extend(
                (0..s.edge_count())
                    .map(|e| format!("{} -> {}", quote(&s.edges()[e].id), quote(&t.edges()[m.edge(e)].id))),
            );
            let _ = writeln!(
                out,
                "morphism {} : {} -> {} {{ {} }}",
                quote(name),
                quote(&d.source),
                quote(&d.target),
                pairs.join("; ")
            );
        }
        for (name, d) in &self.rules {
            let parts: Vec<String> = d.parts.iter().map(|(r, n)| format!("{r} {}", quote(n))).collect();
            let _ = writeln!(out, "rule {} {{ {} }}", quote(name), parts.join("; "));
        }
        f.write_str(&out)
    }
}
