// SPDX-License-Identifier: Apache-2.0

//! Rules, rewrite steps and derivations.
//!
//! A rule is the diagram
//!
//! ```text
//!   L  <--l--  K  --r-->  R
//!   |tL        |tK
//!   v          v
//!   L' <--l'-- K'
//! ```
//!
//! A step with match `m: L → G_L` and adherence `α: G_L → L′` pulls `α` back
//! along `l′` to get `G_K`, obtains `u: K → G_K` as the mediator of
//! `(m ∘ l, t_K)`, and pushes out `r` along `u` to get `G_R`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{GraphError, GraphRef, LGraph, Morphism};
use crate::limits::{
    check_pullback_square, check_pushout_square, pullback, pullback_mediator, pushout, pushout_mediator, Cospan,
    LimitError, Span,
};
use crate::matching::{enumerate_adherences, enumerate_matches, is_pbpo_match, is_strong_match, MatchCandidate};
use crate::search::{are_isomorphic, iso_invariant, Search};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    /// Monic matches, strong adherence.
    PbpoPlus,
    /// Arbitrary matches, commuting adherence.
    Pbpo,
    /// Monic matches, commuting adherence.
    PbpoMonic,
}

impl Semantics {
    pub fn monic_matches(self) -> bool {
        !matches!(self, Semantics::Pbpo)
    }

    pub fn strong(self) -> bool {
        matches!(self, Semantics::PbpoPlus)
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::PbpoPlus => "pbpo+",
            Semantics::Pbpo => "pbpo",
            Semantics::PbpoMonic => "pbpo-monic",
        })
    }
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pbpo+" | "pbpo-plus" | "pbpoplus" => Ok(Semantics::PbpoPlus),
            "pbpo" => Ok(Semantics::Pbpo),
            "pbpo-monic" => Ok(Semantics::PbpoMonic),
            _ => Err(format!("unknown semantics `{s}` (expected pbpo+, pbpo or pbpo-monic)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("`{0}` does not fit the rule shape")]
    Shape(&'static str),
}

/// One problem found by rule validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleViolation {
    #[error("{0} square does not commute")]
    NotCommuting(&'static str),
    #[error("left square is not a pullback: {0}")]
    NotPullback(String),
    #[error("right square is not a pushout: {0}")]
    NotPushout(String),
    #[error("typing {0} is not monic")]
    TypingNotMonic(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct RuleReport(pub Vec<RuleViolation>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    l: Morphism,
    r: Morphism,
    t_l: Morphism,
    t_k: Morphism,
    l_prime: Morphism,
}

impl Rule {
    /// Checks only that the five arrows fit together; see [`Rule::validate`].
    pub fn new(l: Morphism, r: Morphism, t_l: Morphism, t_k: Morphism, l_prime: Morphism) -> Result<Rule, RuleError> {
        if !Arc::ptr_eq(l.source(), r.source()) {
            return Err(RuleError::Shape("r"));
        }
        if !Arc::ptr_eq(t_l.source(), l.target()) {
            return Err(RuleError::Shape("tL"));
        }
        if !Arc::ptr_eq(t_k.source(), l.source()) {
            return Err(RuleError::Shape("tK"));
        }
        if !Arc::ptr_eq(l_prime.source(), t_k.target()) || !Arc::ptr_eq(l_prime.target(), t_l.target()) {
            return Err(RuleError::Shape("l'"));
        }
        Ok(Rule { l, r, t_l, t_k, l_prime })
    }

    pub fn lhs(&self) -> &GraphRef {
        self.l.target()
    }
    pub fn interface(&self) -> &GraphRef {
        self.l.source()
    }
    pub fn rhs(&self) -> &GraphRef {
        self.r.target()
    }
    pub fn lhs_type(&self) -> &GraphRef {
        self.t_l.target()
    }
    pub fn interface_type(&self) -> &GraphRef {
        self.t_k.target()
    }
    pub fn l(&self) -> &Morphism {
        &self.l
    }
    pub fn r(&self) -> &Morphism {
        &self.r
    }
    pub fn t_l(&self) -> &Morphism {
        &self.t_l
    }
    pub fn t_k(&self) -> &Morphism {
        &self.t_k
    }
    pub fn l_prime(&self) -> &Morphism {
        &self.l_prime
    }

    fn left_square(&self) -> Vec<RuleViolation> {
        let mut out = Vec::new();
        match check_pullback_square(&self.l, &self.t_k, &self.t_l, &self.l_prime) {
            Ok(()) => {}
            Err(LimitError::NotCommuting) => out.push(RuleViolation::NotCommuting("left")),
            Err(e) => out.push(RuleViolation::NotPullback(e.to_string())),
        }
        out
    }

    /// All violations of the PBPO⁺ rule conditions.
    pub fn violations(&self) -> Vec<RuleViolation> {
        let mut out = self.left_square();
        if !self.t_l.is_mono() {
            out.push(RuleViolation::TypingNotMonic("tL"));
        }
        if !self.t_k.is_mono() {
            out.push(RuleViolation::TypingNotMonic("tK"));
        }
        out
    }

    pub fn validate(&self) -> Result<(), RuleReport> {
        report(self.violations())
    }
}

fn report(v: Vec<RuleViolation>) -> Result<(), RuleReport> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(RuleReport(v))
    }
}

/// A rule extended with a right-hand type graph `R′`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PbpoRule {
    rule: Rule,
    r_prime: Morphism,
    t_r: Morphism,
    pub canonical: bool,
    pub monic_typing: bool,
}

impl PbpoRule {
    pub fn new(rule: Rule, r_prime: Morphism, t_r: Morphism) -> Result<PbpoRule, RuleError> {
        if !Arc::ptr_eq(r_prime.source(), rule.interface_type()) {
            return Err(RuleError::Shape("r'"));
        }
        if !Arc::ptr_eq(t_r.source(), rule.rhs()) || !Arc::ptr_eq(t_r.target(), r_prime.target()) {
            return Err(RuleError::Shape("tR"));
        }
        let mut p = PbpoRule { rule, r_prime, t_r, canonical: false, monic_typing: false };
        p.canonical = p.left_is_pullback() && p.right_is_pushout();
        p.monic_typing = p.rule.t_l.is_mono();
        Ok(p)
    }

    /// Completes a rule with the pushout of `t_K` and `r`.
    pub fn from_rule(rule: Rule) -> PbpoRule {
        let (_, r_prime, t_r) = derive_rhs_typegraph(&rule);
        PbpoRule::new(rule, r_prime, t_r).expect("pushout legs fit the rule")
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }
    pub fn rhs_type(&self) -> &GraphRef {
        self.r_prime.target()
    }
    pub fn r_prime(&self) -> &Morphism {
        &self.r_prime
    }
    pub fn t_r(&self) -> &Morphism {
        &self.t_r
    }

    fn left_is_pullback(&self) -> bool {
        self.rule.left_square().is_empty()
    }

    fn right_is_pushout(&self) -> bool {
        check_pushout_square(&self.rule.t_k, &self.rule.r, &self.r_prime, &self.t_r).is_ok()
    }

    /// Violations of the PBPO rule conditions. Non-canonical squares are
    /// reported only when `require_canonical` is set.
    pub fn violations(&self, require_canonical: bool) -> Vec<RuleViolation> {
        let mut out = Vec::new();
        let r = &self.rule;
        let commutes = |a: Result<Morphism, GraphError>, b: Result<Morphism, GraphError>| match (a, b) {
            (Ok(a), Ok(b)) => a.same_maps(&b),
            _ => false,
        };
        if !commutes(r.t_l.compose(&r.l), r.l_prime.compose(&r.t_k)) {
            out.push(RuleViolation::NotCommuting("left"));
        }
        if !commutes(self.t_r.compose(&r.r), self.r_prime.compose(&r.t_k)) {
            out.push(RuleViolation::NotCommuting("right"));
        }
        if require_canonical && out.is_empty() {
            out.extend(r.left_square());
            if let Err(e) = check_pushout_square(&r.t_k, &r.r, &self.r_prime, &self.t_r) {
                out.push(RuleViolation::NotPushout(e.to_string()));
            }
        }
        out
    }

    pub fn validate(&self, require_canonical: bool) -> Result<(), RuleReport> {
        report(self.violations(require_canonical))
    }
}

/// The pushout `K′ → R′ ← R` of `t_K` and `r`, returned as `(R′, r′, t_R)`.
pub fn derive_rhs_typegraph(rule: &Rule) -> (GraphRef, Morphism, Morphism) {
    let po = pushout(&Span::new(rule.t_k.clone(), rule.r.clone()).expect("tK and r share K"));
    (po.object, po.left, po.right)
}

/// Recomputes the left square as a pullback and the right square as a
/// pushout. The result rewrites exactly like the input.
pub fn canonicalize(rule: &PbpoRule) -> Result<PbpoRule, RuleReport> {
    rule.validate(false)?;
    let r = &rule.rule;
    let c = Cospan::new(r.t_l.clone(), r.l_prime.clone()).expect("typings share L′");
    let pb = pullback(&c);
    let k_to = pullback_mediator(&c, &pb, &r.l, &r.t_k).expect("left square commutes");
    let po = pushout(&Span::new(k_to, r.r.clone()).expect("shared K"));
    let new = Rule::new(pb.left.clone(), po.left.clone(), r.t_l.clone(), pb.right.clone(), r.l_prime.clone())
        .expect("shape preserved");
    Ok(PbpoRule::from_rule(new))
}

/// Everything built during one rewrite step.
#[derive(Debug, Clone)]
pub struct StepTrace {
    pub semantics: Semantics,
    pub rule: Rule,
    pub host: GraphRef,
    pub m: Morphism,
    pub alpha: Morphism,
    pub g_k: GraphRef,
    /// `G_K → G_L`
    pub g_l: Morphism,
    /// `G_K → K′`
    pub u_prime: Morphism,
    /// `K → G_K`
    pub u: Morphism,
    pub result: GraphRef,
    /// `G_K → G_R`
    pub g_r: Morphism,
    /// `R → G_R`
    pub w: Morphism,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("match and adherence are not admissible under {0}")]
    NotAMatch(Semantics),
    #[error("typing tL is not monic")]
    TypingNotMonic,
    #[error("{0} morphisms K → G_K factor tK, expected exactly one")]
    UniquenessViolation(usize),
    #[error("step invariant failed: {0}")]
    AssertFailed(LemmaViolation),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LemmaViolation {
    #[error("top-left square is not a pullback ({0})")]
    TopLeftPullback(String),
    #[error("u is not monic")]
    UNotMonic,
    #[error("no w′ with tR = w′ ∘ w ({0})")]
    NoMediator(String),
    #[error("bottom-right square is not a pushout ({0})")]
    BottomRightPushout(String),
}

pub fn apply_step(
    rule: &Rule,
    m: &Morphism,
    alpha: &Morphism,
    semantics: Semantics,
    check: bool,
) -> Result<StepTrace, StepError> {
    let admissible = match semantics {
        Semantics::PbpoPlus => {
            if !rule.t_l.is_mono() {
                return Err(StepError::TypingNotMonic);
            }
            m.is_mono() && is_strong_match(&rule.t_l, m, alpha)
        }
        Semantics::Pbpo => is_pbpo_match(&rule.t_l, m, alpha),
        Semantics::PbpoMonic => m.is_mono() && is_pbpo_match(&rule.t_l, m, alpha),
    };
    if !admissible {
        return Err(StepError::NotAMatch(semantics));
    }
    let c = Cospan::new(alpha.clone(), rule.l_prime.clone())?;
    let pb = pullback(&c);
    let ml = m.compose(&rule.l).map_err(LimitError::from)?;
    let u = pullback_mediator(&c, &pb, &ml, &rule.t_k)?;
    let po = pushout(&Span::new(u.clone(), rule.r.clone())?);
    let trace = StepTrace {
        semantics,
        rule: rule.clone(),
        host: m.target().clone(),
        m: m.clone(),
        alpha: alpha.clone(),
        g_k: pb.object,
        g_l: pb.left,
        u_prime: pb.right,
        u,
        result: po.object,
        g_r: po.left,
        w: po.right,
    };
    if semantics == Semantics::PbpoPlus {
        if !trace.u.is_mono() {
            return Err(StepError::AssertFailed(LemmaViolation::UNotMonic));
        }
        if check {
            let n = count_u_candidates(&trace);
            if n != 1 {
                return Err(StepError::UniquenessViolation(n));
            }
            check_step_lemmas(&trace).map_err(StepError::AssertFailed)?;
        }
    }
    Ok(trace)
}

/// Number of `v: K → G_K` with `u′ ∘ v = t_K`.
pub fn count_u_candidates(trace: &StepTrace) -> usize {
    let (k, up, tk) = (trace.rule.interface(), &trace.u_prime, &trace.rule.t_k);
    let mut search = Search::new(k, &trace.g_k);
    search.retain_vertices(|v, w| up.vertex(w) == tk.vertex(v));
    search.retain_edges(|e, d| up.edge(d) == tk.edge(e));
    search.count()
}

/// Re-derives the square properties every step must have: `(l, u)` is a
/// pullback of `(m, g_L)`, `u` is monic, and the induced `w′: G_R → R′`
/// makes `(u′, g_R, r′, w′)` a pushout.
pub fn check_step_lemmas(trace: &StepTrace) -> Result<(), LemmaViolation> {
    let rule = &trace.rule;
    check_pullback_square(&rule.l, &trace.u, &trace.m, &trace.g_l)
        .map_err(|e| LemmaViolation::TopLeftPullback(e.to_string()))?;
    if !trace.u.is_mono() {
        return Err(LemmaViolation::UNotMonic);
    }
    let (_, r_prime, t_r) = derive_rhs_typegraph(rule);
    let span = Span::new(trace.u.clone(), rule.r.clone()).map_err(|e| LemmaViolation::NoMediator(e.to_string()))?;
    let po = crate::limits::Pushout { object: trace.result.clone(), left: trace.g_r.clone(), right: trace.w.clone() };
    let ru = r_prime.compose(&trace.u_prime).map_err(|e| LemmaViolation::NoMediator(e.to_string()))?;
    let w_prime = pushout_mediator(&span, &po, &ru, &t_r).map_err(|e| LemmaViolation::NoMediator(e.to_string()))?;
    check_pushout_square(&trace.u_prime, &trace.g_r, &r_prime, &w_prime)
        .map_err(|e| LemmaViolation::BottomRightPushout(e.to_string()))
}

/// All `(m, α)` pairs admissible under `semantics`, in deterministic order.
pub fn admissible_matches(rule: &Rule, host: &GraphRef, semantics: Semantics) -> Vec<MatchCandidate> {
    if semantics == Semantics::PbpoPlus && !rule.t_l.is_mono() {
        return Vec::new();
    }
    enumerate_matches(rule.lhs(), host, semantics.monic_matches())
        .into_par_iter()
        .map(|m| {
            enumerate_adherences(&m, &rule.t_l, semantics.strong())
                .into_iter()
                .map(|alpha| MatchCandidate { m: m.clone(), alpha })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect()
}

/// Applies every admissible step and keeps one trace per isomorphism class
/// of result, in order of first occurrence.
pub fn rewrite_all(
    rule: &Rule,
    host: &GraphRef,
    semantics: Semantics,
    check: bool,
) -> Result<Vec<StepTrace>, StepError> {
    let traces: Vec<StepTrace> = admissible_matches(rule, host, semantics)
        .into_par_iter()
        .map(|c| apply_step(rule, &c.m, &c.alpha, semantics, check))
        .collect::<Result<_, _>>()?;
    Ok(dedup_up_to_iso(traces, |t| &t.result))
}

/// Keeps the first item of every isomorphism class of `key(item)`.
pub fn dedup_up_to_iso<T>(items: Vec<T>, key: impl Fn(&T) -> &GraphRef) -> Vec<T> {
    let mut buckets: HashMap<_, Vec<usize>> = HashMap::new();
    let mut kept: Vec<T> = Vec::new();
    for item in items {
        let g = key(&item);
        let inv = iso_invariant(g);
        let bucket = buckets.entry(inv).or_default();
        if bucket.iter().any(|&i| are_isomorphic(key(&kept[i]), g)) {
            continue;
        }
        bucket.push(kept.len());
        kept.push(item);
    }
    kept
}

/// The first admissible step, if any.
pub fn first_step(
    rule: &Rule,
    host: &GraphRef,
    semantics: Semantics,
    check: bool,
) -> Option<Result<StepTrace, StepError>> {
    admissible_matches(rule, host, semantics).first().map(|c| apply_step(rule, &c.m, &c.alpha, semantics, check))
}

#[derive(Debug, Clone)]
pub struct Derivation {
    pub steps: Vec<StepTrace>,
    pub graphs: Vec<GraphRef>,
    /// True when the last graph admits no further step.
    pub normal_form: bool,
}

impl Derivation {
    pub fn last(&self) -> &GraphRef {
        self.graphs.last().expect("derivation starts with the host")
    }
}

/// Repeatedly applies the first admissible step, renaming each result with
/// [`readable_result`], until no step applies or `max_steps` is reached.
pub fn derive(
    rule: &Rule,
    host: &GraphRef,
    semantics: Semantics,
    max_steps: usize,
    check: bool,
) -> Result<Derivation, StepError> {
    let mut d = Derivation { steps: Vec::new(), graphs: vec![host.clone()], normal_form: false };
    loop {
        let current = d.last().clone();
        match first_step(rule, &current, semantics, check) {
            None => {
                d.normal_form = true;
                return Ok(d);
            }
            Some(_) if d.steps.len() == max_steps => return Ok(d),
            Some(step) => {
                let step = step?;
                let (g, _) = readable_result(&step);
                d.steps.push(step);
                d.graphs.push(g);
            }
        }
    }
}

/// The step result with short identifiers: elements coming from the host
/// keep the host names (joined with `+` when several are merged), elements
/// created by the rule keep the rule's names. Returns the renamed graph and
/// the isomorphism from the raw result onto it.
pub fn readable_result(trace: &StepTrace) -> (GraphRef, Morphism) {
    let g = &trace.result;
    let host = &trace.host;
    let rhs = trace.rule.rhs();
    let mut vnames: Vec<Vec<&str>> = vec![Vec::new(); g.vertex_count()];
    let mut enames: Vec<Vec<&str>> = vec![Vec::new(); g.edge_count()];
    for x in 0..trace.g_k.vertex_count() {
        vnames[trace.g_r.vertex(x)].push(&host.vertices()[trace.g_l.vertex(x)].id);
    }
    for x in 0..trace.g_k.edge_count() {
        enames[trace.g_r.edge(x)].push(&host.edges()[trace.g_l.edge(x)].id);
    }
    let mut vfresh: Vec<Vec<&str>> = vec![Vec::new(); g.vertex_count()];
    let mut efresh: Vec<Vec<&str>> = vec![Vec::new(); g.edge_count()];
    for x in 0..rhs.vertex_count() {
        vfresh[trace.w.vertex(x)].push(&rhs.vertices()[x].id);
    }
    for x in 0..rhs.edge_count() {
        efresh[trace.w.edge(x)].push(&rhs.edges()[x].id);
    }
    let mut names: Vec<String> = Vec::with_capacity(g.size());
    for (a, b) in vnames.iter_mut().zip(vfresh.iter_mut()) {
        names.push(pick(a, b));
    }
    for (a, b) in enames.iter_mut().zip(efresh.iter_mut()) {
        names.push(pick(a, b));
    }
    rename(g, names)
}

fn pick<'a>(own: &mut Vec<&'a str>, fresh: &mut Vec<&'a str>) -> String {
    let list = if own.is_empty() { fresh } else { own };
    list.sort_unstable();
    list.dedup();
    list.join("+")
}

/// Renames elements (vertices first, then edges), adding primes to clashes.
pub fn rename(g: &GraphRef, mut names: Vec<String>) -> (GraphRef, Morphism) {
    let mut seen = std::collections::HashSet::new();
    for n in names.iter_mut() {
        while !seen.insert(n.clone()) {
            n.push('′');
        }
    }
    let nv = g.vertex_count();
    let vertices = g.vertices().iter().zip(&names[..nv]).map(|(v, n)| (n.clone(), v.label)).collect();
    let edges = g.edges().iter().zip(&names[nv..]).map(|(e, n)| (n.clone(), e.src, e.tgt, e.label)).collect();
    let (h, vpos, epos) = LGraph::from_indexed(g.lattice().clone(), vertices, edges);
    let h = Arc::new(h);
    let iso = Morphism::new_unchecked(g.clone(), h.clone(), vpos, epos);
    (h, iso)
}
