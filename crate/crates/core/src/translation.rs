// SPDX-License-Identifier: Apache-2.0

//! Translating rules with arbitrary matching into sets of rules with monic
//! typing and strong matching, plus the bounded extensional checks used to
//! compare rewrite relations.
//!
//! The pipeline is: split `t_L` through every quotient of `L` it factors
//! through, compact the rule along each quotient, lift the typing through a
//! materialized type graph `L″`, and rebuild the rest of the rule over `L″`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{GraphRef, LGraph, Morphism};
use crate::lattice::Label;
use crate::limits::{pullback, pullback_mediator, pushout, pushout_mediator, uniquify, Cospan, Span};
use crate::matching::is_strong_match;
use crate::rewrite::{dedup_up_to_iso, rewrite_all, PbpoRule, Rule, Semantics};
use crate::search::{are_isomorphic, iso_invariant, Search};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslationError {
    #[error("rule is not in canonical form")]
    NotCanonical,
    #[error("first factor is not an epimorphism")]
    NotEpi,
    #[error("morphisms do not factor the typing")]
    NotAFactorization,
    #[error("graph is not labeled over a flat lattice")]
    NotFlatLattice,
}

/// `second ∘ first`, with `first` epi.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub through: GraphRef,
    pub first: Morphism,
    pub second: Morphism,
}

/// All ways to split `n` items into blocks, as block indices per item.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            cur.push(b);
            go(i + 1, n, cur, blocks.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), 0, &mut out);
    out
}

/// Every combination of one partition per group, as a global class per item.
fn grouped_partitions(groups: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let per_group: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| set_partitions(g.len())).collect();
    fn go(
        k: usize,
        groups: &[Vec<usize>],
        per_group: &[Vec<Vec<usize>>],
        class: &mut Vec<usize>,
        next: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == groups.len() {
            out.push(class.clone());
            return;
        }
        for p in &per_group[k] {
            let blocks = p.iter().max().map_or(0, |m| m + 1);
            for (i, &item) in groups[k].iter().enumerate() {
                class[item] = next + p[i];
            }
            go(k + 1, groups, per_group, class, next + blocks, out);
        }
    }
    go(0, groups, &per_group, &mut vec![0; n], 0, &mut out);
    out
}

/// Quotient of `g` by the given vertex and edge classes, with join labels.
/// Class names are the sorted member names joined by `+`.
fn quotient(g: &GraphRef, vclass: &[usize], eclass: &[usize]) -> (GraphRef, Morphism) {
    let lat = g.lattice();
    let nv = vclass.iter().max().map_or(0, |m| m + 1);
    let ne = eclass.iter().max().map_or(0, |m| m + 1);
    let mut vmembers: Vec<Vec<&str>> = vec![Vec::new(); nv];
    let mut vlabel = vec![lat.bottom(); nv];
    for (v, &c) in vclass.iter().enumerate() {
        vmembers[c].push(&g.vertices()[v].id);
        vlabel[c] = lat.join2(vlabel[c], g.vertices()[v].label);
    }
    let mut emembers: Vec<Vec<&str>> = vec![Vec::new(); ne];
    let mut elabel = vec![lat.bottom(); ne];
    let mut ends = vec![(0, 0); ne];
    for (e, &c) in eclass.iter().enumerate() {
        let edge = &g.edges()[e];
        emembers[c].push(&edge.id);
        elabel[c] = lat.join2(elabel[c], edge.label);
        ends[c] = (vclass[edge.src], vclass[edge.tgt]);
    }
    let mut names: Vec<String> = vmembers.iter().chain(emembers.iter()).map(|m| m.join("+")).collect();
    uniquify(&mut names);
    let vertices = (0..nv).map(|c| (names[c].clone(), vlabel[c])).collect();
    let edges = (0..ne).map(|c| (names[nv + c].clone(), ends[c].0, ends[c].1, elabel[c])).collect();
    let (q, vpos, epos) = LGraph::from_indexed(lat.clone(), vertices, edges);
    let q = Arc::new(q);
    let e = Morphism::new_unchecked(
        g.clone(),
        q.clone(),
        vclass.iter().map(|&c| vpos[c]).collect(),
        eclass.iter().map(|&c| epos[c]).collect(),
    );
    (q, e)
}

/// All factorizations `t_L = t_{L_c} ∘ e` with `e` a quotient of `L`, one per
/// kernel. Quotient labels are joins, so each kernel appears once.
pub fn enumerate_epi_factorizations(t_l: &Morphism) -> Vec<Factorization> {
    let l = t_l.source();
    let mut vfibers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..l.vertex_count() {
        vfibers.entry(t_l.vertex(v)).or_default().push(v);
    }
    let vgroups: Vec<Vec<usize>> = vfibers.into_values().collect();
    let mut out = Vec::new();
    for vclass in grouped_partitions(&vgroups, l.vertex_count()) {
        let mut efibers: BTreeMap<(usize, usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, e) in l.edges().iter().enumerate() {
            efibers.entry((t_l.edge(i), vclass[e.src], vclass[e.tgt])).or_default().push(i);
        }
        let egroups: Vec<Vec<usize>> = efibers.into_values().collect();
        for eclass in grouped_partitions(&egroups, l.edge_count()) {
            let (q, e) = quotient(l, &vclass, &eclass);
            let mut vmap = vec![0; q.vertex_count()];
            for v in 0..l.vertex_count() {
                vmap[e.vertex(v)] = t_l.vertex(v);
            }
            let mut emap = vec![0; q.edge_count()];
            for x in 0..l.edge_count() {
                emap[e.edge(x)] = t_l.edge(x);
            }
            let second = Morphism::new_unchecked(q.clone(), t_l.target().clone(), vmap, emap);
            out.push(Factorization { through: q, first: e, second });
        }
    }
    out
}

/// The rule over `L_c` induced by a factorization `t_L = t_{L_c} ∘ e`:
/// `K_c` is the pullback of `t_{L_c}` and `l′`, `R_c` the pushout of
/// `K → K_c` and `r`.
pub fn compacted_rule(rule: &PbpoRule, f: &Factorization) -> Result<PbpoRule, TranslationError> {
    if !rule.canonical {
        return Err(TranslationError::NotCanonical);
    }
    let r = rule.rule();
    if !Arc::ptr_eq(f.first.source(), r.lhs())
        || !Arc::ptr_eq(f.second.target(), r.lhs_type())
        || !Arc::ptr_eq(f.first.target(), f.second.source())
        || !f.second.compose(&f.first).is_ok_and(|c| c.same_maps(r.t_l()))
    {
        return Err(TranslationError::NotAFactorization);
    }
    if !f.first.is_epi() {
        return Err(TranslationError::NotEpi);
    }
    let c = Cospan::new(f.second.clone(), r.l_prime().clone()).expect("shared L′");
    let pb = pullback(&c);
    let el = f.first.compose(r.l()).expect("composable");
    let k_to_kc = pullback_mediator(&c, &pb, &el, r.t_k()).expect("left square commutes");
    let span = Span::new(k_to_kc, r.r().clone()).expect("shared K");
    let po = pushout(&span);
    let rp_tkc = rule.r_prime().compose(&pb.right).expect("composable");
    let t_rc = pushout_mediator(&span, &po, &rp_tkc, rule.t_r()).expect("outer square commutes");
    let compact = Rule::new(pb.left.clone(), po.left.clone(), f.second.clone(), pb.right.clone(), r.l_prime().clone())
        .expect("shape");
    Ok(PbpoRule::new(compact, rule.r_prime().clone(), t_rc).expect("shape"))
}

/// A factorization `t_L = β ∘ t_L′` with `t_L′` monic.
#[derive(Debug, Clone)]
pub struct AmendabilityWitness {
    pub t_l_prime: Morphism,
    pub beta: Morphism,
    pub strong: bool,
}

/// Splits `t_L` through `L″`, which holds `L` plus, for every vertex of `L′`,
/// a fresh "outside" vertex, and over every edge of `L′` one edge for every
/// way a host edge of that type can sit relative to the matched part.
/// Every element of `L″` carries the label of its image in `L′`.
pub fn materialize(t_l: &Morphism) -> AmendabilityWitness {
    let l = t_l.source();
    let lp = t_l.target();
    let nl = l.vertex_count();
    let mut vfiber: Vec<Vec<usize>> = vec![Vec::new(); lp.vertex_count()];
    for v in 0..nl {
        vfiber[t_l.vertex(v)].push(v);
    }
    // vertices: L's, then one outside vertex per vertex of L′
    let mut vertices: Vec<(String, Label)> = Vec::new();
    let mut vbeta: Vec<usize> = Vec::new();
    for (v, x) in l.vertices().iter().enumerate() {
        vertices.push((x.id.clone(), lp.vertices()[t_l.vertex(v)].label));
        vbeta.push(t_l.vertex(v));
    }
    for (w, y) in lp.vertices().iter().enumerate() {
        vertices.push((format!("~{}", y.id), y.label));
        vbeta.push(w);
    }
    let outside = |w: usize| nl + w;
    let mut efiber: Vec<Vec<usize>> = vec![Vec::new(); lp.edge_count()];
    for e in 0..l.edge_count() {
        efiber[t_l.edge(e)].push(e);
    }
    let mut edges: Vec<(String, usize, usize, Label)> = Vec::new();
    let mut ebeta: Vec<usize> = Vec::new();
    for (d, ed) in lp.edges().iter().enumerate() {
        let name = |s: &str, t: &str| format!("{}[{},{}]", ed.id, s, t);
        let vname = |v: usize| l.vertices()[v].id.as_str();
        for &e in &efiber[d] {
            let x = &l.edges()[e];
            edges.push((x.id.clone(), x.src, x.tgt, ed.label));
            ebeta.push(d);
        }
        for &s in &vfiber[ed.src] {
            for &t in &vfiber[ed.tgt] {
                edges.push((name(vname(s), vname(t)), s, t, ed.label));
                ebeta.push(d);
            }
        }
        for &s in &vfiber[ed.src] {
            edges.push((name(vname(s), "~"), s, outside(ed.tgt), ed.label));
            ebeta.push(d);
        }
        for &t in &vfiber[ed.tgt] {
            edges.push((name("~", vname(t)), outside(ed.src), t, ed.label));
            ebeta.push(d);
        }
        edges.push((name("~", "~"), outside(ed.src), outside(ed.tgt), ed.label));
        ebeta.push(d);
    }
    let mut names: Vec<String> =
        vertices.iter().map(|v| v.0.clone()).chain(edges.iter().map(|e| e.0.clone())).collect();
    uniquify(&mut names);
    for (i, v) in vertices.iter_mut().enumerate() {
        v.0 = names[i].clone();
    }
    let nv = vertices.len();
    for (i, e) in edges.iter_mut().enumerate() {
        e.0 = names[nv + i].clone();
    }
    let (lpp, vpos, epos) = LGraph::from_indexed(l.lattice().clone(), vertices, edges);
    let lpp = Arc::new(lpp);
    let mut bv = vec![0; lpp.vertex_count()];
    for (i, &w) in vbeta.iter().enumerate() {
        bv[vpos[i]] = w;
    }
    let mut be = vec![0; lpp.edge_count()];
    for (i, &d) in ebeta.iter().enumerate() {
        be[epos[i]] = d;
    }
    let beta = Morphism::new_unchecked(lpp.clone(), lp.clone(), bv, be);
    // L's edges were pushed first within each fiber; find them by position
    let mut l_edge_pos = vec![0; l.edge_count()];
    let mut k = 0;
    for d in 0..lp.edge_count() {
        for &e in &efiber[d] {
            l_edge_pos[e] = epos[k];
            k += 1;
        }
        k += vfiber[lp.edges()[d].src].len() * vfiber[lp.edges()[d].tgt].len()
            + vfiber[lp.edges()[d].src].len()
            + vfiber[lp.edges()[d].tgt].len()
            + 1;
    }
    let t_l_prime = Morphism::new_unchecked(l.clone(), lpp, (0..nl).map(|v| vpos[v]).collect(), l_edge_pos);
    AmendabilityWitness { t_l_prime, beta, strong: true }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AmendabilityReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl AmendabilityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For each sample `(m, α)` with `α ∘ m = t_L`, searches a lift
/// `α′: G → L″` with `β ∘ α′ = α` and `α′ ∘ m = t_L′`; in strong mode the
/// square `(1_L, m, t_L′, α′)` must also be a pullback.
pub fn check_amendability(
    w: &AmendabilityWitness,
    samples: &[(Morphism, Morphism)],
    strong: bool,
) -> AmendabilityReport {
    let failures: Vec<String> = samples
        .par_iter()
        .enumerate()
        .filter_map(|(i, (m, alpha))| {
            let g = m.target();
            let lpp = w.beta.source();
            let mut search = Search::new(g, lpp);
            for x in 0..m.source().vertex_count() {
                search.fix_vertex(m.vertex(x), w.t_l_prime.vertex(x));
            }
            for x in 0..m.source().edge_count() {
                search.fix_edge(m.edge(x), w.t_l_prime.edge(x));
            }
            search.retain_vertices(|v, y| w.beta.vertex(y) == alpha.vertex(v));
            search.retain_edges(|e, y| w.beta.edge(y) == alpha.edge(e));
            let mut found = false;
            search.run(|vm, em| {
                let lift = Morphism::new_unchecked(g.clone(), lpp.clone(), vm.to_vec(), em.to_vec());
                found = !strong || is_strong_match(&w.t_l_prime, m, &lift);
                if found {
                    std::ops::ControlFlow::Break(())
                } else {
                    std::ops::ControlFlow::Continue(())
                }
            });
            (!found).then(|| format!("sample {i}: no lift for host {g:?}"))
        })
        .collect();
    AmendabilityReport { checked: samples.len(), failures }
}

/// Rebuilds a canonical rule over the materialized type graph `L″`:
/// `K″` is the pullback of `β` and `l′`, `R″` the pushout of `K → K″` and `r`.
pub fn monicize_rule(rule: &PbpoRule, w: &AmendabilityWitness) -> Result<PbpoRule, TranslationError> {
    if !rule.canonical {
        return Err(TranslationError::NotCanonical);
    }
    let r = rule.rule();
    if !Arc::ptr_eq(w.t_l_prime.source(), r.lhs())
        || !Arc::ptr_eq(w.beta.target(), r.lhs_type())
        || !w.beta.compose(&w.t_l_prime).is_ok_and(|c| c.same_maps(r.t_l()))
    {
        return Err(TranslationError::NotAFactorization);
    }
    let c = Cospan::new(w.beta.clone(), r.l_prime().clone()).expect("shared L′");
    let pb = pullback(&c);
    let tl_l = w.t_l_prime.compose(r.l()).expect("composable");
    let t_k2 = pullback_mediator(&c, &pb, &tl_l, r.t_k()).expect("left square commutes");
    let po = pushout(&Span::new(t_k2.clone(), r.r().clone()).expect("shared K"));
    let sigma = Rule::new(r.l().clone(), r.r().clone(), w.t_l_prime.clone(), t_k2, pb.left.clone()).expect("shape");
    Ok(PbpoRule::new(sigma, po.left.clone(), po.right.clone()).expect("shape"))
}

/// One rule with monic typing per quotient of the left-hand side.
pub fn pbpo_to_pbpoplus(rule: &PbpoRule) -> Result<Vec<Rule>, TranslationError> {
    enumerate_epi_factorizations(rule.rule().t_l())
        .iter()
        .map(|f| {
            let compact = compacted_rule(rule, f)?;
            let w = materialize(compact.rule().t_l());
            Ok(monicize_rule(&compact, &w)?.rule().clone())
        })
        .collect()
}

/// `L` plus a fresh ⊤ vertex, with ⊤ loops everywhere and ⊤ edges in both
/// directions between all distinct vertices. Admits every context.
pub fn saturate_context(l: &GraphRef) -> Result<(GraphRef, Morphism), TranslationError> {
    let lat = l.lattice();
    if !lat.is_flat() {
        return Err(TranslationError::NotFlatLattice);
    }
    let top = lat.top();
    let mut vertices: Vec<(String, Label)> = l.vertices().iter().map(|v| (v.id.clone(), v.label)).collect();
    vertices.push(("*".to_string(), top));
    let mut edges: Vec<(String, usize, usize, Label)> =
        l.edges().iter().map(|e| (e.id.clone(), e.src, e.tgt, e.label)).collect();
    let n = vertices.len();
    for s in 0..n {
        for t in 0..n {
            edges.push((format!("*[{},{}]", vertices[s].0, vertices[t].0), s, t, top));
        }
    }
    let mut names: Vec<String> =
        vertices.iter().map(|v| v.0.clone()).chain(edges.iter().map(|e| e.0.clone())).collect();
    uniquify(&mut names);
    for (i, v) in vertices.iter_mut().enumerate() {
        v.0 = names[i].clone();
    }
    for (i, e) in edges.iter_mut().enumerate() {
        e.0 = names[n + i].clone();
    }
    let (lp, vpos, epos) = LGraph::from_indexed(lat.clone(), vertices, edges);
    let lp = Arc::new(lp);
    let t = Morphism::new_unchecked(
        l.clone(),
        lp.clone(),
        vpos[..l.vertex_count()].to_vec(),
        epos[..l.edge_count()].to_vec(),
    );
    Ok((lp, t))
}

/// Every label occurring in the rule's graphs, plus ⊥ and ⊤.
pub fn rule_labels(rule: &Rule) -> Vec<Label> {
    let lat = rule.lhs().lattice();
    let mut out: BTreeSet<Label> = [lat.bottom(), lat.top()].into_iter().collect();
    for g in [rule.lhs(), rule.interface(), rule.rhs(), rule.lhs_type(), rule.interface_type()] {
        out.extend(g.vertices().iter().map(|v| v.label));
        out.extend(g.edges().iter().map(|e| e.label));
    }
    out.into_iter().collect()
}

/// All graphs up to isomorphism with at most `max_vertices` vertices and
/// `max_edges` edges, labeled from the given lists.
pub fn enumerate_hosts(
    lattice: &Arc<crate::Lattice>,
    vertex_labels: &[Label],
    edge_labels: &[Label],
    max_vertices: usize,
    max_edges: usize,
) -> Vec<GraphRef> {
    let mut out = Vec::new();
    let mut seen: HashSet<HostKey> = HashSet::new();
    for n in 0..=max_vertices {
        let perms = permutations(n);
        let options: Vec<(usize, usize, Label)> =
            (0..n).flat_map(|s| (0..n).flat_map(move |t| edge_labels.iter().map(move |&l| (s, t, l)))).collect();
        for vl in nondecreasing(vertex_labels.len(), n) {
            let vlabels: Vec<Label> = vl.iter().map(|&i| vertex_labels[i]).collect();
            for k in 0..=max_edges {
                for pick in nondecreasing(options.len(), k) {
                    let es: Vec<(usize, usize, Label)> = pick.iter().map(|&i| options[i]).collect();
                    let key = canonical_key(&vlabels, &es, &perms);
                    if seen.insert(key) {
                        out.push(Arc::new(plain_graph(lattice, &vlabels, &es)));
                    }
                }
            }
        }
    }
    out
}

fn plain_graph(lattice: &Arc<crate::Lattice>, vlabels: &[Label], es: &[(usize, usize, Label)]) -> LGraph {
    let vertices = vlabels.iter().enumerate().map(|(i, &l)| (format!("v{i}"), l)).collect();
    let edges = es.iter().enumerate().map(|(i, &(s, t, l))| (format!("e{i}"), s, t, l)).collect();
    LGraph::from_indexed(lattice.clone(), vertices, edges).0
}

type HostKey = (Vec<Label>, Vec<(usize, usize, Label)>);

fn canonical_key(
    vlabels: &[Label],
    es: &[(usize, usize, Label)],
    perms: &[Vec<usize>],
) -> (Vec<Label>, Vec<(usize, usize, Label)>) {
    perms
        .iter()
        .map(|p| {
            let mut vl = vlabels.to_vec();
            for (i, &l) in vlabels.iter().enumerate() {
                vl[p[i]] = l;
            }
            let mut e: Vec<_> = es.iter().map(|&(s, t, l)| (p[s], p[t], l)).collect();
            e.sort_unstable();
            (vl, e)
        })
        .min()
        .unwrap_or_default()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Nondecreasing sequences of length `k` over `0..n` (multisets).
fn nondecreasing(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Size limits for [`enumerate_typed_hosts`].
#[derive(Debug, Clone, Copy)]
pub struct HostBounds {
    pub max_vertices: usize,
    /// Edges beyond the image of the pattern.
    pub max_extra_edges: usize,
}

/// Samples `(m, α)` with `m: L ↣ G` monic and `α ∘ m = t_L`: the pattern
/// with labels raised within their typing bounds, extra vertices of every
/// type, and up to `max_extra_edges` extra edges, all with labels from
/// `labels`. Covers every such pair up to isomorphism of `G` under `L`
/// within the bounds.
pub fn enumerate_typed_hosts(t_l: &Morphism, bounds: HostBounds, labels: &[Label]) -> Vec<(Morphism, Morphism)> {
    let l = t_l.source();
    let lp = t_l.target();
    let lat = l.lattice();
    let between = |lo: Label, hi: Label| -> Vec<Label> {
        let mut v: Vec<Label> = labels.iter().copied().filter(|&x| lat.leq(lo, x) && lat.leq(x, hi)).collect();
        for x in [lo, hi] {
            if !v.contains(&x) {
                v.push(x);
            }
        }
        v.sort_unstable();
        v
    };
    let pattern_choices: Vec<Vec<Label>> = l
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, x)| between(x.label, lp.vertices()[t_l.vertex(v)].label))
        .chain(l.edges().iter().enumerate().map(|(e, x)| between(x.label, lp.edges()[t_l.edge(e)].label)))
        .collect();
    let extra_vertex_options: Vec<(usize, Label)> = (0..lp.vertex_count())
        .flat_map(|w| between(lat.bottom(), lp.vertices()[w].label).into_iter().map(move |x| (w, x)))
        .collect();
    let nl = l.vertex_count();
    let room = bounds.max_vertices.saturating_sub(nl);
    let mut out = Vec::new();
    for pattern_labels in product(&pattern_choices) {
        for k in 0..=room {
            for extra in nondecreasing(extra_vertex_options.len(), k) {
                // vertex types and labels of G
                let mut vtype: Vec<usize> = (0..nl).map(|v| t_l.vertex(v)).collect();
                let mut vlabel: Vec<Label> = pattern_labels[..nl].to_vec();
                for &i in &extra {
                    vtype.push(extra_vertex_options[i].0);
                    vlabel.push(extra_vertex_options[i].1);
                }
                let n = vtype.len();
                let mut options: Vec<(usize, usize, usize, Label)> = Vec::new();
                for s in 0..n {
                    for t in 0..n {
                        for (d, ed) in lp.edges().iter().enumerate() {
                            if ed.src == vtype[s] && ed.tgt == vtype[t] {
                                for x in between(lat.bottom(), ed.label) {
                                    options.push((s, t, d, x));
                                }
                            }
                        }
                    }
                }
                for ke in 0..=bounds.max_extra_edges {
                    for pick in nondecreasing(options.len(), ke) {
                        out.push(typed_host(t_l, &vtype, &vlabel, &pattern_labels[nl..], &pick, &options));
                    }
                }
            }
        }
    }
    out
}

fn product(choices: &[Vec<Label>]) -> Vec<Vec<Label>> {
    let mut out = vec![Vec::new()];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Label>| {
                c.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

fn typed_host(
    t_l: &Morphism,
    vtype: &[usize],
    vlabel: &[Label],
    pattern_edge_labels: &[Label],
    pick: &[usize],
    options: &[(usize, usize, usize, Label)],
) -> (Morphism, Morphism) {
    let l = t_l.source();
    let nl = l.vertex_count();
    let mut vertices: Vec<(String, Label)> = Vec::new();
    for (i, &lab) in vlabel.iter().enumerate() {
        let name = if i < nl { l.vertices()[i].id.clone() } else { format!("g{}", i - nl) };
        vertices.push((name, lab));
    }
    let mut edges: Vec<(String, usize, usize, Label)> = Vec::new();
    let mut etype = Vec::new();
    for (i, e) in l.edges().iter().enumerate() {
        edges.push((e.id.clone(), e.src, e.tgt, pattern_edge_labels[i]));
        etype.push(t_l.edge(i));
    }
    for (j, &p) in pick.iter().enumerate() {
        let (s, t, d, x) = options[p];
        edges.push((format!("h{j}"), s, t, x));
        etype.push(d);
    }
    let mut names: Vec<String> =
        vertices.iter().map(|v| v.0.clone()).chain(edges.iter().map(|e| e.0.clone())).collect();
    uniquify(&mut names);
    let nv = vertices.len();
    for (i, v) in vertices.iter_mut().enumerate() {
        v.0 = names[i].clone();
    }
    for (i, e) in edges.iter_mut().enumerate() {
        e.0 = names[nv + i].clone();
    }
    let (g, vpos, epos) = LGraph::from_indexed(l.lattice().clone(), vertices, edges);
    let g = Arc::new(g);
    let m = Morphism::new_unchecked(
        l.clone(),
        g.clone(),
        (0..nl).map(|v| vpos[v]).collect(),
        (0..l.edge_count()).map(|e| epos[e]).collect(),
    );
    let mut av = vec![0; g.vertex_count()];
    for (i, &w) in vtype.iter().enumerate() {
        av[vpos[i]] = w;
    }
    let mut ae = vec![0; g.edge_count()];
    for (i, &d) in etype.iter().enumerate() {
        ae[epos[i]] = d;
    }
    let alpha = Morphism::new_unchecked(g, t_l.target().clone(), av, ae);
    (m, alpha)
}

/// Result graphs of all rules on one host, deduplicated up to isomorphism.
pub fn results_on(rules: &[Rule], host: &GraphRef, semantics: Semantics) -> Vec<GraphRef> {
    let all: Vec<GraphRef> = rules
        .iter()
        .flat_map(|r| rewrite_all(r, host, semantics, false).expect("admissible steps succeed"))
        .map(|t| t.result)
        .collect();
    dedup_up_to_iso(all, |g| g)
}

/// A host with its left and right results.
pub type Mismatch = (GraphRef, Vec<GraphRef>, Vec<GraphRef>);

/// Per-host differences between two rewrite relations.
#[derive(Debug, Clone, Default)]
pub struct RelationComparison {
    pub hosts: usize,
    pub pairs: usize,
    pub mismatches: Vec<Mismatch>,
}

impl RelationComparison {
    pub fn equal(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn same_up_to_iso(a: &[GraphRef], b: &[GraphRef]) -> bool {
    a.len() == b.len()
        && a.iter().all(|x| b.iter().any(|y| iso_invariant(x) == iso_invariant(y) && are_isomorphic(x, y)))
}

/// Compares two relations host by host. Both closures must return results
/// deduplicated up to isomorphism.
pub fn compare_relations(
    hosts: &[GraphRef],
    left: impl Fn(&GraphRef) -> Vec<GraphRef> + Sync,
    right: impl Fn(&GraphRef) -> Vec<GraphRef> + Sync,
) -> RelationComparison {
    let rows: Vec<(usize, Option<Mismatch>)> = hosts
        .par_iter()
        .map(|h| {
            let (a, b) = (left(h), right(h));
            let n = a.len();
            if same_up_to_iso(&a, &b) {
                (n, None)
            } else {
                (n, Some((h.clone(), a, b)))
            }
        })
        .collect();
    let mut out = RelationComparison { hosts: hosts.len(), ..Default::default() };
    for (n, mismatch) in rows {
        out.pairs += n;
        out.mismatches.extend(mismatch);
    }
    out
}
