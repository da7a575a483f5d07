// SPDX-License-Identifier: Apache-2.0

//! Pullbacks and pushouts of labeled graphs.
//!
//! Pullbacks pair up elements that agree in the common target and label each
//! pair with the meet of its components. Pushouts glue the disjoint union of
//! the feet along the span and label each class with the join of its members.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{GraphError, GraphRef, LGraph, Morphism};
use crate::lattice::Label;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LimitError {
    #[error("morphisms do not share a source")]
    NotASpan,
    #[error("morphisms do not share a target")]
    NotACospan,
    #[error("square does not commute")]
    NotCommuting,
    #[error("not a pullback: {0}")]
    NotPullback(String),
    #[error("not a pushout: {0}")]
    NotPushout(String),
    #[error("graph has {size} elements, search is capped at {cap}")]
    Truncated { size: usize, cap: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `B ← A → C`
#[derive(Debug, Clone)]
pub struct Span {
    pub left: Morphism,
    pub right: Morphism,
}

impl Span {
    pub fn new(left: Morphism, right: Morphism) -> Result<Span, LimitError> {
        if !Arc::ptr_eq(left.source(), right.source()) {
            return Err(LimitError::NotASpan);
        }
        Ok(Span { left, right })
    }

    pub fn apex(&self) -> &GraphRef {
        self.left.source()
    }
}

/// `B → D ← C`
#[derive(Debug, Clone)]
pub struct Cospan {
    pub left: Morphism,
    pub right: Morphism,
}

impl Cospan {
    pub fn new(left: Morphism, right: Morphism) -> Result<Cospan, LimitError> {
        if !Arc::ptr_eq(left.target(), right.target()) {
            return Err(LimitError::NotACospan);
        }
        Ok(Cospan { left, right })
    }

    pub fn target(&self) -> &GraphRef {
        self.left.target()
    }
}

/// Pullback object with its two projections.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub object: GraphRef,
    pub left: Morphism,
    pub right: Morphism,
}

/// Pushout object with its two injections.
#[derive(Debug, Clone)]
pub struct Pushout {
    pub object: GraphRef,
    pub left: Morphism,
    pub right: Morphism,
}

/// Appends primes to repeated names until all are distinct.
pub(crate) fn uniquify(names: &mut [String]) {
    let mut seen: HashSet<String> = HashSet::new();
    for name in names.iter_mut() {
        while !seen.insert(name.clone()) {
            name.push('′');
        }
    }
}

pub fn pullback(c: &Cospan) -> Pullback {
    let (f, g) = (&c.left, &c.right);
    let (b, cc) = (f.source(), g.source());
    let lat = b.lattice().clone();
    let mut vpairs = Vec::new();
    for (i, _) in b.vertices().iter().enumerate() {
        for (j, _) in cc.vertices().iter().enumerate() {
            if f.vertex(i) == g.vertex(j) {
                vpairs.push((i, j));
            }
        }
    }
    let vindex: HashMap<(usize, usize), usize> = vpairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let mut epairs = Vec::new();
    for (i, _) in b.edges().iter().enumerate() {
        for (j, _) in cc.edges().iter().enumerate() {
            if f.edge(i) == g.edge(j) {
                epairs.push((i, j));
            }
        }
    }
    let mut names: Vec<String> = vpairs
        .iter()
        .map(|&(i, j)| format!("⟨{},{}⟩", b.vertices()[i].id, cc.vertices()[j].id))
        .chain(epairs.iter().map(|&(i, j)| format!("⟨{},{}⟩", b.edges()[i].id, cc.edges()[j].id)))
        .collect();
    uniquify(&mut names);
    let (vnames, enames) = names.split_at(vpairs.len());
    let vertices = vpairs
        .iter()
        .zip(vnames)
        .map(|(&(i, j), n)| (n.clone(), lat.meet2(b.vertices()[i].label, cc.vertices()[j].label)))
        .collect();
    let edges = epairs
        .iter()
        .zip(enames)
        .map(|(&(i, j), n)| {
            let (x, y) = (&b.edges()[i], &cc.edges()[j]);
            (n.clone(), vindex[&(x.src, y.src)], vindex[&(x.tgt, y.tgt)], lat.meet2(x.label, y.label))
        })
        .collect();
    let (p, vpos, epos) = LGraph::from_indexed(lat, vertices, edges);
    let p = Arc::new(p);
    let mut lv = vec![0; vpairs.len()];
    let mut rv = vec![0; vpairs.len()];
    for (k, &(i, j)) in vpairs.iter().enumerate() {
        lv[vpos[k]] = i;
        rv[vpos[k]] = j;
    }
    let mut le = vec![0; epairs.len()];
    let mut re = vec![0; epairs.len()];
    for (k, &(i, j)) in epairs.iter().enumerate() {
        le[epos[k]] = i;
        re[epos[k]] = j;
    }
    Pullback {
        left: Morphism::new_unchecked(p.clone(), b.clone(), lv, le),
        right: Morphism::new_unchecked(p.clone(), cc.clone(), rv, re),
        object: p,
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    /// Class index per element, numbering classes by first occurrence.
    fn classes(&mut self) -> (Vec<usize>, usize) {
        let mut id = HashMap::new();
        let n = self.0.len();
        let mut out = Vec::with_capacity(n);
        for x in 0..n {
            let r = self.find(x);
            let next = id.len();
            out.push(*id.entry(r).or_insert(next));
        }
        (out, id.len())
    }
}

fn class_name(members: &BTreeSet<&str>) -> String {
    if members.len() == 1 {
        members.iter().next().unwrap().to_string()
    } else {
        format!("{{{}}}", members.iter().copied().collect::<Vec<_>>().join(","))
    }
}

pub fn pushout(s: &Span) -> Pushout {
    let (f, g) = (&s.left, &s.right);
    let (b, c) = (f.target(), g.target());
    let lat = b.lattice().clone();
    let (nbv, nbe) = (b.vertex_count(), b.edge_count());

    let mut uf = UnionFind::new(nbv + c.vertex_count());
    for a in 0..s.apex().vertex_count() {
        uf.union(f.vertex(a), nbv + g.vertex(a));
    }
    let (vclass, nv) = uf.classes();
    let mut uf = UnionFind::new(nbe + c.edge_count());
    for a in 0..s.apex().edge_count() {
        uf.union(f.edge(a), nbe + g.edge(a));
    }
    let (eclass, ne) = uf.classes();

    let vid = |x: usize| if x < nbv { &b.vertices()[x] } else { &c.vertices()[x - nbv] };
    let eid = |x: usize| if x < nbe { &b.edges()[x] } else { &c.edges()[x - nbe] };

    let mut vmembers = vec![BTreeSet::new(); nv];
    let mut vlabel = vec![lat.bottom(); nv];
    for (x, &k) in vclass.iter().enumerate() {
        let v = vid(x);
        vmembers[k].insert(v.id.as_str());
        vlabel[k] = lat.join2(vlabel[k], v.label);
    }
    let mut emembers = vec![BTreeSet::new(); ne];
    let mut elabel = vec![lat.bottom(); ne];
    let mut ends = vec![(0, 0); ne];
    for (x, &k) in eclass.iter().enumerate() {
        let e = eid(x);
        emembers[k].insert(e.id.as_str());
        elabel[k] = lat.join2(elabel[k], e.label);
        let off = if x < nbe { 0 } else { nbv };
        ends[k] = (vclass[e.src + off], vclass[e.tgt + off]);
    }
    let mut names: Vec<String> = vmembers.iter().chain(emembers.iter()).map(class_name).collect();
    uniquify(&mut names);
    let vertices: Vec<(String, Label)> = names[..nv].iter().cloned().zip(vlabel).collect();
    let edges = (0..ne).map(|k| (names[nv + k].clone(), ends[k].0, ends[k].1, elabel[k])).collect();
    let (q, vpos, epos) = LGraph::from_indexed(lat, vertices, edges);
    let q = Arc::new(q);
    let left = Morphism::new_unchecked(
        b.clone(),
        q.clone(),
        (0..nbv).map(|x| vpos[vclass[x]]).collect(),
        (0..nbe).map(|x| epos[eclass[x]]).collect(),
    );
    let right = Morphism::new_unchecked(
        c.clone(),
        q.clone(),
        (0..c.vertex_count()).map(|x| vpos[vclass[nbv + x]]).collect(),
        (0..c.edge_count()).map(|x| epos[eclass[nbe + x]]).collect(),
    );
    Pushout { object: q, left, right }
}

fn commutes(a: &Morphism, b: &Morphism) -> bool {
    a.vmap() == b.vmap() && a.emap() == b.emap()
}

/// The unique `X → P` with `pb.left ∘ u = p` and `pb.right ∘ u = q`.
pub fn pullback_mediator(c: &Cospan, pb: &Pullback, p: &Morphism, q: &Morphism) -> Result<Morphism, LimitError> {
    if !Arc::ptr_eq(p.source(), q.source())
        || !Arc::ptr_eq(p.target(), c.left.source())
        || !Arc::ptr_eq(q.target(), c.right.source())
    {
        return Err(LimitError::NotCommuting);
    }
    if !commutes(&c.left.compose(p)?, &c.right.compose(q)?) {
        return Err(LimitError::NotCommuting);
    }
    let obj = &pb.object;
    let vindex: HashMap<(usize, usize), usize> =
        (0..obj.vertex_count()).map(|k| ((pb.left.vertex(k), pb.right.vertex(k)), k)).collect();
    let eindex: HashMap<(usize, usize), usize> =
        (0..obj.edge_count()).map(|k| ((pb.left.edge(k), pb.right.edge(k)), k)).collect();
    let x = p.source();
    let vmap = (0..x.vertex_count()).map(|v| vindex[&(p.vertex(v), q.vertex(v))]).collect();
    let emap = (0..x.edge_count()).map(|e| eindex[&(p.edge(e), q.edge(e))]).collect();
    Ok(Morphism::new(x.clone(), obj.clone(), vmap, emap)?)
}

/// The unique `Q → X` with `u ∘ po.left = p` and `u ∘ po.right = q`.
pub fn pushout_mediator(s: &Span, po: &Pushout, p: &Morphism, q: &Morphism) -> Result<Morphism, LimitError> {
    if !Arc::ptr_eq(p.target(), q.target())
        || !Arc::ptr_eq(p.source(), s.left.target())
        || !Arc::ptr_eq(q.source(), s.right.target())
    {
        return Err(LimitError::NotCommuting);
    }
    if !commutes(&p.compose(&s.left)?, &q.compose(&s.right)?) {
        return Err(LimitError::NotCommuting);
    }
    let obj = &po.object;
    let mut vmap = vec![usize::MAX; obj.vertex_count()];
    let mut emap = vec![usize::MAX; obj.edge_count()];
    for (inj, m) in [(&po.left, p), (&po.right, q)] {
        for (v, &k) in inj.vmap().iter().enumerate() {
            if vmap[k] != usize::MAX && vmap[k] != m.vertex(v) {
                return Err(LimitError::NotCommuting);
            }
            vmap[k] = m.vertex(v);
        }
        for (e, &k) in inj.emap().iter().enumerate() {
            if emap[k] != usize::MAX && emap[k] != m.edge(e) {
                return Err(LimitError::NotCommuting);
            }
            emap[k] = m.edge(e);
        }
    }
    Ok(Morphism::new(obj.clone(), p.target().clone(), vmap, emap)?)
}

/// Checks that `P -p-> B -f-> D <-g- C <-q- P` is a pullback square.
pub fn check_pullback_square(p: &Morphism, q: &Morphism, f: &Morphism, g: &Morphism) -> Result<(), LimitError> {
    let c = Cospan::new(f.clone(), g.clone())?;
    if !Arc::ptr_eq(p.source(), q.source()) {
        return Err(LimitError::NotASpan);
    }
    let pb = pullback(&c);
    let u = pullback_mediator(&c, &pb, p, q)?;
    if !u.is_mono() {
        return Err(LimitError::NotPullback("corner has elements with the same pair of images".into()));
    }
    if !u.is_epi() {
        let missing = (0..pb.object.vertex_count())
            .find(|k| !u.vmap().contains(k))
            .map(|k| pb.object.vertices()[k].id.clone())
            .or_else(|| {
                (0..pb.object.edge_count()).find(|k| !u.emap().contains(k)).map(|k| pb.object.edges()[k].id.clone())
            })
            .unwrap_or_default();
        return Err(LimitError::NotPullback(format!("no corner element over {missing}")));
    }
    if !u.is_label_preserving() {
        return Err(LimitError::NotPullback("corner labels are below the meet".into()));
    }
    Ok(())
}

pub fn is_pullback_square(p: &Morphism, q: &Morphism, f: &Morphism, g: &Morphism) -> bool {
    check_pullback_square(p, q, f, g).is_ok()
}

/// Checks that `B <-f- A -g-> C` with `p: B → Q`, `q: C → Q` is a pushout square.
pub fn check_pushout_square(f: &Morphism, g: &Morphism, p: &Morphism, q: &Morphism) -> Result<(), LimitError> {
    let s = Span::new(f.clone(), g.clone())?;
    if !Arc::ptr_eq(p.target(), q.target()) {
        return Err(LimitError::NotACospan);
    }
    let po = pushout(&s);
    let u = pushout_mediator(&s, &po, p, q)?;
    if !u.is_epi() {
        return Err(LimitError::NotPushout("corner has elements outside both images".into()));
    }
    if !u.is_mono() {
        return Err(LimitError::NotPushout("corner glues more than the span forces".into()));
    }
    if !u.is_label_preserving() {
        return Err(LimitError::NotPushout("corner labels exceed the join".into()));
    }
    Ok(())
}

pub fn is_pushout_square(f: &Morphism, g: &Morphism, p: &Morphism, q: &Morphism) -> bool {
    check_pushout_square(f, g, p, q).is_ok()
}

/// A completion `A -left-> C -right-> D` of `A -f-> B -g-> D` to a pushout square.
#[derive(Debug, Clone)]
pub struct PushoutComplement {
    pub object: GraphRef,
    pub left: Morphism,
    pub right: Morphism,
}

pub const DEFAULT_COMPLEMENT_CAP: usize = 12;

/// All pushout complements whose arrow into `D` is a subgraph inclusion.
/// Candidates range over subgraphs of `D` and all labels below those of `D`;
/// each is confirmed with [`is_pushout_square`].
pub fn enumerate_pushout_complements(
    f: &Morphism,
    g: &Morphism,
    cap: usize,
) -> Result<Vec<PushoutComplement>, LimitError> {
    if !Arc::ptr_eq(f.target(), g.source()) {
        return Err(GraphError::NotComposable.into());
    }
    let gf = g.compose(f)?;
    let (a, d) = (f.source(), g.target());
    if d.size() > cap {
        return Err(LimitError::Truncated { size: d.size(), cap });
    }
    let lat = d.lattice().clone();
    let gv = g.vertex_image();
    let ge = g.edge_image();
    let need_v = gf.vertex_image();
    let need_e = gf.edge_image();

    // Per element of D: is it forced in, free, and which labels may it take.
    let below = |top: Label| lat.labels().filter(|&l| lat.leq(l, top)).collect::<Vec<_>>();
    let mut out = Vec::new();
    let free_v: Vec<usize> = (0..d.vertex_count()).filter(|v| gv.contains(v) && !need_v.contains(v)).collect();
    for mask in 0u32..(1 << free_v.len()) {
        let mut vs: BTreeSet<usize> = (0..d.vertex_count()).filter(|v| !gv.contains(v) || need_v.contains(v)).collect();
        for (i, &v) in free_v.iter().enumerate() {
            if mask & (1 << i) != 0 {
                vs.insert(v);
            }
        }
        let allowed_e: Vec<usize> =
            (0..d.edge_count()).filter(|&e| vs.contains(&d.edges()[e].src) && vs.contains(&d.edges()[e].tgt)).collect();
        let forced_e: BTreeSet<usize> =
            allowed_e.iter().copied().filter(|e| !ge.contains(e) || need_e.contains(e)).collect();
        if (0..d.edge_count()).any(|e| (!ge.contains(&e) || need_e.contains(&e)) && !forced_e.contains(&e)) {
            continue;
        }
        let free_e: Vec<usize> = allowed_e.iter().copied().filter(|e| !forced_e.contains(e)).collect();
        for emask in 0u32..(1 << free_e.len()) {
            let mut es = forced_e.clone();
            for (i, &e) in free_e.iter().enumerate() {
                if emask & (1 << i) != 0 {
                    es.insert(e);
                }
            }
            let sub = d.subgraph(&vs, &es);
            // label choices: elements outside the image of g keep their label
            let mut choices: Vec<Vec<Label>> = Vec::new();
            for v in sub.vertices() {
                let dv = d.vertex_index(&v.id).unwrap();
                choices.push(if gv.contains(&dv) { below(v.label) } else { vec![v.label] });
            }
            for e in sub.edges() {
                let de = d.edge_index(&e.id).unwrap();
                choices.push(if ge.contains(&de) { below(e.label) } else { vec![e.label] });
            }
            for_each_product(&choices, &mut |labels| {
                let nv = sub.vertex_count();
                let mut i = 0;
                let cand = sub.relabeled(|_| {
                    i += 1;
                    labels[i - 1]
                });
                debug_assert_eq!(i, nv + sub.edge_count());
                let c = Arc::new(cand);
                let right = Morphism::new_unchecked(
                    c.clone(),
                    d.clone(),
                    c.vertices().iter().map(|v| d.vertex_index(&v.id).unwrap()).collect(),
                    c.edges().iter().map(|e| d.edge_index(&e.id).unwrap()).collect(),
                );
                let left = Morphism::new(
                    a.clone(),
                    c.clone(),
                    gf.vmap().iter().map(|&x| c.vertex_index(&d.vertices()[x].id).unwrap()).collect(),
                    gf.emap().iter().map(|&x| c.edge_index(&d.edges()[x].id).unwrap()).collect(),
                );
                if let Ok(left) = left {
                    if is_pushout_square(f, &left, g, &right) {
                        out.push(PushoutComplement { object: c, left, right });
                    }
                }
            });
        }
    }
    Ok(out)
}

fn for_each_product(choices: &[Vec<Label>], visit: &mut impl FnMut(&[Label])) {
    fn go(choices: &[Vec<Label>], acc: &mut Vec<Label>, visit: &mut impl FnMut(&[Label])) {
        match choices.split_first() {
            None => visit(acc),
            Some((first, rest)) => {
                for &l in first {
                    acc.push(l);
                    go(rest, acc, visit);
                    acc.pop();
                }
            }
        }
    }
    go(choices, &mut Vec::new(), visit)
}
