// SPDX-License-Identifier: Apache-2.0

//! Backtracking search for morphisms between two graphs.
//!
//! Vertices are assigned first, in index order, then edges. Candidates are
//! tried in increasing target index, so solutions come out in lexicographic
//! order of `(vmap, emap)`. An edge is checked for feasibility as soon as
//! both of its endpoints are assigned.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::graph::{GraphRef, LGraph, Morphism};

pub struct Search<'a> {
    source: &'a LGraph,
    target: &'a LGraph,
    injective: bool,
    vcand: Vec<Vec<usize>>,
    ecand: Vec<Vec<bool>>,
}

impl<'a> Search<'a> {
    /// All label-monotone candidates. Returns a search with empty candidate
    /// lists if the lattices differ.
    pub fn new(source: &'a LGraph, target: &'a LGraph) -> Self {
        let lat = source.lattice();
        let same = source.same_lattice(target);
        let vcand = source
            .vertices()
            .iter()
            .map(|v| {
                if !same {
                    return Vec::new();
                }
                (0..target.vertex_count()).filter(|&w| lat.leq(v.label, target.vertices()[w].label)).collect()
            })
            .collect();
        let ecand = source
            .edges()
            .iter()
            .map(|e| target.edges().iter().map(|d| same && lat.leq(e.label, d.label)).collect())
            .collect();
        Search { source, target, injective: false, vcand, ecand }
    }

    pub fn injective(mut self, yes: bool) -> Self {
        self.injective = yes;
        self
    }

    /// Keeps only candidates whose labels equal the source label.
    pub fn exact_labels(mut self) -> Self {
        for (v, c) in self.vcand.iter_mut().enumerate() {
            let l = self.source.vertices()[v].label;
            c.retain(|&w| self.target.vertices()[w].label == l);
        }
        for (e, c) in self.ecand.iter_mut().enumerate() {
            let l = self.source.edges()[e].label;
            for (d, ok) in c.iter_mut().enumerate() {
                *ok &= self.target.edges()[d].label == l;
            }
        }
        self
    }

    pub fn fix_vertex(&mut self, v: usize, w: usize) {
        self.vcand[v].retain(|&x| x == w);
    }

    pub fn fix_edge(&mut self, e: usize, d: usize) {
        for (x, ok) in self.ecand[e].iter_mut().enumerate() {
            *ok &= x == d;
        }
    }

    pub fn retain_vertices(&mut self, mut keep: impl FnMut(usize, usize) -> bool) {
        for (v, c) in self.vcand.iter_mut().enumerate() {
            c.retain(|&w| keep(v, w));
        }
    }

    pub fn retain_edges(&mut self, mut keep: impl FnMut(usize, usize) -> bool) {
        for (e, c) in self.ecand.iter_mut().enumerate() {
            for (d, ok) in c.iter_mut().enumerate() {
                *ok &= keep(e, d);
            }
        }
    }

    /// Calls `visit(vmap, emap)` for every solution until it breaks.
    pub fn run(&self, mut visit: impl FnMut(&[usize], &[usize]) -> ControlFlow<()>) {
        let (s, t) = (self.source, self.target);
        if self.injective && (s.vertex_count() > t.vertex_count() || s.edge_count() > t.edge_count()) {
            return;
        }
        let mut between: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (d, e) in t.edges().iter().enumerate() {
            between.entry((e.src, e.tgt)).or_default().push(d);
        }
        // edges to check once vertex v (the later endpoint) is assigned
        let mut ready: Vec<Vec<usize>> = vec![Vec::new(); s.vertex_count()];
        for (i, e) in s.edges().iter().enumerate() {
            ready[e.src.max(e.tgt)].push(i);
        }
        let mut st = State {
            search: self,
            between,
            ready,
            vmap: vec![usize::MAX; s.vertex_count()],
            emap: vec![usize::MAX; s.edge_count()],
            vused: vec![false; t.vertex_count()],
            eused: vec![false; t.edge_count()],
        };
        let _ = st.vertices(0, &mut visit);
    }

    pub fn collect(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut out = Vec::new();
        self.run(|v, e| {
            out.push((v.to_vec(), e.to_vec()));
            ControlFlow::Continue(())
        });
        out
    }

    pub fn first(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let mut out = None;
        self.run(|v, e| {
            out = Some((v.to_vec(), e.to_vec()));
            ControlFlow::Break(())
        });
        out
    }

    pub fn count(&self) -> usize {
        let mut n = 0;
        self.run(|_, _| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }
}

struct State<'s, 'a> {
    search: &'s Search<'a>,
    between: HashMap<(usize, usize), Vec<usize>>,
    ready: Vec<Vec<usize>>,
    vmap: Vec<usize>,
    emap: Vec<usize>,
    vused: Vec<bool>,
    eused: Vec<bool>,
}

impl State<'_, '_> {
    fn edge_options(&self, e: usize) -> &[usize] {
        let edge = &self.search.source.edges()[e];
        self.between.get(&(self.vmap[edge.src], self.vmap[edge.tgt])).map_or(&[], |v| v.as_slice())
    }

    fn edge_feasible(&self, e: usize) -> bool {
        self.edge_options(e).iter().any(|&d| self.search.ecand[e][d] && !(self.search.injective && self.eused[d]))
    }

    fn vertices(&mut self, v: usize, visit: &mut impl FnMut(&[usize], &[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
        if v == self.vmap.len() {
            return self.edges(0, visit);
        }
        let search = self.search;
        for &w in &search.vcand[v] {
            if search.injective && self.vused[w] {
                continue;
            }
            self.vmap[v] = w;
            if self.ready[v].iter().all(|&e| self.edge_feasible(e)) {
                self.vused[w] = true;
                let flow = self.vertices(v + 1, visit);
                self.vused[w] = false;
                flow?;
            }
        }
        self.vmap[v] = usize::MAX;
        ControlFlow::Continue(())
    }

    fn edges(&mut self, e: usize, visit: &mut impl FnMut(&[usize], &[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
        if e == self.emap.len() {
            return visit(&self.vmap, &self.emap);
        }
        let search = self.search;
        let options: Vec<usize> = self.edge_options(e).to_vec();
        for d in options {
            if !search.ecand[e][d] || (search.injective && self.eused[d]) {
                continue;
            }
            self.emap[e] = d;
            self.eused[d] = true;
            let flow = self.edges(e + 1, visit);
            self.eused[d] = false;
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// All morphisms `a → b`, in lexicographic order of their component maps.
pub fn enumerate_morphisms(a: &GraphRef, b: &GraphRef, monic_only: bool) -> Vec<Morphism> {
    Search::new(a, b)
        .injective(monic_only)
        .collect()
        .into_iter()
        .map(|(v, e)| Morphism::new_unchecked(a.clone(), b.clone(), v, e))
        .collect()
}

/// Element counts, sorted vertex signatures and sorted edge labels.
pub type IsoInvariant = (usize, usize, Vec<(u16, usize, usize, usize)>, Vec<u16>);

/// Cheap isomorphism invariant: element counts plus the sorted multiset of
/// vertex signatures and edge labels.
pub fn iso_invariant(g: &LGraph) -> IsoInvariant {
    let sigs = signatures(g);
    let mut vs: Vec<_> = sigs.into_iter().collect();
    vs.sort_unstable();
    let mut es: Vec<u16> = g.edges().iter().map(|e| e.label.index() as u16).collect();
    es.sort_unstable();
    (g.vertex_count(), g.edge_count(), vs, es)
}

/// (label, out-degree, in-degree, loops) for each vertex.
fn signatures(g: &LGraph) -> Vec<(u16, usize, usize, usize)> {
    let mut sig: Vec<_> = g.vertices().iter().map(|v| (v.label.index() as u16, 0, 0, 0)).collect();
    for e in g.edges() {
        sig[e.src].1 += 1;
        sig[e.tgt].2 += 1;
        if e.src == e.tgt {
            sig[e.src].3 += 1;
        }
    }
    sig
}

/// A label-preserving bijection `a → b`, if one exists.
pub fn find_isomorphism(a: &GraphRef, b: &GraphRef) -> Option<Morphism> {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() || !a.same_lattice(b) {
        return None;
    }
    let (sa, sb) = (signatures(a), signatures(b));
    let mut search = Search::new(a, b).injective(true).exact_labels();
    search.retain_vertices(|v, w| sa[v] == sb[w]);
    search.first().map(|(v, e)| Morphism::new_unchecked(a.clone(), b.clone(), v, e))
}

pub fn are_isomorphic(a: &LGraph, b: &LGraph) -> bool {
    if iso_invariant(a) != iso_invariant(b) {
        return false;
    }
    find_isomorphism(&Arc::new(a.clone()), &Arc::new(b.clone())).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::lattice::Lattice;

    fn graph(lat: &Arc<Lattice>, vs: &[(&str, &str)], es: &[(&str, &str, &str)]) -> GraphRef {
        let mut b = GraphBuilder::new(lat.clone());
        for (id, l) in vs {
            b.vertex(*id, lat.get(l).unwrap());
        }
        for (id, s, t) in es {
            b.edge(*id, *s, *t, lat.bottom());
        }
        Arc::new(b.build().unwrap())
    }

    #[test]
    fn vertex_into_n_vertices() {
        let lat = Arc::new(Lattice::singleton());
        let a = graph(&lat, &[("x", "bot")], &[]);
        let b = graph(&lat, &[("p", "bot"), ("q", "bot"), ("r", "bot")], &[("e", "p", "q")]);
        assert_eq!(enumerate_morphisms(&a, &b, false).len(), 3);
    }

    #[test]
    fn loop_into_loop_is_unique() {
        let lat = Arc::new(Lattice::singleton());
        let a = graph(&lat, &[("x", "bot")], &[("l", "x", "x")]);
        assert_eq!(enumerate_morphisms(&a, &a, false).len(), 1);
    }

    #[test]
    fn label_bound_excludes_incomparable() {
        let lat = Arc::new(Lattice::flat(&["a", "c"]).unwrap());
        let a = graph(&lat, &[("x", "c")], &[]);
        let b = graph(&lat, &[("y", "a"), ("z", "c")], &[]);
        let ms = enumerate_morphisms(&a, &b, false);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].vertex(0), 1);
    }

    #[test]
    fn empty_source_has_exactly_one_morphism() {
        let lat = Arc::new(Lattice::singleton());
        let a = Arc::new(LGraph::empty(lat.clone()));
        let b = graph(&lat, &[("x", "bot")], &[]);
        assert_eq!(enumerate_morphisms(&a, &b, true).len(), 1);
        assert_eq!(enumerate_morphisms(&b, &a, false).len(), 0);
    }

    #[test]
    fn order_is_lexicographic() {
        let lat = Arc::new(Lattice::singleton());
        let a = graph(&lat, &[("x", "bot"), ("y", "bot")], &[]);
        let b = graph(&lat, &[("p", "bot"), ("q", "bot")], &[]);
        let maps: Vec<Vec<usize>> = enumerate_morphisms(&a, &b, false).iter().map(|m| m.vmap().to_vec()).collect();
        assert_eq!(maps, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn parallel_edges_multiply() {
        let lat = Arc::new(Lattice::singleton());
        let a = graph(&lat, &[("x", "bot"), ("y", "bot")], &[("e", "x", "y"), ("f", "x", "y")]);
        assert_eq!(enumerate_morphisms(&a, &a, false).len(), 4);
        assert_eq!(enumerate_morphisms(&a, &a, true).len(), 2);
    }

    #[test]
    fn isomorphism_respects_direction_and_labels() {
        let lat = Arc::new(Lattice::flat(&["a"]).unwrap());
        let a = graph(&lat, &[("x", "a"), ("y", "bot")], &[("e", "x", "y")]);
        let b = graph(&lat, &[("p", "bot"), ("q", "a")], &[("f", "q", "p")]);
        let c = graph(&lat, &[("p", "bot"), ("q", "a")], &[("f", "p", "q")]);
        assert!(are_isomorphic(&a, &b));
        assert!(!are_isomorphic(&a, &c));
        let w = find_isomorphism(&a, &b).unwrap();
        assert!(w.is_iso());
    }
}
