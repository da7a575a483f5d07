// SPDX-License-Identifier: Apache-2.0

//! Lattice-labeled directed multigraphs and their morphisms.
//!
//! Vertices and edges are kept sorted by identifier, so positional indices
//! double as the canonical enumeration order. A [`Morphism`] holds its
//! endpoints as shared [`GraphRef`]s and two morphisms compose only when the
//! middle object is the *same* graph value (pointer identity), never merely an
//! equal one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{Label, Lattice};

pub type GraphRef = Arc<LGraph>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge `{edge}` refers to unknown vertex `{endpoint}`")]
    DanglingEdge { edge: String, endpoint: String },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("identifier `{0}` is used twice")]
    DuplicateId(String),
    #[error("unknown identifier `{0}`")]
    UnknownId(String),
    #[error("`{0}` is not mapped")]
    Unmapped(String),
    #[error("map is not total: expected {expected} {what}, got {got}")]
    Arity { what: &'static str, expected: usize, got: usize },
    #[error("edge `{edge}` is not mapped compatibly with its endpoints")]
    NotAPremorphism { edge: String },
    #[error("label of `{element}` decreases from `{from}` to `{to}`")]
    LabelDecrease { element: String, from: String, to: String },
    #[error("graphs are labeled over different lattices")]
    LatticeMismatch,
    #[error("morphisms are not composable")]
    NotComposable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
    pub label: Label,
}

/// A finite directed multigraph with vertex and edge labels from a lattice.
#[derive(Clone, PartialEq, Eq)]
pub struct LGraph {
    lattice: Arc<Lattice>,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

/// Incremental constructor for [`LGraph`] that refers to endpoints by identifier.
pub struct GraphBuilder {
    lattice: Arc<Lattice>,
    vertices: Vec<(String, Label)>,
    edges: Vec<(String, String, String, Label)>,
}

impl GraphBuilder {
    pub fn new(lattice: Arc<Lattice>) -> Self {
        GraphBuilder { lattice, vertices: Vec::new(), edges: Vec::new() }
    }

    pub fn vertex(&mut self, id: impl Into<String>, label: Label) -> &mut Self {
        self.vertices.push((id.into(), label));
        self
    }

    pub fn edge(
        &mut self,
        id: impl Into<String>,
        src: impl Into<String>,
        tgt: impl Into<String>,
        label: Label,
    ) -> &mut Self {
        self.edges.push((id.into(), src.into(), tgt.into(), label));
        self
    }

    pub fn build(&self) -> Result<LGraph, GraphError> {
        let mut vindex = BTreeMap::new();
        for (i, (id, label)) in self.vertices.iter().enumerate() {
            self.lattice.check(*label).map_err(|_| GraphError::UnknownLabel(format!("#{}", label.index())))?;
            if vindex.insert(id.as_str(), i).is_some() {
                return Err(GraphError::DuplicateId(id.clone()));
            }
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut seen = BTreeSet::new();
        for (id, s, t, label) in &self.edges {
            if vindex.contains_key(id.as_str()) || !seen.insert(id.as_str()) {
                return Err(GraphError::DuplicateId(id.clone()));
            }
            self.lattice.check(*label).map_err(|_| GraphError::UnknownLabel(format!("#{}", label.index())))?;
            let lookup = |v: &String| {
                vindex
                    .get(v.as_str())
                    .copied()
                    .ok_or_else(|| GraphError::DanglingEdge { edge: id.clone(), endpoint: v.clone() })
            };
            edges.push((id.clone(), lookup(s)?, lookup(t)?, *label));
        }
        let (g, _, _) = LGraph::from_indexed(self.lattice.clone(), self.vertices.clone(), edges);
        Ok(g)
    }
}

impl LGraph {
    /// The graph with no vertices and no edges.
    pub fn empty(lattice: Arc<Lattice>) -> LGraph {
        LGraph { lattice, vertices: Vec::new(), edges: Vec::new() }
    }

    /// Builds a graph from positional data, sorting both element lists by
    /// identifier. Returns the graph and, for each input vertex and edge, its
    /// index in the result. Identifiers must already be unique.
    pub(crate) fn from_indexed(
        lattice: Arc<Lattice>,
        vertices: Vec<(String, Label)>,
        edges: Vec<(String, usize, usize, Label)>,
    ) -> (LGraph, Vec<usize>, Vec<usize>) {
        let vorder = sort_order(vertices.iter().map(|v| v.0.as_str()));
        let mut vpos = vec![0; vertices.len()];
        for (new, &old) in vorder.iter().enumerate() {
            vpos[old] = new;
        }
        let eorder = sort_order(edges.iter().map(|e| e.0.as_str()));
        let mut epos = vec![0; edges.len()];
        for (new, &old) in eorder.iter().enumerate() {
            epos[old] = new;
        }
        let vs = vorder.iter().map(|&i| Vertex { id: vertices[i].0.clone(), label: vertices[i].1 }).collect();
        let es = eorder
            .iter()
            .map(|&i| {
                let (id, s, t, l) = &edges[i];
                Edge { id: id.clone(), src: vpos[*s], tgt: vpos[*t], label: *l }
            })
            .collect();
        (LGraph { lattice, vertices: vs, edges: es }, vpos, epos)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Total number of vertices and edges.
    pub fn size(&self) -> usize {
        self.vertices.len() + self.edges.len()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.id.as_str().cmp(id)).ok()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.binary_search_by(|e| e.id.as_str().cmp(id)).ok()
    }

    /// Re-checks the structural invariants. Graphs built through
    /// [`GraphBuilder`] always pass.
    pub fn validate(&self) -> Result<(), GraphError> {
        let mut ids = BTreeSet::new();
        for v in &self.vertices {
            self.lattice.check(v.label).map_err(|_| GraphError::UnknownLabel(format!("#{}", v.label.index())))?;
            if !ids.insert(v.id.as_str()) {
                return Err(GraphError::DuplicateId(v.id.clone()));
            }
        }
        for e in &self.edges {
            if !ids.insert(e.id.as_str()) {
                return Err(GraphError::DuplicateId(e.id.clone()));
            }
            self.lattice.check(e.label).map_err(|_| GraphError::UnknownLabel(format!("#{}", e.label.index())))?;
            for end in [e.src, e.tgt] {
                if end >= self.vertices.len() {
                    return Err(GraphError::DanglingEdge { edge: e.id.clone(), endpoint: format!("#{end}") });
                }
            }
        }
        Ok(())
    }

    /// Same structure with every label replaced by `f(label)`.
    pub fn relabeled(&self, mut f: impl FnMut(Label) -> Label) -> LGraph {
        let mut g = self.clone();
        for v in &mut g.vertices {
            v.label = f(v.label);
        }
        for e in &mut g.edges {
            e.label = f(e.label);
        }
        g
    }

    /// The subgraph on the given vertex and edge indices. Edges whose
    /// endpoints are not kept are dropped.
    pub fn subgraph(&self, vertices: &BTreeSet<usize>, edges: &BTreeSet<usize>) -> LGraph {
        let vs: Vec<usize> = vertices.iter().copied().collect();
        let mut pos = vec![usize::MAX; self.vertices.len()];
        for (i, &v) in vs.iter().enumerate() {
            pos[v] = i;
        }
        let vertices = vs.iter().map(|&v| self.vertices[v].clone()).collect();
        let edges = edges
            .iter()
            .map(|&e| &self.edges[e])
            .filter(|e| pos[e.src] != usize::MAX && pos[e.tgt] != usize::MAX)
            .map(|e| Edge { id: e.id.clone(), src: pos[e.src], tgt: pos[e.tgt], label: e.label })
            .collect();
        LGraph { lattice: self.lattice.clone(), vertices, edges }
    }

    /// Renames every element to `v0, v1, …` / `e0, e1, …` in the current order.
    pub fn with_plain_ids(&self) -> LGraph {
        let vertices: Vec<(String, Label)> =
            self.vertices.iter().enumerate().map(|(i, v)| (format!("v{i}"), v.label)).collect();
        let edges = self.edges.iter().enumerate().map(|(i, e)| (format!("e{i}"), e.src, e.tgt, e.label)).collect();
        LGraph::from_indexed(self.lattice.clone(), vertices, edges).0
    }

    pub fn same_lattice(&self, other: &LGraph) -> bool {
        Arc::ptr_eq(&self.lattice, &other.lattice) || *self.lattice == *other.lattice
    }

    fn label_name(&self, l: Label) -> &str {
        self.lattice.name(l)
    }
}

impl fmt::Debug for LGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", v.id, self.label_name(v.label))?;
        }
        write!(f, " | ")?;
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(
                f,
                "{}:{}->{}:{}",
                e.id,
                self.vertices[e.src].id,
                self.vertices[e.tgt].id,
                self.label_name(e.label)
            )?;
        }
        write!(f, "}}")
    }
}

fn sort_order<'a>(ids: impl Iterator<Item = &'a str>) -> Vec<usize> {
    let ids: Vec<&str> = ids.collect();
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| ids[a].cmp(ids[b]));
    order
}

/// A structure-preserving, label-non-decreasing map between two graphs.
#[derive(Clone)]
pub struct Morphism {
    source: GraphRef,
    target: GraphRef,
    vmap: Vec<usize>,
    emap: Vec<usize>,
}

impl PartialEq for Morphism {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.source, &other.source)
            && Arc::ptr_eq(&self.target, &other.target)
            && self.vmap == other.vmap
            && self.emap == other.emap
    }
}

impl Eq for Morphism {}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s, t) = (&self.source, &self.target);
        let mut m = f.debug_map();
        for (v, &w) in self.vmap.iter().enumerate() {
            m.entry(&s.vertices[v].id, &t.vertices[w].id);
        }
        for (e, &d) in self.emap.iter().enumerate() {
            m.entry(&s.edges[e].id, &t.edges[d].id);
        }
        m.finish()
    }
}

impl Morphism {
    /// Validates and wraps a pair of component maps.
    pub fn new(source: GraphRef, target: GraphRef, vmap: Vec<usize>, emap: Vec<usize>) -> Result<Morphism, GraphError> {
        let m = Morphism { source, target, vmap, emap };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(source: GraphRef, target: GraphRef, vmap: Vec<usize>, emap: Vec<usize>) -> Morphism {
        let m = Morphism { source, target, vmap, emap };
        debug_assert_eq!(m.validate(), Ok(()), "internal construction produced an invalid morphism");
        m
    }

    /// Builds a morphism from `(source id, target id)` pairs covering every
    /// vertex and edge of the source.
    pub fn from_pairs<S: AsRef<str>>(
        source: GraphRef,
        target: GraphRef,
        pairs: &[(S, S)],
    ) -> Result<Morphism, GraphError> {
        let mut vmap = vec![usize::MAX; source.vertex_count()];
        let mut emap = vec![usize::MAX; source.edge_count()];
        for (a, b) in pairs {
            let (a, b) = (a.as_ref(), b.as_ref());
            if let Some(v) = source.vertex_index(a) {
                vmap[v] = target.vertex_index(b).ok_or_else(|| GraphError::UnknownId(b.to_string()))?;
            } else if let Some(e) = source.edge_index(a) {
                emap[e] = target.edge_index(b).ok_or_else(|| GraphError::UnknownId(b.to_string()))?;
            } else {
                return Err(GraphError::UnknownId(a.to_string()));
            }
        }
        if let Some(v) = vmap.iter().position(|&x| x == usize::MAX) {
            return Err(GraphError::Unmapped(source.vertices[v].id.clone()));
        }
        if let Some(e) = emap.iter().position(|&x| x == usize::MAX) {
            return Err(GraphError::Unmapped(source.edges[e].id.clone()));
        }
        Morphism::new(source, target, vmap, emap)
    }

    pub fn identity(g: &GraphRef) -> Morphism {
        Morphism {
            source: g.clone(),
            target: g.clone(),
            vmap: (0..g.vertex_count()).collect(),
            emap: (0..g.edge_count()).collect(),
        }
    }

    /// The unique morphism out of the empty graph.
    pub fn from_empty(empty: &GraphRef, target: &GraphRef) -> Morphism {
        assert!(empty.size() == 0, "source must be empty");
        Morphism::new_unchecked(empty.clone(), target.clone(), Vec::new(), Vec::new())
    }

    pub fn source(&self) -> &GraphRef {
        &self.source
    }

    pub fn target(&self) -> &GraphRef {
        &self.target
    }

    pub fn vmap(&self) -> &[usize] {
        &self.vmap
    }

    pub fn emap(&self) -> &[usize] {
        &self.emap
    }

    pub fn vertex(&self, v: usize) -> usize {
        self.vmap[v]
    }

    pub fn edge(&self, e: usize) -> usize {
        self.emap[e]
    }

    /// Checks totality, the premorphism squares and label monotonicity,
    /// reporting the first violation.
    pub fn validate(&self) -> Result<(), GraphError> {
        let (s, t) = (&*self.source, &*self.target);
        if !s.same_lattice(t) {
            return Err(GraphError::LatticeMismatch);
        }
        if self.vmap.len() != s.vertex_count() {
            return Err(GraphError::Arity { what: "vertices", expected: s.vertex_count(), got: self.vmap.len() });
        }
        if self.emap.len() != s.edge_count() {
            return Err(GraphError::Arity { what: "edges", expected: s.edge_count(), got: self.emap.len() });
        }
        let lat = s.lattice();
        for (v, &w) in self.vmap.iter().enumerate() {
            let w = t.vertices.get(w).ok_or_else(|| GraphError::UnknownId(format!("#{w}")))?;
            let sv = &s.vertices[v];
            if !lat.leq(sv.label, w.label) {
                return Err(GraphError::LabelDecrease {
                    element: sv.id.clone(),
                    from: lat.name(sv.label).to_string(),
                    to: lat.name(w.label).to_string(),
                });
            }
        }
        for (e, &d) in self.emap.iter().enumerate() {
            let d = t.edges.get(d).ok_or_else(|| GraphError::UnknownId(format!("#{d}")))?;
            let se = &s.edges[e];
            if self.vmap[se.src] != d.src || self.vmap[se.tgt] != d.tgt {
                return Err(GraphError::NotAPremorphism { edge: se.id.clone() });
            }
            if !lat.leq(se.label, d.label) {
                return Err(GraphError::LabelDecrease {
                    element: se.id.clone(),
                    from: lat.name(se.label).to_string(),
                    to: lat.name(d.label).to_string(),
                });
            }
        }
        Ok(())
    }

    /// `self ∘ f`: first `f`, then `self`.
    pub fn compose(&self, f: &Morphism) -> Result<Morphism, GraphError> {
        if !Arc::ptr_eq(&f.target, &self.source) {
            return Err(GraphError::NotComposable);
        }
        Ok(Morphism {
            source: f.source.clone(),
            target: self.target.clone(),
            vmap: f.vmap.iter().map(|&v| self.vmap[v]).collect(),
            emap: f.emap.iter().map(|&e| self.emap[e]).collect(),
        })
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Morphism) -> Result<Morphism, GraphError> {
        g.compose(self)
    }

    /// True when the labels of every element are equal to those of its image.
    pub fn is_label_preserving(&self) -> bool {
        let (s, t) = (&self.source, &self.target);
        self.vmap.iter().enumerate().all(|(v, &w)| s.vertices[v].label == t.vertices[w].label)
            && self.emap.iter().enumerate().all(|(e, &d)| s.edges[e].label == t.edges[d].label)
    }

    pub fn is_mono(&self) -> bool {
        injective(&self.vmap, self.target.vertex_count()) && injective(&self.emap, self.target.edge_count())
    }

    pub fn is_epi(&self) -> bool {
        surjective(&self.vmap, self.target.vertex_count()) && surjective(&self.emap, self.target.edge_count())
    }

    /// Bijective on both components with equal labels, hence invertible.
    pub fn is_iso(&self) -> bool {
        self.is_mono() && self.is_epi() && self.is_label_preserving()
    }

    /// The inverse of an isomorphism.
    pub fn inverse(&self) -> Option<Morphism> {
        if !self.is_iso() {
            return None;
        }
        let mut vmap = vec![0; self.vmap.len()];
        for (v, &w) in self.vmap.iter().enumerate() {
            vmap[w] = v;
        }
        let mut emap = vec![0; self.emap.len()];
        for (e, &d) in self.emap.iter().enumerate() {
            emap[d] = e;
        }
        Some(Morphism::new_unchecked(self.target.clone(), self.source.clone(), vmap, emap))
    }

    /// Image of a vertex set, as target indices.
    pub fn vertex_image(&self) -> BTreeSet<usize> {
        self.vmap.iter().copied().collect()
    }

    pub fn edge_image(&self) -> BTreeSet<usize> {
        self.emap.iter().copied().collect()
    }

    /// Same component maps; endpoints may be distinct graph values.
    pub fn same_maps(&self, other: &Morphism) -> bool {
        self.vmap == other.vmap && self.emap == other.emap
    }

    /// Reattaches the maps to other (structurally identical) endpoint graphs.
    pub fn rebased(&self, source: GraphRef, target: GraphRef) -> Result<Morphism, GraphError> {
        Morphism::new(source, target, self.vmap.clone(), self.emap.clone())
    }

    /// Factors `self` as an epi onto its image followed by a mono into the
    /// target. Image labels are the join of their preimage labels.
    pub fn epi_mono_factorize(&self) -> (Morphism, Morphism) {
        let (s, t) = (&*self.source, &*self.target);
        let lat = s.lattice();
        let vimg: Vec<usize> = self.vertex_image().into_iter().collect();
        let eimg: Vec<usize> = self.edge_image().into_iter().collect();
        let mut vpos = vec![usize::MAX; t.vertex_count()];
        for (i, &w) in vimg.iter().enumerate() {
            vpos[w] = i;
        }
        let mut epos = vec![usize::MAX; t.edge_count()];
        for (i, &d) in eimg.iter().enumerate() {
            epos[d] = i;
        }
        let mut vlabel = vec![lat.bottom(); vimg.len()];
        for (v, &w) in self.vmap.iter().enumerate() {
            vlabel[vpos[w]] = lat.join2(vlabel[vpos[w]], s.vertices[v].label);
        }
        let mut elabel = vec![lat.bottom(); eimg.len()];
        for (e, &d) in self.emap.iter().enumerate() {
            elabel[epos[d]] = lat.join2(elabel[epos[d]], s.edges[e].label);
        }
        // vimg/eimg are increasing and t is sorted, so the image stays sorted.
        let image = Arc::new(LGraph {
            lattice: s.lattice.clone(),
            vertices: vimg
                .iter()
                .zip(&vlabel)
                .map(|(&w, &l)| Vertex { id: t.vertices[w].id.clone(), label: l })
                .collect(),
            edges: eimg
                .iter()
                .zip(&elabel)
                .map(|(&d, &l)| {
                    let te = &t.edges[d];
                    Edge { id: te.id.clone(), src: vpos[te.src], tgt: vpos[te.tgt], label: l }
                })
                .collect(),
        });
        let e = Morphism::new_unchecked(
            self.source.clone(),
            image.clone(),
            self.vmap.iter().map(|&w| vpos[w]).collect(),
            self.emap.iter().map(|&d| epos[d]).collect(),
        );
        let m = Morphism::new_unchecked(image, self.target.clone(), vimg, eimg);
        (e, m)
    }
}

fn injective(map: &[usize], codomain: usize) -> bool {
    let mut hit = vec![false; codomain];
    map.iter().all(|&x| !std::mem::replace(&mut hit[x], true))
}

fn surjective(map: &[usize], codomain: usize) -> bool {
    let mut hit = vec![false; codomain];
    for &x in map {
        hit[x] = true;
    }
    hit.into_iter().all(|h| h)
}

/// Split of a host graph induced by a premorphism into it: the image, the
/// largest subgraph disjoint from the image, and the remaining edges.
#[derive(Debug, Clone)]
pub struct PatchDecomposition {
    pub match_graph: LGraph,
    pub context_graph: LGraph,
    /// Indices of the patch edges in the host.
    pub patch_edges: BTreeSet<usize>,
    pub match_vertices: BTreeSet<usize>,
    pub match_edges: BTreeSet<usize>,
    pub context_vertices: BTreeSet<usize>,
    pub context_edges: BTreeSet<usize>,
}

pub fn patch_decomposition(x: &Morphism) -> PatchDecomposition {
    let g = x.target();
    let match_vertices = x.vertex_image();
    let match_edges = x.edge_image();
    let context_vertices: BTreeSet<usize> = (0..g.vertex_count()).filter(|v| !match_vertices.contains(v)).collect();
    let context_edges: BTreeSet<usize> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| context_vertices.contains(&e.src) && context_vertices.contains(&e.tgt))
        .map(|(i, _)| i)
        .collect();
    let patch_edges = (0..g.edge_count()).filter(|e| !match_edges.contains(e) && !context_edges.contains(e)).collect();
    PatchDecomposition {
        match_graph: g.subgraph(&match_vertices, &match_edges),
        context_graph: g.subgraph(&context_vertices, &context_edges),
        patch_edges,
        match_vertices,
        match_edges,
        context_vertices,
        context_edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(base: &[&str]) -> Arc<Lattice> {
        Arc::new(Lattice::flat(base).unwrap())
    }

    fn unlabeled() -> Arc<Lattice> {
        Arc::new(Lattice::singleton())
    }

    fn graph(lat: &Arc<Lattice>, vs: &[(&str, &str)], es: &[(&str, &str, &str, &str)]) -> GraphRef {
        let mut b = GraphBuilder::new(lat.clone());
        for (id, l) in vs {
            b.vertex(*id, lat.get(l).unwrap());
        }
        for (id, s, t, l) in es {
            b.edge(*id, *s, *t, lat.get(l).unwrap());
        }
        Arc::new(b.build().unwrap())
    }

    #[test]
    fn builder_sorts_and_rejects_bad_input() {
        let lat = unlabeled();
        let g = graph(&lat, &[("b", "bot"), ("a", "bot")], &[("e", "b", "a", "bot")]);
        assert_eq!(g.vertices()[0].id, "a");
        assert_eq!(g.edges()[0].src, 1);
        let mut b = GraphBuilder::new(lat.clone());
        b.vertex("x", lat.bottom()).edge("e", "x", "y", lat.bottom());
        assert!(matches!(b.build(), Err(GraphError::DanglingEdge { .. })));
        let mut b = GraphBuilder::new(lat.clone());
        b.vertex("x", lat.bottom()).edge("x", "x", "x", lat.bottom());
        assert_eq!(b.build().unwrap_err(), GraphError::DuplicateId("x".into()));
    }

    #[test]
    fn label_decrease_is_rejected() {
        let lat = flat(&["a", "c"]);
        let src = graph(&lat, &[("x", "c")], &[]);
        let tgt = graph(&lat, &[("y", "a")], &[]);
        let err = Morphism::from_pairs(src, tgt, &[("x", "y")]).unwrap_err();
        assert!(matches!(err, GraphError::LabelDecrease { .. }));
    }

    #[test]
    fn bottom_into_top_is_valid_but_not_preserving() {
        let lat = flat(&["a"]);
        let src = graph(&lat, &[("x", "bot")], &[]);
        let tgt = graph(&lat, &[("x", "top")], &[]);
        let f = Morphism::from_pairs(src, tgt, &[("x", "x")]).unwrap();
        assert!(!f.is_label_preserving());
        assert!(Morphism::identity(f.source()).is_label_preserving());
    }

    #[test]
    fn premorphism_condition() {
        let lat = unlabeled();
        let src = graph(&lat, &[("x", "bot"), ("y", "bot")], &[("e", "x", "y", "bot")]);
        let tgt = graph(&lat, &[("u", "bot"), ("v", "bot")], &[("f", "u", "v", "bot")]);
        let bad = Morphism::from_pairs(src.clone(), tgt.clone(), &[("x", "v"), ("y", "u"), ("e", "f")]);
        assert_eq!(bad.unwrap_err(), GraphError::NotAPremorphism { edge: "e".into() });
        let unmapped = Morphism::from_pairs(src, tgt, &[("x", "u"), ("y", "v")]);
        assert_eq!(unmapped.unwrap_err(), GraphError::Unmapped("e".into()));
    }

    #[test]
    fn composition_and_identity() {
        let lat = unlabeled();
        let a = graph(&lat, &[("x1", "bot"), ("x2", "bot"), ("y", "bot")], &[]);
        let b = graph(&lat, &[("x", "bot"), ("y", "bot")], &[]);
        let f = Morphism::from_pairs(a.clone(), b.clone(), &[("x1", "x"), ("x2", "x"), ("y", "y")]).unwrap();
        assert_eq!(Morphism::identity(&b).compose(&f).unwrap(), f);
        assert_eq!(f.compose(&Morphism::identity(&a)).unwrap(), f);
        assert!(f.is_epi() && !f.is_mono());
        // equal but distinct graph value
        let b2 = Arc::new((*b).clone());
        assert_eq!(Morphism::identity(&b2).compose(&f).unwrap_err(), GraphError::NotComposable);
    }

    #[test]
    fn inclusion_is_mono_not_epi() {
        let lat = unlabeled();
        let a = graph(&lat, &[("x", "bot")], &[]);
        let b = graph(&lat, &[("x", "bot"), ("y", "bot")], &[]);
        let f = Morphism::from_pairs(a, b, &[("x", "x")]).unwrap();
        assert!(f.is_mono() && !f.is_epi());
    }

    #[test]
    fn factorization_joins_preimage_labels() {
        let lat = flat(&["a"]);
        let a = graph(&lat, &[("p", "bot"), ("q", "bot")], &[]);
        let b = graph(&lat, &[("u", "top"), ("w", "a")], &[]);
        let f = Morphism::from_pairs(a, b, &[("p", "u"), ("q", "u")]).unwrap();
        let (e, m) = f.epi_mono_factorize();
        assert!(e.is_epi() && m.is_mono());
        assert_eq!(m.compose(&e).unwrap(), f);
        assert_eq!(e.target().vertex_count(), 1);
        assert_eq!(e.target().vertices()[0].label, lat.bottom());
    }

    #[test]
    fn factorization_of_mono_and_epi() {
        let lat = unlabeled();
        let a = graph(&lat, &[("x", "bot")], &[("l", "x", "x", "bot")]);
        let b = graph(&lat, &[("x", "bot"), ("y", "bot")], &[("l", "x", "x", "bot")]);
        let f = Morphism::from_pairs(a.clone(), b, &[("x", "x"), ("l", "l")]).unwrap();
        let (e, _) = f.epi_mono_factorize();
        assert!(e.is_iso());
        let c = graph(&lat, &[("x", "bot"), ("y", "bot")], &[]);
        let d = graph(&lat, &[("z", "bot")], &[]);
        let g = Morphism::from_pairs(c, d, &[("x", "z"), ("y", "z")]).unwrap();
        let (_, m) = g.epi_mono_factorize();
        assert!(m.is_iso());
    }

    #[test]
    fn patch_decomposition_counts() {
        // triangle pattern inside a host with two context vertices
        let lat = flat(&["a", "b", "c"]);
        let p = graph(
            &lat,
            &[("1", "bot"), ("2", "bot"), ("3", "bot")],
            &[("p12", "1", "2", "b"), ("p23", "2", "3", "a"), ("p31", "3", "1", "a")],
        );
        let g = graph(
            &lat,
            &[("h1", "bot"), ("h2", "bot"), ("h3", "bot"), ("h4", "bot"), ("h5", "bot")],
            &[
                ("m12", "h1", "h2", "b"),
                ("m23", "h2", "h3", "a"),
                ("m31", "h3", "h1", "a"),
                ("j24", "h2", "h4", "b"),
                ("j53", "h5", "h3", "a"),
                ("j31", "h3", "h1", "c"),
                ("c45", "h4", "h5", "b"),
            ],
        );
        let x = Morphism::from_pairs(
            p,
            g,
            &[("1", "h1"), ("2", "h2"), ("3", "h3"), ("p12", "m12"), ("p23", "m23"), ("p31", "m31")],
        )
        .unwrap();
        let d = patch_decomposition(&x);
        assert_eq!(d.match_graph.edge_count(), 3);
        assert_eq!(d.context_graph.edge_count(), 1);
        assert_eq!(d.patch_edges.len(), 3);
    }

    #[test]
    fn patch_of_vertex_in_two_cycle() {
        let lat = unlabeled();
        let p = graph(&lat, &[("x", "bot")], &[]);
        let g = graph(&lat, &[("u", "bot"), ("v", "bot")], &[("e1", "u", "v", "bot"), ("e2", "v", "u", "bot")]);
        let d = patch_decomposition(&Morphism::from_pairs(p, g, &[("x", "u")]).unwrap());
        assert_eq!(d.match_graph.vertex_count(), 1);
        assert_eq!(d.context_graph.vertex_count(), 1);
        assert_eq!(d.context_graph.edge_count(), 0);
        assert_eq!(d.patch_edges.len(), 2);
        let id = patch_decomposition(&Morphism::identity(&Arc::new(d.match_graph.clone())));
        assert!(id.context_vertices.is_empty() && id.patch_edges.is_empty());
    }
}
