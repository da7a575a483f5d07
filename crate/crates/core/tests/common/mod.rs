//! Shared helpers for integration tests: fixture loading, random
//! generators, and a brute-force morphism enumerator that shares no code
//! with the library's search.

#![allow(dead_code)]

use std::sync::Arc;

use pbpo_core::limits::{pullback, Cospan};
use pbpo_core::{GraphBuilder, GraphRef, LGraph, Label, Lattice, Morphism, Rule, Workspace};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn fixture(name: &str) -> Workspace {
    let path = format!("{}/examples/{name}.pbpo", env!("CARGO_MANIFEST_DIR"));
    let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    Workspace::parse(&src).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub const FIXTURES: [&str; 8] =
    ["relabel", "rewrite_step", "loopdel", "spiral", "fig1", "compact", "sorts", "variables"];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A random finite lattice with at most `max` elements: bottom, top and a
/// random order on up to `max - 2` elements in between.
pub fn random_lattice(rng: &mut impl Rng, max: usize) -> Arc<Lattice> {
    loop {
        if max < 2 || rng.gen_bool(0.1) {
            return Arc::new(Lattice::singleton());
        }
        let k = rng.gen_range(0..=max - 2);
        let mut elements = vec!["bot".to_string()];
        elements.extend((0..k).map(|i| format!("m{i}")));
        elements.push("top".to_string());
        let mut covers = Vec::new();
        for i in 0..k {
            covers.push(("bot".to_string(), format!("m{i}")));
            covers.push((format!("m{i}"), "top".to_string()));
            for j in i + 1..k {
                if rng.gen_bool(0.3) {
                    covers.push((format!("m{i}"), format!("m{j}")));
                }
            }
        }
        covers.push(("bot".to_string(), "top".to_string()));
        if let Ok(l) = Lattice::from_poset(&elements, &covers) {
            return Arc::new(l);
        }
    }
}

pub fn random_label(rng: &mut impl Rng, lat: &Lattice) -> Label {
    let all: Vec<Label> = lat.labels().collect();
    *all.choose(rng).unwrap()
}

/// A uniformly chosen label `x` with `lo ≤ x ≤ hi`.
pub fn label_between(rng: &mut impl Rng, lat: &Lattice, lo: Label, hi: Label) -> Label {
    let all: Vec<Label> = lat.labels().filter(|&x| lat.leq(lo, x) && lat.leq(x, hi)).collect();
    *all.choose(rng).expect("lo ≤ hi")
}

pub fn random_graph(rng: &mut impl Rng, lat: &Arc<Lattice>, max_v: usize, max_e: usize) -> GraphRef {
    let n = rng.gen_range(0..=max_v);
    let mut b = GraphBuilder::new(lat.clone());
    for i in 0..n {
        b.vertex(format!("v{i}"), random_label(rng, lat));
    }
    if n > 0 {
        for i in 0..rng.gen_range(0..=max_e) {
            let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
            b.edge(format!("e{i}"), format!("v{s}"), format!("v{t}"), random_label(rng, lat));
        }
    }
    Arc::new(b.build().unwrap())
}

/// Every morphism `a → b`, by trying every vertex and edge map.
pub fn brute_morphisms(a: &GraphRef, b: &GraphRef) -> Vec<Morphism> {
    let lat = a.lattice();
    let mut out = Vec::new();
    let nv = a.vertex_count();
    let mut vmap = vec![0; nv];
    fn vertices(i: usize, a: &GraphRef, b: &GraphRef, lat: &Lattice, vmap: &mut Vec<usize>, out: &mut Vec<Morphism>) {
        if i == a.vertex_count() {
            let mut emap = vec![0; a.edge_count()];
            edges(0, a, b, lat, vmap, &mut emap, out);
            return;
        }
        for w in 0..b.vertex_count() {
            if lat.leq(a.vertices()[i].label, b.vertices()[w].label) {
                vmap[i] = w;
                vertices(i + 1, a, b, lat, vmap, out);
            }
        }
    }
    fn edges(
        i: usize,
        a: &GraphRef,
        b: &GraphRef,
        lat: &Lattice,
        vmap: &[usize],
        emap: &mut Vec<usize>,
        out: &mut Vec<Morphism>,
    ) {
        if i == a.edge_count() {
            out.push(Morphism::new(a.clone(), b.clone(), vmap.to_vec(), emap.clone()).unwrap());
            return;
        }
        let e = &a.edges()[i];
        for (j, d) in b.edges().iter().enumerate() {
            if d.src == vmap[e.src] && d.tgt == vmap[e.tgt] && lat.leq(e.label, d.label) {
                emap[i] = j;
                edges(i + 1, a, b, lat, vmap, emap, out);
            }
        }
    }
    if a.same_lattice(b) {
        vertices(0, a, b, lat, &mut vmap, &mut out);
    }
    out
}

pub fn same_maps(f: &Morphism, g: &Morphism) -> bool {
    f.vmap() == g.vmap() && f.emap() == g.emap()
}

/// `g ∘ f` as plain index maps.
pub fn compose_maps(g: &Morphism, f: &Morphism) -> (Vec<usize>, Vec<usize>) {
    (f.vmap().iter().map(|&v| g.vertex(v)).collect(), f.emap().iter().map(|&e| g.edge(e)).collect())
}

/// A random rule with monic `t_L`: `L ⊆ L′` with lowered labels, a random
/// `K′ → L′` made of copies of `L′` elements, `K` the pullback, and `R` a
/// random merge-and-extend of `K`.
pub fn random_rule(rng: &mut impl Rng, lat: &Arc<Lattice>, max_v: usize) -> Rule {
    let lp = loop {
        let g = random_graph(rng, lat, max_v.min(4), 5);
        if g.vertex_count() >= 2 {
            break g;
        }
    };
    // L: a subgraph of L′ with labels lowered
    let keep_v: Vec<bool> = (0..lp.vertex_count()).map(|_| rng.gen_bool(0.8)).collect();
    let mut b = GraphBuilder::new(lat.clone());
    for (i, v) in lp.vertices().iter().enumerate() {
        if keep_v[i] {
            b.vertex(v.id.clone(), label_between(rng, lat, lat.bottom(), v.label));
        }
    }
    for e in lp.edges() {
        if keep_v[e.src] && keep_v[e.tgt] && rng.gen_bool(0.75) {
            b.edge(
                e.id.clone(),
                lp.vertices()[e.src].id.clone(),
                lp.vertices()[e.tgt].id.clone(),
                label_between(rng, lat, lat.bottom(), e.label),
            );
        }
    }
    let l = Arc::new(b.build().unwrap());
    let t_l = inclusion_by_ids(&l, &lp);
    // K′: 0..=2 copies of each L′ vertex, edges over copies
    let mut b = GraphBuilder::new(lat.clone());
    let mut copies: Vec<Vec<String>> = Vec::new();
    let mut vpairs: Vec<(String, String)> = Vec::new();
    for v in lp.vertices() {
        let n = rng.gen_range(0..=2);
        let mut c = Vec::new();
        for k in 0..n {
            let id = format!("{}_{k}", v.id);
            b.vertex(id.clone(), label_between(rng, lat, lat.bottom(), v.label));
            vpairs.push((id.clone(), v.id.clone()));
            c.push(id);
        }
        copies.push(c);
    }
    let mut epairs: Vec<(String, String)> = Vec::new();
    for e in lp.edges() {
        for s in &copies[e.src] {
            for t in &copies[e.tgt] {
                if rng.gen_bool(0.4) {
                    let id = format!("{}_{s}_{t}", e.id);
                    b.edge(id.clone(), s.clone(), t.clone(), label_between(rng, lat, lat.bottom(), e.label));
                    epairs.push((id, e.id.clone()));
                }
            }
        }
    }
    let kp = Arc::new(b.build().unwrap());
    let pairs: Vec<(String, String)> = vpairs.into_iter().chain(epairs).collect();
    let l_prime = Morphism::from_pairs(kp, lp, &pairs).unwrap();
    let pb = pullback(&Cospan::new(t_l.clone(), l_prime.clone()).unwrap());
    let k = pb.object.clone();
    // R: merge random vertex pairs of K, raise labels, add fresh elements
    let nk = k.vertex_count();
    let mut class: Vec<usize> = (0..nk).collect();
    for v in 1..nk {
        if rng.gen_bool(0.25) {
            class[v] = class[rng.gen_range(0..v)];
        }
    }
    let lat2 = lat.clone();
    let mut b = GraphBuilder::new(lat.clone());
    let mut reps: Vec<usize> = class.clone();
    reps.sort_unstable();
    reps.dedup();
    let extra_v = rng.gen_range(0..=1);
    for &c in &reps {
        let members = (0..nk).filter(|&v| class[v] == c).map(|v| k.vertices()[v].label);
        let joined = lat2.join(members);
        b.vertex(format!("r{c}"), label_between(rng, lat, joined, lat.top()));
    }
    for i in 0..extra_v {
        b.vertex(format!("n{i}"), random_label(rng, lat));
    }
    let mut r_pairs: Vec<(String, String)> =
        (0..nk).map(|v| (k.vertices()[v].id.clone(), format!("r{}", class[v]))).collect();
    for (i, e) in k.edges().iter().enumerate() {
        let id = format!("re{i}");
        b.edge(
            id.clone(),
            format!("r{}", class[e.src]),
            format!("r{}", class[e.tgt]),
            label_between(rng, lat, e.label, lat.top()),
        );
        r_pairs.push((e.id.clone(), id));
    }
    let names: Vec<String> =
        reps.iter().map(|c| format!("r{c}")).chain((0..extra_v).map(|i| format!("n{i}"))).collect();
    if !names.is_empty() {
        for i in 0..rng.gen_range(0..=1) {
            let s = names.choose(rng).unwrap().clone();
            let t = names.choose(rng).unwrap().clone();
            b.edge(format!("ne{i}"), s, t, random_label(rng, lat));
        }
    }
    let rg = Arc::new(b.build().unwrap());
    let r = Morphism::from_pairs(k.clone(), rg, &r_pairs).unwrap();
    Rule::new(pb.left, r, t_l, pb.right, l_prime).unwrap()
}

/// Inclusion of `a` into `b` by identifier.
pub fn inclusion_by_ids(a: &GraphRef, b: &GraphRef) -> Morphism {
    let pairs: Vec<(String, String)> = a
        .vertices()
        .iter()
        .map(|v| (v.id.clone(), v.id.clone()))
        .chain(a.edges().iter().map(|e| (e.id.clone(), e.id.clone())))
        .collect();
    Morphism::from_pairs(a.clone(), b.clone(), &pairs).unwrap()
}

/// A host with a strong match for `rule`: a copy of `L` with labels raised
/// within their typing bounds, plus extra elements typed outside `t_L(L)`.
/// Returns `(m, α)`, or `None` if the random extras could not be typed.
pub fn random_strong_host(rng: &mut impl Rng, rule: &Rule, max_v: usize) -> (Morphism, Morphism) {
    let (l, lp, t_l) = (rule.lhs(), rule.lhs_type(), rule.t_l());
    let lat = l.lattice().clone();
    let vim = t_l.vertex_image();
    let eim = t_l.edge_image();
    let mut b = GraphBuilder::new(lat.clone());
    let mut vtype: Vec<(String, usize)> = Vec::new();
    for (i, v) in l.vertices().iter().enumerate() {
        let hi = lp.vertices()[t_l.vertex(i)].label;
        b.vertex(v.id.clone(), label_between(rng, &lat, v.label, hi));
        vtype.push((v.id.clone(), t_l.vertex(i)));
    }
    let outside: Vec<usize> = (0..lp.vertex_count()).filter(|w| !vim.contains(w)).collect();
    let room = max_v.saturating_sub(l.vertex_count());
    if !outside.is_empty() {
        for i in 0..rng.gen_range(0..=room) {
            let w = *outside.choose(rng).unwrap();
            let id = format!("g{i}");
            b.vertex(id.clone(), label_between(rng, &lat, lat.bottom(), lp.vertices()[w].label));
            vtype.push((id, w));
        }
    }
    let mut etype: Vec<(String, usize)> = Vec::new();
    for (i, e) in l.edges().iter().enumerate() {
        let hi = lp.edges()[t_l.edge(i)].label;
        b.edge(
            e.id.clone(),
            l.vertices()[e.src].id.clone(),
            l.vertices()[e.tgt].id.clone(),
            label_between(rng, &lat, e.label, hi),
        );
        etype.push((e.id.clone(), t_l.edge(i)));
    }
    // extra edges over L′ edges outside the image
    let mut options: Vec<(usize, usize, usize)> = Vec::new();
    for (s, (_, ts)) in vtype.iter().enumerate() {
        for (t, (_, tt)) in vtype.iter().enumerate() {
            for (d, ed) in lp.edges().iter().enumerate() {
                if !eim.contains(&d) && ed.src == *ts && ed.tgt == *tt {
                    options.push((s, t, d));
                }
            }
        }
    }
    if !options.is_empty() {
        for i in 0..rng.gen_range(0..=3) {
            let (s, t, d) = *options.choose(rng).unwrap();
            let id = format!("h{i}");
            b.edge(
                id.clone(),
                vtype[s].0.clone(),
                vtype[t].0.clone(),
                label_between(rng, &lat, lat.bottom(), lp.edges()[d].label),
            );
            etype.push((id, d));
        }
    }
    let g = Arc::new(b.build().unwrap());
    let m = inclusion_by_ids(l, &g);
    let pairs: Vec<(String, String)> = vtype
        .iter()
        .map(|(id, w)| (id.clone(), lp.vertices()[*w].id.clone()))
        .chain(etype.iter().map(|(id, d)| (id.clone(), lp.edges()[*d].id.clone())))
        .collect();
    let alpha = Morphism::from_pairs(g, lp.clone(), &pairs).unwrap();
    (m, alpha)
}

/// Plain copy of a graph with the given lattice, used to compare graphs
/// built independently.
pub fn graph_of(lat: &Arc<Lattice>, vs: &[(&str, &str)], es: &[(&str, &str, &str, &str)]) -> GraphRef {
    let mut b = GraphBuilder::new(lat.clone());
    for (id, l) in vs {
        b.vertex(*id, lat.get(l).unwrap());
    }
    for (id, s, t, l) in es {
        b.edge(*id, *s, *t, lat.get(l).unwrap());
    }
    Arc::new(b.build().unwrap())
}

pub fn unit(g: &LGraph) -> (usize, usize) {
    (g.vertex_count(), g.edge_count())
}
