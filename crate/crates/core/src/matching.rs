// SPDX-License-Identifier: Apache-2.0

//! Matches of a pattern into a host and adherences of the host to a type graph.

use std::sync::Arc;

use crate::graph::{GraphRef, Morphism};
use crate::search::{enumerate_morphisms, Search};

/// A match `m: L → G` together with an adherence `α: G → L′`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchCandidate {
    pub m: Morphism,
    pub alpha: Morphism,
}

pub fn enumerate_matches(l: &GraphRef, g: &GraphRef, monic_only: bool) -> Vec<Morphism> {
    enumerate_morphisms(l, g, monic_only)
}

/// All `α: G → L′` with `α ∘ m = t_L`, in deterministic order. With
/// `strong_only`, keeps only those making the match square a pullback.
pub fn enumerate_adherences(m: &Morphism, t_l: &Morphism, strong_only: bool) -> Vec<Morphism> {
    if !Arc::ptr_eq(m.source(), t_l.source()) {
        return Vec::new();
    }
    let (g, lp) = (m.target(), t_l.target());
    let mut search = Search::new(g, lp);
    let l = m.source();
    for x in 0..l.vertex_count() {
        search.fix_vertex(m.vertex(x), t_l.vertex(x));
    }
    for x in 0..l.edge_count() {
        search.fix_edge(m.edge(x), t_l.edge(x));
    }
    if strong_only {
        // outside m(L), nothing may land in t_L(L)
        let (mv, me) = (m.vertex_image(), m.edge_image());
        let (tv, te) = (t_l.vertex_image(), t_l.edge_image());
        search.retain_vertices(|v, w| mv.contains(&v) || !tv.contains(&w));
        search.retain_edges(|e, d| me.contains(&e) || !te.contains(&d));
    }
    search
        .collect()
        .into_iter()
        .map(|(v, e)| Morphism::new_unchecked(g.clone(), lp.clone(), v, e))
        .filter(|a| !strong_only || is_strong_match(t_l, m, a))
        .collect()
}

/// `α ∘ m = t_L`.
pub fn is_pbpo_match(t_l: &Morphism, m: &Morphism, alpha: &Morphism) -> bool {
    Arc::ptr_eq(m.source(), t_l.source())
        && Arc::ptr_eq(m.target(), alpha.source())
        && Arc::ptr_eq(alpha.target(), t_l.target())
        && alpha.compose(m).is_ok_and(|am| am.same_maps(t_l))
}

/// The match square `(1_L, m, t_L, α)` is a pullback: every element of
/// `t_L(L)` has exactly one α-preimage, namely the matching `m`-image.
pub fn is_strong_match(t_l: &Morphism, m: &Morphism, alpha: &Morphism) -> bool {
    if !is_pbpo_match(t_l, m, alpha) {
        return false;
    }
    // Labels need no check: the pullback label ℓ_L(x) ∧ ℓ_G(m x) is ℓ_L(x)
    // because m is label-monotone.
    let l = m.source();
    let g = m.target();
    for x in 0..l.vertex_count() {
        let pre: Vec<usize> = (0..g.vertex_count()).filter(|&v| alpha.vertex(v) == t_l.vertex(x)).collect();
        if pre != [m.vertex(x)] {
            return false;
        }
    }
    for x in 0..l.edge_count() {
        let pre: Vec<usize> = (0..g.edge_count()).filter(|&e| alpha.edge(e) == t_l.edge(x)).collect();
        if pre != [m.edge(x)] {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphBuilder, LGraph};
    use crate::lattice::Lattice;
    use crate::limits::is_pullback_square;

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

    /// Loop deletion: L = looped x, L′ = looped x plus looped y.
    fn loop_typing() -> (Arc<Lattice>, Morphism) {
        let lat = Arc::new(Lattice::singleton());
        let l = graph(&lat, &[("x", "bot")], &[("lx", "x", "x")]);
        let lp = graph(&lat, &[("x", "bot"), ("y", "bot")], &[("lx", "x", "x"), ("ly", "y", "y")]);
        let t = Morphism::from_pairs(l, lp, &[("x", "x"), ("lx", "lx")]).unwrap();
        (lat, t)
    }

    #[test]
    fn vertex_into_three() {
        let lat = Arc::new(Lattice::singleton());
        let l = graph(&lat, &[("x", "bot")], &[]);
        let g = graph(&lat, &[("a", "bot"), ("b", "bot"), ("c", "bot")], &[]);
        assert_eq!(enumerate_matches(&l, &g, true).len(), 3);
    }

    #[test]
    fn loop_host_adherences() {
        let (lat, t) = loop_typing();
        let g = graph(&lat, &[("a", "bot"), ("b", "bot")], &[("la", "a", "a"), ("lb", "b", "b")]);
        let ms = enumerate_matches(t.source(), &g, true);
        assert_eq!(ms.len(), 2);
        let m = &ms[0];
        let all = enumerate_adherences(m, &t, false);
        assert_eq!(all.len(), 2);
        let strong = enumerate_adherences(m, &t, true);
        assert_eq!(strong.len(), 1);
        assert_eq!(strong[0].vertex(1), 1);
        let folding = all.iter().find(|a| a.vertex(1) == 0).unwrap();
        assert!(is_pbpo_match(&t, m, folding));
        assert!(!is_strong_match(&t, m, folding));
        // agrees with the pullback test on the match square
        let id = Morphism::identity(t.source());
        for a in &all {
            assert_eq!(is_strong_match(&t, m, a), is_pullback_square(&id, m, &t, a));
        }
    }

    #[test]
    fn identity_adherence_when_host_is_pattern() {
        let lat = Arc::new(Lattice::singleton());
        let l = graph(&lat, &[("x", "bot"), ("y", "bot")], &[("e", "x", "y")]);
        let t = Morphism::identity(&l);
        let strong = enumerate_adherences(&t, &t, true);
        assert_eq!(strong.len(), 1);
        assert!(is_strong_match(&t, &t, &strong[0]));
    }

    #[test]
    fn non_commuting_alpha_is_not_a_match() {
        let (lat, t) = loop_typing();
        let g = graph(&lat, &[("a", "bot"), ("b", "bot")], &[("la", "a", "a"), ("lb", "b", "b")]);
        let m = Morphism::from_pairs(t.source().clone(), g.clone(), &[("x", "a"), ("lx", "la")]).unwrap();
        let swap =
            Morphism::from_pairs(g, t.target().clone(), &[("a", "y"), ("b", "x"), ("la", "ly"), ("lb", "lx")]).unwrap();
        assert!(!is_pbpo_match(&t, &m, &swap));
        assert!(!is_strong_match(&t, &m, &swap));
    }

    #[test]
    fn empty_pattern_matches_once() {
        let lat = Arc::new(Lattice::singleton());
        let l = Arc::new(LGraph::empty(lat.clone()));
        let g = graph(&lat, &[("a", "bot")], &[]);
        assert_eq!(enumerate_matches(&l, &g, true).len(), 1);
    }
}
