// SPDX-License-Identifier: Apache-2.0

//! Finite complete lattices of labels.
//!
//! A [`Lattice`] is stored as a dense order matrix together with precomputed
//! binary meet and join tables, so every order query is a table lookup.
//! Elements are addressed by [`Label`], an index into the carrier.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Textual name of the bottom element of flat and singleton lattices.
pub const BOTTOM_NAME: &str = "bot";
/// Textual name of the top element of flat lattices.
pub const TOP_NAME: &str = "top";

/// An element of some [`Lattice`], addressed by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub(crate) u16);

impl Label {
    /// Position of the element in its lattice's carrier.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice has no elements")]
    Empty,
    #[error("duplicate lattice element `{0}`")]
    DuplicateElement(String),
    #[error("unknown lattice element `{0}`")]
    UnknownElement(String),
    #[error("`{0}` is reserved for the bottom/top of a flat lattice")]
    ReservedName(String),
    #[error("order is not antisymmetric: cycle through {}", .0.join(" < "))]
    NotAPartialOrder(Vec<String>),
    #[error("elements `{0}` and `{1}` have no {2}")]
    NotALattice(String, String, &'static str),
    #[error("lattice has {0} elements, at most {1} are supported")]
    TooLarge(usize, usize),
}

/// A finite complete lattice.
#[derive(Clone, PartialEq, Eq)]
pub struct Lattice {
    names: Vec<String>,
    index: BTreeMap<String, Label>,
    leq: Vec<bool>,
    meet: Vec<Label>,
    join: Vec<Label>,
    bottom: Label,
    top: Label,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice").field("elements", &self.names).finish()
    }
}

const MAX_ELEMENTS: usize = u16::MAX as usize;

impl Lattice {
    /// Builds a lattice from its elements and a set of order pairs `(lower, upper)`.
    ///
    /// The order is the reflexive-transitive closure of `covers`. Fails if the
    /// closure is not antisymmetric or if some pair of elements lacks a meet or
    /// a join.
    pub fn from_poset<S: AsRef<str>>(elements: &[S], covers: &[(S, S)]) -> Result<Lattice, LatticeError> {
        if elements.is_empty() {
            return Err(LatticeError::Empty);
        }
        if elements.len() > MAX_ELEMENTS {
            return Err(LatticeError::TooLarge(elements.len(), MAX_ELEMENTS));
        }
        let mut names = Vec::with_capacity(elements.len());
        let mut index = BTreeMap::new();
        for (i, e) in elements.iter().enumerate() {
            let name = e.as_ref().to_string();
            if index.insert(name.clone(), Label(i as u16)).is_some() {
                return Err(LatticeError::DuplicateElement(name));
            }
            names.push(name);
        }
        let n = names.len();
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| LatticeError::UnknownElement(s.to_string()));
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (lo, hi) in covers {
            let (a, b) = (lookup(lo.as_ref())?, lookup(hi.as_ref())?);
            leq[a.index() * n + b.index()] = true;
        }
        // Warshall closure
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(LatticeError::NotAPartialOrder(vec![
                        names[i].clone(),
                        names[j].clone(),
                        names[i].clone(),
                    ]));
                }
            }
        }

        let le = |a: usize, b: usize| leq[a * n + b];
        let mut meet = vec![Label(0); n * n];
        let mut join = vec![Label(0); n * n];
        for i in 0..n {
            for j in i..n {
                let lower: Vec<usize> = (0..n).filter(|&z| le(z, i) && le(z, j)).collect();
                let glb = lower
                    .iter()
                    .copied()
                    .find(|&z| lower.iter().all(|&w| le(w, z)))
                    .ok_or_else(|| LatticeError::NotALattice(names[i].clone(), names[j].clone(), "meet"))?;
                let upper: Vec<usize> = (0..n).filter(|&z| le(i, z) && le(j, z)).collect();
                let lub = upper
                    .iter()
                    .copied()
                    .find(|&z| upper.iter().all(|&w| le(z, w)))
                    .ok_or_else(|| LatticeError::NotALattice(names[i].clone(), names[j].clone(), "join"))?;
                for (a, b) in [(i, j), (j, i)] {
                    meet[a * n + b] = Label(glb as u16);
                    join[a * n + b] = Label(lub as u16);
                }
            }
        }
        let bottom = (0..n).find(|&z| (0..n).all(|w| le(z, w))).expect("finite lattice has a bottom");
        let top = (0..n).find(|&z| (0..n).all(|w| le(w, z))).expect("finite lattice has a top");
        Ok(Lattice { names, index, leq, meet, join, bottom: Label(bottom as u16), top: Label(top as u16) })
    }

    /// The flat lattice over `base`: `bot` below every base element, `top`
    /// above, base elements pairwise incomparable.
    pub fn flat<S: AsRef<str>>(base: &[S]) -> Result<Lattice, LatticeError> {
        let mut elements = vec![BOTTOM_NAME.to_string()];
        let mut covers = Vec::new();
        for b in base {
            let b = b.as_ref();
            if is_reserved(b) {
                return Err(LatticeError::ReservedName(b.to_string()));
            }
            elements.push(b.to_string());
            covers.push((BOTTOM_NAME.to_string(), b.to_string()));
            covers.push((b.to_string(), TOP_NAME.to_string()));
        }
        elements.push(TOP_NAME.to_string());
        covers.push((BOTTOM_NAME.to_string(), TOP_NAME.to_string()));
        Lattice::from_poset(&elements, &covers)
    }

    /// The one-element lattice, used for unlabeled graphs.
    pub fn singleton() -> Lattice {
        Lattice::from_poset(&[BOTTOM_NAME], &[]).expect("singleton is a lattice")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn bottom(&self) -> Label {
        self.bottom
    }

    pub fn top(&self) -> Label {
        self.top
    }

    /// True when bottom and top coincide.
    pub fn is_trivial(&self) -> bool {
        self.bottom == self.top
    }

    /// True when every element other than bottom and top is an atom and a coatom.
    pub fn is_flat(&self) -> bool {
        self.labels().all(|x| {
            x == self.bottom
                || x == self.top
                || self
                    .labels()
                    .all(|y| x == y || y == self.bottom || y == self.top || !self.leq(x, y) && !self.leq(y, x))
        })
    }

    /// All elements in carrier order.
    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.names.len()).map(|i| Label(i as u16))
    }

    pub fn name(&self, x: Label) -> &str {
        &self.names[x.index()]
    }

    /// Looks an element up by name. `bot`/`⊥` and `top`/`⊤` always resolve to
    /// the bottom and top unless the carrier names another element that way.
    pub fn get(&self, name: &str) -> Result<Label, LatticeError> {
        if let Some(&l) = self.index.get(name) {
            return Ok(l);
        }
        match name {
            BOTTOM_NAME | "⊥" => Ok(self.bottom),
            TOP_NAME | "⊤" => Ok(self.top),
            _ => Err(LatticeError::UnknownElement(name.to_string())),
        }
    }

    /// Checks that `x` belongs to this lattice.
    pub fn check(&self, x: Label) -> Result<Label, LatticeError> {
        if x.index() < self.names.len() {
            Ok(x)
        } else {
            Err(LatticeError::UnknownElement(format!("#{}", x.index())))
        }
    }

    pub fn leq(&self, x: Label, y: Label) -> bool {
        self.leq[x.index() * self.names.len() + y.index()]
    }

    pub fn meet2(&self, x: Label, y: Label) -> Label {
        self.meet[x.index() * self.names.len() + y.index()]
    }

    pub fn join2(&self, x: Label, y: Label) -> Label {
        self.join[x.index() * self.names.len() + y.index()]
    }

    /// Greatest lower bound; the meet of nothing is top.
    pub fn meet<I: IntoIterator<Item = Label>>(&self, xs: I) -> Label {
        xs.into_iter().fold(self.top, |acc, x| self.meet2(acc, x))
    }

    /// Least upper bound; the join of nothing is bottom.
    pub fn join<I: IntoIterator<Item = Label>>(&self, xs: I) -> Label {
        xs.into_iter().fold(self.bottom, |acc, x| self.join2(acc, x))
    }

    /// Order pairs `(x, y)` with `y` covering `x`, i.e. the Hasse diagram.
    pub fn covers(&self) -> Vec<(Label, Label)> {
        let mut out = Vec::new();
        for x in self.labels() {
            for y in self.labels() {
                if x != y
                    && self.leq(x, y)
                    && !self.labels().any(|z| z != x && z != y && self.leq(x, z) && self.leq(z, y))
                {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

pub(crate) fn is_reserved(name: &str) -> bool {
    matches!(name, BOTTOM_NAME | TOP_NAME | "⊥" | "⊤")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorts() -> Lattice {
        let elements = ["⊥", "p1", "p2", "P", "d1", "d2", "D", "▷", "@", "⊤"];
        let covers = [
            ("⊥", "p1"),
            ("⊥", "p2"),
            ("p1", "P"),
            ("p2", "P"),
            ("⊥", "d1"),
            ("⊥", "d2"),
            ("d1", "D"),
            ("d2", "D"),
            ("⊥", "▷"),
            ("⊥", "@"),
            ("P", "⊤"),
            ("D", "⊤"),
            ("▷", "⊤"),
            ("@", "⊤"),
        ];
        Lattice::from_poset(&elements, &covers).unwrap()
    }

    fn check_laws(lat: &Lattice) {
        for x in lat.labels() {
            assert!(lat.leq(lat.bottom(), x));
            assert!(lat.leq(x, lat.top()));
            for y in lat.labels() {
                let m = lat.meet2(x, y);
                let j = lat.join2(x, y);
                assert!(lat.leq(m, x) && lat.leq(m, y));
                assert!(lat.leq(x, j) && lat.leq(y, j));
                for z in lat.labels() {
                    if lat.leq(z, x) && lat.leq(z, y) {
                        assert!(lat.leq(z, m));
                    }
                    if lat.leq(x, z) && lat.leq(y, z) {
                        assert!(lat.leq(j, z));
                    }
                }
                assert_eq!(lat.meet2(x, lat.join2(x, y)), x);
                assert_eq!(lat.join2(x, lat.meet2(x, y)), x);
            }
        }
    }

    #[test]
    fn two_element_chain() {
        let lat = Lattice::from_poset(&["⊥", "⊤"], &[("⊥", "⊤")]).unwrap();
        assert_eq!(lat.len(), 2);
        assert_ne!(lat.bottom(), lat.top());
        check_laws(&lat);
    }

    #[test]
    fn sorts_lattice_is_valid() {
        let lat = sorts();
        check_laws(&lat);
        assert!(lat.leq(lat.get("p1").unwrap(), lat.get("P").unwrap()));
        assert!(!lat.leq(lat.get("p1").unwrap(), lat.get("D").unwrap()));
        assert_eq!(lat.meet([lat.get("P").unwrap(), lat.get("D").unwrap()]), lat.bottom());
    }

    #[test]
    fn missing_join_is_reported() {
        let err = Lattice::from_poset(&["⊥", "a", "b"], &[("⊥", "a"), ("⊥", "b")]).unwrap_err();
        assert_eq!(err, LatticeError::NotALattice("a".into(), "b".into(), "join"));
    }

    #[test]
    fn cycle_is_rejected() {
        let err = Lattice::from_poset(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, LatticeError::NotAPartialOrder(_)));
    }

    #[test]
    fn unknown_cover_element() {
        let err = Lattice::from_poset(&["a"], &[("a", "z")]).unwrap_err();
        assert_eq!(err, LatticeError::UnknownElement("z".into()));
    }

    #[test]
    fn flat_lattices() {
        let lat = Lattice::flat(&["0", "1"]).unwrap();
        assert_eq!(lat.len(), 4);
        check_laws(&lat);
        let (zero, one) = (lat.get("0").unwrap(), lat.get("1").unwrap());
        assert!(!lat.leq(zero, one));
        assert_eq!(lat.meet2(zero, one), lat.bottom());
        assert_eq!(lat.join2(zero, one), lat.top());
        assert!(lat.is_flat());

        let empty = Lattice::flat::<&str>(&[]).unwrap();
        assert_eq!(empty.len(), 2);
        check_laws(&empty);

        assert_eq!(Lattice::flat(&["a", "top"]).unwrap_err(), LatticeError::ReservedName("top".into()));
    }

    #[test]
    fn meet_and_join_of_sets() {
        let lat = Lattice::flat(&["a", "b"]).unwrap();
        let (a, b) = (lat.get("a").unwrap(), lat.get("b").unwrap());
        assert_eq!(lat.meet([a, b]), lat.bottom());
        assert_eq!(lat.join([]), lat.bottom());
        assert_eq!(lat.meet([]), lat.top());
        assert_eq!(lat.meet([lat.top(), a]), a);
        assert!(lat.get("c").is_err());
    }

    #[test]
    fn singleton_collapses_bottom_and_top() {
        let lat = Lattice::singleton();
        assert!(lat.is_trivial());
        assert_eq!(lat.get("top").unwrap(), lat.get("bot").unwrap());
        check_laws(&lat);
    }

    #[test]
    fn covers_of_flat() {
        let lat = Lattice::flat(&["a"]).unwrap();
        assert_eq!(lat.covers().len(), 2);
        assert!(!sorts().is_flat());
    }
}
