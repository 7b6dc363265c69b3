//! Finitely generated subgroups, computed inside a finite window.
//!
//! A window fixes finitely many slots and, for Prüfer and Q_(p) slots, a
//! truncation depth d. The window group W is Z^n modulo the relations p^k on
//! cyclic slots and p^d on Prüfer slots. A subgroup H of W is stored as the
//! Hermite basis of its preimage lattice L_H in Z^n, which is canonical.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{self, Q, Z};
use crate::error::{Error, Result};
use crate::group::{Atom, Element, GroupDescriptor, Slot};
use crate::lattice::{self, Hnf, Mat};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Window {
    /// Tracked slots with their depth (0 for slots without denominators).
    depth: BTreeMap<Slot, u32>,
}

impl Window {
    pub fn empty() -> Self {
        Window::default()
    }

    pub fn for_elements<'a>(g: &GroupDescriptor, elems: impl IntoIterator<Item = &'a Element>) -> Self {
        let mut w = Window::empty();
        for e in elems {
            for (s, x) in e.coords() {
                w.include(g, *s, x);
            }
        }
        w
    }

    fn include(&mut self, g: &GroupDescriptor, s: Slot, x: &Q) {
        let d = match g.atom(s.atom) {
            Atom::Pruefer { p } | Atom::LocalizedQ { p } => arith::denom_exp(x, *p) + 1,
            _ => 0,
        };
        let cur = self.depth.entry(s).or_insert(0);
        *cur = (*cur).max(d);
    }

    pub fn add_slot(&mut self, g: &GroupDescriptor, s: Slot) {
        self.include(g, s, &Q::zero());
    }

    pub fn merge(&self, other: &Window) -> Window {
        let mut out = self.clone();
        for (s, d) in &other.depth {
            let cur = out.depth.entry(*s).or_insert(0);
            *cur = (*cur).max(*d);
        }
        out
    }

    /// Every depth raised by `k`; for stability checks.
    pub fn deepen(&self, k: u32) -> Window {
        Window {
            depth: self
                .depth
                .iter()
                .map(|(s, d)| (*s, if *d > 0 { d + k } else { 0 }))
                .collect(),
        }
    }

    pub fn slots(&self) -> impl Iterator<Item = Slot> + '_ {
        self.depth.keys().copied()
    }

    pub fn dim(&self) -> usize {
        self.depth.len()
    }

    fn depth_of(&self, g: &GroupDescriptor, s: Slot) -> u32 {
        let d = self.depth[&s];
        match g.atom(s.atom) {
            Atom::Pruefer { .. } | Atom::LocalizedQ { .. } => d.max(1),
            _ => d,
        }
    }

    /// Relation modulus per coordinate (`None` when the coordinate is free).
    pub fn relations(&self, g: &GroupDescriptor) -> Vec<Option<Z>> {
        self.slots()
            .map(|s| match *g.atom(s.atom) {
                Atom::Cyclic { .. } | Atom::CyclicOmega { .. } => g.atom(s.atom).modulus(),
                Atom::Pruefer { p } => Some(arith::pow(p, self.depth_of(g, s))),
                _ => None,
            })
            .collect()
    }

    fn scale(&self, g: &GroupDescriptor, s: Slot) -> Z {
        match *g.atom(s.atom) {
            Atom::Pruefer { p } | Atom::LocalizedQ { p } => arith::pow(p, self.depth_of(g, s)),
            _ => Z::one(),
        }
    }

    /// Integer coordinates of `e`, or `None` if it does not lie in the window.
    pub fn vector(&self, g: &GroupDescriptor, e: &Element) -> Option<Vec<Z>> {
        let mut v = vec![Z::zero(); self.dim()];
        let index: BTreeMap<Slot, usize> = self.slots().enumerate().map(|(i, s)| (s, i)).collect();
        for (s, x) in e.coords() {
            let i = *index.get(s)?;
            let y = x * Q::from_integer(self.scale(g, *s));
            if !y.is_integer() {
                return None;
            }
            v[i] = y.to_integer();
        }
        Some(v)
    }

    pub fn element(&self, g: &GroupDescriptor, v: &[Z]) -> Element {
        let coords = self
            .slots()
            .zip(v.iter())
            .map(|(s, x)| (s, Q::new(x.clone(), self.scale(g, s))));
        g.element(coords).expect("window vectors are group elements")
    }
}

/// Index of a subgroup in a larger one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Index {
    Finite(Z),
    Infinite,
}

impl Index {
    pub fn is_finite(&self) -> bool {
        matches!(self, Index::Finite(_))
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Infinite => write!(f, "INFINITE"),
        }
    }
}

impl Serialize for Index {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Index::Finite(n) => s.serialize_str(&n.to_string()),
            Index::Infinite => s.serialize_str("INFINITE"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Subgroup {
    ambient: GroupDescriptor,
    gens: Vec<Element>,
    window: Window,
    hnf: Hnf,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient
            && self.window == other.window
            && self.hnf.basis == other.hnf.basis
    }
}

impl Serialize for Subgroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct G<'a> {
            generators: &'a [Element],
        }
        G { generators: &self.gens }.serialize(s)
    }
}

fn relation_rows(rel: &[Option<Z>]) -> Mat {
    let n = rel.len();
    rel.iter()
        .enumerate()
        .filter_map(|(i, r)| {
            r.as_ref().map(|m| {
                let mut row = vec![Z::zero(); n];
                row[i] = m.clone();
                row
            })
        })
        .collect()
}

pub fn span(g: &GroupDescriptor, gens: &[Element]) -> Result<Subgroup> {
    for x in gens {
        if !g.contains(x) {
            return Err(Error::NotInGroup(x.to_string()));
        }
    }
    let w = Window::for_elements(g, gens);
    Ok(Subgroup::build(g, gens.to_vec(), w))
}

/// Span computed in a prescribed window (which must contain the generators).
pub fn span_in(g: &GroupDescriptor, gens: &[Element], w: &Window) -> Result<Subgroup> {
    for x in gens {
        if !g.contains(x) {
            return Err(Error::NotInGroup(x.to_string()));
        }
    }
    let w = w.merge(&Window::for_elements(g, gens));
    Ok(Subgroup::build(g, gens.to_vec(), w))
}

impl Subgroup {
    fn build(g: &GroupDescriptor, gens: Vec<Element>, window: Window) -> Subgroup {
        let n = window.dim();
        let mut rows: Mat = gens
            .iter()
            .map(|x| window.vector(g, x).expect("generator inside its window"))
            .collect();
        rows.extend(relation_rows(&window.relations(g)));
        let hnf = lattice::hnf(&rows, n);
        Subgroup { ambient: g.clone(), gens, window, hnf }
    }

    pub fn ambient(&self) -> &GroupDescriptor {
        &self.ambient
    }

    pub fn generators(&self) -> &[Element] {
        &self.gens
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Hermite basis of the preimage lattice: the canonical normal form.
    pub fn normal_form(&self) -> &Mat {
        &self.hnf.basis
    }

    /// Reduced generators: images of the Hermite basis, zeros dropped.
    pub fn reduced_generators(&self) -> Vec<Element> {
        self.hnf
            .basis
            .iter()
            .map(|r| self.window.element(&self.ambient, r))
            .filter(|e| !e.is_zero())
            .collect()
    }

    pub fn in_window(&self, w: &Window) -> Subgroup {
        Subgroup::build(&self.ambient, self.gens.clone(), self.window.merge(w))
    }

    pub fn contains(&self, x: &Element) -> bool {
        // A vector outside the window has a coordinate or denominator that no
        // generator reaches, so it is not in H.
        match self.window.vector(&self.ambient, x) {
            Some(v) => lattice::solve_in(&self.hnf, &v).is_some(),
            None => false,
        }
    }

    /// Coefficients of `x` in the Hermite basis, if `x` lies in the subgroup.
    pub fn express(&self, x: &Element) -> Option<Vec<Z>> {
        let v = self.window.vector(&self.ambient, x)?;
        lattice::solve_in(&self.hnf, &v)
    }

    /// Coefficients of `x` over the given generators (relations dropped).
    pub fn express_in_generators(&self, x: &Element) -> Option<Vec<Z>> {
        let c = self.express(x)?;
        let t = &self.hnf.transform;
        Some(
            (0..self.gens.len())
                .map(|j| c.iter().enumerate().fold(Z::zero(), |acc, (i, ci)| acc + ci * &t[i][j]))
                .collect(),
        )
    }

    fn pair(&self, other: &Subgroup) -> Result<(Subgroup, Subgroup, Window)> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch);
        }
        let w = self.window.merge(&other.window);
        Ok((self.in_window(&w), other.in_window(&w), w))
    }

    pub fn sum(&self, other: &Subgroup) -> Result<Subgroup> {
        let (a, b, w) = self.pair(other)?;
        let mut gens = a.gens.clone();
        gens.extend(b.gens.iter().cloned());
        Ok(Subgroup::build(&self.ambient, gens, w))
    }

    pub fn intersection(&self, other: &Subgroup) -> Result<Subgroup> {
        let (a, b, w) = self.pair(other)?;
        let n = w.dim();
        // L_a ∩ L_b from the left kernel of [B_a; B_b].
        let mut stacked = a.hnf.basis.clone();
        stacked.extend(b.hnf.basis.iter().cloned());
        let k = lattice::hnf(&stacked, n);
        let ra = a.hnf.basis.len();
        let rows: Mat = k
            .kernel
            .iter()
            .map(|c| {
                (0..n)
                    .map(|j| (0..ra).fold(Z::zero(), |s, i| s + &c[i] * &a.hnf.basis[i][j]))
                    .collect()
            })
            .collect();
        let gens: Vec<Element> = rows
            .iter()
            .map(|r| w.element(&self.ambient, r))
            .filter(|e| !e.is_zero())
            .collect();
        Ok(Subgroup::build(&self.ambient, gens, w))
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.ambient == other.ambient && self.gens.iter().all(|x| other.contains(x))
    }

    /// |K/H| for H = self ≤ K.
    pub fn index_in(&self, k: &Subgroup) -> Result<Index> {
        if self.ambient != k.ambient {
            return Err(Error::AmbientMismatch);
        }
        if !self.is_subgroup_of(k) {
            return Err(Error::NotContained);
        }
        let (h, k, _) = self.pair(k)?;
        let r = k.hnf.basis.len();
        let coeffs: Mat = h
            .hnf
            .basis
            .iter()
            .map(|v| lattice::solve_in(&k.hnf, v).expect("H ≤ K"))
            .collect();
        let c = lattice::hnf(&coeffs, r);
        if c.basis.len() < r {
            return Ok(Index::Infinite);
        }
        Ok(Index::Finite((0..r).fold(Z::one(), |acc, i| acc * &c.basis[i][i])))
    }

    pub fn commensurable(&self, other: &Subgroup) -> Result<bool> {
        let i = self.intersection(other)?;
        Ok(i.index_in(self)?.is_finite() && i.index_in(other)?.is_finite())
    }

    /// Torsion-free rank and invariant factors of the abstract group H.
    pub fn invariants(&self) -> Invariants {
        let rel = relation_rows(&self.window.relations(&self.ambient));
        let r = self.hnf.basis.len();
        let coeffs: Mat = rel
            .iter()
            .map(|v| lattice::solve_in(&self.hnf, v).expect("relations lie in L_H"))
            .collect();
        let s = lattice::snf(&coeffs, r);
        let torsion: Vec<Z> = s.diag.iter().filter(|d| !d.is_one()).cloned().collect();
        Invariants { rank: r - s.diag.len(), torsion }
    }

    pub fn order(&self) -> Option<Z> {
        let inv = self.invariants();
        (inv.rank == 0).then(|| inv.torsion.iter().fold(Z::one(), |a, b| a * b))
    }

    pub fn is_zero(&self) -> bool {
        self.reduced_generators().is_empty()
    }

    /// True when both have the same span.
    pub fn same_span(&self, other: &Subgroup) -> bool {
        self.is_subgroup_of(other) && other.is_subgroup_of(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Invariants {
    pub rank: usize,
    #[serde(serialize_with = "arith::ser::zs")]
    pub torsion: Vec<Z>,
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gs: Vec<String> = self.reduced_generators().iter().map(|e| e.to_string()).collect();
        write!(f, "<{}>", gs.join(", "))
    }
}
