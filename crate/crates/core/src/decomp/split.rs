//! Splitting a bounded group B = B1 ⊕ B2 with B2 finite around a subgroup of finite index.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::Z;
use crate::autos::normal::active_slots;
use crate::error::{Error, Result};
use crate::group::{Atom, Element, GroupDescriptor, Slot};
use crate::lattice::{hnf, snf, Mat};
use crate::subgroup::{span_in, Index, Subgroup, Window};

/// inner ⊕ (every omega copy beyond `max_copy`), inner inside the finite window.
#[derive(Clone, Debug, Serialize)]
pub struct CofiniteSubgroup {
    pub max_copy: usize,
    #[serde(serialize_with = "ser_gens")]
    pub inner: Subgroup,
}

fn ser_gens<S: serde::Serializer>(h: &Subgroup, s: S) -> std::result::Result<S::Ok, S::Error> {
    h.reduced_generators().serialize(s)
}

pub fn finite_window(g: &GroupDescriptor, max_copy: usize) -> (Vec<Slot>, Window) {
    let slots = active_slots(g, max_copy);
    let mut w = Window::empty();
    for &s in &slots {
        w.add_slot(g, s);
    }
    (slots, w)
}

impl CofiniteSubgroup {
    pub fn new(g: &GroupDescriptor, max_copy: usize, gens: &[Element]) -> Result<Self> {
        let (_, w) = finite_window(g, max_copy);
        for x in gens {
            if x.max_copy() > max_copy {
                return Err(Error::NotInGroup(format!("{x} lies outside the window")));
            }
        }
        Ok(CofiniteSubgroup { max_copy, inner: span_in(g, gens, &w)? })
    }

    /// The window part of the whole group.
    pub fn whole(g: &GroupDescriptor, max_copy: usize) -> Result<Self> {
        let (slots, _) = finite_window(g, max_copy);
        let gens: Vec<Element> = slots.iter().map(|&s| g.generator(s, 0)).collect();
        Self::new(g, max_copy, &gens)
    }

    pub fn index(&self, g: &GroupDescriptor) -> Result<Index> {
        self.inner.index_in(&Self::whole(g, self.max_copy)?.inner)
    }

    pub fn contains(&self, x: &Element) -> bool {
        let mut within = Element::zero();
        for (s, v) in x.coords().filter(|(s, _)| s.copy <= self.max_copy) {
            within.set(*s, v.clone());
        }
        self.inner.contains(&within)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Split {
    pub b1: CofiniteSubgroup,
    #[serde(serialize_with = "ser_gens")]
    pub b2: Subgroup,
    #[serde(serialize_with = "crate::arith::ser::z")]
    pub b2_order: Z,
    /// B1 ∩ B2 = 0 and B1 + B2 = B, checked exactly.
    pub direct: bool,
}

fn bounded(g: &GroupDescriptor) -> Result<()> {
    if g.atoms.iter().all(|a| matches!(a, Atom::Cyclic { .. } | Atom::CyclicOmega { .. })) {
        Ok(())
    } else {
        Err(Error::Hypothesis("B must be bounded".into()))
    }
}

fn order_of(g: &GroupDescriptor, x: &Element) -> Z {
    g.order(x).expect("bounded group")
}

fn verify(g: &GroupDescriptor, b1: &CofiniteSubgroup, b2: &Subgroup) -> Result<bool> {
    let whole = CofiniteSubgroup::whole(g, b1.max_copy)?;
    let meet = b1.inner.intersection(b2)?;
    let sum = b1.inner.sum(b2)?;
    Ok(meet.is_zero() && sum.same_span(&whole.inner))
}

/// B = B1 ⊕ B2 with B2 finite and B1 ⊇ B0.
///
/// Reads a basis f_j of the window lattice adapted to B0 + relations from the Smith
/// form; the f_j whose order equals their order modulo B0 span B2.
pub fn split_bounded(g: &GroupDescriptor, b0: &CofiniteSubgroup) -> Result<Split> {
    bounded(g)?;
    let (slots, w) = finite_window(g, b0.max_copy);
    let n = slots.len();
    let mut rows: Mat = b0
        .inner
        .generators()
        .iter()
        .map(|x| w.vector(g, x).expect("inside the window"))
        .collect();
    for (i, m) in w.relations(g).into_iter().enumerate() {
        let mut r = vec![Z::zero(); n];
        r[i] = m.expect("bounded");
        rows.push(r);
    }
    let s = snf(&rows, n);
    let vinv = hnf(&s.v, n).transform;
    let mut keep = b0.inner.generators().to_vec();
    let mut comp = Vec::new();
    for (j, row) in vinv.iter().enumerate() {
        let f = w.element(g, row);
        let d = s.diag.get(j).cloned().unwrap_or_else(Z::zero);
        if d > Z::one() && order_of(g, &f) == d {
            comp.push(f);
        } else {
            keep.push(f);
        }
    }
    let b1 = CofiniteSubgroup::new(g, b0.max_copy, &keep)?;
    let b2 = span_in(g, &comp, &w)?;
    let direct = verify(g, &b1, &b2)?;
    let b2_order = b2.order().unwrap_or_else(Z::zero);
    Ok(Split { b1, b2, b2_order, direct })
}

/// The splitting used for the critical case: B1 ≤ B0, here the copies beyond the window.
pub fn split_bounded_within(g: &GroupDescriptor, b0: &CofiniteSubgroup) -> Result<Split> {
    bounded(g)?;
    let b1 = CofiniteSubgroup::new(g, b0.max_copy, &[])?;
    let b2 = CofiniteSubgroup::whole(g, b0.max_copy)?.inner;
    let direct = verify(g, &b1, &b2)?;
    let b2_order = b2.order().unwrap_or_else(Z::zero);
    Ok(Split { b1, b2, b2_order, direct })
}
