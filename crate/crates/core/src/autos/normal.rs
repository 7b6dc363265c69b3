//! Normal form of an expression: a scalar per atom for the generic part
//! (Prüfer atoms and omega copies beyond every mentioned copy) and the images
//! of the remaining slot generators.

use std::collections::BTreeMap;

use num_traits::One;

use super::expr::AutoExpr;
use crate::arith::{self, Q};
use crate::error::{Error, Result};
use crate::group::{Atom, Element, GroupDescriptor, Slot};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub group: GroupDescriptor,
    pub diag: Vec<Q>,
    /// Omega copies 0..=max_copy are tracked through columns.
    pub max_copy: usize,
    /// Image of the generator (1) of every active slot.
    pub columns: BTreeMap<Slot, Element>,
}

/// Slots whose generator images are recorded in a normal form.
pub fn active_slots(g: &GroupDescriptor, max_copy: usize) -> Vec<Slot> {
    let mut out = Vec::new();
    for (i, a) in g.atoms.iter().enumerate() {
        match a {
            Atom::Pruefer { .. } => {}
            Atom::CyclicOmega { .. } | Atom::FreeZOmega => {
                out.extend((0..=max_copy).map(|c| Slot::new(i, c)))
            }
            _ => out.push(Slot::new(i, 0)),
        }
    }
    out
}

/// Unique x with q^j·x = a, when A has no q-torsion in the support of a.
pub fn divide_by_prime_power(g: &GroupDescriptor, a: &Element, q: u64, j: u32) -> Result<Element> {
    if j == 0 {
        return Ok(a.clone());
    }
    let r = Q::new(One::one(), arith::pow(q, j));
    let mut out = Element::zero();
    for (s, x) in a.coords() {
        let atom = g.atom(s.atom);
        let v = match *atom {
            Atom::Cyclic { p, .. } | Atom::CyclicOmega { p, .. } | Atom::Pruefer { p } if p != q => {
                g.mul_coord(*s, x, &r)?
            }
            Atom::LocalizedQ { p } if p == q => x * &r,
            _ => {
                return Err(Error::InvalidExpr(format!(
                    "image of a Q_({q}) generator is not uniquely {q}-divisible"
                )))
            }
        };
        out.set(*s, v);
    }
    Ok(out)
}

impl NormalForm {
    pub fn of(g: &GroupDescriptor, e: &AutoExpr) -> Result<NormalForm> {
        NormalForm::with_copies(g, e, e.max_copy())
    }

    pub fn with_copies(g: &GroupDescriptor, e: &AutoExpr, max_copy: usize) -> Result<NormalForm> {
        let diag = e.diag(g)?;
        let mut columns = BTreeMap::new();
        for s in active_slots(g, max_copy) {
            columns.insert(s, e.apply(g, &g.generator(s, 0))?);
        }
        Ok(NormalForm { group: g.clone(), diag, max_copy, columns })
    }

    pub fn is_generic(&self, s: Slot) -> bool {
        match self.group.atom(s.atom) {
            Atom::Pruefer { .. } => true,
            a if a.is_omega() => s.copy > self.max_copy,
            _ => false,
        }
    }

    /// Image of `a`, computed from the stored data only.
    pub fn apply(&self, a: &Element) -> Result<Element> {
        let g = &self.group;
        let mut out = Element::zero();
        for (s, x) in a.coords() {
            let term = if self.is_generic(*s) {
                let mut t = Element::zero();
                t.set(*s, g.mul_coord(*s, x, &self.diag[s.atom])?);
                t
            } else {
                let col = &self.columns[s];
                match *g.atom(s.atom) {
                    Atom::LocalizedQ { p } => {
                        let d = divide_by_prime_power(g, col, p, arith::denom_exp(x, p))?;
                        g.scale(&d, x.numer())
                    }
                    _ => g.scale(col, &x.to_integer()),
                }
            };
            out = g.add_unchecked(&out, &term);
        }
        Ok(out)
    }

    /// The scalar on the generic part of atom `i` agrees with `r`.
    pub fn diag_matches(&self, i: usize, r: &Q) -> bool {
        let d = &self.diag[i];
        match *self.group.atom(i) {
            Atom::CyclicOmega { .. } => {
                let m = self.group.atom(i).modulus().unwrap();
                match (arith::rat_mod(d, &m), arith::rat_mod(r, &m)) {
                    (Some(a), Some(b)) => a == b,
                    _ => false,
                }
            }
            Atom::Pruefer { .. } | Atom::FreeZOmega => d == r,
            _ => true,
        }
    }

    /// Exact equality of the two maps.
    pub fn same_map(&self, other: &NormalForm) -> bool {
        if self.group != other.group {
            return false;
        }
        (0..self.group.len()).all(|i| {
            self.diag_matches(i, &other.diag[i]) && other.diag_matches(i, &self.diag[i])
        }) && self.columns == other.columns
    }
}

/// Exact equality of two expressions on `g`.
pub fn equal(g: &GroupDescriptor, a: &AutoExpr, b: &AutoExpr) -> Result<bool> {
    let c = a.max_copy().max(b.max_copy());
    Ok(NormalForm::with_copies(g, a, c)?.same_map(&NormalForm::with_copies(g, b, c)?))
}

impl AutoExpr {
    pub fn normal_form(&self, g: &GroupDescriptor) -> Result<NormalForm> {
        NormalForm::of(g, self)
    }

    /// The identity map, decided exactly.
    pub fn is_identity(&self, g: &GroupDescriptor) -> Result<bool> {
        equal(g, self, &AutoExpr::Identity)
    }
}
