//! Finitary tests and multiplication certificates, read off the normal form.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::expr::AutoExpr;
use super::normal::NormalForm;
use crate::arith::{self, Q, Z};
use crate::error::Result;
use crate::group::{Atom, Element, GroupDescriptor, Slot};
use crate::subgroup::{span, Subgroup};

/// The image A(γ−m), when finite, or a slot along which it is infinite.
#[derive(Clone, Debug)]
pub enum Deviation {
    Finite(Vec<Element>),
    Infinite(Slot),
}

pub fn deviation(nf: &NormalForm, m: &Q) -> Deviation {
    let g = &nf.group;
    for (i, a) in g.atoms.iter().enumerate() {
        let generic = match a {
            Atom::Pruefer { .. } => Some(Slot::new(i, 0)),
            Atom::CyclicOmega { .. } | Atom::FreeZOmega => Some(Slot::new(i, nf.max_copy + 1)),
            _ => None,
        };
        if let Some(s) = generic {
            if !nf.diag_matches(i, m) {
                return Deviation::Infinite(s);
            }
        }
    }
    let mut gens = Vec::new();
    for (s, col) in &nf.columns {
        let Ok(mg) = g.mul_coord(*s, &Q::one(), m) else {
            return Deviation::Infinite(*s);
        };
        let mut me = Element::zero();
        me.set(*s, mg);
        let d = g.sub_elems(col, &me);
        if !g.is_torsion(&d) {
            return Deviation::Infinite(*s);
        }
        if !d.is_zero() {
            gens.push(d);
        }
    }
    Deviation::Finite(gens)
}

#[derive(Clone, Debug, Serialize)]
pub struct FinitaryVerdict {
    pub finitary: bool,
    /// Generators of the finite image A(γ−1).
    pub image: Vec<Element>,
    #[serde(serialize_with = "ser_opt_z")]
    pub image_order: Option<Z>,
    pub infinite_direction: Option<Slot>,
}

fn ser_opt_z<S: serde::Serializer>(x: &Option<Z>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(z) => s.serialize_str(&z.to_string()),
        None => s.serialize_none(),
    }
}

pub fn is_finitary(g: &GroupDescriptor, e: &AutoExpr) -> Result<FinitaryVerdict> {
    let nf = e.normal_form(g)?;
    Ok(match deviation(&nf, &Q::one()) {
        Deviation::Finite(gens) => {
            let h = span(g, &gens)?;
            let reduced = h.reduced_generators();
            FinitaryVerdict { finitary: true, image_order: h.order(), image: reduced, infinite_direction: None }
        }
        Deviation::Infinite(s) => FinitaryVerdict {
            finitary: false,
            image: Vec::new(),
            image_order: None,
            infinite_direction: Some(s),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Region {
    Whole,
    ModT,
    OnD,
    ModD,
    OnPrimary(u64),
    FiniteIndex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteIndexCert {
    /// γ = m on exponent·(tracked slots) + D + the untracked omega copies.
    #[serde(serialize_with = "arith::ser::z")]
    pub exponent: Z,
    #[serde(serialize_with = "arith::ser::z")]
    pub index: Z,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Multiplier {
    #[serde(serialize_with = "arith::ser::q")]
    pub value: Q,
    /// Set when the multiplier is only meaningful as a p-adic number.
    pub prime: Option<u64>,
    pub subgroup: Option<FiniteIndexCert>,
}

fn in_region(a: &Atom, r: &Region) -> bool {
    match r {
        Region::Whole | Region::FiniteIndex => true,
        Region::ModT => !a.is_torsion(),
        Region::OnD => matches!(a, Atom::Pruefer { .. }),
        Region::ModD => !matches!(a, Atom::Pruefer { .. }),
        Region::OnPrimary(p) => a.torsion_prime() == Some(*p),
    }
}

fn candidates(nf: &NormalForm, atoms: &BTreeSet<usize>) -> Vec<Q> {
    let mut out: Vec<Q> = Vec::new();
    let mut push = |x: Q| {
        if !out.contains(&x) {
            out.push(x);
        }
    };
    for &i in atoms {
        push(nf.diag[i].clone());
    }
    for (s, col) in &nf.columns {
        if atoms.contains(&s.atom) {
            let x = col.get(*s);
            if !x.is_zero() {
                push(x);
            }
        }
    }
    out
}

fn acts_as(nf: &NormalForm, region: &Region, atoms: &BTreeSet<usize>, m: &Q) -> bool {
    let g = &nf.group;
    if !atoms.iter().all(|&i| nf.diag_matches(i, m)) {
        return false;
    }
    for (s, col) in &nf.columns {
        if !atoms.contains(&s.atom) {
            continue;
        }
        let Ok(v) = g.mul_coord(*s, &Q::one(), m) else { return false };
        let mut want = Element::zero();
        want.set(*s, v);
        let got = match region {
            Region::ModT => g.free_part(col),
            Region::ModD => g.project(col, atoms),
            _ => col.clone(),
        };
        if got != want {
            return false;
        }
    }
    true
}

fn region_prime(g: &GroupDescriptor, atoms: &BTreeSet<usize>) -> Option<u64> {
    let ps: BTreeSet<Option<u64>> = atoms.iter().map(|&i| g.atom(i).torsion_prime()).collect();
    match ps.into_iter().collect::<Vec<_>>().as_slice() {
        [Some(p)] => Some(*p),
        _ => None,
    }
}

pub fn multiplication_certificate(
    g: &GroupDescriptor,
    e: &AutoExpr,
    region: &Region,
) -> Result<Option<Multiplier>> {
    let nf = e.normal_form(g)?;
    let atoms: BTreeSet<usize> = (0..g.len()).filter(|&i| in_region(g.atom(i), region)).collect();
    if *region == Region::FiniteIndex {
        return Ok(finite_index_certificate(&nf));
    }
    if atoms.is_empty() {
        return Ok(Some(Multiplier { value: Q::one(), prime: None, subgroup: None }));
    }
    let prime = region_prime(g, &atoms);
    Ok(candidates(&nf, &atoms)
        .into_iter()
        .find(|m| acts_as(&nf, region, &atoms, m))
        .map(|value| Multiplier { value, prime, subgroup: None }))
}

fn finite_index_certificate(nf: &NormalForm) -> Option<Multiplier> {
    let g = &nf.group;
    let all: BTreeSet<usize> = (0..g.len()).collect();
    for m in candidates(nf, &all) {
        let Deviation::Finite(gens) = deviation(nf, &m) else { continue };
        return Some(Multiplier { value: m, prime: None, subgroup: Some(finite_index(nf, &gens)) });
    }
    None
}

/// The subgroup o·(tracked slots) + D + untracked copies, o the exponent of the deviation.
pub(crate) fn finite_index(nf: &NormalForm, gens: &[Element]) -> FiniteIndexCert {
    let g = &nf.group;
    let o = gens
        .iter()
        .map(|d| g.order(d).expect("deviation is torsion"))
        .fold(Z::one(), |a, b| a.lcm(&b));
    let mut index = Z::one();
    for s in nf.columns.keys() {
        let a = g.atom(s.atom);
        index *= match *a {
            Atom::Cyclic { .. } | Atom::CyclicOmega { .. } => o.gcd(&a.modulus().unwrap()),
            Atom::LocalizedQ { p } => {
                let v = arith::val(&o, p).unwrap_or(0);
                &o / arith::pow(p, v)
            }
            _ => o.clone(),
        };
    }
    FiniteIndexCert { exponent: o, index }
}

impl AutoExpr {
    pub fn is_finitary(&self, g: &GroupDescriptor) -> Result<FinitaryVerdict> {
        is_finitary(g, self)
    }
}

/// The finite subgroup A(γ−m), if finite.
pub fn deviation_subgroup(g: &GroupDescriptor, e: &AutoExpr, m: &Q) -> Result<Option<Subgroup>> {
    let nf = e.normal_form(g)?;
    match deviation(&nf, m) {
        Deviation::Finite(gens) => Ok(Some(span(g, &gens)?)),
        Deviation::Infinite(_) => Ok(None),
    }
}
