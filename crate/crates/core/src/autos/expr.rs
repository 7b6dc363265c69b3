use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::hom::{HomData, Source};
use crate::arith::{self, Q};
use crate::error::{Error, Result};
use crate::group::{Element, GroupDescriptor, Slot};
use crate::subgroup::{span_in, Window};

/// An automorphism expression. Maps act on the right: `Composite([f, g])`
/// applies f first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AutoExpr {
    Identity,
    Negation,
    /// Multiplication by m/n on every coordinate.
    RatMult { m: i64, n: i64 },
    /// The power automorphism m/n on the p-torsion atoms, identity elsewhere.
    PAdicRat { p: u64, m: i64, n: i64 },
    /// Each block's expression acts on the subgroup formed by its atoms
    /// (indexed locally in the listed order); other atoms are fixed.
    BlockSum { blocks: Vec<Block> },
    OnePlusHom(HomData),
    Composite(Vec<AutoExpr>),
    Inverse(Box<AutoExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub atoms: Vec<usize>,
    pub expr: AutoExpr,
}

pub fn block(atoms: &[usize], expr: AutoExpr) -> Block {
    Block { atoms: atoms.to_vec(), expr }
}

/// Moves a global element onto the local indices of `atoms`.
pub fn to_local(a: &Element, atoms: &[usize]) -> Element {
    let mut out = Element::zero();
    for (s, x) in a.coords() {
        if let Some(j) = atoms.iter().position(|&i| i == s.atom) {
            out.set(Slot::new(j, s.copy), x.clone());
        }
    }
    out
}

pub fn to_global(a: &Element, atoms: &[usize]) -> Element {
    let mut out = Element::zero();
    for (s, x) in a.coords() {
        out.set(Slot::new(atoms[s.atom], s.copy), x.clone());
    }
    out
}

impl AutoExpr {
    pub fn rat(m: i64, n: i64) -> AutoExpr {
        AutoExpr::RatMult { m, n }
    }

    pub fn padic(p: u64, m: i64, n: i64) -> AutoExpr {
        AutoExpr::PAdicRat { p, m, n }
    }

    pub fn blocks(blocks: Vec<Block>) -> AutoExpr {
        AutoExpr::BlockSum { blocks }
    }

    pub fn then(self, next: AutoExpr) -> AutoExpr {
        match self {
            AutoExpr::Composite(mut v) => {
                v.push(next);
                AutoExpr::Composite(v)
            }
            e => AutoExpr::Composite(vec![e, next]),
        }
    }

    pub fn inv(self) -> AutoExpr {
        AutoExpr::Inverse(Box::new(self))
    }

    pub fn power(&self, k: i64) -> AutoExpr {
        let base = if k < 0 { self.clone().inv() } else { self.clone() };
        match k.unsigned_abs() {
            0 => AutoExpr::Identity,
            1 => base,
            n => AutoExpr::Composite(vec![base; n as usize]),
        }
    }

    pub fn parse(g: &GroupDescriptor, text: &str) -> Result<AutoExpr> {
        let e: AutoExpr = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        e.normalized(g)
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("expression serialises");
        serde_json::to_string(&v).expect("value serialises")
    }

    /// Reduces every stored element to its canonical representative.
    pub fn normalized(&self, g: &GroupDescriptor) -> Result<AutoExpr> {
        Ok(match self {
            AutoExpr::OnePlusHom(h) => AutoExpr::OnePlusHom(h.normalized(g)?),
            AutoExpr::BlockSum { blocks } => {
                let mut out = Vec::new();
                for b in blocks {
                    check_block_atoms(g, &b.atoms)?;
                    out.push(block(&b.atoms, b.expr.normalized(&g.sub(&b.atoms))?));
                }
                AutoExpr::BlockSum { blocks: out }
            }
            AutoExpr::Composite(v) => {
                AutoExpr::Composite(v.iter().map(|e| e.normalized(g)).collect::<Result<_>>()?)
            }
            AutoExpr::Inverse(e) => AutoExpr::Inverse(Box::new(e.normalized(g)?)),
            e => e.clone(),
        })
    }

    /// Largest omega copy index mentioned anywhere.
    pub fn max_copy(&self) -> usize {
        match self {
            AutoExpr::OnePlusHom(h) => h.max_copy(),
            AutoExpr::BlockSum { blocks } => blocks.iter().map(|b| b.expr.max_copy()).max().unwrap_or(0),
            AutoExpr::Composite(v) => v.iter().map(|e| e.max_copy()).max().unwrap_or(0),
            AutoExpr::Inverse(e) => e.max_copy(),
            _ => 0,
        }
    }

    /// Exact image of `a`.
    pub fn apply(&self, g: &GroupDescriptor, a: &Element) -> Result<Element> {
        match self {
            AutoExpr::Identity => Ok(a.clone()),
            AutoExpr::Negation => Ok(g.neg(a)),
            AutoExpr::RatMult { m, n } => {
                if *n == 0 {
                    return Err(Error::InvalidExpr("zero denominator".into()));
                }
                g.mul_elem(a, &arith::q(*m, *n))
            }
            AutoExpr::PAdicRat { p, m, n } => {
                if *n == 0 {
                    return Err(Error::InvalidExpr("zero denominator".into()));
                }
                let r = arith::q(*m, *n);
                let mut out = Element::zero();
                for (s, x) in a.coords() {
                    let v = if g.atom(s.atom).torsion_prime() == Some(*p) {
                        g.mul_coord(*s, x, &r)?
                    } else {
                        x.clone()
                    };
                    out.set(*s, v);
                }
                Ok(out)
            }
            AutoExpr::BlockSum { blocks } => {
                let mut out = a.clone();
                for b in blocks {
                    check_block_atoms(g, &b.atoms)?;
                    let sub = g.sub(&b.atoms);
                    let local = to_local(a, &b.atoms);
                    let img = to_global(&b.expr.apply(&sub, &local)?, &b.atoms);
                    for i in &b.atoms {
                        let slots: Vec<Slot> = out.support().filter(|s| s.atom == *i).collect();
                        for s in slots {
                            out.set(s, Q::zero());
                        }
                    }
                    for (s, x) in img.coords() {
                        out.set(*s, x.clone());
                    }
                }
                Ok(out)
            }
            AutoExpr::OnePlusHom(h) => Ok(g.add_unchecked(a, &h.eval(g, a)?)),
            AutoExpr::Composite(v) => {
                let mut x = a.clone();
                for e in v {
                    x = e.apply(g, &x)?;
                }
                Ok(x)
            }
            AutoExpr::Inverse(e) => e.inverse(g)?.apply(g, a),
        }
    }

    /// An expression for the inverse map, free of `Inverse` at the top.
    pub fn inverse(&self, g: &GroupDescriptor) -> Result<AutoExpr> {
        Ok(match self {
            AutoExpr::Identity => AutoExpr::Identity,
            AutoExpr::Negation => AutoExpr::Negation,
            AutoExpr::RatMult { m, n } => AutoExpr::RatMult { m: *n, n: *m },
            AutoExpr::PAdicRat { p, m, n } => AutoExpr::PAdicRat { p: *p, m: *n, n: *m },
            AutoExpr::BlockSum { blocks } => AutoExpr::BlockSum {
                blocks: blocks
                    .iter()
                    .map(|b| Ok(block(&b.atoms, b.expr.inverse(&g.sub(&b.atoms))?)))
                    .collect::<Result<_>>()?,
            },
            AutoExpr::OnePlusHom(h) => AutoExpr::OnePlusHom(inverse_hom(g, h)?),
            AutoExpr::Composite(v) => AutoExpr::Composite(
                v.iter().rev().map(|e| e.inverse(g)).collect::<Result<_>>()?,
            ),
            AutoExpr::Inverse(e) => (**e).clone(),
        })
    }

    /// The scalar by which the map acts on each atom's generic part: Prüfer
    /// atoms and the omega copies not mentioned by any homomorphism.
    pub fn diag(&self, g: &GroupDescriptor) -> Result<Vec<Q>> {
        let n = g.len();
        Ok(match self {
            AutoExpr::Identity | AutoExpr::OnePlusHom(_) => vec![Q::one(); n],
            AutoExpr::Negation => vec![-Q::one(); n],
            AutoExpr::RatMult { m, n: d } => {
                if *d == 0 || *m == 0 {
                    return Err(Error::InvalidExpr("zero in a multiplier".into()));
                }
                vec![arith::q(*m, *d); n]
            }
            AutoExpr::PAdicRat { p, m, n: d } => {
                if *d == 0 || *m == 0 {
                    return Err(Error::InvalidExpr("zero in a multiplier".into()));
                }
                g.atoms
                    .iter()
                    .map(|a| if a.torsion_prime() == Some(*p) { arith::q(*m, *d) } else { Q::one() })
                    .collect()
            }
            AutoExpr::BlockSum { blocks } => {
                let mut out = vec![Q::one(); n];
                for b in blocks {
                    check_block_atoms(g, &b.atoms)?;
                    let d = b.expr.diag(&g.sub(&b.atoms))?;
                    for (j, &i) in b.atoms.iter().enumerate() {
                        out[i] = d[j].clone();
                    }
                }
                out
            }
            AutoExpr::Composite(v) => {
                let mut out = vec![Q::one(); n];
                for e in v {
                    for (o, d) in out.iter_mut().zip(e.diag(g)?) {
                        *o *= d;
                    }
                }
                out
            }
            AutoExpr::Inverse(e) => e.diag(g)?.into_iter().map(|d| d.recip()).collect(),
        })
    }
}

pub(crate) fn check_block_atoms(g: &GroupDescriptor, atoms: &[usize]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &i in atoms {
        if i >= g.len() {
            return Err(Error::InvalidExpr(format!("block mentions missing atom {i}")));
        }
        if !seen.insert(i) {
            return Err(Error::InvalidExpr(format!("atom {i} repeated in a block")));
        }
    }
    Ok(())
}

/// Inverse of 1+φ, as 1+ψ.
pub fn inverse_hom(g: &GroupDescriptor, h: &HomData) -> Result<HomData> {
    if h.squares_to_zero(g)? {
        return Ok(h.negated(g));
    }
    let sources: Vec<Slot> = h.sources().collect();
    for s in &sources {
        if !matches!(
            g.atom(s.atom),
            crate::group::Atom::Cyclic { .. }
                | crate::group::Atom::CyclicOmega { .. }
                | crate::group::Atom::FreeZ
                | crate::group::Atom::FreeZOmega
        ) {
            return Err(Error::InvalidExpr(
                "non-nilpotent map with a Q_(p) source is not supported".into(),
            ));
        }
    }
    let (images, rest) = source_block(g, h, &sources)?;
    let mut w = Window::empty();
    for s in &sources {
        w.add_slot(g, *s);
    }
    let b = span_in(g, &images, &w)?;
    let mut out = Vec::new();
    for s in &sources {
        let e = g.generator(*s, 0);
        let c = b.express_in_generators(&e).ok_or_else(|| {
            Error::InvalidExpr("1+φ is not bijective on its source slots".into())
        })?;
        // y = Σ c_t e_t solves β(y) = e_s
        let mut y = Element::zero();
        let mut r = Element::zero();
        for (t, ct) in sources.iter().zip(c.iter()) {
            y = g.add_unchecked(&y, &g.scale(&g.generator(*t, 0), ct));
            r = g.add_unchecked(&r, &g.scale(&rest[sources.iter().position(|x| x == t).unwrap()], ct));
        }
        // ψ(e_s) = y − e_s − φ_rest(y)
        let psi = g.sub_elems(&g.sub_elems(&y, &e), &r);
        out.push((*s, psi));
    }
    Ok(HomData::new(Source::Unrestricted, out))
}

/// β(e_s) = projection of (1+φ)(e_s) onto the source slots, and the rest.
fn source_block(
    g: &GroupDescriptor,
    h: &HomData,
    sources: &[Slot],
) -> Result<(Vec<Element>, Vec<Element>)> {
    let set: BTreeSet<Slot> = sources.iter().copied().collect();
    let mut images = Vec::new();
    let mut rest = Vec::new();
    for s in sources {
        let full = g.add_unchecked(&g.generator(*s, 0), h.image_of(*s).unwrap());
        let mut inside = Element::zero();
        let mut outside = Element::zero();
        for (t, x) in full.coords() {
            if set.contains(t) {
                inside.set(*t, x.clone());
            } else {
                outside.set(*t, x.clone());
            }
        }
        images.push(inside);
        rest.push(outside);
    }
    Ok((images, rest))
}

/// Whether 1+φ is bijective.
pub fn hom_is_bijective(g: &GroupDescriptor, h: &HomData) -> Result<bool> {
    match inverse_hom(g, h) {
        Ok(_) => Ok(true),
        Err(Error::InvalidExpr(m)) if m.contains("not bijective") => Ok(false),
        Err(e) => Err(e),
    }
}
