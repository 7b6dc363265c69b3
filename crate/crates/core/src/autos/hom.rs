//! Homomorphisms given by the images of finitely many slot generators.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, Z};
use crate::error::{Error, Result};
use crate::group::{Atom, Element, GroupDescriptor, Slot};

/// Which characteristic subgroup the map kills, i.e. the quotient it is defined on.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Source {
    /// A/T(A).
    Torsion,
    /// A/D(A).
    Divisible,
    /// A/A_π.
    Primary(Vec<u64>),
    /// No quotient claimed; only the listed slots are sources.
    Unrestricted,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomImage {
    pub atom: usize,
    #[serde(default)]
    pub copy: usize,
    pub image: Element,
}

impl HomImage {
    pub fn slot(&self) -> Slot {
        Slot::new(self.atom, self.copy)
    }
}

/// φ with φ(e_s) = image for each listed source slot s and φ = 0 on every
/// other coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomData {
    pub source: Source,
    pub images: Vec<HomImage>,
}

impl HomData {
    pub fn new(source: Source, images: impl IntoIterator<Item = (Slot, Element)>) -> HomData {
        let mut v: Vec<HomImage> = images
            .into_iter()
            .filter(|(_, e)| !e.is_zero())
            .map(|(s, image)| HomImage { atom: s.atom, copy: s.copy, image })
            .collect();
        v.sort_by_key(|h| h.slot());
        HomData { source, images: v }
    }

    pub fn zero(source: Source) -> HomData {
        HomData { source, images: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(|h| h.image.is_zero())
    }

    pub fn sources(&self) -> impl Iterator<Item = Slot> + '_ {
        self.images.iter().map(|h| h.slot())
    }

    pub fn image_of(&self, s: Slot) -> Option<&Element> {
        self.images.iter().find(|h| h.slot() == s).map(|h| &h.image)
    }

    pub fn max_copy(&self) -> usize {
        self.images
            .iter()
            .map(|h| h.copy.max(h.image.max_copy()))
            .max()
            .unwrap_or(0)
    }

    /// Canonical representatives of all images in `g`.
    pub fn normalized(&self, g: &GroupDescriptor) -> Result<HomData> {
        let mut out = Vec::new();
        for h in &self.images {
            let img = g.element(h.image.coords().map(|(s, x)| (*s, x.clone())))?;
            out.push((h.slot(), img));
        }
        Ok(HomData::new(self.source.clone(), out))
    }

    /// Exact well-definedness: sources exist, source slots can be mapped
    /// freely to their images, and the quotient tag is respected.
    pub fn check(&self, g: &GroupDescriptor) -> Result<()> {
        let mut seen = BTreeSet::new();
        for h in &self.images {
            let s = h.slot();
            if !seen.insert(s) {
                return Err(Error::InvalidExpr(format!("slot {s} listed twice")));
            }
            let atom = g
                .atoms
                .get(s.atom)
                .ok_or_else(|| Error::InvalidExpr(format!("no atom {}", s.atom)))?;
            if !atom.is_omega() && s.copy != 0 {
                return Err(Error::InvalidExpr(format!("slot {s} on a single summand")));
            }
            if !g.contains(&h.image) {
                return Err(Error::InvalidExpr(format!("image of {s} is not in the group")));
            }
            match *atom {
                Atom::Cyclic { .. } | Atom::CyclicOmega { .. } => {
                    let m = atom.modulus().unwrap();
                    if !g.scale(&h.image, &m).is_zero() {
                        return Err(Error::InvalidExpr(format!(
                            "image of {s} is not killed by {m}"
                        )));
                    }
                }
                Atom::FreeZ | Atom::FreeZOmega => {}
                Atom::LocalizedQ { p } => match g.order(&h.image) {
                    Some(o) if arith::val(&o, p) == Some(0) => {}
                    _ => {
                        return Err(Error::InvalidExpr(format!(
                            "image of the Q_({p}) slot {s} must be torsion prime to {p}"
                        )))
                    }
                },
                Atom::Pruefer { .. } => {
                    return Err(Error::InvalidExpr(format!("Prüfer slot {s} cannot be a source")))
                }
            }
            let killed = match &self.source {
                Source::Torsion => atom.is_torsion(),
                Source::Divisible => matches!(atom, Atom::Pruefer { .. }),
                Source::Primary(ps) => atom.torsion_prime().is_some_and(|p| ps.contains(&p)),
                Source::Unrestricted => false,
            };
            if killed {
                return Err(Error::InvalidExpr(format!(
                    "slot {s} lies in the subgroup the map must kill"
                )));
            }
        }
        Ok(())
    }

    /// φ(a).
    pub fn eval(&self, g: &GroupDescriptor, a: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for h in &self.images {
            let x = a.get(h.slot());
            if x.is_zero() {
                continue;
            }
            let term = match *g.atom(h.atom) {
                Atom::LocalizedQ { p } => {
                    let o = g.order(&h.image).ok_or_else(|| {
                        Error::InvalidExpr("Q_(p) source with torsion-free image".into())
                    })?;
                    let j = arith::denom_exp(&x, p);
                    let inv = arith::mod_inv(&arith::pow(p, j), &o).ok_or_else(|| {
                        Error::InvalidExpr("Q_(p) source with image of order divisible by p".into())
                    })?;
                    g.scale(&h.image, &(x.numer() * inv))
                }
                _ => {
                    if !x.is_integer() {
                        return Err(Error::NotInGroup(a.to_string()));
                    }
                    g.scale(&h.image, &x.to_integer())
                }
            };
            out = g.add_unchecked(&out, &term);
        }
        Ok(out)
    }

    pub fn scaled(&self, g: &GroupDescriptor, n: &Z) -> HomData {
        HomData::new(
            self.source.clone(),
            self.images.iter().map(|h| (h.slot(), g.scale(&h.image, n))),
        )
    }

    pub fn negated(&self, g: &GroupDescriptor) -> HomData {
        self.scaled(g, &-Z::one())
    }

    /// Pointwise sum, same source tag as `self`.
    pub fn plus(&self, g: &GroupDescriptor, other: &HomData) -> HomData {
        let mut slots: BTreeSet<Slot> = self.sources().collect();
        slots.extend(other.sources());
        HomData::new(
            self.source.clone(),
            slots.into_iter().map(|s| {
                let a = self.image_of(s).cloned().unwrap_or_default();
                let b = other.image_of(s).cloned().unwrap_or_default();
                (s, g.add_unchecked(&a, &b))
            }),
        )
    }

    /// φ∘φ vanishes on every source generator.
    pub fn squares_to_zero(&self, g: &GroupDescriptor) -> Result<bool> {
        for h in &self.images {
            if !self.eval(g, &h.image)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
