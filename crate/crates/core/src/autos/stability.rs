//! Stability automorphisms of 0 ≤ X ≤ A and their homomorphisms A/X → X.

use num_traits::One;

use super::expr::AutoExpr;
use super::hom::{HomData, Source};
use super::multiplier::{multiplication_certificate, Region};
use crate::arith::Q;
use crate::error::{Error, Result};
use crate::group::{Atom, Element, GroupDescriptor, Slot};

/// Whether the atom lies in the characteristic subgroup named by `x`.
pub fn atom_in(a: &Atom, x: &Source) -> bool {
    match x {
        Source::Torsion => a.is_torsion(),
        Source::Divisible => matches!(a, Atom::Pruefer { .. }),
        Source::Primary(ps) => a.torsion_prime().is_some_and(|p| ps.contains(&p)),
        Source::Unrestricted => false,
    }
}

fn element_in(g: &GroupDescriptor, e: &Element, x: &Source) -> bool {
    e.support().all(|s| atom_in(g.atom(s.atom), x))
}

/// φ = σ−1 as a map A/X → X.
pub fn stab_to_hom(g: &GroupDescriptor, sigma: &AutoExpr, x: &Source) -> Result<HomData> {
    if *x == Source::Unrestricted {
        return Err(Error::Hypothesis("a characteristic subgroup must be named".into()));
    }
    let nf = sigma.normal_form(g)?;
    for (i, a) in g.atoms.iter().enumerate() {
        let generic = matches!(a, Atom::Pruefer { .. }) || a.is_omega();
        if generic && !nf.diag_matches(i, &Q::one()) {
            return Err(Error::Hypothesis(format!(
                "σ−1 is nonzero on the generic part of atom {i}"
            )));
        }
    }
    let mut images: Vec<(Slot, Element)> = Vec::new();
    for (s, col) in &nf.columns {
        let d = g.sub_elems(col, &g.generator(*s, 0));
        if atom_in(g.atom(s.atom), x) {
            if !d.is_zero() {
                return Err(Error::Hypothesis(format!("σ moves {s}, which lies in X")));
            }
        } else if !element_in(g, &d, x) {
            return Err(Error::Hypothesis(format!("{s}(σ−1) does not lie in X")));
        } else {
            images.push((*s, d));
        }
    }
    let h = HomData::new(x.clone(), images);
    h.check(g)?;
    Ok(h)
}

pub fn hom_to_stab(h: &HomData) -> AutoExpr {
    if h.is_zero() {
        AutoExpr::Identity
    } else {
        AutoExpr::OnePlusHom(h.clone())
    }
}

/// σ^γ = γ^{-1}σγ, definitionally.
pub fn conjugate(sigma: &AutoExpr, gamma: &AutoExpr) -> AutoExpr {
    if *gamma == AutoExpr::Identity {
        return sigma.clone();
    }
    AutoExpr::Composite(vec![gamma.clone().inv(), sigma.clone(), gamma.clone()])
}

/// The map a ↦ ((a)γ2^{-1})φ γ1, with sources on the tracked slots outside X.
pub fn twisted_hom(
    g: &GroupDescriptor,
    phi: &HomData,
    gamma1: &AutoExpr,
    gamma2: &AutoExpr,
) -> Result<HomData> {
    let inv2 = gamma2.inverse(g)?;
    let copies = phi.max_copy().max(gamma1.max_copy()).max(gamma2.max_copy());
    let mut images = Vec::new();
    for s in super::normal::active_slots(g, copies) {
        if atom_in(g.atom(s.atom), &phi.source) {
            continue;
        }
        let a = inv2.apply(g, &g.generator(s, 0))?;
        let img = gamma1.apply(g, &phi.eval(g, &a)?)?;
        images.push((s, img));
    }
    Ok(HomData::new(phi.source.clone(), images))
}

/// Closed form σ^{γ1γ2} = γ2^{-1}(σ−1)γ1 + 1.
pub fn conjugate_split(
    g: &GroupDescriptor,
    phi: &HomData,
    gamma1: &AutoExpr,
    gamma2: &AutoExpr,
) -> Result<AutoExpr> {
    Ok(hom_to_stab(&twisted_hom(g, phi, gamma1, gamma2)?))
}

/// Multipliers (m1 on X, m2 for γ^{-1} on A/X), if γ acts as such.
pub fn scalar_pair(g: &GroupDescriptor, gamma: &AutoExpr, x: &Source) -> Result<Option<(Q, Q)>> {
    let (on, modx) = match x {
        Source::Torsion => (region_on_t(g), Region::ModT),
        Source::Divisible => (Some(Region::OnD), Region::ModD),
        Source::Primary(ps) if ps.len() == 1 => (Some(Region::OnPrimary(ps[0])), Region::Whole),
        _ => return Ok(None),
    };
    let Some(on) = on else { return Ok(None) };
    let m1 = multiplication_certificate(g, gamma, &on)?;
    let inv = gamma.inverse(g)?;
    let m2 = match modx {
        Region::Whole => quotient_certificate(g, &inv, x)?,
        r => multiplication_certificate(g, &inv, &r)?.map(|m| m.value),
    };
    Ok(match (m1, m2) {
        (Some(a), Some(b)) => Some((a.value, b)),
        _ => None,
    })
}

fn region_on_t(g: &GroupDescriptor) -> Option<Region> {
    let ps = g.primes();
    match ps.len() {
        0 => Some(Region::OnD),
        1 => Some(Region::OnPrimary(*ps.iter().next().unwrap())),
        _ => None,
    }
}

/// Multiplier of γ on A/X for X = A_p: the complement atoms.
fn quotient_certificate(g: &GroupDescriptor, e: &AutoExpr, x: &Source) -> Result<Option<Q>> {
    let nf = e.normal_form(g)?;
    let rest: Vec<usize> = (0..g.len()).filter(|&i| !atom_in(g.atom(i), x)).collect();
    let keep: std::collections::BTreeSet<usize> = rest.iter().copied().collect();
    let mut cands: Vec<Q> = rest.iter().map(|&i| nf.diag[i].clone()).collect();
    cands.dedup();
    'c: for m in cands {
        if !rest.iter().all(|&i| nf.diag_matches(i, &m)) {
            continue;
        }
        for (s, col) in &nf.columns {
            if !keep.contains(&s.atom) {
                continue;
            }
            let Ok(v) = g.mul_coord(*s, &Q::one(), &m) else { continue 'c };
            let mut want = Element::zero();
            want.set(*s, v);
            if g.project(col, &keep) != want {
                continue 'c;
            }
        }
        return Ok(Some(m));
    }
    Ok(None)
}

/// σ^{m1·m2}, expressed as 1 + m1m2·φ.
pub fn power_closed_form(g: &GroupDescriptor, phi: &HomData, k: &Q) -> Result<AutoExpr> {
    let mut images = Vec::new();
    for h in &phi.images {
        images.push((h.slot(), g.mul_elem(&h.image, k)?));
    }
    Ok(hom_to_stab(&HomData::new(phi.source.clone(), images)))
}
