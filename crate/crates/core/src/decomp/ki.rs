//! Commutators of the preimage of PAut(T) in IAut₁(A): every subgroup of Γ′ is
//! normal in Γ.

use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use super::qgroup::trivial_mod_t;
use crate::arith::{self, Z};
use crate::autos::multiplier::{multiplication_certificate, Region};
use crate::autos::normal::active_slots;
use crate::autos::stability::{conjugate, stab_to_hom};
use crate::autos::{AutoExpr, HomData, Source};
use crate::error::{Error, Result};
use crate::group::GroupDescriptor;
use crate::inertia::is_inertial;

#[derive(Clone, Debug, Serialize)]
pub struct KiReport {
    pub commutators: Vec<AutoExpr>,
    /// Every commutator stabilizes 0 ≤ T ≤ A.
    pub stabilize: bool,
    /// Number of (γ, c) pairs checked for ⟨c⟩^γ = ⟨c⟩.
    pub checked: usize,
    pub violations: Vec<Value>,
}

impl KiReport {
    pub fn holds(&self) -> bool {
        self.stabilize && self.violations.is_empty()
    }
}

/// [g, h] = g⁻¹h⁻¹gh.
pub fn commutator(a: &AutoExpr, b: &AutoExpr) -> AutoExpr {
    AutoExpr::Composite(vec![a.clone().inv(), b.clone().inv(), a.clone(), b.clone()])
}

fn in_preimage(g: &GroupDescriptor, e: &AutoExpr) -> Result<()> {
    e.check(g)?;
    if !is_inertial(g, e)?.is_inertial() {
        return Err(Error::Hypothesis(format!("{} is not inertial", e.to_json())));
    }
    if !trivial_mod_t(g, e)? {
        return Err(Error::Hypothesis(format!("{} is nontrivial on A/T", e.to_json())));
    }
    for p in g.primes() {
        if multiplication_certificate(g, e, &Region::OnPrimary(p))?.is_none() {
            return Err(Error::Hypothesis(format!("{} is not a power automorphism on T_{p}", e.to_json())));
        }
    }
    Ok(())
}

fn images(g: &GroupDescriptor, h: &HomData, copies: usize) -> Result<Vec<crate::group::Element>> {
    active_slots(g, copies)
        .into_iter()
        .filter(|s| !g.atom(s.atom).is_torsion())
        .map(|s| h.eval(g, &g.generator(s, 0)))
        .collect()
}

/// The least k ≥ 0 with b = k·a, if any.
fn multiple(g: &GroupDescriptor, a: &HomData, b: &HomData, copies: usize) -> Result<Option<Z>> {
    let ia = images(g, a, copies)?;
    let ib = images(g, b, copies)?;
    let ord = ia
        .iter()
        .map(|x| g.order(x).expect("torsion image"))
        .fold(Z::from(1), |x, y| arith::lcm(&x, &y));
    let n = ord.to_u64().ok_or_else(|| Error::Hypothesis("commutator order too large".into()))?;
    for k in 0..n.max(1) {
        let k = Z::from(k);
        if ia.iter().zip(&ib).all(|(x, y)| g.scale(x, &k) == *y) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

pub fn ki_check(gens: &[AutoExpr], g: &GroupDescriptor, budget: usize) -> Result<KiReport> {
    for e in gens {
        in_preimage(g, e)?;
    }
    let copies = gens.iter().map(AutoExpr::max_copy).max().unwrap_or(0) + 1;
    let mut commutators = Vec::new();
    'pairs: for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            if commutators.len() >= budget.max(1) {
                break 'pairs;
            }
            let c = commutator(a, b);
            if !c.is_identity(g)? {
                commutators.push(c);
            }
        }
    }
    let mut stabilize = true;
    let mut homs = Vec::new();
    for c in &commutators {
        match stab_to_hom(g, c, &Source::Torsion) {
            Ok(h) => homs.push(h),
            Err(_) => stabilize = false,
        }
    }
    let mut checked = 0;
    let mut violations = Vec::new();
    for (c, h) in commutators.iter().zip(&homs) {
        for e in gens {
            checked += 1;
            let conj = stab_to_hom(g, &conjugate(c, e), &Source::Torsion);
            let ok = match conj {
                Ok(h2) => {
                    let fwd = multiple(g, h, &h2, copies)?;
                    let back = multiple(g, &h2, h, copies)?;
                    fwd.is_some() && back.is_some()
                }
                Err(_) => false,
            };
            if !ok {
                violations.push(json!({ "commutator": c, "gamma": e }));
            }
        }
    }
    Ok(KiReport { commutators, stabilize, checked, violations })
}
