//! The central subgroup Q(A) = ⟨γ_(p)⟩ × {±1} and the factorization γ = γ1·γ0.

use num_traits::{One, Signed};
use serde::Serialize;

use super::{Certificate, TheoremTag, WINDOW};
use crate::arith::{self, Q};
use crate::autos::multiplier::{multiplication_certificate, Region};
use crate::autos::{block, equal, AutoExpr};
use crate::error::{Error, Result};
use crate::group::{Element, GroupDescriptor, PrimeSet, Slot};
use crate::inertia::is_inertial;

/// 1 on A_p and p on its complement C^(p).
pub fn gamma_p(g: &GroupDescriptor, p: u64) -> Result<AutoExpr> {
    if !g.pi_star().contains(p) {
        return Err(Error::Hypothesis(format!("{p} is not in π_*(A)")));
    }
    let rest: Vec<usize> = (0..g.len()).filter(|&i| g.atom(i).torsion_prime() != Some(p)).collect();
    let e = if rest.is_empty() {
        AutoExpr::Identity
    } else {
        AutoExpr::blocks(vec![block(&rest, AutoExpr::rat(p as i64, 1))])
    };
    e.check(g)?;
    Ok(e)
}

/// {γ_(p) : p ∈ π_*(A)} followed by −1.
pub fn q_generators(g: &GroupDescriptor) -> Result<Vec<AutoExpr>> {
    let PrimeSet::Finite(ps) = g.pi_star() else {
        return Err(Error::Hypothesis("Q(A) is defined for non-periodic A".into()));
    };
    let mut out = Vec::new();
    for p in ps {
        out.push(gamma_p(g, p)?);
    }
    out.push(AutoExpr::Negation);
    Ok(out)
}

/// The word (−1)^sign · Π γ_(p)^{s_p}.
pub fn q_word(g: &GroupDescriptor, exps: &[(u64, i64)], negative: bool) -> Result<AutoExpr> {
    let mut parts = Vec::new();
    for &(p, s) in exps {
        if s != 0 {
            parts.push(gamma_p(g, p)?.power(s));
        }
    }
    if negative {
        parts.push(AutoExpr::Negation);
    }
    Ok(match parts.len() {
        0 => AutoExpr::Identity,
        1 => parts.pop().unwrap(),
        _ => AutoExpr::Composite(parts),
    })
}

/// No word with exponents in [-k, k] other than the empty one is trivial on the window.
pub fn q_is_free(g: &GroupDescriptor, k: i64) -> Result<bool> {
    let PrimeSet::Finite(ps) = g.pi_star() else { return Ok(false) };
    let ps: Vec<u64> = ps.into_iter().collect();
    let mut exps = vec![-k; ps.len()];
    loop {
        for neg in [false, true] {
            let trivial_word = !neg && exps.iter().all(|&s| s == 0);
            let w: Vec<(u64, i64)> = ps.iter().copied().zip(exps.iter().copied()).collect();
            if !trivial_word && q_word(g, &w, neg)?.is_identity(g)? {
                return Ok(false);
            }
        }
        let Some(i) = exps.iter().position(|&s| s < k) else { return Ok(true) };
        exps[i] += 1;
        for e in &mut exps[..i] {
            *e = -k;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Factorization {
    pub gamma1: AutoExpr,
    pub gamma0: AutoExpr,
    #[serde(serialize_with = "crate::arith::ser::q")]
    pub multiplier: Q,
    pub exponents: Vec<(u64, i64)>,
    pub negative: bool,
    pub certificate: Certificate,
}

/// Whether γ fixes every coset generator of A/T.
pub fn trivial_mod_t(g: &GroupDescriptor, e: &AutoExpr) -> Result<bool> {
    for i in g.free_indices() {
        let copies = if g.atom(i).is_omega() { WINDOW } else { 1 };
        for c in 0..copies {
            let x = g.generator(Slot::new(i, c), 0);
            let d = g.sub_elems(&e.apply(g, &x)?, &x);
            if !g.is_torsion(&d) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// γ = γ1∘γ0 with γ1 ∈ IAut₁(A) and γ0 ∈ Q(A).
pub fn theorem_b_factor(g: &GroupDescriptor, e: &AutoExpr) -> Result<Factorization> {
    if g.is_periodic() {
        return Err(Error::Hypothesis("A must be non-periodic".into()));
    }
    if !is_inertial(g, e)?.is_inertial() {
        return Err(Error::Hypothesis("γ is not inertial".into()));
    }
    let m = multiplication_certificate(g, e, &Region::ModT)?
        .ok_or_else(|| Error::Hypothesis("no multiplier on A/T".into()))?
        .value;
    let negative = m.is_negative();
    let mut rest = m.abs();
    let PrimeSet::Finite(ps) = g.pi_star() else { unreachable!("non-periodic") };
    let mut exponents = Vec::new();
    for &p in &ps {
        let s = arith::val(rest.numer(), p).unwrap_or(0) as i64 - arith::val(rest.denom(), p).unwrap_or(0) as i64;
        rest /= Q::from_integer(p.into()).pow(s as i32);
        exponents.push((p, s));
    }
    if !rest.is_one() {
        return Err(Error::Hypothesis(format!("multiplier {} is not a word in Q(A)", arith::fmt_q(&m))));
    }
    let gamma0 = q_word(g, &exponents, negative)?;
    let gamma1 = match gamma0 {
        AutoExpr::Identity => e.clone(),
        _ => e.clone().then(gamma0.clone().inv()),
    };

    let mut cert = Certificate::new(TheoremTag::TheoremB);
    cert.factor("gamma1", vec![gamma1.clone()]);
    cert.factor("gamma0", vec![gamma0.clone()]);
    cert.factor("Q", q_generators(g)?);
    cert.datum("multiplier", arith::fmt_q(&m));
    cert.datum("exponents", &exponents);
    cert.check("gamma1_valid", gamma1.validate(g).valid, None);
    cert.check("gamma1_trivial_mod_T", trivial_mod_t(g, &gamma1)?, None);
    cert.check("gamma1_inertial", is_inertial(g, &gamma1)?.is_inertial(), None);
    cert.check("product", equal(g, &gamma1.clone().then(gamma0.clone()), e)?, None);
    let probe: Vec<Element> = super::window_elements(g, 2, 2);
    let pointwise = probe.iter().all(|x| {
        matches!((gamma1.apply(g, x).and_then(|y| gamma0.apply(g, &y)), e.apply(g, x)), (Ok(a), Ok(b)) if a == b)
    });
    cert.check("product_pointwise", pointwise, None);
    // Q(A) ∩ IAut₁(A) = 1: distinct words have distinct multipliers on A/T
    cert.check("unique", q_is_free(g, 3)?, None);
    Ok(Factorization { gamma1, gamma0, multiplier: m, exponents, negative, certificate: cert })
}
