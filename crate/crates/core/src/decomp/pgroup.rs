//! Certificates for a single p-group, critical or not.

use num_traits::One;
use serde_json::json;

use super::{embed, Certificate, TheoremTag, WINDOW};
use crate::arith::{self, Q, Z};
use crate::autos::stability::{conjugate, hom_to_stab, power_closed_form, stab_to_hom};
use crate::autos::{equal, is_finitary, AutoExpr, HomData, Source};
use crate::error::{Error, Result};
use crate::group::{Atom, GroupDescriptor, NatInf, Slot};

/// Generators of the units mod p^m, as integers.
pub fn unit_generators(p: u64, m: u32) -> Vec<i64> {
    match (p, m) {
        (_, 0) | (2, 1) => vec![],
        (2, 2) => vec![-1],
        (2, _) => vec![-1, 5],
        _ => vec![arith::primitive_root(p, m) as i64],
    }
}

fn the_prime(g: &GroupDescriptor) -> Result<u64> {
    let ps = g.primes();
    if ps.len() != 1 || !g.is_periodic() {
        return Err(Error::Hypothesis("A must be a p-group".into()));
    }
    Ok(*ps.iter().next().unwrap())
}

fn copies(a: &Atom) -> usize {
    if a.is_omega() {
        2
    } else {
        1
    }
}

/// Elementary finitary automorphisms among the bounded atoms in `atoms`.
pub fn finitary_family(g: &GroupDescriptor, atoms: &[usize]) -> Vec<AutoExpr> {
    let mut slots = Vec::new();
    for &i in atoms {
        if g.atom(i).cyclic_exp().is_some() {
            slots.extend((0..copies(g.atom(i))).map(|c| Slot::new(i, c)));
        }
    }
    let mut out = Vec::new();
    for &s in &slots {
        let (ps, ks) = (g.atom(s.atom).prime().unwrap(), g.atom(s.atom).cyclic_exp().unwrap());
        for &t in &slots {
            let (pt, kt) = (g.atom(t.atom).prime().unwrap(), g.atom(t.atom).cyclic_exp().unwrap());
            if s == t || ps != pt {
                continue;
            }
            let c = Q::from_integer(arith::pow(ps, kt.saturating_sub(ks)));
            let img = g.element([(t, c)]).expect("cyclic coordinate");
            out.push(AutoExpr::OnePlusHom(HomData::new(Source::Unrestricted, [(s, img)])));
        }
        if let Atom::Cyclic { .. } = g.atom(s.atom) {
            for (j, a) in g.atoms.iter().enumerate() {
                if *a == (Atom::Pruefer { p: ps }) && atoms.contains(&j) {
                    let img = g.element([(Slot::new(j, 0), Q::new(Z::one(), arith::pow(ps, ks)))]).unwrap();
                    out.push(AutoExpr::OnePlusHom(HomData::new(Source::Unrestricted, [(s, img)])));
                }
            }
            for u in unit_generators(ps, ks) {
                out.push(embed(&[s.atom], AutoExpr::padic(ps, u, 1)));
            }
        }
        if g.atom(s.atom).is_omega() && s.copy == 0 {
            // swap copies 0 and 1
            let (e0, e1) = (g.generator(s, 0), g.generator(Slot::new(s.atom, 1), 0));
            let d = g.sub_elems(&e1, &e0);
            let h = HomData::new(Source::Unrestricted, [(s, d.clone()), (Slot::new(s.atom, 1), g.neg(&d))]);
            out.push(AutoExpr::OnePlusHom(h));
        }
    }
    out
}

pub fn pgroup_decompose(g: &GroupDescriptor) -> Result<Certificate> {
    let p = the_prime(g)?;
    if g.is_critical(p) {
        critical(g, p)
    } else {
        noncritical(g, p)
    }
}

fn noncritical(g: &GroupDescriptor, p: u64) -> Result<Certificate> {
    let mut cert = Certificate::new(TheoremTag::PgroupNoncritical);
    let all: Vec<usize> = (0..g.len()).collect();
    let (m, e) = (g.exponent(p), g.eexp(p));
    let paut_m = match m {
        NatInf::Fin(m) => m,
        NatInf::Inf => if p == 2 { 3 } else { 2 },
    };
    let paut: Vec<AutoExpr> = unit_generators(p, paut_m).into_iter().map(|u| AutoExpr::padic(p, u, 1)).collect();
    let faut = finitary_family(g, &all);
    let mut ok = true;
    for x in &faut {
        ok &= x.validate(g).valid && is_finitary(g, x)?.finitary;
    }
    cert.check("faut_generators_finitary", ok, None);
    cert.check("paut_generators_valid", paut.iter().all(|x| x.validate(g).valid), None);
    cert.factor("PAut", paut);
    cert.factor("FAut", faut);
    cert.datum("p", p);
    cert.datum("m", m);
    cert.datum("e", e);

    // PAut ∩ FAut, by testing each unit for finitarity
    let (order, cyclic) = match m {
        NatInf::Fin(m) => {
            let pm = arith::pow(p, m);
            let mut members = Vec::new();
            let top: u64 = pm.clone().try_into().unwrap_or(u64::MAX);
            for u in 1..top.max(2) {
                if u % p == 0 {
                    continue;
                }
                if is_finitary(g, &AutoExpr::padic(p, u as i64, 1))?.finitary {
                    members.push(u);
                }
            }
            let n = members.len() as u64;
            let cyc = members.iter().any(|&u| arith::mult_order(&Z::from(u), &pm) == n);
            (n, cyc)
        }
        NatInf::Inf => {
            let sample = [-1i64, 1 + p as i64, 1 + (p * p) as i64, 2];
            let none = sample
                .iter()
                .filter(|&&u| (u % p as i64) != 0)
                .map(|&u| is_finitary(g, &AutoExpr::padic(p, u, 1)).map(|v| v.finitary))
                .collect::<Result<Vec<bool>>>()?
                .into_iter()
                .all(|f| !f);
            (if none { 1 } else { 0 }, true)
        }
    };
    let expected: u64 = match (m, e) {
        (NatInf::Fin(0), _) => 1,
        (NatInf::Fin(m), NatInf::Fin(0)) => (p - 1) * p.pow(m - 1),
        (NatInf::Fin(m), NatInf::Fin(e)) => p.pow(m - e),
        _ => 1,
    };
    cert.datum("intersection_order", order);
    cert.datum("intersection_expected", expected);
    cert.check("intersection_order", order == expected, Some(json!({ "computed": order, "expected": expected })));
    cert.datum("intersection_cyclic", cyclic);
    Ok(cert)
}

/// δ_n: 1 on D and n^{-1} on B, so that conjugation by δ_n is multiplication by n on Σ.
pub fn delta(g: &GroupDescriptor, p: u64, n: i64) -> AutoExpr {
    let b: Vec<usize> = (0..g.len()).filter(|&i| !matches!(g.atom(i), Atom::Pruefer { .. })).collect();
    embed(&b, AutoExpr::padic(p, 1, n))
}

/// Σ = St(A, D): e_s ↦ e_s + 1/p^k in each Prüfer atom, on the sampled copies.
pub fn sigma_generators(g: &GroupDescriptor, copies: usize) -> Vec<(Slot, HomData)> {
    let mut out = Vec::new();
    let ds: Vec<usize> = g.indices_where(|a| matches!(a, Atom::Pruefer { .. }));
    for (i, a) in g.atoms.iter().enumerate() {
        let Some(k) = a.cyclic_exp() else { continue };
        let p = a.prime().unwrap();
        let n = if a.is_omega() { copies } else { 1 };
        for c in 0..n {
            for &d in &ds {
                if g.atom(d).prime() != Some(p) {
                    continue;
                }
                let img = g.element([(Slot::new(d, 0), Q::new(Z::one(), arith::pow(p, k)))]).unwrap();
                out.push((Slot::new(i, c), HomData::new(Source::Divisible, [(Slot::new(i, c), img)])));
            }
        }
    }
    out
}

/// conjugate(σ, δ_n) = σ^n for each sampled σ.
pub fn delta_acts_as(g: &GroupDescriptor, p: u64, n: i64, copies: usize) -> Result<bool> {
    let d = delta(g, p, n);
    for (_, phi) in sigma_generators(g, copies) {
        let sigma = hom_to_stab(&phi);
        let conj = conjugate(&sigma, &d);
        let closed = power_closed_form(g, &phi, &Q::from_integer(n.into()))?;
        if !equal(g, &conj, &closed)? || stab_to_hom(g, &conj, &Source::Divisible)? != stab_to_hom(g, &closed, &Source::Divisible)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn critical(g: &GroupDescriptor, p: u64) -> Result<Certificate> {
    let mut cert = Certificate::new(TheoremTag::PgroupCritical);
    let b: Vec<usize> = (0..g.len()).filter(|&i| !matches!(g.atom(i), Atom::Pruefer { .. })).collect();
    let bg = g.sub(&b);
    let (NatInf::Fin(m1), NatInf::Fin(e1)) = (bg.exponent(p), bg.eexp(p)) else { unreachable!("B bounded") };
    cert.datum("p", p);
    cert.datum("m_prime", m1);
    cert.datum("e_prime", e1);

    let sig = sigma_generators(g, WINDOW);
    let sigma: Vec<AutoExpr> = sig.iter().map(|(_, h)| hom_to_stab(h)).collect();
    let exp_sigma = sig
        .iter()
        .flat_map(|(_, h)| h.images.iter().map(|i| g.order(&i.image).unwrap()))
        .fold(Z::one(), |a, b| arith::lcm(&a, &b));
    // generators on copies past the finite atoms recur forever with these orders
    let eexp_sigma = sig
        .iter()
        .filter(|(s, _)| g.atom(s.atom).is_omega())
        .flat_map(|(_, h)| h.images.iter().map(|i| arith::val(&g.order(&i.image).unwrap(), p).unwrap()))
        .max()
        .unwrap_or(0);
    // exponents are recorded as powers of p, as for B
    let exp_sigma = arith::val(&exp_sigma, p).unwrap_or(0);
    cert.datum("exp_sigma", exp_sigma);
    cert.datum("eexp_sigma", eexp_sigma);
    cert.check("exp_sigma_is_exp_B", exp_sigma == m1, None);
    cert.check("eexp_sigma_is_eexp_B", eexp_sigma == e1, None);
    cert.check("sigma_valid", sigma.iter().all(|s| s.validate(g).valid), None);

    let phi = finitary_family(g, &b);
    let ns = unit_generators(p, m1);
    let deltas: Vec<AutoExpr> = ns.iter().map(|&n| delta(g, p, n)).collect();
    cert.check("phi_valid", phi.iter().all(|x| x.validate(g).valid), None);
    cert.check("delta_valid", deltas.iter().all(|x| x.validate(g).valid), None);
    cert.datum("delta_n", &ns);

    let mut conj_ok = true;
    for &n in &ns {
        conj_ok &= delta_acts_as(g, p, n, 2)?;
    }
    cert.check("delta_conjugation_is_power", conj_ok, None);

    let mut commute = true;
    for x in &phi {
        for d in &deltas {
            commute &= equal(g, &x.clone().then(d.clone()), &d.clone().then(x.clone()))?;
        }
    }
    cert.check("phi_delta_commute", commute, None);

    // faithfulness of Ψ = ΦΔ on Σ
    let mut psis: Vec<AutoExpr> = phi.iter().chain(deltas.iter()).cloned().collect();
    for x in phi.iter().take(3) {
        for d in &deltas {
            psis.push(x.clone().then(d.clone()));
        }
    }
    let mut witnesses = Vec::new();
    let mut faithful = true;
    for (k, psi) in psis.iter().enumerate() {
        if psi.is_identity(g)? {
            continue;
        }
        let mut found = None;
        for (j, s) in sigma.iter().enumerate() {
            if !equal(g, &conjugate(s, psi), s)? {
                found = Some(j);
                break;
            }
        }
        match found {
            Some(j) => witnesses.push(json!({ "psi": k, "sigma": j })),
            None => faithful = false,
        }
    }
    cert.check("psi_faithful", faithful, Some(json!(witnesses)));

    if p != 2 {
        let n = ns[0];
        let d = &deltas[0];
        let mut gen = true;
        let mut moved = true;
        for (_, h) in sig.iter().take(2 * b.len()) {
            let s = hom_to_stab(h);
            let comm = s.clone().inv().then(conjugate(&s, d));
            gen &= equal(g, &comm, &power_closed_form(g, h, &Q::from_integer((n - 1).into()))?)?;
            moved &= !equal(g, &conjugate(&s, d), &s)?;
        }
        cert.check("commutator_generates_sigma", gen && (n - 1) % p as i64 != 0, None);
        cert.check("delta_fixed_point_free", moved, None);
    } else {
        cert.datum("commutator_generates_sigma", "not applicable for p = 2");
    }
    cert.factor("Sigma", sigma);
    cert.factor("Phi", phi);
    cert.factor("Delta", deltas);
    Ok(cert)
}
