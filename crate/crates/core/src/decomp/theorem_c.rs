//! IAut₁(A) = Σ⋊Γ₁ for non-periodic A of finite rank, with T bounded or A/T
//! finitely generated.

use num_traits::One;
use serde_json::json;

use super::{embed, pgroup, Certificate, TheoremTag};
use crate::arith::{self, Q, Z};
use crate::autos::stability::{conjugate, hom_to_stab, stab_to_hom};
use crate::autos::{block, equal, AutoExpr, HomData, Source};
use crate::error::{Error, Result};
use crate::group::{Atom, Element, GroupDescriptor, NatInf, Slot};
use crate::inertia::is_inertial;

/// Σ ≅ Hom(A/T, T) as a descriptor: for each free atom a copy of the torsion
/// atoms it can reach. Entries are (free atom, torsion atom) per Σ-atom.
pub struct SigmaModel {
    pub descriptor: GroupDescriptor,
    pub atoms: Vec<(usize, usize)>,
}

fn reachable(g: &GroupDescriptor, f: usize, t: usize) -> bool {
    match (*g.atom(f), g.atom(t).torsion_prime()) {
        (Atom::LocalizedQ { p }, Some(q)) => p != q,
        (_, Some(_)) => true,
        _ => false,
    }
}

pub fn sigma_model(g: &GroupDescriptor) -> SigmaModel {
    let mut atoms = Vec::new();
    let mut desc = Vec::new();
    for f in g.free_indices() {
        for t in g.torsion_indices() {
            if reachable(g, f, t) {
                atoms.push((f, t));
                desc.push(*g.atom(t));
            }
        }
    }
    SigmaModel { descriptor: GroupDescriptor::new(desc).expect("torsion atoms"), atoms }
}

impl SigmaModel {
    /// The Σ-element of a homomorphism A/T → T.
    pub fn element(&self, h: &HomData) -> Result<Element> {
        let mut coords = Vec::new();
        for img in &h.images {
            for (x, v) in img.image.coords() {
                let k = self
                    .atoms
                    .iter()
                    .position(|&(f, t)| f == img.atom && t == x.atom)
                    .ok_or_else(|| Error::Hypothesis(format!("image of {} leaves Σ", img.atom)))?;
                coords.push((Slot::new(k, x.copy), v.clone()));
            }
        }
        self.descriptor.element(coords)
    }

    /// The action φ ↦ φγ on Σ of γ⊕1, given γ_p on the atoms `idx` of A_p.
    pub fn action(&self, idx: &[usize], gamma_p: &AutoExpr) -> AutoExpr {
        let mut blocks = Vec::new();
        let mut frees: Vec<usize> = self.atoms.iter().map(|&(f, _)| f).collect();
        frees.dedup();
        for f in frees {
            let local: Vec<usize> = idx
                .iter()
                .filter_map(|&t| self.atoms.iter().position(|&a| a == (f, t)))
                .collect();
            if local.len() == idx.len() {
                blocks.push(block(&local, gamma_p.clone()));
            }
        }
        if blocks.is_empty() {
            AutoExpr::Identity
        } else {
            AutoExpr::blocks(blocks)
        }
    }
}

/// Σ generators: e_f ↦ e_f + (generator of t) for each reachable torsion slot t.
pub fn sigma_generators(g: &GroupDescriptor, copies: usize) -> Vec<HomData> {
    let mut out = Vec::new();
    for f in g.free_indices() {
        for t in g.torsion_indices() {
            if !reachable(g, f, t) {
                continue;
            }
            let n = if g.atom(t).is_omega() { copies } else { 1 };
            for c in 0..n {
                let img = g.generator(Slot::new(t, c), 1);
                out.push(HomData::new(Source::Torsion, [(Slot::new(f, 0), img)]));
            }
        }
    }
    out
}

/// Generators of IAut(T), one primary component at a time: (prime, γ_p).
fn torsion_generators(t: &GroupDescriptor) -> Result<Vec<(u64, AutoExpr)>> {
    let mut out = Vec::new();
    for p in t.primes() {
        let sub = t.sub(&t.primary_indices(p));
        let c = pgroup::pgroup_decompose(&sub)?;
        for k in ["PAut", "FAut", "Sigma", "Phi", "Delta"] {
            for e in c.factors.get(k).into_iter().flatten() {
                out.push((p, e.clone()));
            }
        }
    }
    Ok(out)
}

fn count_automorphisms(t: &GroupDescriptor) -> Option<u64> {
    if !t.is_finite() {
        return None;
    }
    let size: u64 = t.atoms.iter().map(|a| u64::try_from(a.modulus().unwrap()).unwrap()).product();
    if size.checked_pow(t.len() as u32)? > 200_000 {
        return None;
    }
    let mut elems = vec![Element::zero()];
    for (i, a) in t.atoms.iter().enumerate() {
        let m = u64::try_from(a.modulus().unwrap()).unwrap();
        elems = elems
            .into_iter()
            .flat_map(|e| {
                (0..m).map(move |x| t.add(&e, &t.element([(Slot::new(i, 0), Q::from(Z::from(x)))]).unwrap()).unwrap())
            })
            .collect();
    }
    let mut count = 0;
    let mut choice = vec![0usize; t.len()];
    loop {
        let images = (0..t.len())
            .map(|i| (Slot::new(i, 0), t.sub_elems(&elems[choice[i]], &t.generator(Slot::new(i, 0), 0))));
        let e = AutoExpr::OnePlusHom(HomData::new(Source::Unrestricted, images));
        if e.validate(t).valid {
            count += 1;
        }
        let Some(i) = choice.iter().position(|&c| c + 1 < elems.len()) else { return Some(count) };
        choice[i] += 1;
        for c in &mut choice[..i] {
            *c = 0;
        }
    }
}

pub fn theorem_c_split(g: &GroupDescriptor) -> Result<Certificate> {
    if g.is_periodic() || g.r0() == NatInf::Inf {
        return Err(Error::Hypothesis("A must be non-periodic of finite rank".into()));
    }
    let fg = g.free_indices().iter().all(|&i| *g.atom(i) == Atom::FreeZ);
    let bounded_t = !g.atoms.iter().any(|a| matches!(a, Atom::Pruefer { .. }));
    if !fg && !bounded_t {
        return Err(Error::Hypothesis("need T bounded or A/T finitely generated".into()));
    }
    let mut cert = Certificate::new(if fg { TheoremTag::TheoremCFgQuotient } else { TheoremTag::TheoremCBoundedT });
    let tt = g.torsion_indices();
    let t = g.sub(&tt);
    let model = sigma_model(g);
    let sig = sigma_generators(g, 2);
    let sigma: Vec<AutoExpr> = sig.iter().map(hom_to_stab).collect();
    let gens = torsion_generators(&t)?;
    let lifted: Vec<AutoExpr> = gens
        .iter()
        .map(|(p, e)| {
            let local = t.primary_indices(*p);
            embed(&local.iter().map(|&i| tt[i]).collect::<Vec<_>>(), e.clone())
        })
        .collect();
    cert.datum("sigma_descriptor", &model.descriptor);
    cert.check("sigma_valid", sigma.iter().all(|s| s.validate(g).valid), None);
    let mut inertial = true;
    for x in &lifted {
        inertial &= is_inertial(g, x)?.is_inertial();
    }
    cert.check("gamma1_inertial", inertial, None);

    // conjugation by γ⊕1 acts on Σ as φ ↦ φγ, an inertial automorphism of Σ
    let mut pointwise = true;
    let mut on_sigma = true;
    for ((p, gp), x) in gens.iter().zip(&lifted) {
        let idx: Vec<usize> = t.primary_indices(*p).iter().map(|&i| tt[i]).collect();
        let act = model.action(&idx, gp);
        on_sigma &= act.validate(&model.descriptor).valid && is_inertial(&model.descriptor, &act)?.is_inertial();
        for (h, s) in sig.iter().zip(&sigma).take(6) {
            let conj = stab_to_hom(g, &conjugate(s, x), &Source::Torsion)?;
            let want = act.apply(&model.descriptor, &model.element(h)?)?;
            pointwise &= model.element(&conj)? == want;
        }
    }
    cert.check("conjugation_is_action_on_sigma", pointwise, None);
    cert.check("action_inertial_on_sigma", on_sigma, None);

    // faithfulness: each nontrivial generator moves some σ
    let mut kernel = Vec::new();
    for (k, x) in lifted.iter().enumerate() {
        if x.is_identity(g)? {
            continue;
        }
        let mut moved = false;
        for s in &sigma {
            if !equal(g, &conjugate(s, x), s)? {
                moved = true;
                break;
            }
        }
        if !moved {
            kernel.push(json!({ "generator": k, "expr": x }));
        }
    }
    let faithful = kernel.is_empty();
    cert.datum("faithful", faithful);
    if fg {
        cert.check("faithful", faithful, None);
    } else {
        cert.datum("kernel_witnesses", &kernel);
    }
    if let Some(n) = count_automorphisms(&t) {
        cert.datum("phi1_order", n);
    }
    if let Some(o) = model.descriptor.is_finite().then(|| {
        model.descriptor.atoms.iter().map(|a| a.modulus().unwrap()).fold(Z::one(), |a, b| a * b)
    }) {
        cert.datum("sigma_order", o.to_string());
    }

    if g.atoms.iter().any(|a| matches!(a, Atom::Pruefer { .. })) {
        let mut ws = Vec::new();
        let mut ok = true;
        for s in 1..=2 {
            for n in 1..=4 {
                let w = non_nilpotency_witness(g, s, n)?;
                ok &= w.as_ref().is_some_and(|x| !x.is_zero());
                ws.push(json!({ "s": s, "n": n, "witness": w }));
            }
        }
        cert.check("non_nilpotent", ok, Some(json!(ws)));
    }
    cert.factor("Sigma", sigma);
    cert.factor("Gamma1", lifted);
    Ok(cert)
}

/// μ = α⊕1 with α = a the least non-root-of-unity on the first Prüfer atom.
pub fn mu(g: &GroupDescriptor) -> Option<(usize, u64, i64, AutoExpr)> {
    let (d, p) = g.atoms.iter().enumerate().find_map(|(i, a)| match a {
        Atom::Pruefer { p } => Some((i, *p)),
        _ => None,
    })?;
    let a = if p == 2 { 3 } else { 2 };
    let tp: Vec<usize> = g.primary_indices(p);
    Some((d, p, a, embed(&tp, AutoExpr::padic(p, a, 1))))
}

/// e_f(c − 1) for the n-fold commutator c = [σ, μ^s, ..., μ^s], computed from the
/// definitions. Nonzero for every n, so IAut₁ is not nilpotent.
pub fn non_nilpotency_witness(g: &GroupDescriptor, s: u32, n: u32) -> Result<Option<Element>> {
    let Some((d, p, a, mu)) = mu(g) else { return Ok(None) };
    let Some(&f) = g.free_indices().iter().find(|&&f| reachable(g, f, d)) else { return Ok(None) };
    let v = arith::val(&(Z::from(a).pow(s) - 1), p).unwrap_or(0);
    let depth = n * v + 1;
    let img = g.element([(Slot::new(d, 0), Q::new(Z::one(), arith::pow(p, depth)))])?;
    let mus = mu.power(s as i64);
    let mut c = hom_to_stab(&HomData::new(Source::Torsion, [(Slot::new(f, 0), img)]));
    for _ in 0..n {
        let comm = c.clone().inv().then(conjugate(&c, &mus));
        c = hom_to_stab(&stab_to_hom(g, &comm, &Source::Torsion)?);
    }
    let e = g.generator(Slot::new(f, 0), 0);
    let out = g.sub_elems(&c.apply(g, &e)?, &e);
    Ok(Some(out))
}
