//! Assembling the per-prime certificates of a periodic group: IAut = PAut·FAut·Δ.

use serde_json::json;

use super::{embed, pgroup, Certificate, TheoremTag};
use crate::arith::Q;
use crate::autos::{equal, is_finitary, AutoExpr};
use crate::error::{Error, Result};
use crate::group::{Atom, GroupDescriptor};
use crate::inertia::{self, Certificate as Verdict, PrimaryCert};

fn lift(idx: &[usize], gens: &[AutoExpr]) -> Vec<AutoExpr> {
    gens.iter().map(|e| embed(idx, e.clone())).collect()
}

fn padic_q(p: u64, r: &Q) -> AutoExpr {
    let m: i64 = r.numer().try_into().expect("small multiplier");
    let n: i64 = r.denom().try_into().expect("small multiplier");
    if (m, n) == (1, 1) {
        AutoExpr::Identity
    } else {
        AutoExpr::padic(p, m, n)
    }
}

/// γ = φ∘α∘δ with α a power automorphism, φ finitary and δ ∈ Δ, read off the
/// inertia certificate.
pub fn factor_inertial(g: &GroupDescriptor, e: &AutoExpr) -> Result<Option<[AutoExpr; 3]>> {
    let v = inertia::is_inertial(g, e)?;
    let comps = match v.certificate {
        Some(Verdict::Primary(c)) => vec![(*g.primes().iter().next().unwrap(), c)],
        Some(Verdict::Periodic { components }) => components.into_iter().collect(),
        Some(Verdict::FiniteGroup) | Some(Verdict::Finitary { .. }) => {
            return Ok(Some([e.clone(), AutoExpr::Identity, AutoExpr::Identity]))
        }
        _ => return Ok(None),
    };
    let mut power = Vec::new();
    let mut delta = Vec::new();
    for (p, c) in comps {
        let idx = g.primary_indices(p);
        let (alpha, ratio) = match c {
            PrimaryCert::Finite => continue,
            PrimaryCert::Power { alpha } => (alpha, None),
            PrimaryCert::Critical { alpha, beta } => {
                let r = &beta / &alpha;
                (alpha, Some(r))
            }
        };
        let a = padic_q(p, &alpha);
        if a != AutoExpr::Identity {
            power.push(embed(&idx, a));
        }
        if let Some(r) = ratio {
            let b: Vec<usize> = idx.iter().copied().filter(|&i| !matches!(g.atom(i), Atom::Pruefer { .. })).collect();
            let d = padic_q(p, &r);
            if d != AutoExpr::Identity {
                delta.push(embed(&b, d));
            }
        }
    }
    let join = |mut v: Vec<AutoExpr>| match v.len() {
        0 => AutoExpr::Identity,
        1 => v.pop().unwrap(),
        _ => AutoExpr::Composite(v),
    };
    let (alpha, delta) = (join(power), join(delta));
    let rest = alpha.clone().then(delta.clone());
    let phi = if rest == AutoExpr::Identity { e.clone() } else { e.clone().then(rest.inv()) };
    Ok(Some([phi, alpha, delta]))
}

pub fn periodic_decompose(g: &GroupDescriptor) -> Result<Certificate> {
    if !g.is_periodic() {
        return Err(Error::Hypothesis("A must be periodic".into()));
    }
    let mut cert = Certificate::new(TheoremTag::TheoremA);
    let mut pi = Vec::new();
    let mut critical = Vec::new();
    let (mut paut, mut faut, mut delta, mut sigma, mut psi) = (vec![], vec![], vec![], vec![], vec![]);
    let mut faut_pi = Vec::new();
    for p in g.primes() {
        let idx = g.primary_indices(p);
        let c = pgroup::pgroup_decompose(&g.sub(&idx))?;
        cert.check(&format!("component_{p}"), c.all_pass(), None);
        let get = |k: &str| c.factors.get(k).cloned().unwrap_or_default();
        if g.is_critical(p) {
            critical.push(p);
            let m1 = c.data["m_prime"].as_u64().unwrap() as u32;
            paut.extend(lift(&idx, &pgroup::unit_generators(p, m1.max(2)).into_iter().map(|u| AutoExpr::padic(p, u, 1)).collect::<Vec<_>>()));
            delta.extend(lift(&idx, &get("Delta")));
            sigma.extend(lift(&idx, &get("Sigma")));
            psi.extend(lift(&idx, &get("Phi")));
            faut.extend(lift(&idx, &get("Phi")));
        } else {
            pi.push(p);
            paut.extend(lift(&idx, &get("PAut")));
            let f = lift(&idx, &get("FAut"));
            faut_pi.extend(f.clone());
            faut.extend(f);
        }
        cert.data.insert(format!("component_{p}"), serde_json::to_value(&c).expect("serializable"));
    }
    psi.extend(delta.iter().cloned());
    cert.datum("pi", &pi);
    cert.datum("critical", &critical);
    let reduced = !g.atoms.iter().any(|a| matches!(a, Atom::Pruefer { .. }));
    cert.check("reduced_implies_delta_trivial", !reduced || delta.is_empty(), None);

    // FAut(A_π) commutes with Σ⋊Ψ, which lives on the critical components
    let mut commute = true;
    for f in &faut_pi {
        for x in delta.iter().chain(sigma.iter()).take(8) {
            commute &= equal(g, &f.clone().then(x.clone()), &x.clone().then(f.clone()))?;
        }
    }
    cert.check("faut_pi_centralizes_critical", commute, None);

    // re-factor sampled products γ = φ∘α∘δ
    let mut samples = Vec::new();
    for (i, a) in paut.iter().enumerate().take(3) {
        let mut s = a.clone();
        if let Some(f) = faut.get(i) {
            s = s.then(f.clone());
        }
        if let Some(d) = delta.get(i % delta.len().max(1)) {
            s = s.then(d.clone());
        }
        samples.push(s);
    }
    let mut ok = true;
    let mut report = Vec::new();
    for s in &samples {
        let Some([phi, alpha, d]) = factor_inertial(g, s)? else {
            ok = false;
            continue;
        };
        let fin = is_finitary(g, &phi)?.finitary;
        let back = equal(g, &phi.clone().then(alpha.clone()).then(d.clone()), s)?;
        ok &= fin && back;
        report.push(json!({ "gamma": s, "finitary": phi, "power": alpha, "delta": d, "ok": fin && back }));
    }
    cert.check("factorization_resamples", ok, Some(json!(report)));
    cert.factor("PAut", paut);
    cert.factor("FAut", faut);
    cert.factor("Delta", delta);
    cert.factor("Sigma", sigma);
    cert.factor("Psi", psi);
    cert.datum("exponent_of_pi", pi.iter().map(|&p| (p, g.exponent(p))).collect::<Vec<_>>());
    Ok(cert)
}
