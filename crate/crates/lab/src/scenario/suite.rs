use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use iaut::autos::equal;
use iaut::decomp::{self, CofiniteSubgroup, Certificate};
use iaut::{corpus, inertia_falsify, is_inertial, Atom, AutoExpr, Budget, GroupDescriptor, Result, Status};

use super::Provenance::{Derived, Paper, Trivial};
use super::{samples, Ctx, Params, Scenario};

pub(super) static SUITE: &[Scenario] = &[
    Scenario { name: "counterexample", about: "p·d_(p) = v − b_p at every prime up to --primes", run: counterexample },
    Scenario { name: "critical-pgroup", about: "checklist of the critical p-group certificate", run: critical_pgroup },
    Scenario { name: "fc-center", about: "--budget pairwise distinct conjugates of one σ", run: fc_center },
    Scenario { name: "few-automorphisms", about: "only ±1 are inertial on Z(p^∞)⊕Q_(p)", run: few_automorphisms },
    Scenario { name: "non-nilpotent", about: "Σ(μ^s−1)^n ≠ 0 on Z(3^∞)⊕Z", run: non_nilpotent },
    Scenario { name: "split-bounded", about: "B = B1 ⊕ B2 with B2 finite and B1 ⊇ B0", run: split_bounded },
    Scenario { name: "theorem-a", about: "IAut = PAut·FAut·Δ for periodic groups", run: theorem_a },
    Scenario { name: "theorem-b-factor", about: "γ = γ1·γ0 round trips", run: theorem_b },
    Scenario { name: "theorem-c", about: "IAut₁ = Σ⋊Γ₁ and faithfulness of the action", run: theorem_c },
];

fn g(atoms: Vec<Atom>) -> GroupDescriptor {
    GroupDescriptor::new(atoms).unwrap()
}

/// One assertion per checklist item.
fn checklist(ctx: &mut Ctx, id: &str, op: &str, c: &Certificate, cited: &[&str]) {
    for item in &c.checklist {
        let tag = if cited.contains(&item.id.as_str()) { Paper } else { Derived };
        let evidence = item.witness.clone().unwrap_or(json!(item.pass));
        ctx.holds(&format!("{id}/{}", item.id), op, "pass", Ok((item.pass, evidence)), tag);
    }
}

fn counterexample(p: &Params, ctx: &mut Ctx) -> Result<()> {
    let cutoff = p.primes.unwrap_or(5);
    ctx.param("primes", cutoff);
    let r = decomp::counterexample_witness(cutoff)?;
    ctx.setup("group", &r.group);
    ctx.setup("v", &r.v);
    ctx.setup("out_of_scope", &r.out_of_scope);
    for c in &r.coordinates {
        let q = c.p;
        ctx.holds(&format!("p{q:03}/identity"), "counterexample_witness", "p·d_(p) = v − b_p", Ok((c.identity_holds, json!({ "d": c.d }))), Paper);
        ctx.eq(&format!("p{q:03}/sigma-component"), "counterexample_witness", q, Ok(c.sigma_component_order), Derived);
    }
    ctx.eq("truncated-finitary", "counterexample_witness", true, Ok(r.truncated_finitary), Derived);
    ctx.eq("product-finitary", "counterexample_witness", false, Ok(r.product_finitary), Derived);
    let neg = decomp::counterexample_witness_with(cutoff, Some(2))?;
    ctx.eq("negative-control", "counterexample_witness", false, Ok(neg.coordinates[0].identity_holds), Trivial);
    Ok(())
}

fn critical_pgroup(_: &Params, ctx: &mut Ctx) -> Result<()> {
    let groups = [
        ("z2inf-z4omega", g(vec![Atom::Pruefer { p: 2 }, Atom::CyclicOmega { p: 2, k: 2 }])),
        ("z3inf-z3omega-z9", g(vec![Atom::Pruefer { p: 3 }, Atom::CyclicOmega { p: 3, k: 1 }, Atom::Cyclic { p: 3, k: 2 }])),
    ];
    for (label, a) in groups {
        ctx.setup(label, &a);
        let c = decomp::pgroup_decompose(&a)?;
        ctx.eq(&format!("{label}/exp-sigma"), "pgroup_decompose", c.data["m_prime"].clone(), Ok(c.data["exp_sigma"].clone()), Paper);
        ctx.eq(&format!("{label}/eexp-sigma"), "pgroup_decompose", c.data["e_prime"].clone(), Ok(c.data["eexp_sigma"].clone()), Paper);
        checklist(ctx, label, "pgroup_decompose", &c, &["delta_conjugation_is_power", "phi_delta_commute"]);
    }
    Ok(())
}

fn fc_center(p: &Params, ctx: &mut Ctx) -> Result<()> {
    let n = p.budget.unwrap_or(5);
    ctx.param("budget", n);
    let r = decomp::fc_center_witness(2, 2, n)?;
    ctx.setup("group", &r.group);
    ctx.setup("sigma", &r.sigma);
    ctx.eq("count", "fc_center_witness", n, Ok(r.conjugates.len()), Trivial);
    ctx.eq("pairwise-distinct", "fc_center_witness", true, Ok(r.pairwise_distinct), Paper);
    ctx.eq("finitary", "fc_center_witness", true, Ok(r.all_finitary), Derived);
    for (i, (j, img)) in r.moved.iter().enumerate() {
        let ok = *j == i + 1;
        ctx.holds(&format!("conjugate-{:02}", i + 1), "fc_center_witness", "moves only b_i", Ok((ok, json!({ "copy": j, "image": img }))), Paper);
    }
    Ok(())
}

fn few_automorphisms(p: &Params, ctx: &mut Ctx) -> Result<()> {
    let n = p.budget.unwrap_or(12);
    ctx.param("budget", n);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut groups: Vec<(String, GroupDescriptor)> = [2, 3, 5].iter().map(|&q| (format!("pq{q}"), corpus::pq(q))).collect();
    groups.push(("pq2-squared".into(), g(vec![Atom::Pruefer { p: 2 }, Atom::Pruefer { p: 2 }, Atom::LocalizedQ { p: 2 }])));
    for (label, a) in &groups {
        ctx.setup(label, a);
        for (name, e) in [("plus-one", AutoExpr::Identity), ("minus-one", AutoExpr::Negation)] {
            ctx.eq(&format!("{label}/{name}"), "is_inertial", Status::Inertial, is_inertial(a, &e).map(|v| v.status), Paper);
        }
        let f = decomp::theorem_b_factor(a, &AutoExpr::Negation);
        ctx.eq(&format!("{label}/iaut1-trivial"), "theorem_b_factor", true, f.and_then(|f| f.gamma1.is_identity(a)), Paper);
        for k in 0..n {
            let e = corpus::random_expr(a, &mut rng);
            let id = format!("{label}/sample-{k:03}");
            let r = (|| -> Result<(bool, serde_json::Value)> {
                let pm = equal(a, &e, &AutoExpr::Identity)? || equal(a, &e, &AutoExpr::Negation)?;
                let v = is_inertial(a, &e)?;
                if pm {
                    return Ok((v.is_inertial(), json!({ "expr": e, "verdict": v.status, "plus_minus_one": true })));
                }
                let refuted = match v.status {
                    Status::NotInertial => true,
                    _ => inertia_falsify(a, &e, &Budget::with_trials(200))?.is_some(),
                };
                Ok((refuted, json!({ "expr": e, "verdict": v.status })))
            })();
            ctx.holds(&id, "is_inertial", "INERTIAL exactly for ±1", r, Paper);
        }
    }
    Ok(())
}

fn non_nilpotent(p: &Params, ctx: &mut Ctx) -> Result<()> {
    let (n, s) = (p.n.unwrap_or(4), p.s.unwrap_or(2));
    ctx.param("n", n);
    ctx.param("s", s);
    let a = g(vec![Atom::Pruefer { p: 3 }, Atom::FreeZ]);
    ctx.setup("group", &a);
    ctx.setup("mu", decomp::theorem_c::mu(&a).map(|m| m.3));
    for si in 1..=s {
        for ni in 1..=n {
            let w = decomp::non_nilpotency_witness(&a, si, ni).map(|w| {
                let ok = w.as_ref().is_some_and(|x| !x.is_zero());
                (ok, json!(w))
            });
            ctx.holds(&format!("s{si}/n{ni:02}"), "non_nilpotency_witness", "nonzero element", w, Derived);
        }
    }
    Ok(())
}

fn split_one(ctx: &mut Ctx, id: &str, b: &GroupDescriptor, b0: &CofiniteSubgroup, tag: super::Provenance) {
    let r = decomp::split_bounded(b, b0).map(|s| {
        let ok = s.direct && b0.inner.generators().iter().all(|x| s.b1.contains(x)) && s.b2.order().is_some();
        (ok, json!({ "group": b, "b0": b0, "split": s }))
    });
    ctx.holds(id, "split_bounded", "direct, B2 finite, B1 ⊇ B0", r, tag);
}

fn split_bounded(p: &Params, ctx: &mut Ctx) -> Result<()> {
    let n = p.budget.unwrap_or(10);
    ctx.param("budget", n);
    let b = g(vec![Atom::CyclicOmega { p: 2, k: 1 }]);
    let el = |c: &[(usize, usize)]| b.element(c.iter().map(|&(i, j)| (iaut::Slot::new(i, j), iaut::arith::qi(1)))).unwrap();
    let b0 = CofiniteSubgroup::new(&b, 3, &[el(&[(0, 0), (0, 1)]), el(&[(0, 2)]), el(&[(0, 3)])])?;
    split_one(ctx, "kernel-of-sum", &b, &b0, Derived);
    ctx.eq("kernel-of-sum/b2-order", "split_bounded", "2", decomp::split_bounded(&b, &b0).map(|s| s.b2_order.to_string()), Derived);
    let whole = CofiniteSubgroup::whole(&b, 3)?;
    ctx.eq("whole/b2-order", "split_bounded", "1", decomp::split_bounded(&b, &whole).map(|s| s.b2_order.to_string()), Trivial);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for k in 0..n {
        let (b, b0) = samples::random_split_case(&mut rng);
        split_one(ctx, &format!("random-{k:03}"), &b, &b0, Derived);
    }
    Ok(())
}

fn theorem_a(_: &Params, ctx: &mut Ctx) -> Result<()> {
    let cases = [
        ("z2-z9", g(vec![Atom::Cyclic { p: 2, k: 1 }, Atom::Cyclic { p: 3, k: 2 }]), json!([2, 3]), Trivial),
        ("z2omega-z3inf", g(vec![Atom::CyclicOmega { p: 2, k: 1 }, Atom::Pruefer { p: 3 }]), json!([2, 3]), Paper),
        ("critical2-z3", g(vec![Atom::Pruefer { p: 2 }, Atom::CyclicOmega { p: 2, k: 2 }, Atom::Cyclic { p: 3, k: 1 }]), json!([3]), Derived),
    ];
    for (label, a, pi, tag) in cases {
        ctx.setup(label, &a);
        let c = decomp::periodic_decompose(&a)?;
        ctx.eq(&format!("{label}/pi"), "periodic_decompose", pi, Ok(c.data["pi"].clone()), tag);
        let critical = a.primes().into_iter().any(|q| a.is_critical(q));
        ctx.eq(&format!("{label}/delta-trivial"), "periodic_decompose", !critical, Ok(c.factors["Delta"].is_empty()), tag);
        checklist(ctx, label, "periodic_decompose", &c, &[]);
    }
    Ok(())
}

fn theorem_b(p: &Params, ctx: &mut Ctx) -> Result<()> {
    let n = p.budget.unwrap_or(20);
    ctx.param("budget", n);
    let a = g(vec![Atom::Cyclic { p: 3, k: 1 }, Atom::LocalizedQ { p: 3 }]);
    let g3 = decomp::gamma_p(&a, 3)?;
    let f = decomp::theorem_b_factor(&a, &g3.power(2))?;
    ctx.eq("gamma3-squared/gamma1", "theorem_b_factor", true, f.gamma1.is_identity(&a), Trivial);
    ctx.eq("gamma3-squared/gamma0", "theorem_b_factor", true, equal(&a, &f.gamma0, &g3.power(2)), Trivial);
    let z = g(vec![Atom::FreeZ]);
    let f = decomp::theorem_b_factor(&z, &AutoExpr::Negation)?;
    ctx.eq("negation-on-z/gamma0", "theorem_b_factor", AutoExpr::Negation, Ok(f.gamma0), Trivial);
    let e = AutoExpr::blocks(vec![iaut::block(&[0], AutoExpr::padic(3, 2, 1)), iaut::block(&[1], AutoExpr::rat(3, 1))]);
    let f = decomp::theorem_b_factor(&a, &e)?;
    let want = AutoExpr::blocks(vec![iaut::block(&[0], AutoExpr::padic(3, 2, 1))]);
    ctx.eq("power2-times-3/gamma1", "theorem_b_factor", true, equal(&a, &f.gamma1, &want), Derived);
    ctx.eq("power2-times-3/gamma0", "theorem_b_factor", true, equal(&a, &f.gamma0, &g3), Derived);

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for (k, (a, e)) in samples::theorem_b_samples(&mut rng, n).into_iter().enumerate() {
        let r = decomp::theorem_b_factor(&a, &e).map(|f| (f.certificate.all_pass(), json!({ "group": a, "gamma": e, "factorization": f })));
        ctx.holds(&format!("random-{k:03}"), "theorem_b_factor", "γ1∘γ0 = γ, γ1 trivial on A/T, unique", r, Derived);
    }
    Ok(())
}

fn theorem_c(_: &Params, ctx: &mut Ctx) -> Result<()> {
    let a = g(vec![Atom::Cyclic { p: 2, k: 2 }, Atom::Cyclic { p: 3, k: 1 }, Atom::LocalizedQ { p: 2 }]);
    ctx.setup("z12-q2", &a);
    let c = decomp::theorem_c_split(&a)?;
    ctx.eq("z12-q2/faithful", "theorem_c_split", false, Ok(c.data["faithful"].clone()), Paper);
    ctx.eq("z12-q2/sigma-order", "theorem_c_split", "3", Ok(c.data["sigma_order"].clone()), Paper);
    ctx.eq("z12-q2/phi1-order", "theorem_c_split", 4, Ok(c.data["phi1_order"].clone()), Paper);
    checklist(ctx, "z12-q2", "theorem_c_split", &c, &[]);
    let a = g(vec![Atom::Pruefer { p: 3 }, Atom::FreeZ]);
    ctx.setup("z3inf-z", &a);
    let c = decomp::theorem_c_split(&a)?;
    ctx.eq("z3inf-z/faithful", "theorem_c_split", true, Ok(c.data["faithful"].clone()), Paper);
    checklist(ctx, "z3inf-z", "theorem_c_split", &c, &["non_nilpotent"]);
    let a = g(vec![Atom::Cyclic { p: 2, k: 1 }, Atom::FreeZ]);
    ctx.setup("z2-z", &a);
    let c = decomp::theorem_c_split(&a)?;
    ctx.eq("z2-z/sigma-order", "theorem_c_split", "2", Ok(c.data["sigma_order"].clone()), Derived);
    checklist(ctx, "z2-z", "theorem_c_split", &c, &[]);
    Ok(())
}
