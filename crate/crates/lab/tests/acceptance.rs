//! Acceptance criteria, one PASS/FAIL line each. Runs without the test harness so the
//! lines always reach the output.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use iaut::arith::{qi, z};
use iaut::autos::stability::{power_closed_form, twisted_hom};
use iaut::autos::equal;
use iaut::decomp::{self, pgroup, CofiniteSubgroup, WINDOW};
use iaut::{
    block, conjugate, corpus, hom_to_stab, inertia_falsify, is_inertial, stab_to_hom, Atom, AutoExpr, Budget, Element,
    GroupDescriptor, HomData, Slot, Source, Status,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn g(atoms: Vec<Atom>) -> GroupDescriptor {
    GroupDescriptor::new(atoms).unwrap()
}

/// Window elements with small coordinates, used for pointwise comparison.
fn probes(a: &GroupDescriptor, copies: usize) -> Vec<Element> {
    let slots = iaut::autos::normal::active_slots(a, copies);
    let mut out: Vec<Element> = slots.iter().map(|&s| a.generator(s, 1)).collect();
    let mut mix = Element::zero();
    for (k, &s) in slots.iter().enumerate() {
        mix = a.add(&mix, &a.scale(&a.generator(s, 2), &z(k as i64 + 1))).unwrap();
    }
    out.push(mix);
    out
}

fn soundness_sweep() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let items = corpus::corpus(25, &mut rng);
    let descriptors = corpus::descriptors().len();
    ensure(items.len() >= 500 && descriptors >= 20, || format!("{} expressions over {descriptors} descriptors", items.len()))?;
    let budget = Budget::with_trials(200);
    let mut inertial = 0;
    for (a, e) in &items {
        let v = is_inertial(a, e).map_err(|x| x.to_string())?;
        if v.status == Status::Inertial {
            inertial += 1;
            if let Some(w) = inertia_falsify(a, e, &budget).map_err(|x| x.to_string())? {
                return Err(format!("INERTIAL verdict falsified on {a}: {} with {:?}", e.to_json(), w.generators));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 300.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{} expressions, {descriptors} descriptors, {inertial} INERTIAL, none falsified, {secs:.1}s", items.len()))
}

fn few_automorphisms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let mut counts = (0, 0);
    for p in [2, 3, 5] {
        let a = corpus::pq(p);
        for e in [AutoExpr::Identity, AutoExpr::Negation] {
            ensure(is_inertial(&a, &e).map_err(|x| x.to_string())?.is_inertial(), || format!("±1 not INERTIAL on p = {p}"))?;
        }
        for _ in 0..60 {
            let e = corpus::random_expr(&a, &mut rng);
            let pm = equal(&a, &e, &AutoExpr::Identity).unwrap() || equal(&a, &e, &AutoExpr::Negation).unwrap();
            let v = is_inertial(&a, &e).map_err(|x| x.to_string())?;
            if pm {
                ensure(v.is_inertial(), || format!("{} is ±1 but not INERTIAL", e.to_json()))?;
                counts.0 += 1;
                continue;
            }
            let refuted = v.status == Status::NotInertial
                || inertia_falsify(&a, &e, &Budget::with_trials(200)).map_err(|x| x.to_string())?.is_some();
            ensure(refuted, || format!("{} on p = {p} is neither refuted nor ±1", e.to_json()))?;
            counts.1 += 1;
        }
    }
    Ok(format!("{} samples equal to ±1 INERTIAL, {} others refuted", counts.0, counts.1))
}

fn intersection_order() -> Outcome {
    let mut seen = Vec::new();
    for (p, a, e) in [(2u64, 3u32, 2u32), (3, 2, 1)] {
        let b = g(vec![Atom::Cyclic { p, k: a }, Atom::CyclicOmega { p, k: e }]);
        let c = decomp::pgroup_decompose(&b).map_err(|x| x.to_string())?;
        let want = p.pow(a - e);
        ensure(c.data["intersection_order"] == want, || format!("p = {p}: got {}, want {want}", c.data["intersection_order"]))?;
        ensure(c.all_pass(), || format!("p = {p}: checklist fails"))?;
        seen.push(format!("{p}^{}={want}", a - e));
    }
    Ok(seen.join(", "))
}

fn delta_conjugation() -> Outcome {
    let a = g(vec![Atom::Pruefer { p: 2 }, Atom::CyclicOmega { p: 2, k: 2 }]);
    let gens = pgroup::sigma_generators(&a, WINDOW);
    let pts = probes(&a, WINDOW + 1);
    let mut checked = 0;
    for n in [3i64, 5, 7] {
        let d = pgroup::delta(&a, 2, n);
        for (_, phi) in &gens {
            let sigma = hom_to_stab(phi);
            let conj = conjugate(&sigma, &d);
            let closed = power_closed_form(&a, phi, &qi(n)).map_err(|x| x.to_string())?;
            ensure(equal(&a, &conj, &sigma.power(n)).unwrap(), || format!("n = {n}: σ^δ ≠ σ^n"))?;
            let h1 = stab_to_hom(&a, &conj, &Source::Divisible).map_err(|x| x.to_string())?;
            let h2 = stab_to_hom(&a, &closed, &Source::Divisible).map_err(|x| x.to_string())?;
            ensure(h1.normalized(&a).unwrap() == h2.normalized(&a).unwrap(), || format!("n = {n}: homomorphisms differ"))?;
            for x in &pts {
                ensure(conj.apply(&a, x).unwrap() == closed.apply(&a, x).unwrap(), || format!("n = {n}: differ at {x}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (n, σ) pairs over {} generators", gens.len()))
}

fn random_stab(a: &GroupDescriptor, rng: &mut ChaCha8Rng) -> HomData {
    let images = [1, 2].map(|i| (Slot::new(i, 0), a.element([(Slot::new(0, 0), qi(rng.gen_range(0..9)))]).unwrap()));
    HomData::new(Source::Torsion, images)
}

fn random_aut(a: &GroupDescriptor, rng: &mut ChaCha8Rng) -> AutoExpr {
    let units = [1i64, 2, 4, 5, 7, 8];
    let mut e = AutoExpr::blocks(vec![block(&[0], AutoExpr::padic(3, units[rng.gen_range(0..6)], 1))]);
    for _ in 0..rng.gen_range(1..=3) {
        let (src, dst) = if rng.gen_bool(0.5) { (1, 2) } else { (2, 1) };
        let k = rng.gen_range(-2..=2);
        let h = HomData::new(Source::Unrestricted, [(Slot::new(src, 0), a.element([(Slot::new(dst, 0), qi(k))]).unwrap())]);
        e = e.then(AutoExpr::OnePlusHom(h));
    }
    if rng.gen_bool(0.5) {
        e = e.then(AutoExpr::blocks(vec![block(&[1], AutoExpr::Negation)]));
    }
    if rng.gen_bool(0.5) {
        let t = a.element([(Slot::new(0, 0), qi(rng.gen_range(1..9)))]).unwrap();
        e = e.then(AutoExpr::OnePlusHom(HomData::new(Source::Unrestricted, [(Slot::new(2, 0), t)])));
    }
    e
}

fn fact_isomorphism() -> Outcome {
    let a = g(vec![Atom::Cyclic { p: 3, k: 2 }, Atom::FreeZ, Atom::FreeZ]);
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let pts = probes(&a, 1);
    for k in 0..100 {
        let (phi, psi) = (random_stab(&a, &mut rng), random_stab(&a, &mut rng));
        let prod = hom_to_stab(&phi).then(hom_to_stab(&psi));
        let h = stab_to_hom(&a, &prod, &Source::Torsion).map_err(|x| x.to_string())?;
        ensure(h == phi.plus(&a, &psi), || format!("pair {k}: additivity fails"))?;

        let gamma = random_aut(&a, &mut rng);
        ensure(gamma.validate(&a).valid, || format!("pair {k}: invalid γ"))?;
        let conj = conjugate(&hom_to_stab(&phi), &gamma);
        let law = twisted_hom(&a, &phi, &gamma, &gamma).map_err(|x| x.to_string())?;
        ensure(stab_to_hom(&a, &conj, &Source::Torsion).map_err(|x| x.to_string())? == law, || format!("pair {k}: module law fails"))?;
        let inv = gamma.inverse(&a).unwrap();
        for x in &pts {
            let lhs = a.sub_elems(&conj.apply(&a, x).unwrap(), x);
            let rhs = gamma.apply(&a, &phi.eval(&a, &inv.apply(&a, x).unwrap()).unwrap()).unwrap();
            ensure(lhs == rhs, || format!("pair {k}: pointwise module law fails at {x}"))?;
        }
    }
    Ok("100 pairs, additivity and module law exact".into())
}

fn theorem_b_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let samples = lab::scenario::theorem_b_samples(&mut rng, 100);
    ensure(samples.len() == 100, || format!("only {} inertial samples", samples.len()))?;
    let mut seen: Vec<(GroupDescriptor, AutoExpr, AutoExpr)> = Vec::new();
    for (k, (a, e)) in samples.iter().enumerate() {
        let f = decomp::theorem_b_factor(a, e).map_err(|x| format!("sample {k}: {x}"))?;
        for id in ["product", "product_pointwise", "gamma1_trivial_mod_T", "gamma1_inertial", "unique"] {
            ensure(f.certificate.item(id).is_some_and(|i| i.pass), || format!("sample {k}: {id} fails"))?;
        }
        for x in probes(a, 1) {
            let y = f.gamma0.apply(a, &f.gamma1.apply(a, &x).unwrap()).unwrap();
            ensure(y == e.apply(a, &x).unwrap(), || format!("sample {k}: γ1∘γ0 ≠ γ at {x}"))?;
        }
        for (b, e2, g0) in &seen {
            if b == a && equal(a, e, e2).unwrap() {
                ensure(equal(a, &f.gamma0, g0).unwrap(), || format!("sample {k}: two factorizations"))?;
            }
        }
        seen.push((a.clone(), e.clone(), f.gamma0.clone()));
    }
    Ok("100 factorizations round-trip".into())
}

fn split_bounded() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for k in 0..50 {
        let (b, b0) = lab::scenario::random_split_case(&mut rng);
        let s = decomp::split_bounded(&b, &b0).map_err(|x| format!("case {k}: {x}"))?;
        ensure(s.direct, || format!("case {k}: not direct"))?;
        let meet = s.b1.inner.intersection(&s.b2).unwrap();
        ensure(meet.is_zero(), || format!("case {k}: B1 ∩ B2 ≠ 0"))?;
        let whole = CofiniteSubgroup::whole(&b, b0.max_copy).unwrap();
        let orders = (s.b1.inner.order().unwrap(), s.b2.order().unwrap(), whole.inner.order().unwrap());
        ensure(&orders.0 * &orders.1 == orders.2, || format!("case {k}: |B1||B2| ≠ |B|"))?;
        for x in b0.inner.generators() {
            ensure(s.b1.contains(x), || format!("case {k}: B0 ⊄ B1"))?;
        }
        for x in whole.inner.generators() {
            ensure(s.b1.inner.sum(&s.b2).unwrap().contains(x), || format!("case {k}: {x} not in B1+B2"))?;
        }
    }
    Ok("50 cases direct".into())
}

fn non_nilpotency() -> Outcome {
    let a = g(vec![Atom::Pruefer { p: 3 }, Atom::FreeZ]);
    let (_, _, alpha, _) = decomp::theorem_c::mu(&a).ok_or("no μ")?;
    ensure(alpha == 2, || format!("μ uses {alpha}"))?;
    for s in 1..=2 {
        for n in 1..=6 {
            let w = decomp::non_nilpotency_witness(&a, s, n).map_err(|x| x.to_string())?;
            ensure(w.as_ref().is_some_and(|x| !x.is_zero()), || format!("s = {s}, n = {n}: zero"))?;
        }
    }
    Ok("12 nonzero witnesses".into())
}

fn counterexample() -> Outcome {
    let out = lab::run_command(["lab", "scenario", "run", "counterexample", "--primes", "13", "--format", "json"]);
    ensure(out.code == 0, || format!("exit {}", out.code))?;
    let v: Value = serde_json::from_str(&out.stdout).map_err(|x| x.to_string())?;
    let mut primes = Vec::new();
    for a in v["assertions"].as_array().unwrap() {
        let id = a["id"].as_str().unwrap();
        if id.ends_with("/identity") {
            ensure(a["pass"] == true, || format!("{id} fails"))?;
            primes.push(id.split('/').nth(1).unwrap().trim_start_matches('p').trim_start_matches('0').to_string());
        }
    }
    ensure(primes == ["2", "3", "5", "7", "11", "13"], || format!("primes {primes:?}"))?;
    Ok(format!("p·d_(p) = v − b_p at p = {}", primes.join(", ")))
}

fn determinism() -> Outcome {
    let args = ["lab", "scenario", "suite", "--format", "json", "--seed", "0"];
    let a = lab::run_command(args);
    let b = lab::run_command(args);
    ensure(a.code == 0, || format!("suite exit {}", a.code))?;
    ensure(a.stdout == b.stdout, || "reports differ".into())?;
    Ok(format!("{} bytes identical", a.stdout.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("inertia soundness sweep", soundness_sweep),
        ("Z(p^∞)⊕Q_(p) has only ±1", few_automorphisms),
        ("PAut ∩ FAut order", intersection_order),
        ("δ_n conjugation is the n-th power", delta_conjugation),
        ("stability module isomorphism", fact_isomorphism),
        ("inertial factorization round trip", theorem_b_round_trip),
        ("bounded splitting", split_bounded),
        ("non-nilpotency witness", non_nilpotency),
        ("counterexample coordinates", counterexample),
        ("deterministic suite", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        match r {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
