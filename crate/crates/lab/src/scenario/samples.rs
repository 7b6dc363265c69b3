use rand::seq::SliceRandom;
use rand::Rng;

use iaut::decomp::CofiniteSubgroup;
use iaut::{arith, block, hom_to_stab, is_inertial, AutoExpr, Atom, Element, GroupDescriptor, HomData, Index, Slot, Source};

fn pair(a: AutoExpr, b: AutoExpr) -> AutoExpr {
    AutoExpr::blocks(vec![block(&[0], a), block(&[1], b)])
}

fn signed_power(p: i64, s: i32, negative: bool) -> AutoExpr {
    let sign = if negative { -1 } else { 1 };
    let k = p.pow(s.unsigned_abs());
    if s >= 0 {
        AutoExpr::rat(sign * k, 1)
    } else {
        AutoExpr::rat(sign, k)
    }
}

fn on_z3_q3(rng: &mut impl Rng) -> AutoExpr {
    let t = if rng.gen_bool(0.5) { AutoExpr::Identity } else { AutoExpr::padic(3, 2, 1) };
    pair(t, signed_power(3, rng.gen_range(-3..=3), rng.gen_bool(0.5)))
}

fn on_pruefer5_z(g: &GroupDescriptor, rng: &mut impl Rng) -> AutoExpr {
    let units = [1i64, 2, 3, 4, 6, 7, 8, 9, 11, 12];
    let u = *units.choose(rng).unwrap();
    let v = *units.choose(rng).unwrap();
    let free = if rng.gen_bool(0.5) { AutoExpr::Identity } else { AutoExpr::Negation };
    let gamma = pair(AutoExpr::padic(5, u, v), free);
    let img = g.element([(Slot::new(0, 0), arith::q(rng.gen_range(1..25), 5i64.pow(rng.gen_range(1..=3))))]).unwrap();
    let sigma = hom_to_stab(&HomData::new(Source::Torsion, [(Slot::new(1, 0), img)]));
    match rng.gen_range(0..3) {
        0 => gamma,
        1 => gamma.then(sigma),
        _ => sigma.then(gamma),
    }
}

/// Inertial automorphisms of Z(3)⊕Q_(3) and Z(5^∞)⊕Z, alternating.
pub fn theorem_b_samples(rng: &mut impl Rng, n: usize) -> Vec<(GroupDescriptor, AutoExpr)> {
    let a = GroupDescriptor::new(vec![Atom::Cyclic { p: 3, k: 1 }, Atom::LocalizedQ { p: 3 }]).unwrap();
    let b = GroupDescriptor::new(vec![Atom::Pruefer { p: 5 }, Atom::FreeZ]).unwrap();
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < n && tries < 20 * n {
        tries += 1;
        let (g, e) = if out.len() % 2 == 0 { (a.clone(), on_z3_q3(rng)) } else { (b.clone(), on_pruefer5_z(&b, rng)) };
        if e.validate(&g).valid && is_inertial(&g, &e).is_ok_and(|v| v.is_inertial()) {
            out.push((g, e));
        }
    }
    out
}

/// A bounded B and a subgroup B0 of index at most 64 in the window.
pub fn random_split_case(rng: &mut impl Rng) -> (GroupDescriptor, CofiniteSubgroup) {
    loop {
        let n = rng.gen_range(1..=2);
        let atoms: Vec<Atom> = (0..n)
            .map(|_| {
                let p = *[2u64, 3].choose(rng).unwrap();
                let k = rng.gen_range(1..=2);
                if rng.gen_bool(0.5) {
                    Atom::CyclicOmega { p, k }
                } else {
                    Atom::Cyclic { p, k }
                }
            })
            .collect();
        let g = GroupDescriptor::new(atoms).unwrap();
        let max_copy = rng.gen_range(0..=2);
        let slots: Vec<Slot> = (0..g.len())
            .flat_map(|i| {
                let c = if g.atom(i).is_omega() { max_copy + 1 } else { 1 };
                (0..c).map(move |j| Slot::new(i, j))
            })
            .collect();
        let gens: Vec<Element> = (0..rng.gen_range(0..=slots.len() + 1))
            .map(|_| {
                let coords: Vec<(Slot, _)> = slots.iter().map(|&s| (s, arith::qi(rng.gen_range(0..9)))).collect();
                g.element(coords).unwrap()
            })
            .collect();
        let b0 = CofiniteSubgroup::new(&g, max_copy, &gens).unwrap();
        match b0.index(&g) {
            Ok(Index::Finite(k)) if k <= 64.into() => return (g, b0),
            _ => continue,
        }
    }
}
