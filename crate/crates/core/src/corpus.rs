//! Random valid automorphism expressions over a fixed family of descriptors.

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::arith::{self, Q, Z};
use crate::autos::{block, AutoExpr, HomData, Source};
use crate::group::{Atom, Element, GroupDescriptor, Slot};

fn d(atoms: Vec<Atom>) -> GroupDescriptor {
    GroupDescriptor::new(atoms).expect("corpus descriptor")
}

/// Descriptors used by the soundness sweeps.
pub fn descriptors() -> Vec<GroupDescriptor> {
    use Atom::*;
    let c = |p, k| Cyclic { p, k };
    let b = |p, k| CyclicOmega { p, k };
    let mut out = vec![
        d(vec![FreeZ]),
        d(vec![LocalizedQ { p: 2 }]),
        d(vec![LocalizedQ { p: 3 }]),
        d(vec![FreeZ, FreeZ]),
        d(vec![FreeZ, c(2, 1), c(3, 1)]),
        d(vec![FreeZOmega]),
        d(vec![FreeZOmega, c(5, 1)]),
        d(vec![c(2, 3), c(2, 1)]),
        d(vec![Pruefer { p: 2 }, Pruefer { p: 2 }]),
        d(vec![Pruefer { p: 2 }, c(2, 2)]),
        d(vec![Pruefer { p: 2 }, b(2, 1)]),
        d(vec![Pruefer { p: 3 }, b(3, 2)]),
        d(vec![b(2, 2)]),
        d(vec![b(3, 1), b(5, 1)]),
        d(vec![c(3, 2), b(3, 1), Pruefer { p: 3 }]),
        d(vec![c(2, 1), LocalizedQ { p: 2 }]),
        d(vec![c(3, 1), LocalizedQ { p: 3 }]),
        d(vec![LocalizedQ { p: 2 }, Pruefer { p: 3 }]),
        d(vec![FreeZ, Pruefer { p: 5 }]),
        d(vec![LocalizedQ { p: 2 }, LocalizedQ { p: 3 }]),
        d(vec![FreeZ, c(5, 1), LocalizedQ { p: 3 }]),
    ];
    for p in [2, 3, 5] {
        out.push(pq(p));
    }
    out
}

/// Z(p^∞) ⊕ Q_(p).
pub fn pq(p: u64) -> GroupDescriptor {
    d(vec![Atom::Pruefer { p }, Atom::LocalizedQ { p }])
}

fn unit_mod(rng: &mut impl Rng, p: u64, bound: i64) -> i64 {
    loop {
        let m = rng.gen_range(1..=bound);
        if m % p as i64 != 0 {
            return if rng.gen_bool(0.3) { -m } else { m };
        }
    }
}

/// A random scalar automorphism of one atom.
pub fn random_scalar(a: &Atom, rng: &mut impl Rng) -> AutoExpr {
    match *a {
        Atom::FreeZ | Atom::FreeZOmega => [AutoExpr::Identity, AutoExpr::Negation].choose(rng).unwrap().clone(),
        Atom::Cyclic { p, k } | Atom::CyclicOmega { p, k } => {
            let top = (p.saturating_pow(k) as i64).clamp(2, 30);
            AutoExpr::padic(p, unit_mod(rng, p, top), 1)
        }
        Atom::Pruefer { p } => {
            let (m, n) = (unit_mod(rng, p, 12), unit_mod(rng, p, 5).abs());
            let g = m.gcd(&n);
            match rng.gen_range(0..4) {
                0 => AutoExpr::Identity,
                1 => AutoExpr::Negation,
                _ => AutoExpr::padic(p, m / g, n / g),
            }
        }
        Atom::LocalizedQ { p } => {
            let s = rng.gen_range(1..=2u32);
            let ps = (p as i64).pow(s);
            match rng.gen_range(0..5) {
                0 => AutoExpr::Identity,
                1 => AutoExpr::Negation,
                2 => AutoExpr::rat(ps, 1),
                3 => AutoExpr::rat(1, ps),
                _ => AutoExpr::rat(-ps, 1),
            }
        }
    }
}

/// One single-atom block per atom.
pub fn random_diagonal(g: &GroupDescriptor, rng: &mut impl Rng) -> AutoExpr {
    AutoExpr::blocks(
        g.atoms.iter().enumerate().map(|(i, a)| block(&[i], random_scalar(a, rng))).collect(),
    )
}

fn slots(g: &GroupDescriptor) -> Vec<Slot> {
    let mut out = Vec::new();
    for (i, a) in g.atoms.iter().enumerate() {
        match a {
            Atom::Pruefer { .. } => out.push(Slot::new(i, 0)),
            a if a.is_omega() => out.extend([Slot::new(i, 0), Slot::new(i, 1)]),
            _ => out.push(Slot::new(i, 0)),
        }
    }
    out
}

/// A random admissible value at `t` for an image of a source at `s`.
fn image_coord(g: &GroupDescriptor, s: Slot, t: Slot, rng: &mut impl Rng) -> Option<Q> {
    let (src, tgt) = (g.atom(s.atom), g.atom(t.atom));
    let v: i64 = rng.gen_range(1..=3);
    match (*src, *tgt) {
        (Atom::Cyclic { p, k } | Atom::CyclicOmega { p, k }, _) => match *tgt {
            Atom::Cyclic { p: q, k: kt } | Atom::CyclicOmega { p: q, k: kt } if q == p => {
                Some(Q::from_integer(Z::from(v) * arith::pow(p, kt.saturating_sub(k))))
            }
            Atom::Pruefer { p: q } if q == p => Some(Q::new(Z::from(v), arith::pow(p, k))),
            _ => None,
        },
        (Atom::LocalizedQ { p }, _) => match tgt.torsion_prime() {
            Some(q) if q != p => Some(match tgt {
                Atom::Pruefer { .. } => Q::new(Z::from(v), Z::from(q)),
                _ => Q::from_integer(Z::from(v)),
            }),
            _ => None,
        },
        (Atom::FreeZ | Atom::FreeZOmega, _) => Some(match tgt {
            Atom::Pruefer { p } => Q::new(Z::from(v), Z::from(*p)),
            Atom::LocalizedQ { p } if rng.gen_bool(0.5) => Q::new(Z::from(v), Z::from(*p)),
            _ => Q::from_integer(Z::from(v)),
        }),
        _ => None,
    }
}

/// A random 1+φ with φ² = 0: sources and targets are disjoint.
pub fn random_nilpotent(g: &GroupDescriptor, rng: &mut impl Rng, free_targets: bool) -> AutoExpr {
    let all = slots(g);
    let mut sources = Vec::new();
    let mut targets = Vec::new();
    for s in all {
        if matches!(g.atom(s.atom), Atom::Pruefer { .. }) || rng.gen_bool(0.5) {
            targets.push(s);
        } else {
            sources.push(s);
        }
    }
    let mut images = Vec::new();
    for &s in &sources {
        let mut coords = Vec::new();
        for &t in &targets {
            if !free_targets && !g.atom(t.atom).is_torsion() {
                continue;
            }
            if rng.gen_bool(0.5) {
                if let Some(x) = image_coord(g, s, t, rng) {
                    coords.push((t, x));
                }
            }
        }
        let img = g.element(coords).unwrap_or_else(|_| Element::zero());
        images.push((s, img));
    }
    let h = HomData::new(Source::Unrestricted, images);
    if h.is_zero() {
        AutoExpr::Identity
    } else {
        AutoExpr::OnePlusHom(h)
    }
}

/// A random valid expression on `g`.
pub fn random_expr(g: &GroupDescriptor, rng: &mut impl Rng) -> AutoExpr {
    for _ in 0..16 {
        let e = match rng.gen_range(0..6) {
            0 => random_diagonal(g, rng),
            1 => random_nilpotent(g, rng, true),
            2 => random_diagonal(g, rng).then(random_nilpotent(g, rng, false)),
            3 => random_nilpotent(g, rng, true).then(random_diagonal(g, rng)),
            4 => random_diagonal(g, rng).then(random_nilpotent(g, rng, true)).inv(),
            _ => [AutoExpr::Identity, AutoExpr::Negation].choose(rng).unwrap().clone(),
        };
        if e.validate(g).valid {
            return e;
        }
    }
    AutoExpr::Identity
}

/// `n` expressions per descriptor, deterministic in the rng.
pub fn corpus(n: usize, rng: &mut impl Rng) -> Vec<(GroupDescriptor, AutoExpr)> {
    let mut out = Vec::new();
    for g in descriptors() {
        for _ in 0..n {
            let e = random_expr(&g, rng);
            out.push((g.clone(), e));
        }
    }
    out
}
