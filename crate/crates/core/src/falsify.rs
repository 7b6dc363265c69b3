//! Searching for a finitely generated H with (H+Hγ)/H infinite.

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{self, Q, Z};
use crate::autos::normal::active_slots;
use crate::autos::{AutoExpr, NormalForm};
use crate::error::Result;
use crate::group::{Atom, Element, GroupDescriptor, Slot};
use crate::subgroup::{span, Index, Subgroup};

#[derive(Clone, Debug, Serialize)]
pub struct Budget {
    pub trials: usize,
    pub max_gens: usize,
    /// Bound on integer numerators.
    pub coeff: i64,
    /// Bound on the exponent of p in a denominator.
    pub depth: u32,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { trials: 200, max_gens: 3, coeff: 4, depth: 4, seed: 0x1a57 }
    }
}

impl Budget {
    pub fn with_trials(trials: usize) -> Self {
        Budget { trials, ..Budget::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub generators: Vec<Element>,
    /// Zero for the basis trials, then the index of the random trial.
    pub trial: usize,
    pub seed: u64,
}

/// Slots the sampler draws from: the tracked window, one untracked copy of
/// each omega atom, and the Prüfer atoms.
pub fn sample_slots(g: &GroupDescriptor, nf: &NormalForm) -> Vec<Slot> {
    let mut slots = active_slots(g, nf.max_copy);
    for (i, a) in g.atoms.iter().enumerate() {
        match a {
            Atom::Pruefer { .. } => slots.push(Slot::new(i, 0)),
            a if a.is_omega() => slots.push(Slot::new(i, nf.max_copy + 1)),
            _ => {}
        }
    }
    slots.sort();
    slots.dedup();
    slots
}

fn random_coord(g: &GroupDescriptor, s: Slot, b: &Budget, rng: &mut ChaCha8Rng) -> Q {
    let signed = |rng: &mut ChaCha8Rng| Z::from(rng.gen_range(-b.coeff..=b.coeff));
    match *g.atom(s.atom) {
        Atom::Cyclic { p, k } | Atom::CyclicOmega { p, k } => {
            let m = p.saturating_pow(k).min(1 << 20);
            Q::from_integer(Z::from(rng.gen_range(0..m)))
        }
        Atom::FreeZ | Atom::FreeZOmega => Q::from_integer(signed(rng)),
        Atom::Pruefer { p } => {
            let j = rng.gen_range(1..=b.depth);
            let m = p.saturating_pow(j).min(1 << 20);
            Q::new(Z::from(rng.gen_range(0..m)), arith::pow(p, j))
        }
        Atom::LocalizedQ { p } => {
            let j = rng.gen_range(0..=b.depth);
            Q::new(signed(rng), arith::pow(p, j))
        }
    }
}

fn random_element(g: &GroupDescriptor, slots: &[Slot], b: &Budget, rng: &mut ChaCha8Rng) -> Element {
    let dense = slots.len() <= 3;
    let mut coords = Vec::new();
    for &s in slots {
        if dense || rng.gen_bool(0.5) {
            coords.push((s, random_coord(g, s, b, rng)));
        }
    }
    g.element(coords).expect("sampled coordinates are canonical")
}

/// Exact test of one candidate: Infinite index of H in H+Hγ.
pub fn refutes(g: &GroupDescriptor, nf: &NormalForm, gens: &[Element]) -> Result<bool> {
    let h = span(g, gens)?;
    let images: Vec<Element> = gens.iter().map(|x| nf.apply(x)).collect::<Result<_>>()?;
    let k = h.sum(&span(g, &images)?)?;
    Ok(h.index_in(&k)? == Index::Infinite)
}

pub fn inertia_falsify(g: &GroupDescriptor, e: &AutoExpr, budget: &Budget) -> Result<Option<Witness>> {
    e.check(g)?;
    let nf = e.normal_form(g)?;
    let slots = sample_slots(g, &nf);
    if slots.is_empty() {
        return Ok(None);
    }
    let found = |gens: Vec<Element>, trial| Witness { generators: gens, trial, seed: budget.seed };
    // the cyclic subgroups on single coordinates and on pairs of free-type coordinates
    let mut basis: Vec<Vec<Element>> =
        slots.iter().map(|&s| vec![g.generator(s, 1)]).collect();
    let infinite: Vec<Slot> = slots.iter().copied().filter(|s| !g.atom(s.atom).is_torsion()).collect();
    for (i, &a) in infinite.iter().enumerate() {
        for &c in &infinite[i + 1..] {
            for sign in [Z::one(), -Z::one()] {
                let x = g.add_unchecked(&g.generator(a, 1), &g.scale(&g.generator(c, 1), &sign));
                basis.push(vec![x]);
            }
        }
    }
    for gens in basis {
        if refutes(g, &nf, &gens)? {
            return Ok(Some(found(gens, 0)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    for trial in 1..=budget.trials {
        let n = rng.gen_range(1..=budget.max_gens.max(1));
        let gens: Vec<Element> = (0..n)
            .map(|_| random_element(g, &slots, budget, &mut rng))
            .filter(|x| !x.is_zero())
            .collect();
        if gens.is_empty() {
            continue;
        }
        if refutes(g, &nf, &gens)? {
            return Ok(Some(found(gens, trial)));
        }
    }
    Ok(None)
}

/// Re-verifies a witness with the definitional action of γ.
pub fn verify_witness(g: &GroupDescriptor, e: &AutoExpr, gens: &[Element]) -> Result<bool> {
    let (h, k) = with_image(g, e, gens)?;
    Ok(h.index_in(&k)? == Index::Infinite)
}

/// H+Hγ for the subgroup generated by `gens`.
pub fn with_image(g: &GroupDescriptor, e: &AutoExpr, gens: &[Element]) -> Result<(Subgroup, Subgroup)> {
    let h = span(g, gens)?;
    let images: Vec<Element> = gens.iter().map(|x| e.apply(g, x)).collect::<Result<_>>()?;
    let k = h.sum(&span(g, &images)?)?;
    Ok((h, k))
}
