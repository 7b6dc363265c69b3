//! Explicit witnesses: Σ outside the FC-center of FAut, and the coordinate data of
//! the group with Σ ⊄ FAut(A).

use serde::Serialize;

use crate::arith::{self, Q, Z};
use crate::autos::stability::conjugate;
use crate::autos::{equal, AutoExpr, HomData, Source};
use crate::error::{Error, Result};
use crate::group::{Atom, Element, GroupDescriptor, Slot};

#[derive(Clone, Debug, Serialize)]
pub struct FcCenterReport {
    pub group: GroupDescriptor,
    pub sigma: AutoExpr,
    pub conjugates: Vec<AutoExpr>,
    /// For conjugate i, the copy it moves and its image there.
    pub moved: Vec<(usize, Element)>,
    pub pairwise_distinct: bool,
    pub all_finitary: bool,
}

fn swap(g: &GroupDescriptor, atom: usize, i: usize, j: usize) -> AutoExpr {
    if i == j {
        return AutoExpr::Identity;
    }
    let (a, b) = (Slot::new(atom, i), Slot::new(atom, j));
    let d = g.sub_elems(&g.generator(b, 0), &g.generator(a, 0));
    AutoExpr::OnePlusHom(HomData::new(Source::Unrestricted, [(a, d.clone()), (b, g.neg(&d))]))
}

/// On Z(p^∞) ⊕ ⊕_ω Z(p^k): σ moves b_1 by d of order p, γ_i swaps b_1 and b_i; the
/// conjugates σ^{γ_i} (i = 1..=count) move only b_i, so they are pairwise distinct.
pub fn fc_center_witness(p: u64, k: u32, count: usize) -> Result<FcCenterReport> {
    let g = GroupDescriptor::new(vec![Atom::Pruefer { p }, Atom::CyclicOmega { p, k }])?;
    let d = g.generator(Slot::new(0, 0), 1);
    let sigma = AutoExpr::OnePlusHom(HomData::new(Source::Divisible, [(Slot::new(1, 1), d.clone())]));
    sigma.check(&g)?;
    let mut conjugates = Vec::new();
    let mut moved = Vec::new();
    let mut all_finitary = true;
    for i in 1..=count {
        let gi = swap(&g, 1, 1, i);
        gi.check(&g)?;
        let c = conjugate(&sigma, &gi);
        all_finitary &= c.is_finitary(&g)?.finitary && gi.is_finitary(&g)?.finitary;
        let mut hit = None;
        for j in 0..=count + 1 {
            let b = g.generator(Slot::new(1, j), 0);
            let delta = g.sub_elems(&c.apply(&g, &b)?, &b);
            if !delta.is_zero() {
                if hit.is_some() {
                    return Err(Error::Hypothesis(format!("σ^γ_{i} moves more than one copy")));
                }
                hit = Some((j, delta));
            }
        }
        moved.push(hit.ok_or_else(|| Error::Hypothesis(format!("σ^γ_{i} is trivial")))?);
        conjugates.push(c);
    }
    let mut pairwise_distinct = moved.iter().enumerate().all(|(i, (j, _))| *j == i + 1);
    for (i, a) in conjugates.iter().enumerate() {
        for b in &conjugates[i + 1..] {
            pairwise_distinct &= !equal(&g, a, b)?;
        }
    }
    Ok(FcCenterReport { group: g, sigma, conjugates, moved, pairwise_distinct, all_finitary })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoordinateCheck {
    pub p: u64,
    pub d: Element,
    /// p·d_(p) = v − b_p.
    pub identity_holds: bool,
    /// |Hom(A/T, A_p)| found by enumeration.
    pub sigma_component_order: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub primes: Vec<u64>,
    pub group: GroupDescriptor,
    pub v: Element,
    pub coordinates: Vec<CoordinateCheck>,
    pub all_hold: bool,
    /// Each σ_p moves only A_p = ⟨b_p⟩, so it is finitary.
    pub truncated_finitary: bool,
    /// Π_p σ_p has image ⊕_p Z(p), infinite.
    pub product_finitary: bool,
    pub out_of_scope: Vec<String>,
}

/// Σ_p: φ with φ(v) = y and φ(d_(p)) = z in Z(p), subject to p·z = y and
/// q·φ(d_(q)) = y for q ≠ p (always solvable).
fn sigma_component(p: u64, others: &[u64]) -> u64 {
    let mut n = 0;
    for y in 0..p {
        for z in 0..p {
            let ok = (p * z) % p == y && others.iter().all(|&q| (0..p).any(|w| (q * w) % p == y));
            n += ok as u64;
        }
    }
    n
}

/// The coordinate data over the primes ≤ `cutoff`. `zero_b` replaces b_p by 0 on the
/// right of the identity for that prime (a negative control).
pub fn counterexample_witness_with(cutoff: u64, zero_b: Option<u64>) -> Result<CounterexampleReport> {
    if cutoff < 2 {
        return Err(Error::Hypothesis("cutoff must be at least 2".into()));
    }
    let primes = arith::primes_up_to(cutoff);
    let atoms: Vec<Atom> = primes.iter().flat_map(|&p| [Atom::Cyclic { p, k: 1 }, Atom::Cyclic { p, k: 2 }]).collect();
    let g = GroupDescriptor::new(atoms)?;
    let b = |i: usize| g.generator(Slot::new(2 * i, 0), 0);
    let c = |i: usize| g.generator(Slot::new(2 * i + 1, 0), 0);
    let mut v = Element::zero();
    for (i, &p) in primes.iter().enumerate() {
        v = g.add(&v, &g.add(&b(i), &g.scale(&c(i), &Z::from(p)))?)?;
    }
    let mut coordinates = Vec::new();
    for (i, &p) in primes.iter().enumerate() {
        let mut coords = vec![(Slot::new(2 * i + 1, 0), Q::from(Z::from(1)))];
        for (j, &q) in primes.iter().enumerate() {
            if j == i {
                continue;
            }
            let inv_b = arith::mod_inv(&Z::from(p), &Z::from(q)).expect("distinct primes");
            let inv_c = arith::mod_inv(&Z::from(p), &Z::from(q * q)).expect("distinct primes");
            coords.push((Slot::new(2 * j, 0), Q::from(inv_b)));
            coords.push((Slot::new(2 * j + 1, 0), Q::from(inv_c * Z::from(q))));
        }
        let d = g.element(coords)?;
        let bp = if zero_b == Some(p) { Element::zero() } else { b(i) };
        let identity_holds = g.scale(&d, &Z::from(p)) == g.sub_elems(&v, &bp);
        let others: Vec<u64> = primes.iter().copied().filter(|&q| q != p).collect();
        coordinates.push(CoordinateCheck { p, d, identity_holds, sigma_component_order: sigma_component(p, &others) });
    }
    let all_hold = coordinates.iter().all(|c| c.identity_holds && c.sigma_component_order == c.p);
    Ok(CounterexampleReport {
        primes,
        group: g,
        v,
        coordinates,
        all_hold,
        truncated_finitary: true,
        product_finitary: false,
        out_of_scope: vec![
            "A/T ≅ ⟨1/p : p prime⟩ ≤ Q".into(),
            "Σ ≅ Π_p Z(p) over all primes".into(),
            "Σ ∩ FAut(A) = T(Σ)".into(),
        ],
    })
}

pub fn counterexample_witness(cutoff: u64) -> Result<CounterexampleReport> {
    counterexample_witness_with(cutoff, None)
}
