//! Deciding whether an automorphism is inertial, i.e. H and Hγ are
//! commensurable for every subgroup H.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{self, Q, Z};
use crate::autos::multiplier::{deviation, finite_index, Deviation};
use crate::autos::{AutoExpr, NormalForm};
use crate::error::Result;
use crate::group::{Atom, Element, GroupDescriptor, NatInf, Slot};
use crate::subgroup::span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Inertial,
    NotInertial,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Inertial => "INERTIAL",
            Status::NotInertial => "NOT_INERTIAL",
            Status::Unknown => "UNKNOWN",
        })
    }
}

fn ser_q<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    arith::ser::q(x, s)
}

/// Certificate for one primary component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum PrimaryCert {
    /// The component is finite.
    Finite,
    /// γ = α on a subgroup of finite index.
    Power {
        #[serde(serialize_with = "ser_q")]
        alpha: Q,
    },
    /// Critical group: γ = α on D and γ = β on A₁/D.
    Critical {
        #[serde(serialize_with = "ser_q")]
        alpha: Q,
        #[serde(serialize_with = "ser_q")]
        beta: Q,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Certificate {
    FiniteGroup,
    Finitary {
        #[serde(serialize_with = "arith::ser::z")]
        image_order: Z,
    },
    /// r0 = ∞: γ = m on a subgroup of finite index.
    IntegerMultiple {
        m: i64,
        #[serde(serialize_with = "arith::ser::z")]
        exponent: Z,
        #[serde(serialize_with = "arith::ser::z")]
        index: Z,
    },
    /// 0 < r0 < ∞: γ = m/n on V with A/V periodic, A_π bounded, and γ
    /// inertial on A/V.
    Multiplication {
        #[serde(serialize_with = "ser_q")]
        multiplier: Q,
        pi: Vec<u64>,
        v: Vec<Element>,
        quotient: BTreeMap<u64, PrimaryCert>,
    },
    /// Periodic: inertial on every primary component.
    Periodic { components: BTreeMap<u64, PrimaryCert> },
    Primary(PrimaryCert),
}

impl Certificate {
    pub fn tag(&self) -> &'static str {
        match self {
            Certificate::FiniteGroup => "finite",
            Certificate::Finitary { .. } => "finitary",
            Certificate::IntegerMultiple { .. } => "recalls-1",
            Certificate::Multiplication { .. } => "recalls-2",
            Certificate::Periodic { .. } => "recalls-3",
            Certificate::Primary(_) => "recalls-4",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub case: String,
    pub certificate: Option<Certificate>,
    pub violated: Option<String>,
    pub counterwitness: Option<Vec<Element>>,
}

impl Verdict {
    fn yes(c: Certificate) -> Verdict {
        Verdict {
            status: Status::Inertial,
            case: c.tag().to_string(),
            certificate: Some(c),
            violated: None,
            counterwitness: None,
        }
    }

    fn no(case: &str, clause: String) -> Verdict {
        Verdict {
            status: Status::NotInertial,
            case: case.to_string(),
            certificate: None,
            violated: Some(clause),
            counterwitness: None,
        }
    }

    fn unknown(reason: String) -> Verdict {
        Verdict {
            status: Status::Unknown,
            case: "unknown".into(),
            certificate: None,
            violated: Some(reason),
            counterwitness: None,
        }
    }

    pub fn is_inertial(&self) -> bool {
        self.status == Status::Inertial
    }
}

/// Generic part of one atom of a p-group: its type and the scalar γ induces.
#[derive(Clone, Debug)]
pub struct PAtom {
    pub atom: Atom,
    pub diag: Q,
}

fn congruent(a: &Q, b: &Q, m: &Z) -> bool {
    match (arith::rat_mod(a, m), arith::rat_mod(b, m)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}

/// A scalar the omega atoms agree on, namely the scalar of the deepest one.
fn omega_scalar(bs: &[&PAtom]) -> Option<Q> {
    let top = bs.iter().max_by_key(|a| a.atom.cyclic_exp())?;
    let cand = top.diag.clone();
    bs.iter()
        .all(|a| congruent(&a.diag, &cand, &a.atom.modulus().unwrap()))
        .then_some(cand)
}

/// Inertia of γ on a p-group, from the scalars on its infinite atoms.
/// Tracked finitely many slots only change γ by a finitary map.
pub fn primary_verdict(p: u64, atoms: &[PAtom]) -> std::result::Result<PrimaryCert, String> {
    let ds: Vec<&PAtom> = atoms.iter().filter(|a| matches!(a.atom, Atom::Pruefer { .. })).collect();
    let bs: Vec<&PAtom> = atoms.iter().filter(|a| matches!(a.atom, Atom::CyclicOmega { .. })).collect();
    if ds.is_empty() && bs.is_empty() {
        return Ok(PrimaryCert::Finite);
    }
    let alpha_d = match ds.split_first() {
        Some((first, rest)) => {
            if rest.iter().any(|a| a.diag != first.diag) {
                return Err(format!(
                    "recalls-4: γ is not a multiplication on the divisible part of the {p}-component"
                ));
            }
            Some(first.diag.clone())
        }
        None => None,
    };
    match alpha_d {
        None => match omega_scalar(&bs) {
            Some(alpha) => Ok(PrimaryCert::Power { alpha }),
            None => Err(format!(
                "recalls-4: γ is not a power automorphism on any subgroup of finite index of the {p}-component"
            )),
        },
        Some(alpha) => {
            if bs.iter().all(|b| congruent(&b.diag, &alpha, &b.atom.modulus().unwrap())) {
                return Ok(PrimaryCert::Power { alpha });
            }
            match omega_scalar(&bs) {
                Some(beta) => Ok(PrimaryCert::Critical { alpha, beta }),
                None => Err(format!(
                    "recalls-4: γ is not a power automorphism modulo the divisible part of the {p}-component"
                )),
            }
        }
    }
}

fn primary_atoms(g: &GroupDescriptor, nf: &NormalForm, p: u64) -> Vec<PAtom> {
    g.primary_indices(p)
        .into_iter()
        .map(|i| PAtom { atom: *g.atom(i), diag: nf.diag[i].clone() })
        .collect()
}

pub fn is_inertial(g: &GroupDescriptor, e: &AutoExpr) -> Result<Verdict> {
    e.check(g)?;
    let nf = match e.normal_form(g) {
        Ok(nf) => nf,
        Err(err) => return Ok(Verdict::unknown(format!("no normal form: {err}"))),
    };
    Ok(decide(g, &nf))
}

pub fn decide(g: &GroupDescriptor, nf: &NormalForm) -> Verdict {
    if g.is_finite() {
        return Verdict::yes(Certificate::FiniteGroup);
    }
    if let Deviation::Finite(gens) = deviation(nf, &Q::one()) {
        let order = span(g, &gens).ok().and_then(|h| h.order()).unwrap_or_else(Z::one);
        return Verdict::yes(Certificate::Finitary { image_order: order });
    }
    match g.r0() {
        NatInf::Inf => infinite_rank(g, nf),
        NatInf::Fin(0) => periodic(g, nf),
        NatInf::Fin(_) => finite_rank(g, nf),
    }
}

fn infinite_rank(g: &GroupDescriptor, nf: &NormalForm) -> Verdict {
    let omega: Vec<usize> = g.indices_where(|a| matches!(a, Atom::FreeZOmega));
    let m = nf.diag[omega[0]].clone();
    if omega.iter().any(|&i| nf.diag[i] != m) || !m.is_integer() {
        return Verdict::no(
            "recalls-1",
            "recalls-1: γ is not an integer multiplication on the free omega summands".into(),
        );
    }
    match deviation(nf, &m) {
        Deviation::Finite(gens) => {
            let c = finite_index(nf, &gens);
            let m = m.to_integer().try_into().unwrap_or(i64::MAX);
            Verdict::yes(Certificate::IntegerMultiple { m, exponent: c.exponent, index: c.index })
        }
        Deviation::Infinite(s) => Verdict::no(
            "recalls-1",
            format!("recalls-1: A(γ−{m}) is infinite along slot {s}"),
        ),
    }
}

fn periodic(g: &GroupDescriptor, nf: &NormalForm) -> Verdict {
    let mut components = BTreeMap::new();
    for p in g.primes() {
        match primary_verdict(p, &primary_atoms(g, nf, p)) {
            Ok(c) => {
                components.insert(p, c);
            }
            Err(clause) => {
                let case = if g.primes().len() == 1 { "recalls-4" } else { "recalls-3" };
                return Verdict::no(case, clause);
            }
        }
    }
    if components.len() == 1 {
        let (_, c) = components.into_iter().next().unwrap();
        return Verdict::yes(Certificate::Primary(c));
    }
    Verdict::yes(Certificate::Periodic { components })
}

fn finite_rank(g: &GroupDescriptor, nf: &NormalForm) -> Verdict {
    let free: Vec<Slot> = g.free_indices().into_iter().map(|i| Slot::new(i, 0)).collect();
    // induced action on A/T must be a scalar
    let first = &free[0];
    let r = g.free_part(&nf.columns[first]).get(*first);
    for s in &free {
        let fp = g.free_part(&nf.columns[s]);
        let scaled = g.element([(*s, r.clone())]);
        if scaled.as_ref().map(|x| x != &fp).unwrap_or(true) {
            return Verdict::no(
                "recalls-2",
                "recalls-2: γ is not a multiplication on any torsion-free V with A/V periodic".into(),
            );
        }
    }
    if r.is_zero() {
        return Verdict::no("recalls-2", "recalls-2: γ is singular modulo T".into());
    }
    let pi: Vec<u64> = arith::prime_divisors(&(r.numer() * r.denom()));
    for &p in &pi {
        if !g.primary_bounded(p) {
            return Verdict::no(
                "recalls-2",
                format!("recalls-2: A_π is unbounded for π = π({}) ∋ {p}", arith::fmt_q(&r)),
            );
        }
    }
    // torsion corrections t_s = γ(v_s) − r·v_s, and V = ⟨o·v_s⟩
    let mut o = Z::one();
    for s in &free {
        let rv = g.element([(*s, r.clone())]).expect("r acts on A/T");
        let t = g.sub_elems(&nf.columns[s], &rv);
        match g.order(&t) {
            Some(k) => o = o.lcm(&k),
            None => {
                return Verdict::no(
                    "recalls-2",
                    format!("recalls-2: γ(v) − {}·v is not torsion at {s}", arith::fmt_q(&r)),
                )
            }
        }
    }
    let v: Vec<Element> = free.iter().map(|s| g.scale(&g.generator(*s, 0), &o)).collect();
    for x in &v {
        let img = nf.apply(x);
        let want = g.mul_elem(x, &r);
        if img.ok() != want.ok() {
            return Verdict::unknown("V certificate failed to re-verify".into());
        }
    }
    // γ on A/V: T_p together with a Z(p^∞) of scalar r for each Q_(p) when r = ±1
    let unit = r.abs().is_one();
    let mut quotient = BTreeMap::new();
    let mut primes = g.primes();
    if unit {
        for s in &free {
            if let Atom::LocalizedQ { p } = g.atom(s.atom) {
                primes.insert(*p);
            }
        }
    }
    for p in primes {
        let mut atoms = primary_atoms(g, nf, p);
        if unit {
            for s in &free {
                if *g.atom(s.atom) == (Atom::LocalizedQ { p }) {
                    atoms.push(PAtom { atom: Atom::Pruefer { p }, diag: r.clone() });
                }
            }
        }
        match primary_verdict(p, &atoms) {
            Ok(c) => {
                quotient.insert(p, c);
            }
            Err(clause) => {
                return Verdict::no(
                    "recalls-2",
                    format!("recalls-2: γ induced on A/V is not inertial ({clause})"),
                )
            }
        }
    }
    Verdict::yes(Certificate::Multiplication { multiplier: r, pi, v, quotient })
}

/// Almost-power: every subgroup contains a γ-invariant subgroup of finite index.
pub fn is_almost_power(g: &GroupDescriptor, e: &AutoExpr) -> Result<bool> {
    e.check(g)?;
    if g.r0() == NatInf::Inf {
        let nf = e.normal_form(g)?;
        let fin = |m: i64| matches!(deviation(&nf, &Q::from_integer(m.into())), Deviation::Finite(_));
        return Ok(fin(1) || fin(-1));
    }
    Ok(is_inertial(g, e)?.is_inertial())
}
