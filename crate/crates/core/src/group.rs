//! Group descriptors, elements and structural invariants.
//!
//! A descriptor is a finite list of atoms, each one a cyclic p-group, a
//! Prüfer group, a copy of Z, a localisation Q_(p), or a countable direct sum
//! of copies of a cyclic group or of Z. Elements have finite support, so every
//! computation stays exact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, Q, Z};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Atom {
    #[serde(rename = "cyclic")]
    Cyclic { p: u64, k: u32 },
    #[serde(rename = "cyclicOmega")]
    CyclicOmega { p: u64, k: u32 },
    #[serde(rename = "pruefer")]
    Pruefer { p: u64 },
    #[serde(rename = "freeZ")]
    FreeZ,
    #[serde(rename = "freeZOmega")]
    FreeZOmega,
    #[serde(rename = "localizedQ")]
    LocalizedQ { p: u64 },
}

impl Atom {
    pub fn prime(&self) -> Option<u64> {
        match *self {
            Atom::Cyclic { p, .. }
            | Atom::CyclicOmega { p, .. }
            | Atom::Pruefer { p }
            | Atom::LocalizedQ { p } => Some(p),
            Atom::FreeZ | Atom::FreeZOmega => None,
        }
    }

    /// Prime of a torsion atom.
    pub fn torsion_prime(&self) -> Option<u64> {
        if self.is_torsion() {
            self.prime()
        } else {
            None
        }
    }

    pub fn is_torsion(&self) -> bool {
        matches!(
            self,
            Atom::Cyclic { .. } | Atom::CyclicOmega { .. } | Atom::Pruefer { .. }
        )
    }

    pub fn is_omega(&self) -> bool {
        matches!(self, Atom::CyclicOmega { .. } | Atom::FreeZOmega)
    }

    /// Exponent k of a cyclic atom.
    pub fn cyclic_exp(&self) -> Option<u32> {
        match *self {
            Atom::Cyclic { k, .. } | Atom::CyclicOmega { k, .. } => Some(k),
            _ => None,
        }
    }

    pub fn modulus(&self) -> Option<Z> {
        match *self {
            Atom::Cyclic { p, k } | Atom::CyclicOmega { p, k } => Some(arith::pow(p, k)),
            _ => None,
        }
    }

    /// Whether the atom is q-divisible.
    pub fn divisible_by(&self, q: u64) -> bool {
        match *self {
            Atom::Cyclic { p, .. } | Atom::CyclicOmega { p, .. } => p != q,
            Atom::Pruefer { .. } => true,
            Atom::FreeZ | Atom::FreeZOmega => false,
            Atom::LocalizedQ { p } => p == q,
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidAtom { index, reason });
        if let Some(p) = self.prime() {
            if !arith::is_prime(p) {
                return bad(format!("p = {p} is not prime"));
            }
        }
        if let Some(k) = self.cyclic_exp() {
            if k < 1 {
                return bad("k must be at least 1".into());
            }
            if let Some(p) = self.prime() {
                if (k as f64) * (p as f64).log2() > 120.0 {
                    return bad(format!("p^k = {p}^{k} is too large"));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Atom::Cyclic { p, k } => write!(f, "Z({p}^{k})"),
            Atom::CyclicOmega { p, k } => write!(f, "(+)_w Z({p}^{k})"),
            Atom::Pruefer { p } => write!(f, "Z({p}^inf)"),
            Atom::FreeZ => write!(f, "Z"),
            Atom::FreeZOmega => write!(f, "(+)_w Z"),
            Atom::LocalizedQ { p } => write!(f, "Q_({p})"),
        }
    }
}

/// Position of a coordinate: atom index plus copy index (0 unless omega).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slot {
    pub atom: usize,
    pub copy: usize,
}

impl Slot {
    pub fn new(atom: usize, copy: usize) -> Self {
        Slot { atom, copy }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.atom, self.copy)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDescriptor {
    pub atoms: Vec<Atom>,
}

/// Natural number or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NatInf {
    Fin(u32),
    Inf,
}

impl Serialize for NatInf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NatInf::Fin(n) => s.serialize_u32(*n),
            NatInf::Inf => s.serialize_str("inf"),
        }
    }
}

impl fmt::Display for NatInf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NatInf::Fin(n) => write!(f, "{n}"),
            NatInf::Inf => write!(f, "inf"),
        }
    }
}

/// A set of primes: either finite, or all primes outside a finite set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum PrimeSet {
    Finite(BTreeSet<u64>),
    AllExcept(BTreeSet<u64>),
}

impl PrimeSet {
    pub fn contains(&self, p: u64) -> bool {
        match self {
            PrimeSet::Finite(s) => s.contains(&p),
            PrimeSet::AllExcept(s) => arith::is_prime(p) && !s.contains(&p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    pub r0: NatInf,
    pub exponent_per_p: BTreeMap<u64, NatInf>,
    pub eexp_per_p: BTreeMap<u64, NatInf>,
    pub torsion: GroupDescriptor,
    pub divisible: GroupDescriptor,
    pub primary: BTreeMap<u64, GroupDescriptor>,
    pub critical_primes: BTreeSet<u64>,
    pub pi_star: PrimeSet,
}

impl GroupDescriptor {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let g = GroupDescriptor { atoms };
        g.validate()?;
        Ok(g)
    }

    pub fn zero() -> Self {
        GroupDescriptor { atoms: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        self.atoms
            .iter()
            .enumerate()
            .try_for_each(|(i, a)| a.validate(i))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let g: GroupDescriptor =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        g.validate()?;
        Ok(g)
    }

    /// Canonical JSON: sorted keys, atoms in their given order.
    pub fn to_canonical_json(&self) -> String {
        let v = serde_json::to_value(self).expect("descriptor serialises");
        serde_json::to_string(&v).expect("value serialises")
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn primes(&self) -> BTreeSet<u64> {
        self.atoms.iter().filter_map(|a| a.torsion_prime()).collect()
    }

    pub fn indices_where(&self, f: impl Fn(&Atom) -> bool) -> Vec<usize> {
        (0..self.atoms.len()).filter(|&i| f(&self.atoms[i])).collect()
    }

    pub fn torsion_indices(&self) -> Vec<usize> {
        self.indices_where(Atom::is_torsion)
    }

    pub fn free_indices(&self) -> Vec<usize> {
        self.indices_where(|a| !a.is_torsion())
    }

    pub fn primary_indices(&self, p: u64) -> Vec<usize> {
        self.indices_where(|a| a.torsion_prime() == Some(p))
    }

    pub fn is_periodic(&self) -> bool {
        self.atoms.iter().all(Atom::is_torsion)
    }

    pub fn is_finite(&self) -> bool {
        self.atoms.iter().all(|a| matches!(a, Atom::Cyclic { .. }))
    }

    pub fn is_p_group(&self, p: u64) -> bool {
        self.atoms.iter().all(|a| a.torsion_prime() == Some(p))
    }

    pub fn r0(&self) -> NatInf {
        if self.atoms.iter().any(|a| matches!(a, Atom::FreeZOmega)) {
            return NatInf::Inf;
        }
        NatInf::Fin(
            self.atoms
                .iter()
                .filter(|a| matches!(a, Atom::FreeZ | Atom::LocalizedQ { .. }))
                .count() as u32,
        )
    }

    pub fn sub(&self, idx: &[usize]) -> GroupDescriptor {
        GroupDescriptor {
            atoms: idx.iter().map(|&i| self.atoms[i]).collect(),
        }
    }

    pub fn exponent(&self, p: u64) -> NatInf {
        let mut m = 0;
        for a in &self.atoms {
            match *a {
                Atom::Pruefer { p: q } if q == p => return NatInf::Inf,
                Atom::Cyclic { p: q, k } | Atom::CyclicOmega { p: q, k } if q == p => m = m.max(k),
                _ => {}
            }
        }
        NatInf::Fin(m)
    }

    /// Least e with p^e A_p finite.
    pub fn eexp(&self, p: u64) -> NatInf {
        let mut e = 0;
        for a in &self.atoms {
            match *a {
                Atom::Pruefer { p: q } if q == p => return NatInf::Inf,
                Atom::CyclicOmega { p: q, k } if q == p => e = e.max(k),
                _ => {}
            }
        }
        NatInf::Fin(e)
    }

    pub fn primary_finite(&self, p: u64) -> bool {
        self.atoms
            .iter()
            .filter(|a| a.torsion_prime() == Some(p))
            .all(|a| matches!(a, Atom::Cyclic { .. }))
    }

    pub fn primary_bounded(&self, p: u64) -> bool {
        !self.atoms.contains(&Atom::Pruefer { p })
    }

    pub fn is_critical(&self, p: u64) -> bool {
        let has_d = self.atoms.contains(&Atom::Pruefer { p });
        let has_b = self
            .atoms
            .iter()
            .any(|a| matches!(*a, Atom::CyclicOmega { p: q, .. } if q == p));
        has_d && has_b
    }

    /// A/A_p is p-divisible.
    pub fn quotient_divisible(&self, p: u64) -> bool {
        self.atoms
            .iter()
            .filter(|a| a.torsion_prime() != Some(p))
            .all(|a| a.divisible_by(p))
    }

    fn splits_off_prime(&self, p: u64) -> bool {
        self.quotient_divisible(p)
            && (self.primary_finite(p)
                || (self.r0() != NatInf::Inf && self.primary_bounded(p)))
    }

    pub fn pi_star(&self) -> PrimeSet {
        if self.is_periodic() {
            // Every prime not occurring has A_p = 0; only unbounded components fail.
            let bad = self
                .primes()
                .into_iter()
                .filter(|&p| !self.splits_off_prime(p))
                .collect();
            return PrimeSet::AllExcept(bad);
        }
        // A torsion-free atom is p-divisible for at most one p.
        let mut cands: BTreeSet<u64> = self.primes();
        for a in &self.atoms {
            if let Atom::LocalizedQ { p } = a {
                cands.insert(*p);
            }
        }
        PrimeSet::Finite(
            cands
                .into_iter()
                .filter(|&p| self.splits_off_prime(p))
                .collect(),
        )
    }

    pub fn structural_report(&self) -> StructuralReport {
        let primes = self.primes();
        StructuralReport {
            r0: self.r0(),
            exponent_per_p: primes.iter().map(|&p| (p, self.exponent(p))).collect(),
            eexp_per_p: primes.iter().map(|&p| (p, self.eexp(p))).collect(),
            torsion: self.sub(&self.torsion_indices()),
            divisible: self.sub(&self.indices_where(|a| matches!(a, Atom::Pruefer { .. }))),
            primary: primes
                .iter()
                .map(|&p| (p, self.sub(&self.primary_indices(p))))
                .collect(),
            critical_primes: primes.iter().copied().filter(|&p| self.is_critical(p)).collect(),
            pi_star: self.pi_star(),
        }
    }

    // ---- elements ----

    fn check_slot(&self, s: Slot) -> Result<&Atom> {
        let a = self
            .atoms
            .get(s.atom)
            .ok_or_else(|| Error::NotInGroup(format!("no atom {}", s.atom)))?;
        if !a.is_omega() && s.copy != 0 {
            return Err(Error::NotInGroup(format!("slot {s} on a single summand")));
        }
        Ok(a)
    }

    /// Canonical representative of a coordinate value in slot `s`.
    pub fn reduce(&self, s: Slot, x: &Q) -> Result<Q> {
        let a = self.check_slot(s)?;
        match *a {
            Atom::Cyclic { .. } | Atom::CyclicOmega { .. } => {
                if !x.is_integer() {
                    return Err(Error::NotInGroup(format!("{} in cyclic slot {s}", arith::fmt_q(x))));
                }
                Ok(Q::from_integer(x.numer().mod_floor(&a.modulus().unwrap())))
            }
            Atom::Pruefer { p } => {
                if !arith::denom_is_p_power(x, p) {
                    return Err(Error::NotInGroup(format!("{} in Z({p}^inf)", arith::fmt_q(x))));
                }
                Ok(arith::frac(x))
            }
            Atom::FreeZ | Atom::FreeZOmega => {
                if !x.is_integer() {
                    return Err(Error::NotInGroup(format!("{} in Z", arith::fmt_q(x))));
                }
                Ok(x.clone())
            }
            Atom::LocalizedQ { p } => {
                if !arith::denom_is_p_power(x, p) {
                    return Err(Error::NotInGroup(format!("{} in Q_({p})", arith::fmt_q(x))));
                }
                Ok(x.clone())
            }
        }
    }

    pub fn element<I: IntoIterator<Item = (Slot, Q)>>(&self, coords: I) -> Result<Element> {
        let mut e = Element::zero();
        for (s, x) in coords {
            let cur = e.get(s);
            let v = self.reduce(s, &(cur + x))?;
            e.set(s, v);
        }
        Ok(e)
    }

    pub fn contains(&self, a: &Element) -> bool {
        a.coords
            .iter()
            .all(|(s, x)| self.reduce(*s, x).map(|r| &r == x).unwrap_or(false))
    }

    fn check(&self, a: &Element) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::AmbientMismatch)
        }
    }

    pub fn add(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    pub(crate) fn add_unchecked(&self, a: &Element, b: &Element) -> Element {
        let mut out = a.clone();
        for (s, x) in &b.coords {
            let v = self
                .reduce(*s, &(out.get(*s) + x))
                .expect("sum of members is a member");
            out.set(*s, v);
        }
        out
    }

    pub fn sub_elems(&self, a: &Element, b: &Element) -> Element {
        self.add_unchecked(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Element) -> Element {
        self.scale(a, &BigInt::from(-1))
    }

    pub fn scale(&self, a: &Element, n: &Z) -> Element {
        let mut out = Element::zero();
        let nq = Q::from_integer(n.clone());
        for (s, x) in &a.coords {
            let v = self.reduce(*s, &(x * &nq)).expect("multiple of a member");
            out.set(*s, v);
        }
        out
    }

    /// Multiplication of one coordinate by the rational `r`, as a power
    /// automorphism on torsion atoms and as a literal product elsewhere.
    pub fn mul_coord(&self, s: Slot, x: &Q, r: &Q) -> Result<Q> {
        let a = self.check_slot(s)?;
        match *a {
            Atom::Cyclic { .. } | Atom::CyclicOmega { .. } => {
                let m = a.modulus().unwrap();
                let u = arith::rat_mod(r, &m).ok_or_else(|| {
                    Error::InvalidExpr(format!("{} does not act on {a}", arith::fmt_q(r)))
                })?;
                Ok(Q::from_integer((x.numer() * u).mod_floor(&m)))
            }
            Atom::Pruefer { .. } => {
                if x.is_zero() {
                    return Ok(Q::zero());
                }
                let d = x.denom().clone();
                let u = arith::rat_mod(r, &d).ok_or_else(|| {
                    Error::InvalidExpr(format!("{} does not act on {a}", arith::fmt_q(r)))
                })?;
                Ok(arith::frac(&Q::new(x.numer() * u, d)))
            }
            _ => self.reduce(s, &(x * r)),
        }
    }

    pub fn mul_elem(&self, a: &Element, r: &Q) -> Result<Element> {
        let mut out = Element::zero();
        for (s, x) in &a.coords {
            out.set(*s, self.mul_coord(*s, x, r)?);
        }
        Ok(out)
    }

    /// Order of an element, `None` if infinite.
    pub fn order(&self, a: &Element) -> Option<Z> {
        let mut o = Z::one();
        for (s, x) in &a.coords {
            let atom = self.atoms[s.atom];
            let c = match atom {
                Atom::Cyclic { .. } | Atom::CyclicOmega { .. } => {
                    let m = atom.modulus().unwrap();
                    &m / x.numer().gcd(&m)
                }
                Atom::Pruefer { .. } => x.denom().clone(),
                _ => return None,
            };
            o = o.lcm(&c);
        }
        Some(o)
    }

    /// Standard generator of a slot; for Prüfer slots the layer 1/p^depth.
    pub fn generator(&self, s: Slot, depth: u32) -> Element {
        let x = match self.atoms[s.atom] {
            Atom::Pruefer { p } => Q::new(Z::one(), arith::pow(p, depth)),
            _ => Q::one(),
        };
        let mut e = Element::zero();
        e.set(s, self.reduce(s, &x).expect("generator is a member"));
        e
    }

    /// Projection onto the coordinates of the given atoms.
    pub fn project(&self, a: &Element, atoms: &BTreeSet<usize>) -> Element {
        Element {
            coords: a
                .coords
                .iter()
                .filter(|(s, _)| atoms.contains(&s.atom))
                .map(|(s, x)| (*s, x.clone()))
                .collect(),
        }
    }

    pub fn is_torsion(&self, a: &Element) -> bool {
        self.order(a).is_some()
    }

    /// Torsion-free coordinates of `a` (its image modulo T in the listed form).
    pub fn free_part(&self, a: &Element) -> Element {
        let free: BTreeSet<usize> = self.free_indices().into_iter().collect();
        self.project(a, &free)
    }

    pub fn torsion_part(&self, a: &Element) -> Element {
        let tors: BTreeSet<usize> = self.torsion_indices().into_iter().collect();
        self.project(a, &tors)
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Finite-support element; zero coordinates are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    coords: BTreeMap<Slot, Q>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, s: Slot) -> Q {
        self.coords.get(&s).cloned().unwrap_or_else(Q::zero)
    }

    pub(crate) fn set(&mut self, s: Slot, v: Q) {
        if v.is_zero() {
            self.coords.remove(&s);
        } else {
            self.coords.insert(s, v);
        }
    }

    pub fn coords(&self) -> impl Iterator<Item = (&Slot, &Q)> {
        self.coords.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = Slot> + '_ {
        self.coords.keys().copied()
    }

    pub fn max_copy(&self) -> usize {
        self.coords.keys().map(|s| s.copy).max().unwrap_or(0)
    }

    /// Largest p-exponent of a denominator among coordinates in atoms of prime `p`.
    pub fn denom_depth(&self, g: &GroupDescriptor, s: Slot) -> u32 {
        let x = self.get(s);
        match g.atoms[s.atom].prime() {
            Some(p) => arith::denom_exp(&x, p),
            None => 0,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|(s, x)| format!("{}@{s}", arith::fmt_q(x)))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoordJson {
    atom: usize,
    #[serde(default)]
    copy: usize,
    value: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementJson {
    coords: Vec<CoordJson>,
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementJson {
            coords: self
                .coords
                .iter()
                .map(|(sl, x)| CoordJson {
                    atom: sl.atom,
                    copy: sl.copy,
                    value: arith::fmt_q(x),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ElementJson::deserialize(d)?;
        let mut e = Element::zero();
        for c in raw.coords {
            let v = arith::parse_q(&c.value)
                .ok_or_else(|| serde::de::Error::custom(format!("bad rational {:?}", c.value)))?;
            let s = Slot::new(c.atom, c.copy);
            let cur = e.get(s);
            e.set(s, cur + v);
        }
        Ok(e)
    }
}

impl Element {
    /// Deserialise and canonicalise against `g`.
    pub fn parse(g: &GroupDescriptor, text: &str) -> Result<Element> {
        let raw: Element = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        g.element(raw.coords)
    }

    pub fn is_canonical_in(&self, g: &GroupDescriptor) -> bool {
        g.contains(self)
    }

    pub fn neg_coords_abs_max(&self) -> Z {
        self.coords
            .values()
            .map(|x| x.numer().abs().max(x.denom().abs()))
            .max()
            .unwrap_or_else(Z::zero)
    }
}
