use std::collections::BTreeSet;

use num_integer::Integer;
use serde::Serialize;

use super::expr::{check_block_atoms, hom_is_bijective, AutoExpr};
use crate::arith::{self, Z};
use crate::error::{Error, Result};
use crate::group::{Atom, GroupDescriptor};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub failures: Vec<String>,
}

impl AutoExpr {
    pub fn validate(&self, g: &GroupDescriptor) -> ValidityReport {
        let mut failures = Vec::new();
        collect(self, g, "", &mut failures);
        ValidityReport { valid: failures.is_empty(), failures }
    }

    pub fn check(&self, g: &GroupDescriptor) -> Result<()> {
        let r = self.validate(g);
        if r.valid {
            Ok(())
        } else {
            Err(Error::InvalidExpr(r.failures.join("; ")))
        }
    }
}

fn is_unit_power_of(x: i64, p: u64) -> bool {
    x != 0 && arith::is_p_power(&Z::from(x), p)
}

fn rat_mult_failure(m: i64, n: i64, a: &Atom) -> Option<String> {
    match *a {
        Atom::Cyclic { p, .. } | Atom::CyclicOmega { p, .. } | Atom::Pruefer { p } => {
            let pi = p as i64;
            (m % pi == 0 || n % pi == 0).then(|| format!("{m}/{n} is not invertible on {a}"))
        }
        Atom::FreeZ | Atom::FreeZOmega => {
            (m.abs() != 1 || n.abs() != 1).then(|| format!("{m}/{n} does not preserve {a}"))
        }
        Atom::LocalizedQ { p } => (!is_unit_power_of(m, p) || !is_unit_power_of(n, p))
            .then(|| format!("{m}/{n} does not preserve {a}")),
    }
}

fn push(out: &mut Vec<String>, at: &str, msg: String) {
    out.push(if at.is_empty() { msg } else { format!("{at}: {msg}") });
}

fn collect(e: &AutoExpr, g: &GroupDescriptor, at: &str, out: &mut Vec<String>) {
    match e {
        AutoExpr::Identity | AutoExpr::Negation => {}
        AutoExpr::RatMult { m, n } => {
            if *m == 0 || *n == 0 {
                return push(out, at, "zero in a multiplier".into());
            }
            if m.gcd(n) != 1 {
                push(out, at, format!("{m} and {n} are not coprime"));
            }
            for (i, a) in g.atoms.iter().enumerate() {
                if let Some(msg) = rat_mult_failure(*m, *n, a) {
                    push(out, at, format!("atom {i}: {msg}"));
                }
            }
        }
        AutoExpr::PAdicRat { p, m, n } => {
            if !arith::is_prime(*p) {
                push(out, at, format!("{p} is not prime"));
            } else if *m == 0 || *n == 0 || *m % *p as i64 == 0 || *n % *p as i64 == 0 {
                push(out, at, format!("{m}/{n} is not a {p}-adic unit"));
            }
        }
        AutoExpr::BlockSum { blocks } => {
            let mut used = BTreeSet::new();
            for (k, b) in blocks.iter().enumerate() {
                if let Err(err) = check_block_atoms(g, &b.atoms) {
                    push(out, at, err.to_string());
                    continue;
                }
                for &i in &b.atoms {
                    if !used.insert(i) {
                        push(out, at, format!("atom {i} appears in two blocks"));
                    }
                }
                collect(&b.expr, &g.sub(&b.atoms), &format!("{at}block {k}"), out);
            }
        }
        AutoExpr::OnePlusHom(h) => {
            if let Err(err) = h.check(g) {
                return push(out, at, err.to_string());
            }
            match hom_is_bijective(g, h) {
                Ok(true) => {}
                Ok(false) => push(out, at, "1+φ is not bijective".into()),
                Err(err) => push(out, at, err.to_string()),
            }
        }
        AutoExpr::Composite(v) => {
            for (k, f) in v.iter().enumerate() {
                collect(f, g, &format!("{at}[{k}]"), out);
            }
        }
        AutoExpr::Inverse(f) => collect(f, g, &format!("{at}^-1"), out),
    }
}
