//! Exact integer and rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Z = BigInt;
pub type Q = BigRational;

pub fn z(n: i64) -> Z {
    BigInt::from(n)
}

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

pub fn pow(p: u64, k: u32) -> Z {
    num_traits::pow(BigInt::from(p), k as usize)
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn val(n: &Z, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let pz = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    while (&m % &pz).is_zero() {
        m /= &pz;
        v += 1;
    }
    Some(v)
}

/// Prime factorisation of |n| (n != 0) as (prime, exponent) pairs.
pub fn factor(n: &Z) -> Vec<(u64, u32)> {
    let mut m = n.abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    while m > Z::one() {
        let dz = BigInt::from(d);
        if &dz * &dz > m {
            let last = m.to_u64().expect("prime factor fits u64");
            out.push((last, 1));
            break;
        }
        let mut e = 0;
        while (&m % &dz).is_zero() {
            m /= &dz;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    out
}

pub fn prime_divisors(n: &Z) -> Vec<u64> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

/// Least non-negative residue.
pub fn modp(a: &Z, m: &Z) -> Z {
    a.mod_floor(m)
}

pub fn mod_inv(a: &Z, m: &Z) -> Option<Z> {
    if m.is_one() {
        return Some(Z::zero());
    }
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Image of the rational `r = a/b` in Z/m, defined when gcd(b, m) = 1.
pub fn rat_mod(r: &Q, m: &Z) -> Option<Z> {
    let inv = mod_inv(r.denom(), m)?;
    Some((r.numer() * inv).mod_floor(m))
}

/// `x mod 1` in [0, 1).
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

/// True when the denominator of `x` is a power of `p` (including 1).
pub fn denom_is_p_power(x: &Q, p: u64) -> bool {
    let mut d = x.denom().clone();
    let pz = BigInt::from(p);
    while (&d % &pz).is_zero() {
        d /= &pz;
    }
    d.is_one()
}

/// Exponent j with denominator p^j; assumes `denom_is_p_power`.
pub fn denom_exp(x: &Q, p: u64) -> u32 {
    val(x.denom(), p).unwrap_or(0)
}

pub fn is_p_power(n: &Z, p: u64) -> bool {
    if n.is_zero() {
        return false;
    }
    let mut m = n.abs();
    let pz = BigInt::from(p);
    while (&m % &pz).is_zero() {
        m /= &pz;
    }
    m.is_one()
}

pub fn lcm(a: &Z, b: &Z) -> Z {
    a.lcm(b)
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: Z = a.trim().parse().ok()?;
            let b: Z = b.trim().parse().ok()?;
            if b.is_zero() {
                return None;
            }
            Some(BigRational::new(a, b))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// A primitive root modulo p^k for odd p.
pub fn primitive_root(p: u64, k: u32) -> u64 {
    assert!(p > 2 && is_prime(p));
    let m = pow(p, k);
    let phi = pow(p, k - 1) * BigInt::from(p - 1);
    let fs = prime_divisors(&phi);
    (2..)
        .find(|&g| {
            let gz = BigInt::from(g);
            if !gz.gcd(&m).is_one() {
                return false;
            }
            fs.iter()
                .all(|&f| !gz.modpow(&(&phi / BigInt::from(f)), &m).is_one())
        })
        .expect("primitive roots exist for odd prime powers")
}

/// Multiplicative order of `a` modulo `m`, for gcd(a, m) = 1.
pub fn mult_order(a: &Z, m: &Z) -> u64 {
    let a = a.mod_floor(m);
    let mut x = a.clone();
    let mut k = 1u64;
    while !(x.mod_floor(m)).is_one() && !m.is_one() {
        x = (x * &a).mod_floor(m);
        k += 1;
    }
    k
}

pub fn gcd(a: &Z, b: &Z) -> Z {
    a.gcd(b)
}

pub fn abs(a: &Z) -> Z {
    a.abs()
}

/// Serde helpers writing big numbers as decimal strings.
pub mod ser {
    use super::{fmt_q, Q, Z};
    use serde::ser::{SerializeSeq, Serializer};

    pub fn z<S: Serializer>(x: &Z, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn zs<S: Serializer>(v: &[Z], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn q<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn qs<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&fmt_q(x))?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_two_mod_25() {
        // brute force oracle
        let x = (0..25).find(|x| (2 * x) % 25 == 1).unwrap();
        assert_eq!(mod_inv(&z(2), &z(25)), Some(z(x)));
        assert_eq!(x, 13);
    }

    #[test]
    fn primitive_roots_generate() {
        for (p, k) in [(3u64, 2u32), (5, 1), (5, 2), (7, 1)] {
            let g = primitive_root(p, k);
            let m = pow(p, k);
            let phi = (pow(p, k - 1) * z(p as i64 - 1)).to_u64().unwrap();
            assert_eq!(mult_order(&z(g as i64), &m), phi);
        }
    }

    #[test]
    fn factorisation() {
        assert_eq!(factor(&z(12)), vec![(2, 2), (3, 1)]);
        assert_eq!(factor(&z(-49)), vec![(7, 2)]);
        assert!(factor(&z(1)).is_empty());
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["3/4", "-5", "0", "7/2"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert!(parse_q("1/0").is_none());
    }
}
