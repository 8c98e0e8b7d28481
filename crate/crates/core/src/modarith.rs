//! Modular arithmetic on machine words: factorization of odd moduli,
//! p-adic valuations of rationals, primitive roots and discrete logarithms
//! modulo odd prime powers, and the Bezout split of a coprime factorization.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Default upper limit for moduli handled by the library.
pub const DEFAULT_LIMIT: u64 = 10_000_000;

/// An odd prime power `p^m` with `m >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PrimePower {
    pub p: u64,
    pub m: u32,
    pub value: u64,
}

impl PrimePower {
    pub fn new(p: u64, m: u32) -> Self {
        assert!(m >= 1, "exponent must be positive");
        PrimePower { p, m, value: p.pow(m) }
    }

    /// Euler's totient of `p^m`.
    pub fn phi(&self) -> u64 {
        self.value / self.p * (self.p - 1)
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.m)
        }
    }
}

/// A p-adic valuation; `Infinite` exactly for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Extended Euclid on signed integers: returns `(g, x, y)` with `a x + b y = g`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Inverse of `a` modulo `n`, if it exists.
pub fn inv_mod(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a as i128, n as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(n as i128) as u64)
}

/// Reduce a signed integer into `[0, n)`.
#[inline]
pub fn reduce_i64(a: i64, n: u64) -> u64 {
    (a as i128).rem_euclid(n as i128) as u64
}

/// Reduce a big integer into `[0, n)`.
pub fn reduce_big(a: &BigInt, n: u64) -> u64 {
    let r = a.mod_floor(&BigInt::from(n));
    r.to_u64().expect("residue fits a word")
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes strictly below `n`.
pub fn primes_below(n: u64) -> Vec<u64> {
    if n <= 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < n {
        if sieve[i] {
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

/// Trial-division factorization of any positive integer (including even ones),
/// as `(prime, exponent)` pairs in increasing order.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Factor an odd modulus into prime powers, strictly increasing primes.
pub fn factorize(q: u64) -> Result<Vec<PrimePower>> {
    factorize_with_limit(q, DEFAULT_LIMIT)
}

pub fn factorize_with_limit(q: u64, limit: u64) -> Result<Vec<PrimePower>> {
    if q == 0 {
        return Err(Error::Range("modulus must be positive".into()));
    }
    if q % 2 == 0 {
        return Err(Error::EvenModulus(q));
    }
    if q > limit {
        return Err(Error::Overflow(format!("modulus {q} exceeds limit {limit}")));
    }
    Ok(factor_u64(q)
        .into_iter()
        .map(|(p, m)| PrimePower::new(p, m))
        .collect())
}

/// Valuation of a (possibly negative) integer.
pub fn vp_int(n: &BigInt, p: u64) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinite;
    }
    let pb = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0i64;
    loop {
        let (qt, r) = n.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        n = qt;
        v += 1;
    }
    Valuation::Finite(v)
}

pub fn vp_u64(mut n: u64, p: u64) -> Valuation {
    if n == 0 {
        return Valuation::Infinite;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Valuation::Finite(v)
}

/// `v_p(r)` for a rational `r`.
pub fn vp(r: &BigRational, p: u64) -> Valuation {
    if r.is_zero() {
        return Valuation::Infinite;
    }
    let a = vp_int(r.numer(), p).finite().unwrap();
    let b = vp_int(r.denom(), p).finite().unwrap();
    Valuation::Finite(a - b)
}

/// Residue of a rational number modulo `n`; `None` if its denominator is not
/// invertible modulo `n`.
pub fn rational_mod(r: &BigRational, n: u64) -> Option<u64> {
    let den = reduce_big(r.denom(), n);
    let inv = inv_mod(den, n)?;
    Some(mul_mod(reduce_big(r.numer(), n), inv, n))
}

/// Smallest generator of the unit group modulo an odd prime power.
pub fn primitive_root(pp: PrimePower) -> u64 {
    let p = pp.p;
    if p == 2 {
        panic!("even prime powers are out of scope");
    }
    let cofactors: Vec<u64> = factor_u64(p - 1).iter().map(|&(l, _)| (p - 1) / l).collect();
    let p2 = p * p;
    for g in 2..pp.value {
        if g % p == 0 {
            continue;
        }
        if cofactors.iter().any(|&c| pow_mod(g, c, p) == 1) {
            continue;
        }
        if pp.m >= 2 && pow_mod(g, p - 1, p2) == 1 {
            continue;
        }
        return g;
    }
    // p = 3, m = 1 reaches here only if the loop is empty, which cannot happen.
    unreachable!("no primitive root found modulo {}", pp.value)
}

/// Baby-step giant-step for `x` in `[0, order)` with `base^x = target mod n`,
/// where `base` has the given order.
fn bsgs(base: u64, target: u64, order: u64, n: u64) -> Option<u64> {
    let s = (order as f64).sqrt().ceil() as u64 + 1;
    let mut table = std::collections::HashMap::with_capacity(s as usize);
    let mut cur = 1u64;
    for j in 0..s {
        table.entry(cur).or_insert(j);
        cur = mul_mod(cur, base, n);
    }
    let factor = inv_mod(pow_mod(base, s, n), n)?;
    let mut gamma = target % n;
    for i in 0..=s {
        if let Some(&j) = table.get(&gamma) {
            let x = i * s + j;
            if x < order {
                return Some(x);
            }
        }
        gamma = mul_mod(gamma, factor, n);
    }
    None
}

/// Discrete logarithm of `a` to base `g` modulo an odd prime power, by
/// Pohlig-Hellman over the group order with baby-step giant-step per prime.
pub fn discrete_log(g: u64, a: u64, pp: PrimePower) -> Result<u64> {
    let n = pp.value;
    if a % pp.p == 0 {
        return Err(Error::NotAUnit(a));
    }
    let order = pp.phi();
    let mut residues: Vec<(u64, u64)> = Vec::new();
    for (l, k) in factor_u64(order) {
        let lk = l.pow(k);
        let cof = order / lk;
        let g1 = pow_mod(g, cof, n);
        let a1 = pow_mod(a, cof, n);
        // solve g1^x = a1 with x mod l^k, one l-adic digit at a time
        let gamma = pow_mod(g1, lk / l, n);
        let mut x = 0u64;
        let mut lpow = 1u64;
        for i in 0..k {
            let ginv = inv_mod(pow_mod(g1, x, n), n).expect("unit");
            let h = pow_mod(mul_mod(ginv, a1, n), lk / l / lpow, n);
            let d = bsgs(gamma, h, l, n).ok_or(Error::NotAUnit(a))?;
            x += d * lpow;
            if i + 1 < k {
                lpow *= l;
            }
        }
        residues.push((x, lk));
    }
    let (x, _) = crt(&residues).expect("prime-power moduli are coprime");
    Ok(x)
}

/// Chinese remainder theorem for pairwise coprime moduli.
pub fn crt(parts: &[(u64, u64)]) -> Option<(u64, u64)> {
    let mut x: u128 = 0;
    let mut m: u128 = 1;
    for &(r, n) in parts {
        let n128 = n as u128;
        let (g, inv, _) = ext_gcd((m % n128) as i128, n as i128);
        if g != 1 {
            return None;
        }
        let inv = inv.rem_euclid(n as i128) as u128;
        let diff = ((r as u128 + n128 - x % n128) % n128) * inv % n128;
        x += m * diff;
        m *= n128;
        x %= m;
    }
    Some((x as u64, m as u64))
}

/// Integers `(a, b)` with `aQ + br = 1` for a coprime split `q = Q r`.
pub fn bezout_split(q: u64, big_q: u64, r: u64) -> Result<(i64, i64)> {
    if big_q == 0 || r == 0 || (big_q as u128) * (r as u128) != q as u128 {
        return Err(Error::NotCoprime(format!("{big_q}*{r} != {q}")));
    }
    let (g, a, b) = ext_gcd(big_q as i128, r as i128);
    if g != 1 {
        return Err(Error::NotCoprime(format!("gcd({big_q},{r}) = {g}")));
    }
    Ok((a as i64, b as i64))
}

/// Moebius function.
pub fn mobius(n: u64) -> i64 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor_u64(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Multiplicative order of a unit modulo `n`, given the group exponent `lambda`.
pub fn multiplicative_order(a: u64, n: u64, lambda: u64) -> u64 {
    let mut ord = lambda;
    for (l, _) in factor_u64(lambda) {
        while ord % l == 0 && pow_mod(a, ord / l, n) == 1 {
            ord /= l;
        }
    }
    ord
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(
            factorize(45).unwrap(),
            vec![PrimePower::new(3, 2), PrimePower::new(5, 1)]
        );
        assert!(factorize(1).unwrap().is_empty());
        assert_eq!(factorize(12), Err(Error::EvenModulus(12)));
        assert!(matches!(factorize(10_000_001), Err(Error::Overflow(_))));
    }

    #[test]
    fn factorize_recombines() {
        for q in (1..20_000u64).step_by(2).chain([9_999_991, 3 * 3 * 5 * 7 * 11 * 13 * 17]) {
            let f = factorize(q).unwrap();
            assert_eq!(f.iter().map(|pp| pp.value).product::<u64>(), q);
            assert!(f.windows(2).all(|w| w[0].p < w[1].p));
            assert!(f.iter().all(|pp| is_prime(pp.p)));
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(vp(&rat(50, 1), 5), Valuation::Finite(2));
        assert_eq!(vp(&rat(3, 10), 5), Valuation::Finite(-1));
        assert_eq!(vp(&BigRational::zero(), 7), Valuation::Infinite);
        assert_eq!(vp(&BigRational::one(), 7), Valuation::Finite(0));
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(primitive_root(PrimePower::new(3, 1)), 2);
        for (p, m, order) in [(5, 2, 20), (7, 2, 42), (3, 4, 54), (11, 1, 10)] {
            let pp = PrimePower::new(p, m);
            let g = primitive_root(pp);
            let mut x = 1;
            let mut k = 0;
            loop {
                x = mul_mod(x, g, pp.value);
                k += 1;
                if x == 1 {
                    break;
                }
            }
            assert_eq!(k, order, "order of {g} mod {}", pp.value);
        }
    }

    #[test]
    fn primitive_root_is_smallest() {
        for &(p, m) in &[(3u64, 3u32), (5, 3), (7, 2), (13, 2), (29, 1), (31, 2)] {
            let pp = PrimePower::new(p, m);
            let g = primitive_root(pp);
            for c in 2..g {
                if c % p != 0 {
                    assert!(multiplicative_order(c, pp.value, pp.phi()) < pp.phi());
                }
            }
            assert_eq!(multiplicative_order(g, pp.value, pp.phi()), pp.phi());
        }
    }

    #[test]
    fn discrete_log_roundtrip() {
        let pp = PrimePower::new(5, 4);
        let g = primitive_root(pp);
        assert_eq!(discrete_log(g, 1, pp).unwrap(), 0);
        assert_eq!(discrete_log(g, g, pp).unwrap(), 1);
        for a in 1..pp.value {
            if a % 5 == 0 {
                assert_eq!(discrete_log(g, a, pp), Err(Error::NotAUnit(a)));
                continue;
            }
            let e = discrete_log(g, a, pp).unwrap();
            assert!(e < pp.phi());
            assert_eq!(pow_mod(g, e, pp.value), a);
        }
        for &(p, m) in &[(3u64, 9u32), (7, 5), (101, 3), (997, 2)] {
            let pp = PrimePower::new(p, m);
            let g = primitive_root(pp);
            for e in [0u64, 1, 2, 17, pp.phi() - 1, pp.phi() / 3] {
                assert_eq!(discrete_log(g, pow_mod(g, e, pp.value), pp).unwrap(), e);
            }
        }
    }

    #[test]
    fn bezout_examples() {
        let (a, b) = bezout_split(15, 5, 3).unwrap();
        assert_eq!(5 * a + 3 * b, 1);
        assert_eq!(bezout_split(7, 7, 1).unwrap().0 * 7 + bezout_split(7, 7, 1).unwrap().1, 1);
        assert!(matches!(bezout_split(45, 3, 15), Err(Error::NotCoprime(_))));
        assert!(matches!(bezout_split(45, 9, 4), Err(Error::NotCoprime(_))));
    }

    #[test]
    fn bezout_exponential_identity() {
        use std::f64::consts::TAU;
        let e = |x: f64| num_complex::Complex64::from_polar(1.0, TAU * x);
        for &(big_q, r) in &[(5u64, 3u64), (1001, 999), (27, 37 * 11), (625, 1597)] {
            let q = big_q * r;
            let (a, b) = bezout_split(q, big_q, r).unwrap();
            for m in (0..100u64).map(|i| i * 7919 % q) {
                let lhs = e(m as f64 / q as f64);
                let t1 = reduce_i64((m as i64).wrapping_mul(a) % r as i64, r) as f64 / r as f64;
                let t2 = reduce_i64(((m as i128 * b as i128) % big_q as i128) as i64, big_q) as f64
                    / big_q as f64;
                let rhs = e(t1) * e(t2);
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn crt_and_helpers() {
        assert_eq!(crt(&[(2, 3), (3, 5)]), Some((8, 15)));
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(3, 9), None);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(primes_below(22), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(rational_mod(&rat(1, 2), 5), Some(3));
        assert_eq!(rational_mod(&rat(1, 5), 5), None);
    }
}
