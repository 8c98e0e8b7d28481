//! Counting `a mod p^m` with `h(a) = 0 mod p^m`, by brute force and by lifting
//! roots modulo `p` one digit at a time.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffield::FpPoly;
use crate::modarith::{reduce_big, vp_int};
use crate::ratfun::RationalFunction;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Lifting,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RootCount {
    pub count: u128,
    pub bound: u128,
    pub method: Method,
}

/// Data recorded at one root `a mod p` of the top-level lifting step.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct LiftStep {
    pub root: u64,
    /// `r(a) = min_j (e_j(a) + j)`
    pub r: u32,
    /// Degree mod `p` of the quotient polynomial `H_a`.
    pub quotient_degree: usize,
}

/// `d p^{m - ceil(m/d)}`, or 0 when `d = 0`.
pub fn root_bound(d: usize, p: u64, m: u32) -> u128 {
    if d == 0 {
        return 0;
    }
    let e = m - m.div_ceil(d as u32);
    d as u128 * (p as u128).pow(e)
}

fn pow_u64(p: u64, m: u32) -> Result<u64> {
    p.checked_pow(m).ok_or_else(|| Error::Overflow(format!("{p}^{m}")))
}

fn int_coeffs(h: &[BigInt]) -> Vec<BigInt> {
    let mut c = h.to_vec();
    while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    c
}

fn deg_mod_p(h: &[BigInt], p: u64) -> Result<usize> {
    let f = FpPoly::from_bigints(h, p);
    if f.is_zero() {
        return Err(Error::ZeroModP(p));
    }
    Ok(f.degree())
}

/// Exhaustive count over all residues modulo `p^m`.
pub fn count_roots_bruteforce(h: &[BigInt], p: u64, m: u32) -> Result<RootCount> {
    let d = deg_mod_p(h, p)?;
    let pm = pow_u64(p, m)?;
    let c: Vec<u64> = h.iter().map(|x| reduce_big(x, pm)).collect();
    let count = (0..pm)
        .filter(|&a| {
            let mut acc = 0u128;
            for &x in c.iter().rev() {
                acc = (acc * a as u128 + x as u128) % pm as u128;
            }
            acc == 0
        })
        .count() as u128;
    Ok(RootCount { count, bound: root_bound(d, p, m), method: Method::Brute })
}

/// Coefficients of `h(a + p k)` as a polynomial in `k`.
fn expand_at(h: &[BigInt], a: u64, p: u64) -> Vec<BigInt> {
    // Taylor shift by a, then scale k -> p k
    let mut c = h.to_vec();
    let a = BigInt::from(a);
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &c[j + 1] * &a;
            c[j] += t;
        }
    }
    let pb = BigInt::from(p);
    let mut pw = BigInt::one();
    for x in c.iter_mut() {
        *x *= &pw;
        pw *= &pb;
    }
    c
}

struct Lifter {
    p: u64,
    memo: HashMap<(Vec<BigInt>, u32), u128>,
}

impl Lifter {
    /// Normalise coefficients modulo `p^m` for memoisation.
    fn key(&self, h: &[BigInt], m: u32) -> Vec<BigInt> {
        let pm = num_traits::pow(BigInt::from(self.p), m as usize);
        int_coeffs(&h.iter().map(|x| x.mod_floor(&pm)).collect::<Vec<_>>())
    }

    /// `h` is nonzero mod `p`.
    fn count(&mut self, h: &[BigInt], m: u32, trace: Option<&mut Vec<LiftStep>>) -> u128 {
        let key = self.key(h, m);
        if trace.is_none() {
            if let Some(&c) = self.memo.get(&(key.clone(), m)) {
                return c;
            }
        }
        let p = self.p;
        let roots = FpPoly::from_bigints(&key, p).roots();
        let mut total = 0u128;
        let mut steps = Vec::new();
        for a in roots {
            let e = expand_at(&key, a, p);
            let r = e
                .iter()
                .filter_map(|x| vp_int(x, p).finite())
                .min()
                .expect("nonzero polynomial") as u32;
            let pr = num_traits::pow(BigInt::from(p), r as usize);
            let quot: Vec<BigInt> = e.iter().map(|x| x / &pr).collect();
            let qdeg = FpPoly::from_bigints(&quot, p).degree();
            steps.push(LiftStep { root: a, r, quotient_degree: qdeg });
            total += if r >= m {
                (p as u128).pow(m - 1)
            } else {
                (p as u128).pow(r - 1) * self.count(&quot, m - r, None)
            };
        }
        if let Some(t) = trace {
            *t = steps;
        }
        self.memo.insert((key, m), total);
        total
    }
}

/// Count by lifting: a root `a mod p` with `r(a) = min_j (v_p(h^{(j)}(a)/j!) + j)`
/// contributes `p^{r-1} #A_{m-r}(H_a)` where `H_a(k) = h(a + pk)/p^r`.
pub fn count_roots_lifting(h: &[BigInt], p: u64, m: u32) -> Result<RootCount> {
    Ok(count_roots_lifting_traced(h, p, m)?.0)
}

/// As [`count_roots_lifting`], also returning the top-level lifting data.
pub fn count_roots_lifting_traced(h: &[BigInt], p: u64, m: u32) -> Result<(RootCount, Vec<LiftStep>)> {
    let d = deg_mod_p(h, p)?;
    if m == 0 {
        return Err(Error::Range("m must be at least 1".into()));
    }
    let mut l = Lifter { p, memo: HashMap::new() };
    let mut steps = Vec::new();
    let count = l.count(&int_coeffs(h), m, Some(&mut steps));
    Ok((RootCount { count, bound: root_bound(d, p, m), method: Method::Lifting }, steps))
}

/// Count `a mod p^m` with `h_+(a) = 0 mod p^m` and `h_-(a)` a unit mod `p`.
pub fn count_roots_with_denominator(h: &RationalFunction, p: u64, m: u32, method: Method) -> Result<RootCount> {
    let num = h.num_int();
    let den = FpPoly::from_bigints(&h.den_int(), p);
    let d = deg_mod_p(&num, p)?;
    let bound = root_bound(d, p, m);
    let count = match method {
        Method::Brute => {
            let pm = pow_u64(p, m)?;
            let c: Vec<u64> = num.iter().map(|x| reduce_big(x, pm)).collect();
            (0..pm)
                .filter(|&a| den.eval(a % p) != 0)
                .filter(|&a| c.iter().rev().fold(0u128, |acc, &x| (acc * a as u128 + x as u128) % pm as u128) == 0)
                .count() as u128
        }
        Method::Lifting => {
            let mut l = Lifter { p, memo: HashMap::new() };
            let key = int_coeffs(&num);
            let roots = FpPoly::from_bigints(&key, p).roots();
            let mut total = 0u128;
            for a in roots.into_iter().filter(|&a| den.eval(a) != 0) {
                let e = expand_at(&key, a, p);
                let r = e.iter().filter_map(|x| vp_int(x, p).finite()).min().unwrap() as u32;
                let pr = num_traits::pow(BigInt::from(p), r as usize);
                let quot: Vec<BigInt> = e.iter().map(|x| x / &pr).collect();
                total += if r >= m { (p as u128).pow(m - 1) } else { (p as u128).pow(r - 1) * l.count(&quot, m - r, None) };
            }
            total
        }
    };
    Ok(RootCount { count, bound, method })
}

/// `prod_{i=1}^{d} (x - i p^r)`, the family attaining the root bound.
pub fn extremal_family(d: usize, p: u64, r: u32) -> Vec<BigInt> {
    let mut c = vec![BigInt::one()];
    let pr = BigInt::from(p).pow(r);
    for i in 1..=d {
        let root = &pr * BigInt::from(i);
        let mut next = vec![BigInt::zero(); c.len() + 1];
        for (j, x) in c.iter().enumerate() {
            next[j + 1] += x;
            next[j] -= x * &root;
        }
        c = next;
    }
    c
}

/// Largest absolute coefficient, for reporting.
pub fn height(h: &[BigInt]) -> BigInt {
    h.iter().map(|x| x.abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(count_roots_bruteforce(&b(&[0, 1]), 3, 2).unwrap().count, 1);
        assert_eq!(count_roots_bruteforce(&b(&[50, -15, 1]), 5, 3).unwrap().count, 10);
        assert_eq!(count_roots_bruteforce(&b(&[1, 0, 1]), 3, 1).unwrap().count, 0);
        let c = count_roots_lifting(&b(&[0, 0, 1]), 7, 3).unwrap();
        assert_eq!((c.count, c.bound), (7, 14));
        assert!(matches!(count_roots_bruteforce(&b(&[5, 10]), 5, 2), Err(Error::ZeroModP(5))));
    }

    #[test]
    fn extremal_attains_bound() {
        for (d, p, r) in [(2usize, 5u64, 1u32), (3, 7, 1), (2, 5, 2)] {
            let h = extremal_family(d, p, r);
            let m = d as u32 * r + 1;
            let c = count_roots_lifting(&h, p, m).unwrap();
            assert_eq!(c.count, c.bound, "d={d} p={p} r={r}");
            assert_eq!(c.count, count_roots_bruteforce(&h, p, m).unwrap().count);
        }
        assert_eq!(count_roots_lifting(&extremal_family(2, 5, 1), 5, 3).unwrap().count, 10);
    }

    #[test]
    fn lifting_matches_brute() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..150 {
            let d = rng.gen_range(1..=5);
            let h: Vec<BigInt> = (0..=d).map(|_| BigInt::from(rng.gen_range(-20..=20))).collect();
            let p = [3u64, 5, 7, 11, 13][rng.gen_range(0..5)];
            if FpPoly::from_bigints(&h, p).is_zero() {
                continue;
            }
            let m = rng.gen_range(1..=4);
            let (l, steps) = count_roots_lifting_traced(&h, p, m).unwrap();
            assert_eq!(l.count, count_roots_bruteforce(&h, p, m).unwrap().count, "{h:?} p={p} m={m}");
            assert!(l.count <= l.bound);
            let dp = FpPoly::from_bigints(&h, p).degree() as u32;
            assert!(steps.iter().map(|s| s.r).sum::<u32>() <= dp);
            assert!(steps.iter().all(|s| s.quotient_degree as u32 <= s.r));
        }
    }

    #[test]
    fn denominator_examples() {
        let h = RationalFunction::parse("x/(x-1)").unwrap();
        for m in [Method::Brute, Method::Lifting] {
            assert_eq!(count_roots_with_denominator(&h, 5, 2, m).unwrap().count, 1);
        }
        let h = RationalFunction::parse("(x-5)*(x-10)/x").unwrap();
        for m in [Method::Brute, Method::Lifting] {
            assert_eq!(count_roots_with_denominator(&h, 5, 3, m).unwrap().count, 0);
        }
    }
}
