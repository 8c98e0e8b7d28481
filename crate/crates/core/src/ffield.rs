//! Dense polynomials over the prime field F_p and their factorization
//! (square-free, distinct-degree, equal-degree).

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::modarith::{inv_mod, mul_mod, pow_mod, reduce_big};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    pub fn new(mut c: Vec<u64>, p: u64) -> Self {
        for v in c.iter_mut() {
            *v %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn from_bigints(c: &[BigInt], p: u64) -> Self {
        Self::new(c.iter().map(|v| reduce_big(v, p)).collect(), p)
    }

    pub fn from_i64s(c: &[i64], p: u64) -> Self {
        Self::new(c.iter().map(|&v| crate::modarith::reduce_i64(v, p)).collect(), p)
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, c: vec![] }
    }

    pub fn one(p: u64) -> Self {
        Self::new(vec![1], p)
    }

    pub fn x(p: u64) -> Self {
        Self::new(vec![0, 1], p)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lc(), self.p).expect("nonzero lc");
        self.scale(inv)
    }

    pub fn scale(&self, s: u64) -> Self {
        Self::new(self.c.iter().map(|&v| mul_mod(v, s, self.p)).collect(), self.p)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0;
        for &a in self.c.iter().rev() {
            acc = (mul_mod(acc, x, self.p) + a) % self.p;
        }
        acc
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let v = (0..n)
            .map(|i| (self.c.get(i).copied().unwrap_or(0) + o.c.get(i).copied().unwrap_or(0)) % self.p)
            .collect();
        Self::new(v, self.p)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let v = (0..n)
            .map(|i| (self.c.get(i).copied().unwrap_or(0) + self.p - o.c.get(i).copied().unwrap_or(0)) % self.p)
            .collect();
        Self::new(v, self.p)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let mut v = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                v[i + j] = (v[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        Self::new(v, self.p)
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        if self.c.len() < d.c.len() {
            return (Self::zero(p), self.clone());
        }
        let inv = inv_mod(d.lc(), p).expect("nonzero lc");
        let mut r = self.c.clone();
        let dl = d.c.len();
        let mut q = vec![0u64; r.len() - dl + 1];
        for i in (0..q.len()).rev() {
            let coef = mul_mod(r[i + dl - 1], inv, p);
            q[i] = coef;
            if coef == 0 {
                continue;
            }
            for (j, &b) in d.c.iter().enumerate() {
                r[i + j] = (r[i + j] + p - mul_mod(coef, b, p)) % p;
            }
        }
        (Self::new(q, p), Self::new(r, p))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn derivative(&self) -> Self {
        let v = self.c.iter().enumerate().skip(1).map(|(i, &a)| mul_mod(a, i as u64 % self.p, self.p)).collect();
        Self::new(v, self.p)
    }

    /// Monic gcd.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod m`
    pub fn pow_mod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// `g(x)` with `self = g(x^p)`; requires zero derivative.
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        let v = self.c.iter().step_by(p).copied().collect();
        Self::new(v, self.p)
    }

    /// Square-free factorization of a monic polynomial: pairs `(a_i, i)` with
    /// `self = prod a_i^i`, the `a_i` square-free and pairwise coprime.
    pub fn squarefree(&self) -> Vec<(FpPoly, usize)> {
        let mut out = Vec::new();
        self.monic().squarefree_into(1, &mut out);
        out.sort_by_key(|(_, i)| *i);
        out
    }

    fn squarefree_into(&self, mult: usize, out: &mut Vec<(FpPoly, usize)>) {
        if self.degree() == 0 {
            return;
        }
        let p = self.p as usize;
        let d = self.derivative();
        if d.is_zero() {
            self.pth_root().squarefree_into(mult * p, out);
            return;
        }
        let mut c = Self::gcd(self, &d);
        let mut w = self.div_rem(&c).0;
        let mut i = 1;
        while w.degree() > 0 {
            let y = Self::gcd(&w, &c);
            let z = w.div_rem(&y).0;
            if z.degree() > 0 {
                out.push((z.monic(), i * mult));
            }
            w = y;
            c = c.div_rem(&w).0;
            i += 1;
        }
        if c.degree() > 0 {
            c.pth_root().squarefree_into(mult * p, out);
        }
    }

    /// Distinct-degree factorization of a monic square-free polynomial.
    fn ddf(&self) -> Vec<(FpPoly, usize)> {
        let p = self.p;
        let mut out = Vec::new();
        let mut f = self.clone();
        let x = Self::x(p);
        let mut h = x.rem(&f);
        let mut d = 1;
        while 2 * d <= f.degree() {
            h = h.pow_mod(p as u128, &f);
            let g = Self::gcd(&f, &h.sub(&x));
            if g.degree() > 0 {
                out.push((g.clone(), d));
                f = f.div_rem(&g).0;
                h = h.rem(&f);
            }
            d += 1;
        }
        if f.degree() > 0 {
            let deg = f.degree();
            out.push((f, deg));
        }
        out
    }

    /// Equal-degree splitting (Cantor–Zassenhaus), odd `p`.
    fn edf(&self, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<FpPoly>) {
        let n = self.degree();
        if n == d {
            out.push(self.monic());
            return;
        }
        let p = self.p;
        let e = ((p as u128).pow(d as u32) - 1) / 2;
        loop {
            let a = Self::new((0..n).map(|_| rng.gen_range(0..p)).collect(), p);
            if a.degree() == 0 {
                continue;
            }
            let b = a.pow_mod(e, self).sub(&Self::one(p));
            let g = Self::gcd(self, &b);
            if g.degree() > 0 && g.degree() < n {
                let other = self.div_rem(&g).0;
                g.edf(d, rng, out);
                other.edf(d, rng, out);
                return;
            }
        }
    }

    /// Complete factorization into monic irreducibles with multiplicities.
    /// Deterministic: equal-degree splitting uses a fixed seed.
    pub fn factor(&self) -> Vec<(FpPoly, usize)> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ self.p);
        let mut out = Vec::new();
        for (a, i) in self.squarefree() {
            for (g, d) in a.ddf() {
                let mut parts = Vec::new();
                g.edf(d, &mut rng, &mut parts);
                out.extend(parts.into_iter().map(|h| (h, i)));
            }
        }
        out.sort_by(|a, b| (a.0.degree(), &a.0.c, a.1).cmp(&(b.0.degree(), &b.0.c, b.1)));
        out
    }

    /// Roots in F_p by exhaustive search.
    pub fn roots(&self) -> Vec<u64> {
        (0..self.p).filter(|&a| self.eval(a) == 0).collect()
    }
}

/// Whether `num/den` is `c * F^r` over F_p for some rational function `F`.
/// Both inputs must be nonzero and coprime.
pub fn is_rth_power_ratio(num: &FpPoly, den: &FpPoly, r: u64) -> bool {
    if r <= 1 {
        return true;
    }
    num.factor().iter().chain(den.factor().iter()).all(|(_, i)| *i as u64 % r == 0)
}

/// Multiplicative order of `a` in F_p^*, by trial over divisors of `p - 1`.
pub fn order_mod_p(a: u64, p: u64) -> u64 {
    let n = p - 1;
    let mut best = n;
    for (q, _) in crate::modarith::factor_u64(n) {
        while best % q == 0 && pow_mod(a, best / q, p) == 1 {
            best /= q;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prod(fs: &[(FpPoly, usize)], p: u64) -> FpPoly {
        let mut acc = FpPoly::one(p);
        for (g, i) in fs {
            for _ in 0..*i {
                acc = acc.mul(g);
            }
        }
        acc
    }

    #[test]
    fn factor_recombines() {
        let p = 7;
        let f = FpPoly::from_i64s(&[1, 0, 1], p).mul(&FpPoly::from_i64s(&[-1, 1], p).mul(&FpPoly::from_i64s(&[-1, 1], p)));
        let fs = f.factor();
        assert_eq!(prod(&fs, p), f.monic());
        assert_eq!(fs.len(), 2);
        // x^p - x splits into all linear factors
        let mut c = vec![0i64; 6];
        c[5] = 1;
        c[1] = -1;
        let fs = FpPoly::from_i64s(&c, 5).factor();
        assert_eq!(fs.len(), 5);
        assert!(fs.iter().all(|(g, i)| g.degree() == 1 && *i == 1));
    }

    #[test]
    fn pth_power_parts() {
        let p = 3;
        // (x+1)^3 (x+2)^4
        let a = FpPoly::from_i64s(&[1, 1], p);
        let b = FpPoly::from_i64s(&[2, 1], p);
        let f = prod(&[(a.clone(), 3), (b.clone(), 4)], p);
        let sf = f.squarefree();
        assert_eq!(sf, vec![(a, 3), (b, 4)]);
    }

    #[test]
    fn rth_powers() {
        let p = 5;
        let x2 = FpPoly::from_i64s(&[0, 0, 1], p);
        assert!(is_rth_power_ratio(&x2, &FpPoly::one(p), 2));
        let xx1 = FpPoly::from_i64s(&[0, 1, 1], p);
        assert!(!is_rth_power_ratio(&xx1, &FpPoly::one(p), 2));
        // x^2 + 1 = (x-2)(x-3) mod 5, not a square
        assert!(!is_rth_power_ratio(&FpPoly::from_i64s(&[1, 0, 1], p), &FpPoly::one(p), 2));
        // x^2 - 2x + 1 = (x-1)^2
        assert!(is_rth_power_ratio(&FpPoly::from_i64s(&[1, -2, 1], p), &FpPoly::one(p), 2));
    }

    #[test]
    fn irreducible_counts() {
        // number of monic irreducible quadratics over F_7 is (49-7)/2 = 21
        let p = 7;
        let mut count = 0;
        for b in 0..p {
            for c in 0..p {
                let f = FpPoly::new(vec![c, b, 1], p);
                let fs = f.factor();
                if fs.len() == 1 && fs[0].1 == 1 && fs[0].0.degree() == 2 {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 21);
        assert_eq!(order_mod_p(3, 7), 6);
        assert_eq!(order_mod_p(2, 7), 3);
    }
}
