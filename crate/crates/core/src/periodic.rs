//! One-bounded periodic functions stored as a product of tables over pairwise
//! coprime moduli, and the summand `n -> chi(f(n)) e(s g(n)/q)` built from them.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::characters::{log_table, Component, DirichletCharacter};
use crate::error::Result;
use crate::modarith::{gcd, inv_mod, reduce_big, reduce_i64};
use crate::ratfun::RationalFunction;

#[derive(Clone, Debug)]
pub struct Part {
    pub modulus: u64,
    pub table: Arc<Vec<Complex64>>,
}

/// `a(n) = prod_i t_i(n mod m_i)` with pairwise coprime `m_i`.
#[derive(Clone, Debug)]
pub struct PeriodicFn {
    parts: Vec<Part>,
}

impl PeriodicFn {
    pub fn from_table(modulus: u64, table: Vec<Complex64>) -> Self {
        assert_eq!(table.len() as u64, modulus);
        PeriodicFn { parts: vec![Part { modulus, table: Arc::new(table) }] }
    }

    pub fn from_fn(modulus: u64, f: impl Fn(u64) -> Complex64) -> Self {
        Self::from_table(modulus, (0..modulus).map(f).collect())
    }

    pub fn one() -> Self {
        Self::from_table(1, vec![Complex64::new(1.0, 0.0)])
    }

    /// Product of functions with pairwise coprime periods.
    pub fn product(fs: Vec<PeriodicFn>) -> Self {
        let parts: Vec<Part> = fs.into_iter().flat_map(|f| f.parts).collect();
        for (i, a) in parts.iter().enumerate() {
            for b in &parts[i + 1..] {
                assert_eq!(gcd(a.modulus, b.modulus), 1, "periods must be coprime");
            }
        }
        PeriodicFn { parts }
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn period(&self) -> u64 {
        self.parts.iter().map(|p| p.modulus).product()
    }

    pub fn eval(&self, n: i64) -> Complex64 {
        self.parts.iter().map(|p| p.table[reduce_i64(n, p.modulus) as usize]).product()
    }

    /// `sum_{start < n <= start + len} a(n)`
    pub fn interval_sum(&self, start: i64, len: u64) -> Complex64 {
        let q = self.period();
        let (full, rest) = (len / q, len % q);
        let mut acc = if full > 0 { self.complete_sum() * full as f64 } else { Complex64::new(0.0, 0.0) };
        let mut idx: Vec<u64> = self.parts.iter().map(|p| reduce_i64(start + 1, p.modulus)).collect();
        for _ in 0..rest {
            let mut v = Complex64::new(1.0, 0.0);
            for (p, i) in self.parts.iter().zip(idx.iter_mut()) {
                v *= p.table[*i as usize];
                *i += 1;
                if *i == p.modulus {
                    *i = 0;
                }
            }
            acc += v;
        }
        acc
    }

    pub fn interval_mean(&self, start: i64, len: u64) -> Complex64 {
        self.interval_sum(start, len) / len as f64
    }

    /// Sum over one full period, as a product of the per-part sums.
    pub fn complete_sum(&self) -> Complex64 {
        self.parts.iter().map(|p| p.table.iter().sum::<Complex64>()).product()
    }

    /// Keep the parts whose modulus divides `d`.
    pub fn restrict(&self, d: u64) -> Self {
        let parts: Vec<Part> = self.parts.iter().filter(|p| d % p.modulus == 0).cloned().collect();
        if parts.is_empty() {
            return Self::one();
        }
        PeriodicFn { parts }
    }

    /// `n -> a(n + s0) * conj(a(n + s1))`
    pub fn shifted_pair(&self, s0: i64, s1: i64) -> Self {
        self.differenced(&[(s0, s1)])
    }

    /// The differenced function `prod_{j in {0,1}^k} a(n + sum_i shift_{i, j_i})`,
    /// conjugated when `j_1 + ... + j_k` is odd.
    pub fn differenced(&self, shifts: &[(i64, i64)]) -> Self {
        let k = shifts.len();
        let parts = self
            .parts
            .iter()
            .map(|p| {
                let m = p.modulus;
                let offs: Vec<(u64, bool)> = (0..1u32 << k)
                    .map(|mask| {
                        let mut s = 0i64;
                        for (i, (h0, h1)) in shifts.iter().enumerate() {
                            s = (s + reduce_i64(if mask >> i & 1 == 1 { *h1 } else { *h0 }, m) as i64) % m as i64;
                        }
                        (s as u64, mask.count_ones() % 2 == 1)
                    })
                    .collect();
                let table: Vec<Complex64> = (0..m)
                    .map(|n| {
                        offs.iter().fold(Complex64::new(1.0, 0.0), |acc, &(s, c)| {
                            let v = p.table[((n + s) % m) as usize];
                            acc * if c { v.conj() } else { v }
                        })
                    })
                    .collect();
                Part { modulus: m, table: Arc::new(table) }
            })
            .collect();
        PeriodicFn { parts }
    }

    /// For each part, `max_b |(1/m) sum_r t(r) e(b r/m)|`.
    pub fn local_fourier_max(&self) -> Vec<(u64, f64)> {
        self.parts.iter().map(|p| (p.modulus, dft_abs(&p.table).into_iter().fold(0.0, f64::max) / p.modulus as f64)).collect()
    }

    /// Values over one period (only for small periods).
    pub fn period_values(&self) -> Vec<Complex64> {
        (0..self.period()).map(|n| self.eval(n as i64)).collect()
    }
}

/// `|sum_r t(r) e(-b r/m)|` for every `b`; magnitudes are the same for `e(+br/m)` up to `b -> -b`.
pub fn dft_abs(t: &[Complex64]) -> Vec<f64> {
    let mut buf = t.to_vec();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(buf.len());
    fft.process(&mut buf);
    buf.iter().map(|z| z.norm()).collect()
}

/// Forward DFT `A(b) = sum_r t(r) e(-b r/m)`.
pub fn dft(t: &[Complex64]) -> Vec<Complex64> {
    let mut buf = t.to_vec();
    FftPlanner::<f64>::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

fn horner(c: &[u64], x: u64, m: u64) -> u64 {
    let mut acc = 0u64;
    for &a in c.iter().rev() {
        acc = ((acc as u128 * x as u128 + a as u128) % m as u128) as u64;
    }
    acc
}

/// Table over `n mod p^e` of `chi_p(f(n)) e((mult g(n) + b n)/p^e)`; a term is zero
/// when `f_+(n) f_-(n)` or `g_-(n)` is divisible by `p`.
pub fn local_table(f: &RationalFunction, g: &RationalFunction, comp: &Component, mult: u64, b: u64) -> Vec<Complex64> {
    let pe = comp.pp().value;
    let p = comp.p;
    let phi = comp.phi();
    let logs = log_table(comp.pp());
    let red = |v: Vec<num_bigint::BigInt>| -> Vec<u64> { v.iter().map(|c| reduce_big(c, pe)).collect() };
    let (fa, fb) = (red(f.num_int()), red(f.den_int()));
    let (ga, gb) = (red(g.num_int()), red(g.den_int()));
    let g_den_const = if gb.len() == 1 { inv_mod(gb[0], pe) } else { None };
    let den = phi as u128 * pe as u128;
    let mut out = vec![Complex64::new(0.0, 0.0); pe as usize];
    for n in 0..pe {
        let a = horner(&fa, n, pe);
        let d = horner(&fb, n, pe);
        if a % p == 0 || d % p == 0 {
            continue;
        }
        let gd = horner(&gb, n, pe);
        if gd % p == 0 {
            continue;
        }
        let inv = match g_den_const {
            Some(i) => i,
            None => inv_mod(gd, pe).expect("unit"),
        };
        let gval = (horner(&ga, n, pe) as u128 * inv as u128 % pe as u128) as u64;
        let add = ((mult as u128 * gval as u128 + b as u128 * n as u128) % pe as u128) as u64;
        let la = logs[a as usize] as u128;
        let lb = logs[d as usize] as u128;
        let chi_ph = (comp.e as u128 * ((la + phi as u128 - lb) % phi as u128)) % phi as u128;
        let num = (chi_ph * pe as u128 + add as u128 * phi as u128) % den;
        out[n as usize] = Complex64::from_polar(1.0, std::f64::consts::TAU * (num as f64 / den as f64));
    }
    out
}

/// CRT weight `c_p = (q/p^e)^{-1} mod p^e`, so that `e(x/q) = prod_p e(c_p x / p^e)`.
pub fn crt_weight(q: u64, pe: u64) -> u64 {
    inv_mod((q / pe) % pe, pe).unwrap_or(0)
}

/// `n -> chi(f(n)) e(scale * g(n) / q)` with `q` the modulus of `chi`.
pub fn summand(f: &RationalFunction, g: &RationalFunction, chi: &DirichletCharacter, scale: i64) -> Result<PeriodicFn> {
    let q = chi.modulus();
    if q == 1 {
        return Ok(PeriodicFn::one());
    }
    let parts = chi
        .components()
        .iter()
        .map(|c| {
            let pe = c.pp().value;
            let mult = (crt_weight(q, pe) as u128 * reduce_i64(scale, pe) as u128 % pe as u128) as u64;
            Part { modulus: pe, table: Arc::new(local_table(f, g, c, mult, 0)) }
        })
        .collect();
    Ok(PeriodicFn { parts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::CharValue;
    use crate::modarith::rational_mod;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn direct_term(f: &RationalFunction, g: &RationalFunction, chi: &DirichletCharacter, n: i64) -> Complex64 {
        let q = chi.modulus();
        let v = chi.eval_at_ratfun(f, n);
        let (gn, gd) = g.eval_parts_int(n);
        if crate::modarith::gcd(reduce_big(&gd, q), q) != 1 || v == CharValue::Zero {
            return Complex64::new(0.0, 0.0);
        }
        let r = rational_mod(&BigRational::new(gn, gd), q).unwrap();
        v.to_complex() * crate::characters::e_frac(r, q)
    }

    #[test]
    fn crt_product_matches_direct_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = RationalFunction::parse("(x^2+1)/(x-3)").unwrap();
        let g = RationalFunction::parse("x^3/(x+2) + x/5").unwrap();
        for q in [63u64, 225, 1001, 3 * 49] {
            let chi = DirichletCharacter::random(q, &mut rng).unwrap();
            let a = summand(&f, &g, &chi, 1).unwrap();
            let mut direct = Complex64::new(0.0, 0.0);
            for n in 0..q as i64 {
                let t = direct_term(&f, &g, &chi, n);
                assert!((a.eval(n) - t).norm() < 1e-9, "q={q} n={n}");
                direct += t;
            }
            assert!((a.complete_sum() - direct).norm() < 1e-9 * q as f64);
            assert!((a.interval_sum(-1, q) - direct).norm() < 1e-9 * q as f64);
        }
    }

    #[test]
    fn differenced_matches_pointwise() {
        let chi = DirichletCharacter::random_primitive(5 * 7 * 9, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let a = summand(&RationalFunction::x(), &RationalFunction::parse("x^2").unwrap(), &chi, 1).unwrap();
        let shifts = [(3i64, 7i64), (10, 2)];
        let d = a.differenced(&shifts);
        for n in 0..60i64 {
            let mut v = Complex64::new(1.0, 0.0);
            for mask in 0..4 {
                let s = (if mask & 1 == 1 { 7 } else { 3 }) + (if mask & 2 == 2 { 2 } else { 10 });
                let t = a.eval(n + s);
                v *= if (mask as u32).count_ones() % 2 == 1 { t.conj() } else { t };
            }
            assert!((d.eval(n) - v).norm() < 1e-9);
        }
    }
}
