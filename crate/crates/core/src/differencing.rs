//! Shift systems and the differenced pair `(f*, g^+)`, the van der Corput
//! inequalities with their explicit constants, and the Fourier bound for a
//! periodic function summed over an interval.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::certificate::CertifiedBound;
use crate::characters::Component;
use crate::error::{Error, Result};
use crate::modarith::{gcd, vp_int, vp_u64};
use crate::periodic::{dft_abs, local_table};
use crate::ratfun::{delta_fgk, PowerIndex, RationalFunction};

pub use crate::periodic::PeriodicFn;

/// Largest `M` with `M^3 r^2 <= N^2`, i.e. `floor((N/r)^{2/3})` computed exactly.
pub fn shift_range(n: u64, r: u64) -> u64 {
    let target = n as u128 * n as u128;
    let r2 = r as u128 * r as u128;
    let fits = |m: u128| m.checked_pow(3).and_then(|c| c.checked_mul(r2)).is_some_and(|v| v <= target);
    let mut m = (n as f64 / r as f64).powf(2.0 / 3.0).floor() as u128;
    while m > 0 && !fits(m) {
        m -= 1;
    }
    while fits(m + 1) {
        m += 1;
    }
    m as u64
}

/// Moduli `q_1..q_k`, co-modulus `Q`, interval length `N`, ranges
/// `M_i = floor((N/q_i)^{2/3})` and (optionally) shifts `h_{i,0}, h_{i,1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftSystem {
    pub qs: Vec<u64>,
    pub big_q: u64,
    pub n: u64,
    pub ms: Vec<u64>,
    pub h: Vec<(u64, u64)>,
}

impl ShiftSystem {
    pub fn new(qs: Vec<u64>, big_q: u64, n: u64) -> Result<Self> {
        if n == 0 || big_q == 0 || qs.contains(&0) {
            return Err(Error::Range("moduli and N must be positive".into()));
        }
        let all: Vec<u64> = qs.iter().copied().chain([big_q]).collect();
        for (i, &a) in all.iter().enumerate() {
            for &b in &all[i + 1..] {
                if gcd(a, b) != 1 {
                    return Err(Error::NotCoprimeSplit(format!("gcd({a}, {b}) > 1")));
                }
            }
        }
        all.iter()
            .try_fold(1u64, |acc, &x| acc.checked_mul(x))
            .ok_or_else(|| Error::Overflow("product of the moduli".into()))?;
        let ms = qs.iter().map(|&q| shift_range(n, q)).collect();
        Ok(ShiftSystem { qs, big_q, n, ms, h: Vec::new() })
    }

    pub fn k(&self) -> usize {
        self.qs.len()
    }

    /// `q = q_1 ... q_k Q`
    pub fn modulus(&self) -> u64 {
        self.qs.iter().product::<u64>() * self.big_q
    }

    pub fn with_shifts(&self, h: Vec<(u64, u64)>) -> Result<Self> {
        if h.len() != self.k() {
            return Err(Error::Range(format!("expected {} shift pairs, got {}", self.k(), h.len())));
        }
        for (i, &(a, b)) in h.iter().enumerate() {
            if a == b || a == 0 || b == 0 || a > self.ms[i] || b > self.ms[i] {
                return Err(Error::Range(format!("shift pair ({a}, {b}) outside 1..={} or equal", self.ms[i])));
            }
        }
        Ok(ShiftSystem { h, ..self.clone() })
    }

    /// The van der Corput inequality needs every `M_i >= 5`.
    pub fn require_ranges(&self) -> Result<()> {
        match self.ms.iter().position(|&m| m < 5) {
            Some(i) => Err(Error::Range(format!("M_{} = {} < 5", i + 1, self.ms[i]))),
            None => Ok(()),
        }
    }

    /// Integer shifts `(h_{i,0} q_i, h_{i,1} q_i)`.
    pub fn offsets(&self) -> Vec<(i64, i64)> {
        self.h.iter().zip(&self.qs).map(|(&(a, b), &q)| ((a * q) as i64, (b * q) as i64)).collect()
    }

    /// `v_p(h) = sum_i v_p(h_{i,1} - h_{i,0})`
    pub fn h_valuation(&self, p: u64) -> u32 {
        self.h.iter().map(|&(a, b)| vp_u64(a.abs_diff(b), p).finite().unwrap_or(0) as u32).sum()
    }
}

/// All `2^k` combined shifts with the sign `(-1)^{j_1 + ... + j_k}`.
pub fn signed_offsets(offsets: &[(i64, i64)]) -> Vec<(BigRational, i32)> {
    (0..1u32 << offsets.len())
        .map(|mask| {
            let s: i64 = offsets.iter().enumerate().map(|(i, &(a, b))| if mask >> i & 1 == 1 { b } else { a }).sum();
            (BigRational::from_integer(BigInt::from(s)), if mask.count_ones() % 2 == 1 { -1 } else { 1 })
        })
        .collect()
}

/// `(f*, g^+)`: the product of shifted `f^{+-1}` and the signed sum of shifted `g`.
pub fn difference_fn(f: &RationalFunction, g: &RationalFunction, offsets: &[(i64, i64)]) -> Result<(RationalFunction, RationalFunction)> {
    let s = signed_offsets(offsets);
    Ok((f.pow_product(&s)?, g.signed_sum(&s)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DiffValuation {
    /// Gauss valuation of `H^+` (or `H^+ + b`) computed from its coefficients.
    pub computed: i64,
    /// `v_p(h)`, or `min(v_p(h), v_p(b))` with a constant `b`.
    pub predicted: i64,
}

/// Valuation of `H^+ (+ b)` at `p` for the shifts of `sys`, next to the value
/// predicted from the shifts alone.
pub fn valuation_of_difference(h: &RationalFunction, sys: &ShiftSystem, p: u64, b: Option<&BigInt>) -> Result<DiffValuation> {
    let k = sys.k();
    let bad = |m: String| Err(Error::HypothesisViolation(m));
    if sys.h.len() != k {
        return bad("shifts not set".into());
    }
    if let Some(q) = sys.qs.iter().find(|&&q| q % p == 0) {
        return bad(format!("p = {p} divides q_i = {q}"));
    }
    if (p as usize) < k + h.deg() {
        return bad(format!("p = {p} < k + deg H = {}", k + h.deg()));
    }
    if h.reduce_mod_p(p).is_err() {
        return bad(format!("H does not reduce to a nonzero function mod {p}"));
    }
    if h.is_polynomial_mod_p(p)? {
        let d = h.deg_p(p)?;
        if d < k || (b.is_some() && d == k) {
            return bad(format!("deg_p H = {d} too small for k = {k}"));
        }
    }
    let mut hp = h.signed_sum(&signed_offsets(&sys.offsets()));
    let v = sys.h_valuation(p) as i64;
    let predicted = match b {
        Some(b) => {
            hp = &hp + &RationalFunction::constant(BigRational::from_integer(b.clone()));
            vp_int(b, p).finite().map_or(v, |vb| vb.min(v))
        }
        None => v,
    };
    let computed = hp.gauss_val(p)?.tau;
    Ok(DiffValuation { computed, predicted })
}

/// `E(a) = (1/N) sum_{start < n <= start + N} a(n)`
pub fn interval_mean(a: &PeriodicFn, start: i64, n: u64) -> Complex64 {
    a.interval_mean(start, n)
}

/// The `Q`-part of `a` when every stored modulus divides `Q` or is coprime to
/// it; otherwise `a` itself. Either form satisfies the differencing inequalities.
pub fn reduce_to(a: &PeriodicFn, big_q: u64) -> PeriodicFn {
    if a.parts().iter().all(|p| big_q % p.modulus == 0 || gcd(big_q, p.modulus) == 1) {
        a.restrict(big_q)
    } else {
        a.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BasicIneqCheck {
    pub m: u64,
    pub lhs_sq: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Sums of `c(x) = b(x) conj(b(x + d))` over windows of length `n`, for periodic `b`.
struct WindowSums {
    period: usize,
    prefix: Vec<Complex64>,
    total: Complex64,
}

impl WindowSums {
    fn new(vals: &[Complex64], d: usize) -> Self {
        let p = vals.len();
        let mut prefix = Vec::with_capacity(p + 1);
        let mut acc = Complex64::new(0.0, 0.0);
        prefix.push(acc);
        for x in 0..p {
            acc += vals[x] * vals[(x + d) % p].conj();
            prefix.push(acc);
        }
        WindowSums { period: p, prefix, total: acc }
    }

    /// `sum_{x0 < x <= x0 + n} c(x)`
    fn window(&self, x0: i64, n: u64) -> Complex64 {
        let p = self.period as u64;
        let mut s = self.total * (n / p) as f64;
        let rem = n % p;
        let lo = (x0 + 1).rem_euclid(p as i64) as u64;
        let hi = lo + rem;
        if hi <= p {
            s += self.prefix[hi as usize] - self.prefix[lo as usize];
        } else {
            s += self.total - self.prefix[lo as usize] + self.prefix[(hi - p) as usize];
        }
        s
    }
}

/// Both sides of `|E_q(a)|^2 <= 5/M + (2/M^2) sum_{i != j} |E(A_{ir,jr})|` with
/// `M = floor((N/r)^{2/3})` and `A_{ir,jr}(n) = a_Q(n + ir) conj(a_Q(n + jr))`.
pub fn basic_ineq_check(a: &PeriodicFn, r: u64, big_q: u64, start: i64, n: u64) -> Result<BasicIneqCheck> {
    if gcd(r, big_q) != 1 {
        return Err(Error::NotCoprimeSplit(format!("gcd({r}, {big_q}) > 1")));
    }
    let m = shift_range(n, r);
    if m < 5 {
        return Err(Error::Range(format!("M = {m} < 5")));
    }
    let lhs_sq = a.interval_mean(start, n).norm_sqr();
    let b = reduce_to(a, big_q);
    let vals = b.period_values();
    let p = vals.len();
    let pair_sum: f64 = (1..m)
        .into_par_iter()
        .map(|d| {
            let w = WindowSums::new(&vals, ((d * r) % p as u64) as usize);
            // pairs (i, i + d) and their mirror images have equal absolute means
            (1..=m - d).map(|i| 2.0 * w.window(start + (i * r) as i64, n).norm() / n as f64).sum::<f64>()
        })
        .sum();
    let mf = m as f64;
    let rhs = 5.0 / mf + 2.0 * pair_sum / (mf * mf);
    Ok(BasicIneqCheck { m, lhs_sq, rhs, ok: lhs_sq <= rhs + 1e-9 })
}

/// Averages over shift tuples with `h_{i,0} != h_{i,1}` of `|E(a_{[h]})|` and its
/// square, each normalized by `prod M_i^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoldE {
    pub e1: f64,
    pub e2: f64,
    pub tuples: u64,
}

/// Every admissible shift tuple of `sys`, in lexicographic order.
pub fn shift_tuples(sys: &ShiftSystem) -> Vec<Vec<(u64, u64)>> {
    let mut out = vec![Vec::new()];
    for &m in &sys.ms {
        let mut next = Vec::new();
        for t in &out {
            for a in 1..=m {
                for b in (1..=m).filter(|&b| b != a) {
                    let mut u = t.clone();
                    u.push((a, b));
                    next.push(u);
                }
            }
        }
        out = next;
    }
    out
}

/// Exhaustive evaluation of the averages for the `Q`-part of `a`.
pub fn bold_e(a: &PeriodicFn, sys: &ShiftSystem, start: i64, limit: u64) -> Result<BoldE> {
    let count: u128 = sys.ms.iter().map(|&m| m as u128 * m.saturating_sub(1) as u128).product();
    if count > limit as u128 {
        return Err(Error::Range(format!("{count} shift tuples exceed the limit {limit}")));
    }
    let b = reduce_to(a, sys.big_q);
    let norm: f64 = sys.ms.iter().map(|&m| (m * m) as f64).product();
    let (s1, s2) = shift_tuples(sys)
        .par_iter()
        .map(|h| {
            let offs: Vec<(i64, i64)> = h.iter().zip(&sys.qs).map(|(&(x, y), &q)| ((x * q) as i64, (y * q) as i64)).collect();
            let v = b.differenced(&offs).interval_mean(start, sys.n).norm();
            (v, v * v)
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(BoldE { e1: s1 / norm, e2: s2 / norm, tuples: count as u64 })
}

/// `4 sum_i M_i^{-2^{-i}} + 4 E^{1/2^k}`
pub fn first_thm_bound(ms: &[u64], e: f64) -> f64 {
    let k = ms.len() as i32;
    let s: f64 = ms.iter().enumerate().map(|(i, &m)| (m as f64).powf(-(0.5f64).powi(i as i32 + 1))).sum();
    4.0 * s + 4.0 * e.max(0.0).powf((0.5f64).powi(k))
}

/// `X_0` for `X_k = E`, `X_{i-1} = sqrt(5/M_i + 2 X_i)`: the one-step inequality
/// applied level by level with Cauchy-Schwarz between levels.
pub fn iterated_basic_bound(ms: &[u64], e: f64) -> f64 {
    ms.iter().rev().fold(e.max(0.0), |x, &m| (5.0 / m as f64 + 2.0 * x).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct VdcReport {
    pub mean_abs: f64,
    pub e: BoldE,
    pub bound: CertifiedBound,
}

/// How the average of `|E_Q(a_{[h]})|` over shift tuples is obtained.
pub enum EMode<'a> {
    /// Exact means of every differenced function.
    Exhaustive { limit: u64 },
    /// An upper bound for each tuple, given its integer offsets.
    PerTuple(&'a (dyn Fn(&[(i64, i64)]) -> f64 + Sync)),
}

/// Certified bound on `|E_q(a)|` for `q = q_1 ... q_k Q` by `k` differencing steps.
pub fn vdc_certified(a: &PeriodicFn, sys: &ShiftSystem, start: i64, mode: EMode<'_>) -> Result<VdcReport> {
    sys.require_ranges()?;
    let mean_abs = a.interval_mean(start, sys.n).norm();
    let (e, how) = match mode {
        EMode::Exhaustive { limit } => (bold_e(a, sys, start, limit)?, "exhaustive differenced means"),
        EMode::PerTuple(oracle) => {
            let norm: f64 = sys.ms.iter().map(|&m| (m * m) as f64).product();
            let tuples = shift_tuples(sys);
            let s: f64 = tuples
                .par_iter()
                .map(|h| oracle(&h.iter().zip(&sys.qs).map(|(&(x, y), &q)| ((x * q) as i64, (y * q) as i64)).collect::<Vec<_>>()))
                .sum();
            (BoldE { e1: s / norm, e2: f64::NAN, tuples: tuples.len() as u64 }, "per-tuple bound")
        }
    };
    let a_bound = first_thm_bound(&sys.ms, e.e1);
    let b_bound = iterated_basic_bound(&sys.ms, e.e1);
    let mut bound = CertifiedBound::new(a_bound.min(b_bound));
    bound.push("E_Q", how, e.e1);
    for (i, m) in sys.ms.iter().enumerate() {
        bound.push(&format!("M_{}", i + 1), "floor((N/q_i)^{2/3})", *m as f64);
    }
    bound.push("first_thm", "4 sum M_i^{-2^{-i}} + 4 E^{1/2^k}", a_bound);
    bound.push("iterated_basic_ineq", "X_{i-1} = sqrt(5/M_i + 2 X_i), X_k = E", b_bound);
    Ok(VdcReport { mean_abs, e, bound })
}

/// `|sum_{n=1}^{r} e(bn/q)|`
pub fn kernel_abs(q: u64, r: u64, b: u64) -> f64 {
    let b = b % q;
    if b == 0 {
        return r as f64;
    }
    let num = (PI * ((b as u128 * r as u128) % q as u128) as f64 / q as f64).sin().abs();
    let den = (PI * b as f64 / q as f64).sin().abs();
    (num / den).min(r as f64)
}

/// `(q floor(N/q) + sum_{b mod q} |K_b|)/N` where `K_b` sums `e(bn/q)` over the
/// `N mod q` leftover terms: the factor multiplying a uniform bound on the
/// normalized Fourier coefficients.
pub fn kappa(q: u64, n: u64) -> f64 {
    let r = n % q;
    let k: f64 = if r == 0 { 0.0 } else { (0..q).into_par_iter().map(|b| kernel_abs(q, r, b)).sum() };
    ((n / q * q) as f64 + k) / n as f64
}

/// `(|E(a)|, bound)` with bound `(floor(N/q)|A(0)| + (1/q) sum_b |A(b)| |K_b|)/N`,
/// `A` the discrete Fourier transform of one period.
pub fn fourier_interval_bound(a: &PeriodicFn, start: i64, n: u64) -> (f64, f64) {
    let exact = a.interval_mean(start, n).norm();
    let q = a.period();
    let vals = a.period_values();
    let hat = dft_abs(&vals);
    let r = n % q;
    let tail: f64 = if r == 0 {
        0.0
    } else {
        hat.par_iter().enumerate().map(|(b, &x)| x * kernel_abs(q, r, b as u64)).sum::<f64>() / q as f64
    };
    (exact, ((n / q) as f64 * hat[0] + tail) / n as f64)
}

/// `#{1 <= h0 != h1 <= M : d | h0 - h1}` in closed form: `v u(u+1) + (d-v) u(u-1)` for `M = ud + v`.
pub fn pair_count(m: u64, d: u64) -> u128 {
    let (u, v) = ((m / d) as u128, (m % d) as u128);
    v * u * (u + 1) + (d as u128 - v) * u * u.saturating_sub(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairCount {
    pub count: u128,
    pub closed_form: u128,
    pub bound: f64,
}

/// Enumerated count next to the closed form and the bound `M^2/d`.
pub fn pair_count_check(m: u64, d: u64) -> PairCount {
    let count: u128 = if m <= 2000 {
        (1..=m).map(|a| (1..=m).filter(|&b| b != a && a.abs_diff(b) % d == 0).count() as u128).sum()
    } else {
        (1..m).filter(|s| s % d == 0).map(|s| 2 * (m - s) as u128).sum()
    };
    PairCount { count, closed_form: pair_count(m, d), bound: (m as f64) * (m as f64) / d as f64 }
}

/// Conductor exponent of `chi_p^{r_f}` (0 for constant `f`).
pub fn power_conductor_exp(comp: &Component, f: &RationalFunction) -> u32 {
    match f.r_f() {
        PowerIndex::All => 0,
        PowerIndex::Finite(r) => {
            let phi = comp.phi();
            Component { e: ((comp.e as u128 * (r % phi) as u128) % phi as u128) as u64, ..*comp }.conductor_exp()
        }
    }
}

/// Bound on `max_b |sum_{n mod p^m} a_{[h]}(n) e(bn/p^m)| / p^m` for the local
/// factor of `n -> chi_p(f(n)) e(c g(n)/p^m)` differenced `k` times with
/// `v_p(h) = v`. Assumes `p` is coprime to the shift moduli and to `Delta(f, g, k)`.
pub fn diffed_bound(f: &RationalFunction, g: &RationalFunction, comp: &Component, k: usize, v: u32) -> CertifiedBound {
    let (p, m) = (comp.p, comp.m);
    let dd = 2 * (f.deg() + g.deg());
    if dd == 0 {
        return CertifiedBound::trivial("f and g constant");
    }
    let (df_plus, df_minus) = (f.num().degree(), f.den().degree());
    let dg_minus = g.den().degree();
    let two_k = (1u64 << k) as f64;
    let pf = p as f64;
    let d = dd as f64;
    let small_g = g.is_polynomial() && g.deg() <= k + 1;
    let ell = power_conductor_exp(comp, f);
    if small_g && ell == 0 {
        return CertifiedBound::trivial("g polynomial of degree <= k+1 and chi^{r_f} principal at p");
    }
    let m_eff = if small_g { ell } else { m };
    let defect = two_k * (df_plus + df_minus + dg_minus) as f64 / pf;
    let mut out = CertifiedBound::trivial("no applicable estimate");
    if m == 1 {
        if v >= 1 {
            return CertifiedBound::trivial("v_p(h) >= m");
        }
        let b1 = 2.0 * two_k * d / pf.sqrt();
        out = out.min(CertifiedBound::new(b1).with("diffed_m1", "2^{k+1} D / sqrt(p)", b1));
        let deg_fs = if k == 0 { f.deg() } else { (1usize << (k - 1)) * (df_plus + df_minus) };
        let deg_gs = if g.is_polynomial() { g.deg().max(1) } else { (1usize << k) * g.deg() + 1 };
        let w = (2 * deg_fs + 2 * deg_gs - 1) as f64 / pf.sqrt();
        out = out.min(CertifiedBound::new(w).with("diffed_weil", "(2 deg f* + 2 deg(g^+ + bx) - 1)/sqrt(p)", w));
    }
    if m_eff as i64 - v as i64 > 0 {
        let x = (m_eff - v) as f64;
        let b2 = two_k * d * pf.powf(-x / (4.0 * two_k * d));
        out = out.min(CertifiedBound::new(b2).with("diffed_display", "2^k D p^{-(m' - v)/(2^{k+2} D)}", b2));
    }
    if m >= 2 && m_eff as i64 - 1 - v as i64 >= 1 {
        let a = (m_eff - 1 - v) as f64;
        let b3 = two_k * d * pf.powf(-(a / (2.0 * two_k * d)).ceil());
        out = out.min(CertifiedBound::new(b3).with("diffed_postnikov", "2^k D p^{-ceil((m' - 1 - v)/(2^{k+1} D))}", b3));
    }
    if out.value < 1.0 {
        let total = out.value + defect;
        out.push("support_defect", "2^k (deg f_+ + deg f_- + deg g_-)/p", defect);
        out.value = total;
    }
    out.push("m_eff", if small_g { "conductor exponent of chi^{r_f}" } else { "m" }, m_eff as f64);
    out.push("v", "v_p(h)", v as f64);
    out.capped()
}

/// [`diffed_bound`] after checking its hypotheses against the shift system.
pub fn diffed_complete_bound(f: &RationalFunction, g: &RationalFunction, comp: &Component, sys: &ShiftSystem) -> Result<CertifiedBound> {
    let p = comp.p;
    if sys.h.len() != sys.k() {
        return Err(Error::HypothesisViolation("shifts not set".into()));
    }
    if let Some(q) = sys.qs.iter().find(|&&q| q % p == 0) {
        return Err(Error::HypothesisViolation(format!("p = {p} divides q_i = {q}")));
    }
    if (delta_fgk(f, g, sys.k() as u64) % BigInt::from(p)) == BigInt::from(0) {
        return Err(Error::HypothesisViolation(format!("p = {p} divides Delta(f, g, k)")));
    }
    Ok(diffed_bound(f, g, comp, sys.k(), sys.h_valuation(p)))
}

/// `max_b |(1/p^m) sum_r a_{[h]}(r) e(br/p^m)|` for the local table with weight `mult`.
pub fn diffed_local_max(f: &RationalFunction, g: &RationalFunction, comp: &Component, mult: u64, offsets: &[(i64, i64)]) -> f64 {
    let pe = comp.pp().value;
    PeriodicFn::from_table(pe, local_table(f, g, comp, mult, 0)).differenced(offsets).local_fourier_max()[0].1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::DirichletCharacter;
    use crate::periodic::summand;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shift_range_exact() {
        assert_eq!(shift_range(1000, 1), 100);
        assert_eq!(shift_range(999, 1), 99);
        assert_eq!(shift_range(8000, 8), 100);
        for n in 1..300u64 {
            for r in 1..20u64 {
                let m = shift_range(n, r) as u128;
                assert!(m * m * m * (r * r) as u128 <= (n * n) as u128);
                assert!((m + 1).pow(3) * (r * r) as u128 > (n * n) as u128);
            }
        }
    }

    #[test]
    fn difference_of_square() {
        let g = RationalFunction::parse("x^2").unwrap();
        let (fs, gp) = difference_fn(&RationalFunction::x(), &g, &[(0, 7)]).unwrap();
        assert_eq!(gp, RationalFunction::parse("-14*x - 49").unwrap());
        assert_eq!(fs, RationalFunction::parse("x/(x+7)").unwrap());
    }

    #[test]
    fn differenced_matches_character_of_fstar() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = RationalFunction::parse("x^2+3").unwrap();
        let g = RationalFunction::parse("x^3/(x+1)").unwrap();
        let chi = DirichletCharacter::random(11 * 13, &mut rng).unwrap();
        let a = summand(&f, &g, &chi, 1).unwrap();
        let offs = [(11i64, 33i64), (13, 52)];
        let (fs, gp) = difference_fn(&f, &g, &offs).unwrap();
        let b = summand(&fs, &gp, &chi, 1).unwrap();
        let d = a.differenced(&offs);
        for n in 0..143 {
            let (x, y) = (d.eval(n), b.eval(n));
            if x.norm() > 0.5 {
                assert!((x - y).norm() < 1e-9, "n={n}");
            }
        }
    }

    #[test]
    fn valuation_examples() {
        let h = RationalFunction::parse("x^3 + 2*x + 5").unwrap();
        let sys = ShiftSystem::new(vec![3], 1, 100_000).unwrap().with_shifts(vec![(1, 12)]).unwrap();
        let r = valuation_of_difference(&h, &sys, 11, None).unwrap();
        assert_eq!((r.computed, r.predicted), (1, 1));
        let sys = sys.with_shifts(vec![(1, 2)]).unwrap();
        let r = valuation_of_difference(&h, &sys, 11, None).unwrap();
        assert_eq!((r.computed, r.predicted), (0, 0));
        let r = valuation_of_difference(&h, &sys, 11, Some(&BigInt::from(121))).unwrap();
        assert_eq!(r.computed, r.predicted);
        let lin = RationalFunction::parse("x").unwrap();
        assert!(matches!(valuation_of_difference(&lin, &sys, 11, Some(&BigInt::from(1))), Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn basic_inequality_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let chi = DirichletCharacter::random_primitive(7 * 11 * 13, &mut rng).unwrap();
        let a = summand(&RationalFunction::x(), &RationalFunction::zero(), &chi, 1).unwrap();
        let c = basic_ineq_check(&a, 7, 143, 3, 900).unwrap();
        assert!(c.ok);
        // the same right-hand side by direct double loop
        let m = c.m;
        let b = a.restrict(143);
        let mut s = 0.0;
        for i in 1..=m {
            for j in (1..=m).filter(|&j| j != i) {
                let v: Complex64 = (4..=903i64).map(|n| b.eval(n + (i * 7) as i64) * b.eval(n + (j * 7) as i64).conj()).sum();
                s += v.norm() / 900.0;
            }
        }
        let rhs = 5.0 / m as f64 + 2.0 * s / (m * m) as f64;
        assert!((rhs - c.rhs).abs() < 1e-9);
        let one = PeriodicFn::one();
        let c = basic_ineq_check(&one, 7, 1, 0, 900).unwrap();
        assert!((c.lhs_sq - 1.0).abs() < 1e-12 && c.ok);
    }

    #[test]
    fn fourier_bound_dominates() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let q = [101u64, 225, 343, 1001][rng.gen_range(0..4)];
            let chi = DirichletCharacter::random(q, &mut rng).unwrap();
            let a = summand(&RationalFunction::parse("x^2+1").unwrap(), &RationalFunction::x(), &chi, 1).unwrap();
            let n = rng.gen_range(1..=2 * q);
            let (e, b) = fourier_interval_bound(&a, rng.gen_range(-50..50), n);
            assert!(e <= b + 1e-9);
        }
        let chi = DirichletCharacter::random_primitive(101, &mut rng).unwrap();
        let a = summand(&RationalFunction::x(), &RationalFunction::zero(), &chi, 1).unwrap();
        let (e, b) = fourier_interval_bound(&a, 0, 101);
        assert!(e < 1e-9 && b < 1e-9);
    }

    #[test]
    fn pair_counts() {
        let c = pair_count_check(5, 2);
        assert_eq!((c.count, c.closed_form), (8, 8));
        for m in 1..60 {
            for d in 1..20 {
                let c = pair_count_check(m, d);
                assert_eq!(c.count, c.closed_form);
                assert!((c.count as f64) < c.bound || m == 0);
            }
        }
    }

    #[test]
    fn diffed_bound_dominates_brute() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let fs = ["x", "x^2+1", "(x+1)/(x-2)"];
        let gs = ["0", "x^3", "1/(x+3)", "x^2"];
        let mut checked = 0;
        for _ in 0..80 {
            let p = [37u64, 41, 43, 47, 53, 59][rng.gen_range(0..6)];
            let m = rng.gen_range(1..=2u32);
            let f = RationalFunction::parse(fs[rng.gen_range(0..3)]).unwrap();
            let g = RationalFunction::parse(gs[rng.gen_range(0..4)]).unwrap();
            let chi = DirichletCharacter::random(p.pow(m), &mut rng).unwrap();
            let comp = chi.components()[0];
            let k = rng.gen_range(0..=2usize);
            let qs: Vec<u64> = [3u64, 5][..k].to_vec();
            let sys = ShiftSystem::new(qs, p.pow(m), 1_000_000).unwrap();
            let h: Vec<(u64, u64)> = sys.ms.iter().map(|&mm| {
                let a = rng.gen_range(1..=mm);
                let mut b = rng.gen_range(1..=mm);
                while b == a { b = rng.gen_range(1..=mm); }
                (a, b)
            }).collect();
            let sys = sys.with_shifts(h).unwrap();
            let Ok(bound) = diffed_complete_bound(&f, &g, &comp, &sys) else { continue };
            let mult = rng.gen_range(1..p);
            let actual = diffed_local_max(&f, &g, &comp, mult, &sys.offsets());
            assert!(actual <= bound.value + 1e-9, "{f} {g} p={p} m={m} k={k} {actual} > {}", bound.value);
            checked += 1;
        }
        assert!(checked > 20);
    }

    #[test]
    fn vdc_exhaustive_dominates() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let chi = DirichletCharacter::random_primitive(3 * 101, &mut rng).unwrap();
        let a = summand(&RationalFunction::x(), &RationalFunction::zero(), &chi, 1).unwrap();
        let sys = ShiftSystem::new(vec![3], 101, 303).unwrap();
        let r = vdc_certified(&a, &sys, 0, EMode::Exhaustive { limit: 1_000_000 }).unwrap();
        assert!(r.mean_abs <= r.bound.value + 1e-9);
        assert!(r.e.e1 * r.e.e1 <= r.e.e2 + 1e-12);
    }
}
