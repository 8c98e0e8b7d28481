//! Characters modulo `p^m` on `1 + p^l Z` as additive characters of the
//! truncated `p`-adic logarithm, and the complete-sum bounds that follow.
//!
//! For every character `chi mod p^m` there is `C in [1, p^{m-1}]` with
//! `chi(1 + x) = e(-C L(x)/p^m)` for `p | x`, where `L(x) = sum_{j <= J} (-x)^j/j`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::certificate::CertifiedBound;
use crate::characters::{e_frac, Component, DirichletCharacter};
use crate::complete_sums::weil_bound;
use crate::error::{Error, Result};
use crate::ffield::FpPoly;
use crate::modarith::{rational_mod, reduce_big, vp_int, vp_u64};
use crate::periodic::local_table;
use crate::ratfun::{PowerIndex, RationalFunction};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PostnikovData {
    pub p: u64,
    pub m: u32,
    /// `C_chi` in `[1, p^{m-1}]`.
    pub c: u64,
    pub i_index: u32,
    pub j_index: u32,
}

fn v_frac(n: u64, p: u64) -> i64 {
    vp_u64(n, p).finite().unwrap()
}

/// Smallest `I`, `J` with `v_p(p^{il}/i!) >= m` for all `i > I` and
/// `v_p(p^{jl}/j) >= m` for all `j > J`.
pub fn truncation_indices(p: u64, l: u32, m: u32) -> (u32, u32) {
    let limit = 4 * m + 40;
    let mut i_idx = 0;
    let mut j_idx = 0;
    let mut fact_v = 0i64;
    for j in 1..=limit {
        fact_v += v_frac(j as u64, p);
        if (j as i64) * l as i64 - fact_v < m as i64 {
            i_idx = j;
        }
        if (j as i64) * l as i64 - v_frac(j as u64, p) < m as i64 {
            j_idx = j;
        }
    }
    (i_idx, j_idx)
}

fn single_component(chi: &DirichletCharacter) -> Result<Component> {
    match chi.components() {
        [c] => Ok(*c),
        _ => Err(Error::Range(format!("modulus {} is not an odd prime power", chi.modulus()))),
    }
}

fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// `sum_{i <= I} p^{il}/i!` reduced modulo `p^m`.
pub fn truncated_exp(p: u64, l: u32, m: u32) -> u64 {
    let (i_idx, _) = truncation_indices(p, l, m);
    let pm = pow_big(p, m).to_u64().expect("fits");
    let mut acc = BigRational::zero();
    let mut fact = BigInt::one();
    for i in 0..=i_idx {
        if i > 0 {
            fact *= BigInt::from(i);
        }
        acc += BigRational::new(pow_big(p, l * i), fact.clone());
    }
    rational_mod(&acc, pm).expect("p-integral")
}

/// `L(x) = sum_{j=1}^{J} (-x)^j / j`, exact.
pub fn truncated_neg_log(x: &BigRational, j_idx: u32) -> BigRational {
    let mut acc = BigRational::zero();
    let mut pw = BigRational::one();
    let mx = -x.clone();
    for j in 1..=j_idx {
        pw *= &mx;
        acc += &pw / BigRational::from_integer(BigInt::from(j));
    }
    acc
}

/// Read `C_chi` off `chi(truncated e^p) = e(C/p^{m-1})`.
pub fn postnikov_constant(chi: &DirichletCharacter) -> Result<PostnikovData> {
    let comp = single_component(chi)?;
    let (p, m) = (comp.p, comp.m);
    let (i_index, j_index) = truncation_indices(p, 1, m);
    let pm1 = p.pow(m - 1);
    let e = truncated_exp(p, 1, m);
    let ph = comp.phase(e).expect("unit");
    // chi(e) has order dividing p^{m-1}; its phase over phi is a multiple of p - 1
    debug_assert_eq!(ph % (p - 1), 0);
    let mut c = (ph / (p - 1)) % pm1;
    if c == 0 {
        c = pm1;
    }
    Ok(PostnikovData { p, m, c, i_index, j_index })
}

/// `C_{chi,l}` from `chi(truncated e^{p^l}) = e(C_l/p^{m-l})`; equals `C_chi mod p^{m-l}`.
pub fn postnikov_constant_at_level(chi: &DirichletCharacter, l: u32) -> Result<u64> {
    let comp = single_component(chi)?;
    let (p, m) = (comp.p, comp.m);
    if l == 0 || l >= m {
        return Err(Error::Range(format!("level {l} outside [1, {}]", m - 1)));
    }
    let e = truncated_exp(p, l, m);
    let ph = comp.phase(e).expect("unit");
    let per = comp.phi() / p.pow(m - l);
    Ok((ph / per) % p.pow(m - l))
}

/// Both sides of `chi(1 + r p^l) = e(-C L(r p^l)/p^m)`.
pub fn postnikov_identity(chi: &DirichletCharacter, data: &PostnikovData, l: u32, r: u64) -> Result<(Complex64, Complex64)> {
    let comp = single_component(chi)?;
    let (p, m) = (comp.p, comp.m);
    let pm = p.pow(m);
    let (_, j_idx) = truncation_indices(p, l, m);
    let x = BigRational::from_integer(BigInt::from(r) * pow_big(p, l));
    let lhs_arg = (1 + (r % pm) * p.pow(l)) % pm;
    let lhs = chi.value(lhs_arg as i64).to_complex();
    let ll = truncated_neg_log(&x, j_idx);
    let phase = rational_mod(&(-ll * BigRational::from_integer(BigInt::from(data.c))), pm).expect("p-integral");
    Ok((lhs, e_frac(phase, pm)))
}

/// `h = g' + C f'/f` for the constant `c`.
pub fn h_function(f: &RationalFunction, g: &RationalFunction, c: u64) -> Result<RationalFunction> {
    let gp = g.derivative();
    if f.is_constant() {
        return Ok(gp);
    }
    let ld = f.log_derivative()?;
    Ok(&gp + &ld.scale(&BigRational::from_integer(BigInt::from(c))))
}

/// Both sides of the expansion of `chi(f(a + b p^l)) e(g(a + b p^l)/p^m)` around `a`.
pub fn expansion_check(
    f: &RationalFunction,
    g: &RationalFunction,
    chi: &DirichletCharacter,
    a: i64,
    b: i64,
    l: u32,
) -> Result<(Complex64, Complex64)> {
    let comp = single_component(chi)?;
    let (p, m) = (comp.p, comp.m);
    let pm = p.pow(m);
    let data = postnikov_constant(chi)?;
    let (_, j_idx) = truncation_indices(p, l, m);
    let h = h_function(f, g, data.c)?;
    let term = |n: i64| -> Option<Complex64> {
        let v = chi.eval_at_ratfun(f, n);
        if v.is_zero() {
            return None;
        }
        let (gn, gd) = g.eval_parts_int(n);
        if reduce_big(&gd, p) == 0 {
            return None;
        }
        Some(v.to_complex() * e_frac(rational_mod(&BigRational::new(gn, gd), pm)?, pm))
    };
    let n = a + b * p.pow(l) as i64;
    let at_a = term(a).ok_or(Error::UndefinedAt(p))?;
    let lhs = term(n).unwrap_or_default();
    let x = BigRational::from_integer(BigInt::from(b) * pow_big(p, l));
    let ar = BigRational::from_integer(BigInt::from(a));
    let mut s = BigRational::zero();
    let mut deriv = h;
    let mut xpow = BigRational::one();
    let mut fact = BigInt::one();
    for j in 1..=j_idx {
        xpow *= &x;
        fact *= BigInt::from(j);
        let v = deriv.eval(&ar).ok_or(Error::UndefinedAt(p))?;
        s += &xpow / BigRational::from_integer(fact.clone()) * v;
        deriv = deriv.derivative();
    }
    let ph = rational_mod(&s, pm).ok_or(Error::UndefinedAt(p))?;
    Ok((lhs, at_a * e_frac(ph, pm)))
}

/// `h = p^tau H` with `H` a unit for the Gauss valuation, and `D = deg_p H_+`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauH {
    #[serde(skip)]
    pub h: RationalFunction,
    pub tau: i64,
    #[serde(skip)]
    pub big_h: RationalFunction,
    pub d: usize,
    /// `h` vanishes identically (both `f` and `g` constant); `tau` is set to `m`.
    pub degenerate: bool,
}

pub fn tau_h(f: &RationalFunction, g: &RationalFunction, chi: &DirichletCharacter) -> Result<TauH> {
    let comp = single_component(chi)?;
    let (p, m) = (comp.p, comp.m);
    let data = postnikov_constant(chi)?;
    let h = h_function(f, g, data.c)?;
    if h.is_zero() {
        return Ok(TauH { h: h.clone(), tau: m as i64, big_h: h, d: 0, degenerate: true });
    }
    let gv = h.gauss_val(p)?;
    let d = FpPoly::from_bigints(&gv.h.num_int(), p).degree();
    Ok(TauH { h, tau: gv.tau, big_h: gv.h, d, degenerate: false })
}

/// `p^tau sum_{a mod p^l} chi(f(a)) e(g(a)/p^m) sum_{b mod p^{m-l-tau}} e(b H(a)/p^{m-l-tau})`,
/// valid for `m > l >= (m - tau)/2`.
pub fn complete_sum_factorized(f: &RationalFunction, g: &RationalFunction, chi: &DirichletCharacter, l: u32) -> Result<Complex64> {
    let comp = single_component(chi)?;
    let (p, m) = (comp.p, comp.m);
    let th = tau_h(f, g, chi)?;
    let tau = th.tau;
    if l == 0 || l >= m || p.pow(l) <= 2 || (2 * l as i64) < m as i64 - tau {
        return Err(Error::Range(format!("l = {l} outside the window for m = {m}, tau = {tau}")));
    }
    let table = local_table(f, g, &comp, 1, 0);
    let inner_exp = m as i64 - l as i64 - tau;
    let full = (p as f64).powi((m - l) as i32);
    let pk = if inner_exp > 0 { p.pow(inner_exp as u32) } else { 1 };
    let (hn, hd) = (th.big_h.num_int(), th.big_h.den_int());
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..p.pow(l) {
        let t = table[a as usize];
        if t.norm() == 0.0 {
            continue;
        }
        let hits = if inner_exp <= 0 {
            true
        } else {
            let num: u64 = hn.iter().rev().fold(0u128, |acc, c| (acc * a as u128 + reduce_big(c, pk) as u128) % pk as u128) as u64;
            let den: u64 = hd.iter().rev().fold(0u128, |acc, c| (acc * a as u128 + reduce_big(c, pk) as u128) % pk as u128) as u64;
            debug_assert!(den % p != 0);
            num == 0
        };
        if hits {
            acc += t * full;
        }
    }
    Ok(acc)
}

/// Normalized bound on `|sum_{n mod p^m} chi(f(n)) e(g(n)/p^m)| / p^m`.
pub fn bound_prime_power(f: &RationalFunction, g: &RationalFunction, chi: &DirichletCharacter) -> Result<CertifiedBound> {
    let comp = single_component(chi)?;
    let (p, m) = (comp.p, comp.m);
    if f.is_constant() && g.is_constant() {
        return Err(Error::DegenerateBoth);
    }
    let divides = |v: Vec<BigInt>| -> bool {
        let c = v.iter().fold(BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, x));
        vp_int(&c, p).finite().is_none_or(|e| e > 0)
    };
    if (!f.is_zero() && (divides(f.num_int()) || divides(f.den_int()))) || divides(g.den_int()) || f.is_zero() {
        return Ok(CertifiedBound::new(0.0).with("vanishing", "every term is zero by the non-unit convention", 0.0));
    }
    let pf = p as f64;
    let mut best = if m == 1 {
        match weil_bound(f, g, chi)? {
            Some(b) => CertifiedBound::new(b / pf).with("weil", "(2 deg_p f + 2 deg_p g - 1)/sqrt(p)", b / pf),
            None => CertifiedBound::trivial("degenerate pair modulo p"),
        }
    } else {
        let th = tau_h(f, g, chi)?;
        if th.degenerate || th.tau >= m as i64 - 1 {
            CertifiedBound::trivial("tau >= m - 1").with("tau", "Gauss valuation of h", th.tau as f64)
        } else if th.d == 0 {
            CertifiedBound::new(0.0).with("no_roots", "H_+ is a nonzero constant mod p", 0.0)
        } else {
            let d = th.d as f64;
            let e = ((m as i64 - th.tau - 1) as f64 / (2.0 * d)).ceil();
            let v = d * pf.powf(-e);
            CertifiedBound::new(v)
                .with("postnikov", "D p^{-ceil((m - tau - 1)/(2D))}", v)
                .with("tau", "Gauss valuation of h", th.tau as f64)
                .with("D", "deg_p H_+", d)
        }
    };
    if m >= 2 {
        if let Some(s) = simplified_bound(f, g, &comp) {
            best = best.min(s);
        }
    }
    Ok(best.capped())
}

/// `D' p^{-m/(4D')}` (or `l/(4D')` for constant `g`) with `D' = 2(deg f + deg g)`,
/// for `p > max(16, deg f, deg g)` of good reduction.
fn simplified_bound(f: &RationalFunction, g: &RationalFunction, comp: &Component) -> Option<CertifiedBound> {
    let (p, m) = (comp.p, comp.m);
    if p <= 16 || p as usize <= f.deg().max(g.deg()) || f.bad_prime(p) || g.bad_prime(p) {
        return None;
    }
    let dd = 2.0 * (f.deg() + g.deg()) as f64;
    let ex = if g.is_constant() {
        let l = comp.conductor_exp();
        let r_chi = comp.order();
        let divides = match f.r_f() {
            PowerIndex::All => true,
            PowerIndex::Finite(r) => r % r_chi == 0,
        };
        if l <= 1 && divides {
            return None;
        }
        l as f64
    } else {
        m as f64
    };
    let v = dd * (p as f64).powf(-ex / (4.0 * dd));
    Some(CertifiedBound::new(v).with("postnikov_simplified", "D' p^{-e/(4D')}, D' = 2(deg f + deg g)", v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complete_sums::brute_complete_sum;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rf(s: &str) -> RationalFunction {
        RationalFunction::parse(s).unwrap()
    }

    #[test]
    fn truncation_examples() {
        assert_eq!(truncation_indices(5, 1, 2).1, 1);
        assert_eq!(truncation_indices(5, 1, 3).1, 2);
        assert_eq!(truncation_indices(3, 1, 3).1, 3);
        for p in [3u64, 5, 7] {
            for m in 2..7 {
                assert_eq!(truncation_indices(p, m - 1, m).1, 1);
            }
        }
        assert_eq!(truncated_exp(5, 1, 2), 6);
    }

    #[test]
    fn constant_is_consistent_across_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let chi = DirichletCharacter::random_primitive(243, &mut rng).unwrap();
            let d = postnikov_constant(&chi).unwrap();
            assert_ne!(d.c % 3, 0);
            for l in 1..5 {
                assert_eq!(postnikov_constant_at_level(&chi, l).unwrap(), d.c % 3u64.pow(5 - l));
            }
        }
        let principal = DirichletCharacter::principal(125).unwrap();
        assert_eq!(postnikov_constant(&principal).unwrap().c, 25);
    }

    #[test]
    fn identity_and_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for q in [27u64, 125, 343, 81] {
            let chi = DirichletCharacter::random(q, &mut rng).unwrap();
            let d = postnikov_constant(&chi).unwrap();
            let comp = chi.components()[0];
            for l in 1..comp.m {
                for r in 0..comp.p.pow(comp.m - l) {
                    let (a, b) = postnikov_identity(&chi, &d, l, r).unwrap();
                    assert!((a - b).norm() < 1e-9);
                }
            }
        }
        let chi = DirichletCharacter::random_primitive(625, &mut rng).unwrap();
        let (f, g) = (rf("(x^2+1)/(x+3)"), rf("x^3/(x-2)"));
        for a in 0..25 {
            for b in 0..25 {
                if let Ok((l, r)) = expansion_check(&f, &g, &chi, a, b, 2) {
                    assert!((l - r).norm() < 1e-9, "a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn factorization_matches_brute() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for (q, l) in [(625u64, 2u32), (343, 2), (625, 3), (2187, 4)] {
            let chi = DirichletCharacter::random_primitive(q, &mut rng).unwrap();
            let (f, g) = (rf("x^2+x+1"), rf("x^3 + 2*x"));
            let brute = brute_complete_sum(&f, &g, &chi).unwrap();
            let fac = complete_sum_factorized(&f, &g, &chi, l).unwrap();
            assert!((brute - fac).norm() <= 1e-6 * q as f64, "q={q} {brute} {fac}");
        }
    }

    #[test]
    fn tau_classification() {
        let chi = DirichletCharacter::random_primitive(125, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(tau_h(&rf("x"), &rf("x^2"), &chi).unwrap().tau, 0);
        let t = tau_h(&RationalFunction::one(), &rf("x"), &chi).unwrap();
        assert_eq!((t.tau, t.d), (0, 0));
        let imp = chi.power(5);
        assert_eq!(tau_h(&rf("x+1"), &RationalFunction::zero(), &imp).unwrap().tau, 1);
    }

    #[test]
    fn bound_dominates_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for q in [25u64, 125, 343, 729, 3125] {
            for _ in 0..4 {
                let chi = DirichletCharacter::random(q, &mut rng).unwrap();
                for (f, g) in [("x", "x^2"), ("x^2+1", "0"), ("x/(x+1)", "x^3"), ("1", "x^3+x")] {
                    let b = bound_prime_power(&rf(f), &rf(g), &chi).unwrap();
                    let s = brute_complete_sum(&rf(f), &rf(g), &chi).unwrap().norm() / q as f64;
                    assert!(s <= b.value + 1e-9, "q={q} f={f} g={g} s={s} b={}", b.value);
                }
            }
        }
    }
}
