//! Brute-force complete and incomplete sums, degeneracy modulo `p`, the Weil
//! bound predicate and the `r`-th power test over the prime field.

use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

use crate::characters::{e_frac, CharValue, Component, DirichletCharacter};
use crate::error::{Error, Result};
use crate::ffield::{is_rth_power_ratio, FpPoly};
use crate::modarith::{gcd, rational_mod, reduce_big};
use crate::periodic::{local_table, summand, PeriodicFn};
use crate::ratfun::RationalFunction;

/// `sum_{M < n <= M + N} chi(f(n)) e(g(n)/q)` with `q` the modulus of `chi`.
#[derive(Clone, Debug)]
pub struct SumInstance {
    pub f: RationalFunction,
    pub g: RationalFunction,
    pub chi: DirichletCharacter,
    pub start: i64,
    pub len: u64,
}

impl SumInstance {
    pub fn new(f: RationalFunction, g: RationalFunction, chi: DirichletCharacter, start: i64, len: u64) -> Self {
        SumInstance { f, g, chi, start, len }
    }

    /// The complete sum over `0 < n <= q`.
    pub fn complete(f: RationalFunction, g: RationalFunction, chi: DirichletCharacter) -> Self {
        let q = chi.modulus();
        Self::new(f, g, chi, 0, q)
    }

    pub fn q(&self) -> u64 {
        self.chi.modulus()
    }

    pub fn summand(&self) -> Result<PeriodicFn> {
        summand(&self.f, &self.g, &self.chi, 1)
    }
}

/// Complete sum as a product of prime-power sums.
pub fn brute_complete_sum(f: &RationalFunction, g: &RationalFunction, chi: &DirichletCharacter) -> Result<Complex64> {
    Ok(summand(f, g, chi, 1)?.complete_sum())
}

/// Sum over the interval of the instance.
pub fn brute_interval_sum(inst: &SumInstance) -> Result<Complex64> {
    Ok(inst.summand()?.interval_sum(inst.start, inst.len))
}

/// One term evaluated directly from exact integers, without tables.
pub fn direct_term(f: &RationalFunction, g: &RationalFunction, chi: &DirichletCharacter, n: i64) -> Complex64 {
    let q = chi.modulus();
    let v = chi.eval_at_ratfun(f, n);
    if v == CharValue::Zero {
        return Complex64::new(0.0, 0.0);
    }
    let (gn, gd) = g.eval_parts_int(n);
    if gcd(reduce_big(&gd, q), q) != 1 {
        return Complex64::new(0.0, 0.0);
    }
    match rational_mod(&BigRational::new(gn, gd), q) {
        Some(r) => v.to_complex() * e_frac(r, q),
        None => Complex64::new(0.0, 0.0),
    }
}

/// Single-loop sum over `(start, start + len]`, term by term.
pub fn direct_sum(f: &RationalFunction, g: &RationalFunction, chi: &DirichletCharacter, start: i64, len: u64) -> Complex64 {
    (1..=len as i64).map(|i| direct_term(f, g, chi, start + i)).sum()
}

/// `sum_{n mod p^m} chi_p(f(n)) e((mult g(n) + b n)/p^m)`
pub fn prime_power_sum(f: &RationalFunction, g: &RationalFunction, comp: &Component, mult: u64, b: u64) -> Complex64 {
    local_table(f, g, comp, mult, b).into_iter().sum()
}

/// Whether `f = c F^r` modulo `p` (false when `f` vanishes mod `p`).
pub fn rth_power_test_mod_p(f: &RationalFunction, p: u64, r: u64) -> Result<bool> {
    match f.reduce_mod_p(p) {
        Ok((n, d)) => Ok(is_rth_power_ratio(&n, &d, r)),
        Err(Error::ZeroModP(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegeneracyWitness {
    /// `r_chi`
    pub r: u64,
    /// Constant value of `g` modulo `p` on its support.
    pub c2: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegeneracyReport {
    pub is_degenerate: bool,
    pub witness: Option<DegeneracyWitness>,
}

fn single_component(chi: &DirichletCharacter) -> Result<Component> {
    match chi.components() {
        [c] => Ok(*c),
        _ => Err(Error::Range(format!("modulus {} is not a prime power", chi.modulus()))),
    }
}

/// Residue of `g` modulo `p` if it is constant on the points where it is defined.
fn g_constant_value(g: &RationalFunction, p: u64) -> Result<Option<u64>> {
    if g.is_zero() {
        return Ok(Some(0));
    }
    let (gn, gd) = match g.reduce_mod_p(p) {
        Ok(x) => x,
        Err(Error::ZeroModP(_)) => return Ok(Some(0)),
        Err(e) => return Err(e),
    };
    if (g.deg() as u64) < p {
        if gn.degree() == 0 && gd.degree() == 0 {
            let inv = crate::modarith::inv_mod(gd.lc(), p).expect("unit");
            return Ok(Some(gn.coeffs().first().copied().unwrap_or(0) * inv % p));
        }
        return Ok(None);
    }
    let mut val = None;
    for n in 0..p {
        let d = gd.eval(n);
        if d == 0 {
            continue;
        }
        let v = gn.eval(n) * crate::modarith::inv_mod(d, p).unwrap() % p;
        match val {
            None => val = Some(v),
            Some(w) if w != v => return Ok(None),
            _ => {}
        }
    }
    Ok(Some(val.unwrap_or(0)))
}

/// Detect `f = c_1 F^{r_chi}` and `g = G^p - G + c_2` modulo `p`.
pub fn degeneracy_mod_p(f: &RationalFunction, g: &RationalFunction, chi: &DirichletCharacter) -> Result<DegeneracyReport> {
    let comp = single_component(chi)?;
    if comp.m != 1 {
        return Err(Error::Range("degeneracy is defined modulo a prime".into()));
    }
    let p = comp.p;
    let r = comp.order();
    let c2 = match g_constant_value(g, p)? {
        Some(c) => c,
        None => return Ok(DegeneracyReport { is_degenerate: false, witness: None }),
    };
    let f_ok = r == 1 || rth_power_test_mod_p(f, p, r)?;
    if !f_ok {
        return Ok(DegeneracyReport { is_degenerate: false, witness: None });
    }
    let reason = if r == 1 { "principal character, g constant" } else { "f is c F^r, g constant" };
    let report = DegeneracyReport { is_degenerate: true, witness: Some(DegeneracyWitness { r, c2, reason: reason.into() }) };
    let table = local_table(f, g, &comp, 1, 0);
    let mut support = table.iter().filter(|z| z.norm() > 0.5);
    if let Some(first) = support.next() {
        debug_assert!(support.all(|z| (z - first).norm() < 1e-9), "degenerate summand must be constant");
    }
    Ok(report)
}

/// `(2 deg_p f + 2 deg_p g - 1) sqrt(p)`, or `None` for a degenerate pair.
pub fn weil_bound(f: &RationalFunction, g: &RationalFunction, chi: &DirichletCharacter) -> Result<Option<f64>> {
    let comp = single_component(chi)?;
    let p = comp.p;
    if degeneracy_mod_p(f, g, chi)?.is_degenerate {
        return Ok(None);
    }
    let df = match f.deg_p(p) {
        Ok(d) => d,
        Err(Error::ZeroModP(_)) => 0,
        Err(e) => return Err(e),
    };
    let dg = if g.is_zero() {
        0
    } else {
        match g.deg_p(p) {
            Ok(d) => d,
            Err(Error::ZeroModP(_)) => 0,
            Err(e) => return Err(e),
        }
    };
    let c = (2 * df + 2 * dg) as f64 - 1.0;
    Ok(Some(c.max(0.0) * (p as f64).sqrt()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeilCheck {
    pub abs: f64,
    pub bound: Option<f64>,
    pub degenerate: bool,
    pub ok: bool,
}

/// Compare `|sum_{n mod p} chi(f(n)) e(g(n)/p)|` with the Weil bound.
pub fn weil_bound_check(f: &RationalFunction, g: &RationalFunction, chi: &DirichletCharacter, tol: f64) -> Result<WeilCheck> {
    let comp = single_component(chi)?;
    let abs = prime_power_sum(f, g, &comp, 1, 0).norm();
    let bound = weil_bound(f, g, chi)?;
    let ok = match bound {
        Some(b) => abs <= b + tol,
        None => true,
    };
    Ok(WeilCheck { abs, bound, degenerate: bound.is_none(), ok })
}

/// `deg (f_- f_+ g_-)` modulo `p`, the size of the complement of the support.
pub fn support_defect(f: &RationalFunction, g: &RationalFunction, p: u64) -> usize {
    let fp = |v: Vec<num_bigint::BigInt>| FpPoly::from_bigints(&v, p);
    let prod = fp(f.num_int()).mul(&fp(f.den_int())).mul(&fp(g.den_int()));
    if prod.is_zero() {
        p as usize
    } else {
        prod.degree()
    }
}
