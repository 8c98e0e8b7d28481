//! Rational functions `h = h_+ / h_-` with coprime integer-coefficient
//! numerator and denominator, plus the invariants built on them: degrees,
//! reductions mod p, r_f, the discriminant quantities and Gauss valuations.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffield::FpPoly;
use crate::modarith::{self, primes_below, vp_int};
use crate::poly::Polynomial;

/// A rational function in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

/// The largest `r` with `f = c F^r`; constant functions are `r`-th powers for
/// every `r`, reported as `All`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum PowerIndex {
    All,
    Finite(u64),
}

impl PowerIndex {
    /// Whether `r` divides the index (`All` is divisible by everything).
    pub fn divisible_by(self, r: u64) -> bool {
        match self {
            PowerIndex::All => true,
            PowerIndex::Finite(v) => v % r == 0,
        }
    }
}

/// `input = p^tau * h` with `h` of Gauss valuation zero at `p`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussVal {
    pub tau: i64,
    pub h: RationalFunction,
}

impl RationalFunction {
    /// Build `num / den` and normalize.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = Polynomial::gcd(&num, &den);
        let (num, den) = if g.degree() > 0 {
            (num.exact_div(&g), den.exact_div(&g))
        } else {
            (num, den)
        };
        let l = num.denominator_lcm().lcm(&den.denominator_lcm());
        let lr = BigRational::from_integer(l);
        let num = num.scale(&lr);
        let den = den.scale(&lr);
        let c = num.int_content().gcd(&den.int_content());
        let sign = if den.lc().is_negative() { -BigInt::one() } else { BigInt::one() };
        let s = BigRational::new(sign, c);
        Ok(RationalFunction { num: num.scale(&s), den: den.scale(&s) })
    }

    pub fn from_poly(p: Polynomial) -> Self {
        Self::new(p, Polynomial::one()).expect("nonzero denominator")
    }

    pub fn zero() -> Self {
        RationalFunction { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn x() -> Self {
        Self::from_poly(Polynomial::x())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(c)))
    }

    /// Parse an expression in `x`; see [`crate::parse`] for the grammar.
    pub fn parse(s: &str) -> Result<Self> {
        crate::parse::parse(s)
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// `max(deg num, deg den)`
    pub fn deg(&self) -> usize {
        self.num.degree().max(self.den.degree())
    }

    /// Leading coefficient ratio `lc(num)/lc(den)`.
    pub fn leading_coefficient(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        self.num.lc() / self.den.lc()
    }

    pub fn num_int(&self) -> Vec<BigInt> {
        self.num.int_coeffs()
    }

    pub fn den_int(&self) -> Vec<BigInt> {
        self.den.int_coeffs()
    }

    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(x) / d)
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let d = &self.den * &self.den;
        Self::new(n, d).expect("nonzero denominator")
    }

    /// `f'/f`
    pub fn log_derivative(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let d = &self.num * &self.den;
        Self::new(n, d)
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Ok(RationalFunction::new(base.num.pow(k), base.den.pow(k)).expect("nonzero"))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.num.scale(c), self.den.clone()).expect("nonzero")
    }

    /// `h(x + a)`
    pub fn shift(&self, a: &BigRational) -> Self {
        Self::new(self.num.shift(a), self.den.shift(a)).expect("nonzero")
    }

    /// `prod_j h(x + s_j)^{e_j}`, assembled before a single normalization.
    pub fn pow_product(&self, shifts: &[(BigRational, i32)]) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let mut n = Polynomial::one();
        let mut d = Polynomial::one();
        for (s, e) in shifts {
            let ns = self.num.shift(s);
            let ds = self.den.shift(s);
            let k = e.unsigned_abs();
            if *e >= 0 {
                n = &n * &ns.pow(k);
                d = &d * &ds.pow(k);
            } else {
                n = &n * &ds.pow(k);
                d = &d * &ns.pow(k);
            }
        }
        Self::new(n, d)
    }

    /// `sum_j c_j h(x + s_j)` over a common denominator.
    pub fn signed_sum(&self, shifts: &[(BigRational, i32)]) -> Self {
        if self.is_polynomial() {
            let inv = self.den.lc().recip();
            let mut acc = Polynomial::zero();
            for (s, c) in shifts {
                acc = &acc + &self.num.shift(s).scale(&BigRational::from_integer(BigInt::from(*c)));
            }
            return Self::from_poly(acc.scale(&inv));
        }
        let dens: Vec<Polynomial> = shifts.iter().map(|(s, _)| self.den.shift(s)).collect();
        let nums: Vec<Polynomial> = shifts.iter().map(|(s, _)| self.num.shift(s)).collect();
        let mut total_den = Polynomial::one();
        for d in &dens {
            total_den = &total_den * d;
        }
        let mut acc = Polynomial::zero();
        for (j, (_, c)) in shifts.iter().enumerate() {
            let mut term = nums[j].scale(&BigRational::from_integer(BigInt::from(*c)));
            for (i, d) in dens.iter().enumerate() {
                if i != j {
                    term = &term * d;
                }
            }
            acc = &acc + &term;
        }
        Self::new(acc, total_den).expect("nonzero")
    }

    /// Gauss content valuation and the unit part.
    pub fn gauss_val(&self, p: u64) -> Result<GaussVal> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let vn = vp_int(&self.num.int_content(), p).finite().unwrap();
        let vd = vp_int(&self.den.int_content(), p).finite().unwrap();
        let tau = vn - vd;
        let pk = BigRational::from_integer(num_traits::pow(BigInt::from(p), tau.unsigned_abs() as usize));
        let h = if tau >= 0 { self.scale(&pk.recip()) } else { self.scale(&pk) };
        Ok(GaussVal { tau, h })
    }

    /// Reduction of numerator and denominator modulo `p`, common factors removed.
    /// Errors with `BadReduction` if `p` divides the denominator content and
    /// with `ZeroModP` if the function reduces to zero.
    pub fn reduce_mod_p(&self, p: u64) -> Result<(FpPoly, FpPoly)> {
        let n = FpPoly::from_bigints(&self.num_int(), p);
        let d = FpPoly::from_bigints(&self.den_int(), p);
        if d.is_zero() {
            return Err(Error::BadReduction(p));
        }
        if n.is_zero() {
            return Err(Error::ZeroModP(p));
        }
        let g = FpPoly::gcd(&n, &d);
        Ok((n.div_rem(&g).0, d.div_rem(&g).0))
    }

    /// Degree of the reduction modulo `p`.
    pub fn deg_p(&self, p: u64) -> Result<usize> {
        let (n, d) = self.reduce_mod_p(p)?;
        Ok(n.degree().max(d.degree()))
    }

    /// Whether the reduction modulo `p` is constant (requires good reduction).
    pub fn is_constant_mod_p(&self, p: u64) -> Result<bool> {
        Ok(self.deg_p(p)? == 0)
    }

    /// Whether the reduction modulo `p` is a polynomial.
    pub fn is_polynomial_mod_p(&self, p: u64) -> Result<bool> {
        let (_, d) = self.reduce_mod_p(p)?;
        Ok(d.degree() == 0)
    }

    /// Square-free decomposition multiplicities of numerator and denominator.
    fn multiplicities(&self) -> Vec<(Polynomial, usize, bool)> {
        let mut out: Vec<(Polynomial, usize, bool)> = self
            .num
            .squarefree_decomposition()
            .into_iter()
            .map(|(a, i)| (a, i, true))
            .collect();
        out.extend(self.den.squarefree_decomposition().into_iter().map(|(a, i)| (a, i, false)));
        out
    }

    /// `r_f`: gcd of the multiplicities of all square-free parts.
    pub fn r_f(&self) -> PowerIndex {
        let m = self.multiplicities();
        if m.is_empty() {
            return PowerIndex::All;
        }
        PowerIndex::Finite(m.iter().fold(0u64, |acc, (_, i, _)| acc.gcd(&(*i as u64))))
    }

    /// Product of the distinct irreducible factors of `num * den`, primitive.
    pub fn radical_product(&self) -> Polynomial {
        self.multiplicities()
            .into_iter()
            .fold(Polynomial::one(), |acc, (a, _, _)| &acc * &a)
            .primitive_part()
    }

    /// `Delta(f)`; see the crate docs for the exact normalization.
    pub fn delta(&self) -> BigInt {
        if self.is_constant() {
            return BigInt::one();
        }
        let r = match self.r_f() {
            PowerIndex::Finite(r) => BigInt::from(r),
            PowerIndex::All => BigInt::one(),
        };
        let c_f = (self.num.lc() * self.den.lc()).to_integer();
        let rad = self.radical_product().scale(&BigRational::from_integer(c_f.clone()));
        let disc = rad.discriminant();
        debug_assert!(disc.is_integer());
        (r * c_f * disc.to_integer()).abs()
    }

    /// Whether `p` divides `Delta(f)`.
    pub fn bad_prime(&self, p: u64) -> bool {
        (self.delta() % BigInt::from(p)).is_zero()
    }

    /// Map from coefficients to residues modulo `n`: `(num, den)` coefficient vectors.
    pub fn residues(&self, n: u64) -> (Vec<u64>, Vec<u64>) {
        let r = |v: Vec<BigInt>| v.iter().map(|c| modarith::reduce_big(c, n)).collect();
        (r(self.num_int()), r(self.den_int()))
    }

    /// Evaluate numerator and denominator at an integer, exactly.
    pub fn eval_parts_int(&self, n: i64) -> (BigInt, BigInt) {
        let x = BigInt::from(n);
        let ev = |c: Vec<BigInt>| {
            let mut acc = BigInt::zero();
            for a in c.iter().rev() {
                acc = acc * &x + a;
            }
            acc
        };
        (ev(self.num_int()), ev(self.den_int()))
    }

    /// Coefficients of the numerator as `i64`, if they fit.
    pub fn num_i64(&self) -> Option<Vec<i64>> {
        self.num_int().iter().map(|c| c.to_i64()).collect()
    }
}

/// `Delta(f) * Delta(g) * prod_{primes l < 2(deg f + deg g) + k + 16} l`.
pub fn delta_fgk(f: &RationalFunction, g: &RationalFunction, k: u64) -> BigInt {
    let cutoff = 2 * (f.deg() + g.deg()) as u64 + k + 16;
    let tail: BigInt = primes_below(cutoff).into_iter().map(BigInt::from).product();
    f.delta() * g.delta() * tail
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        let n = &(&self.num * &o.den) + &(&o.num * &self.den);
        RationalFunction::new(n, &self.den * &o.den).expect("nonzero")
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        let n = &(&self.num * &o.den) - &(&o.num * &self.den);
        RationalFunction::new(n, &self.den * &o.den).expect("nonzero")
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &o.num, &self.den * &o.den).expect("nonzero")
    }
}

impl Div for &RationalFunction {
    type Output = Result<RationalFunction>;
    fn div(self, o: &RationalFunction) -> Result<RationalFunction> {
        if o.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        RationalFunction::new(&self.num * &o.den, &self.den * &o.num)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction::new(-&self.num, self.den.clone()).expect("nonzero")
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else if self.num.coeffs().len() <= 1 {
            write!(f, "{}/({})", self.num, self.den)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, ratio};

    fn rf(s: &str) -> RationalFunction {
        RationalFunction::parse(s).unwrap()
    }

    #[test]
    fn canonical_form() {
        let h = rf("(x-1)*(x+1)/(x-1)");
        assert_eq!(h.num(), &Polynomial::from_ints(&[1, 1]));
        assert!(h.den().is_one());
        let h = rf("(2*x+4)/(-6*x)");
        assert_eq!(h.num(), &Polynomial::from_ints(&[-2, -1]));
        assert_eq!(h.den(), &Polynomial::from_ints(&[0, 3]));
        let h = rf("x/2 + 1/3");
        assert_eq!(h.num(), &Polynomial::from_ints(&[2, 3]));
        assert_eq!(h.den(), &Polynomial::from_ints(&[6]));
    }

    #[test]
    fn degrees() {
        assert_eq!(rf("x^3/(x^2+1)").deg(), 3);
        assert_eq!(rf("(x^2-25)/(x-5)").deg_p(5).unwrap(), 1);
        assert_eq!(rf("7*x^3+x").deg_p(7).unwrap(), 1);
        assert_eq!(rf("(x+5)/5").deg_p(5), Err(Error::BadReduction(5)));
        assert_eq!(rf("5*x").deg_p(5), Err(Error::ZeroModP(5)));
        // common factor appearing only mod p
        assert_eq!(rf("(x+7)/(x+2)").deg_p(5).unwrap(), 0);
    }

    #[test]
    fn derivatives() {
        assert_eq!(rf("x^2").log_derivative().unwrap(), rf("2/x"));
        assert_eq!(rf("x^5").derivative(), rf("5*x^4"));
        assert_eq!(rf("0").log_derivative(), Err(Error::ZeroFunction));
        assert_eq!(rf("1/x").derivative(), rf("-1/x^2"));
    }

    #[test]
    fn r_f_examples() {
        assert_eq!(rf("x^2/(x+1)^4").r_f(), PowerIndex::Finite(2));
        assert_eq!(rf("x").r_f(), PowerIndex::Finite(1));
        assert_eq!(rf("3").r_f(), PowerIndex::All);
        assert_eq!(rf("5*(x^2+1)^3/(x-2)^6").r_f(), PowerIndex::Finite(3));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(rf("x^2-1").delta(), BigInt::from(4));
        assert_eq!(rf("x").delta(), BigInt::from(1));
        assert_eq!(rf("7").delta(), BigInt::from(1));
        let expected: BigInt = [2u64, 3, 5, 7, 11, 13, 17, 19].iter().map(|&p| BigInt::from(p)).product();
        assert_eq!(delta_fgk(&rf("x"), &rf("x^2"), 0), expected * BigInt::from(2));
    }

    #[test]
    fn gauss_val_examples() {
        let gv = rf("5*x/(x+1)").gauss_val(5).unwrap();
        assert_eq!((gv.tau, gv.h), (1, rf("x/(x+1)")));
        let gv = rf("(x+5)/5").gauss_val(5).unwrap();
        assert_eq!((gv.tau, gv.h.clone()), (-1, rf("x+5")));
        assert_eq!(gv.h.deg_p(5).unwrap(), 1);
    }

    #[test]
    fn shifts_and_products() {
        let g = rf("x^2");
        let q = 7;
        let gp = g.signed_sum(&[(rat(0), 1), (rat(q), -1)]);
        assert_eq!(gp, rf("-14*x - 49"));
        let f = rf("x");
        let fs = f.pow_product(&[(rat(0), 1), (rat(3), -1)]).unwrap();
        assert_eq!(fs, rf("x/(x+3)"));
        assert_eq!(rf("1/(x+1)").shift(&ratio(1, 2)), rf("2/(2*x+3)"));
    }
}
