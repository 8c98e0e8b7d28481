//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial with rational coefficients, ascending degree, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn x() -> Self {
        Polynomial::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn constant(c: BigRational) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Polynomial::new(c.iter().map(|&v| rat(v)).collect())
    }

    pub fn from_bigints(c: &[BigInt]) -> Self {
        Polynomial::new(c.iter().cloned().map(BigRational::from_integer).collect())
    }

    /// `x - a`
    pub fn linear_root(a: BigRational) -> Self {
        Polynomial::new(vec![-a, BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lc().recip();
        self.scale(&inv)
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `p(x + a)`
    pub fn shift(&self, a: &BigRational) -> Self {
        let lin = Polynomial::new(vec![a.clone(), BigRational::one()]);
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Self::constant(c.clone());
        }
        acc
    }

    /// Euclidean division over the rationals.
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.degree() < d.degree() || self.is_zero() {
            return (Self::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let dl = d.lc();
        let dd = d.degree();
        let mut q = vec![BigRational::zero(); self.degree() - dd + 1];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] = &r[i + j] - &c * dc;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Polynomial::new(q), Polynomial::new(r))
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn exact_div(&self, d: &Polynomial) -> Polynomial {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Whether all coefficients are integers.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Integer coefficients (requires `is_integral`).
    pub fn int_coeffs(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|c| c.to_integer()).collect()
    }

    /// Least common multiple of coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Gcd of the numerators of an integral polynomial (0 for the zero polynomial).
    pub fn int_content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(&c.to_integer()))
    }

    /// Primitive integer polynomial proportional to `self`, positive leading coefficient.
    pub fn primitive_part(&self) -> Polynomial {
        if self.is_zero() {
            return Self::zero();
        }
        let l = self.denominator_lcm();
        let scaled = self.scale(&BigRational::from_integer(l));
        let c = scaled.int_content();
        let sign = if scaled.lc().is_negative() { -BigInt::one() } else { BigInt::one() };
        scaled.scale(&BigRational::new(sign, c))
    }

    /// Monic greatest common divisor over the rationals, computed through a
    /// primitive remainder sequence to keep coefficient growth in check.
    pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        let mut u = a.primitive_part();
        let mut v = b.primitive_part();
        if u.degree() < v.degree() {
            std::mem::swap(&mut u, &mut v);
        }
        while !v.is_zero() {
            let r = pseudo_rem(&u, &v);
            u = v;
            v = r.primitive_part();
        }
        u.monic()
    }

    /// Square-free decomposition (Yun): pairs `(a_i, i)` with nonconstant,
    /// pairwise coprime, square-free monic `a_i` and `self = lc * prod a_i^i`.
    pub fn squarefree_decomposition(&self) -> Vec<(Polynomial, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = Self::gcd(&f, &fp);
        let mut b = f.exact_div(&a0);
        let c = fp.exact_div(&a0);
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while b.degree() > 0 {
            let a = Self::gcd(&b, &d);
            let b_next = b.exact_div(&a);
            let c_next = d.exact_div(&a);
            d = &c_next - &b_next.derivative();
            if a.degree() > 0 {
                out.push((a, i));
            }
            b = b_next;
            i += 1;
        }
        out
    }

    /// Product of the distinct irreducible factors, monic.
    pub fn radical(&self) -> Polynomial {
        self.squarefree_decomposition()
            .into_iter()
            .fold(Self::one(), |acc, (a, _)| &acc * &a)
    }

    /// Resultant over the rationals.
    pub fn resultant(a: &Polynomial, b: &Polynomial) -> BigRational {
        if a.is_zero() || b.is_zero() {
            return BigRational::zero();
        }
        let (da, db) = (a.degree(), b.degree());
        if db == 0 {
            return pow_rat(&b.lc(), da);
        }
        if da == 0 {
            return pow_rat(&a.lc(), db);
        }
        let (_, r) = a.div_rem(b);
        if r.is_zero() {
            return BigRational::zero();
        }
        let sign = if da % 2 == 1 && db % 2 == 1 { -BigRational::one() } else { BigRational::one() };
        sign * pow_rat(&b.lc(), da - r.degree()) * Self::resultant(b, &r)
    }

    /// Discriminant `(-1)^{d(d-1)/2} Res(h, h') / lc(h)`; 1 for degree <= 1.
    pub fn discriminant(&self) -> BigRational {
        let d = self.degree();
        if d <= 1 {
            return BigRational::one();
        }
        let res = Self::resultant(self, &self.derivative());
        let sign = if (d * (d - 1) / 2) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
        sign * res / self.lc()
    }
}

fn pow_rat(c: &BigRational, e: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= c;
    }
    acc
}

/// Pseudo-remainder of integer polynomials: `lc(v)^(deg u - deg v + 1) u mod v`.
fn pseudo_rem(u: &Polynomial, v: &Polynomial) -> Polynomial {
    let mut r = u.clone();
    let dv = v.degree();
    let lv = v.lc();
    while !r.is_zero() && r.degree() >= dv {
        let shift = r.degree() - dv;
        let lr = r.lc();
        let mut t = vec![BigRational::zero(); shift];
        t.extend(v.coeffs.iter().map(|c| c * &lr));
        r = &r.scale(&lv) - &Polynomial::new(t);
    }
    r
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

fn fmt_coeff_term(c: &BigRational, i: usize, first: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let neg = c.is_negative();
    let a = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    let mono = match i {
        0 => String::new(),
        1 => "x".to_string(),
        _ => format!("x^{i}"),
    };
    if i == 0 {
        write!(f, "{a}")
    } else if a.is_one() {
        write!(f, "{mono}")
    } else {
        write!(f, "{a}*{mono}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            fmt_coeff_term(c, i, first, f)?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_ints(c)
    }

    #[test]
    fn arithmetic_and_division() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[-1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, p(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(&(&q * &b) + &r, a);
        assert_eq!(p(&[1, 2, 3]).derivative(), p(&[2, 6]));
        assert_eq!(p(&[0, 0, 1]).shift(&rat(1)), p(&[1, 2, 1]));
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = &p(&[-1, 1]) * &p(&[2, 1]);
        let b = &p(&[-1, 1]) * &p(&[3, 1]);
        assert_eq!(Polynomial::gcd(&a, &b), p(&[-1, 1]));
        // (x-1)^3 (x+2)^2 x
        let f = &(&p(&[-1, 1]).pow(3) * &p(&[2, 1]).pow(2)) * &p(&[0, 2]);
        let sq = f.squarefree_decomposition();
        assert_eq!(sq, vec![(p(&[0, 1]), 1), (p(&[2, 1]), 2), (p(&[-1, 1]), 3)]);
        assert_eq!(f.radical(), &(&p(&[0, 1]) * &p(&[2, 1])) * &p(&[-1, 1]));
    }

    #[test]
    fn discriminants() {
        assert_eq!(p(&[-1, 0, 1]).discriminant(), rat(4));
        assert_eq!(p(&[0, 1]).discriminant(), rat(1));
        // b^2 - 4ac for 2x^2 + 3x + 5
        assert_eq!(p(&[5, 3, 2]).discriminant(), rat(9 - 40));
        // cubic x^3 + a x + b: -4a^3 - 27 b^2
        assert_eq!(p(&[2, -3, 0, 1]).discriminant(), rat(4 * 27 - 27 * 4));
        assert_eq!(p(&[1, 1, 0, 1]).discriminant(), rat(-4 - 27));
    }

    #[test]
    fn resultant_matches_root_product() {
        // Res((x-1)(x-2), x-3) = (1-3)(2-3) up to the monic convention
        let a = &p(&[-1, 1]) * &p(&[-2, 1]);
        assert_eq!(Polynomial::resultant(&a, &p(&[-3, 1])), rat(2));
        assert_eq!(Polynomial::resultant(&p(&[-3, 1]), &a), rat(2));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[5, -1, 3]).to_string(), "3*x^2 - x + 5");
        assert_eq!(p(&[0, -1]).to_string(), "-x");
        assert_eq!(Polynomial::new(vec![ratio(1, 2)]).to_string(), "1/2");
    }
}
