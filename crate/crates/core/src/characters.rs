//! Dirichlet characters modulo odd `q`, stored per prime-power component as an
//! exponent against the smallest primitive root.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::{self, bezout_split, discrete_log, factorize, gcd, lcm, primitive_root, vp_u64, PrimePower};
use crate::ratfun::{PowerIndex, RationalFunction};

/// Largest prime power for which a full discrete-log table is cached.
pub const LOG_TABLE_LIMIT: u64 = 20_000_000;

/// A root of unity `e(num/den)` in lowest terms, or zero.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum CharValue {
    Zero,
    Root { num: u64, den: u64 },
}

impl CharValue {
    pub fn from_phase(num: u64, den: u64) -> Self {
        let num = num % den;
        let g = gcd(num, den);
        CharValue::Root { num: num / g, den: den / g }
    }

    pub fn one() -> Self {
        CharValue::Root { num: 0, den: 1 }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, CharValue::Zero)
    }

    pub fn mul(self, o: Self) -> Self {
        match (self, o) {
            (CharValue::Root { num: a, den: b }, CharValue::Root { num: c, den: d }) => {
                let l = lcm(b, d);
                Self::from_phase((a * (l / b) + c * (l / d)) % l, l)
            }
            _ => CharValue::Zero,
        }
    }

    pub fn conj(self) -> Self {
        match self {
            CharValue::Root { num, den } => Self::from_phase(den - num, den),
            z => z,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            CharValue::Zero => Complex64::new(0.0, 0.0),
            CharValue::Root { num, den } => e_frac(num, den),
        }
    }
}

/// `e(num/den) = exp(2 pi i num/den)`
pub fn e_frac(num: u64, den: u64) -> Complex64 {
    let t = (num % den) as f64 / den as f64;
    Complex64::from_polar(1.0, std::f64::consts::TAU * t)
}

fn log_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<u32>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<u32>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Discrete logarithm table modulo `p^m` against the smallest primitive root;
/// non-units map to `u32::MAX`.
pub fn log_table(pp: PrimePower) -> Arc<Vec<u32>> {
    if let Some(t) = log_cache().lock().unwrap().get(&pp.value) {
        return t.clone();
    }
    let n = pp.value;
    let g = primitive_root(pp);
    let mut t = vec![u32::MAX; n as usize];
    let mut x = 1u64;
    for k in 0..pp.phi() {
        t[x as usize] = k as u32;
        x = x * g % n;
    }
    let t = Arc::new(t);
    log_cache().lock().unwrap().insert(n, t.clone());
    t
}

/// One CRT component: a character modulo `p^m` given by `g^k -> e(e k / phi)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct Component {
    pub p: u64,
    pub m: u32,
    pub e: u64,
}

impl Component {
    pub fn pp(&self) -> PrimePower {
        PrimePower::new(self.p, self.m)
    }

    pub fn phi(&self) -> u64 {
        self.pp().phi()
    }

    /// Exponent `ell` of the conductor `p^ell`.
    pub fn conductor_exp(&self) -> u32 {
        if self.e == 0 {
            return 0;
        }
        let v = vp_u64(self.e, self.p).finite().unwrap() as u32;
        self.m - v.min(self.m - 1)
    }

    pub fn order(&self) -> u64 {
        let phi = self.phi();
        phi / gcd(self.e, phi)
    }

    /// Discrete log of a unit `a` modulo `p^m`, or `None` for non-units.
    pub fn log(&self, a: u64) -> Option<u64> {
        let pp = self.pp();
        let a = a % pp.value;
        if a % self.p == 0 {
            return None;
        }
        if pp.value <= LOG_TABLE_LIMIT {
            Some(log_table(pp)[a as usize] as u64)
        } else {
            discrete_log(primitive_root(pp), a, pp).ok()
        }
    }

    /// Phase numerator over `phi`, or `None` for non-units.
    pub fn phase(&self, a: u64) -> Option<u64> {
        self.log(a).map(|k| ((self.e as u128 * k as u128) % self.phi() as u128) as u64)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct DirichletCharacter {
    q: u64,
    comps: Vec<Component>,
}

impl DirichletCharacter {
    /// Build from exponents keyed by prime power; missing components are principal.
    pub fn new(q: u64, exps: &[(u64, u64)]) -> Result<Self> {
        let fac = factorize(q)?;
        let mut comps: Vec<Component> = fac.iter().map(|pp| Component { p: pp.p, m: pp.m, e: 0 }).collect();
        for &(pe, e) in exps {
            let c = comps
                .iter_mut()
                .find(|c| c.pp().value == pe)
                .ok_or_else(|| Error::CharSpec(format!("{pe} is not an exact prime-power divisor of {q}")))?;
            c.e = e % c.phi();
        }
        Ok(DirichletCharacter { q, comps })
    }

    pub fn principal(q: u64) -> Result<Self> {
        Self::new(q, &[])
    }

    pub fn from_components(comps: Vec<Component>) -> Self {
        let q = comps.iter().map(|c| c.pp().value).product();
        let mut comps = comps;
        comps.sort_by_key(|c| c.p);
        DirichletCharacter { q, comps }
    }

    /// Uniformly random primitive character.
    pub fn random_primitive<R: Rng>(q: u64, rng: &mut R) -> Result<Self> {
        let fac = factorize(q)?;
        let comps = fac
            .iter()
            .map(|pp| {
                let phi = pp.phi();
                let e = loop {
                    let e = rng.gen_range(1..phi);
                    if pp.m == 1 || e % pp.p != 0 {
                        break e;
                    }
                };
                Component { p: pp.p, m: pp.m, e }
            })
            .collect();
        Ok(DirichletCharacter { q, comps })
    }

    /// Uniformly random character (principal allowed).
    pub fn random<R: Rng>(q: u64, rng: &mut R) -> Result<Self> {
        let fac = factorize(q)?;
        let comps = fac.iter().map(|pp| Component { p: pp.p, m: pp.m, e: rng.gen_range(0..pp.phi()) }).collect();
        Ok(DirichletCharacter { q, comps })
    }

    /// All characters modulo `q`.
    pub fn all(q: u64) -> Result<Vec<Self>> {
        let fac = factorize(q)?;
        let mut out = vec![Vec::new()];
        for pp in fac {
            let mut next = Vec::new();
            for prefix in &out {
                for e in 0..pp.phi() {
                    let mut v: Vec<Component> = prefix.clone();
                    v.push(Component { p: pp.p, m: pp.m, e });
                    next.push(v);
                }
            }
            out = next;
        }
        Ok(out.into_iter().map(|comps| DirichletCharacter { q, comps }).collect())
    }

    /// The quadratic character modulo an odd prime.
    pub fn quadratic(p: u64) -> Result<Self> {
        Self::new(p, &[(p, (p - 1) / 2)])
    }

    /// Parse `q=1125;e=(3^2:4),(5^3:7)`, `q=1125;random-primitive;seed=S`,
    /// `q=..;random;seed=S` or `q=..;principal`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let bad = |m: &str| Error::CharSpec(format!("{m} in '{spec}'"));
        let mut q = None;
        let mut exps = None;
        let mut mode = None;
        let mut seed = 0u64;
        for part in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            if let Some(v) = part.strip_prefix("q=") {
                q = Some(v.trim().parse::<u64>().map_err(|_| bad("bad modulus"))?);
            } else if let Some(v) = part.strip_prefix("e=") {
                let mut list = Vec::new();
                for item in v.split("),") {
                    let item = item.trim().trim_start_matches('(').trim_end_matches(')');
                    if item.is_empty() {
                        continue;
                    }
                    let (pp, e) = item.split_once(':').ok_or_else(|| bad("expected p^m:e"))?;
                    let (p, m) = match pp.split_once('^') {
                        Some((p, m)) => (p.trim(), m.trim()),
                        None => (pp.trim(), "1"),
                    };
                    let p: u64 = p.parse().map_err(|_| bad("bad prime"))?;
                    let m: u32 = m.parse().map_err(|_| bad("bad exponent"))?;
                    let e: u64 = e.trim().parse().map_err(|_| bad("bad character exponent"))?;
                    list.push((p.checked_pow(m).ok_or_else(|| bad("prime power overflow"))?, e));
                }
                exps = Some(list);
            } else if let Some(v) = part.strip_prefix("seed=") {
                seed = v.trim().parse().map_err(|_| bad("bad seed"))?;
            } else if part == "random-primitive" || part == "random" || part == "principal" {
                mode = Some(part.to_string());
            } else {
                return Err(bad(&format!("unknown field '{part}'")));
            }
        }
        let q = q.ok_or_else(|| bad("missing q"))?;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        match (exps, mode.as_deref()) {
            (Some(e), None) => Self::new(q, &e),
            (None, Some("random-primitive")) => Self::random_primitive(q, &mut rng),
            (None, Some("random")) => Self::random(q, &mut rng),
            (None, Some("principal")) | (None, None) => Self::principal(q),
            _ => Err(bad("conflicting fields")),
        }
    }

    /// Canonical spec string accepted by [`Self::from_spec`].
    pub fn spec(&self) -> String {
        let parts: Vec<String> = self.comps.iter().map(|c| format!("({}^{}:{})", c.p, c.m, c.e)).collect();
        format!("q={};e={}", self.q, parts.join(","))
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn components(&self) -> &[Component] {
        &self.comps
    }

    pub fn component(&self, p: u64) -> Option<&Component> {
        self.comps.iter().find(|c| c.p == p)
    }

    pub fn order(&self) -> u64 {
        self.comps.iter().fold(1, |acc, c| lcm(acc, c.order()))
    }

    pub fn conductor(&self) -> u64 {
        self.comps.iter().map(|c| c.p.pow(c.conductor_exp())).product()
    }

    /// The primitive character modulo the conductor that induces `self`.
    pub fn primitive(&self) -> Self {
        let comps = self
            .comps
            .iter()
            .filter_map(|c| {
                let l = c.conductor_exp();
                if l == 0 {
                    return None;
                }
                let low = PrimePower::new(c.p, l);
                let g = primitive_root(low);
                let ratio = c.phi() / low.phi();
                let num = c.phase(g).expect("unit");
                debug_assert_eq!(num % ratio, 0);
                Some(Component { p: c.p, m: l, e: num / ratio })
            })
            .collect();
        Self::from_components(comps)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.q
    }

    pub fn is_principal(&self) -> bool {
        self.comps.iter().all(|c| c.e == 0)
    }

    pub fn power(&self, r: u64) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let phi = c.phi();
                Component { e: ((c.e as u128 * (r % phi) as u128) % phi as u128) as u64, ..*c }
            })
            .collect();
        DirichletCharacter { q: self.q, comps }
    }

    pub fn conj(&self) -> Self {
        let comps = self.comps.iter().map(|c| Component { e: (c.phi() - c.e) % c.phi(), ..*c }).collect();
        DirichletCharacter { q: self.q, comps }
    }

    /// Restriction to the components whose prime divides `d` (a unitary divisor).
    pub fn restrict(&self, d: u64) -> Self {
        Self::from_components(self.comps.iter().filter(|c| d % c.p == 0).copied().collect())
    }

    /// Common phase denominator `lcm(phi(p^m))`.
    pub fn phase_den(&self) -> u64 {
        self.comps.iter().fold(1, |acc, c| lcm(acc, c.phi()))
    }

    /// `chi(n)` as an exact root of unity.
    pub fn value(&self, n: i64) -> CharValue {
        let l = self.phase_den();
        let mut num: u128 = 0;
        for c in &self.comps {
            let a = modarith::reduce_i64(n, c.pp().value);
            match c.phase(a) {
                None => return CharValue::Zero,
                Some(ph) => num += ph as u128 * (l / c.phi()) as u128,
            }
        }
        CharValue::from_phase((num % l as u128) as u64, l)
    }

    /// `chi(f_+(n)) * conj(chi(f_-(n)))`, zero when either argument is a non-unit.
    pub fn eval_at_ratfun(&self, f: &RationalFunction, n: i64) -> CharValue {
        let (a, b) = f.eval_parts_int(n);
        let l = self.phase_den();
        let mut num: u128 = 0;
        for c in &self.comps {
            let pe = c.pp().value;
            let (pa, pb) = (c.phase(modarith::reduce_big(&a, pe)), c.phase(modarith::reduce_big(&b, pe)));
            match (pa, pb) {
                (Some(x), Some(y)) => {
                    let phi = c.phi();
                    num += ((x + phi - y) % phi) as u128 * (l / phi) as u128;
                }
                _ => return CharValue::Zero,
            }
        }
        CharValue::from_phase((num % l as u128) as u64, l)
    }

    /// Split `chi = chi_Q * chi_r` with `r = q/Q`, returning the Bezout pair
    /// `aQ + br = 1` alongside the two factors.
    pub fn twist_decompose(&self, big_q: u64) -> Result<(Self, Self, i64, i64)> {
        if big_q == 0 || self.q % big_q != 0 {
            return Err(Error::NotCoprimeSplit(format!("{big_q} does not divide {}", self.q)));
        }
        let r = self.q / big_q;
        if gcd(big_q, r) != 1 {
            return Err(Error::NotCoprimeSplit(format!("gcd({big_q}, {r}) > 1")));
        }
        let (a, b) = bezout_split(self.q, big_q, r).map_err(|_| Error::NotCoprimeSplit(format!("{big_q}*{r}")))?;
        Ok((self.restrict(big_q), self.restrict(r), a, b))
    }
}

/// Conductor of `chi^{r_f}`; 1 for constant `f`.
pub fn conductor_of_power_for_f(chi: &DirichletCharacter, f: &RationalFunction) -> u64 {
    match f.r_f() {
        PowerIndex::All => 1,
        PowerIndex::Finite(r) => chi.power(r).conductor(),
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}
