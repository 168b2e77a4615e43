//! Exact ratios of logarithms of integers.
//!
//! Every dimension formula in this crate has the shape
//! `(Σ a_p log p) / (Σ b_p log p)` with rational coefficients over primes.
//! [`LogRatio`] stores the two coefficient vectors, scaled so the
//! denominator's first coefficient is 1. Two values are `==` iff their
//! coefficient vectors are proportional, which decides identities such as
//! `log 4 / log 10 = 2·log 2 / log 10` without floating point.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{rat, rat_to_f64};

type Form = BTreeMap<u64, BigRational>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LogRatio {
    num: Form,
    den: Form,
}

fn factor(mut k: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= k {
        let mut e = 0;
        while k.is_multiple_of(p) {
            k /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if k > 1 {
        out.push((k, 1));
    }
    out
}

fn add_log(form: &mut Form, coeff: &BigRational, k: u64) {
    for (p, e) in factor(k) {
        let slot = form.entry(p).or_insert_with(BigRational::zero);
        *slot += coeff * rat(e as i64);
        if slot.is_zero() {
            form.remove(&p);
        }
    }
}

fn form_f64(form: &Form) -> f64 {
    form.iter().map(|(p, c)| rat_to_f64(c) * (*p as f64).ln()).sum()
}

/// Writes a nonnegative form as `r · log(N)` with `N` an integer and the
/// exponents of `N` coprime.
fn as_single_log(form: &Form) -> (BigRational, BigInt) {
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for c in form.values() {
        g = g.gcd(c.numer());
        l = l.lcm(c.denom());
    }
    let r = BigRational::new(g, l);
    let mut n = BigInt::one();
    for (p, c) in form {
        let e = (c / &r).to_integer().to_u32().unwrap_or(0);
        n *= BigInt::from(*p).pow(e);
    }
    (r, n)
}

impl LogRatio {
    pub fn zero() -> Self {
        LogRatio { num: Form::new(), den: Form::new() }
    }

    /// `(Σ c_i log k_i) / (Σ c'_j log k'_j)` with positive integer arguments.
    pub fn new(num: &[(BigRational, u64)], den: &[(BigRational, u64)]) -> Result<Self> {
        let mut nf = Form::new();
        for (c, k) in num {
            if *k == 0 {
                return Err(Error::PreconditionViolated("log of 0".into()));
            }
            add_log(&mut nf, c, *k);
        }
        let mut df = Form::new();
        for (c, k) in den {
            if *k == 0 {
                return Err(Error::PreconditionViolated("log of 0".into()));
            }
            add_log(&mut df, c, *k);
        }
        if df.is_empty() {
            return Err(Error::PreconditionViolated("denominator log vanishes".into()));
        }
        let mut out = LogRatio { num: nf, den: df };
        out.normalize();
        Ok(out)
    }

    /// `log a / log b`.
    pub fn logs(a: u64, b: u64) -> Result<Self> {
        Self::new(&[(BigRational::one(), a)], &[(BigRational::one(), b)])
    }

    /// `n · Σ_ℓ log(counts_ℓ) / (p · log det)`: the dimension attached to a
    /// periodic block of digit-set sizes.
    pub fn from_counts(n: usize, counts: &[u64], p: usize, det: u64) -> Result<Self> {
        let num: Vec<(BigRational, u64)> = counts.iter().map(|&c| (rat(n as i64), c)).collect();
        Self::new(&num, &[(rat(p as i64), det)])
    }

    fn normalize(&mut self) {
        if self.num.is_empty() {
            self.den.clear();
            return;
        }
        let lead = self.den.values().next().unwrap().clone();
        for v in self.num.values_mut().chain(self.den.values_mut()) {
            *v = &*v / &lead;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        let mut out = self.clone();
        for v in out.num.values_mut() {
            *v = &*v * r;
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        form_f64(&self.num) / form_f64(&self.den)
    }

    /// Parses the [`Display`](fmt::Display) form: `0`, `log(a)/log(b)` or
    /// `p/q*log(a)/log(b)`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::PreconditionViolated(format!("cannot parse log ratio {s:?}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "0" {
            return Ok(Self::zero());
        }
        let (coef, rest) = match t.find("*log(") {
            Some(i) => (t[..i].to_string(), &t[i + 1..]),
            None => ("1".to_string(), t.as_str()),
        };
        let coef: BigRational = match coef.split_once('/') {
            Some((a, b)) => BigRational::new(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
            None => BigRational::from_integer(coef.parse().map_err(|_| bad())?),
        };
        let inner = rest.strip_prefix("log(").ok_or_else(bad)?;
        let (a, rest) = inner.split_once(")/log(").ok_or_else(bad)?;
        let b = rest.strip_suffix(')').ok_or_else(bad)?;
        let a: u64 = a.parse().map_err(|_| bad())?;
        let b: u64 = b.parse().map_err(|_| bad())?;
        Self::new(&[(coef, a)], &[(BigRational::one(), b)])
    }
}

impl fmt::Display for LogRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let (rn, n) = as_single_log(&self.num);
        let (rd, d) = as_single_log(&self.den);
        let q = rn / rd;
        if q.is_one() {
            write!(f, "log({n})/log({d})")
        } else if q.is_integer() {
            write!(f, "{}*log({n})/log({d})", q.numer())
        } else {
            let sign = if q.is_negative() { "-" } else { "" };
            write!(f, "{sign}{}/{}*log({n})/log({d})", q.numer().abs(), q.denom())
        }
    }
}
