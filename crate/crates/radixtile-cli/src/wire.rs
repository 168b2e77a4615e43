//! JSON wire formats: system descriptors, payload fragments and output
//! encoders. Exact rationals are written as `"p/q"` strings next to floats.

use std::path::Path;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Deserialize;
use serde_json::{json, Value};

use radixtile::intersect::DimReport;
use radixtile::numsys::companion_system;
use radixtile::sep::{make_set, DigitSet, SepIntWitness, SepSetWitness};
use radixtile::{EpSeq, Error, IntMatrix, IntVec, RadixSystem};

use crate::CliError;

/// An integer vector, or a bare integer read as a multiple of `e1`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Vector {
    Scalar(i64),
    Full(Vec<i64>),
}

impl Vector {
    pub fn resolve(&self, n: usize) -> Result<IntVec, CliError> {
        match self {
            Vector::Scalar(x) => {
                let mut v = vec![0; n.max(1)];
                v[0] = *x;
                Ok(v)
            }
            Vector::Full(v) if v.len() == n => Ok(v.clone()),
            Vector::Full(v) => Err(Error::DimensionMismatch(format!("{v:?} in dimension {n}")).into()),
        }
    }
}

pub fn resolve_all(xs: &[Vector], n: usize) -> Result<Vec<IntVec>, CliError> {
    xs.iter().map(|x| x.resolve(n)).collect()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixWire {
    Flat(Vec<i64>),
    Rows(Vec<Vec<i64>>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polynomial {
    /// Constant term first, leading coefficient 1 last.
    pub coeffs: Vec<i64>,
    pub digits: Vec<i64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDescriptor {
    pub matrix: Option<MatrixWire>,
    /// Omitted digits default to the canonical residue system of the matrix.
    pub digits: Option<Vec<Vector>>,
    pub polynomial: Option<Polynomial>,
}

impl SystemDescriptor {
    pub fn matrix(&self) -> Result<IntMatrix, CliError> {
        match (&self.matrix, &self.polynomial) {
            (Some(MatrixWire::Flat(v)), None) => Ok(IntMatrix::from_flat(v.clone())?),
            (Some(MatrixWire::Rows(r)), None) => Ok(IntMatrix::from_rows(r)?),
            (None, Some(p)) => Ok(companion_system(&p.coeffs, &p.digits)?.matrix().clone()),
            _ => Err(CliError::Input("descriptor needs exactly one of `matrix` and `polynomial`".into())),
        }
    }

    pub fn system(&self) -> Result<RadixSystem, CliError> {
        if let Some(p) = &self.polynomial {
            if self.matrix.is_some() || self.digits.is_some() {
                return Err(CliError::Input("`polynomial` carries its own digits; drop `matrix` and `digits`".into()));
            }
            return Ok(companion_system(&p.coeffs, &p.digits)?);
        }
        let a = self.matrix()?;
        match &self.digits {
            Some(d) => Ok(RadixSystem::new(a.clone(), resolve_all(d, a.dim())?)?),
            None => Ok(RadixSystem::with_residue_digits(a)?),
        }
    }
}

/// `{"pre": [...], "cycle": [...]}`; `pre` may be omitted.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpWire<T> {
    #[serde(default = "Vec::new")]
    pub pre: Vec<T>,
    pub cycle: Vec<T>,
}

impl EpWire<Vector> {
    pub fn digits(&self, n: usize) -> Result<EpSeq<IntVec>, CliError> {
        Ok(EpSeq::new(resolve_all(&self.pre, n)?, resolve_all(&self.cycle, n)?)?)
    }
}

impl EpWire<Vec<Vector>> {
    pub fn sets(&self, n: usize) -> Result<EpSeq<DigitSet>, CliError> {
        let conv = |xs: &Vec<Vector>| resolve_all(xs, n).map(make_set);
        let pre = self.pre.iter().map(conv).collect::<Result<Vec<_>, _>>()?;
        let cycle = self.cycle.iter().map(conv).collect::<Result<Vec<_>, _>>()?;
        Ok(EpSeq::new(pre, cycle)?)
    }
}

impl EpWire<i64> {
    pub fn ints(&self) -> Result<EpSeq<i64>, CliError> {
        Ok(EpSeq::new(self.pre.clone(), self.cycle.clone())?)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn vec_json(v: &[i64]) -> Value {
    if v.len() == 1 {
        json!(v[0])
    } else {
        json!(v)
    }
}

pub fn vecs_json(vs: &[IntVec]) -> Value {
    Value::Array(vs.iter().map(|v| vec_json(v)).collect())
}

pub fn rat_str(x: &BigRational) -> String {
    x.to_string()
}

pub fn rat_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `{"exact": ["p/q", ...], "float": [...]}`.
pub fn ratvec_json(v: &[BigRational]) -> Value {
    json!({
        "exact": v.iter().map(rat_str).collect::<Vec<_>>(),
        "float": v.iter().map(rat_f64).collect::<Vec<_>>(),
    })
}

pub fn digits_json(s: &EpSeq<IntVec>) -> Value {
    json!({ "pre": vecs_json(s.pre()), "cycle": vecs_json(s.cycle()) })
}

pub fn sets_json(s: &EpSeq<DigitSet>) -> Value {
    let f = |xs: &[DigitSet]| xs.iter().map(|d| vecs_json(d)).collect::<Vec<_>>();
    json!({ "pre": f(s.pre()), "cycle": f(s.cycle()) })
}

pub fn int_witness_json(w: &SepIntWitness) -> Value {
    json!({ "p": w.p, "b": w.b, "c": w.c })
}

pub fn set_witness_json(w: &SepSetWitness) -> Value {
    let sets = |xs: &[DigitSet]| xs.iter().map(|d| vecs_json(d)).collect::<Vec<_>>();
    json!({
        "p": w.p,
        "beta_block": vecs_json(&w.beta_block),
        "beta_tail": vecs_json(&w.beta_tail),
        "u": sets(&w.u),
        "v": sets(&w.v),
    })
}

pub fn dim_json(d: &DimReport) -> Value {
    json!({
        "kind": d.kind.name(),
        "exact": d.exact.to_string(),
        "float": d.float,
        "counts": d.counts,
        "p": d.p,
        "det": d.det,
        "n": d.n,
        "flags": {
            "ssc": d.flags.ssc,
            "osc_implied_false": d.flags.osc_implied_false,
            "uniqueness_assumed": d.flags.uniqueness_assumed,
        },
    })
}

/// Parses `"p/q"` or `"p"` into a pair of non-negative integers.
pub fn parse_fraction(s: &str) -> Result<(u64, u64), CliError> {
    let bad = || CliError::Input(format!("expected p/q, got {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?),
        None => (s.trim().parse().map_err(|_| bad())?, 1),
    };
    Ok((p, q))
}

/// Parses a comma-separated integer vector such as `1,0`.
pub fn parse_vector(s: &str) -> Result<IntVec, CliError> {
    s.split(',').map(|x| x.trim().parse().map_err(|_| CliError::Input(format!("bad vector {s:?}")))).collect()
}
