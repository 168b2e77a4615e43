//! Strong eventual periodicity.
//!
//! An integer sequence is SEP when it reads `(b_ℓ)_{ℓ≤P}` followed by the
//! repeated block `(b_ℓ + c_ℓ)_{ℓ≤P}` with every `c_ℓ ≥ 0`. For sequences of
//! sets the same shape is required with Minkowski sums, after translating
//! the `j`-th set by a digit `β_j`.
//!
//! For an eventually periodic input with canonical preperiod `m` and cycle
//! length `c`, the admissible block lengths are exactly the multiples of `c`
//! that are at least `max(m, 1)`, and whether the per-position conditions hold
//! does not depend on which admissible `P` (or which `β`) is used. Checking the
//! least admissible `P` therefore decides the question.

use std::collections::BTreeSet;

use crate::epseq::EpSeq;
use crate::error::{Error, Result};
use crate::linalg::{v_add, v_sub, IntVec};

/// A finite subset of `Z^n`, kept sorted and free of duplicates.
pub type DigitSet = Vec<IntVec>;

pub fn make_set(items: impl IntoIterator<Item = IntVec>) -> DigitSet {
    items.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

pub fn sumset(x: &[IntVec], y: &[IntVec]) -> Result<DigitSet> {
    let mut out = BTreeSet::new();
    for a in x {
        for b in y {
            out.insert(v_add(a, b)?);
        }
    }
    Ok(out.into_iter().collect())
}

pub fn translate(x: &[IntVec], t: &[i64]) -> Result<DigitSet> {
    make_set_checked(x.iter().map(|a| v_sub(a, t)))
}

fn make_set_checked(items: impl Iterator<Item = Result<IntVec>>) -> Result<DigitSet> {
    Ok(make_set(items.collect::<Result<Vec<_>>>()?))
}

/// The largest `S` with `X + S = Y`, if any `S` works at all.
pub fn sumset_complement(x: &[IntVec], y: &[IntVec]) -> Result<Option<DigitSet>> {
    let Some(first) = x.first() else { return Ok(None) };
    let mut s: BTreeSet<IntVec> = y.iter().map(|b| v_sub(b, first)).collect::<Result<_>>()?;
    for a in &x[1..] {
        let t: BTreeSet<IntVec> = y.iter().map(|b| v_sub(b, a)).collect::<Result<_>>()?;
        s = s.intersection(&t).cloned().collect();
    }
    if s.is_empty() {
        return Ok(None);
    }
    let s: DigitSet = s.into_iter().collect();
    Ok((sumset(x, &s)? == y).then_some(s))
}

/// Least admissible block length for a sequence with canonical preperiod
/// `m` and period `c`.
pub fn least_block_length(m: usize, c: usize) -> usize {
    m.max(1).div_ceil(c) * c
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SepIntWitness {
    pub p: usize,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
}

impl SepIntWitness {
    pub fn sequence(&self) -> Result<EpSeq<i64>> {
        let tail = self.b.iter().zip(&self.c).map(|(b, c)| b + c).collect();
        EpSeq::new(self.b.clone(), tail)
    }
}

pub fn is_sep_int(seq: &EpSeq<i64>) -> Option<SepIntWitness> {
    let p = least_block_length(seq.pre_len(), seq.period());
    let b = seq.prefix(p);
    let c: Vec<i64> = (0..p).map(|l| seq.at(l + p) - seq.at(l)).collect();
    c.iter().all(|&x| x >= 0).then_some(SepIntWitness { p, b, c })
}

/// Certificate that `D_j − β_j` is `U_ℓ` for `j = ℓ ≤ P` and `U_ℓ + V_ℓ` for
/// `j = ℓ + kP`, `k ≥ 1`. The translations are `β_block` on the first block
/// and the periodic `β_tail` afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SepSetWitness {
    pub p: usize,
    pub beta_block: Vec<IntVec>,
    pub beta_tail: Vec<IntVec>,
    pub u: Vec<DigitSet>,
    pub v: Vec<DigitSet>,
}

impl SepSetWitness {
    /// The full sequence `β` as an eventually periodic digit sequence.
    pub fn beta(&self) -> Result<EpSeq<IntVec>> {
        EpSeq::new(self.beta_block.clone(), self.beta_tail.clone())
    }

    /// The set sequence this witness describes.
    pub fn sequence(&self) -> Result<EpSeq<DigitSet>> {
        let pre = self.u.iter().zip(&self.beta_block).map(|(u, b)| translate(u, &b.iter().map(|x| -x).collect::<Vec<_>>())).collect::<Result<Vec<_>>>()?;
        let mut tail = Vec::with_capacity(self.p);
        for l in 0..self.p {
            let s = sumset(&self.u[l], &self.v[l])?;
            let neg: IntVec = self.beta_tail[l].iter().map(|x| -x).collect();
            tail.push(translate(&s, &neg)?);
        }
        EpSeq::new(pre, tail)
    }

    /// Checks shape and that the witness reproduces `seq`.
    pub fn validate(&self, seq: &EpSeq<DigitSet>) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidWitness(m.into()));
        if self.p == 0 || [self.beta_block.len(), self.beta_tail.len(), self.u.len(), self.v.len()].iter().any(|&l| l != self.p) {
            return bad("block lengths differ from P");
        }
        if self.u.iter().chain(&self.v).any(|s| s.is_empty()) {
            return bad("empty set in witness");
        }
        if self.sequence()? != *seq {
            return bad("witness does not reproduce the sequence");
        }
        Ok(())
    }

    /// Whether every `U_ℓ + V_ℓ` has `|U_ℓ|·|V_ℓ|` elements.
    pub fn sums_are_direct(&self) -> Result<bool> {
        for (u, v) in self.u.iter().zip(&self.v) {
            if sumset(u, v)?.len() != u.len() * v.len() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// SEP test for set sequences without translation.
pub fn is_sep_sets(seq: &EpSeq<DigitSet>) -> Result<Option<SepSetWitness>> {
    let n = seq.at(0).first().map_or(0, |v| v.len());
    let zero = vec![0; n];
    let p = least_block_length(seq.pre_len(), seq.period());
    witness_for(seq, p, &zero)
}

fn witness_for(seq: &EpSeq<DigitSet>, p: usize, beta: &IntVec) -> Result<Option<SepSetWitness>> {
    let mut u = Vec::with_capacity(p);
    let mut v = Vec::with_capacity(p);
    for l in 0..p {
        let ul = translate(seq.at(l), beta)?;
        let yl = translate(seq.at(l + p), beta)?;
        match sumset_complement(&ul, &yl)? {
            Some(s) => {
                u.push(ul);
                v.push(s);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(SepSetWitness { p, beta_block: vec![beta.clone(); p], beta_tail: vec![beta.clone(); p], u, v }))
}

/// Default search bound on `P`.
pub fn default_block_bound(seq_pre: usize, seq_period: usize) -> usize {
    12usize.max(3 * seq_period * (seq_pre + 1))
}

/// SEP test after translation by digits of `digits`. `bound` caps the block
/// length; `None` uses [`default_block_bound`].
pub fn is_sep_sets_translated(digits: &[IntVec], seq: &EpSeq<DigitSet>, bound: Option<usize>) -> Result<Option<SepSetWitness>> {
    let Some(smallest) = digits.iter().min() else {
        return Err(Error::PreconditionViolated("digit set is empty".into()));
    };
    let dset: BTreeSet<&IntVec> = digits.iter().collect();
    for s in seq.pre().iter().chain(seq.cycle()) {
        if s.is_empty() || s.iter().any(|d| !dset.contains(d)) {
            return Err(Error::PreconditionViolated("sets must be nonempty subsets of the digit set".into()));
        }
    }
    let bound = bound.unwrap_or_else(|| default_block_bound(seq.pre_len(), seq.period()));
    let p = least_block_length(seq.pre_len(), seq.period());
    if p > bound {
        return Err(Error::SearchBudgetExceeded { bound, needed: p });
    }
    let zero = vec![0; smallest.len()];
    let beta = if dset.contains(&zero) { zero } else { smallest.clone() };
    witness_for(seq, p, &beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[i64]) -> DigitSet {
        make_set(v.iter().map(|&x| vec![x]))
    }

    fn sets(pre: &[&[i64]], cyc: &[&[i64]]) -> EpSeq<DigitSet> {
        EpSeq::new(pre.iter().map(|x| s(x)).collect(), cyc.iter().map(|x| s(x)).collect()).unwrap()
    }

    #[test]
    fn complements() {
        assert_eq!(sumset_complement(&s(&[0, 4]), &s(&[0, 4, 8])).unwrap(), Some(s(&[0, 4])));
        assert_eq!(sumset_complement(&s(&[0]), &s(&[8])).unwrap(), Some(s(&[8])));
        assert_eq!(sumset_complement(&s(&[0, 6]), &s(&[0, 3, 6])).unwrap(), None);
        // maximal choice, a superset of {0,2}
        assert_eq!(sumset_complement(&s(&[0, 1]), &s(&[0, 1, 2, 3])).unwrap(), Some(s(&[0, 1, 2])));
        assert_eq!(sumset_complement(&s(&[0, 2]), &s(&[0, 1, 2, 3])).unwrap(), Some(s(&[0, 1])));
    }

    #[test]
    fn integer_sequences() {
        let w = is_sep_int(&EpSeq::new(vec![0], vec![2]).unwrap()).unwrap();
        assert_eq!(w, SepIntWitness { p: 1, b: vec![0], c: vec![2] });
        assert!(is_sep_int(&EpSeq::new(vec![2], vec![0]).unwrap()).is_none());
        let w = is_sep_int(&EpSeq::constant(5)).unwrap();
        assert_eq!(w, SepIntWitness { p: 1, b: vec![5], c: vec![0] });
        let x = EpSeq::new(vec![1, 0, 3], vec![2, 4]).unwrap();
        let w = is_sep_int(&x).unwrap();
        assert_eq!(w.p, 4);
        assert_eq!(w.sequence().unwrap(), x);
    }

    #[test]
    fn set_sequences() {
        let d = s(&[0, 4, 8]);
        let seq = sets(&[&[0, 4], &[0]], &[&[0, 4, 8], &[8]]);
        let w = is_sep_sets_translated(&d, &seq, None).unwrap().unwrap();
        assert_eq!(w.p, 2);
        assert_eq!(w.u, vec![s(&[0, 4]), s(&[0])]);
        assert_eq!(w.v, vec![s(&[0, 4]), s(&[8])]);
        assert!(w.beta_block.iter().chain(&w.beta_tail).all(|b| b == &vec![0]));
        w.validate(&seq).unwrap();
        assert!(!w.sums_are_direct().unwrap());

        let seq = sets(&[&[0], &[0, 6]], &[&[0, 1], &[0, 3, 6]]);
        assert_eq!(is_sep_sets_translated(&s(&(0..9).collect::<Vec<_>>()), &seq, None).unwrap(), None);

        let d = s(&[0, 10, 20]);
        let seq = sets(&[], &[&[10, 20], &[0, 10, 20]]);
        let w = is_sep_sets_translated(&d, &seq, None).unwrap().unwrap();
        assert_eq!((w.p, w.u.clone(), w.v.clone()), (2, vec![s(&[10, 20]), d.clone()], vec![s(&[0]), s(&[0])]));
        assert_eq!(is_sep_sets(&seq).unwrap().unwrap(), w);
    }

    #[test]
    fn translation_without_zero_digit() {
        let d = s(&[1, 5, 9]);
        let seq = sets(&[&[1, 5], &[1]], &[&[1, 5, 9], &[9]]);
        let w = is_sep_sets_translated(&d, &seq, None).unwrap().unwrap();
        assert_eq!(w.beta_block[0], vec![1]);
        w.validate(&seq).unwrap();
    }

    #[test]
    fn budget_is_reported() {
        let seq = sets(&[&[0], &[0], &[0], &[0]], &[&[0, 4]]);
        let e = is_sep_sets_translated(&s(&[0, 4]), &seq, Some(2)).unwrap_err();
        assert_eq!(e, Error::SearchBudgetExceeded { bound: 2, needed: 4 });
        assert!(is_sep_sets_translated(&s(&[0, 4]), &seq, None).unwrap().is_some());
        assert!(is_sep_sets_translated(&s(&[0, 4]), &sets(&[], &[&[8]]), None).is_err());
    }
}
