use num_integer::Integer;

use crate::error::{Error, Result};

/// An eventually periodic sequence `(x_1, ..., x_m, overline{y_1, ..., y_p})`.
///
/// Values are always stored in canonical form: the cycle is primitive (not a
/// power of a shorter word) and the preperiod is as short as possible. Two
/// sequences are therefore equal as infinite sequences iff they are `==`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpSeq<T> {
    pre: Vec<T>,
    cycle: Vec<T>,
}

impl<T: Clone + PartialEq> EpSeq<T> {
    pub fn new(pre: Vec<T>, cycle: Vec<T>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::PreconditionViolated("cycle of an eventually periodic sequence is empty".into()));
        }
        let mut s = EpSeq { pre, cycle };
        s.canonicalize();
        Ok(s)
    }

    pub fn periodic(cycle: Vec<T>) -> Result<Self> {
        Self::new(Vec::new(), cycle)
    }

    pub fn constant(x: T) -> Self {
        EpSeq { pre: Vec::new(), cycle: vec![x] }
    }

    fn canonicalize(&mut self) {
        let p = self.cycle.len();
        if let Some(d) = (1..p).find(|&d| p.is_multiple_of(d) && (d..p).all(|i| self.cycle[i] == self.cycle[i - d])) {
            self.cycle.truncate(d);
        }
        while let Some(last) = self.pre.last() {
            if *last != *self.cycle.last().unwrap() {
                break;
            }
            self.pre.pop();
            self.cycle.rotate_right(1);
        }
    }

    pub fn pre(&self) -> &[T] {
        &self.pre
    }

    pub fn cycle(&self) -> &[T] {
        &self.cycle
    }

    pub fn pre_len(&self) -> usize {
        self.pre.len()
    }

    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    /// Entry at 0-based index `i`.
    pub fn at(&self, i: usize) -> &T {
        if i < self.pre.len() {
            &self.pre[i]
        } else {
            &self.cycle[(i - self.pre.len()) % self.cycle.len()]
        }
    }

    /// Entry `x_j` for 1-based `j`.
    pub fn get(&self, j: usize) -> &T {
        self.at(j - 1)
    }

    pub fn prefix(&self, k: usize) -> Vec<T> {
        (0..k).map(|i| self.at(i).clone()).collect()
    }

    /// Non-canonical layout with preperiod `pre_len ≥ m` and period a
    /// multiple of `p`.
    pub fn layout(&self, pre_len: usize, period: usize) -> (Vec<T>, Vec<T>) {
        debug_assert!(pre_len >= self.pre.len() && period.is_multiple_of(self.cycle.len()));
        (self.prefix(pre_len), (pre_len..pre_len + period).map(|i| self.at(i).clone()).collect())
    }

    pub fn map<U: Clone + PartialEq>(&self, mut f: impl FnMut(&T) -> U) -> EpSeq<U> {
        let mut s = EpSeq { pre: self.pre.iter().map(&mut f).collect(), cycle: self.cycle.iter().map(&mut f).collect() };
        s.canonicalize();
        s
    }

    pub fn try_map<U: Clone + PartialEq, E>(&self, mut f: impl FnMut(&T) -> std::result::Result<U, E>) -> std::result::Result<EpSeq<U>, E> {
        let pre = self.pre.iter().map(&mut f).collect::<std::result::Result<Vec<_>, E>>()?;
        let cycle = self.cycle.iter().map(&mut f).collect::<std::result::Result<Vec<_>, E>>()?;
        let mut s = EpSeq { pre, cycle };
        s.canonicalize();
        Ok(s)
    }

    /// Pointwise combination of two sequences.
    pub fn zip_with<U: Clone + PartialEq, V: Clone + PartialEq>(
        &self,
        other: &EpSeq<U>,
        mut f: impl FnMut(&T, &U) -> V,
    ) -> EpSeq<V> {
        let (m, p) = align(&[self.pre_len(), other.pre_len()], &[self.period(), other.period()]);
        let item = |i: usize, f: &mut dyn FnMut(&T, &U) -> V| f(self.at(i), other.at(i));
        let pre = (0..m).map(|i| item(i, &mut f)).collect();
        let cycle = (m..m + p).map(|i| item(i, &mut f)).collect();
        let mut s = EpSeq { pre, cycle };
        s.canonicalize();
        s
    }

    /// The sequence with its first entry removed.
    pub fn shift(&self) -> Self {
        let mut s = if self.pre.is_empty() {
            let mut c = self.cycle.clone();
            c.rotate_left(1);
            EpSeq { pre: Vec::new(), cycle: c }
        } else {
            EpSeq { pre: self.pre[1..].to_vec(), cycle: self.cycle.clone() }
        };
        s.canonicalize();
        s
    }

    /// Total number of stored entries, `m + p`.
    pub fn stored_len(&self) -> usize {
        self.pre.len() + self.cycle.len()
    }
}

/// Common layout for several sequences: the largest preperiod and the lcm of
/// the periods.
pub fn align(pres: &[usize], periods: &[usize]) -> (usize, usize) {
    let m = pres.iter().copied().max().unwrap_or(0);
    let p = periods.iter().copied().fold(1, |a, b| a.lcm(&b));
    (m, p)
}

impl<T: std::fmt::Debug> std::fmt::Display for EpSeq<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for x in &self.pre {
            write!(f, "{x:?}, ")?;
        }
        write!(f, "overline[")?;
        for (i, x) in self.cycle.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x:?}")?;
        }
        write!(f, "])")
    }
}
