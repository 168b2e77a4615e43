//! Discrete expansions `v = d_0 + A d_1 + ... + A^{m-1} d_{m-1}` and the
//! number-system decision.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::linalg::{self, v_add, v_sub, IntMatrix, IntVec, ResidueClassifier};
use crate::system::RadixSystem;

/// Digit lookup for a system whose digits form a complete residue system.
#[derive(Clone, Debug)]
pub struct CrsIndex {
    classifier: ResidueClassifier,
    by_class: HashMap<IntVec, IntVec>,
    adj: IntMatrix,
    det: i64,
}

impl CrsIndex {
    pub fn new(sys: &RadixSystem) -> Result<Self> {
        let classifier = ResidueClassifier::new(sys.matrix())?;
        if sys.digits().len() as u128 != classifier.modulus() {
            return Err(Error::NotACrs(format!(
                "{} digits for {} residue classes",
                sys.digits().len(),
                classifier.modulus()
            )));
        }
        let mut by_class = HashMap::new();
        for d in sys.digits() {
            if let Some(prev) = by_class.insert(classifier.class_of(d)?, d.clone()) {
                return Err(Error::NotACrs(format!("{prev:?} and {d:?} are congruent")));
            }
        }
        let det = sys.matrix().det()?;
        let adj = sys.inverse().scale(&linalg::rat(det)).to_int().ok_or(Error::Overflow)?;
        Ok(CrsIndex { classifier, by_class, adj, det })
    }

    pub fn digit_of(&self, v: &[i64]) -> Result<&IntVec> {
        let c = self.classifier.class_of(v)?;
        self.by_class.get(&c).ok_or_else(|| Error::NotACrs(format!("no digit congruent to {v:?}")))
    }

    /// `g(v) = A^{-1}(v − d(v))`, exact.
    pub fn step(&self, v: &[i64]) -> Result<(IntVec, IntVec)> {
        let d = self.digit_of(v)?.clone();
        let w = self.adj.mul_vec(&v_sub(v, &d)?)?;
        let next = w.iter().map(|x| x / self.det).collect();
        Ok((next, d))
    }
}

/// The unique `d ∈ D` with `A^{-1}(v − d)` integral.
pub fn digit_of(sys: &RadixSystem, v: &[i64]) -> Result<IntVec> {
    CrsIndex::new(sys)?.digit_of(v).cloned()
}

/// Orbit of `v` under `g(x) = A^{-1}(x − d(x))`.
///
/// `transient` starts with `v` and ends just before the first cycle element;
/// `digits_emitted[k]` is the digit removed from `transient[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemainderTrace {
    pub transient: Vec<IntVec>,
    pub cycle: Vec<IntVec>,
    pub digits_emitted: Vec<IntVec>,
    pub cycle_digits: Vec<IntVec>,
}

fn trace_with(index: &CrsIndex, v: &[i64]) -> Result<RemainderTrace> {
    let mut seen: HashMap<IntVec, usize> = HashMap::new();
    let mut orbit = Vec::new();
    let mut digits = Vec::new();
    let mut x = v.to_vec();
    loop {
        if let Some(&start) = seen.get(&x) {
            let cycle = orbit.split_off(start);
            let cycle_digits = digits.split_off(start);
            return Ok(RemainderTrace { transient: orbit, cycle, digits_emitted: digits, cycle_digits });
        }
        seen.insert(x.clone(), orbit.len());
        let (next, d) = index.step(&x)?;
        orbit.push(x);
        digits.push(d);
        x = next;
    }
}

pub fn remainder_sequence(sys: &RadixSystem, v: &[i64]) -> Result<RemainderTrace> {
    trace_with(&CrsIndex::new(sys)?, v)
}

/// Rotates a cycle so that it starts at its lexicographically least element.
fn normalize_cycle(mut c: Vec<IntVec>) -> Vec<IntVec> {
    let k = (0..c.len()).min_by(|&i, &j| c[i].cmp(&c[j])).unwrap_or(0);
    c.rotate_left(k);
    c
}

/// Decides whether every lattice vector has a finite expansion. Returns the
/// verdict and every nonzero cycle of the remainder map (sorted).
pub fn is_number_system(sys: &RadixSystem) -> Result<(bool, Vec<Vec<IntVec>>)> {
    let index = CrsIndex::new(sys)?;
    let zero = vec![0; sys.dim()];
    if !sys.has_digit(&zero) {
        return Err(Error::ZeroNotInDigits);
    }
    let radius = sys.spectral().ball_radius_factor * sys.max_digit_norm();
    let pts = linalg::lattice_points_in_ball(sys.dim(), radius, 10_000_000)?;
    let mut settled: HashMap<IntVec, usize> = HashMap::new();
    let mut cycles: Vec<Vec<IntVec>> = Vec::new();
    for p in pts {
        if settled.contains_key(&p) {
            continue;
        }
        let mut path = Vec::new();
        let mut x = p;
        let id = loop {
            if let Some(&id) = settled.get(&x) {
                break id;
            }
            if let Some(pos) = path.iter().position(|y| *y == x) {
                let id = cycles.len();
                cycles.push(normalize_cycle(path[pos..].to_vec()));
                break id;
            }
            let (next, _) = index.step(&x)?;
            path.push(x);
            x = next;
        };
        for y in path {
            settled.insert(y, id);
        }
    }
    let mut witnesses: Vec<Vec<IntVec>> = cycles.into_iter().filter(|c| c != &vec![zero.clone()]).collect();
    witnesses.sort();
    Ok((witnesses.is_empty(), witnesses))
}

/// Least-significant-first digits of `v`; empty for `v = 0`.
pub fn discrete_expansion(sys: &RadixSystem, v: &[i64]) -> Result<Vec<IntVec>> {
    let t = remainder_sequence(sys, v)?;
    if t.cycle.len() != 1 || t.cycle[0].iter().any(|&x| x != 0) {
        return Err(Error::NonTerminating(v.to_vec()));
    }
    Ok(t.digits_emitted)
}

/// `d_0 + A d_1 + ... + A^{m-1} d_{m-1}`.
pub fn evaluate_expansion(a: &IntMatrix, digits: &[IntVec]) -> Result<IntVec> {
    let mut acc = vec![0; a.dim()];
    for d in digits.iter().rev() {
        acc = v_add(&a.mul_vec(&acc)?, d)?;
    }
    Ok(acc)
}

/// System realizing multiplication by a root of the monic polynomial with
/// coefficients `coeffs` (constant term first, leading 1 last) on the basis
/// `1, ρ, ..., ρ^{n-1}`, with digits `d·e1`.
pub fn companion_system(coeffs: &[i64], digits: &[i64]) -> Result<RadixSystem> {
    match coeffs.last() {
        Some(1) if coeffs.len() >= 2 => {}
        _ => return Err(Error::PreconditionViolated("polynomial must be monic of degree ≥ 1".into())),
    }
    let n = coeffs.len() - 1;
    let a = IntMatrix::companion(&coeffs[..n])?;
    let ds = digits
        .iter()
        .map(|&d| {
            let mut v = vec![0; n];
            v[0] = d;
            v
        })
        .collect();
    RadixSystem::new(a, ds)
}

/// `(A, {0..|det A|−1}·e1)`, valid when `e1` generates `Z^n / A Z^n`.
pub fn consecutive_digits(a: &IntMatrix) -> Result<Vec<IntVec>> {
    let det = a.det_big();
    let k = det.magnitude().to_i64().ok_or(Error::Overflow)?;
    let n = a.dim();
    Ok((0..k)
        .map(|d| {
            let mut v = vec![0; n];
            v[0] = d;
            v
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn std4() -> RadixSystem {
        RadixSystem::new(IntMatrix::scalar(2, 2), vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap()
    }

    fn decimal() -> RadixSystem {
        RadixSystem::scalar(10, &(0..10).collect::<Vec<_>>()).unwrap()
    }

    fn gauss(n: i64) -> RadixSystem {
        RadixSystem::gaussian(-n, 1, &(0..=n * n).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn digit_lookup() {
        assert_eq!(digit_of(&decimal(), &[37]).unwrap(), vec![7]);
        assert_eq!(digit_of(&std4(), &[-1, 1]).unwrap(), vec![1, 1]);
        assert_eq!(digit_of(&gauss(3), &[1, 0]).unwrap(), vec![1, 0]);
        let not_crs = RadixSystem::scalar(10, &[0, 1, 2]).unwrap();
        assert!(matches!(digit_of(&not_crs, &[5]), Err(Error::NotACrs(_))));
    }

    #[test]
    fn remainder_traces() {
        let t = remainder_sequence(&decimal(), &[-1]).unwrap();
        assert!(t.transient.is_empty());
        assert_eq!(t.cycle, vec![vec![-1]]);
        let t = remainder_sequence(&std4(), &[-1, 1]).unwrap();
        assert_eq!(t.transient, vec![vec![-1, 1]]);
        assert_eq!(t.cycle, vec![vec![-1, 0]]);
        let t = remainder_sequence(&decimal(), &[905]).unwrap();
        assert_eq!(t.cycle, vec![vec![0]]);
        assert_eq!(t.digits_emitted, vec![vec![5], vec![0], vec![9]]);
        // link-by-link: v_{k-1} = A v_k + e_{k-1}
        let sys = gauss(2);
        let t = remainder_sequence(&sys, &[17, -23]).unwrap();
        let all: Vec<IntVec> = t.transient.iter().chain(&t.cycle).cloned().collect();
        for k in 1..all.len() {
            let back = v_add(&sys.matrix().mul_vec(&all[k]).unwrap(), &t.digits_emitted.get(k - 1).cloned().unwrap_or_else(|| t.cycle_digits[k - 1 - t.digits_emitted.len()].clone())).unwrap();
            assert_eq!(back, all[k - 1]);
        }
    }

    #[test]
    fn number_system_decisions() {
        let (ok, w) = is_number_system(&std4()).unwrap();
        assert!(!ok);
        assert_eq!(w, vec![vec![vec![-1, -1]], vec![vec![-1, 0]], vec![vec![0, -1]]]);
        let (ok, w) = is_number_system(&decimal()).unwrap();
        assert!(!ok);
        assert_eq!(w, vec![vec![vec![-1]]]);
        for n in 1..=4 {
            assert!(is_number_system(&gauss(n)).unwrap().0, "n = {n}");
        }
        let no_zero = RadixSystem::scalar(10, &(1..=10).collect::<Vec<_>>()).unwrap();
        assert_eq!(is_number_system(&no_zero), Err(Error::ZeroNotInDigits));
    }

    #[test]
    fn cycles_reproduce_from_any_point() {
        let (_, w) = is_number_system(&std4()).unwrap();
        for c in w {
            for p in &c {
                let t = remainder_sequence(&std4(), p).unwrap();
                assert!(t.transient.is_empty());
                assert_eq!(normalize_cycle(t.cycle), c);
            }
        }
    }

    #[test]
    fn expansions_round_trip() {
        assert_eq!(discrete_expansion(&decimal(), &[905]).unwrap(), vec![vec![5], vec![0], vec![9]]);
        assert!(discrete_expansion(&decimal(), &[0]).unwrap().is_empty());
        assert_eq!(discrete_expansion(&std4(), &[-1, 1]), Err(Error::NonTerminating(vec![-1, 1])));
        let sys = gauss(2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let v: IntVec = vec![rng.gen_range(-500..500), rng.gen_range(-500..500)];
            let ds = discrete_expansion(&sys, &v).unwrap();
            assert_eq!(evaluate_expansion(sys.matrix(), &ds).unwrap(), v);
            assert!(ds.last().is_none_or(|d| d[0] != 0));
        }
        for x in -300..300 {
            let s = RadixSystem::scalar(-10, &(0..10).collect::<Vec<_>>()).unwrap();
            let ds = discrete_expansion(&s, &[x]).unwrap();
            assert_eq!(evaluate_expansion(s.matrix(), &ds).unwrap(), vec![x]);
        }
    }

    #[test]
    fn companion_systems() {
        for n in 1..=4i64 {
            let sys = companion_system(&[n * n + 1, 2 * n, 1], &(0..=n * n).collect::<Vec<_>>()).unwrap();
            assert_eq!(sys.matrix().det().unwrap(), n * n + 1);
            assert!(is_number_system(&sys).unwrap().0);
        }
        let q = companion_system(&[21, 9, 1], &[0, 10, 20]).unwrap();
        assert_eq!(q.matrix().rows(), vec![vec![0, -21], vec![1, -9]]);
        let ten = companion_system(&[-10, 1], &(0..10).collect::<Vec<_>>()).unwrap();
        assert_eq!(ten.matrix().rows(), vec![vec![10]]);
        assert_eq!(companion_system(&[1, 0, 1], &[0, 1]), Err(Error::NotExpanding));
        assert!(companion_system(&[3, 2], &[0]).is_err());
    }
}
