//! Multiplicative invariance for subsets of `Z^n` described by digit
//! automata.
//!
//! Integers are written in a number system `(A, D)` as least-significant-first
//! digit strings `d_0 d_1 ... d_{ℓ−1}` with nonzero last symbol (the empty
//! string is 0). `φ` deletes the first symbol and `ψ` the last one. A set
//! `E ⊆ Z^n` is given by a deterministic automaton reading those strings.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::linalg::{op_norm, rv_to_f64, IntVec, RatMatrix, RatVec};
use crate::numsys::{self, CrsIndex};
use crate::system::RadixSystem;

/// A radix system verified to be a number system.
#[derive(Clone, Debug)]
pub struct NumberSystem {
    sys: RadixSystem,
    index: CrsIndex,
}

impl NumberSystem {
    pub fn new(sys: RadixSystem) -> Result<Self> {
        let (ok, _) = numsys::is_number_system(&sys)?;
        if !ok {
            return Err(Error::NotANumberSystem);
        }
        let index = CrsIndex::new(&sys)?;
        Ok(NumberSystem { sys, index })
    }

    pub fn system(&self) -> &RadixSystem {
        &self.sys
    }

    /// Canonical least-significant-first digit string of `v`.
    pub fn expand(&self, v: &[i64]) -> Result<Vec<IntVec>> {
        let mut out = Vec::new();
        let mut x = v.to_vec();
        let zero = vec![0; self.sys.dim()];
        let mut steps = 0usize;
        while x != zero {
            let (next, d) = self.index.step(&x)?;
            out.push(d);
            x = next;
            steps += 1;
            if steps > 100_000 {
                return Err(Error::NonTerminating(v.to_vec()));
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, digits: &[IntVec]) -> Result<IntVec> {
        numsys::evaluate_expansion(self.sys.matrix(), digits)
    }
}

/// Drops the least significant digit.
pub fn phi(ns: &NumberSystem, v: &[i64]) -> Result<IntVec> {
    let d = ns.expand(v)?;
    ns.evaluate(d.get(1..).unwrap_or(&[]))
}

/// Drops the most significant digit.
pub fn psi(ns: &NumberSystem, v: &[i64]) -> Result<IntVec> {
    let d = ns.expand(v)?;
    ns.evaluate(&d[..d.len().saturating_sub(1)])
}

/// Complete deterministic automaton over the digits of a number system,
/// starting in state 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitAutomaton {
    pub digits: Vec<IntVec>,
    /// `transitions[state][i]` is the successor on `digits[i]`.
    pub transitions: Vec<Vec<usize>>,
    pub accepting: Vec<bool>,
}

impl DigitAutomaton {
    pub fn new(digits: Vec<IntVec>, transitions: Vec<Vec<usize>>, accepting: Vec<bool>) -> Result<Self> {
        let s = transitions.len();
        if s == 0 || accepting.len() != s {
            return Err(Error::PreconditionViolated("automaton needs matching transition and accepting tables".into()));
        }
        if transitions.iter().any(|row| row.len() != digits.len() || row.iter().any(|&t| t >= s)) {
            return Err(Error::PreconditionViolated("transition table is not complete".into()));
        }
        Ok(DigitAutomaton { digits, transitions, accepting })
    }

    /// Strings over `allowed ⊆ D`.
    pub fn restriction(digits: &[IntVec], allowed: &[IntVec]) -> Result<Self> {
        let row = digits.iter().map(|d| if allowed.contains(d) { 0 } else { 1 }).collect();
        Self::new(digits.to_vec(), vec![row, vec![1; digits.len()]], vec![true, false])
    }

    pub fn everything(digits: &[IntVec]) -> Result<Self> {
        Self::restriction(digits, digits)
    }

    /// Only the empty string, so `E = {0}`.
    pub fn zero_only(digits: &[IntVec]) -> Result<Self> {
        Self::new(digits.to_vec(), vec![vec![1; digits.len()], vec![1; digits.len()]], vec![true, false])
    }

    /// Every occurrence of `v` is followed by `u`; positions past the end
    /// read as the zero digit.
    pub fn followed_by(digits: &[IntVec], v: &[i64], u: &[i64]) -> Result<Self> {
        let iv = digits.iter().position(|d| d == v).ok_or_else(|| Error::PreconditionViolated("v is not a digit".into()))?;
        let iu = digits.iter().position(|d| d == u).ok_or_else(|| Error::PreconditionViolated("u is not a digit".into()))?;
        let u_is_zero = u.iter().all(|&x| x == 0);
        // 0: free, 1: just read v, 2: dead
        let step = |state: usize, i: usize| match state {
            1 if i != iu => 2,
            2 => 2,
            _ if i == iv => 1,
            _ => 0,
        };
        let transitions = (0..3).map(|s| (0..digits.len()).map(|i| step(s, i)).collect()).collect();
        Self::new(digits.to_vec(), transitions, vec![true, u_is_zero, false])
    }

    /// Strings whose most significant digit is `a`.
    pub fn ending_with(digits: &[IntVec], a: &[i64]) -> Result<Self> {
        let ia = digits.iter().position(|d| d == a).ok_or_else(|| Error::PreconditionViolated("not a digit".into()))?;
        let row = (0..digits.len()).map(|i| usize::from(i == ia)).collect::<Vec<_>>();
        Self::new(digits.to_vec(), vec![row.clone(), row], vec![false, true])
    }

    fn zero_index(&self) -> Result<usize> {
        self.digits.iter().position(|d| d.iter().all(|&x| x == 0)).ok_or(Error::ZeroNotInDigits)
    }

    /// States from which some accepting state is reachable.
    fn live_states(&self) -> Vec<bool> {
        let mut live = self.accepting.clone();
        loop {
            let mut changed = false;
            for s in 0..live.len() {
                if !live[s] && self.transitions[s].iter().any(|&t| live[t]) {
                    live[s] = true;
                    changed = true;
                }
            }
            if !changed {
                return live;
            }
        }
    }

    fn run(&self, from: usize, word: &[usize]) -> usize {
        word.iter().fold(from, |s, &i| self.transitions[s][i])
    }

    pub fn accepts(&self, word: &[IntVec]) -> Result<bool> {
        let idx = word
            .iter()
            .map(|d| self.digits.iter().position(|x| x == d).ok_or_else(|| Error::PreconditionViolated(format!("{d:?} is not a digit"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.accepting[self.run(0, &idx)])
    }

    /// Membership of an integer vector in `E`.
    pub fn contains(&self, ns: &NumberSystem, v: &[i64]) -> Result<bool> {
        self.accepts(&ns.expand(v)?)
    }
}

/// Decides `φ(E) ⊆ E` and `ψ(E) ⊆ E`.
pub fn check_invariance(e: &DigitAutomaton) -> Result<(bool, bool)> {
    let zero = e.zero_index()?;
    let k = e.digits.len();
    let acc = |s: usize| e.accepting[s];

    // φ: a·u accepted and canonical must imply u accepted. Track the set of
    // states reached from δ(0, a) over all a, alongside δ(0, u).
    let mut phi_ok = (0..k).filter(|&a| a != zero).all(|a| !acc(e.transitions[0][a]) || acc(0));
    let starts: BTreeSet<usize> = (0..k).map(|a| e.transitions[0][a]).collect();
    let mut seen: HashSet<(BTreeSet<usize>, usize, bool)> = HashSet::new();
    let mut queue = VecDeque::new();
    for i in 0..k {
        let s: BTreeSet<usize> = starts.iter().map(|&q| e.transitions[q][i]).collect();
        let item = (s, e.transitions[0][i], i != zero);
        if seen.insert(item.clone()) {
            queue.push_back(item);
        }
    }
    while let Some((set, q, canonical)) = queue.pop_front() {
        if canonical && set.iter().any(|&s| acc(s)) && !acc(q) {
            phi_ok = false;
            break;
        }
        for i in 0..k {
            let s: BTreeSet<usize> = set.iter().map(|&x| e.transitions[x][i]).collect();
            let item = (s, e.transitions[q][i], i != zero);
            if seen.insert(item.clone()) {
                queue.push_back(item);
            }
        }
    }

    // ψ: v·0^j·a accepted (v canonical, a ≠ 0) must imply v accepted.
    let zero_closure = |q: usize| {
        let mut set = BTreeSet::from([q]);
        let mut cur = q;
        loop {
            cur = e.transitions[cur][zero];
            if !set.insert(cur) {
                break set;
            }
        }
    };
    let reaches_accept_after_nonzero = |q: usize| zero_closure(q).into_iter().any(|s| (0..k).any(|a| a != zero && acc(e.transitions[s][a])));
    let mut psi_ok = true;
    let mut seen: HashSet<(usize, bool)> = HashSet::from([(0, true)]);
    let mut queue = VecDeque::from([(0usize, true)]);
    while let Some((q, canonical)) = queue.pop_front() {
        if canonical && !acc(q) && reaches_accept_after_nonzero(q) {
            psi_ok = false;
            break;
        }
        for i in 0..k {
            let item = (e.transitions[q][i], i != zero);
            if seen.insert(item) {
                queue.push_back(item);
            }
        }
    }
    Ok((phi_ok, psi_ok))
}

pub const DEFAULT_CLOUD_CAP: usize = 1 << 20;

/// `A^{-k}·v` for the members `v ∈ E` whose expansion has at most `k` digits.
pub fn xk_cloud(ns: &NumberSystem, e: &DigitAutomaton, k: usize, cap: usize) -> Result<Vec<RatVec>> {
    let ints = xk_integers(ns, e, k, cap)?;
    let inv_k = ns.sys.inverse().pow(k as u64);
    Ok(ints.iter().map(|v| inv_k.mul_int_vec(v)).collect())
}

fn xk_integers(ns: &NumberSystem, e: &DigitAutomaton, k: usize, cap: usize) -> Result<Vec<IntVec>> {
    check_alphabet(ns, e)?;
    let zero = e.zero_index()?;
    let a = ns.sys.matrix();
    let live = e.live_states();
    let mut out = BTreeSet::new();
    // (state, value, A^len, last symbol nonzero or empty)
    let mut frontier = vec![(0usize, vec![0; ns.sys.dim()], crate::linalg::IntMatrix::identity(ns.sys.dim()), true)];
    for len in 0..=k {
        let mut next = Vec::new();
        for (q, v, pw, canonical) in frontier {
            if canonical && e.accepting[q] {
                out.insert(v.clone());
                if out.len() > cap {
                    return Err(Error::CloudTooLarge(cap));
                }
            }
            if len == k {
                continue;
            }
            let pw2 = pw.mul(a)?;
            for (i, d) in e.digits.iter().enumerate() {
                if !live[e.transitions[q][i]] {
                    continue;
                }
                let nv = crate::linalg::v_add(&v, &pw.mul_vec(d)?)?;
                next.push((e.transitions[q][i], nv, pw2.clone(), i != zero));
            }
            if next.len() > cap.saturating_mul(e.digits.len()) {
                return Err(Error::CloudTooLarge(cap));
            }
        }
        frontier = next;
    }
    Ok(out.into_iter().collect())
}

fn check_alphabet(ns: &NumberSystem, e: &DigitAutomaton) -> Result<()> {
    let mut a = e.digits.clone();
    a.sort();
    if a != ns.sys.digits() {
        return Err(Error::PreconditionViolated("automaton alphabet differs from the digit set".into()));
    }
    Ok(())
}

pub fn hausdorff_distance(p: &[Vec<f64>], q: &[Vec<f64>]) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptySet);
    }
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let directed = |x: &[Vec<f64>], y: &[Vec<f64>]| x.iter().map(|a| y.iter().map(|b| dist(a, b)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    Ok(directed(p, q).max(directed(q, p)))
}

/// A point of `R^n / Z^n`, stored with coordinates in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusPoint(RatVec);

impl TorusPoint {
    pub fn new(v: &[BigRational]) -> Self {
        TorusPoint(v.iter().map(|x| x - x.floor()).collect())
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }
}

pub fn torus_distance(x: &TorusPoint, y: &TorusPoint) -> f64 {
    torus_distance_f64(&rv_to_f64(&x.0), &rv_to_f64(&y.0))
}

/// Torus metric on representatives in `[0, 1)^n`.
pub fn torus_distance_f64(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut best = f64::INFINITY;
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let mut s = 0.0;
        for i in 0..n {
            let z = (c % 3) as f64 - 1.0;
            c /= 3;
            let t = x[i] - y[i] + z;
            s += t * t;
        }
        best = best.min(s.sqrt());
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub k: usize,
    pub distance: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub constant: f64,
    pub rho: f64,
    /// Set when `E` is not φ-closed and the bound need not apply.
    pub warning: Option<String>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,distance,bound\n");
        for r in &self.rows {
            s += &format!("{},{:.12e},{:.12e}\n", r.k, r.distance, r.bound);
        }
        s
    }

    pub fn within_bounds(&self) -> bool {
        self.rows.iter().all(|r| r.distance <= r.bound)
    }
}

/// `K` with `‖A^{-j}‖ ≤ K ρ^{-j}` for all `j ≥ 0`.
fn power_constant(inv: &RatMatrix, rho: f64) -> f64 {
    let n = inv.dim();
    let m = inv.to_f64();
    let mut pw: Vec<f64> = (0..n * n).map(|i| if i % (n + 1) == 0 { 1.0 } else { 0.0 }).collect();
    let mut best: f64 = 1.0;
    let mut scale = 1.0;
    for _ in 0..10_000 {
        pw = (0..n * n).map(|ij| (0..n).map(|l| pw[(ij / n) * n + l] * m[l * n + ij % n]).sum()).collect();
        scale *= rho;
        let v = op_norm(&pw, n) * scale;
        best = best.max(v);
        if v < 1e-3 * best {
            break;
        }
    }
    best * (1.0 + 1e-9)
}

/// `d_H(X_k, X_{k+1})` for `k = 1..kmax` with the bound `C ρ^{-k} / (ρ − 1)`.
pub fn convergence_report(ns: &NumberSystem, e: &DigitAutomaton, kmax: usize, cap: usize) -> Result<ConvergenceReport> {
    let (phi_closed, _) = check_invariance(e)?;
    // Similarities contract at exactly |det|^{1/n}; otherwise use the spectral bound.
    let rho = match ns.sys.matrix().similarity_square() {
        Some(r2) => (r2 as f64).sqrt(),
        None => ns.sys.spectral().rho,
    };
    let constant = ns.sys.max_digit_norm() * power_constant(ns.sys.inverse(), rho);
    let cloud = |k: usize| -> Result<Vec<Vec<f64>>> { Ok(xk_cloud(ns, e, k, cap)?.iter().map(|v| rv_to_f64(v)).collect()) };
    let mut rows = Vec::new();
    let mut prev = cloud(1)?;
    for k in 1..=kmax {
        let next = cloud(k + 1)?;
        rows.push(ConvergenceRow { k, distance: hausdorff_distance(&prev, &next)?, bound: constant * rho.powi(-(k as i32)) / (rho - 1.0) });
        prev = next;
    }
    let warning = (!phi_closed).then(|| "E is not closed under phi; the bound column is not guaranteed".to_string());
    Ok(ConvergenceReport { rows, constant, rho, warning })
}

/// Checks that `A x mod Z^n` lies in `X_{k−1} mod Z^n` for every `x ∈ X_k`.
/// Returns the first failing `x` when there is one.
pub fn torus_invariance_check(ns: &NumberSystem, e: &DigitAutomaton, k: usize, cap: usize) -> Result<(bool, Option<RatVec>)> {
    if k == 0 {
        return Err(Error::PreconditionViolated("k must be at least 1".into()));
    }
    let a = ns.sys.matrix().to_rat();
    let prev: HashSet<TorusPoint> = xk_cloud(ns, e, k - 1, cap)?.iter().map(|v| TorusPoint::new(v)).collect();
    for x in xk_cloud(ns, e, k, cap)? {
        if !prev.contains(&TorusPoint::new(&a.mul_vec(&x))) {
            return Ok((false, Some(x)));
        }
    }
    Ok((true, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, rat_frac, IntMatrix};

    fn decimal() -> NumberSystem {
        NumberSystem::new(RadixSystem::scalar(-10, &(0..10).collect::<Vec<_>>()).unwrap()).unwrap()
    }

    fn twindragon() -> NumberSystem {
        NumberSystem::new(RadixSystem::new(IntMatrix::from_rows(&[vec![-1, -1], vec![1, -1]]).unwrap(), vec![vec![0, 0], vec![1, 0]]).unwrap()).unwrap()
    }

    #[test]
    fn phi_and_psi() {
        let ns = decimal();
        // 905 in base −10 is 1,0,1,5 most significant first
        let d = ns.expand(&[905]).unwrap();
        assert_eq!(ns.evaluate(&d).unwrap(), vec![905]);
        assert_eq!(phi(&ns, &[905]).unwrap(), ns.evaluate(&d[1..]).unwrap());
        assert_eq!(psi(&ns, &[0]).unwrap(), vec![0]);
        assert_eq!(phi(&ns, &[0]).unwrap(), vec![0]);
        let t = twindragon();
        for v in [[3, -7], [0, 1], [-5, -5], [12, 4]] {
            let d = t.expand(&v).unwrap();
            assert_eq!(t.evaluate(&d).unwrap(), v.to_vec());
            let w = phi(&t, &v).unwrap();
            // v = d_0 + A·φ(v)
            let back = crate::linalg::v_add(&d[0], &t.system().matrix().mul_vec(&w).unwrap()).unwrap();
            assert_eq!(back, v.to_vec());
        }
    }

    #[test]
    fn rejects_non_number_systems() {
        let s = RadixSystem::scalar(10, &(0..10).collect::<Vec<_>>()).unwrap();
        assert_eq!(NumberSystem::new(s).unwrap_err(), Error::NotANumberSystem);
    }

    #[test]
    fn invariance_flags() {
        let t = twindragon();
        let d = t.system().digits().to_vec();
        assert_eq!(check_invariance(&DigitAutomaton::everything(&d).unwrap()).unwrap(), (true, true));
        let golden = DigitAutomaton::followed_by(&d, &[1, 0], &[0, 0]).unwrap();
        assert_eq!(check_invariance(&golden).unwrap(), (true, true));
        assert!(!golden.accepts(&[vec![1, 0], vec![1, 0]]).unwrap());
        assert!(golden.accepts(&[vec![1, 0], vec![0, 0], vec![1, 0]]).unwrap());
        let ten = decimal();
        let dd = ten.system().digits().to_vec();
        let ends = DigitAutomaton::ending_with(&dd, &[7]).unwrap();
        assert!(!check_invariance(&ends).unwrap().1);
        let zero = DigitAutomaton::zero_only(&dd).unwrap();
        assert_eq!(check_invariance(&zero).unwrap(), (true, true));
        // ψ holds but φ fails: strings starting with 3
        let mut tr = vec![vec![2; 10], vec![1; 10], vec![2; 10]];
        tr[0][3] = 1;
        let starts3 = DigitAutomaton::new(dd.clone(), tr, vec![false, true, false]).unwrap();
        assert!(!check_invariance(&starts3).unwrap().0);
    }

    #[test]
    fn cantor_clouds() {
        let ns = NumberSystem::new(RadixSystem::scalar(-3, &[0, 1, 2]).unwrap()).unwrap();
        let d = ns.system().digits().to_vec();
        let e = DigitAutomaton::restriction(&d, &[vec![0], vec![2]]).unwrap();
        let x2 = xk_cloud(&ns, &e, 2, 100).unwrap();
        assert_eq!(x2.len(), 4);
        let mut want = vec![rat(0), rat_frac(2, 9), rat_frac(-6, 9), rat_frac(-4, 9)];
        want.sort();
        let mut got: Vec<_> = x2.into_iter().map(|v| v[0].clone()).collect();
        got.sort();
        assert_eq!(got, want);
        let rep = convergence_report(&ns, &e, 6, 1 << 16).unwrap();
        assert!(rep.within_bounds(), "{}", rep.to_csv());
        for w in rep.rows.windows(2) {
            assert!((w[1].distance / w[0].distance - 1.0 / 3.0).abs() < 1e-9);
        }
        assert!(rep.to_csv().starts_with("k,distance,bound\n1,"));
        let z = DigitAutomaton::zero_only(&d).unwrap();
        assert_eq!(xk_cloud(&ns, &z, 4, 10).unwrap(), vec![vec![rat(0)]]);
        assert!(convergence_report(&ns, &z, 3, 10).unwrap().rows.iter().all(|r| r.distance == 0.0));
        assert_eq!(xk_cloud(&ns, &DigitAutomaton::everything(&d).unwrap(), 8, 100), Err(Error::CloudTooLarge(100)));
    }

    #[test]
    fn torus_checks() {
        let a = TorusPoint::new(&[rat_frac(9, 10)]);
        let b = TorusPoint::new(&[rat_frac(21, 20)]);
        assert!((torus_distance(&a, &b) - 0.15).abs() < 1e-12);
        assert_eq!(torus_distance(&a, &a), 0.0);
        let t = twindragon();
        let d = t.system().digits().to_vec();
        for e in [DigitAutomaton::everything(&d).unwrap(), DigitAutomaton::zero_only(&d).unwrap(), DigitAutomaton::followed_by(&d, &[1, 0], &[0, 0]).unwrap()] {
            for k in 1..=6 {
                assert!(torus_invariance_check(&t, &e, k, 1 << 16).unwrap().0);
            }
        }
        let ns = decimal();
        let ends = DigitAutomaton::ending_with(ns.system().digits(), &[7]).unwrap();
        let (ok, wit) = torus_invariance_check(&ns, &ends, 2, 1 << 16).unwrap();
        assert!(!ok && wit.is_some());
    }

    #[test]
    fn hausdorff_basics() {
        let p = vec![vec![0.0]];
        assert_eq!(hausdorff_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&p, &[vec![0.0], vec![0.5]]).unwrap(), 0.5);
        assert_eq!(hausdorff_distance(&p, &[]), Err(Error::EmptySet));
    }
}
