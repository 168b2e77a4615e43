//! Integer neighbours of digit tiles and the graphs built on them.
//!
//! A nonzero lattice vector `v` is a neighbour of `T = T_{A,D}` when
//! `T ∩ (T + v) ≠ ∅`, equivalently when `v` is an integer point of
//! `T_{A, D−D}`. Such points are exactly the lattice points admitting an
//! infinite walk `z → A z − e` (`e ∈ D − D`) that stays bounded, which is what
//! [`integer_neighbours`] computes.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::epseq::EpSeq;
use crate::error::{Error, Result};
use crate::linalg::{self, norm, v_add, v_sub, IntMatrix, IntVec};
use crate::radix::{self, PairAutomaton};
use crate::system::RadixSystem;

pub const DEFAULT_CANDIDATE_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct NeighbourSet {
    /// Nonzero neighbours in lexicographic order.
    pub vectors: Vec<IntVec>,
    /// Radius of the candidate ball that was searched (0 for closed-form sets).
    pub ball_radius: f64,
    pub dim: usize,
}

impl NeighbourSet {
    pub fn contains(&self, v: &[i64]) -> bool {
        self.vectors.binary_search_by(|x| x.as_slice().cmp(v)).is_ok()
    }

    /// Neighbours together with the zero vector.
    pub fn with_zero(&self) -> HashSet<IntVec> {
        let mut s: HashSet<IntVec> = self.vectors.iter().cloned().collect();
        s.insert(vec![0; self.dim]);
        s
    }

    /// First coordinates of the neighbours lying on the first axis (the real
    /// neighbours when `Z^2` is read as `Z[i]`).
    pub fn reals(&self) -> Vec<i64> {
        let mut r: Vec<i64> = self.vectors.iter().filter(|v| v[1..].iter().all(|&x| x == 0)).map(|v| v[0]).collect();
        r.sort();
        r
    }

    fn from_vectors(mut vectors: Vec<IntVec>, ball_radius: f64, dim: usize) -> Self {
        vectors.sort();
        vectors.dedup();
        NeighbourSet { vectors, ball_radius, dim }
    }
}

fn differences(digits: &[IntVec]) -> Result<Vec<IntVec>> {
    let mut s = BTreeSet::new();
    for x in digits {
        for y in digits {
            s.insert(v_sub(x, y)?);
        }
    }
    Ok(s.into_iter().collect())
}

/// Nonzero integer points of `T_{A, D−D}`.
pub fn integer_neighbours(a: &IntMatrix, digits: &[IntVec]) -> Result<NeighbourSet> {
    integer_neighbours_capped(a, digits, DEFAULT_CANDIDATE_CAP)
}

pub fn integer_neighbours_capped(a: &IntMatrix, digits: &[IntVec], cap: u128) -> Result<NeighbourSet> {
    let info = linalg::require_expanding(a)?;
    let diffs = differences(digits)?;
    let radius = diffs.iter().map(|e| norm(e)).fold(0.0, f64::max) * info.ball_radius_factor;
    let zero = vec![0; a.dim()];
    let cands = linalg::lattice_points_in_ball(a.dim(), radius, cap)?;
    let index: HashMap<&IntVec, usize> = cands.iter().enumerate().map(|(i, z)| (z, i)).collect();
    let mut out_deg = vec![0usize; cands.len()];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); cands.len()];
    for (i, z) in cands.iter().enumerate() {
        let az = a.mul_vec(z)?;
        for e in &diffs {
            if let Some(&j) = index.get(&v_sub(&az, e)?) {
                out_deg[i] += 1;
                preds[j].push(i);
            }
        }
    }
    let mut alive = vec![true; cands.len()];
    let mut queue: VecDeque<usize> = (0..cands.len()).filter(|&i| out_deg[i] == 0).collect();
    while let Some(i) = queue.pop_front() {
        if !alive[i] {
            continue;
        }
        alive[i] = false;
        for &p in &preds[i] {
            out_deg[p] -= 1;
            if out_deg[p] == 0 && alive[p] {
                queue.push_back(p);
            }
        }
    }
    let vectors = cands.iter().zip(&alive).filter(|(z, &ok)| ok && **z != zero).map(|(z, _)| z.clone()).collect();
    Ok(NeighbourSet::from_vectors(vectors, radius, a.dim()))
}

pub fn system_neighbours(sys: &RadixSystem) -> Result<NeighbourSet> {
    integer_neighbours(sys.matrix(), sys.digits())
}

/// Neighbour graph anchored at 0: the pair automaton restricted to states
/// reachable from the zero state.
pub fn neighbour_graph(sys: &RadixSystem) -> Result<PairAutomaton> {
    Ok(radix::pair_automaton(sys)?.reachable_from_zero())
}

/// Closed-form neighbour sets of `(−n+i, {0, ..., n²})`.
pub fn expected_gauss_neighbours(n: i64) -> Result<NeighbourSet> {
    if n < 2 {
        return Err(Error::PreconditionViolated("closed form needs n ≥ 2".into()));
    }
    let base: Vec<IntVec> = if n == 2 {
        vec![vec![1, 0], vec![1, 1], vec![2, 1], vec![0, 1], vec![2, 2]]
    } else {
        vec![vec![1, 0], vec![n - 1, 1], vec![n, 1]]
    };
    let all = base.iter().flat_map(|v| [v.clone(), linalg::v_neg(v)]).collect();
    Ok(NeighbourSet::from_vectors(all, 0.0, 2))
}

/// Closed-form real neighbours of `(−n+i, {0, ±1, ..., ±n²})`.
pub fn expected_symmetric_real_neighbours(n: i64) -> Vec<i64> {
    if (2..=4).contains(&n) {
        vec![-3, -2, -1, 1, 2, 3]
    } else {
        vec![-2, -1, 1, 2]
    }
}

/// Closed-form real neighbours of `(−n+i, {0, 1, ..., n²})`.
pub fn expected_consecutive_real_neighbours(_n: i64) -> Vec<i64> {
    vec![-1, 1]
}

/// `|Re s − n·Im s| < 2` (or `< 3/2` once `n ≥ 5`), necessary for a Gaussian
/// integer `s` to neighbour `T_{−n+i, {0..n²}}`.
pub fn gauss_bound_filter(n: i64, s: &[i64]) -> Result<bool> {
    if n < 3 || s.len() != 2 {
        return Err(Error::PreconditionViolated("need n ≥ 3 and s in Z^2".into()));
    }
    let lhs = (s[0] as f64 - n as f64 * s[1] as f64).abs();
    Ok(if n >= 5 { lhs < 1.5 } else { lhs < 2.0 })
}

/// `|Re s − A/√(4B−A²)·Im s| < 5` for `s = a + bρ`, `ρ` the root of
/// `x² + Ax + B` in the upper half plane.
pub fn quad_bound_filter(acoef: i64, bcoef: i64, s: &[i64]) -> Result<bool> {
    if acoef < 1 || bcoef < 2 || acoef * acoef >= 4 * bcoef || s.len() != 2 {
        return Err(Error::PreconditionViolated("need 1 ≤ A, 2 ≤ B, A² < 4B and s = (a, b)".into()));
    }
    let disc = ((4 * bcoef - acoef * acoef) as f64).sqrt();
    let re = s[0] as f64 - s[1] as f64 * acoef as f64 / 2.0;
    let im = s[1] as f64 * disc / 2.0;
    Ok((re - acoef as f64 / disc * im).abs() < 5.0)
}

/// A state `(ζ, ξ)` tracks three representations `p, q, r` of one point:
/// `ζ` is the neighbour sequence of `(p, q)`, `ξ` that of `(q, r)`.
pub type TripleState = (IntVec, IntVec);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleEdge {
    pub from: usize,
    pub to: usize,
    pub digits: [IntVec; 3],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleStateGraph {
    pub states: Vec<TripleState>,
    pub edges: Vec<TripleEdge>,
    pub start: usize,
}

impl TripleStateGraph {
    pub fn index_of(&self, s: &TripleState) -> Option<usize> {
        self.states.iter().position(|x| x == s)
    }

    /// Follows `k` digits of `p, q, r` from the start state. Returns the
    /// visited state indices (`k + 1` of them) when every step is an edge.
    pub fn walk(&self, p: &EpSeq<IntVec>, q: &EpSeq<IntVec>, r: &EpSeq<IntVec>, k: usize) -> Option<Vec<usize>> {
        let mut at = self.start;
        let mut path = vec![at];
        for i in 0..k {
            let label = [p.at(i).clone(), q.at(i).clone(), r.at(i).clone()];
            let e = self.edges.iter().find(|e| e.from == at && e.digits == label)?;
            at = e.to;
            path.push(at);
        }
        Some(path)
    }

    pub fn to_dot(&self) -> String {
        let mut order: Vec<usize> = (0..self.states.len()).collect();
        order.sort_by(|&i, &j| self.states[i].cmp(&self.states[j]));
        let rank: HashMap<usize, usize> = order.iter().enumerate().map(|(r, &i)| (i, r)).collect();
        let mut s = String::from("digraph triples {\n");
        for (r, &i) in order.iter().enumerate() {
            let (z, x) = &self.states[i];
            let w = linalg::v_neg(&v_add(z, x).unwrap_or_default());
            s += &format!("  s{r} [label=\"{}|{}|{}\"];\n", fmt_vec(z), fmt_vec(x), fmt_vec(&w));
        }
        let mut grouped: std::collections::BTreeMap<(usize, usize), Vec<String>> = Default::default();
        for e in &self.edges {
            grouped.entry((rank[&e.from], rank[&e.to])).or_default().push(format!(
                "({},{},{})",
                fmt_vec(&e.digits[0]),
                fmt_vec(&e.digits[1]),
                fmt_vec(&e.digits[2])
            ));
        }
        for ((f, t), labels) in grouped {
            s += &format!("  s{f} -> s{t} [label=\"{}\"];\n", merged_label(&labels));
        }
        s + "}\n"
    }
}

pub(crate) fn fmt_vec(v: &[i64]) -> String {
    if v.len() == 1 {
        v[0].to_string()
    } else {
        format!("[{}]", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
    }
}

pub(crate) fn merged_label(labels: &[String]) -> String {
    let mut l = labels.to_vec();
    l.sort();
    if l.len() == 1 {
        l[0].clone()
    } else {
        format!("{} +{}", l[0], l.len() - 1)
    }
}

pub fn triple_state_graph(sys: &RadixSystem) -> Result<TripleStateGraph> {
    let nb = system_neighbours(sys)?;
    let allowed = nb.with_zero();
    let a = sys.matrix();
    let d = sys.digits();
    let zero = vec![0; sys.dim()];
    let ok = |z: &IntVec, x: &IntVec| -> Result<bool> {
        Ok(allowed.contains(z) && allowed.contains(x) && allowed.contains(&linalg::v_neg(&v_add(z, x)?)))
    };
    let start_state: TripleState = (zero.clone(), zero.clone());
    let mut states = vec![start_state.clone()];
    let mut index: HashMap<TripleState, usize> = HashMap::from([(start_state, 0)]);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (z, x) = states[i].clone();
        let az = a.mul_vec(&z)?;
        let ax = a.mul_vec(&x)?;
        for p in d {
            for q in d {
                let z2 = v_add(&az, &v_sub(p, q)?)?;
                if !allowed.contains(&z2) {
                    continue;
                }
                for r in d {
                    let x2 = v_add(&ax, &v_sub(q, r)?)?;
                    if !ok(&z2, &x2)? {
                        continue;
                    }
                    let key = (z2.clone(), x2);
                    let j = match index.get(&key) {
                        Some(&j) => j,
                        None => {
                            let j = states.len();
                            states.push(key.clone());
                            index.insert(key, j);
                            queue.push_back(j);
                            j
                        }
                    };
                    edges.push(TripleEdge { from: i, to: j, digits: [p.clone(), q.clone(), r.clone()] });
                }
            }
        }
    }
    // keep states that start an infinite path
    let mut live = vec![true; states.len()];
    loop {
        let mut has_out = vec![false; states.len()];
        for e in &edges {
            if live[e.to] {
                has_out[e.from] = true;
            }
        }
        let mut changed = false;
        for i in 0..states.len() {
            if live[i] && !has_out[i] {
                live[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut remap = vec![usize::MAX; states.len()];
    let mut kept = Vec::new();
    for (i, s) in states.into_iter().enumerate() {
        if live[i] {
            remap[i] = kept.len();
            kept.push(s);
        }
    }
    let edges = edges
        .into_iter()
        .filter(|e| live[e.from] && live[e.to])
        .map(|e| TripleEdge { from: remap[e.from], to: remap[e.to], digits: e.digits })
        .collect();
    Ok(TripleStateGraph { states: kept, edges, start: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(n: i64) -> RadixSystem {
        RadixSystem::gaussian(-n, 1, &(0..=n * n).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn decimal_neighbours() {
        let s = RadixSystem::scalar(10, &(0..10).collect::<Vec<_>>()).unwrap();
        assert_eq!(system_neighbours(&s).unwrap().vectors, vec![vec![-1], vec![1]]);
    }

    #[test]
    fn gaussian_neighbours_match_closed_form() {
        for n in 2..=4 {
            let got = system_neighbours(&gauss(n)).unwrap();
            assert_eq!(got.vectors, expected_gauss_neighbours(n).unwrap().vectors, "n = {n}");
            assert!(got.vectors.iter().all(|v| got.contains(&linalg::v_neg(v))));
            if n >= 3 {
                assert!(got.vectors.iter().all(|v| gauss_bound_filter(n, v).unwrap()));
            }
        }
    }

    #[test]
    fn consecutive_digits_have_no_neighbours_in_difference_set() {
        let s = RadixSystem::gaussian(-3, 1, &[0, 1, 2, 3, 4]).unwrap();
        let nb = system_neighbours(&s).unwrap();
        let dd = s.difference_digits().unwrap();
        assert!(nb.vectors.iter().all(|v| !dd.contains(v)));
        let g = neighbour_graph(&s).unwrap();
        assert_eq!(g.states, vec![vec![0, 0]]);
    }

    #[test]
    fn filters() {
        assert!(gauss_bound_filter(3, &[3, 1]).unwrap());
        assert!(!gauss_bound_filter(3, &[2, 0]).unwrap());
        assert!(!gauss_bound_filter(5, &[2, 0]).unwrap());
        assert!(gauss_bound_filter(2, &[1, 0]).is_err());
        assert!(quad_bound_filter(6, 10, &[4, 0]).unwrap());
        assert!(!quad_bound_filter(6, 10, &[5, 0]).unwrap());
        assert!(quad_bound_filter(9, 21, &[10, 1]).unwrap());
        assert!(quad_bound_filter(4, 4, &[0, 0]).is_err());
    }

    #[test]
    fn quadratic_neighbours_pass_filter() {
        let s = crate::numsys::companion_system(&[21, 9, 1], &(0..21).collect::<Vec<_>>()).unwrap();
        let nb = system_neighbours(&s).unwrap();
        assert!(!nb.vectors.is_empty());
        assert!(nb.vectors.iter().all(|v| quad_bound_filter(9, 21, v).unwrap()));
    }

    #[test]
    fn cap_is_enforced() {
        let s = gauss(3);
        assert!(matches!(
            integer_neighbours_capped(s.matrix(), s.digits(), 10),
            Err(Error::CandidateBallTooLarge { .. })
        ));
        let shear = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(integer_neighbours(&shear, &[vec![0, 0]]), Err(Error::NotExpanding));
    }

    #[test]
    fn triple_graph_basics() {
        let s = RadixSystem::scalar(10, &(0..10).collect::<Vec<_>>()).unwrap();
        let g = triple_state_graph(&s).unwrap();
        assert_eq!(g.states[g.start], (vec![0], vec![0]));
        for a in 0..10 {
            assert!(g.edges.iter().any(|e| e.from == g.start && e.to == g.start && e.digits == [vec![a], vec![a], vec![a]]));
        }
        // every retained state has an outgoing edge
        for i in 0..g.states.len() {
            assert!(g.edges.iter().any(|e| e.from == i));
        }
        // base 10 admits at most two distinct representations, so every
        // state has a zero component
        assert!(g.states.iter().all(|(z, x)| z[0] == 0 || x[0] == 0 || z[0] + x[0] == 0));
    }
}
