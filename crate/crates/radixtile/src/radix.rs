//! Eventually periodic `(A, D)`-representations `Σ_{j≥1} A^{-j} x_j`.
//!
//! Representations are `EpSeq<IntVec>` values interpreted against a
//! [`RadixSystem`]. Equality of represented points is decided by exact
//! rational evaluation; the neighbour-sequence walk gives an independent
//! combinatorial check of the same relation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::epseq::{align, EpSeq};
use crate::error::{Error, Result};
use crate::linalg::{rat, v_add, v_sub, IntVec, RatMatrix, RatVec};
use crate::neighbours::{self, fmt_vec, merged_label};
use crate::system::RadixSystem;

pub type Digits = EpSeq<IntVec>;

fn check_digits(sys: &RadixSystem, x: &Digits) -> Result<()> {
    for d in x.pre().iter().chain(x.cycle()) {
        if !sys.has_digit(d) {
            return Err(Error::PreconditionViolated(format!("{d:?} is not a digit of the system")));
        }
    }
    Ok(())
}

/// Exact value of `Σ_{j≥1} A^{-j} x_j`. Entries need not be digits of `sys`.
pub fn eval_exact(sys: &RadixSystem, x: &Digits) -> Result<RatVec> {
    let n = sys.dim();
    if x.pre().iter().chain(x.cycle()).any(|d| d.len() != n) {
        return Err(Error::DimensionMismatch("entry length differs from the system dimension".into()));
    }
    let a = sys.matrix().to_rat();
    let inv = sys.inverse();
    let p = x.period();
    // (A^p − I) w = Σ_{ℓ=1}^{p} A^{p−ℓ} x_{m+ℓ}
    let mut rhs: RatVec = vec![rat(0); n];
    for d in x.cycle() {
        rhs = a.mul_vec(&rhs);
        for (r, di) in rhs.iter_mut().zip(d) {
            *r += rat(*di);
        }
    }
    let lhs = a.pow(p as u64).sub(&RatMatrix::identity(n));
    let mut acc = lhs.solve(&rhs)?;
    for d in x.pre().iter().rev() {
        for (r, di) in acc.iter_mut().zip(d) {
            *r += rat(*di);
        }
        acc = inv.mul_vec(&acc);
    }
    Ok(acc)
}

pub fn equivalent(sys: &RadixSystem, x: &Digits, y: &Digits) -> Result<bool> {
    Ok(eval_exact(sys, x)? == eval_exact(sys, y)?)
}

/// `ζ_0 = 0`, `ζ_j = A ζ_{j−1} + (x_j − y_j)` for `j = 1..=k`.
pub fn integer_sequence(sys: &RadixSystem, x: &Digits, y: &Digits, k: usize) -> Result<Vec<IntVec>> {
    let mut z = vec![0; sys.dim()];
    let mut out = vec![z.clone()];
    for i in 0..k {
        z = v_add(&sys.matrix().mul_vec(&z)?, &v_sub(x.at(i), y.at(i))?)?;
        out.push(z.clone());
    }
    Ok(out)
}

/// Whether the integer sequence of `(x, y)` stays inside the neighbours of
/// `T_{A,D}` together with 0.
pub fn is_neighbour_sequence(sys: &RadixSystem, x: &Digits, y: &Digits) -> Result<bool> {
    let nb = neighbours::system_neighbours(sys)?.with_zero();
    is_neighbour_sequence_with(sys, &nb, x, y)
}

/// As [`is_neighbour_sequence`] with a precomputed `neighbours ∪ {0}`.
pub fn is_neighbour_sequence_with(sys: &RadixSystem, allowed: &HashSet<IntVec>, x: &Digits, y: &Digits) -> Result<bool> {
    check_digits(sys, x)?;
    check_digits(sys, y)?;
    let (m, p) = align(&[x.pre_len(), y.pre_len()], &[x.period(), y.period()]);
    let mut seen: HashSet<(usize, IntVec)> = HashSet::new();
    let mut z = vec![0; sys.dim()];
    let mut j = 0usize;
    loop {
        if j >= m && !seen.insert(((j - m) % p, z.clone())) {
            return Ok(true);
        }
        z = v_add(&sys.matrix().mul_vec(&z)?, &v_sub(x.at(j), y.at(j))?)?;
        if !allowed.contains(&z) {
            return Ok(false);
        }
        j += 1;
    }
}

/// True iff no nonzero element of `D − D` neighbours `T_{A,D}`, which makes
/// every `(A, D)`-representation unique.
pub fn representations_unique(sys: &RadixSystem) -> Result<bool> {
    let nb = neighbours::system_neighbours(sys)?;
    Ok(sys.difference_digits()?.iter().all(|e| !nb.contains(e)))
}

/// Digraph on `neighbours ∪ {0}` with an edge `ζ → Aζ + (x − y)` for every
/// digit pair `(x, y)` landing back in the vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairAutomaton {
    /// Lexicographically sorted states.
    pub states: Vec<IntVec>,
    /// `(from, (x, y), to)` as state indices, sorted.
    pub edges: Vec<(usize, (IntVec, IntVec), usize)>,
    /// Whether each state starts an infinite walk.
    pub live: Vec<bool>,
}

impl PairAutomaton {
    pub fn state_index(&self, z: &[i64]) -> Option<usize> {
        self.states.binary_search_by(|s| s.as_slice().cmp(z)).ok()
    }

    /// Sub-automaton on the states reachable from the zero state.
    pub fn reachable_from_zero(&self) -> PairAutomaton {
        let Some(z) = self.states.first().map(|s| vec![0; s.len()]) else { return self.clone() };
        let Some(start) = self.state_index(&z) else { return self.clone() };
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for (f, _, t) in &self.edges {
            adj.entry(*f).or_default().push(*t);
        }
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for &j in adj.get(&i).into_iter().flatten() {
                if seen.insert(j) {
                    stack.push(j);
                }
            }
        }
        let remap: HashMap<usize, usize> = seen.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        PairAutomaton {
            states: seen.iter().map(|&i| self.states[i].clone()).collect(),
            edges: self
                .edges
                .iter()
                .filter(|(f, _, t)| remap.contains_key(f) && remap.contains_key(t))
                .map(|(f, l, t)| (remap[f], l.clone(), remap[t]))
                .collect(),
            live: seen.iter().map(|&i| self.live[i]).collect(),
        }
    }

    /// DOT text; parallel edges are merged into one labelled `first +k`.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph neighbours {\n");
        for (i, z) in self.states.iter().enumerate() {
            s += &format!("  n{i} [label=\"{}\"];\n", fmt_vec(z));
        }
        let mut grouped: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
        for (f, (x, y), t) in &self.edges {
            grouped.entry((*f, *t)).or_default().push(format!("({},{})", fmt_vec(x), fmt_vec(y)));
        }
        for ((f, t), labels) in grouped {
            s += &format!("  n{f} -> n{t} [label=\"{}\"];\n", merged_label(&labels));
        }
        s + "}\n"
    }
}

pub fn pair_automaton(sys: &RadixSystem) -> Result<PairAutomaton> {
    let nb = neighbours::system_neighbours(sys)?;
    let mut states = nb.vectors.clone();
    states.push(vec![0; sys.dim()]);
    states.sort();
    let index: HashMap<&IntVec, usize> = states.iter().enumerate().map(|(i, z)| (z, i)).collect();
    let mut edges = Vec::new();
    for (i, z) in states.iter().enumerate() {
        let az = sys.matrix().mul_vec(z)?;
        for x in sys.digits() {
            for y in sys.digits() {
                let t = v_add(&az, &v_sub(x, y)?)?;
                if let Some(&j) = index.get(&t) {
                    edges.push((i, (x.clone(), y.clone()), j));
                }
            }
        }
    }
    edges.sort();
    let mut live = vec![true; states.len()];
    loop {
        let mut out = vec![false; states.len()];
        for (f, _, t) in &edges {
            if live[*t] {
                out[*f] = true;
            }
        }
        if out == live {
            break;
        }
        for i in 0..live.len() {
            live[i] &= out[i];
        }
    }
    Ok(PairAutomaton { states, edges, live })
}

/// How many representations share the value of a given one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivClass {
    Unique,
    FinitelyMany(usize),
    InfiniteCountable,
    Uncountable,
}

impl EquivClass {
    pub fn name(&self) -> &'static str {
        match self {
            EquivClass::Unique => "unique",
            EquivClass::FinitelyMany(_) => "finitely-many",
            EquivClass::InfiniteCountable => "infinite-countable",
            EquivClass::Uncountable => "uncountable",
        }
    }
}

/// Product of the position in `x` with the integer-sequence state. Each
/// infinite path from the start spells one representation `y` equivalent
/// to `x`.
struct ProductGraph {
    succ: Vec<Vec<(IntVec, usize)>>,
}

fn product_graph(sys: &RadixSystem, allowed: &HashSet<IntVec>, x: &Digits) -> Result<ProductGraph> {
    let total = x.stored_len();
    let m = x.pre_len();
    let next_pos = |pos: usize| if pos + 1 < total { pos + 1 } else { m };
    let mut nodes: Vec<(usize, IntVec)> = vec![(0, vec![0; sys.dim()])];
    let mut index: HashMap<(usize, IntVec), usize> = HashMap::from([(nodes[0].clone(), 0)]);
    let mut succ: Vec<Vec<(IntVec, usize)>> = vec![Vec::new()];
    let mut i = 0;
    while i < nodes.len() {
        let (pos, z) = nodes[i].clone();
        let az = sys.matrix().mul_vec(&z)?;
        let xd = x.at(pos);
        for y in sys.digits() {
            let z2 = v_add(&az, &v_sub(xd, y)?)?;
            if !allowed.contains(&z2) {
                continue;
            }
            let key = (next_pos(pos), z2);
            let j = match index.get(&key) {
                Some(&j) => j,
                None => {
                    nodes.push(key.clone());
                    succ.push(Vec::new());
                    index.insert(key, nodes.len() - 1);
                    nodes.len() - 1
                }
            };
            succ[i].push((y.clone(), j));
        }
        i += 1;
    }
    // prune nodes without an infinite continuation
    let mut live = vec![true; nodes.len()];
    loop {
        let mut changed = false;
        for k in 0..nodes.len() {
            if live[k] && !succ[k].iter().any(|(_, t)| live[*t]) {
                live[k] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for (k, s) in succ.iter_mut().enumerate() {
        if !live[k] {
            s.clear();
        } else {
            s.retain(|(_, t)| live[*t]);
        }
    }
    Ok(ProductGraph { succ })
}

fn sccs(succ: &[Vec<(IntVec, usize)>]) -> Vec<usize> {
    // Tarjan, iterative
    let n = succ.len();
    let mut idx = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if idx[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        idx[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on[root] = true;
        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            if *ei < succ[v].len() {
                let w = succ[v][*ei].1;
                *ei += 1;
                if idx[w] == usize::MAX {
                    idx[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on[w] = true;
                    call.push((w, 0));
                } else if on[w] {
                    low[v] = low[v].min(idx[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == idx[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

fn classify(g: &ProductGraph) -> EquivClass {
    let comp = sccs(&g.succ);
    let n = g.succ.len();
    let mut size: HashMap<usize, usize> = HashMap::new();
    for &c in &comp {
        *size.entry(c).or_default() += 1;
    }
    let cyclic = |v: usize| size[&comp[v]] > 1 || g.succ[v].iter().any(|(_, t)| *t == v);
    let mut countable = false;
    for v in 0..n {
        if g.succ[v].is_empty() || !cyclic(v) {
            continue;
        }
        let inside = g.succ[v].iter().filter(|(_, t)| comp[*t] == comp[v]).count();
        if inside >= 2 {
            return EquivClass::Uncountable;
        }
        if inside < g.succ[v].len() {
            countable = true;
        }
    }
    if countable {
        EquivClass::InfiniteCountable
    } else {
        EquivClass::FinitelyMany(0)
    }
}

/// Lasso-shaped paths from the start, each giving an eventually periodic
/// representation.
fn lassos(g: &ProductGraph, limit: usize) -> Vec<Digits> {
    let mut out = BTreeSet::new();
    let mut path_nodes = vec![0usize];
    let mut labels: Vec<IntVec> = Vec::new();
    let mut iters = vec![0usize];
    while let Some(&v) = path_nodes.last() {
        if out.len() >= limit {
            break;
        }
        let k = *iters.last().unwrap();
        if k >= g.succ[v].len() {
            path_nodes.pop();
            iters.pop();
            labels.pop();
            continue;
        }
        *iters.last_mut().unwrap() += 1;
        let (y, t) = &g.succ[v][k];
        if let Some(pos) = path_nodes.iter().position(|&u| u == *t) {
            let mut cyc = labels[pos..].to_vec();
            cyc.push(y.clone());
            if let Ok(s) = EpSeq::new(labels[..pos].to_vec(), cyc) {
                out.insert(s);
            }
        } else {
            path_nodes.push(*t);
            iters.push(0);
            labels.push(y.clone());
        }
    }
    out.into_iter().collect()
}

/// Classifies the representations equivalent to `x` and lists up to
/// `sample_limit` eventually periodic ones (always including `x`). For the
/// finite classes the list is exhaustive.
pub fn enumerate_equivalents(sys: &RadixSystem, x: &Digits, sample_limit: usize) -> Result<(EquivClass, Vec<Digits>)> {
    check_digits(sys, x)?;
    let allowed = neighbours::system_neighbours(sys)?.with_zero();
    let g = product_graph(sys, &allowed, x)?;
    let class = classify(&g);
    let limit = match class {
        EquivClass::FinitelyMany(_) => usize::MAX,
        _ => sample_limit.max(1),
    };
    let mut samples = lassos(&g, limit);
    if !samples.contains(x) {
        samples.insert(0, x.clone());
        samples.truncate(limit.max(1));
    }
    let class = match class {
        EquivClass::FinitelyMany(_) if samples.len() == 1 => EquivClass::Unique,
        EquivClass::FinitelyMany(_) => EquivClass::FinitelyMany(samples.len()),
        c => c,
    };
    Ok((class, samples))
}
