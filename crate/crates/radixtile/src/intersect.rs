//! Intersections `T ∩ (T + α)` of a digit tile with its translates.
//!
//! When `α = Σ A^{-j} α_j` has a unique `(A, D−D)`-representation, the
//! intersection is the image of `Π_j D ∩ (D + α_j)` under the coding map.
//! Everything here works from that digit-set sequence: SEP witnesses turn it
//! into an IFS, and its cycle gives the box dimension in closed form.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_rational::BigRational;

use crate::epseq::{align, EpSeq};
use crate::error::{Error, Result};
use crate::linalg::{rat, rv_add, rv_sub, v_add, v_sub, IntVec, RatMatrix, RatVec};
use crate::logratio::LogRatio;
use crate::neighbours;
use crate::radix::{self, Digits, EquivClass};
use crate::sep::{is_sep_int, make_set, DigitSet, SepIntWitness, SepSetWitness};
use crate::system::RadixSystem;

/// A translation vector given by an `(A, D−D)`-representation.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslateSpec {
    pub system: RadixSystem,
    pub alpha: Digits,
    /// Whether uniqueness of the representation was verified.
    pub uniqueness_checked: bool,
}

fn check_differences(sys: &RadixSystem, alpha: &Digits) -> Result<()> {
    let diffs = sys.difference_digits()?;
    for a in alpha.pre().iter().chain(alpha.cycle()) {
        if diffs.binary_search(a).is_err() {
            return Err(Error::PreconditionViolated(format!("{a:?} is not in D - D")));
        }
    }
    Ok(())
}

impl TranslateSpec {
    /// Strict constructor: fails unless `α`'s representation is unique.
    pub fn new(system: RadixSystem, alpha: Digits) -> Result<Self> {
        check_differences(&system, &alpha)?;
        let diff = system.difference_system()?;
        let unique = radix::representations_unique(&diff)?
            || radix::enumerate_equivalents(&diff, &alpha, 2)?.0 == EquivClass::Unique;
        if !unique {
            return Err(Error::UniquenessNotEstablished);
        }
        Ok(TranslateSpec { system, alpha, uniqueness_checked: true })
    }

    /// Skips the uniqueness check. The intersection sequence then describes
    /// only the component belonging to this representation.
    pub fn waived(system: RadixSystem, alpha: Digits) -> Result<Self> {
        check_differences(&system, &alpha)?;
        Ok(TranslateSpec { system, alpha, uniqueness_checked: false })
    }

    pub fn value(&self) -> Result<RatVec> {
        radix::eval_exact(&self.system, &self.alpha)
    }
}

fn component(digits: &[IntVec], a: &[i64]) -> Result<DigitSet> {
    let mut out = Vec::new();
    for d in digits {
        if digits.binary_search(&v_sub(d, a)?).is_ok() {
            out.push(d.clone());
        }
    }
    Ok(out)
}

fn first_empty(seq: &EpSeq<DigitSet>) -> Option<usize> {
    (0..seq.stored_len()).find(|&i| seq.at(i).is_empty()).map(|i| i + 1)
}

/// `(D ∩ (D + α_j))_j`.
pub fn intersection_sequence(t: &TranslateSpec) -> Result<EpSeq<DigitSet>> {
    let seq = t.alpha.try_map(|a| component(t.system.digits(), a))?;
    match first_empty(&seq) {
        Some(j) => Err(Error::EmptyIntersection(j)),
        None => Ok(seq),
    }
}

/// Componentwise intersection of several intersection sequences.
pub fn multi_intersection_sequence(sys: &RadixSystem, specs: &[TranslateSpec]) -> Result<EpSeq<DigitSet>> {
    if specs.is_empty() {
        return Err(Error::PreconditionViolated("no translations given".into()));
    }
    if specs.iter().any(|t| t.system != *sys) {
        return Err(Error::PreconditionViolated("translations belong to a different system".into()));
    }
    let seqs: Vec<EpSeq<DigitSet>> = specs.iter().map(|t| t.alpha.try_map(|a| component(sys.digits(), a))).collect::<Result<_>>()?;
    let (m, p) = align(&seqs.iter().map(|s| s.pre_len()).collect::<Vec<_>>(), &seqs.iter().map(|s| s.period()).collect::<Vec<_>>());
    let meet = |i: usize| -> DigitSet {
        let mut acc: BTreeSet<IntVec> = seqs[0].at(i).iter().cloned().collect();
        for s in &seqs[1..] {
            let other: BTreeSet<IntVec> = s.at(i).iter().cloned().collect();
            acc = acc.intersection(&other).cloned().collect();
        }
        acc.into_iter().collect()
    };
    let seq = EpSeq::new((0..m).map(meet).collect(), (m..m + p).map(meet).collect())?;
    match first_empty(&seq) {
        Some(j) => Err(Error::EmptyIntersection(j)),
        None => Ok(seq),
    }
}

/// The IFS `{x ↦ A^{-p}(x + b − β) + β}` whose attractor is the intersection.
#[derive(Clone, Debug, PartialEq)]
pub struct IfsSpec {
    pub p: usize,
    /// `A^{-p}`.
    pub linear: RatMatrix,
    /// The vectors `A^{-p}(b − β) + β`, sorted and distinct.
    pub offsets: Vec<RatVec>,
    pub beta_value: RatVec,
}

impl IfsSpec {
    pub fn apply(&self, i: usize, x: &[BigRational]) -> RatVec {
        rv_add(&self.linear.mul_vec(x), &self.offsets[i])
    }

    /// Fixed point of map `i`.
    pub fn fixed_point(&self, i: usize) -> Result<RatVec> {
        let n = self.linear.dim();
        RatMatrix::identity(n).sub(&self.linear).solve(&self.offsets[i])
    }
}

fn cartesian(sets: &[&DigitSet]) -> Vec<Vec<IntVec>> {
    let mut out: Vec<Vec<IntVec>> = vec![Vec::new()];
    for s in sets {
        out = out.iter().flat_map(|pre| s.iter().map(move |x| {
            let mut v = pre.clone();
            v.push(x.clone());
            v
        })).collect();
    }
    out
}

pub fn build_ifs(t: &TranslateSpec, w: &SepSetWitness) -> Result<IfsSpec> {
    let seq = intersection_sequence(t)?;
    w.validate(&seq)?;
    let sys = &t.system;
    let n = sys.dim();
    let p = w.p;
    let a = sys.matrix().to_rat();
    let inv = sys.inverse();
    let inv_p = inv.pow(p as u64);
    let beta = radix::eval_exact(sys, &w.beta()?)?;
    let a_pows: Vec<RatMatrix> = (0..=p).map(|k| a.pow(k as u64)).collect();
    let inv_pows: Vec<RatMatrix> = (0..=p).map(|k| inv.pow(k as u64)).collect();
    let mut offsets = BTreeSet::new();
    let sets: Vec<&DigitSet> = w.u.iter().chain(&w.v).collect();
    for choice in cartesian(&sets) {
        let mut b: RatVec = vec![rat(0); n];
        for l in 1..=p {
            b = rv_add(&b, &a_pows[p - l].mul_int_vec(&choice[l - 1]));
            b = rv_add(&b, &inv_pows[l].mul_int_vec(&choice[p + l - 1]));
        }
        offsets.insert(rv_add(&inv_p.mul_vec(&rv_sub(&b, &beta)), &beta));
    }
    Ok(IfsSpec { p, linear: inv_p, offsets: offsets.into_iter().collect(), beta_value: beta })
}

/// Strong separation of the IFS built from `w`.
pub fn check_ssc(w: &SepSetWitness) -> Result<bool> {
    w.sums_are_direct()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimKind {
    Similarity,
    Box,
    Hausdorff,
}

impl DimKind {
    pub fn name(&self) -> &'static str {
        match self {
            DimKind::Similarity => "similarity",
            DimKind::Box => "box",
            DimKind::Hausdorff => "hausdorff",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DimFlags {
    pub ssc: Option<bool>,
    pub osc_implied_false: Option<bool>,
    pub uniqueness_assumed: bool,
}

/// A dimension `n·Σ log(counts) / (p·log det)` with its exact form.
#[derive(Clone, Debug, PartialEq)]
pub struct DimReport {
    pub kind: DimKind,
    pub exact: LogRatio,
    pub counts: Vec<u64>,
    pub p: usize,
    pub det: u64,
    pub n: usize,
    pub float: f64,
    pub flags: DimFlags,
}

impl DimReport {
    fn new(kind: DimKind, counts: Vec<u64>, p: usize, det: u64, n: usize) -> Result<Self> {
        let exact = LogRatio::from_counts(n, &counts, p, det)?;
        let float = n as f64 * counts.iter().map(|&c| (c as f64).ln()).sum::<f64>() / (p as f64 * (det as f64).ln());
        Ok(DimReport { kind, exact, counts, p, det, n, float, flags: DimFlags::default() })
    }
}

/// Similarity dimension of a homogeneous IFS: `Π counts` maps per `p` steps,
/// each contracting by `|det|^{-p/n}`.
pub fn similarity_dimension(counts: &[u64], p: usize, det: u64, n: usize) -> Result<DimReport> {
    if det < 2 || p == 0 || counts.is_empty() {
        return Err(Error::PreconditionViolated("need |det| > 1, p > 0 and at least one count".into()));
    }
    DimReport::new(DimKind::Similarity, counts.to_vec(), p, det, n)
}

/// `Σ ln(counts) / (−p ln c)` for a contraction coefficient `c`.
pub fn similarity_dimension_coeff(counts: &[u64], p: usize, c: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&c) || c == 0.0 {
        return Err(Error::PreconditionViolated("contraction coefficient must lie in (0, 1)".into()));
    }
    Ok(counts.iter().map(|&k| (k as f64).ln()).sum::<f64>() / (-(p as f64) * c.ln()))
}

/// Solves `Σ r_i^s = 1` by bisection.
pub fn generic_similarity_dimension(ratios: &[f64]) -> Result<f64> {
    if ratios.is_empty() || ratios.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::PreconditionViolated("ratios must lie in (0, 1)".into()));
    }
    let f = |s: f64| ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn require_conformal(sys: &RadixSystem) -> Result<()> {
    if sys.spectral().conformal {
        Ok(())
    } else {
        Err(Error::SimilarityUnavailable)
    }
}

/// Box dimension of the coding-map image of an eventually periodic digit-set
/// sequence.
pub fn box_dimension_ep(sys: &RadixSystem, seq: &EpSeq<DigitSet>) -> Result<DimReport> {
    require_conformal(sys)?;
    if let Some(j) = first_empty(seq) {
        return Err(Error::EmptyIntersection(j));
    }
    let counts = seq.cycle().iter().map(|s| s.len() as u64).collect();
    DimReport::new(DimKind::Box, counts, seq.period(), sys.abs_det(), sys.dim())
}

/// Hausdorff dimension of the attractor of a SEP witness.
pub fn hausdorff_dimension_sep(sys: &RadixSystem, w: &SepSetWitness) -> Result<DimReport> {
    require_conformal(sys)?;
    let counts = w.sequence()?.cycle().iter().map(|s| s.len() as u64).collect();
    let mut r = DimReport::new(DimKind::Hausdorff, counts, w.sequence()?.period(), sys.abs_det(), sys.dim())?;
    let ssc = check_ssc(w)?;
    r.flags.ssc = Some(ssc);
    r.flags.osc_implied_false = Some(!ssc);
    Ok(r)
}

/// Similarity dimension of the IFS built from `w`.
pub fn witness_similarity_dimension(sys: &RadixSystem, w: &SepSetWitness) -> Result<DimReport> {
    let counts: Vec<u64> = w.u.iter().zip(&w.v).map(|(u, v)| (u.len() * v.len()) as u64).collect();
    let mut r = similarity_dimension(&counts, w.p, sys.abs_det(), sys.dim())?;
    r.flags.ssc = Some(check_ssc(w)?);
    Ok(r)
}

/// `log G_k / (k log |det A|^{1/n})` for `k = 1..=counts.len()`, where
/// `G_k = Π_{j≤k} counts_j`.
pub fn gk_profile(sys: &RadixSystem, counts: &[u64]) -> Result<Vec<f64>> {
    require_conformal(sys)?;
    let scale = (sys.abs_det() as f64).ln() / sys.dim() as f64;
    let mut acc = 0.0;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            acc += (c as f64).ln();
            acc / ((k + 1) as f64 * scale)
        })
        .collect())
}

/// Dimensions of a Bedford–McMullen carpet.
#[derive(Clone, Debug, PartialEq)]
pub struct BmDims {
    pub hausdorff: f64,
    pub box_dim: f64,
    /// Rectangles per nonempty column, by increasing first coordinate.
    pub column_counts: Vec<u64>,
}

/// The carpet formulas applied to `digits` with no grid check; the first
/// coordinate indexes the `m` columns.
pub fn bm_formula(m: u64, n: u64, digits: &[IntVec]) -> Result<BmDims> {
    if digits.is_empty() || digits.iter().any(|d| d.len() != 2) {
        return Err(Error::PreconditionViolated("need a nonempty set of planar digits".into()));
    }
    let mut cols: BTreeMap<i64, BTreeSet<i64>> = BTreeMap::new();
    for d in digits {
        cols.entry(d[0]).or_default().insert(d[1]);
    }
    let column_counts: Vec<u64> = cols.values().map(|s| s.len() as u64).collect();
    let (lm, ln) = ((m as f64).ln(), (n as f64).ln());
    let total: u64 = column_counts.iter().sum();
    let big_m = column_counts.len() as f64;
    let hausdorff = column_counts.iter().map(|&c| (c as f64).powf(lm / ln)).sum::<f64>().ln() / lm;
    let box_dim = big_m.ln() / lm + (total as f64 / big_m).ln() / ln;
    Ok(BmDims { hausdorff, box_dim, column_counts })
}

/// Carpet dimensions for `D ⊆ {0..m−1} × {0..n−1}`, `n > m ≥ 2`.
pub fn bm_dimensions(m: u64, n: u64, digits: &[IntVec]) -> Result<BmDims> {
    if !(n > m && m >= 2) {
        return Err(Error::PreconditionViolated("need n > m >= 2".into()));
    }
    for d in digits {
        if d.len() != 2 || d[0] < 0 || d[1] < 0 || d[0] as u64 >= m || d[1] as u64 >= n {
            return Err(Error::GridViolation(d.clone(), m, n));
        }
    }
    bm_formula(m, n, digits)
}

/// Translation whose intersection has box dimension `λ·dim T`, where `λ = p/q`.
/// The representation keeps `prefix` and continues with a tail of `0` and a
/// maximal difference `v`: `v` is used at step `j` exactly when
/// `⌊jλ⌋ = ⌊(j−1)λ⌋`.
pub fn level_set_translate(sys: &RadixSystem, prefix: &[IntVec], p: u64, q: u64) -> Result<TranslateSpec> {
    if q == 0 || p > q {
        return Err(Error::PreconditionViolated("need 0 <= p/q <= 1".into()));
    }
    let diff = sys.difference_system()?;
    if !radix::representations_unique(&diff)? {
        return Err(Error::UniquenessNotEstablished);
    }
    let diffs = sys.difference_digits()?;
    let best = diffs.iter().map(|d| crate::linalg::norm_sq(d)).max().unwrap_or(0);
    let mut v = None;
    for d in diffs.iter().filter(|d| crate::linalg::norm_sq(d) == best) {
        if component(sys.digits(), d)?.len() == 1 {
            v = Some(d.clone());
            break;
        }
    }
    let v = v.ok_or_else(|| Error::PreconditionViolated("no maximal difference has a single-point intersection".into()))?;
    let zero = vec![0; sys.dim()];
    let m = prefix.len() as u64;
    let h = |j: u64| (j * p) / q;
    let tail: Vec<IntVec> = (m + 1..=m + q).map(|j| if h(j) == h(j - 1) { v.clone() } else { zero.clone() }).collect();
    let alpha = EpSeq::new(prefix.to_vec(), tail)?;
    let t = TranslateSpec::waived(sys.clone(), alpha)?;
    Ok(TranslateSpec { uniqueness_checked: true, ..t })
}

/// [`level_set_translate`] with the shortest prefix of `alpha` that puts the
/// new translation within `eps` (Euclidean) of `alpha`'s value. Returns the
/// translation and the prefix length used.
pub fn level_set_near(sys: &RadixSystem, alpha: &Digits, eps: f64, p: u64, q: u64, max_prefix: usize) -> Result<(TranslateSpec, usize)> {
    if eps <= 0.0 {
        return Err(Error::PreconditionViolated("eps must be positive".into()));
    }
    let target = radix::eval_exact(sys, alpha)?;
    for m in 0..=max_prefix {
        let t = level_set_translate(sys, &alpha.prefix(m), p, q)?;
        let d = crate::linalg::rv_to_f64(&crate::linalg::rv_sub(&t.value()?, &target));
        if d.iter().map(|x| x * x).sum::<f64>().sqrt() < eps {
            return Ok((t, m));
        }
    }
    Err(Error::SearchBudgetExceeded { bound: max_prefix, needed: max_prefix + 1 })
}

/// For `D = {0, d}`: the least point `γ` of the intersection and the integer
/// sequence `m − |α_j|`, where `d = m·u` with `u` primitive and `α_j = k·d`
/// counts as `|k|·m`.
pub fn minimal_element(t: &TranslateSpec) -> Result<(RatVec, EpSeq<i64>)> {
    let digits = t.system.digits();
    let zero = vec![0; t.system.dim()];
    if digits.len() != 2 || !digits.contains(&zero) {
        return Err(Error::DigitShapeViolation(format!("{digits:?}")));
    }
    let d = digits.iter().find(|x| **x != zero).unwrap().clone();
    let g = d.iter().fold(0i64, |a, &b| num_integer::gcd(a, b));
    let seq = intersection_sequence(t)?;
    let mins = seq.map(|s| if s.contains(&zero) { zero.clone() } else { s[0].clone() });
    let gamma = radix::eval_exact(&t.system, &mins)?;
    let bounds = t.alpha.map(|a| {
        if a.iter().all(|&x| x == 0) {
            g
        } else {
            let k = a.iter().zip(&d).find(|(_, &y)| y != 0).map(|(&x, &y)| x / y).unwrap_or(0);
            g - k.abs() * g
        }
    });
    Ok((gamma, bounds))
}

/// SEP test of the bounds sequence from [`minimal_element`].
pub fn check_selfsim_sep_special(t: &TranslateSpec) -> Result<Option<SepIntWitness>> {
    Ok(is_sep_int(&minimal_element(t)?.1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnionComponent {
    pub representation: Digits,
    pub sequence: EpSeq<DigitSet>,
    /// Lower box dimension of the component; absent when `A` is not conformal.
    pub dim: Option<DimReport>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnionReport {
    pub class: EquivClass,
    pub components: Vec<UnionComponent>,
}

/// Splits `T ∩ (T + α)` along the representations of `α`. Representations
/// whose sequence has an empty component contribute nothing and are skipped.
pub fn union_components(t: &TranslateSpec, limit: usize) -> Result<UnionReport> {
    let diff = t.system.difference_system()?;
    let (class, reps) = radix::enumerate_equivalents(&diff, &t.alpha, limit)?;
    let mut components = Vec::new();
    for r in reps {
        let seq = r.try_map(|a| component(t.system.digits(), a))?;
        if first_empty(&seq).is_some() {
            continue;
        }
        let dim = match box_dimension_ep(&t.system, &seq) {
            Ok(d) => Some(d),
            Err(Error::SimilarityUnavailable) => None,
            Err(e) => return Err(e),
        };
        components.push(UnionComponent { representation: r, sequence: seq, dim });
    }
    Ok(UnionReport { class, components })
}

/// Brackets on the number of level-`k` tiles `A^{-k}(T + z)` meeting the
/// coding image of `seq`: the count of distinct prefixes `z` and the count of
/// `z + s` with `s` a neighbour or 0.
pub fn ktile_bracket(sys: &RadixSystem, seq: &EpSeq<DigitSet>, k: usize) -> Result<(u64, u64)> {
    let mut zs: BTreeSet<IntVec> = BTreeSet::from([vec![0; sys.dim()]]);
    for j in 0..k {
        let mut next = BTreeSet::new();
        for z in &zs {
            let az = sys.matrix().mul_vec(z)?;
            for d in seq.at(j) {
                next.insert(v_add(&az, d)?);
            }
        }
        zs = next;
    }
    let nb = neighbours::system_neighbours(sys)?.with_zero();
    let mut wide = BTreeSet::new();
    for z in &zs {
        for s in &nb {
            wide.insert(v_add(z, s)?);
        }
    }
    Ok((zs.len() as u64, wide.len() as u64))
}

/// Coordinates in which `A` acts as a similarity: the identity for
/// similarities and scalars, and `x ↦ w·x` for a left eigenvector `w` of a
/// non-real eigenvalue in the planar case.
fn embedding(sys: &RadixSystem) -> Box<dyn Fn(&[f64]) -> Vec<f64>> {
    let a = sys.matrix();
    if sys.dim() == 2 && a.similarity_square().is_none() {
        if let Some(lam) = sys.spectral().eigenvalues.iter().find(|z| z.im.abs() > 1e-9).copied() {
            let w = (Complex64::new(a.get(1, 0) as f64, 0.0), lam - a.get(0, 0) as f64);
            return Box::new(move |x: &[f64]| {
                let z = w.0 * x[0] + w.1 * x[1];
                vec![z.re, z.im]
            });
        }
    }
    Box::new(|x: &[f64]| x.to_vec())
}

/// Numerical box-counting estimate from a depth-limited sample.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxEstimate {
    pub dim: f64,
    pub points: usize,
    /// `(k, occupied cells at side r^{-k})` used in the fit.
    pub counts: Vec<(usize, usize)>,
}

pub fn box_count_estimate(sys: &RadixSystem, seq: &EpSeq<DigitSet>, depth: usize, cap: usize) -> Result<BoxEstimate> {
    require_conformal(sys)?;
    if let Some(j) = first_empty(seq) {
        return Err(Error::EmptyIntersection(j));
    }
    let total: u128 = (0..depth).map(|j| seq.at(j).len() as u128).product();
    if total > cap as u128 {
        return Err(Error::DepthTooLarge { depth, points: total, cap: cap as u128 });
    }
    let n = sys.dim();
    let inv = sys.inverse().to_f64();
    let mul = |v: &[f64]| -> Vec<f64> { (0..n).map(|i| (0..n).map(|j| inv[i * n + j] * v[j]).sum()).collect() };
    // x = Σ_{j≤depth} A^{-j} d_j by Horner from the deepest digit
    let mut pts: Vec<Vec<f64>> = vec![vec![0.0; n]];
    for j in (0..depth).rev() {
        let mut next = Vec::with_capacity(pts.len() * seq.at(j).len());
        for x in &pts {
            for d in seq.at(j) {
                let s: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + *b as f64).collect();
                next.push(mul(&s));
            }
        }
        pts = next;
    }
    let emb = embedding(sys);
    let pts: Vec<Vec<f64>> = pts.iter().map(|p| emb(p)).collect();
    let r = sys.spectral().max_eig_modulus;
    let lo: Vec<f64> = (0..pts[0].len()).map(|i| pts.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min)).collect();
    let diam = (0..lo.len()).map(|i| pts.iter().map(|p| p[i] - lo[i]).fold(0.0, f64::max)).fold(0.0, f64::max).max(1e-300);
    let mut counts = Vec::new();
    for k in 1..depth {
        let side = diam * r.powi(-(k as i32));
        let cells: BTreeSet<Vec<i64>> = pts.iter().map(|p| p.iter().zip(&lo).map(|(a, b)| ((a - b) / side).floor() as i64).collect()).collect();
        counts.push((k, cells.len()));
    }
    let xs: Vec<f64> = counts.iter().map(|&(k, _)| k as f64 * r.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&(_, c)| (c as f64).ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let dim = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    Ok(BoxEstimate { dim, points: pts.len(), counts })
}

/// Comparison of a claimed dimension with the computed one and a numerical
/// estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct Arbitration {
    pub claimed: LogRatio,
    pub computed: LogRatio,
    pub estimate: f64,
    pub agree: bool,
    /// `Some(true)` when the estimate sides with the computed value.
    pub estimate_favours_computed: Option<bool>,
}

pub fn arbitrate(claimed: &LogRatio, computed: &DimReport, estimate: f64) -> Arbitration {
    let agree = *claimed == computed.exact;
    let favours = (!agree).then(|| (estimate - computed.float).abs() < (estimate - claimed.to_f64()).abs());
    Arbitration { claimed: claimed.clone(), computed: computed.exact.clone(), estimate, agree, estimate_favours_computed: favours }
}

/// Scalar digit sets as vectors along the first axis.
pub fn axis_set(n: usize, xs: &[i64]) -> DigitSet {
    make_set(xs.iter().map(|&x| {
        let mut v = vec![0; n];
        v[0] = x;
        v
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sep::is_sep_sets_translated;

    fn e1(xs: &[i64]) -> Vec<IntVec> {
        xs.iter().map(|&x| vec![x, 0]).collect()
    }

    fn nossc() -> RadixSystem {
        RadixSystem::gaussian(-3, 1, &[0, 4, 8]).unwrap()
    }

    #[test]
    fn nossc_sequence_and_ifs() {
        let sys = nossc();
        let alpha = EpSeq::new(e1(&[-4, -8]), e1(&[0, 8])).unwrap();
        let t = TranslateSpec::new(sys.clone(), alpha).unwrap();
        let seq = intersection_sequence(&t).unwrap();
        let want = EpSeq::new(vec![axis_set(2, &[0, 4]), axis_set(2, &[0])], vec![axis_set(2, &[0, 4, 8]), axis_set(2, &[8])]).unwrap();
        assert_eq!(seq, want);
        let w = is_sep_sets_translated(sys.digits(), &seq, None).unwrap().unwrap();
        let ifs = build_ifs(&t, &w).unwrap();
        assert_eq!(ifs.offsets.len(), 4);
        let inv = sys.inverse();
        let e = crate::linalg::ratvec(&[1, 0]);
        let term = |c: i64, k: u64| inv.pow(k).mul_vec(&e).into_iter().map(|x| x * rat(c)).collect::<RatVec>();
        let mut want: Vec<RatVec> = vec![
            term(8, 4),
            rv_add(&term(4, 3), &term(8, 4)),
            rv_add(&term(4, 1), &term(8, 4)),
            rv_add(&rv_add(&term(4, 1), &term(4, 3)), &term(8, 4)),
        ];
        want.sort();
        assert_eq!(ifs.offsets, want);
        assert!(!check_ssc(&w).unwrap());
        let b = box_dimension_ep(&sys, &seq).unwrap();
        assert_eq!(b.exact, LogRatio::logs(3, 10).unwrap());
        let s = witness_similarity_dimension(&sys, &w).unwrap();
        assert_eq!(s.exact, LogRatio::logs(4, 10).unwrap());
        let h = hausdorff_dimension_sep(&sys, &w).unwrap();
        assert_eq!(h.exact, b.exact);
        assert_eq!(h.flags.osc_implied_false, Some(true));
        assert!(s.float > h.float);
    }

    #[test]
    fn beta_variant() {
        let sys = nossc();
        let t = TranslateSpec::new(sys.clone(), EpSeq::new(e1(&[-4, -8]), e1(&[-4, 8])).unwrap()).unwrap();
        let seq = intersection_sequence(&t).unwrap();
        let w = is_sep_sets_translated(sys.digits(), &seq, None).unwrap().unwrap();
        assert!(check_ssc(&w).unwrap());
        let ifs = build_ifs(&t, &w).unwrap();
        assert_eq!(ifs.offsets.len(), 2);
        let h = hausdorff_dimension_sep(&sys, &w).unwrap();
        assert_eq!(h.exact, LogRatio::logs(2, 10).unwrap());
        // every map sends the intersection into itself: fixed points have
        // representations in the digit-set sequence
        for i in 0..2 {
            let fp = ifs.fixed_point(i).unwrap();
            let img = ifs.apply(i, &fp);
            assert_eq!(img, fp);
        }
    }

    #[test]
    fn trivial_translate() {
        let sys = nossc();
        let t = TranslateSpec::new(sys.clone(), EpSeq::constant(vec![0, 0])).unwrap();
        let seq = intersection_sequence(&t).unwrap();
        assert_eq!(seq, EpSeq::constant(sys.digits().to_vec()));
        let w = is_sep_sets_translated(sys.digits(), &seq, None).unwrap().unwrap();
        let ifs = build_ifs(&t, &w).unwrap();
        assert_eq!(ifs.offsets.len(), 3);
        assert_eq!(box_dimension_ep(&sys, &seq).unwrap().exact, LogRatio::new(&[(rat(2), 3)], &[(rat(1), 10)]).unwrap());
    }

    #[test]
    fn multi_translates() {
        let sys = RadixSystem::scalar(3, &[0, 2]).unwrap();
        let a = TranslateSpec::waived(sys.clone(), EpSeq::new(vec![vec![0]], vec![vec![0], vec![2]]).unwrap()).unwrap();
        let b = TranslateSpec::waived(sys.clone(), EpSeq::new(vec![vec![0]], vec![vec![2], vec![0]]).unwrap()).unwrap();
        let i = multi_intersection_sequence(&sys, &[a.clone(), b]).unwrap();
        assert_eq!(i, EpSeq::new(vec![vec![vec![0], vec![2]]], vec![vec![vec![2]]]).unwrap());
        assert_eq!(multi_intersection_sequence(&sys, std::slice::from_ref(&a)).unwrap(), intersection_sequence(&a).unwrap());

        let sys = RadixSystem::scalar(10, &[0, 3, 6, 9]).unwrap();
        let a = TranslateSpec::waived(sys.clone(), EpSeq::new(vec![vec![-3]], vec![vec![0]]).unwrap()).unwrap();
        let b = TranslateSpec::waived(sys.clone(), EpSeq::new(vec![vec![6]], vec![vec![0]]).unwrap()).unwrap();
        assert_eq!(multi_intersection_sequence(&sys, &[a, b]).unwrap().at(0), &vec![vec![6]]);
    }

    #[test]
    fn empty_components_are_reported() {
        let sys = RadixSystem::scalar(10, &[0, 3]).unwrap();
        let t = TranslateSpec::waived(sys.clone(), EpSeq::new(vec![vec![3], vec![-3]], vec![vec![3]]).unwrap()).unwrap();
        assert!(intersection_sequence(&t).is_ok());
        let t = TranslateSpec::waived(sys.clone(), EpSeq::constant(vec![6])).unwrap_err();
        assert!(matches!(t, Error::PreconditionViolated(_)));
    }

    #[test]
    fn similarity_dimensions() {
        assert_eq!(similarity_dimension(&[2], 1, 3, 1).unwrap().exact, LogRatio::logs(2, 3).unwrap());
        let c = similarity_dimension_coeff(&[2], 1, 1.0 / 3.0).unwrap();
        assert!((c - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        let g = generic_similarity_dimension(&[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((g - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        let g = generic_similarity_dimension(&[0.5, 0.25, 0.25]).unwrap();
        assert!((0.5f64.powf(g) + 2.0 * 0.25f64.powf(g) - 1.0).abs() < 1e-10);
        assert!(generic_similarity_dimension(&[1.5]).is_err());
    }

    #[test]
    fn quadratic_example_counts() {
        let sys = crate::numsys::companion_system(&[21, 9, 1], &[0, 10, 20]).unwrap();
        let seq = EpSeq::periodic(vec![axis_set(2, &[10, 20]), axis_set(2, &[0, 10, 20])]).unwrap();
        let d = box_dimension_ep(&sys, &seq).unwrap();
        assert_eq!(d.exact, LogRatio::logs(6, 21).unwrap());
        let est = box_count_estimate(&sys, &seq, 8, 1 << 20).unwrap();
        assert_eq!(est.points, 1296);
        let arb = arbitrate(&LogRatio::logs(4, 21).unwrap(), &d, est.dim);
        assert!(!arb.agree);
        assert_eq!(arb.estimate_favours_computed, Some(true));
    }

    #[test]
    fn carpets() {
        let full: Vec<IntVec> = (0..2).flat_map(|a| (0..3).map(move |b| vec![a, b])).collect();
        let d = bm_dimensions(2, 3, &full).unwrap();
        assert!((d.hausdorff - 2.0).abs() < 1e-12 && (d.box_dim - 2.0).abs() < 1e-12);
        let d = bm_dimensions(2, 3, &[vec![1, 2]]).unwrap();
        assert!(d.hausdorff.abs() < 1e-12 && d.box_dim.abs() < 1e-12);
        assert_eq!(bm_dimensions(2, 3, &[vec![2, 0]]), Err(Error::GridViolation(vec![2, 0], 2, 3)));
    }

    #[test]
    fn level_sets() {
        let sys = RadixSystem::scalar(10, &[0, 3]).unwrap();
        let dim_t = LogRatio::logs(2, 10).unwrap();
        for (p, q) in [(0u64, 1u64), (1, 1), (1, 2), (2, 3)] {
            let t = level_set_translate(&sys, &[vec![3]], p, q).unwrap();
            let seq = intersection_sequence(&t).unwrap();
            let d = box_dimension_ep(&sys, &seq).unwrap();
            assert_eq!(d.exact, dim_t.scale(&BigRational::new((p as i64).into(), (q as i64).into())), "{p}/{q}");
        }
    }

    #[test]
    fn special_sep() {
        let sys = RadixSystem::gaussian(-2, 1, &[0, 3]).unwrap();
        let t = TranslateSpec::waived(sys.clone(), EpSeq::new(vec![vec![3, 0]], vec![vec![0, 0]]).unwrap()).unwrap();
        let (_, bounds) = minimal_element(&t).unwrap();
        assert_eq!(bounds, EpSeq::new(vec![0], vec![3]).unwrap());
        let w = check_selfsim_sep_special(&t).unwrap().unwrap();
        assert_eq!((w.b, w.c), (vec![0], vec![3]));
        let t = TranslateSpec::waived(sys.clone(), EpSeq::constant(vec![3, 0])).unwrap();
        let (gamma, bounds) = minimal_element(&t).unwrap();
        assert_eq!(bounds, EpSeq::constant(0));
        assert_eq!(gamma, radix::eval_exact(&sys, &EpSeq::constant(vec![3, 0])).unwrap());
        let t = TranslateSpec::waived(sys.clone(), EpSeq::constant(vec![0, 0])).unwrap();
        assert_eq!(minimal_element(&t).unwrap(), (vec![rat(0), rat(0)], EpSeq::constant(3)));
        let bad = RadixSystem::gaussian(-2, 1, &[0, 1, 2]).unwrap();
        let t = TranslateSpec::waived(bad, EpSeq::constant(vec![0, 0])).unwrap();
        assert!(matches!(minimal_element(&t), Err(Error::DigitShapeViolation(_))));
    }

    #[test]
    fn ktile_counts_bracket() {
        let sys = nossc();
        let seq = EpSeq::new(vec![axis_set(2, &[0, 4]), axis_set(2, &[0])], vec![axis_set(2, &[0, 4, 8]), axis_set(2, &[8])]).unwrap();
        let mut g = 1u64;
        for k in 1..=6 {
            g *= seq.at(k - 1).len() as u64;
            let (lo, hi) = ktile_bracket(&sys, &seq, k).unwrap();
            assert_eq!(lo, g);
            assert!(lo <= hi);
        }
    }
}
