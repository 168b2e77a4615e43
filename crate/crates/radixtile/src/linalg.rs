//! Exact integer and rational linear algebra.
//!
//! Lattice vectors are `Vec<i64>` and every product or sum on them is checked,
//! so overflow surfaces as [`Error::Overflow`] instead of wrapping. Anything
//! that can grow without bound (powers, inverses, determinants, Smith forms)
//! is computed with `BigInt` / `BigRational`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type IntVec = Vec<i64>;
pub type Rational = BigRational;
pub type RatVec = Vec<BigRational>;

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn ratvec(v: &[i64]) -> RatVec {
    v.iter().map(|&x| rat(x)).collect()
}

pub fn rv_add(a: &[BigRational], b: &[BigRational]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn rv_sub(a: &[BigRational], b: &[BigRational]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn rv_to_f64(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(rat_to_f64).collect()
}

pub fn rat_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Returns the vector as integers when every entry is integral.
pub fn rv_to_int(v: &[BigRational]) -> Option<IntVec> {
    v.iter()
        .map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None })
        .collect()
}

pub fn v_add(a: &[i64], b: &[i64]) -> Result<IntVec> {
    a.iter().zip(b).map(|(x, y)| x.checked_add(*y).ok_or(Error::Overflow)).collect()
}

pub fn v_sub(a: &[i64], b: &[i64]) -> Result<IntVec> {
    a.iter().zip(b).map(|(x, y)| x.checked_sub(*y).ok_or(Error::Overflow)).collect()
}

pub fn v_neg(a: &[i64]) -> IntVec {
    a.iter().map(|x| -x).collect()
}

pub fn v_scale(a: &[i64], k: i64) -> Result<IntVec> {
    a.iter().map(|x| x.checked_mul(k).ok_or(Error::Overflow)).collect()
}

pub fn norm(v: &[i64]) -> f64 {
    v.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>().sqrt()
}

pub fn norm_sq(v: &[i64]) -> i128 {
    v.iter().map(|&x| (x as i128) * (x as i128)).sum()
}

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(n: usize, data: Vec<i64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} entries cannot form a nonempty square matrix of size {n}",
                data.len()
            )));
        }
        Ok(IntMatrix { n, data })
    }

    /// Builds a matrix from a row-major list whose length is a perfect square.
    pub fn from_flat(data: Vec<i64>) -> Result<Self> {
        let n = (data.len() as f64).sqrt().round() as usize;
        Self::new(n, data)
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("rows must all have length n".into()));
        }
        Self::new(n, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1)
    }

    pub fn scalar(n: usize, c: i64) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = c;
        }
        IntMatrix { n, data }
    }

    pub fn diag(d: &[i64]) -> Self {
        let n = d.len();
        let mut data = vec![0; n * n];
        for (i, &x) in d.iter().enumerate() {
            data[i * n + i] = x;
        }
        IntMatrix { n, data }
    }

    /// Matrix of multiplication by `re + im·i` on Z^2 = Z[i].
    pub fn gaussian(re: i64, im: i64) -> Self {
        IntMatrix { n: 2, data: vec![re, -im, im, re] }
    }

    /// Companion matrix of the monic polynomial
    /// `x^n + c[n-1] x^(n-1) + ... + c[0]`, acting on coordinates in the basis
    /// `1, x, ..., x^(n-1)`.
    pub fn companion(c: &[i64]) -> Result<Self> {
        let n = c.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("polynomial must have degree at least 1".into()));
        }
        let mut data = vec![0; n * n];
        for i in 1..n {
            data[i * n + (i - 1)] = 1;
        }
        for i in 0..n {
            data[i * n + (n - 1)] = c[i].checked_neg().ok_or(Error::Overflow)?;
        }
        Ok(IntMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn flat(&self) -> &[i64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.get(i, j);
            }
        }
        IntMatrix { n, data }
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<IntVec> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {}x{} matrix",
                v.len(),
                self.n,
                self.n
            )));
        }
        let mut out = Vec::with_capacity(self.n);
        for row in self.data.chunks(self.n) {
            let mut acc: i64 = 0;
            for (a, x) in row.iter().zip(v) {
                acc = a
                    .checked_mul(*x)
                    .and_then(|p| acc.checked_add(p))
                    .ok_or(Error::Overflow)?;
            }
            out.push(acc);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc: i64 = 0;
                for k in 0..n {
                    acc = self
                        .get(i, k)
                        .checked_mul(other.get(k, j))
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(Error::Overflow)?;
                }
                data[i * n + j] = acc;
            }
        }
        Ok(IntMatrix { n, data })
    }

    pub fn to_big(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.n).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix { n: self.n, data: self.data.iter().map(|&x| rat(x)).collect() }
    }

    /// Exact determinant by fraction-free elimination.
    pub fn det_big(&self) -> BigInt {
        let n = self.n;
        let mut m = self.to_big();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        sign * &m[n - 1][n - 1]
    }

    pub fn det(&self) -> Result<i64> {
        self.det_big().to_i64().ok_or(Error::Overflow)
    }

    pub fn inverse(&self) -> Result<RatMatrix> {
        self.to_rat().inverse()
    }

    /// `Some(r²)` when `A·Aᵀ = r²·I`, which is exactly when `A` is a scalar
    /// multiple of an orthogonal matrix.
    pub fn similarity_square(&self) -> Option<i64> {
        let n = self.n;
        let mut r2 = None;
        for i in 0..n {
            for j in 0..n {
                let mut acc: i128 = 0;
                for k in 0..n {
                    acc += self.get(i, k) as i128 * self.get(j, k) as i128;
                }
                if i == j {
                    match r2 {
                        None => r2 = Some(acc),
                        Some(r) if r != acc => return None,
                        _ => {}
                    }
                } else if acc != 0 {
                    return None;
                }
            }
        }
        r2.and_then(|r| i64::try_from(r).ok()).filter(|&r| r > 0)
    }

    /// Characteristic polynomial `det(xI − A)` as coefficients `c[0..=n]`
    /// (constant term first, `c[n] = 1`), by Faddeev–LeVerrier.
    pub fn char_poly(&self) -> Vec<BigInt> {
        let n = self.n;
        let a = self.to_rat();
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        let mut m = RatMatrix::zeros(n);
        for k in 1..=n {
            m = a.mul(&m).add(&RatMatrix::identity(n).scale(&coeffs[n - k + 1]));
            let tr = a.mul(&m).trace();
            coeffs[n - k] = -tr / rat(k as i64);
        }
        coeffs.into_iter().map(|c| c.to_integer()).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&x| x as f64).collect()
    }
}

/// Square rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    n: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(n: usize) -> Self {
        RatMatrix { n, data: vec![BigRational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<BigRational>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn trace(&self) -> BigRational {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RatMatrix { n: self.n, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, o: &RatMatrix) -> Self {
        RatMatrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &RatMatrix) -> Self {
        RatMatrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn mul(&self, o: &RatMatrix) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * o.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> RatVec {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn mul_int_vec(&self, v: &[i64]) -> RatVec {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, &x)| a * rat(x)).sum())
            .collect()
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Solves `M·x = b` exactly.
    pub fn solve(&self, b: &[BigRational]) -> Result<RatVec> {
        let n = self.n;
        let mut m: Vec<Vec<BigRational>> = self.rows();
        for (row, bi) in m.iter_mut().zip(b) {
            row.push(bi.clone());
        }
        for col in 0..n {
            let piv = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
            m.swap(piv, col);
            let p = m[col][col].clone();
            for x in m[col].iter_mut() {
                *x = &*x / &p;
            }
            for r in 0..n {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in col..=n {
                        let sub = &f * &m[col][c];
                        m[r][c] -= sub;
                    }
                }
            }
        }
        Ok(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
    }

    pub fn inverse(&self) -> Result<RatMatrix> {
        let n = self.n;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![BigRational::zero(); n];
            e[j] = BigRational::one();
            cols.push(self.solve(&e)?);
        }
        let mut out = Self::zeros(n);
        for (j, col) in cols.into_iter().enumerate() {
            for (i, x) in col.into_iter().enumerate() {
                out.data[i * n + j] = x;
            }
        }
        Ok(out)
    }

    pub fn to_int(&self) -> Option<IntMatrix> {
        let data = rv_to_int(&self.data)?;
        IntMatrix::new(self.n, data).ok()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        rv_to_f64(&self.data)
    }
}

/// Result of [`smith_normal_form`]: `U·A·V = S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.s.dim()).map(|i| self.s.get(i, i)).collect()
    }
}

fn big_row_op(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    // row[dst] -= q * row[src]
    let src_row = m[src].clone();
    for (x, s) in m[dst].iter_mut().zip(src_row) {
        *x -= q * s;
    }
}

fn big_col_op(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let s = row[src].clone();
        row[dst] -= q * s;
    }
}

fn big_to_int(m: Vec<Vec<BigInt>>) -> Result<IntMatrix> {
    let n = m.len();
    let data = m
        .into_iter()
        .flatten()
        .map(|x| x.to_i64().ok_or(Error::Overflow))
        .collect::<Result<Vec<_>>>()?;
    IntMatrix::new(n, data)
}

/// Smith normal form with unimodular transforms. Diagonal entries are
/// nonnegative and satisfy `s_1 | s_2 | ... | s_n`; singular inputs give
/// trailing zeros.
pub fn smith_normal_form(a: &IntMatrix) -> Result<SnfResult> {
    let n = a.dim();
    let mut m = a.to_big();
    let mut u = IntMatrix::identity(n).to_big();
    let mut v = IntMatrix::identity(n).to_big();
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !m[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            m.swap(t, pi);
            u.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..n {
                let q = m[i][t].div_floor(&m[t][t]);
                big_row_op(&mut m, i, t, &q);
                big_row_op(&mut u, i, t, &q);
                clean &= m[i][t].is_zero();
            }
            for j in t + 1..n {
                let q = m[t][j].div_floor(&m[t][t]);
                big_col_op(&mut m, j, t, &q);
                big_col_op(&mut v, j, t, &q);
                clean &= m[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !(&m[i][j] % &m[t][t]).is_zero());
            match bad {
                Some((i, _)) => {
                    let minus_one = -BigInt::one();
                    big_row_op(&mut m, t, i, &minus_one);
                    big_row_op(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    Ok(SnfResult { s: big_to_int(m)?, u: big_to_int(u)?, v: big_to_int(v)? })
}

/// Classifies lattice vectors by their residue class mod `A·Z^n`, using the
/// Smith form: `x ≡ y` iff `U·x ≡ U·y` componentwise mod the diagonal.
#[derive(Clone, Debug)]
pub struct ResidueClassifier {
    u: IntMatrix,
    diag: Vec<i64>,
}

impl ResidueClassifier {
    pub fn new(a: &IntMatrix) -> Result<Self> {
        let snf = smith_normal_form(a)?;
        let diag = snf.diagonal();
        if diag.contains(&0) {
            return Err(Error::SingularMatrix);
        }
        Ok(ResidueClassifier { u: snf.u, diag })
    }

    pub fn class_of(&self, x: &[i64]) -> Result<IntVec> {
        let ux = self.u.mul_vec(x)?;
        Ok(ux.iter().zip(&self.diag).map(|(v, d)| v.rem_euclid(*d)).collect())
    }

    pub fn modulus(&self) -> u128 {
        self.diag.iter().map(|&d| d as u128).product()
    }
}

/// Canonical complete residue system: preimages of the Smith box
/// `∏ {0..s_i−1}` in the original coordinates, in lexicographic order of the
/// box coordinates.
pub fn residue_system(a: &IntMatrix) -> Result<Vec<IntVec>> {
    let snf = smith_normal_form(a)?;
    let diag = snf.diagonal();
    if diag.contains(&0) {
        return Err(Error::SingularMatrix);
    }
    let uinv = snf.u.inverse()?.to_int().ok_or(Error::Overflow)?;
    let n = a.dim();
    let mut out = Vec::new();
    let mut y = vec![0i64; n];
    loop {
        out.push(uinv.mul_vec(&y)?);
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            y[k] += 1;
            if y[k] < diag[k] {
                break;
            }
            y[k] = 0;
        }
    }
}

/// Complete residue system whose members are the minimal Euclidean norm
/// representatives of their classes (ties broken lexicographically). The
/// result is sorted by (norm, lexicographic).
pub fn reduced_residue_system(a: &IntMatrix) -> Result<Vec<IntVec>> {
    let box_reps = residue_system(a)?;
    let cls = ResidueClassifier::new(a)?;
    let radius = box_reps.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let mut pts = lattice_points_in_ball(a.dim(), radius, 10_000_000)?;
    pts.sort_by(|x, y| norm_sq(x).cmp(&norm_sq(y)).then_with(|| x.cmp(y)));
    let mut seen: HashMap<IntVec, IntVec> = HashMap::new();
    for p in pts {
        let c = cls.class_of(&p)?;
        seen.entry(c).or_insert(p);
    }
    let mut out: Vec<IntVec> = seen.into_values().collect();
    out.sort_by(|x, y| norm_sq(x).cmp(&norm_sq(y)).then_with(|| x.cmp(y)));
    Ok(out)
}

pub fn is_complete_residue_system(a: &IntMatrix, digits: &[IntVec]) -> Result<bool> {
    let cls = ResidueClassifier::new(a)?;
    if digits.len() as u128 != cls.modulus() {
        return Ok(false);
    }
    let mut seen = std::collections::HashSet::new();
    for d in digits {
        if d.len() != a.dim() {
            return Ok(false);
        }
        if !seen.insert(cls.class_of(d)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All integer points `z` with `‖z‖ ≤ radius`, in lexicographic order.
pub fn lattice_points_in_ball(n: usize, radius: f64, cap: u128) -> Result<Vec<IntVec>> {
    let r = (radius * (1.0 + 1e-12)).floor().max(0.0) as i64;
    let side = 2 * r as u128 + 1;
    let total = side.checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > cap {
        return Err(Error::CandidateBallTooLarge { points: total, cap });
    }
    let r2 = radius * radius * (1.0 + 1e-12) + 1e-9;
    let mut out = Vec::new();
    let mut z = vec![-r; n];
    loop {
        if (norm_sq(&z) as f64) <= r2 {
            out.push(z.clone());
        }
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            z[k] += 1;
            if z[k] <= r {
                break;
            }
            z[k] = -r;
        }
    }
}

/// Spectral data used to size search regions and decide similarity.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralInfo {
    pub expanding: bool,
    pub min_eig_modulus: f64,
    pub max_eig_modulus: f64,
    /// A rate in `(1, min_eig_modulus)`; 1.0 when the matrix is not expanding.
    pub rho: f64,
    /// Contraction coefficient `|det A|^{-1/n}` of `A^{-1}`, present iff
    /// `A·Aᵀ` is a scalar matrix.
    pub similarity_coeff: Option<f64>,
    /// All eigenvalues share one modulus and the characteristic polynomial is
    /// squarefree, so `A` is conjugate over R to a similarity.
    pub conformal: bool,
    /// Upper bound on `Σ_{j≥1} ‖A^{-j}‖_op`; infinite when not expanding.
    pub ball_radius_factor: f64,
    pub eigenvalues: Vec<Complex64>,
}

pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    // Durand–Kerner on the monic polynomial with coefficients c[0..=n].
    let n = coeffs.len() - 1;
    if n == 0 {
        return vec![];
    }
    let lead = coeffs[n];
    let c: Vec<f64> = coeffs.iter().map(|x| x / lead).collect();
    if n == 1 {
        return vec![Complex64::new(-c[0], 0.0)];
    }
    let eval = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
    let bound = 1.0 + c[..n].iter().map(|x| x.abs()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    z
}

fn sym_max_eig(m: &[f64], n: usize) -> f64 {
    // cyclic Jacobi on a symmetric matrix
    let mut a = m.to_vec();
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).fold(f64::MIN, f64::max)
}

/// Spectral (operator 2-) norm of a row-major float matrix.
pub fn op_norm(m: &[f64], n: usize) -> f64 {
    let mut mtm = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            mtm[i * n + j] = (0..n).map(|k| m[k * n + i] * m[k * n + j]).sum();
        }
    }
    sym_max_eig(&mtm, n).max(0.0).sqrt()
}

fn fmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                out[i * n + j] += a[i * n + k] * b[k * n + j];
            }
        }
    }
    out
}

pub const DEFAULT_TOL: f64 = 1e-9;

pub fn spectral_info(a: &IntMatrix, tol: f64) -> Result<SpectralInfo> {
    let n = a.dim();
    let det = a.det_big();
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let cp = a.char_poly();
    let cpf: Vec<f64> = cp.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let eigenvalues = poly_roots(&cpf);
    let min_mod = eigenvalues.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let max_mod = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let expanding = min_mod > 1.0 + tol;
    let absdet = det.abs().to_f64().unwrap_or(f64::INFINITY);
    let similarity_coeff = a.similarity_square().map(|_| absdet.powf(-1.0 / n as f64));
    let conformal = similarity_coeff.is_some()
        || ((max_mod - min_mod) <= tol * max_mod.max(1.0) && squarefree(&cp));

    let mut ball = f64::INFINITY;
    if expanding {
        let inv = a.inverse()?.to_f64();
        let mut pw = inv.clone();
        let mut partial = 0.0;
        for _ in 0..100_000 {
            let sigma = op_norm(&pw, n) * (1.0 + 1e-12);
            partial += sigma;
            if sigma < 1.0 {
                ball = ball.min(partial / (1.0 - sigma));
                if sigma < 1e-12 * partial.max(1.0) {
                    break;
                }
            }
            pw = fmul(&pw, &inv, n);
        }
        ball *= 1.0 + 1e-9;
    }
    Ok(SpectralInfo {
        expanding,
        min_eig_modulus: min_mod,
        max_eig_modulus: max_mod,
        rho: if expanding { (1.0 + min_mod) / 2.0 } else { 1.0 },
        similarity_coeff,
        conformal,
        ball_radius_factor: ball,
        eigenvalues,
    })
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    while r.last().is_some_and(|x| x.is_zero()) {
        r.pop();
    }
    let db = b.len() - 1;
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let f = r.last().unwrap() / b.last().unwrap();
        for (i, bi) in b.iter().enumerate() {
            let sub = &f * bi;
            r[i + shift] -= sub;
        }
        r.pop();
        while r.last().is_some_and(|x| x.is_zero()) {
            r.pop();
        }
    }
    r
}

/// True iff the polynomial has no repeated complex root (`gcd(p, p') = 1`).
pub fn squarefree(p: &[BigInt]) -> bool {
    let a: Vec<BigRational> = p.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    if a.len() <= 2 {
        return true;
    }
    let da: Vec<BigRational> =
        a.iter().enumerate().skip(1).map(|(i, x)| x * rat(i as i64)).collect();
    let (mut x, mut y) = (a, da);
    loop {
        let r = poly_rem(&x, &y);
        if r.is_empty() {
            return y.len() == 1;
        }
        x = y;
        y = r;
    }
}

/// Convenience: spectral info with [`DEFAULT_TOL`], failing unless expanding.
pub fn require_expanding(a: &IntMatrix) -> Result<SpectralInfo> {
    let info = spectral_info(a, DEFAULT_TOL)?;
    if !info.expanding {
        return Err(Error::NotExpanding);
    }
    Ok(info)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_unimodular(m: &IntMatrix) -> bool {
        m.det_big().abs() == BigInt::one()
    }

    fn check_snf(a: &IntMatrix) -> SnfResult {
        let r = smith_normal_form(a).unwrap();
        assert_eq!(r.u.mul(a).unwrap().mul(&r.v).unwrap(), r.s);
        assert!(is_unimodular(&r.u) && is_unimodular(&r.v));
        let d = r.diagonal();
        for w in d.windows(2) {
            assert!(w[0] != 0 && w[1] % w[0] == 0 || w[1] == 0);
        }
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                if i != j {
                    assert_eq!(r.s.get(i, j), 0);
                }
            }
        }
        r
    }

    #[test]
    fn snf_examples() {
        assert_eq!(check_snf(&IntMatrix::scalar(2, 2)).diagonal(), vec![2, 2]);
        assert_eq!(check_snf(&IntMatrix::gaussian(-3, 1)).diagonal(), vec![1, 10]);
        let d = check_snf(&IntMatrix::gaussian(-7, 1)).diagonal();
        assert_eq!(d[0] * d[1], 50);
        assert_eq!(check_snf(&IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]).unwrap()).diagonal(), vec![2, 4]);
        let sing = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(check_snf(&sing).diagonal(), vec![1, 0]);
        let m3 = IntMatrix::from_rows(&[vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 4]]).unwrap();
        assert_eq!(check_snf(&m3).diagonal(), vec![1, 2, 12]);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        assert_eq!(IntMatrix::gaussian(-7, 1).det().unwrap(), 50);
        assert_eq!(IntMatrix::gaussian(-3, 1).det().unwrap(), 10);
        let m = IntMatrix::from_rows(&[vec![0, 1, 2], vec![3, 0, 5], vec![1, 1, 0]]).unwrap();
        // 0*(0-5) - 1*(0-5) + 2*(3-0)
        assert_eq!(m.det().unwrap(), 11);
    }

    fn incongruent_by_solve(a: &IntMatrix, ds: &[IntVec]) -> bool {
        let inv = a.inverse().unwrap();
        for (i, x) in ds.iter().enumerate() {
            for y in &ds[i + 1..] {
                let diff = v_sub(x, y).unwrap();
                if rv_to_int(&inv.mul_int_vec(&diff)).is_some() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn residue_systems() {
        let two = IntMatrix::scalar(2, 2);
        let mut r = residue_system(&two).unwrap();
        r.sort();
        assert_eq!(r, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let g = IntMatrix::gaussian(-3, 1);
        let r = residue_system(&g).unwrap();
        assert_eq!(r.len(), 10);
        assert!(r.contains(&vec![0, 0]));
        assert!(incongruent_by_solve(&g, &r));
        assert!(is_complete_residue_system(&g, &r).unwrap());
        let ten = IntMatrix::scalar(1, 10);
        assert_eq!(residue_system(&ten).unwrap(), (0..10).map(|k| vec![k]).collect::<Vec<_>>());
        assert_eq!(
            reduced_residue_system(&ten).unwrap().into_iter().map(|v| v[0]).collect::<Vec<_>>(),
            vec![0, -1, 1, -2, 2, -3, 3, -4, 4, -5]
        );
        let red = reduced_residue_system(&g).unwrap();
        assert!(is_complete_residue_system(&g, &red).unwrap());
        assert!(red.iter().all(|v| norm_sq(v) <= 5));
        assert_eq!(red.iter().filter(|v| norm_sq(v) == 5).count(), 1);
    }

    #[test]
    fn crs_membership() {
        let g = IntMatrix::gaussian(-3, 1);
        let d: Vec<IntVec> = (0..10).map(|k| vec![k, 0]).collect();
        assert!(is_complete_residue_system(&g, &d).unwrap());
        assert!(incongruent_by_solve(&g, &d));
        let two = IntMatrix::scalar(2, 2);
        let std4 = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]];
        assert!(is_complete_residue_system(&two, &std4).unwrap());
        let bad = vec![vec![0, 0], vec![2, 0], vec![0, 1], vec![1, 1]];
        assert!(!is_complete_residue_system(&two, &bad).unwrap());
        assert!(!is_complete_residue_system(&two, &std4[..3]).unwrap());
    }

    #[test]
    fn spectral_examples() {
        let g = spectral_info(&IntMatrix::gaussian(-3, 1), DEFAULT_TOL).unwrap();
        assert!(g.expanding && g.conformal);
        assert!((g.similarity_coeff.unwrap() - 10f64.powf(-0.5)).abs() < 1e-12);
        // ‖A^{-j}‖ = 10^{-j/2}, so the sum is 1/(√10 − 1)
        let exact = 1.0 / (10f64.sqrt() - 1.0);
        assert!(g.ball_radius_factor >= exact && g.ball_radius_factor < exact * 1.0001);

        let bm = spectral_info(&IntMatrix::diag(&[7, 10]), DEFAULT_TOL).unwrap();
        assert!(bm.expanding && bm.similarity_coeff.is_none() && !bm.conformal);
        assert!((bm.min_eig_modulus - 7.0).abs() < 1e-9);

        let shear = spectral_info(&IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap(), DEFAULT_TOL).unwrap();
        assert!(!shear.expanding && shear.ball_radius_factor.is_infinite());

        let quad = spectral_info(&IntMatrix::companion(&[21, 9]).unwrap(), DEFAULT_TOL).unwrap();
        assert!(quad.expanding && quad.similarity_coeff.is_none() && quad.conformal);
        assert!((quad.min_eig_modulus - 21f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn char_poly_and_companion() {
        let c = IntMatrix::companion(&[10, 6]).unwrap();
        let p: Vec<i64> = c.char_poly().iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(p, vec![10, 6, 1]);
        assert!(squarefree(&c.char_poly()));
        assert!(!squarefree(&IntMatrix::scalar(2, 3).char_poly()));
    }

    #[test]
    fn similarity_scales_norms() {
        use rand::{Rng, SeedableRng};
        let a = IntMatrix::gaussian(-4, 1);
        let info = spectral_info(&a, DEFAULT_TOL).unwrap();
        let c = info.similarity_coeff.unwrap();
        let inv = a.inverse().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let v: IntVec = (0..2).map(|_| rng.gen_range(-1000..=1000)).collect();
            if v == vec![0, 0] {
                continue;
            }
            let w = rv_to_f64(&inv.mul_int_vec(&v));
            let lhs = (w[0] * w[0] + w[1] * w[1]) / (c * c);
            let rhs = norm(&v).powi(2);
            assert!((lhs - rhs).abs() <= 1e-9 * rhs);
        }
    }

    #[test]
    fn ball_factor_dominates_partial_sums() {
        for a in [IntMatrix::companion(&[21, 9]).unwrap(), IntMatrix::diag(&[7, 10]), IntMatrix::gaussian(-2, 1)] {
            let info = spectral_info(&a, DEFAULT_TOL).unwrap();
            let inv = a.inverse().unwrap().to_f64();
            let mut pw = inv.clone();
            let mut s = 0.0;
            for _ in 0..60 {
                s += op_norm(&pw, 2);
                assert!(info.ball_radius_factor >= s * (1.0 - 1e-12));
                pw = fmul(&pw, &inv, 2);
            }
        }
    }

    #[test]
    fn lattice_ball_counts() {
        assert_eq!(lattice_points_in_ball(2, 1.0, 100).unwrap().len(), 5);
        assert_eq!(lattice_points_in_ball(1, 2.5, 100).unwrap().len(), 5);
        assert!(matches!(lattice_points_in_ball(3, 100.0, 1000), Err(Error::CandidateBallTooLarge { .. })));
    }
}
