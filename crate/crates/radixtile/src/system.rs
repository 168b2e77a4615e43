use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::{self, norm, v_sub, IntMatrix, IntVec, RatMatrix, SpectralInfo};

/// An expanding integer matrix together with a finite set of integer digits.
///
/// Digits are kept sorted and distinct. The spectral data and the exact
/// inverse are computed once at construction.
#[derive(Clone, Debug)]
pub struct RadixSystem {
    a: IntMatrix,
    digits: Vec<IntVec>,
    spectral: SpectralInfo,
    inverse: RatMatrix,
}

impl PartialEq for RadixSystem {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.digits == other.digits
    }
}

impl RadixSystem {
    pub fn new(a: IntMatrix, digits: Vec<IntVec>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::PreconditionViolated("digit set is empty".into()));
        }
        if let Some(d) = digits.iter().find(|d| d.len() != a.dim()) {
            return Err(Error::DimensionMismatch(format!("digit {d:?} in dimension {}", a.dim())));
        }
        let set: BTreeSet<IntVec> = digits.into_iter().collect();
        let spectral = linalg::require_expanding(&a)?;
        let inverse = a.inverse()?;
        Ok(RadixSystem { a, digits: set.into_iter().collect(), spectral, inverse })
    }

    /// Scalar base on `Z`.
    pub fn scalar(base: i64, digits: &[i64]) -> Result<Self> {
        Self::new(IntMatrix::scalar(1, base), digits.iter().map(|&d| vec![d]).collect())
    }

    /// Base `re + im·i` acting on `Z[i] = Z^2`, with integer digits `d·e1`.
    pub fn gaussian(re: i64, im: i64, digits: &[i64]) -> Result<Self> {
        Self::new(IntMatrix::gaussian(re, im), digits.iter().map(|&d| vec![d, 0]).collect())
    }

    /// `A` with its canonical residue digits.
    pub fn with_residue_digits(a: IntMatrix) -> Result<Self> {
        let d = linalg::residue_system(&a)?;
        Self::new(a, d)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.a
    }

    pub fn digits(&self) -> &[IntVec] {
        &self.digits
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn spectral(&self) -> &SpectralInfo {
        &self.spectral
    }

    pub fn inverse(&self) -> &RatMatrix {
        &self.inverse
    }

    pub fn has_digit(&self, d: &[i64]) -> bool {
        self.digits.binary_search_by(|x| x.as_slice().cmp(d)).is_ok()
    }

    pub fn max_digit_norm(&self) -> f64 {
        self.digits.iter().map(|d| norm(d)).fold(0.0, f64::max)
    }

    pub fn abs_det(&self) -> u64 {
        self.a.det_big().magnitude().try_into().unwrap_or(u64::MAX)
    }

    /// `D − D`, sorted.
    pub fn difference_digits(&self) -> Result<Vec<IntVec>> {
        let mut s = BTreeSet::new();
        for x in &self.digits {
            for y in &self.digits {
                s.insert(v_sub(x, y)?);
            }
        }
        Ok(s.into_iter().collect())
    }

    /// The system `(A, D − D)`.
    pub fn difference_system(&self) -> Result<RadixSystem> {
        Ok(RadixSystem {
            a: self.a.clone(),
            digits: self.difference_digits()?,
            spectral: self.spectral.clone(),
            inverse: self.inverse.clone(),
        })
    }

    /// Same matrix, different digits.
    pub fn with_digits(&self, digits: Vec<IntVec>) -> Result<RadixSystem> {
        if digits.is_empty() || digits.iter().any(|d| d.len() != self.dim()) {
            return Err(Error::DimensionMismatch("digits must be nonempty vectors of the system's dimension".into()));
        }
        let set: BTreeSet<IntVec> = digits.into_iter().collect();
        Ok(RadixSystem {
            a: self.a.clone(),
            digits: set.into_iter().collect(),
            spectral: self.spectral.clone(),
            inverse: self.inverse.clone(),
        })
    }
}
