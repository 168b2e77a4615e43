//! Matrix number systems and self-affine digit tiles in `Z^n`.
//!
//! A [`RadixSystem`] pairs an expanding integer matrix `A` with a finite digit
//! set `D`. Its attractor is `T = { Σ_{j≥1} A^{-j} d_j : d_j ∈ D }`. The
//! modules below answer questions about that set exactly:
//!
//! - [`linalg`]: Smith normal form, residue systems, spectral bounds.
//! - [`numsys`]: digit expansions and the number-system decision.
//! - [`radix`]: eventually periodic representations, equivalence, uniqueness.
//! - [`neighbours`]: integer neighbours, neighbour graphs, triple-state graphs.
//! - [`sep`]: strong eventual periodicity for integer and set sequences.
//! - [`intersect`]: `T ∩ (T + α)`, IFS construction and dimension formulas.
//! - [`multinv`]: multiplicative invariance and digit automata.
//! - [`render`]: k-tile point clouds and PGM/PPM rasters.

pub mod epseq;
pub mod error;
pub mod intersect;
pub mod linalg;
pub mod logratio;
pub mod multinv;
pub mod neighbours;
pub mod numsys;
pub mod radix;
pub mod render;
pub mod sep;
pub mod system;

pub use epseq::EpSeq;
pub use error::{Error, Result};
pub use linalg::{IntMatrix, IntVec, RatMatrix, RatVec};
pub use logratio::LogRatio;
pub use system::RadixSystem;
