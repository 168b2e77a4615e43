//! Raster previews of k-tile approximations.
//!
//! A depth-`k` point `Σ_{j≤k} A^{-j} d_j` equals `A^{-k} z` with the integer
//! vector `z = Σ_{j≤k} A^{k−j} d_j`, so clouds store `z` and stay exact until
//! pixels are assigned.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::epseq::EpSeq;
use crate::error::{Error, Result};
use crate::linalg::{v_add, IntVec, RatMatrix, RatVec};
use crate::sep::DigitSet;
use crate::system::RadixSystem;

pub const DEFAULT_POINT_CAP: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleOptions {
    /// Largest number of points enumerated exhaustively.
    pub cap: usize,
    /// Whether to fall back to random digit strings above the cap.
    pub sampling: bool,
    pub seed: u64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { cap: DEFAULT_POINT_CAP, sampling: true, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    /// Integer numerators `z`; the points are `A^{-depth} z`.
    pub numerators: Vec<IntVec>,
    pub depth: usize,
    /// `A^{-depth}`.
    pub scale: RatMatrix,
    pub sampled: bool,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn point(&self, i: usize) -> RatVec {
        self.scale.mul_int_vec(&self.numerators[i])
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        let n = self.scale.dim();
        let m = self.scale.to_f64();
        self.numerators.iter().map(|z| (0..n).map(|i| (0..n).map(|j| m[i * n + j] * z[j] as f64).sum()).collect()).collect()
    }
}

fn layer<'a>(sys: &'a RadixSystem, filter: Option<&'a EpSeq<DigitSet>>, j: usize) -> &'a [IntVec] {
    match filter {
        Some(f) => f.at(j),
        None => sys.digits(),
    }
}

/// All depth-`k` partial sums, with digits drawn from `filter_j` when a
/// filter is given.
pub fn ktile_points(sys: &RadixSystem, k: usize, filter: Option<&EpSeq<DigitSet>>, opts: &SampleOptions) -> Result<PointCloud> {
    let total: u128 = (0..k).map(|j| layer(sys, filter, j).len() as u128).product();
    let a = sys.matrix();
    let scale = sys.inverse().pow(k as u64);
    if total <= opts.cap as u128 {
        let mut zs = vec![vec![0; sys.dim()]];
        for j in 0..k {
            let mut next = Vec::with_capacity(zs.len() * layer(sys, filter, j).len());
            for z in &zs {
                let az = a.mul_vec(z)?;
                for d in layer(sys, filter, j) {
                    next.push(v_add(&az, d)?);
                }
            }
            zs = next;
        }
        let set: BTreeSet<IntVec> = zs.into_iter().collect();
        return Ok(PointCloud { numerators: set.into_iter().collect(), depth: k, scale, sampled: false });
    }
    if !opts.sampling {
        return Err(Error::DepthTooLarge { depth: k, points: total, cap: opts.cap as u128 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut set = BTreeSet::new();
    for _ in 0..opts.cap {
        let mut z = vec![0; sys.dim()];
        for j in 0..k {
            let ds = layer(sys, filter, j);
            z = v_add(&a.mul_vec(&z)?, &ds[rng.gen_range(0..ds.len())])?;
        }
        set.insert(z);
    }
    Ok(PointCloud { numerators: set.into_iter().collect(), depth: k, scale, sampled: true })
}

/// Axis-aligned box `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl BBox {
    /// Bounds of the points padded by 5% per side.
    pub fn around(points: &[Vec<f64>]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let coord = |p: &Vec<f64>, i: usize| p.get(i).copied().unwrap_or(0.0);
        let fold = |i: usize| points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(coord(p, i)), hi.max(coord(p, i))));
        let (x0, x1) = fold(0);
        let (y0, y1) = fold(1);
        let span = (x1 - x0).max(y1 - y0).max(1e-12);
        let (px, py) = (0.05 * (x1 - x0).max(span * 1e-3), 0.05 * (y1 - y0).max(span * 1e-3));
        Ok(BBox { x0: x0 - px, x1: x1 + px, y0: y0 - py, y1: y1 + py })
    }

    fn pixel(&self, p: &[f64], width: usize, height: usize) -> Option<(usize, usize)> {
        let x = p.first().copied().unwrap_or(0.0);
        let y = p.get(1).copied().unwrap_or(0.0);
        if x < self.x0 || x > self.x1 || y < self.y0 || y > self.y1 {
            return None;
        }
        let c = (((x - self.x0) / (self.x1 - self.x0)) * width as f64).floor() as usize;
        let r = (((y - self.y0) / (self.y1 - self.y0)) * height as f64).floor() as usize;
        Some((c.min(width - 1), height - 1 - r.min(height - 1)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    /// 1 (grey) or 3 (RGB).
    pub channels: usize,
    pub pixels: Vec<u8>,
    pub bbox: BBox,
}

impl RasterImage {
    fn blank(width: usize, height: usize, channels: usize, bbox: BBox) -> Self {
        RasterImage { width, height, channels, pixels: vec![0; width * height * channels], bbox }
    }

    /// Binary PGM (`P5`) or PPM (`P6`) bytes.
    pub fn to_pnm(&self) -> Vec<u8> {
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        let mut out = format!("{magic}\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn lit_pixels(&self) -> usize {
        self.pixels.chunks(self.channels).filter(|p| p.iter().any(|&b| b > 0)).count()
    }
}

/// Grey raster of one or more clouds (first two coordinates).
pub fn rasterize(clouds: &[&PointCloud], width: usize, height: usize, bbox: Option<BBox>) -> Result<RasterImage> {
    if width == 0 || height == 0 {
        return Err(Error::PreconditionViolated("image must have positive size".into()));
    }
    let pts: Vec<Vec<f64>> = clouds.iter().flat_map(|c| c.to_f64()).collect();
    let bbox = match bbox {
        Some(b) => b,
        None => BBox::around(&pts)?,
    };
    if pts.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let mut img = RasterImage::blank(width, height, 1, bbox);
    for p in &pts {
        if let Some((c, r)) = bbox.pixel(p, width, height) {
            img.pixels[r * width + c] = 255;
        }
    }
    Ok(img)
}

/// `T` in red, `T + shift` in green; pixels covered by both are white.
/// Returns the image and the number of shared pixels.
pub fn render_overlap(sys: &RadixSystem, shift: &[i64], k: usize, width: usize, height: usize, opts: &SampleOptions) -> Result<(RasterImage, usize)> {
    if shift.len() != sys.dim() {
        return Err(Error::DimensionMismatch("shift length differs from the system dimension".into()));
    }
    let base = ktile_points(sys, k, None, opts)?;
    let mut ak = crate::linalg::IntMatrix::identity(sys.dim());
    for _ in 0..k {
        ak = ak.mul(sys.matrix())?;
    }
    let offset = ak.mul_vec(shift)?;
    let moved = PointCloud {
        numerators: base.numerators.iter().map(|z| v_add(z, &offset)).collect::<Result<_>>()?,
        ..base.clone()
    };
    let (p, q) = (base.to_f64(), moved.to_f64());
    let all: Vec<Vec<f64>> = p.iter().chain(&q).cloned().collect();
    let bbox = BBox::around(&all)?;
    let mut img = RasterImage::blank(width, height, 3, bbox);
    for (pts, ch) in [(&p, 0usize), (&q, 1)] {
        for x in pts {
            if let Some((c, r)) = bbox.pixel(x, width, height) {
                img.pixels[(r * width + c) * 3 + ch] = 255;
            }
        }
    }
    let mut shared = 0;
    for px in img.pixels.chunks_mut(3) {
        if px[0] == 255 && px[1] == 255 {
            px[2] = 255;
            shared += 1;
        }
    }
    Ok((img, shared))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_frac;
    use crate::sep::make_set;

    #[test]
    fn cantor_stage() {
        let sys = RadixSystem::scalar(3, &[0, 2]).unwrap();
        let c = ktile_points(&sys, 3, None, &SampleOptions::default()).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(c.point(1), vec![rat_frac(2, 27)]);
        assert_eq!(c.point(7), vec![rat_frac(26, 27)]);
    }

    #[test]
    fn filtered_counts() {
        let sys = RadixSystem::gaussian(-3, 1, &[0, 4, 8]).unwrap();
        let ax = |xs: &[i64]| make_set(xs.iter().map(|&x| vec![x, 0]));
        let f = EpSeq::new(vec![ax(&[0, 4]), ax(&[0])], vec![ax(&[0, 4, 8]), ax(&[8])]).unwrap();
        assert_eq!(ktile_points(&sys, 4, Some(&f), &SampleOptions::default()).unwrap().len(), 6);
    }

    #[test]
    fn sampling_fallback_is_deterministic() {
        let sys = RadixSystem::scalar(10, &(0..10).collect::<Vec<_>>()).unwrap();
        let opts = SampleOptions { cap: 50, sampling: true, seed: 7 };
        let a = ktile_points(&sys, 6, None, &opts).unwrap();
        assert!(a.sampled && a.len() <= 50);
        assert_eq!(a, ktile_points(&sys, 6, None, &opts).unwrap());
        let strict = SampleOptions { sampling: false, ..opts };
        assert!(matches!(ktile_points(&sys, 6, None, &strict), Err(Error::DepthTooLarge { .. })));
    }

    #[test]
    fn rasters() {
        let sys = RadixSystem::scalar(3, &[0]).unwrap();
        let c = ktile_points(&sys, 2, None, &SampleOptions::default()).unwrap();
        let img = rasterize(&[&c], 9, 9, None).unwrap();
        assert_eq!(img.lit_pixels(), 1);
        assert!(img.to_pnm().starts_with(b"P5\n9 9\n255\n"));
        let dec = RadixSystem::scalar(10, &(0..10).collect::<Vec<_>>()).unwrap();
        let c = ktile_points(&dec, 3, None, &SampleOptions::default()).unwrap();
        let img = rasterize(&[&c], 64, 8, None).unwrap();
        let rows: BTreeSet<usize> = (0..img.pixels.len()).filter(|&i| img.pixels[i] > 0).map(|i| i / 64).collect();
        assert_eq!(rows.len(), 1);
        assert!(img.lit_pixels() > 55);
        let empty = PointCloud { numerators: vec![], ..c };
        assert_eq!(rasterize(&[&empty], 4, 4, None), Err(Error::EmptyCloud));
    }

    #[test]
    fn overlap_of_neighbours() {
        let sys = RadixSystem::gaussian(-3, 1, &(0..10).collect::<Vec<_>>()).unwrap();
        let (img, shared) = render_overlap(&sys, &[1, 0], 5, 128, 128, &SampleOptions::default()).unwrap();
        assert!(shared > 0);
        assert_eq!(img.to_pnm(), render_overlap(&sys, &[1, 0], 5, 128, 128, &SampleOptions::default()).unwrap().0.to_pnm());
    }
}
