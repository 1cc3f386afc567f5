//! Stratified point sampling for sup-type estimators.
//!
//! A sample of size `s` over a bounded region consists of a deterministic
//! grid of about `ceil(s / 2)` points followed by `floor(s / 2)` seeded
//! uniform draws. Declared discontinuity loci get extra grid points at half
//! the grid spacing. Pairs are formed from consecutive indices, mirrored grid
//! indices `(i, g - 1 - i)` reaching across the region, and seeded random
//! index pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spaces::{DomainSpec, Point};

/// Half-width, in grid spacings, of the refined band around a locus.
const REFINE_BAND: usize = 4;

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A fixed set of sample points with the index pairs drawn from them.
#[derive(Debug, Clone)]
pub struct Sample {
    pub points: Vec<Point>,
    pub pairs: Vec<(usize, usize)>,
}

/// Draws a stratified sample of `samples` points (plus refinement points)
/// from `region`.
///
/// `loci` are coordinate-0 positions where the sampled map is discontinuous.
pub fn stratified(region: &DomainSpec, samples: usize, seed: u64, loci: &[f64]) -> Result<Sample> {
    region.validate()?;
    let (lo, hi) = region
        .bounding_box()
        .ok_or_else(|| Error::Config("sampling needs a bounded region or an explicit sampling box".into()))?;
    if samples < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    let dim = lo.len();
    let grid_target = samples.div_ceil(2);
    let per_axis = ((grid_target as f64).powf(1.0 / dim as f64).floor() as usize).max(2);

    let mut points = Vec::with_capacity(samples + 4 * REFINE_BAND * loci.len());
    let mut idx = vec![0usize; dim];
    'grid: loop {
        let coords = idx
            .iter()
            .zip(lo.iter().zip(&hi))
            .map(|(&k, (l, h))| l + (h - l) * k as f64 / (per_axis - 1) as f64)
            .collect();
        points.push(region.project(&Point::new(coords)?));
        // odometer over the grid indices, last axis fastest
        for axis in (0..dim).rev() {
            idx[axis] += 1;
            if idx[axis] < per_axis {
                continue 'grid;
            }
            idx[axis] = 0;
        }
        break;
    }
    let grid_len = points.len();

    if dim == 1 {
        let span = hi[0] - lo[0];
        let h = span / (per_axis - 1) as f64;
        let mut refined = Vec::new();
        for &locus in loci {
            if locus < lo[0] || locus > hi[0] {
                continue;
            }
            refined.push(locus);
            for j in 1..=(2 * REFINE_BAND) {
                let off = 0.5 * h * j as f64;
                for v in [locus - off, locus + off] {
                    if v >= lo[0] && v <= hi[0] {
                        refined.push(v);
                    }
                }
            }
        }
        refined.sort_by(f64::total_cmp);
        refined.dedup();
        for v in refined {
            points.push(Point::new(vec![v])?);
        }
    }

    let mut rng = rng(seed);
    for _ in 0..samples / 2 {
        let coords: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| if h > l { rng.random_range(*l..=*h) } else { *l })
            .collect();
        points.push(region.project(&Point::new(coords)?));
    }

    let n = points.len();
    let mut pairs: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    pairs.extend((0..grid_len / 2).map(|i| (i, grid_len - 1 - i)));
    for _ in 0..n {
        pairs.push((rng.random_range(0..n), rng.random_range(0..n)));
    }
    Ok(Sample { points, pairs })
}
