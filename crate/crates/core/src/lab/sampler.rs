//! Seeded sample streams.
//!
//! Every stream is a ChaCha8 generator keyed by `(seed, stream id)`, so a
//! worker handling chunk `i` of a sweep draws exactly the samples a
//! single-threaded run would, and reports merge in chunk order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::norms::{weighted_norm, NormSpec};
use crate::spectral::{Grid, SpectralField};
use crate::{Error, Result};

/// Generator for stream `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw on `[lo, hi]`.
pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Random real band-limited fields: independent standard complex Gaussian
/// coefficients on every integer wavevector with `max_i |k_i| ≤ band`,
/// completed by Hermitian symmetry (the zero mode is real).
///
/// Wavevectors are drawn in lexicographic order over `[-band, band]^n`, so
/// the same seed produces the same function on every grid that resolves
/// the band. This is what makes `N → 2N` refinement studies meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSampler {
    pub grid: Grid,
    pub band: usize,
    /// If set, each sample is rescaled to this `H²` norm.
    pub h2_norm: Option<f64>,
}

impl FieldSampler {
    pub fn new(grid: Grid, band: usize) -> Result<Self> {
        if band == 0 || band >= grid.points_per_dim() / 2 {
            return Err(Error::InvalidParameter(format!(
                "band {band} must lie in 1..{}",
                grid.points_per_dim() / 2
            )));
        }
        Ok(Self {
            grid,
            band,
            h2_norm: None,
        })
    }

    pub fn normalized(mut self, h2_norm: f64) -> Self {
        self.h2_norm = Some(h2_norm);
        self
    }

    pub fn sample(&self, rng: &mut impl Rng) -> SpectralField {
        let g = self.grid;
        let dim = g.dim();
        let b = self.band as i64;
        let mut coeffs = vec![Complex64::default(); g.len()];
        let side = (2 * b + 1) as usize;
        for lin in 0..side.pow(dim as u32) {
            let mut k = [0i64; 3];
            let mut rest = lin;
            for axis in (0..dim).rev() {
                k[axis] = (rest % side) as i64 - b;
                rest /= side;
            }
            // canonical half: first nonzero component positive
            let first = k[..dim].iter().find(|&&v| v != 0).copied().unwrap_or(0);
            if first < 0 {
                continue;
            }
            let idx: Vec<usize> = k[..dim].iter().map(|&v| g.index_of(v)).collect();
            let neg: Vec<usize> = k[..dim].iter().map(|&v| g.index_of(-v)).collect();
            let (a, c) = (g.flatten(&idx), g.flatten(&neg));
            let re: f64 = rng.sample(StandardNormal);
            if a == c {
                coeffs[a] = Complex64::new(re, 0.0);
            } else {
                let im: f64 = rng.sample(StandardNormal);
                coeffs[a] = Complex64::new(re, im);
                coeffs[c] = Complex64::new(re, -im);
            }
        }
        let field = SpectralField::from_parts(g, coeffs);
        match self.h2_norm {
            Some(target) => {
                let n = weighted_norm(&field, NormSpec::sobolev(2.0)).unwrap_or(1.0);
                field.scale(target / n)
            }
            None => field,
        }
    }
}
