//! Slow reference implementations used to verify the fast paths.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::spectral::{RealField, SpectralField};
use crate::Grid;

/// `c_k = N^{−n} Σ_j f(x_j) e^{−iξ_k·x_j}` by direct summation over the
/// physical coordinates (centered box), `O(N^{2n})`.
pub fn naive_forward(f: &RealField) -> SpectralField {
    let grid = *f.grid();
    let dim = grid.dim();
    let points: Vec<[f64; 3]> = (0..grid.len()).map(|j| grid.point(j)).collect();
    let step = grid.frequency_step();
    let norm = 1.0 / grid.len() as f64;
    let coeffs = (0..grid.len())
        .map(|flat| {
            let k = grid.wavevector(flat);
            let sum: Complex64 = points
                .iter()
                .zip(f.values())
                .map(|(x, &v)| {
                    let phase: f64 = (0..dim).map(|a| k[a] as f64 * step * x[a]).sum();
                    Complex64::from_polar(v, -phase)
                })
                .sum();
            sum * norm
        })
        .collect();
    SpectralField::new(grid, coeffs).expect("finite input")
}

type Sparse = HashMap<[i64; 3], Complex64>;

fn to_sparse(c: &SpectralField) -> Sparse {
    let grid = c.grid();
    c.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(flat, v)| (grid.wavevector(flat), *v))
        .collect()
}

fn convolve(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (ka, va) in a {
        for (kb, vb) in b {
            let k = [ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]];
            *out.entry(k).or_default() += va * vb;
        }
    }
    out
}

fn truncate(grid: &Grid, s: &Sparse) -> SpectralField {
    let half = (grid.points_per_dim() / 2) as i64;
    let dim = grid.dim();
    let mut coeffs = vec![Complex64::default(); grid.len()];
    for (k, v) in s {
        if k[..dim].iter().all(|&ki| (-half..half).contains(&ki)) {
            let idx: Vec<usize> = k[..dim].iter().map(|&ki| grid.index_of(ki)).collect();
            coeffs[grid.flatten(&idx)] = *v;
        }
    }
    SpectralField::new(*grid, coeffs).expect("finite input")
}

/// Coefficients of `u^p` by repeated exact (non-cyclic) convolution over
/// integer wavevectors, truncated to the grid at the end.
pub fn naive_power(c: &SpectralField, p: u32) -> SpectralField {
    let base = to_sparse(c);
    let mut acc = base.clone();
    for _ in 1..p {
        acc = convolve(&acc, &base);
    }
    truncate(c.grid(), &acc)
}

/// `N_p(v) = v^p − cosh(σ|D|)[(sech(σ|D|)v)^p]` by exact convolution,
/// with the weights applied per wavevector.
pub fn naive_np_residual(v: &SpectralField, sigma: f64, p: u32) -> SpectralField {
    let grid = *v.grid();
    let step = grid.frequency_step();
    let xi = |k: &[i64; 3]| (k.iter().map(|&ki| (ki as f64 * step).powi(2)).sum::<f64>()).sqrt();
    let base = to_sparse(v);
    let damped: Sparse = base
        .iter()
        .map(|(k, c)| (*k, c / (sigma * xi(k)).cosh()))
        .collect();
    let (mut plain, mut lifted) = (base.clone(), damped.clone());
    for _ in 1..p {
        plain = convolve(&plain, &base);
        lifted = convolve(&lifted, &damped);
    }
    let mut diff = Sparse::new();
    for (k, c) in &plain {
        *diff.entry(*k).or_default() += c;
    }
    for (k, c) in &lifted {
        *diff.entry(*k).or_default() -= c * (sigma * xi(k)).cosh();
    }
    truncate(&grid, &diff)
}
