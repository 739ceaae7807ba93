use num_complex::Complex64;
use rustfft::FftDirection;

use super::fft::fft_nd;
use super::{Grid, SpectralField};
use crate::{Error, Result};

/// Samples the trigonometric polynomial with coefficients `c` on an
/// `m`-point-per-axis grid (origin at the box corner; translation does not
/// affect coefficient products).
fn padded_samples(c: &SpectralField, m: usize) -> Vec<Complex64> {
    let grid = c.grid();
    let dim = grid.dim();
    let mut data = vec![Complex64::default(); m.pow(dim as u32)];
    for (flat, v) in c.coeffs().iter().enumerate() {
        if *v == Complex64::default() {
            continue;
        }
        let k = grid.wavevector(flat);
        let target = k[..dim]
            .iter()
            .fold(0, |acc, &ki| acc * m + ki.rem_euclid(m as i64) as usize);
        data[target] = *v;
    }
    fft_nd(&mut data, m, dim, FftDirection::Inverse);
    data
}

/// Forward transform of padded samples, truncated back to `grid`.
fn truncate_from_samples(mut data: Vec<Complex64>, m: usize, grid: &Grid) -> SpectralField {
    let dim = grid.dim();
    fft_nd(&mut data, m, dim, FftDirection::Forward);
    let norm = 1.0 / data.len() as f64;
    let coeffs = (0..grid.len())
        .map(|flat| {
            let k = grid.wavevector(flat);
            let src = k[..dim]
                .iter()
                .fold(0, |acc, &ki| acc * m + ki.rem_euclid(m as i64) as usize);
            data[src] * norm
        })
        .collect();
    SpectralField::from_parts(*grid, coeffs)
}

/// Padded points per axis for an exact `p`-fold product: `(p+1)/2 · N`.
pub fn padded_points(grid: &Grid, p: u32) -> usize {
    (p as usize).div_ceil(2) * grid.points_per_dim()
}

/// Coefficients of `u^p` with no aliasing on the retained modes.
///
/// The input is zero-padded by `(p+1)/2` per axis, raised to the `p`-th
/// power pointwise, and truncated back. With `M = (p+1)N/2` every product
/// mode `q ∈ [-pN/2, p(N/2-1)]` satisfies `q ± M ∉ [-N/2, N/2)`, so the
/// result equals the `p`-fold cyclic-free convolution truncated to the grid.
pub fn dealiased_power(c: &SpectralField, p: u32) -> Result<SpectralField> {
    if p == 0 || p.is_multiple_of(2) {
        return Err(Error::EvenPower(p));
    }
    if p == 1 {
        return Ok(c.clone());
    }
    let m = padded_points(c.grid(), p);
    let mut data = padded_samples(c, m);
    for v in data.iter_mut() {
        *v = v.powu(p);
    }
    Ok(truncate_from_samples(data, m, c.grid()))
}

/// `∫ u^q dx` over the box for the trigonometric polynomial `u`, computed
/// exactly (up to roundoff) on a grid fine enough that no product mode
/// aliases onto the zero frequency.
pub fn integral_of_power(c: &SpectralField, q: u32) -> f64 {
    let grid = c.grid();
    let n = grid.points_per_dim();
    let nyquist_free = c
        .coeffs()
        .iter()
        .enumerate()
        .all(|(flat, v)| !grid.is_nyquist(flat) || v.norm() == 0.0);
    // Without the -N/2 mode, |q·k| ≤ q(N/2 - 1) < qN/2.
    let mut m = (q as usize * n / 2).max(n);
    if !nyquist_free {
        m += 2;
    }
    let data = padded_samples(c, m);
    let mean: f64 = data.iter().map(|v| v.powu(q).re).sum::<f64>() / data.len() as f64;
    grid.volume() * mean
}

/// `w = F⁻¹(|ĉ|)`: replaces every coefficient by its modulus. For real
/// fields the moduli are even in `k`, so the result is again Hermitian.
pub fn modulus_majorant(c: &SpectralField) -> SpectralField {
    SpectralField::from_parts(
        *c.grid(),
        c.coeffs()
            .iter()
            .map(|v| Complex64::new(v.norm(), 0.0))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn first_power_is_identity() {
        let g = Grid::new(1, 16, TAU).unwrap();
        let c = SpectralField::cosine_mode(g, &[3], 0.7).unwrap();
        assert_eq!(dealiased_power(&c, 1).unwrap(), c);
    }

    #[test]
    fn cube_of_cosine() {
        let g = Grid::new(1, 16, TAU).unwrap();
        let c = SpectralField::cosine_mode(g, &[1], 1.0).unwrap();
        let cube = dealiased_power(&c, 3).unwrap();
        // cos³x = (3cos x + cos 3x)/4
        let expected = SpectralField::cosine_mode(g, &[1], 0.75)
            .unwrap()
            .add_scaled(1.0, &SpectralField::cosine_mode(g, &[3], 0.25).unwrap())
            .unwrap();
        for (a, b) in cube.coeffs().iter().zip(expected.coeffs()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn even_powers_are_rejected() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let c = SpectralField::zeros(g);
        assert!(matches!(dealiased_power(&c, 2), Err(Error::EvenPower(2))));
        assert!(matches!(dealiased_power(&c, 0), Err(Error::EvenPower(0))));
    }

    #[test]
    fn integral_of_cos_powers() {
        let g = Grid::new(1, 16, TAU).unwrap();
        let c = SpectralField::cosine_mode(g, &[1], 1.0).unwrap();
        // ∫cos² = L/2, ∫cos⁴ = 3L/8
        assert!((integral_of_power(&c, 2) - TAU / 2.0).abs() < 1e-13);
        assert!((integral_of_power(&c, 4) - 3.0 * TAU / 8.0).abs() < 1e-13);
    }

    #[test]
    fn majorant_leaves_nonnegative_coefficients() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let c = SpectralField::cosine_mode(g, &[1, 2], 3.0).unwrap();
        assert_eq!(modulus_majorant(&c), c);
        let neg = c.scale(-1.0);
        assert_eq!(modulus_majorant(&neg), c);
    }
}
