use num_complex::Complex64;
use rustfft::FftDirection;

use super::fft::fft_nd;
use super::Grid;
use crate::{Error, Result};

/// Relative tolerance for the Hermitian-symmetry check in [`inverse_transform`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Real samples of a function on the grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every grid point; `f` receives `n` coordinates.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let dim = grid.dim();
        let values = (0..grid.len())
            .map(|flat| f(&grid.point(flat)[..dim]))
            .collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Riemann-sum L² norm, `(Σ|f|² hⁿ)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let cell = self.grid.spacing().powi(self.grid.dim() as i32);
        (self.values.iter().map(|v| v * v).sum::<f64>() * cell).sqrt()
    }

    /// Largest magnitude on the box faces (`x_i = -L/2` for some axis)
    /// relative to the global maximum. Zero for the zero field.
    pub fn boundary_ratio(&self) -> f64 {
        let max = self.max_abs();
        if max == 0.0 {
            return 0.0;
        }
        let dim = self.grid.dim();
        let edge = (0..self.grid.len())
            .filter(|&flat| self.grid.unflatten(flat)[..dim].contains(&0))
            .fold(0.0f64, |m, flat| m.max(self.values[flat].abs()));
        edge / max
    }
}

/// Discrete Fourier coefficients on a grid.
///
/// Normalization: `c_k = N^{-n} Σ_j f(x_j) e^{-iξ_k·x_j}` with the physical
/// points `x_j` of [`Grid::coordinate`], so a real function reads back as
/// `f(x) = Σ_k c_k e^{iξ_k·x}` and Parseval takes the form
/// `Σ_j |f_j|² hⁿ = Lⁿ Σ_k |c_k|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        if let Some(index) = coeffs
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, coeffs })
    }

    pub(crate) fn from_parts(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self { grid, coeffs }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    /// `amplitude · cos(k·x)`: coefficient `amplitude/2` at `±k`
    /// (or `amplitude` at `k = 0`).
    pub fn cosine_mode(grid: Grid, k: &[i64], amplitude: f64) -> Result<Self> {
        if k.len() != grid.dim() {
            return Err(Error::InvalidParameter(format!(
                "wavevector has {} components, grid has dimension {}",
                k.len(),
                grid.dim()
            )));
        }
        let half = (grid.points_per_dim() / 2) as i64;
        if k.iter().any(|&ki| ki.abs() >= half) {
            return Err(Error::InvalidParameter(format!(
                "wavevector {k:?} not strictly below Nyquist {half}"
            )));
        }
        let mut field = Self::zeros(grid);
        let idx: Vec<usize> = k.iter().map(|&ki| grid.index_of(ki)).collect();
        let neg: Vec<usize> = k.iter().map(|&ki| grid.index_of(-ki)).collect();
        let (a, b) = (grid.flatten(&idx), grid.flatten(&neg));
        if a == b {
            field.coeffs[a] = Complex64::new(amplitude, 0.0);
        } else {
            field.coeffs[a] = Complex64::new(0.5 * amplitude, 0.0);
            field.coeffs[b] = Complex64::new(0.5 * amplitude, 0.0);
        }
        Ok(field)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at integer wavevector `k` (mod N per axis).
    pub fn at(&self, k: &[i64]) -> Complex64 {
        let idx: Vec<usize> = k.iter().map(|&ki| self.grid.index_of(ki)).collect();
        self.coeffs[self.grid.flatten(&idx)]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Quadrature L² norm `(Lⁿ Σ|c_k|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.volume() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Largest violation of `c(-k) = conj(c(k))`, relative to the largest
    /// coefficient, together with the index where it occurs.
    pub fn hermitian_defect(&self) -> (usize, f64) {
        let scale = self.max_abs();
        if scale == 0.0 {
            return (0, 0.0);
        }
        let mut worst = (0, 0.0);
        for (flat, c) in self.coeffs.iter().enumerate() {
            let conj = self.coeffs[self.grid.conjugate_index(flat)];
            let d = (c - conj.conj()).norm() / scale;
            if d > worst.1 {
                worst = (flat, d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect().1 <= tol
    }

    /// Copy with every mode touching the unpaired `-N/2` frequency zeroed.
    pub fn without_nyquist(&self) -> Self {
        let mut out = self.clone();
        for (flat, c) in out.coeffs.iter_mut().enumerate() {
            if self.grid.is_nyquist(flat) {
                *c = Complex64::default();
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_parts(self.grid, self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, factor: f64, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self::from_parts(
            self.grid,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b * factor)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(-1.0, other)
    }

    /// Moduli `|c_k|` as a real-valued spectrum.
    pub fn moduli(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm()).collect()
    }
}

/// Sign `e^{iπΣk}` relating the DFT of samples to coefficients on the
/// centered box.
fn centering_sign(grid: &Grid, flat: usize) -> f64 {
    let k = grid.wavevector(flat);
    if k.iter().sum::<i64>().rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Unitary-normalized forward transform (see [`SpectralField`]).
pub fn forward_transform(f: &RealField) -> SpectralField {
    let grid = *f.grid();
    let mut data: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(
        &mut data,
        grid.points_per_dim(),
        grid.dim(),
        FftDirection::Forward,
    );
    let norm = 1.0 / grid.len() as f64;
    for (flat, c) in data.iter_mut().enumerate() {
        *c *= norm * centering_sign(&grid, flat);
    }
    SpectralField::from_parts(grid, data)
}

/// Inverse of [`forward_transform`]. Rejects coefficients whose Hermitian
/// defect exceeds [`HERMITIAN_TOL`], since they cannot come from a real field.
pub fn inverse_transform(c: &SpectralField) -> Result<RealField> {
    let (index, mismatch) = c.hermitian_defect();
    if mismatch > HERMITIAN_TOL {
        return Err(Error::NotHermitian { index, mismatch });
    }
    let grid = *c.grid();
    let mut data: Vec<Complex64> = c
        .coeffs()
        .iter()
        .enumerate()
        .map(|(flat, v)| v * centering_sign(&grid, flat))
        .collect();
    fft_nd(
        &mut data,
        grid.points_per_dim(),
        grid.dim(),
        FftDirection::Inverse,
    );
    RealField::new(grid, data.into_iter().map(|v| v.re).collect())
}
