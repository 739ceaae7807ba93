use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform periodic box `[-L/2, L/2)^n` with `N` points per axis.
///
/// Flat storage is row-major (last axis fastest). Along each axis the
/// spectral index `i` carries the integer wavenumber `k = i` for `i < N/2`
/// and `k = i - N` otherwise, so per-axis frequency order is
/// `0, 1, …, N/2-1, -N/2, …, -1` and the angular frequency is `ξ = 2πk/L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points_per_dim: usize,
    box_length: f64,
}

impl Grid {
    pub fn new(dim: usize, points_per_dim: usize, box_length: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if points_per_dim < 8 || !points_per_dim.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points per dimension must be even and >= 8, got {points_per_dim}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        Ok(Self {
            dim,
            points_per_dim,
            box_length,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.points_per_dim as f64
    }

    /// Total number of grid points, `N^n`.
    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `L^n`, the measure of the box.
    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    /// Spacing of the angular frequency lattice, `2π/L`.
    pub fn frequency_step(&self) -> f64 {
        TAU / self.box_length
    }

    /// Per-axis Nyquist frequency `πN/L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.points_per_dim as f64 / self.box_length
    }

    /// Integer wavenumber of per-axis spectral index `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.points_per_dim;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Per-axis spectral index holding integer wavenumber `k` (taken mod N).
    pub fn index_of(&self, k: i64) -> usize {
        k.rem_euclid(self.points_per_dim as i64) as usize
    }

    /// Angular frequencies of one axis in storage order.
    pub fn frequencies(&self) -> Vec<f64> {
        let step = self.frequency_step();
        (0..self.points_per_dim)
            .map(|i| self.wavenumber(i) as f64 * step)
            .collect()
    }

    /// Physical coordinate of per-axis point index `j`.
    pub fn coordinate(&self, j: usize) -> f64 {
        -0.5 * self.box_length + j as f64 * self.spacing()
    }

    /// Per-axis indices of flat index `flat`, padded with zeros past `dim`.
    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let n = self.points_per_dim;
        let mut idx = [0usize; 3];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            idx[axis] = rest % n;
            rest /= n;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter()
            .take(self.dim)
            .fold(0, |acc, &i| acc * self.points_per_dim + i)
    }

    /// Integer wavevector at flat spectral index.
    pub fn wavevector(&self, flat: usize) -> [i64; 3] {
        let idx = self.unflatten(flat);
        let mut k = [0i64; 3];
        for axis in 0..self.dim {
            k[axis] = self.wavenumber(idx[axis]);
        }
        k
    }

    /// `|ξ|²` at every flat spectral index.
    pub fn xi_squared(&self) -> Vec<f64> {
        let step = self.frequency_step();
        (0..self.len())
            .map(|flat| {
                let k = self.wavevector(flat);
                k.iter().map(|&ki| (ki as f64 * step).powi(2)).sum()
            })
            .collect()
    }

    /// `|ξ|` at every flat spectral index.
    pub fn xi_abs(&self) -> Vec<f64> {
        self.xi_squared().into_iter().map(f64::sqrt).collect()
    }

    /// Largest `|ξ|` present on the grid (the corner mode for n ≥ 2).
    pub fn xi_max(&self) -> f64 {
        (self.dim as f64).sqrt() * self.nyquist()
    }

    /// True when any axis sits on the unpaired `-N/2` mode.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let half = self.points_per_dim / 2;
        self.unflatten(flat)[..self.dim].contains(&half)
    }

    /// Flat index of the mode `-k` (mod N per axis).
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let n = self.points_per_dim;
        let idx = self.unflatten(flat);
        let mut conj = [0usize; 3];
        for axis in 0..self.dim {
            conj[axis] = (n - idx[axis]) % n;
        }
        self.flatten(&conj[..self.dim])
    }

    /// Physical coordinates of flat point index.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.coordinate(idx[axis]);
        }
        x
    }

    /// Same box and dimension with a different resolution.
    pub fn with_points(&self, points_per_dim: usize) -> Result<Self> {
        Self::new(self.dim, points_per_dim, self.box_length)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_pi_box_has_integer_frequencies() {
        let g = Grid::new(1, 8, TAU).unwrap();
        let mut f = g.frequencies();
        f.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(f, vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn tensor_grid_counts() {
        let g = Grid::new(2, 16, TAU).unwrap();
        assert_eq!(g.len(), 256);
        let mut f = g.frequencies();
        f.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(f.first(), Some(&-8.0));
        assert_eq!(f.last(), Some(&7.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Grid::new(1, 7, 1.0).is_err());
        assert!(Grid::new(1, 6, 1.0).is_err());
        assert!(Grid::new(1, 8, 0.0).is_err());
        assert!(Grid::new(1, 8, -1.0).is_err());
        assert!(Grid::new(0, 8, 1.0).is_err());
        assert!(Grid::new(4, 8, 1.0).is_err());
    }

    #[test]
    fn flat_index_round_trip_and_conjugates() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        for flat in 0..g.len() {
            let idx = g.unflatten(flat);
            assert_eq!(g.flatten(&idx[..3]), flat);
            let c = g.conjugate_index(flat);
            assert_eq!(g.conjugate_index(c), flat);
            let k = g.wavevector(flat);
            let kc = g.wavevector(c);
            for axis in 0..3 {
                if g.is_nyquist(flat) && k[axis] == -4 {
                    assert_eq!(kc[axis], -4);
                } else {
                    assert_eq!(k[axis], -kc[axis]);
                }
            }
        }
    }
}
