//! Unnormalized n-dimensional complex FFTs on cubic arrays.
//!
//! Plans are cached per thread, so callers on different workers never share
//! planner state.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place FFT of a row-major `n^dim` array along every axis.
pub(crate) fn fft_nd(data: &mut [Complex64], n: usize, dim: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction));
    let total = data.len();

    // Last axis is contiguous: transform all rows at once.
    fft.process(data);
    if dim == 1 {
        return;
    }

    let mut lines = vec![Complex64::default(); total];
    for axis in 0..dim - 1 {
        let stride = n.pow((dim - 1 - axis) as u32);
        let outer = total / (stride * n);
        // gather lines along `axis` into contiguous rows
        let mut row = 0;
        for o in 0..outer {
            for s in 0..stride {
                let base = o * stride * n + s;
                for j in 0..n {
                    lines[row * n + j] = data[base + j * stride];
                }
                row += 1;
            }
        }
        fft.process(&mut lines);
        let mut row = 0;
        for o in 0..outer {
            for s in 0..stride {
                let base = o * stride * n + s;
                for j in 0..n {
                    data[base + j * stride] = lines[row * n + j];
                }
                row += 1;
            }
        }
    }
}
