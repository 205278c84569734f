//! Internal n-dimensional FFT engine on row-major arrays.
//!
//! Plans are cached in a process-wide planner behind a mutex; the plans
//! themselves are `Arc`s and safe to run concurrently, so callers only
//! contend on plan lookup.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::{Arc, Mutex, OnceLock};

static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = PLANNER
        .get_or_init(|| Mutex::new(FftPlanner::new()))
        .lock()
        .expect("fft planner poisoned");
    if forward {
        planner.plan_fft_forward(len)
    } else {
        planner.plan_fft_inverse(len)
    }
}

/// Unnormalized DFT along every axis of a row-major `size^dim` array.
///
/// Axis 0 is the slowest-varying index. The transform convention is
/// `sum_m f(m) e^{-2*pi*i*k*m/size}` per axis; no scaling is applied.
pub fn forward_nd(data: &mut [Complex64], dim: usize, size: usize) {
    transform_nd(data, dim, size, true);
}

/// Unnormalized inverse DFT along every axis (positive exponent, no scaling).
pub fn inverse_nd(data: &mut [Complex64], dim: usize, size: usize) {
    transform_nd(data, dim, size, false);
}

fn transform_nd(data: &mut [Complex64], dim: usize, size: usize, forward: bool) {
    debug_assert_eq!(data.len(), size.pow(dim as u32));
    let fft = plan(size, forward);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

    // Last axis is contiguous: batch-process in place.
    fft.process_with_scratch(data, &mut scratch);

    // Remaining axes: gather strided lanes into a contiguous buffer.
    let mut lane = vec![Complex64::default(); size];
    for axis in (0..dim.saturating_sub(1)).rev() {
        let stride = size.pow((dim - 1 - axis) as u32);
        let block = stride * size;
        let blocks = data.len() / block;
        for b in 0..blocks {
            let base = b * block;
            for offset in 0..stride {
                let start = base + offset;
                for (t, slot) in lane.iter_mut().enumerate() {
                    *slot = data[start + t * stride];
                }
                fft.process_with_scratch(&mut lane, &mut scratch);
                for (t, value) in lane.iter().enumerate() {
                    data[start + t * stride] = *value;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn naive_dft_1d(input: &[Complex64]) -> Vec<Complex64> {
        let n = input.len();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|m| {
                        let phase = -TAU * (k * m) as f64 / n as f64;
                        input[m] * Complex64::from_polar(1.0, phase)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_1d() {
        let input: Vec<Complex64> = (0..16)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos()))
            .collect();
        let expected = naive_dft_1d(&input);
        let mut got = input.clone();
        forward_nd(&mut got, 1, 16);
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).norm() < 1e-10, "{g} vs {e}");
        }
    }

    #[test]
    fn forward_then_inverse_scales_by_volume() {
        for (dim, size) in [(1usize, 8usize), (2, 8), (3, 8)] {
            let total = size.pow(dim as u32);
            let input: Vec<Complex64> = (0..total)
                .map(|i| Complex64::new((i as f64 * 0.31).sin(), (i as f64 * 0.17).cos()))
                .collect();
            let mut data = input.clone();
            forward_nd(&mut data, dim, size);
            inverse_nd(&mut data, dim, size);
            let scale = total as f64;
            for (d, orig) in data.iter().zip(&input) {
                assert!((d / scale - orig).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn axis_ordering_is_row_major() {
        // A pure mode along axis 0 of a 2-d array must land in bin (1, 0).
        let size = 8;
        let mut data = vec![Complex64::default(); size * size];
        for r in 0..size {
            for c in 0..size {
                let phase = TAU * r as f64 / size as f64;
                data[r * size + c] = Complex64::from_polar(1.0, phase);
            }
        }
        forward_nd(&mut data, 2, size);
        let total = (size * size) as f64;
        for r in 0..size {
            for c in 0..size {
                let expected = if r == 1 && c == 0 { total } else { 0.0 };
                assert!(
                    (data[r * size + c].norm() - expected).abs() < 1e-9,
                    "bin ({r},{c})"
                );
            }
        }
    }
}
