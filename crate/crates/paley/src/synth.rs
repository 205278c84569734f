//! Deterministic synthetic fields for experiments and ensembles.
//!
//! `modal_field` draws each Fourier coefficient from an RNG seeded by the
//! frequency itself, so the same seed produces the *same function* at every
//! resolution that contains the mode. That is what makes fitted constants
//! comparable across a resolution sweep.

use crate::error::Result;
use crate::grid::{inverse_transform, Field, PeriodicGrid, SpectralField};
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two independent standard normals via Box-Muller.
fn gauss_pair(rng: &mut impl RngCore) -> (f64, f64) {
    loop {
        let u: f64 = rng.gen::<f64>();
        if u <= f64::MIN_POSITIVE {
            continue;
        }
        let r = (-2.0 * u.ln()).sqrt();
        let t = std::f64::consts::TAU * rng.gen::<f64>();
        return (r * t.cos(), r * t.sin());
    }
}

/// White complex Gaussian field (every sample independent, unit variance).
pub fn random_field(grid: PeriodicGrid, rng: &mut impl RngCore) -> Field {
    let samples: Vec<Complex64> = (0..grid.num_points())
        .map(|_| {
            let (re, im) = gauss_pair(rng);
            Complex64::new(re, im)
        })
        .collect();
    Field::new(grid, samples).expect("gaussian samples are finite")
}

fn mix_freq(seed: u64, flat_freq_key: u64) -> u64 {
    // splitmix64-style mix of (seed, frequency key)
    let mut z = seed ^ flat_freq_key.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random field with coefficient decay `(1 + |xi|^2)^{-sigma/2}`.
///
/// Coefficients are a deterministic function of `(seed, xi)`, independent of
/// the grid size, so refining the grid extends the same function with new
/// high modes instead of redrawing it.
pub fn modal_field(grid: PeriodicGrid, seed: u64, sigma: f64) -> Field {
    let mut spec = SpectralField::zeros(grid);
    let size = grid.size() as i64;
    let dim = grid.dim();
    let coeffs = spec.coeffs_mut();
    grid.for_each_freq_sq(|flat, sq| {
        // Recover the centered frequency vector from the flat bin index to
        // key the per-mode RNG resolution-independently.
        let mut rem = flat;
        let mut key = 0u64;
        let mut bins = [0usize; 3];
        for axis in (0..dim).rev() {
            bins[axis] = rem % size as usize;
            rem /= size as usize;
        }
        for &b in bins.iter().take(dim) {
            let f = if (b as i64) < size / 2 {
                b as i64
            } else {
                b as i64 - size
            };
            key = key.wrapping_mul(0x1_0000_0003) ^ (f as u64).wrapping_add(0x8000_0000);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix_freq(seed, key));
        let (re, im) = gauss_pair(&mut rng);
        let amp = (1.0 + sq).powf(-sigma / 2.0);
        coeffs[flat] = Complex64::new(re, im) * amp;
    });
    inverse_transform(&spec).expect("finite coefficients")
}

/// [`modal_field`] with every coefficient beyond `|xi| > max_freq` dropped.
///
/// With `max_freq` inside the coarsest lattice of a sweep, every resolution
/// sees the identical function and pointwise products stay alias-free, which
/// is what makes fitted constants comparable across grid sizes.
pub fn modal_field_band_limited(grid: PeriodicGrid, seed: u64, sigma: f64, max_freq: f64) -> Field {
    let full = modal_field(grid, seed, sigma);
    let mut spec = crate::grid::forward_transform(&full).expect("modal field is finite");
    let cut_sq = max_freq * max_freq;
    let coeffs = spec.coeffs_mut();
    grid.for_each_freq_sq(|flat, sq| {
        if sq > cut_sq {
            coeffs[flat] = Complex64::default();
        }
    });
    inverse_transform(&spec).expect("finite coefficients")
}

/// Random field with spectrum confined to the ball `|xi| <= radius`.
pub fn random_band_limited(grid: PeriodicGrid, radius: f64, rng: &mut impl RngCore) -> Field {
    let mut spec = SpectralField::zeros(grid);
    let r_sq = radius * radius;
    let mut draws: Vec<(usize, f64)> = Vec::new();
    grid.for_each_freq_sq(|flat, sq| {
        if sq <= r_sq {
            draws.push((flat, sq));
        }
    });
    let coeffs = spec.coeffs_mut();
    for (flat, _) in draws {
        let (re, im) = gauss_pair(rng);
        coeffs[flat] = Complex64::new(re, im);
    }
    inverse_transform(&spec).expect("finite coefficients")
}

/// `|x - center|^{-exponent}` on the torus, capped at its value one grid cell
/// from the center. `center` defaults to the origin when `None`.
pub fn power_law_field(
    grid: PeriodicGrid,
    exponent: f64,
    amplitude: f64,
    center: Option<&[f64]>,
) -> Result<Field> {
    let default_center = vec![0.0; grid.dim()];
    let center = center.unwrap_or(&default_center);
    let cell = grid.spacing();
    let samples: Vec<Complex64> = (0..grid.num_points())
        .map(|flat| {
            let r = grid.torus_distance(flat, center).max(cell);
            Complex64::new(amplitude * r.powf(-exponent), 0.0)
        })
        .collect();
    Field::new(grid, samples)
}
