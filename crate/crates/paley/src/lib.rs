//! Numerical Littlewood-Paley analysis on periodic grids.
//!
//! The crate provides the pieces of a dyadic-frequency toolbox and the
//! experiments built on top of them:
//!
//! - [`grid`]: periodic grids, complex fields, the spectral transform pair
//!   with unit-constant Plancherel, and `L^p` norms.
//! - [`dyadic`]: a telescoping smooth partition of unity on frequency space,
//!   band projections, dyadic Sobolev norms, and Bernstein ratios.
//! - [`frac`]: the fractional Laplacian as a radial Fourier multiplier,
//!   smooth cutoffs, localization with its commutator field, and
//!   manufactured potentials.
//! - [`paraproduct`]: the four frequency-interaction zones, the band-wise
//!   product decomposition, and constant fitting for the zone estimates.
//! - [`iteration`]: the convolution-inequality iteration lemma on number
//!   sequences, with an independent fixed-point oracle.
//! - [`counterexample`]: the supercritical power-law family, amplitude
//!   calibration by a radial oracle, and dyadic decay measurement.
//! - [`bootstrap`]: end-to-end regularity-bootstrap experiments and their
//!   structured reports.
//! - [`io`]: a flat binary serialization for fields.
//! - [`synth`]: deterministic synthetic fields for ensembles.

#![allow(clippy::needless_range_loop)]

pub mod bootstrap;
pub mod counterexample;
pub mod dyadic;
pub mod error;
mod fft;
pub mod frac;
pub mod grid;
pub mod io;
pub mod iteration;
pub mod paraproduct;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
pub use grid::{forward_transform, inverse_transform, lp_norm, Field, PeriodicGrid, SpectralField};
pub use num_complex::Complex64;

/// Least-squares slope of `values` against `xs`.
pub(crate) fn least_squares_slope(xs: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), values.len());
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = values.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(values) {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    num / den
}
