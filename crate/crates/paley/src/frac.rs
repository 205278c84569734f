//! Fractional Laplacian, smooth cutoffs, localization, and manufactured
//! potentials.
//!
//! The fractional Laplacian acts as the radial Fourier multiplier `|xi|^(2a)`
//! (the positive operator), with the multiplier set to 0 at `xi = 0` for all
//! orders. Sign conventions are immaterial to every band-norm estimate here;
//! only magnitudes enter.
//!
//! Localization multiplies a field by a smooth cutoff and records the
//! commutator `F = L(eta*u) - eta*L(u)` as a field. No symbol calculus is
//! involved: the commutator is the difference of two computable fields, and
//! its claimed order shows up as a measurable band-decay slope.

use crate::dyadic::{band_slope, block_norms, transition, DyadicPartition};
use crate::error::{Error, Result};
use crate::grid::{forward_transform, inverse_transform, lp_norm, Field, PeriodicGrid};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Admissible parameter pair for the regularity-bootstrap experiments:
/// `0 < 2*alpha < n`, `0 < 2*s < n`, and `2*alpha - n/2 < s < 2*alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams {
    n: usize,
    alpha: f64,
    s: f64,
}

impl FracParams {
    /// Validates every inequality, naming the one that fails.
    pub fn new(n: usize, alpha: f64, s: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "dimension n must be positive".into(),
            ));
        }
        let nf = n as f64;
        if !(alpha > 0.0 && 2.0 * alpha < nf) {
            return Err(Error::InvalidParameter(format!(
                "0 < 2*alpha < n fails: alpha = {alpha}, n = {n}"
            )));
        }
        if !(s > 0.0 && 2.0 * s < nf) {
            return Err(Error::InvalidParameter(format!(
                "0 < 2*s < n fails: s = {s}, n = {n}"
            )));
        }
        if !(2.0 * alpha - nf / 2.0 < s && s < 2.0 * alpha) {
            return Err(Error::InvalidParameter(format!(
                "2*alpha - n/2 < s < 2*alpha fails: alpha = {alpha}, s = {s}, n = {n}"
            )));
        }
        Ok(Self { n, alpha, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// The critical integrability exponent `n / (2*alpha)` for the potential.
    pub fn critical_exponent(&self) -> f64 {
        self.n as f64 / (2.0 * self.alpha)
    }
}

/// Applies the multiplier `|xi|^(2*alpha)`; the value at `xi = 0` is 0.
pub fn frac_laplacian(f: &Field, alpha: f64) -> Result<Field> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "fractional order must satisfy alpha > 0, got alpha = {alpha}"
        )));
    }
    let mut spec = forward_transform(f)?;
    let coeffs = spec.coeffs_mut();
    f.grid().for_each_freq_sq(|flat, sq| {
        // |xi|^(2*alpha) = (|xi|^2)^alpha; powf gives exactly 0 at sq = 0.
        coeffs[flat] *= sq.powf(alpha);
    });
    inverse_transform(&spec)
}

/// Smooth bump equal to 1 on the plateau ball and 0 outside the outer ball,
/// radially interpolated by the shared transition profile. The outer radius
/// may exceed the torus half-diameter, in which case the bump simply never
/// reaches zero in the far corners.
pub(crate) fn plateau_bump(
    grid: PeriodicGrid,
    plateau: f64,
    outer: f64,
    center: &[f64],
) -> Result<Field> {
    let radii_valid = plateau > 0.0 && outer > plateau;
    if !radii_valid {
        return Err(Error::InvalidParameter(format!(
            "bump radii must satisfy 0 < plateau < outer, got {plateau}, {outer}"
        )));
    }
    if center.len() != grid.dim() {
        return Err(Error::InvalidParameter(format!(
            "center has {} components, grid dimension is {}",
            center.len(),
            grid.dim()
        )));
    }
    let width = outer - plateau;
    let samples: Vec<Complex64> = (0..grid.num_points())
        .map(|flat| {
            let d = grid.torus_distance(flat, center);
            Complex64::new(transition((outer - d) / width), 0.0)
        })
        .collect();
    Field::new(grid, samples)
}

/// Smooth radial cutoff: 1 on `B(rho)` around `center`, 0 outside `B(2*rho)`,
/// values in `[0, 1]`. Requires `0 < 2*rho < pi` so the support ball fits in
/// the fundamental domain.
pub fn cutoff_field(grid: PeriodicGrid, rho: f64, center: &[f64]) -> Result<Field> {
    let rho_valid = rho > 0.0 && 2.0 * rho < PI;
    if !rho_valid {
        return Err(Error::InvalidParameter(format!(
            "cutoff radius must satisfy 0 < 2*rho < pi, got rho = {rho}"
        )));
    }
    plateau_bump(grid, rho, 2.0 * rho, center)
}

/// Result of localizing a (field, potential) pair at radius `rho`.
#[derive(Debug, Clone)]
pub struct Localized {
    /// `eta_rho * u`.
    pub u_loc: Field,
    /// `eta_{2 rho} * v`, with the outer cutoff's decay region capped to the
    /// torus when `4*rho` exceeds the half-diameter.
    pub v_loc: Field,
    /// The commutator `L^alpha(eta_rho u) - eta_rho L^alpha(u)`, computed
    /// spectrally as a difference of fields.
    pub commutator: Field,
}

/// Localizes `u` and `v` around `center` and returns the commutator field.
///
/// By construction `L^alpha(u_loc) = eta_rho * L^alpha(u) + commutator`
/// holds to round-off (the commutator is defined as that difference).
pub fn localize(u: &Field, v: &Field, rho: f64, alpha: f64, center: &[f64]) -> Result<Localized> {
    let grid = *u.grid();
    let eta = cutoff_field(grid, rho, center)?;
    let eta_outer = plateau_bump(grid, 2.0 * rho, 4.0 * rho, center)?;
    let u_loc = eta.pointwise_mul(u)?;
    let v_loc = eta_outer.pointwise_mul(v)?;
    let lap_u_loc = frac_laplacian(&u_loc, alpha)?;
    let eta_lap_u = eta.pointwise_mul(&frac_laplacian(u, alpha)?)?;
    let commutator = lap_u_loc.add_scaled(&eta_lap_u, Complex64::new(-1.0, 0.0))?;
    Ok(Localized {
        u_loc,
        v_loc,
        commutator,
    })
}

/// Least-squares slope of `log2 ||P_k F||_2` against `k`.
///
/// For a commutator of order `2*alpha - 1` acting on an `H^s` field the
/// expected comparison value is `2*alpha - s - 1`. The fit window is bands
/// `3..=min(6, j_max - 1)`: above the cutoff-transition hump and below the
/// top bands the lattice corners truncate, so the same spectral content is
/// measured at every resolution and slopes are comparable across a
/// refinement sweep. Needs at least 4 bands with nonzero norm, i.e. a grid
/// with `j_max >= 7`.
pub fn commutator_decay_slope(f: &Field, partition: &DyadicPartition) -> Result<f64> {
    let spec = forward_transform(f)?;
    let (low, bands) = block_norms(&spec, partition);
    let mut values = Vec::with_capacity(bands.len() + 1);
    values.push(low);
    values.extend_from_slice(&bands);
    band_slope(&values, 3, 6.min(partition.j_max().saturating_sub(1)), 4)
}

/// Builds the potential `v = -L^alpha(u) / u`, so that `L^alpha(u) + v*u = 0`
/// holds exactly at every sample.
///
/// Requires `min_x |u(x)| >= floor > 0`; otherwise the division is
/// degenerate and the caller must pick a non-vanishing `u`.
pub fn manufacture_potential(u: &Field, alpha: f64, floor: f64) -> Result<Field> {
    if floor.is_nan() || floor <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "floor must be positive, got {floor}"
        )));
    }
    let min_abs = u
        .samples()
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    if min_abs < floor {
        return Err(Error::DegenerateSolution(format!(
            "min |u| = {min_abs:.6e} dips below the floor {floor:.6e}; choose a non-vanishing u"
        )));
    }
    let lap = frac_laplacian(u, alpha)?;
    let samples: Vec<Complex64> = lap
        .samples()
        .iter()
        .zip(u.samples())
        .map(|(l, uu)| -l / uu)
        .collect();
    Field::new(*u.grid(), samples)
}

/// `||eta_{2 rho} * v||_{n/(2 alpha)}`, the localized potential smallness.
pub fn localized_potential_norm(v: &Field, rho: f64, alpha: f64, center: &[f64]) -> Result<f64> {
    let grid = *v.grid();
    let eta_outer = plateau_bump(grid, 2.0 * rho, 4.0 * rho, center)?;
    let v_loc = eta_outer.pointwise_mul(v)?;
    lp_norm(&v_loc, grid.dim() as f64 / (2.0 * alpha))
}
