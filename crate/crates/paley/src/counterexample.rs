//! The supercritical power-law family and its failure of regularity
//! improvement.
//!
//! For `n >= 3` and exponent `p` above the critical value `(n+2)/(n-2)`, the
//! radial power law `u = A |x|^{-a}` with `a = 2/(p-1)` solves
//! `Lap(u) + u^p = 0` on the unit ball for exactly one amplitude `A`. The
//! amplitude here is *calibrated by a residual-minimizing oracle* rather than
//! taken from a closed form: the two algebraic candidates
//! `(a(n+a-2))^(1/(p-1))` and `(a(n-a-2))^(1/(p-1))` differ by a sign inside,
//! and the oracle decides which one the equation actually wants.
//!
//! The quantitative content of "not smooth" is a dyadic decay slope: the
//! truncated power law belongs to `H^s` exactly for `s < n/2 - a`, and the
//! measured slope of its band norms should sit near `-(n/2 - a)`.

use crate::dyadic::{band_slope, build_partition, dyadic_coefficients};
use crate::error::{Error, Result};
use crate::frac::cutoff_field;
use crate::grid::PeriodicGrid;
use crate::synth;

/// Which closed-form amplitude candidate the oracle matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeForm {
    /// `(a (n + a - 2))^(1/(p-1))`.
    PlusForm,
    /// `(a (n - a - 2))^(1/(p-1))`.
    MinusForm,
    /// Neither candidate is within 1e-8 of the oracle value.
    Neither,
}

/// Outcome of the amplitude calibration.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeCalibration {
    /// Residual-minimizing amplitude found by the oracle.
    pub oracle: f64,
    /// Max relative radial residual at the oracle amplitude.
    pub residual: f64,
    /// Closed-form candidate `(a (n + a - 2))^(1/(p-1))`.
    pub closed_form_plus: f64,
    /// Closed-form candidate `(a (n - a - 2))^(1/(p-1))`.
    pub closed_form_minus: f64,
    /// Candidate matching the oracle within 1e-8 relative, if any.
    pub matched: AmplitudeForm,
}

/// The family `u = A |x|^{-a}`, `a = 2/(p-1)`, with oracle-calibrated `A`.
#[derive(Debug, Clone, Copy)]
pub struct SupercriticalFamily {
    n: usize,
    p: f64,
    a: f64,
    calibration: AmplitudeCalibration,
}

fn critical_exponent(n: usize) -> f64 {
    (n as f64 + 2.0) / (n as f64 - 2.0)
}

fn validate_family_params(n: usize, p: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "family dimension must satisfy n >= 3, got n = {n}"
        )));
    }
    let crit = critical_exponent(n);
    if p.is_nan() || p <= crit {
        return Err(Error::InvalidParameter(format!(
            "exponent must be supercritical: p > (n+2)/(n-2) = {crit} fails for p = {p}"
        )));
    }
    Ok(())
}

/// Max relative residual of `Lap(A r^-a) + (A r^-a)^p` over a radial grid,
/// with the Laplacian evaluated through the exact power-law identity
/// `Lap(r^-a) = a (a + 2 - n) r^(-a-2)`.
fn residual_at(amplitude: f64, n: usize, p: f64, a: f64, radii: &[f64]) -> f64 {
    let lap_coeff = a * (a + 2.0 - n as f64);
    radii
        .iter()
        .map(|&r| {
            let lap = amplitude * lap_coeff * r.powf(-a - 2.0);
            let power = (amplitude * r.powf(-a)).powf(p);
            (lap + power).abs() / power
        })
        .fold(0.0, f64::max)
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Calibrates the amplitude by minimizing the max radial residual on a
/// log-spaced grid `r` in `[0.05, 0.95]`, then reports how the result
/// compares with both closed-form candidates.
///
/// The returned residual is at most 1e-8; if the minimizer cannot reach
/// that, the parameters were rejected earlier.
pub fn calibrate_amplitude(n: usize, p: f64) -> Result<AmplitudeCalibration> {
    validate_family_params(n, p)?;
    let a = 2.0 / (p - 1.0);
    let radii = log_spaced(0.05, 0.95, 64);

    // Coarse logarithmic scan to bracket the minimum.
    let mut best_idx = 0;
    let mut best_val = f64::INFINITY;
    let scan: Vec<f64> = log_spaced(1e-6, 1e6, 481);
    for (i, &amp) in scan.iter().enumerate() {
        let r = residual_at(amp, n, p, a, &radii);
        if r < best_val {
            best_val = r;
            best_idx = i;
        }
    }
    let mut lo = scan[best_idx.saturating_sub(1)];
    let mut hi = scan[(best_idx + 1).min(scan.len() - 1)];

    // Golden-section refinement on the unimodal residual.
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = residual_at(x1, n, p, a, &radii);
    let mut f2 = residual_at(x2, n, p, a, &radii);
    for _ in 0..200 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = residual_at(x1, n, p, a, &radii);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = residual_at(x2, n, p, a, &radii);
        }
        if (hi - lo) / lo < 1e-13 {
            break;
        }
    }
    let oracle = 0.5 * (lo + hi);
    let residual = residual_at(oracle, n, p, a, &radii);

    let exponent = 1.0 / (p - 1.0);
    let plus_arg = a * (n as f64 + a - 2.0);
    let minus_arg = a * (n as f64 - a - 2.0);
    let closed_form_plus = if plus_arg > 0.0 {
        plus_arg.powf(exponent)
    } else {
        f64::NAN
    };
    let closed_form_minus = if minus_arg > 0.0 {
        minus_arg.powf(exponent)
    } else {
        f64::NAN
    };

    let rel = |cand: f64| (cand - oracle).abs() / oracle;
    let matched = if closed_form_minus.is_finite() && rel(closed_form_minus) <= 1e-8 {
        AmplitudeForm::MinusForm
    } else if closed_form_plus.is_finite() && rel(closed_form_plus) <= 1e-8 {
        AmplitudeForm::PlusForm
    } else {
        AmplitudeForm::Neither
    };

    Ok(AmplitudeCalibration {
        oracle,
        residual,
        closed_form_plus,
        closed_form_minus,
        matched,
    })
}

impl SupercriticalFamily {
    /// Builds and calibrates the family for dimension `n` and exponent `p`.
    pub fn new(n: usize, p: f64) -> Result<Self> {
        let calibration = calibrate_amplitude(n, p)?;
        let a = 2.0 / (p - 1.0);
        debug_assert!(a < (n as f64 - 2.0) / 2.0);
        Ok(Self {
            n,
            p,
            a,
            calibration,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Decay exponent `a = 2/(p-1)`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Oracle-calibrated amplitude.
    pub fn amplitude(&self) -> f64 {
        self.calibration.oracle
    }

    pub fn calibration(&self) -> &AmplitudeCalibration {
        &self.calibration
    }
}

/// Max relative residual of the family's equation over the given radii,
/// which must lie strictly inside `(0, 1)`.
pub fn radial_residual(family: &SupercriticalFamily, radii: &[f64]) -> Result<f64> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("empty radial grid".into()));
    }
    for &r in radii {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "radii must lie in (0, 1), got r = {r}"
            )));
        }
    }
    Ok(residual_at(
        family.amplitude(),
        family.n,
        family.p,
        family.a,
        radii,
    ))
}

/// `H^1` membership of the family on the unit ball, decided in closed form.
#[derive(Debug, Clone, Copy)]
pub struct H1Membership {
    /// Whether the gradient is square-integrable: `a + 1 < n/2`.
    pub in_h1: bool,
    /// Margin `n/2 - a - 1`; positive inside `H^1`.
    pub margin: f64,
}

/// The integral `int_0^1 r^(-2a-2) r^(n-1) dr` converges iff `n - 2a - 2 > 0`,
/// i.e. `a + 1 < n/2`.
pub fn h1_membership(family: &SupercriticalFamily) -> H1Membership {
    let margin = family.n as f64 / 2.0 - family.a - 1.0;
    H1Membership {
        in_h1: margin > 0.0,
        margin,
    }
}

/// Measured dyadic decay slope of a truncated power law `|x|^{-a}` on a grid.
///
/// The field is capped at its one-cell value, multiplied by a smooth cutoff
/// of radius `rho`, and the slope of `log2 ||P_k . ||_2` is fitted over the
/// resolved window: bands `2..=j_max-3`, above the cutoff-dominated low
/// bands and below the scale where the cell-size cap of the singularity
/// flattens the spectrum. The theoretical target is `-(n/2 - a)`, the `H^s`
/// membership threshold.
pub fn power_law_decay_slope(grid: PeriodicGrid, a: f64, rho: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "power-law exponent must be positive, got a = {a}"
        )));
    }
    let center = vec![0.0; grid.dim()];
    let u = synth::power_law_field(grid, a, 1.0, Some(&center))?;
    let eta = cutoff_field(grid, rho, &center)?;
    let f = eta.pointwise_mul(&u)?;
    let partition = build_partition(grid);
    let coeffs = dyadic_coefficients(&f, 0.0, &partition)?;
    band_slope(coeffs.values(), 2, partition.j_max().saturating_sub(3), 3)
}

/// [`power_law_decay_slope`] for a calibrated family; the grid dimension
/// must match the family's.
pub fn decay_exponent(family: &SupercriticalFamily, grid: PeriodicGrid, rho: f64) -> Result<f64> {
    if grid.dim() != family.n {
        return Err(Error::GridMismatch(format!(
            "family dimension {} does not match grid dimension {}",
            family.n,
            grid.dim()
        )));
    }
    power_law_decay_slope(grid, family.a, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use num_complex::Complex64;

    #[test]
    fn rejects_subcritical_parameters() {
        assert!(calibrate_amplitude(2, 10.0).is_err());
        assert!(calibrate_amplitude(5, 3.0).is_ok());
        // p = (n+2)/(n-2) exactly is critical, not supercritical.
        assert!(calibrate_amplitude(5, 7.0 / 3.0).is_err());
        assert!(calibrate_amplitude(3, 5.0).is_err());
        assert!(calibrate_amplitude(3, 6.0).is_ok());
    }

    #[test]
    fn exponent_bookkeeping_is_exact() {
        for (n, p) in [(5usize, 3.0f64), (3, 6.0), (4, 4.5), (5, 2.4)] {
            let fam = SupercriticalFamily::new(n, p).unwrap();
            let a = fam.a();
            assert_eq!(a * (p - 1.0), 2.0, "a(p-1) = 2 must be exact");
            let ap = a * p;
            assert!((ap - (a + 2.0)).abs() <= 1e-15 * ap, "ap = a + 2");
            assert!(a < (n as f64 - 2.0) / 2.0, "supercritical range");
        }
    }

    #[test]
    fn oracle_settles_the_amplitude_sign() {
        // n = 5, p = 3: a = 1; the two candidates are sqrt(4) = 2 and
        // sqrt(2). The equation residual decides.
        let cal = calibrate_amplitude(5, 3.0).unwrap();
        assert!((cal.closed_form_plus - 2.0).abs() < 1e-12);
        assert!((cal.closed_form_minus - 2.0f64.sqrt()).abs() < 1e-12);
        assert!(cal.residual <= 1e-8, "residual {:.3e}", cal.residual);
        assert_eq!(cal.matched, AmplitudeForm::MinusForm);
        assert!((cal.oracle - 2.0f64.sqrt()).abs() <= 1e-8 * cal.oracle);
    }

    #[test]
    fn calibration_holds_across_parameters() {
        for (n, p) in [(3usize, 6.0f64), (4, 3.5), (5, 2.5), (6, 2.2)] {
            let cal = calibrate_amplitude(n, p).unwrap();
            assert!(
                cal.residual <= 1e-8,
                "(n,p)=({n},{p}): {:.3e}",
                cal.residual
            );
            assert_eq!(cal.matched, AmplitudeForm::MinusForm, "(n,p)=({n},{p})");
        }
    }

    #[test]
    fn doubled_amplitude_breaks_the_balance() {
        let fam = SupercriticalFamily::new(5, 3.0).unwrap();
        let radii = log_spaced(0.05, 0.95, 64);
        let good = radial_residual(&fam, &radii).unwrap();
        assert!(good <= 1e-8);
        let bad = residual_at(2.0 * fam.amplitude(), 5, 3.0, fam.a(), &radii);
        assert!(
            bad > 0.5,
            "doubling A should give an order-one residual, got {bad}"
        );
    }

    #[test]
    fn radial_residual_rejects_bad_radii() {
        let fam = SupercriticalFamily::new(5, 3.0).unwrap();
        assert!(radial_residual(&fam, &[0.0, 0.5]).is_err());
        assert!(radial_residual(&fam, &[-0.1]).is_err());
        assert!(radial_residual(&fam, &[1.0]).is_err());
        assert!(radial_residual(&fam, &[]).is_err());
    }

    #[test]
    fn h1_membership_margins() {
        let fam = SupercriticalFamily::new(5, 3.0).unwrap(); // a = 1
        let h1 = h1_membership(&fam);
        assert!(h1.in_h1);
        assert!((h1.margin - 0.5).abs() < 1e-12);

        let fam = SupercriticalFamily::new(3, 6.0).unwrap(); // a = 0.4
        let h1 = h1_membership(&fam);
        assert!(h1.in_h1);
        assert!((h1.margin - 0.1).abs() < 1e-12);
    }

    #[test]
    fn decay_slope_matches_membership_threshold() {
        // 2-d analog: a = 0.5 gives the threshold n/2 - a = 0.5.
        let grid = PeriodicGrid::new(2, 256).unwrap();
        let slope = power_law_decay_slope(grid, 0.5, 1.2).unwrap();
        assert!(
            (slope - (-0.5)).abs() <= 0.15,
            "slope {slope} vs target -0.5"
        );
    }

    #[test]
    fn smooth_field_decays_much_faster() {
        // An analytic periodic field: geometric coefficient decay, far
        // steeper than any power law over the same fit window.
        let grid = PeriodicGrid::new(2, 256).unwrap();
        let u = crate::grid::Field::from_fn(grid, |x| {
            Complex64::new((x[0].cos() + x[1].cos()).exp(), 0.0)
        })
        .unwrap();
        let partition = build_partition(grid);
        let coeffs = dyadic_coefficients(&u, 0.0, &partition).unwrap();
        let slope = band_slope(coeffs.values(), 2, partition.j_max() - 3, 3).unwrap();
        assert!(slope <= -3.0, "smooth field slope {slope}");
    }

    #[test]
    fn near_constant_field_is_low_block_dominated() {
        // a -> 0 limit: the truncated power law approaches a constant and
        // the band content is negligible against the low block.
        let grid = PeriodicGrid::new(2, 64).unwrap();
        let center = vec![0.0, 0.0];
        let u = synth::power_law_field(grid, 1e-3, 1.0, Some(&center)).unwrap();
        let partition = build_partition(grid);
        let coeffs = dyadic_coefficients(&u, 0.0, &partition).unwrap();
        let low = coeffs.values()[0];
        let bands: f64 = coeffs.values()[1..]
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        assert!(bands < 0.02 * low, "bands {bands} vs low {low}");
    }

    #[test]
    fn family_decay_runs_in_three_dimensions() {
        // The 3-d window at desk resolution is squeezed between the cutoff
        // scale and the cell-size cap, so only the sign and finiteness of
        // the slope are meaningful here; the quantitative comparison lives
        // on the 2-d analog at N = 256.
        let family = SupercriticalFamily::new(3, 6.0).unwrap();
        let grid = PeriodicGrid::new(3, 64).unwrap();
        match decay_exponent(&family, grid, 1.2) {
            Ok(slope) => assert!(slope.is_finite() && slope < 0.0),
            Err(crate::error::Error::InsufficientData(_)) => {}
            Err(other) => panic!("unexpected error: {other}"),
        }
        let grid = PeriodicGrid::new(3, 128).unwrap();
        let slope = decay_exponent(&family, grid, 1.2).unwrap();
        assert!(slope.is_finite() && slope < -0.5, "slope {slope}");
    }

    #[test]
    fn mismatched_grid_dimension_is_rejected() {
        let fam = SupercriticalFamily::new(3, 6.0).unwrap();
        let grid = PeriodicGrid::new(2, 64).unwrap();
        assert!(decay_exponent(&fam, grid, 1.0).is_err());
    }
}
