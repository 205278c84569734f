//! Periodic grids, complex fields, and the spectral transform pair.
//!
//! The domain is the torus `[0, 2*pi)^n` sampled on `N` points per axis with
//! the probability-normalized measure (quadrature weight `N^-n` per sample).
//! Frequencies live on the centered integer lattice `{-N/2, ..., N/2-1}^n`.
//!
//! Transform convention: `u_hat(xi) = N^-n * sum_x u(x) e^{-i<xi,x>}`, so the
//! Plancherel identity holds with constant exactly 1 and every character
//! `e^{i<xi,x>}` has unit norm in all `L^p` spaces.

use crate::error::{Error, Result};
use crate::fft;
use num_complex::Complex64;

/// A periodic grid: dimension `n` in `1..=3`, `N` samples per axis with `N` a
/// power of two in `8..=256`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicGrid {
    dim: usize,
    size: usize,
}

impl PeriodicGrid {
    pub fn new(dim: usize, size: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "grid dimension must satisfy 1 <= n <= 3, got n = {dim}"
            )));
        }
        if !size.is_power_of_two() || !(8..=256).contains(&size) {
            return Err(Error::InvalidParameter(format!(
                "points per axis must be a power of two with 8 <= N <= 256, got N = {size}"
            )));
        }
        Ok(Self { dim, size })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Total number of samples (and of lattice frequencies), `N^n`.
    pub fn num_points(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    /// Largest frequency magnitude on the lattice, `(N/2) * sqrt(n)`.
    pub fn max_freq_mag(&self) -> f64 {
        (self.size as f64 / 2.0) * (self.dim as f64).sqrt()
    }

    /// Grid spacing `2*pi/N`.
    pub fn spacing(&self) -> f64 {
        std::f64::consts::TAU / self.size as f64
    }

    /// Centered frequency for an FFT bin index along one axis.
    #[inline]
    pub fn bin_to_freq(&self, bin: usize) -> i64 {
        debug_assert!(bin < self.size);
        if bin < self.size / 2 {
            bin as i64
        } else {
            bin as i64 - self.size as i64
        }
    }

    /// FFT bin index for a centered frequency along one axis.
    #[inline]
    pub fn freq_to_bin(&self, freq: i64) -> Result<usize> {
        let half = self.size as i64 / 2;
        if freq < -half || freq >= half {
            return Err(Error::InvalidParameter(format!(
                "frequency {freq} outside the centered lattice [-{half}, {half})"
            )));
        }
        Ok(freq.rem_euclid(self.size as i64) as usize)
    }

    /// Flat row-major index of a sample given per-axis indices.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dim);
        idx.iter().fold(0, |acc, &i| acc * self.size + i)
    }

    /// Physical coordinates of the sample with the given flat index.
    pub fn coords(&self, mut flat: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for axis in (0..self.dim).rev() {
            out[axis] = (flat % self.size) as f64 * self.spacing();
            flat /= self.size;
        }
        out
    }

    /// Calls `f(flat_index, |xi|^2)` for every lattice frequency, walking the
    /// row-major bin order. `|xi|^2` is exact (integer arithmetic in f64).
    pub fn for_each_freq_sq(&self, mut f: impl FnMut(usize, f64)) {
        let sq: Vec<f64> = (0..self.size)
            .map(|b| {
                let v = self.bin_to_freq(b) as f64;
                v * v
            })
            .collect();
        let n = self.size;
        let mut flat = 0;
        match self.dim {
            1 => {
                for &s0 in &sq {
                    f(flat, s0);
                    flat += 1;
                }
            }
            2 => {
                for &s0 in &sq {
                    for &s1 in &sq {
                        f(flat, s0 + s1);
                        flat += 1;
                    }
                }
            }
            3 => {
                for &s0 in &sq {
                    for &s1 in &sq {
                        for &s2 in &sq {
                            f(flat, s0 + s1 + s2);
                            flat += 1;
                        }
                    }
                }
            }
            _ => unreachable!("grid dimension is validated at construction"),
        }
        debug_assert_eq!(flat, n.pow(self.dim as u32));
    }

    /// Geodesic (torus) distance from the sample at `flat` to `center`.
    pub fn torus_distance(&self, flat: usize, center: &[f64]) -> f64 {
        let x = self.coords(flat);
        let mut acc = 0.0;
        for (xi, ci) in x.iter().zip(center) {
            let mut d = (xi - ci).abs() % std::f64::consts::TAU;
            if d > std::f64::consts::PI {
                d = std::f64::consts::TAU - d;
            }
            acc += d * d;
        }
        acc.sqrt()
    }
}

/// Complex samples on a periodic grid, row-major over axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: PeriodicGrid,
    samples: Vec<Complex64>,
}

/// Complex Fourier coefficients on the centered frequency lattice.
///
/// Storage is FFT bin order (row-major; bin `b` along an axis holds the
/// centered frequency `b` for `b < N/2` and `b - N` otherwise). Use
/// [`SpectralField::coeff`] to address coefficients by centered frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: PeriodicGrid,
    coeffs: Vec<Complex64>,
}

fn check_len_and_finite(grid: &PeriodicGrid, data: &[Complex64], what: &str) -> Result<()> {
    if data.len() != grid.num_points() {
        return Err(Error::InvalidInput(format!(
            "{what} length {} does not match grid with {} points",
            data.len(),
            grid.num_points()
        )));
    }
    if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "{what} contains non-finite entries"
        )));
    }
    Ok(())
}

impl Field {
    pub fn new(grid: PeriodicGrid, samples: Vec<Complex64>) -> Result<Self> {
        check_len_and_finite(&grid, &samples, "sample array")?;
        Ok(Self { grid, samples })
    }

    /// The zero field.
    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self {
            grid,
            samples: vec![Complex64::default(); grid.num_points()],
        }
    }

    /// The constant field `f == c`.
    pub fn constant(grid: PeriodicGrid, c: Complex64) -> Self {
        Self {
            grid,
            samples: vec![c; grid.num_points()],
        }
    }

    /// The character `e^{i<xi,x>}` for a centered lattice frequency `xi`.
    pub fn character(grid: PeriodicGrid, xi: &[i64]) -> Result<Self> {
        if xi.len() != grid.dim() {
            return Err(Error::InvalidParameter(format!(
                "frequency vector has {} components, grid dimension is {}",
                xi.len(),
                grid.dim()
            )));
        }
        for &c in xi {
            grid.freq_to_bin(c)?;
        }
        let n = grid.size();
        let mut samples = vec![Complex64::default(); grid.num_points()];
        let step = std::f64::consts::TAU / n as f64;
        for (flat, slot) in samples.iter_mut().enumerate() {
            let mut rem = flat;
            let mut phase = 0.0;
            for axis in (0..grid.dim()).rev() {
                let m = (rem % n) as f64;
                rem /= n;
                phase += xi[axis] as f64 * m * step;
            }
            *slot = Complex64::from_polar(1.0, phase);
        }
        Ok(Self { grid, samples })
    }

    /// Builds a field by evaluating `f` at every sample's coordinates.
    pub fn from_fn(grid: PeriodicGrid, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self> {
        let samples: Vec<Complex64> = (0..grid.num_points())
            .map(|flat| f(&grid.coords(flat)))
            .collect();
        Self::new(grid, samples)
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Pointwise product with another field on the same grid.
    pub fn pointwise_mul(&self, other: &Field) -> Result<Field> {
        self.check_same_grid(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .collect();
        Field::new(self.grid, samples)
    }

    /// `self + scale * other`.
    pub fn add_scaled(&self, other: &Field, scale: Complex64) -> Result<Field> {
        self.check_same_grid(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + scale * b)
            .collect();
        Field::new(self.grid, samples)
    }

    pub fn scale(&self, factor: Complex64) -> Field {
        Field {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * factor).collect(),
        }
    }

    fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "fields on (n={}, N={}) and (n={}, N={})",
                self.grid.dim(),
                self.grid.size(),
                other.grid.dim(),
                other.grid.size()
            )));
        }
        Ok(())
    }

    /// `L^2` norm under the probability measure; cheaper than `lp_norm(f, 2)`.
    pub fn l2_norm(&self) -> f64 {
        let weight = 1.0 / self.grid.num_points() as f64;
        (self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * weight).sqrt()
    }
}

/// The discrete transform `u_hat(xi) = N^-n * sum_x u(x) e^{-i<xi,x>}`.
///
/// Round-trips with [`inverse_transform`] to relative error below 1e-12.
pub fn forward_transform(f: &Field) -> Result<SpectralField> {
    check_len_and_finite(f.grid(), f.samples(), "sample array")?;
    let grid = *f.grid();
    let mut data = f.samples().to_vec();
    fft::forward_nd(&mut data, grid.dim(), grid.size());
    let scale = 1.0 / grid.num_points() as f64;
    for z in &mut data {
        *z *= scale;
    }
    Ok(SpectralField { grid, coeffs: data })
}

/// Exact inverse of [`forward_transform`] up to round-off:
/// `u(x) = sum_xi u_hat(xi) e^{i<xi,x>}`.
pub fn inverse_transform(g: &SpectralField) -> Result<Field> {
    check_len_and_finite(g.grid(), g.coeffs(), "coefficient array")?;
    let grid = *g.grid();
    let mut data = g.coeffs().to_vec();
    fft::inverse_nd(&mut data, grid.dim(), grid.size());
    Ok(Field {
        grid,
        samples: data,
    })
}

impl SpectralField {
    pub fn new(grid: PeriodicGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        check_len_and_finite(&grid, &coeffs, "coefficient array")?;
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.num_points()],
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// Coefficients in FFT bin order (see the type-level docs).
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// The coefficient at a centered lattice frequency.
    pub fn coeff(&self, xi: &[i64]) -> Result<Complex64> {
        if xi.len() != self.grid.dim() {
            return Err(Error::InvalidParameter(format!(
                "frequency vector has {} components, grid dimension is {}",
                xi.len(),
                self.grid.dim()
            )));
        }
        let mut flat = 0;
        for &c in xi {
            flat = flat * self.grid.size() + self.grid.freq_to_bin(c)?;
        }
        Ok(self.coeffs[flat])
    }

    pub fn set_coeff(&mut self, xi: &[i64], value: Complex64) -> Result<()> {
        let mut flat = 0;
        for &c in xi {
            flat = flat * self.grid.size() + self.grid.freq_to_bin(c)?;
        }
        self.coeffs[flat] = value;
        Ok(())
    }

    /// `l^2` norm of the coefficients; equals the field's `L^2` norm by
    /// Plancherel.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplies every coefficient by `m(|xi|)` in place.
    pub fn apply_radial_multiplier(&mut self, m: impl Fn(f64) -> f64) {
        let coeffs = &mut self.coeffs;
        self.grid.for_each_freq_sq(|flat, sq| {
            let factor = m(sq.sqrt());
            coeffs[flat] *= factor;
        });
    }
}

/// The `L^p` norm `(N^-n * sum_x |f(x)|^p)^{1/p}`; `max_x |f(x)|` for `p = inf`.
///
/// Under the probability measure every character has unit norm for every `p`.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "L^p exponent must satisfy p >= 1 (or p = inf), got p = {p}"
        )));
    }
    if p.is_infinite() {
        return Ok(f.samples().iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let weight = 1.0 / f.grid().num_points() as f64;
    if p == 2.0 {
        return Ok(f.l2_norm());
    }
    let sum: f64 = f.samples().iter().map(|z| z.norm().powf(p)).sum();
    Ok((sum * weight).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid2(n: usize) -> PeriodicGrid {
        PeriodicGrid::new(2, n).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(PeriodicGrid::new(0, 16).is_err());
        assert!(PeriodicGrid::new(4, 16).is_err());
        assert!(PeriodicGrid::new(2, 12).is_err());
        assert!(PeriodicGrid::new(2, 4).is_err());
        assert!(PeriodicGrid::new(2, 512).is_err());
    }

    #[test]
    fn lattice_has_n_to_the_dim_points() {
        let g = PeriodicGrid::new(3, 8).unwrap();
        assert_eq!(g.num_points(), 512);
        let mut count = 0;
        g.for_each_freq_sq(|_, _| count += 1);
        assert_eq!(count, 512);
        assert!((g.max_freq_mag() - 4.0 * 3.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constant_field_transforms_to_dc_mode() {
        let g = grid2(16);
        let c = Complex64::new(2.5, -1.0);
        let f = Field::constant(g, c);
        let spec = forward_transform(&f).unwrap();
        assert!((spec.coeff(&[0, 0]).unwrap() - c).norm() < 1e-13);
        let off_dc: f64 = spec
            .coeffs()
            .iter()
            .skip(1)
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        // skip(1) happens to skip exactly the DC bin (flat index 0)
        assert!(off_dc < 1e-13);
    }

    #[test]
    fn character_transforms_to_single_coefficient() {
        let g = grid2(16);
        let xi = [3i64, -5];
        let f = Field::character(g, &xi).unwrap();
        let spec = forward_transform(&f).unwrap();
        assert!((spec.coeff(&xi).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let mut total_off = 0.0;
        g.for_each_freq_sq(|flat, _| {
            total_off += spec.coeffs()[flat].norm_sqr();
        });
        assert!((total_off - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_coefficient_inverts_to_character() {
        let g = grid2(16);
        let xi = [-2i64, 7];
        let mut spec = SpectralField::zeros(g);
        spec.set_coeff(&xi, Complex64::new(1.0, 0.0)).unwrap();
        let f = inverse_transform(&spec).unwrap();
        let expected = Field::character(g, &xi).unwrap();
        let diff: f64 = f
            .samples()
            .iter()
            .zip(expected.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn zero_spectrum_inverts_to_zero_field() {
        let g = grid2(8);
        let f = inverse_transform(&SpectralField::zeros(g)).unwrap();
        assert_eq!(f.l2_norm(), 0.0);
    }

    #[test]
    fn round_trip_is_identity() {
        let g = grid2(16);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = synth::random_field(g, &mut rng);
        let back = inverse_transform(&forward_transform(&f).unwrap()).unwrap();
        let err: f64 = f
            .samples()
            .iter()
            .zip(back.samples())
            .map(|(a, b)| (a - b).norm())
            .sum::<f64>()
            / f.l2_norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn plancherel_identity_by_direct_summation() {
        // Both sides summed directly, independent of the norm helpers.
        let g = grid2(16);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let f = synth::random_field(g, &mut rng);
        let spec = forward_transform(&f).unwrap();
        let lhs: f64 = spec.coeffs().iter().map(|z| z.norm_sqr()).sum();
        let rhs: f64 =
            f.samples().iter().map(|z| z.norm_sqr()).sum::<f64>() / g.num_points() as f64;
        assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn rejects_non_finite_samples() {
        let g = grid2(8);
        let mut samples = vec![Complex64::default(); g.num_points()];
        samples[3] = Complex64::new(f64::NAN, 0.0);
        assert!(Field::new(g, samples).is_err());
    }

    #[test]
    fn lp_norm_of_constants_and_characters() {
        let g = grid2(16);
        for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            let c = Field::constant(g, Complex64::new(2.0, 0.0));
            assert!((lp_norm(&c, p).unwrap() - 2.0).abs() < 1e-12, "p={p}");
            let e = Field::character(g, &[5, 1]).unwrap();
            assert!((lp_norm(&e, p).unwrap() - 1.0).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn lp_norm_of_half_indicator() {
        let g = grid2(16);
        let samples: Vec<Complex64> = (0..g.num_points())
            .map(|i| {
                if i < g.num_points() / 2 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::default()
                }
            })
            .collect();
        let f = Field::new(g, samples).unwrap();
        assert!((lp_norm(&f, 2.0).unwrap() - 0.5_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn lp_norm_rejects_p_below_one() {
        let g = grid2(8);
        let f = Field::constant(g, Complex64::new(1.0, 0.0));
        assert!(lp_norm(&f, 0.5).is_err());
        assert!(lp_norm(&f, f64::NAN).is_err());
    }

    #[test]
    fn torus_distance_wraps() {
        let g = PeriodicGrid::new(1, 16).unwrap();
        let center = vec![0.0];
        // Sample 15 sits one cell to the "left" of the origin across the seam.
        let d = g.torus_distance(15, &center);
        assert!((d - g.spacing()).abs() < 1e-12);
    }

    #[test]
    fn coeff_lookup_validates_frequency_vectors() {
        let g = grid2(16);
        let spec = forward_transform(&Field::constant(g, Complex64::new(1.0, 0.0))).unwrap();
        assert!(spec.coeff(&[0]).is_err()); // wrong dimension
        assert!(spec.coeff(&[0, 8]).is_err()); // beyond the centered lattice
        assert!(spec.coeff(&[0, -8]).is_ok());
    }

    #[test]
    fn radial_multiplier_matches_direct_laplacian() {
        let g = grid2(16);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = synth::random_field(g, &mut rng);
        let mut spec = forward_transform(&f).unwrap();
        spec.apply_radial_multiplier(|mag| mag * mag);
        let via_multiplier = inverse_transform(&spec).unwrap();
        let via_op = crate::frac::frac_laplacian(&f, 1.0).unwrap();
        let diff = via_multiplier
            .add_scaled(&via_op, Complex64::new(-1.0, 0.0))
            .unwrap();
        assert!(diff.l2_norm() <= 1e-12 * via_op.l2_norm());
    }

    #[test]
    fn concurrent_transforms_are_safe_and_agree() {
        let g = grid2(32);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let fields: Vec<Field> = (0..8).map(|_| synth::random_field(g, &mut rng)).collect();
        let expected: Vec<SpectralField> = fields
            .iter()
            .map(|f| forward_transform(f).unwrap())
            .collect();
        std::thread::scope(|scope| {
            for (f, e) in fields.iter().zip(&expected) {
                scope.spawn(move || {
                    for _ in 0..4 {
                        let got = forward_transform(f).unwrap();
                        assert_eq!(got.coeffs(), e.coeffs());
                    }
                });
            }
        });
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn transform_is_linear(seed in 0u64..1000, ar in -3.0f64..3.0, ai in -3.0f64..3.0, br in -3.0f64..3.0, bi in -3.0f64..3.0) {
            let g = grid2(16);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = synth::random_field(g, &mut rng);
            let h = synth::random_field(g, &mut rng);
            let a = Complex64::new(ar, ai);
            let b = Complex64::new(br, bi);
            let combo = f.scale(a).add_scaled(&h, b).unwrap();
            let lhs = forward_transform(&combo).unwrap();
            let ff = forward_transform(&f).unwrap();
            let hh = forward_transform(&h).unwrap();
            let mut worst = 0.0f64;
            for (l, (x, y)) in lhs.coeffs().iter().zip(ff.coeffs().iter().zip(hh.coeffs())) {
                worst = worst.max((l - (a * x + b * y)).norm());
            }
            prop_assert!(worst <= 1e-12 * (1.0 + lhs.l2_norm()));
        }

        #[test]
        fn hoelder_inequality_on_products(seed in 0u64..1000, t in 0.1f64..0.9) {
            // ||fg||_1 <= ||f||_p ||g||_p' for conjugate exponents.
            let g = grid2(16);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = synth::random_field(g, &mut rng);
            let h = synth::random_field(g, &mut rng);
            let p = 1.0 / t;
            let p_conj = 1.0 / (1.0 - t);
            let lhs = lp_norm(&f.pointwise_mul(&h).unwrap(), 1.0).unwrap();
            let rhs = lp_norm(&f, p).unwrap() * lp_norm(&h, p_conj).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }
}
