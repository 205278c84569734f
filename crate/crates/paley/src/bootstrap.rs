//! End-to-end regularity-bootstrap experiments.
//!
//! The pipeline manufactures an exact solution pair `(u, v)` of
//! `L^alpha u + v u = 0`, localizes it with smooth cutoffs, decomposes the
//! band products into interaction zones, fits the decay inequality
//!
//! ```text
//! a_k <= C1 2^(-theta k) + C2 * delta * sum_j a_j 2^(-theta |j-k|)
//! ```
//!
//! on the measured dyadic coefficients `a_k`, feeds the normalized sequence
//! to the iteration lemma with `eps = theta/2` and `delta~ = C2 * delta`,
//! and finally checks the improved decay rate `-(s + eps)` band by band.
//!
//! `C1` is anchored to the localization commutator (it depends only on the
//! field and the cutoff), while `C2` multiplies the measured potential
//! smallness `delta`; the admissibility verdict compares `C2 * delta`
//! against the lemma threshold `(1 - 2^-eps)/2`. A potential rescaling in
//! the configuration scales `delta` but keeps the constants fitted on the
//! exact-solution pair, which is what makes the stress variant able to flip
//! the verdict.

use crate::dyadic::{block_norms, build_partition, dyadic_coefficients, DyadicCoefficients};
use crate::error::{Error, Result};
use crate::frac::{localize, manufacture_potential, FracParams, Localized};
use crate::grid::{forward_transform, lp_norm, Field, PeriodicGrid};
use crate::iteration::{
    bound_constant, check_hypotheses, delta_threshold, fixed_point_oracle, verify_conclusion,
    IterationParams,
};
use crate::least_squares_slope;
use crate::paraproduct::{
    decompose_scan, fit_estimate_constant, scan_range, uncovered_outside_pairs, EstimateTerm,
};
use crate::report::{ExperimentReport, NamedSequence};
use crate::synth;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Both regime values of the decay exponent `theta`:
/// `min(1, n/2 - s, n/2 + s - 2 alpha)` for the `n <= 4 alpha` regime and
/// `min(1, s, 2 alpha - s)` for `n > 4 alpha`. No admissibility validation.
pub fn theta_formulas(n: usize, alpha: f64, s: f64) -> (f64, f64) {
    let nf = n as f64;
    let small = 1.0f64.min(nf / 2.0 - s).min(nf / 2.0 + s - 2.0 * alpha);
    let large = 1.0f64.min(s).min(2.0 * alpha - s);
    (small, large)
}

/// The decay exponent `theta(n, alpha, s)`; validates the parameter
/// inequalities (naming the failed one) and is strictly positive on the
/// admissible set. The regime is selected by `n <= 4 alpha` as written.
pub fn theta(n: usize, alpha: f64, s: f64) -> Result<f64> {
    FracParams::new(n, alpha, s)?;
    let (small, large) = theta_formulas(n, alpha, s);
    let value = if n as f64 <= 4.0 * alpha {
        small
    } else {
        large
    };
    debug_assert!(value > 0.0);
    Ok(value)
}

/// Grid, parameters, and the derived decay exponents of one bootstrap run.
#[derive(Debug, Clone, Copy)]
pub struct BootstrapParams {
    pub frac: FracParams,
    pub grid: PeriodicGrid,
    pub rho: f64,
    pub theta: f64,
    pub epsilon: f64,
}

impl BootstrapParams {
    /// Validates the parameter inequalities and the cutoff radius, then
    /// derives `theta` and `eps = theta / 2`.
    pub fn new(grid: PeriodicGrid, alpha: f64, s: f64, rho: f64) -> Result<Self> {
        let frac = FracParams::new(grid.dim(), alpha, s)?;
        let rho_valid = rho > 0.0 && 2.0 * rho < PI;
        if !rho_valid {
            return Err(Error::InvalidParameter(format!(
                "0 < 2*rho < pi fails: rho = {rho}"
            )));
        }
        let th = theta(grid.dim(), alpha, s)?;
        Ok(Self {
            frac,
            grid,
            rho,
            theta: th,
            epsilon: th / 2.0,
        })
    }

    /// Lemma admissibility threshold `(1 - 2^-eps)/2` at `eps = theta/2`.
    pub fn admissibility_threshold(&self) -> f64 {
        delta_threshold(self.epsilon)
    }
}

/// Outcome of fitting the decay inequality on a localized pair.
#[derive(Debug, Clone, Copy)]
pub struct ThetaDecay {
    /// Commutator-anchored constant in front of `2^(-theta k)`.
    pub c1: f64,
    /// Smallest convolution constant given `c1`.
    pub c2: f64,
    /// Measured `||v_loc||_{n/(2 alpha)}`.
    pub delta: f64,
    /// `c2 * delta`, the quantity the lemma threshold is applied to.
    pub delta_tilde: f64,
    /// `(1 - 2^-eps)/2`.
    pub threshold: f64,
    /// `delta_tilde < threshold`.
    pub verdict: bool,
}

/// Fits the theta-decay inequality on the dyadic coefficients of `u_loc`.
///
/// `C1` is fitted first from the commutator field alone — it bounds the
/// band norms of a zero-potential solution outright — and is then held
/// fixed while the smallest admissible `C2` is computed over the scan
/// bands. The verdict applies the lemma threshold to `C2 * delta`.
pub fn theta_decay_check(
    u_loc: &Field,
    v_loc: &Field,
    commutator: &Field,
    params: &BootstrapParams,
) -> Result<ThetaDecay> {
    let partition = build_partition(params.grid);
    let j_max = partition.j_max();
    let scan: Vec<usize> = scan_range(j_max).collect();
    if scan.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "theta-decay fit needs at least 2 scan bands, grid offers {}",
            scan.len()
        )));
    }
    let s = params.frac.s();
    let alpha = params.frac.alpha();
    let th = params.theta;

    let coeffs = dyadic_coefficients(u_loc, s, &partition)?;
    let a = coeffs.values();

    let (_, comm_bands) = block_norms(&forward_transform(commutator)?, &partition);
    let pow2 = |e: f64| (2.0f64).powf(e);

    // C1 = 2^(2 alpha) * max_k 2^((s - 2 alpha + theta) k) ||P_k F||.
    // The prefactor makes `a_k <= C1 2^(-theta k)` provable whenever the
    // commutator equals L^alpha(u_loc), i.e. for zero-potential solutions.
    let mut c1 = 0.0f64;
    for &k in &scan {
        let norm = comm_bands[k - 1];
        c1 = c1.max(pow2(2.0 * alpha) * pow2((s - 2.0 * alpha + th) * k as f64) * norm);
    }

    let delta = lp_norm(v_loc, params.frac.critical_exponent())?;

    let conv = |k: usize| -> f64 {
        a.iter()
            .enumerate()
            .map(|(j, &aj)| aj * pow2(-th * (k as f64 - j as f64).abs()))
            .sum()
    };

    let mut c2 = 0.0f64;
    let tiny = 1e-12 * a.iter().cloned().fold(0.0, f64::max);
    for &k in &scan {
        let excess = a[k] - c1 * pow2(-th * k as f64);
        if excess <= 0.0 {
            continue;
        }
        if delta == 0.0 {
            if excess > tiny {
                return Err(Error::DegenerateFit(format!(
                    "zero potential cannot absorb band excess {excess:.3e} at k = {k}"
                )));
            }
            continue;
        }
        let denom = delta * conv(k);
        if denom == 0.0 {
            return Err(Error::DegenerateFit(format!(
                "vanishing convolution against excess {excess:.3e} at k = {k}"
            )));
        }
        c2 = c2.max(excess / denom);
    }

    let delta_tilde = c2 * delta;
    let threshold = params.admissibility_threshold();
    Ok(ThetaDecay {
        c1,
        c2,
        delta,
        delta_tilde,
        threshold,
        verdict: delta_tilde < threshold,
    })
}

/// Outcome of the improved-decay check at rate `s + eps`.
#[derive(Debug, Clone, Copy)]
pub struct GoalEstimate {
    /// Smallest constant with `||P_k u||_2 <= C 2^(-(s+eps) k)` over the
    /// available bands.
    pub c: f64,
    /// Fitted slope of `log2 ||P_k u||_2`, when enough bands carry mass.
    pub slope: Option<f64>,
    /// Slope at least as steep as `-(s + eps)`; vacuously true when the
    /// band mass is below measurement floor.
    pub verdict: bool,
}

/// Fits the improved-decay constant and slope for a localized field.
///
/// The slope is fitted over the upper half of the bands excluding the top
/// one; a field whose upper bands carry no mass decays faster than any
/// fixed rate and passes vacuously.
pub fn goal_estimate_check(u_loc: &Field, s: f64, epsilon: f64) -> Result<GoalEstimate> {
    let partition = build_partition(*u_loc.grid());
    let j_max = partition.j_max();
    let (_, bands) = block_norms(&forward_transform(u_loc)?, &partition);
    let rate = s + epsilon;
    let c = bands
        .iter()
        .enumerate()
        .map(|(idx, norm)| norm * (2.0f64).powf(rate * (idx + 1) as f64))
        .fold(0.0, f64::max);

    let lo = j_max / 2 + 1;
    let hi = j_max.saturating_sub(1);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in lo..=hi {
        let v = bands[k - 1];
        if v > 0.0 {
            xs.push(k as f64);
            ys.push(v.log2());
        }
    }
    if xs.len() < 3 {
        return Ok(GoalEstimate {
            c,
            slope: None,
            verdict: true,
        });
    }
    let slope = least_squares_slope(&xs, &ys);
    Ok(GoalEstimate {
        c,
        slope: Some(slope),
        verdict: slope <= -rate,
    })
}

/// Configuration of a bootstrap run. Flat and fully serializable; the CLI
/// mirrors these fields as flags and config-file keys.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig {
    pub n: usize,
    pub size: usize,
    pub alpha: f64,
    pub s: f64,
    pub rho: f64,
    pub seed: u64,
    /// Multiplier applied to the manufactured potential before measuring
    /// `delta`; values above 1 stress the admissibility verdict.
    pub v_scale: f64,
    /// Amplitude of the smooth perturbation in the manufactured solution.
    pub perturbation: f64,
    /// Spectral decay exponent of the perturbation.
    pub sigma: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            n: 2,
            size: 128,
            alpha: 0.75,
            s: 0.75,
            rho: 1.0,
            seed: 7,
            v_scale: 1.0,
            perturbation: 0.6,
            sigma: 1.8,
        }
    }
}

/// A manufactured exact solution pair on a grid.
pub struct Manufactured {
    pub u: Field,
    pub v: Field,
}

/// Builds `u = 1 + perturbation * w / sup|w|` from a modal field `w` and
/// manufactures the exact potential. `perturbation` must stay below 1 so
/// the solution is bounded away from zero.
pub fn manufacture_solution(
    grid: PeriodicGrid,
    alpha: f64,
    seed: u64,
    perturbation: f64,
    sigma: f64,
) -> Result<Manufactured> {
    if !(0.0..1.0).contains(&perturbation) {
        return Err(Error::InvalidParameter(format!(
            "0 <= perturbation < 1 fails: {perturbation}"
        )));
    }
    let w = synth::modal_field(grid, seed, sigma);
    let sup = w.samples().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = if sup > 0.0 { perturbation / sup } else { 0.0 };
    let u = Field::constant(grid, Complex64::new(1.0, 0.0))
        .add_scaled(&w, Complex64::new(scale, 0.0))?;
    let v = manufacture_potential(&u, alpha, (1.0 - perturbation) * 0.5)?;
    Ok(Manufactured { u, v })
}

fn stage_note(report: &mut ExperimentReport, stage: &str, err: &Error) {
    report.notes.push(format!("stage {stage} error: {err}"));
    report.push_verdict(
        format!("{stage}_completed"),
        false,
        0.0,
        0.0,
        "stage must complete without error",
    );
}

/// Runs the full pipeline: manufacture, localize, zone decomposition and
/// constant fits, theta-decay fit, iteration lemma on the measured
/// coefficients, and the improved-decay check. Stage errors are recorded in
/// the report and later independent stages still run.
pub fn run_bootstrap(config: &BootstrapConfig) -> Result<ExperimentReport> {
    let grid = PeriodicGrid::new(config.n, config.size)?;
    let params = BootstrapParams::new(grid, config.alpha, config.s, config.rho)?;
    if !(config.v_scale.is_finite() && config.v_scale >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "v_scale must be finite and nonnegative, got {}",
            config.v_scale
        )));
    }

    let mut report = ExperimentReport::new("bootstrap");
    report.parameters.n = Some(config.n);
    report.parameters.size = Some(config.size);
    report.parameters.alpha = Some(config.alpha);
    report.parameters.s = Some(config.s);
    report.parameters.rho = Some(config.rho);
    report.parameters.seed = Some(config.seed);
    report.parameters.epsilon = Some(params.epsilon);
    report.parameters.v_scale = Some(config.v_scale);

    let partition = build_partition(grid);
    let j_max = partition.j_max();
    let scan: Vec<usize> = scan_range(j_max).collect();
    report.provenance.grid_dim = Some(config.n);
    report.provenance.grid_size = Some(config.size);
    report.provenance.seed = Some(config.seed);
    report.provenance.scan_band_lo = scan.first().copied();
    report.provenance.scan_band_hi = scan.last().copied();
    if j_max < 10 {
        report.notes.push(format!(
            "band scan clipped to the upper half [{}, {}]: the grid has no bands at k >= 10",
            scan.first().unwrap(),
            scan.last().unwrap()
        ));
    }

    let (small_theta, large_theta) = theta_formulas(config.n, config.alpha, config.s);
    report.push_constant("theta", params.theta);
    report.push_constant("theta_small_regime", small_theta);
    report.push_constant("theta_large_regime", large_theta);
    report.push_constant("epsilon", params.epsilon);
    if (config.n as f64 - 4.0 * config.alpha).abs() < 1e-12 {
        report
            .notes
            .push("regime boundary n = 4*alpha: both theta values reported above".into());
    }

    // Manufacture the exact pair and localize it.
    let made = manufacture_solution(
        grid,
        config.alpha,
        config.seed,
        config.perturbation,
        config.sigma,
    )?;
    let center = vec![PI; config.n];
    let loc = localize(&made.u, &made.v, config.rho, config.alpha, &center)?;
    let Localized {
        u_loc,
        v_loc,
        commutator,
    } = loc;

    let base_delta = lp_norm(&v_loc, params.frac.critical_exponent())?;
    let run_delta = config.v_scale * base_delta;
    report.parameters.delta = Some(run_delta);
    report.push_constant("delta_base", base_delta);
    report.push_constant("delta_run", run_delta);

    // Measured dyadic coefficients of the localized field.
    let coeffs = dyadic_coefficients(&u_loc, config.s, &partition)?;
    report
        .sequences
        .push(NamedSequence::new("a_k", coeffs.values().to_vec()));
    let (_, comm_bands) = block_norms(&forward_transform(&commutator)?, &partition);
    report.sequences.push(NamedSequence::new(
        "commutator_band_norms",
        comm_bands.clone(),
    ));

    // Zone decomposition residuals and estimate constants on the localized
    // pair (scale cancels out of the fitted constants).
    let v_run = v_loc.scale(Complex64::new(config.v_scale, 0.0));
    match decompose_scan(&v_run, &u_loc, &partition) {
        Ok(decs) => {
            let worst = decs
                .iter()
                .map(|d| d.relative_residual())
                .fold(0.0, f64::max);
            report.push_verdict(
                "zone_decomposition_residual",
                worst <= 1e-8,
                worst,
                1e-8,
                "residual <= 1e-8 * ||P_k(vu)||_2 at every scan band",
            );
        }
        Err(err) => stage_note(&mut report, "zone_decomposition", &err),
    }
    match uncovered_outside_pairs(&v_run, &u_loc, &partition) {
        Ok(failures) => report.push_verdict(
            "outside_pairs_covered",
            failures.is_empty(),
            failures.len() as f64,
            0.0,
            "every Outside pair certified vanishing or below 1e-10 * ||v|| ||u||",
        ),
        Err(err) => stage_note(&mut report, "outside_pairs", &err),
    }

    let mut zone_constants_finite = true;
    for (name, term) in [
        ("c_near", EstimateTerm::Near),
        ("c_high_low", EstimateTerm::HighLow),
        ("c_high_high", EstimateTerm::HighHigh),
    ] {
        match fit_estimate_constant(term, &v_run, &u_loc, config.s, config.alpha, &partition) {
            Ok(c) => {
                zone_constants_finite &= c.is_finite();
                report.push_constant(name, c);
            }
            Err(err) => {
                zone_constants_finite = false;
                stage_note(&mut report, name, &err);
            }
        }
    }
    report.push_verdict(
        "zone_constants_finite",
        zone_constants_finite,
        if zone_constants_finite { 1.0 } else { 0.0 },
        1.0,
        "all fitted zone constants finite",
    );

    // Theta-decay fit on the exact pair; the verdict applies the lemma
    // threshold to c2 * delta with delta from the (possibly rescaled) run.
    let mut lemma_input: Option<(f64, f64)> = None;
    match theta_decay_check(&u_loc, &v_loc, &commutator, &params) {
        Ok(fit) => {
            let delta_tilde = fit.c2 * run_delta;
            report.push_constant("c1", fit.c1);
            report.push_constant("c2", fit.c2);
            report.push_constant("delta_tilde", delta_tilde);
            report.push_constant("lemma_threshold", fit.threshold);
            report.push_constant(
                "lemma_threshold_strict_variant",
                delta_threshold(params.epsilon / 100.0),
            );
            report.notes.push(
                "admissibility is judged against (1 - 2^-eps)/2; the stricter eps/100 variant \
                 is reported alongside as an unresolved alternative"
                    .into(),
            );
            report.push_verdict(
                "theta_decay_admissible",
                delta_tilde < fit.threshold,
                delta_tilde,
                fit.threshold,
                "c2 * delta below the lemma threshold (1 - 2^-eps)/2",
            );
            lemma_input = Some((delta_tilde, fit.c1));
        }
        Err(err) => stage_note(&mut report, "theta_decay", &err),
    }

    // Iteration lemma on the normalized measured coefficients.
    if let Some((delta_tilde, _c1)) = lemma_input {
        let threshold = params.admissibility_threshold();
        if delta_tilde >= threshold {
            report.push_verdict(
                "iteration_lemma",
                false,
                delta_tilde,
                threshold,
                "lemma applies only below the admissibility threshold",
            );
        } else {
            let lemma_delta = delta_tilde.max(1e-9 * threshold);
            match apply_lemma_to_coefficients(&coeffs, params.epsilon, lemma_delta) {
                Ok(outcome) => {
                    report
                        .sequences
                        .push(NamedSequence::new("lemma_normalized", outcome.normalized));
                    report.push_constant("lemma_s_start", outcome.s_start as f64);
                    report.push_constant("lemma_absorption", outcome.absorption);
                    report.push_constant("lemma_decay_constant", outcome.decay);
                    report.push_verdict(
                        "iteration_lemma",
                        outcome.conclusion,
                        if outcome.conclusion { 1.0 } else { 0.0 },
                        1.0,
                        "normalized a_k satisfy hypotheses and conclusion at eps = theta/2",
                    );
                }
                Err(err) => stage_note(&mut report, "iteration_lemma", &err),
            }
        }
    }

    // Improved-decay check at rate s + eps.
    match goal_estimate_check(&u_loc, config.s, params.epsilon) {
        Ok(goal) => {
            report.push_constant("goal_constant", goal.c);
            if let Some(slope) = goal.slope {
                report.push_constant("goal_slope", slope);
            }
            report.push_verdict(
                "goal_decay_rate",
                goal.verdict,
                goal.slope.unwrap_or(f64::NEG_INFINITY),
                -(config.s + params.epsilon),
                "fitted band slope at or below -(s + eps)",
            );
        }
        Err(err) => stage_note(&mut report, "goal_estimate", &err),
    }

    Ok(report)
}

struct LemmaOutcome {
    normalized: Vec<f64>,
    s_start: usize,
    absorption: f64,
    decay: f64,
    conclusion: bool,
}

/// Normalizes the measured coefficients by their sup, finds the smallest
/// starting index at which the lemma hypotheses hold, and verifies the
/// conclusion with the explicit certificate.
fn apply_lemma_to_coefficients(
    coeffs: &DyadicCoefficients,
    epsilon: f64,
    delta: f64,
) -> Result<LemmaOutcome> {
    let sup = coeffs.values().iter().cloned().fold(0.0, f64::max);
    if sup == 0.0 {
        return Ok(LemmaOutcome {
            normalized: coeffs.values().to_vec(),
            s_start: 0,
            absorption: 1.0,
            decay: 0.0,
            conclusion: true,
        });
    }
    let normalized: Vec<f64> = coeffs.values().iter().map(|v| v / sup).collect();
    let k_max = normalized.len();
    for s_start in 0..k_max.saturating_sub(1) {
        let params = IterationParams::new(epsilon, delta, s_start, k_max)?;
        if check_hypotheses(&normalized, &params)? {
            let cert = bound_constant(&normalized, &params)?;
            let conclusion = verify_conclusion(&normalized, &cert, &params);
            return Ok(LemmaOutcome {
                normalized,
                s_start,
                absorption: cert.absorption,
                decay: cert.decay,
                conclusion,
            });
        }
    }
    Err(Error::InsufficientData(
        "no starting index makes the normalized coefficients satisfy the lemma hypotheses".into(),
    ))
}

/// Runs the lemma subcommand: oracle generation, hypothesis check, bound
/// certificate, and conclusion verification for explicit parameters.
pub fn run_iteration_experiment(
    epsilon: f64,
    delta: f64,
    s_start: usize,
    k_max: usize,
    iters: usize,
) -> Result<ExperimentReport> {
    let params = IterationParams::new(epsilon, delta, s_start, k_max)?;
    let sequence = fixed_point_oracle(&params, iters)?;
    let mut report = ExperimentReport::new("iterate-lemma");
    report.parameters.epsilon = Some(epsilon);
    report.parameters.delta = Some(delta);
    report
        .sequences
        .push(NamedSequence::new("oracle_sequence", sequence.clone()));

    let hypotheses = check_hypotheses(&sequence, &params)?;
    report.push_verdict(
        "hypotheses",
        hypotheses,
        if hypotheses { 1.0 } else { 0.0 },
        1.0,
        "oracle sequence satisfies both hypothesis conditions",
    );
    if hypotheses {
        let cert = bound_constant(&sequence, &params)?;
        report.push_constant("absorption", cert.absorption);
        report.push_constant("c_eps", cert.c_eps);
        report.push_constant("decay_constant", cert.decay);
        let ok = verify_conclusion(&sequence, &cert, &params);
        report.push_verdict(
            "conclusion",
            ok,
            if ok { 1.0 } else { 0.0 },
            1.0,
            "a_k <= M 2^(-eps k) for every k",
        );
    }
    Ok(report)
}
