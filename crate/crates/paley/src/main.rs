//! Command-line driver for the dyadic-analysis experiments.
//!
//! Every subcommand runs one experiment and emits a structured report
//! (JSON by default, flattened CSV with `--format csv`). With `--out PATH`
//! the report goes to the file and every numeric sequence is additionally
//! written as `PATH.<name>.csv`. Options can also come from a flat
//! `key = value` config file via `--config`; explicit flags win.
//!
//! Exit codes: 0 when every verdict passes, 1 when any verdict fails,
//! 2 for usage or parameter errors, 3 for internal numerical errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use paley::bootstrap::{run_bootstrap, run_iteration_experiment, BootstrapConfig};
use paley::counterexample::{
    calibrate_amplitude, h1_membership, power_law_decay_slope, radial_residual, AmplitudeForm,
    SupercriticalFamily,
};
use paley::dyadic::{
    bernstein_ratio, build_partition, project, project_low, BERNSTEIN_REGRESSION_BOUND,
};
use paley::error::Error;
use paley::grid::{forward_transform, Field, PeriodicGrid};
use paley::paraproduct::{
    decompose_scan, fit_estimate_constant, scan_range, uncovered_outside_pairs, EstimateTerm,
};
use paley::report::{ExperimentReport, NamedSequence};
use paley::synth;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "paley",
    version,
    about = "Dyadic frequency analysis and regularity-bootstrap experiments on periodic grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonOpts {
    /// Grid dimension (1..=3)
    #[arg(long)]
    n: Option<usize>,
    /// Points per axis (power of two, 8..=256)
    #[arg(long)]
    size: Option<usize>,
    /// Fractional order of the operator
    #[arg(long)]
    alpha: Option<f64>,
    /// Sobolev regularity index
    #[arg(long)]
    s: Option<f64>,
    /// Localization radius
    #[arg(long)]
    rho: Option<f64>,
    /// RNG seed for ensembles
    #[arg(long)]
    seed: Option<u64>,
    /// Flat `key = value` config file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout (sequences become
    /// `<out>.<name>.csv` side files)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report encoding
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the partition of unity: telescoping sum, reconstruction, and
    /// the Plancherel identity on random fields
    PartitionCheck {
        #[command(flatten)]
        common: CommonOpts,
        /// Number of random fields
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Measure Bernstein ratios of random band-limited fields against the
    /// recorded regression bound
    Bernstein {
        #[command(flatten)]
        common: CommonOpts,
        /// Fields per exponent pair
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Zone decomposition residuals, outside-pair coverage, and fitted
    /// estimate constants on a random ensemble
    Paraproduct {
        #[command(flatten)]
        common: CommonOpts,
        /// Number of random field pairs
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Generate a hypothesis-satisfying sequence with the fixed-point
    /// oracle and verify the iteration lemma on it
    IterateLemma {
        #[command(flatten)]
        common: CommonOpts,
        /// Decay gain of the lemma
        #[arg(long)]
        epsilon: Option<f64>,
        /// Convolution smallness (must stay below (1 - 2^-eps)/2)
        #[arg(long)]
        delta: Option<f64>,
        /// First index the hypotheses are required from
        #[arg(long)]
        s_start: Option<usize>,
        /// Sequence length
        #[arg(long)]
        k_max: Option<usize>,
        /// Iteration budget of the oracle
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Calibrate the supercritical power-law family and measure the dyadic
    /// decay slope of its grid analog
    Counterexample {
        #[command(flatten)]
        common: CommonOpts,
        /// Family dimension (>= 3)
        #[arg(long)]
        family_n: Option<usize>,
        /// Supercritical exponent p
        #[arg(long)]
        p: Option<f64>,
        /// Power-law exponent of the grid field
        #[arg(long)]
        a: Option<f64>,
    },
    /// Full manufactured-solution bootstrap pipeline
    Bootstrap {
        #[command(flatten)]
        common: CommonOpts,
        /// Multiplier on the manufactured potential (stress knob)
        #[arg(long)]
        v_scale: Option<f64>,
        /// Amplitude of the smooth perturbation in the solution
        #[arg(long)]
        perturbation: Option<f64>,
        /// Spectral decay exponent of the perturbation
        #[arg(long)]
        sigma: Option<f64>,
    },
}

/// Key-value settings from a config file; lowest priority in resolution.
struct Settings {
    map: HashMap<String, String>,
}

impl Settings {
    fn load(path: Option<&Path>) -> Result<Self, Error> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)?;
            for (idx, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    Error::Format(format!(
                        "config line {} is not `key = value`: {raw:?}",
                        idx + 1
                    ))
                })?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self { map })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, Error> {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::Format(format!("config key {key} has unparsable value {raw:?}"))
            }),
        }
    }
}

fn resolve<T: FromStr + Copy>(
    flag: Option<T>,
    settings: &Settings,
    key: &str,
    default: T,
) -> Result<T, Error> {
    Ok(flag.or(settings.get(key)?).unwrap_or(default))
}

fn emit(report: &ExperimentReport, common: &CommonOpts) -> Result<bool, Error> {
    let rendered = match common.format {
        OutputFormat::Json => {
            let mut text = report.to_json()?;
            text.push('\n');
            text
        }
        OutputFormat::Csv => report.to_csv(),
    };
    match &common.out {
        Some(path) => {
            std::fs::write(path, rendered)?;
            report.write_sequence_csvs(path)?;
        }
        None => print!("{rendered}"),
    }
    for v in &report.verdicts {
        eprintln!(
            "verdict {}: {}",
            v.name,
            if v.passed { "pass" } else { "FAIL" }
        );
    }
    Ok(report.all_passed())
}

fn run_partition_check(
    common: &CommonOpts,
    trials: Option<usize>,
) -> Result<ExperimentReport, Error> {
    let settings = Settings::load(common.config.as_deref())?;
    let n = resolve(common.n, &settings, "n", 2)?;
    let size = resolve(common.size, &settings, "size", 64)?;
    let seed = resolve(common.seed, &settings, "seed", 7)?;
    let trials = resolve(trials, &settings, "trials", 100)?;

    let grid = PeriodicGrid::new(n, size)?;
    let partition = build_partition(grid);
    let mut report = ExperimentReport::new("partition-check");
    report.parameters.n = Some(n);
    report.parameters.size = Some(size);
    report.parameters.seed = Some(seed);
    report.provenance.grid_dim = Some(n);
    report.provenance.grid_size = Some(size);
    report.provenance.seed = Some(seed);

    let mut telescope_dev = 0.0f64;
    grid.for_each_freq_sq(|_, sq| {
        let mag = sq.sqrt();
        let mut total = partition.low_symbol(mag);
        for j in 1..=partition.j_max() {
            total += partition.band_symbol(j, mag);
        }
        telescope_dev = telescope_dev.max((total - 1.0).abs());
    });
    report.push_constant("telescoping_deviation", telescope_dev);
    report.push_verdict(
        "partition_sums_to_one",
        telescope_dev <= 1e-14,
        telescope_dev,
        1e-14,
        "max |l + sum phi_j - 1| over the lattice <= 1e-14",
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_recon = 0.0f64;
    let mut worst_plancherel = 0.0f64;
    for _ in 0..trials {
        let f = synth::random_field(grid, &mut rng);
        let mut acc = project_low(&f, &partition)?;
        for j in 1..=partition.j_max() {
            acc = acc.add_scaled(&project(&f, j, &partition)?, Complex64::new(1.0, 0.0))?;
        }
        let residual = f.add_scaled(&acc, Complex64::new(-1.0, 0.0))?.l2_norm();
        worst_recon = worst_recon.max(residual / f.l2_norm());

        let spec = forward_transform(&f)?;
        let err = (f.l2_norm() - spec.l2_norm()).abs() / f.l2_norm();
        worst_plancherel = worst_plancherel.max(err);
    }
    report.push_constant("reconstruction_residual", worst_recon);
    report.push_verdict(
        "reconstruction",
        worst_recon <= 1e-12,
        worst_recon,
        1e-12,
        "||f - P_low f - sum P_j f||_2 <= 1e-12 ||f||_2 on every trial",
    );
    report.push_constant("plancherel_error", worst_plancherel);
    report.push_verdict(
        "plancherel",
        worst_plancherel <= 1e-12,
        worst_plancherel,
        1e-12,
        "relative Plancherel identity error <= 1e-12 on every trial",
    );
    Ok(report)
}

fn run_bernstein(common: &CommonOpts, trials: Option<usize>) -> Result<ExperimentReport, Error> {
    let settings = Settings::load(common.config.as_deref())?;
    let n = resolve(common.n, &settings, "n", 2)?;
    let size = resolve(common.size, &settings, "size", 64)?;
    let seed = resolve(common.seed, &settings, "seed", 7)?;
    let trials = resolve(trials, &settings, "trials", 100)?;

    let grid = PeriodicGrid::new(n, size)?;
    let partition = build_partition(grid);
    let mut report = ExperimentReport::new("bernstein");
    report.parameters.n = Some(n);
    report.parameters.size = Some(size);
    report.parameters.seed = Some(seed);
    report.provenance.grid_dim = Some(n);
    report.provenance.grid_size = Some(size);
    report.provenance.seed = Some(seed);

    let pairs = [(2.0, f64::INFINITY), (1.0, 2.0), (2.0, 4.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exactness_dev = 0.0f64;
    for (label, (p, q)) in ["2_inf", "1_2", "2_4"].iter().zip(pairs) {
        let mut worst = 0.0f64;
        for t in 0..trials {
            let j = 1 + (t % partition.j_max().saturating_sub(1).max(1)) as i32;
            let radius = (2.0f64).powi(j) * rng.gen_range(0.3..1.0);
            let f = synth::random_band_limited(grid, radius, &mut rng);
            if f.l2_norm() == 0.0 {
                continue;
            }
            worst = worst.max(bernstein_ratio(&f, p, q, j)?);
        }
        report.push_constant(format!("max_ratio_{label}"), worst);
        report.push_verdict(
            format!("bernstein_{label}"),
            worst <= BERNSTEIN_REGRESSION_BOUND,
            worst,
            BERNSTEIN_REGRESSION_BOUND,
            "max ratio below the recorded regression bound",
        );

        // Characters achieve the bound value exactly.
        let j = 3.min(partition.j_max() as i32);
        let mut xi = vec![0i64; n];
        xi[0] = 1 << (j - 1);
        let character = Field::character(grid, &xi)?;
        let got = bernstein_ratio(&character, p, q, j)?;
        let expected = (2.0f64).powf(-(n as f64) * j as f64 * (1.0 / p - 1.0 / q));
        exactness_dev = exactness_dev.max((got - expected).abs() / expected);
    }
    report.push_constant("character_ratio_deviation", exactness_dev);
    report.push_verdict(
        "character_ratio_exact",
        exactness_dev <= 1e-12,
        exactness_dev,
        1e-12,
        "single-character ratio equals 2^(-n j (1/p - 1/q)) to 1e-12 relative",
    );
    Ok(report)
}

fn run_paraproduct(common: &CommonOpts, trials: Option<usize>) -> Result<ExperimentReport, Error> {
    let settings = Settings::load(common.config.as_deref())?;
    let n = resolve(common.n, &settings, "n", 2)?;
    let size = resolve(common.size, &settings, "size", 128)?;
    let alpha = resolve(common.alpha, &settings, "alpha", 0.75)?;
    let s = resolve(common.s, &settings, "s", 0.75)?;
    let seed = resolve(common.seed, &settings, "seed", 7)?;
    let trials = resolve(trials, &settings, "trials", 20)?;

    let grid = PeriodicGrid::new(n, size)?;
    let partition = build_partition(grid);
    let mut report = ExperimentReport::new("paraproduct");
    report.parameters.n = Some(n);
    report.parameters.size = Some(size);
    report.parameters.alpha = Some(alpha);
    report.parameters.s = Some(s);
    report.parameters.seed = Some(seed);
    report.provenance.grid_dim = Some(n);
    report.provenance.grid_size = Some(size);
    report.provenance.seed = Some(seed);
    let scan: Vec<usize> = scan_range(partition.j_max()).collect();
    report.provenance.scan_band_lo = scan.first().copied();
    report.provenance.scan_band_hi = scan.last().copied();

    let mut worst_residual = 0.0f64;
    let mut uncovered = 0usize;
    let mut residuals = Vec::new();
    for t in 0..trials {
        let v = synth::modal_field(grid, seed.wrapping_add(2 * t as u64), 2.5);
        let u = synth::modal_field(grid, seed.wrapping_add(2 * t as u64 + 1), 2.5);
        for dec in decompose_scan(&v, &u, &partition)? {
            let rel = dec.relative_residual();
            residuals.push(rel);
            worst_residual = worst_residual.max(rel);
        }
        uncovered += uncovered_outside_pairs(&v, &u, &partition)?.len();
    }
    report
        .sequences
        .push(NamedSequence::new("decomposition_residuals", residuals));
    report.push_constant("max_decomposition_residual", worst_residual);
    report.push_verdict(
        "decomposition_residual",
        worst_residual <= 1e-8,
        worst_residual,
        1e-8,
        "relative reconstruction residual <= 1e-8 at every scan band",
    );
    report.push_verdict(
        "outside_pairs_covered",
        uncovered == 0,
        uncovered as f64,
        0.0,
        "every Outside pair certified vanishing or below 1e-10 * ||v|| ||u||",
    );

    // Estimate constants on the band-limited standard ensemble.
    let limit = (size.min(64) as f64 / 4.0).min(16.0);
    let mut finite = true;
    for (name, term) in [
        ("c_near", EstimateTerm::Near),
        ("c_high_low", EstimateTerm::HighLow),
        ("c_high_high", EstimateTerm::HighHigh),
    ] {
        let mut ensemble_max = 0.0f64;
        for t in 0..trials {
            let v =
                synth::modal_field_band_limited(grid, seed.wrapping_add(2 * t as u64), 2.0, limit);
            let u = synth::modal_field_band_limited(
                grid,
                seed.wrapping_add(2 * t as u64 + 1),
                2.0,
                limit,
            );
            ensemble_max =
                ensemble_max.max(fit_estimate_constant(term, &v, &u, s, alpha, &partition)?);
        }
        finite &= ensemble_max.is_finite();
        report.push_constant(name, ensemble_max);
    }
    report.push_verdict(
        "zone_constants_finite",
        finite,
        if finite { 1.0 } else { 0.0 },
        1.0,
        "all fitted zone constants finite",
    );
    Ok(report)
}

fn run_counterexample(
    common: &CommonOpts,
    family_n: Option<usize>,
    p: Option<f64>,
    a: Option<f64>,
) -> Result<ExperimentReport, Error> {
    let settings = Settings::load(common.config.as_deref())?;
    let n = resolve(common.n, &settings, "n", 2)?;
    let size = resolve(common.size, &settings, "size", 256)?;
    let rho = resolve(common.rho, &settings, "rho", 1.2)?;
    let family_n = resolve(family_n, &settings, "family_n", 5)?;
    let p = resolve(p, &settings, "p", 3.0)?;
    let a = resolve(a, &settings, "a", 0.5)?;

    let mut report = ExperimentReport::new("counterexample");
    report.parameters.n = Some(n);
    report.parameters.size = Some(size);
    report.parameters.rho = Some(rho);
    report.parameters.p = Some(p);
    report.provenance.grid_dim = Some(n);
    report.provenance.grid_size = Some(size);

    let family = SupercriticalFamily::new(family_n, p)?;
    let cal = calibrate_amplitude(family_n, p)?;
    report.push_constant("amplitude_oracle", cal.oracle);
    report.push_constant("amplitude_form_plus", cal.closed_form_plus);
    report.push_constant("amplitude_form_minus", cal.closed_form_minus);
    report.push_constant("calibration_residual", cal.residual);
    report.notes.push(match cal.matched {
        AmplitudeForm::MinusForm => {
            "oracle amplitude matches (a(n-a-2))^(1/(p-1)) within 1e-8".into()
        }
        AmplitudeForm::PlusForm => {
            "oracle amplitude matches (a(n+a-2))^(1/(p-1)) within 1e-8".into()
        }
        AmplitudeForm::Neither => "oracle amplitude matches neither closed form within 1e-8".into(),
    });
    report.push_verdict(
        "oracle_matches_a_closed_form",
        cal.matched != AmplitudeForm::Neither,
        cal.residual,
        1e-8,
        "residual-minimizing amplitude agrees with one closed form to 1e-8",
    );

    let radii: Vec<f64> = (0..64)
        .map(|i| 0.05 * (0.95f64 / 0.05).powf(i as f64 / 63.0))
        .collect();
    let residual = radial_residual(&family, &radii)?;
    report.push_constant("radial_residual", residual);
    report.push_verdict(
        "radial_residual",
        residual <= 1e-8,
        residual,
        1e-8,
        "max relative residual of the calibrated family <= 1e-8",
    );

    let h1 = h1_membership(&family);
    report.push_constant("h1_margin", h1.margin);
    report.push_verdict(
        "h1_membership",
        h1.in_h1,
        h1.margin,
        0.0,
        "gradient square-integrable: n/2 - a - 1 > 0",
    );

    let grid = PeriodicGrid::new(n, size)?;
    let slope = power_law_decay_slope(grid, a, rho)?;
    let target = -(n as f64 / 2.0 - a);
    report.push_constant("decay_slope", slope);
    report.push_constant("decay_slope_target", target);
    report.push_verdict(
        "decay_slope",
        (slope - target).abs() <= 0.15,
        slope,
        target,
        "measured dyadic slope within 0.15 of -(n/2 - a)",
    );
    Ok(report)
}

fn run_iterate_lemma(
    common: &CommonOpts,
    epsilon: Option<f64>,
    delta: Option<f64>,
    s_start: Option<usize>,
    k_max: Option<usize>,
    iters: Option<usize>,
) -> Result<ExperimentReport, Error> {
    let settings = Settings::load(common.config.as_deref())?;
    let epsilon = resolve(epsilon, &settings, "epsilon", 1.0)?;
    let delta = resolve(delta, &settings, "delta", 0.2)?;
    let s_start = resolve(s_start, &settings, "s_start", 0)?;
    let k_max = resolve(k_max, &settings, "k_max", 64)?;
    let iters = resolve(iters, &settings, "iters", 100_000)?;
    run_iteration_experiment(epsilon, delta, s_start, k_max, iters)
}

fn run_bootstrap_cmd(
    common: &CommonOpts,
    v_scale: Option<f64>,
    perturbation: Option<f64>,
    sigma: Option<f64>,
) -> Result<ExperimentReport, Error> {
    let settings = Settings::load(common.config.as_deref())?;
    let defaults = BootstrapConfig::default();
    let config = BootstrapConfig {
        n: resolve(common.n, &settings, "n", defaults.n)?,
        size: resolve(common.size, &settings, "size", defaults.size)?,
        alpha: resolve(common.alpha, &settings, "alpha", defaults.alpha)?,
        s: resolve(common.s, &settings, "s", defaults.s)?,
        rho: resolve(common.rho, &settings, "rho", defaults.rho)?,
        seed: resolve(common.seed, &settings, "seed", defaults.seed)?,
        v_scale: resolve(v_scale, &settings, "v_scale", defaults.v_scale)?,
        perturbation: resolve(
            perturbation,
            &settings,
            "perturbation",
            defaults.perturbation,
        )?,
        sigma: resolve(sigma, &settings, "sigma", defaults.sigma)?,
    };
    run_bootstrap(&config)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidParameter(_)
        | Error::InvalidInput(_)
        | Error::Precondition(_)
        | Error::Format(_)
        | Error::Io(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = match &cli.command {
        Command::PartitionCheck { common, trials } => {
            (common, run_partition_check(common, *trials))
        }
        Command::Bernstein { common, trials } => (common, run_bernstein(common, *trials)),
        Command::Paraproduct { common, trials } => (common, run_paraproduct(common, *trials)),
        Command::IterateLemma {
            common,
            epsilon,
            delta,
            s_start,
            k_max,
            iters,
        } => (
            common,
            run_iterate_lemma(common, *epsilon, *delta, *s_start, *k_max, *iters),
        ),
        Command::Counterexample {
            common,
            family_n,
            p,
            a,
        } => (common, run_counterexample(common, *family_n, *p, *a)),
        Command::Bootstrap {
            common,
            v_scale,
            perturbation,
            sigma,
        } => (
            common,
            run_bootstrap_cmd(common, *v_scale, *perturbation, *sigma),
        ),
    };
    match result.and_then(|report| emit(&report, common)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
