//! Iteration lemma for number sequences.
//!
//! A nonnegative sequence `a` that is bounded by 1 from some index `S` on and
//! satisfies the convolution inequality
//!
//! ```text
//! a_k <= 2^(-eps k) + delta * sum_j a_j 2^(-2 eps |k-j|)    for k >= S
//! ```
//!
//! with `0 < delta < (1 - 2^-eps) / 2` decays like `a_k <= M 2^(-eps k)` for
//! an explicit `M`. This module checks the hypotheses, produces the explicit
//! constant, verifies the conclusion, and provides an independent fixed-point
//! oracle that generates hypothesis-satisfying sequences by brute force.
//!
//! All infinite sums are truncated at the sequence length; hypothesis checks
//! add the geometric tail bound to the right-hand side, which is the
//! conservative direction.

use crate::error::{Error, Result};

/// Parameters of the lemma: gain `epsilon`, smallness `delta`, starting index
/// `s_start`, and sequence length `k_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationParams {
    pub epsilon: f64,
    pub delta: f64,
    pub s_start: usize,
    pub k_max: usize,
}

impl IterationParams {
    /// Validates `epsilon > 0` and `0 < delta < (1 - 2^-epsilon)/2`.
    pub fn new(epsilon: f64, delta: f64, s_start: usize, k_max: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon > 0 fails: epsilon = {epsilon}"
            )));
        }
        let threshold = delta_threshold(epsilon);
        if !(delta > 0.0 && delta < threshold) {
            return Err(Error::InvalidParameter(format!(
                "0 < delta < (1 - 2^-epsilon)/2 fails: delta = {delta}, threshold = {threshold}"
            )));
        }
        if k_max == 0 {
            return Err(Error::InvalidParameter("k_max must be at least 1".into()));
        }
        Ok(Self {
            epsilon,
            delta,
            s_start,
            k_max,
        })
    }

    /// Default kernel exponent `2 * epsilon` of the hypothesis convolution.
    pub fn kernel_exponent(&self) -> f64 {
        2.0 * self.epsilon
    }
}

/// The admissibility threshold `(1 - 2^-epsilon)/2` for `delta`.
pub fn delta_threshold(epsilon: f64) -> f64 {
    (1.0 - (2.0f64).powf(-epsilon)) / 2.0
}

/// `C_eps = 2 / (1 - 2^-epsilon)`; note `delta * C_eps < 1` exactly when
/// `delta` is below the admissibility threshold.
pub fn c_eps(epsilon: f64) -> f64 {
    2.0 / (1.0 - (2.0f64).powf(-epsilon))
}

/// Explicit certificate produced from a hypothesis-satisfying sequence.
#[derive(Debug, Clone, Copy)]
pub struct BoundCertificate {
    /// Absorption constant `A` of the reduced inequality.
    pub absorption: f64,
    /// `C_eps = 2 / (1 - 2^-epsilon)`.
    pub c_eps: f64,
    /// Final decay constant: `a_k <= decay * 2^(-eps k)` for all `k`.
    pub decay: f64,
}

/// Right-hand side of the hypothesis at index `k`, truncated at the sequence
/// length: `2^(-eps k) + delta * sum_j a_j 2^(-kernel |k-j|)`.
///
/// Shared verbatim by the checker and the oracle so that fixed points of the
/// oracle map satisfy the checked inequality in identical arithmetic.
fn hypothesis_rhs(a: &[f64], k: usize, epsilon: f64, delta: f64, kernel: f64) -> f64 {
    let mut conv = 0.0;
    for (j, &aj) in a.iter().enumerate() {
        let dist = (k as f64 - j as f64).abs();
        conv += aj * (2.0f64).powf(-kernel * dist);
    }
    (2.0f64).powf(-epsilon * k as f64) + delta * conv
}

/// Geometric tail bound for the truncated convolution:
/// `delta * sup|a| * 2^(-kernel (len - k)) / (1 - 2^-kernel)`.
fn tail_bound(sup: f64, len: usize, k: usize, delta: f64, kernel: f64) -> f64 {
    let decay = (2.0f64).powf(-kernel);
    delta * sup * (2.0f64).powf(-kernel * (len - k) as f64) / (1.0 - decay)
}

fn validate_sequence(a: &[f64], params: &IterationParams) -> Result<()> {
    if a.len() != params.k_max {
        return Err(Error::InvalidInput(format!(
            "sequence length {} does not match k_max = {}",
            a.len(),
            params.k_max
        )));
    }
    if !a.iter().all(|v| v.is_finite() && *v >= 0.0) {
        return Err(Error::InvalidInput(
            "sequence entries must be finite and nonnegative".into(),
        ));
    }
    Ok(())
}

/// Detailed outcome of a hypothesis check.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub holds: bool,
    /// Index of the first failing inequality, if any.
    pub first_violation: Option<usize>,
    /// Largest truncation tail that was added to the right-hand side.
    pub max_tail_bound: f64,
}

/// Checks both hypothesis conditions with an explicit kernel exponent.
pub fn check_hypotheses_kernel(
    a: &[f64],
    params: &IterationParams,
    kernel: f64,
) -> Result<HypothesisReport> {
    validate_sequence(a, params)?;
    let sup = a.iter().cloned().fold(0.0, f64::max);
    let mut max_tail = 0.0f64;
    for k in params.s_start..a.len() {
        if a[k] > 1.0 {
            return Ok(HypothesisReport {
                holds: false,
                first_violation: Some(k),
                max_tail_bound: max_tail,
            });
        }
        let tail = tail_bound(sup, a.len(), k, params.delta, kernel);
        max_tail = max_tail.max(tail);
        let rhs = hypothesis_rhs(a, k, params.epsilon, params.delta, kernel);
        if a[k] > rhs + tail {
            return Ok(HypothesisReport {
                holds: false,
                first_violation: Some(k),
                max_tail_bound: max_tail,
            });
        }
    }
    Ok(HypothesisReport {
        holds: true,
        first_violation: None,
        max_tail_bound: max_tail,
    })
}

/// Checks `0 <= a_k <= 1` and the convolution inequality for `k >= s_start`.
pub fn check_hypotheses(a: &[f64], params: &IterationParams) -> Result<bool> {
    Ok(check_hypotheses_kernel(a, params, params.kernel_exponent())?.holds)
}

/// Computes the explicit bound certificate for a hypothesis-satisfying
/// sequence.
///
/// The absorption constant is
/// `A = 1 + delta * sup|a| * 2^(2 eps S) / (2^(2 eps) - 1)`, which absorbs
/// the `j < S` portion of the convolution into the leading `2^(-eps k)`
/// term, and the final constant is
/// `M = max(A / (1 - delta C_eps), max_{k<S} a_k 2^(eps k))`.
pub fn bound_constant(a: &[f64], params: &IterationParams) -> Result<BoundCertificate> {
    if !check_hypotheses(a, params)? {
        return Err(Error::Precondition(
            "sequence does not satisfy the iteration-lemma hypotheses".into(),
        ));
    }
    let eps = params.epsilon;
    let sup = a.iter().cloned().fold(0.0, f64::max);
    let absorption = 1.0
        + params.delta * sup * (2.0f64).powf(2.0 * eps * params.s_start as f64)
            / ((2.0f64).powf(2.0 * eps) - 1.0);
    let c = c_eps(eps);
    debug_assert!(params.delta * c < 1.0);
    let mut decay = absorption / (1.0 - params.delta * c);
    for (k, &ak) in a.iter().enumerate().take(params.s_start.min(a.len())) {
        decay = decay.max(ak * (2.0f64).powf(eps * k as f64));
    }
    Ok(BoundCertificate {
        absorption,
        c_eps: c,
        decay,
    })
}

/// Verifies the conclusion `a_k <= M * 2^(-eps k)` for every index.
///
/// A relative slack of 1e-12 absorbs the round-off of re-evaluating the
/// product when `M` came from the `k < S` branch.
pub fn verify_conclusion(a: &[f64], cert: &BoundCertificate, params: &IterationParams) -> bool {
    a.iter().enumerate().all(|(k, &ak)| {
        ak <= cert.decay * (2.0f64).powf(-params.epsilon * k as f64) * (1.0 + 1e-12)
    })
}

/// Generates a hypothesis-satisfying sequence by iterating the monotone map
/// `T(a)_k = min(a_k, 2^(-eps k) + delta * sum_j a_j 2^(-kernel |k-j|))`
/// from the all-ones sequence until it is stationary.
///
/// Entries only decrease and are bounded below, so the iteration reaches an
/// exact fixed point; at that point the checked inequality holds in the same
/// arithmetic used here. Fails with the last residual if `iters` steps do
/// not reach the 1e-12 convergence tolerance.
pub fn fixed_point_oracle_kernel(
    params: &IterationParams,
    kernel: f64,
    iters: usize,
) -> Result<Vec<f64>> {
    if iters == 0 {
        return Err(Error::InvalidParameter("iters must be at least 1".into()));
    }
    let mut a = vec![1.0f64; params.k_max];
    let mut last_diff = f64::INFINITY;
    for _ in 0..iters {
        let mut next = a.clone();
        let mut diff = 0.0f64;
        for k in 0..a.len() {
            let rhs = hypothesis_rhs(&a, k, params.epsilon, params.delta, kernel);
            let v = a[k].min(rhs);
            diff = diff.max(a[k] - v);
            next[k] = v;
        }
        a = next;
        last_diff = diff;
        if diff == 0.0 {
            return Ok(a);
        }
    }
    if last_diff <= 1e-12 {
        Ok(a)
    } else {
        Err(Error::IterationLimit(format!(
            "fixed-point iteration not converged after {iters} steps, sup residual {last_diff:.3e}"
        )))
    }
}

/// [`fixed_point_oracle_kernel`] with the lemma's own kernel exponent `2 eps`.
pub fn fixed_point_oracle(params: &IterationParams, iters: usize) -> Result<Vec<f64>> {
    fixed_point_oracle_kernel(params, params.kernel_exponent(), iters)
}
