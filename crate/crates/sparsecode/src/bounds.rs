//! Log-domain evaluation of the achievability lower bounds, rate inversion,
//! exponent fitting, margin diagnostics, density sweeps and the
//! normal-approximation baseline.
//!
//! # The BSC bound
//!
//! For an ensemble over n×k generator matrices and a BSC with cross-over ε,
//! the ensemble-average success probability of the posterior-sampling
//! decoder is lower-bounded by
//!
//! ```text
//!   value = Σ_i C(n,i) ε^i (1−ε)^{n−i} · r_i,
//!   r_i   = ε^i (1−ε)^{n−i} / Σ_j C(k,j) g(j)^i (1−g(j))^{n−i},
//! ```
//!
//! where g(j) is the probability that one ensemble row disagrees with a
//! flipped noise bit against a message of weight j:
//!
//! ```text
//!   g(j) = ε·P(even overlap) + (1−ε)·P(odd overlap) = ε + (1−2ε)·P(odd).
//! ```
//!
//! Both ensembles flow through this single evaluator; only the overlap
//! parity split differs (closed form for Bernoulli, hypergeometric for
//! row-regular). Since a weight-0 message never overlaps a row, g(0) = ε
//! exactly and the j = 0 denominator term equals the numerator. The
//! evaluator exploits that anchor by summing the denominator relative to the
//! numerator:
//!
//! ```text
//!   1/r_i = Σ_j exp( ln C(k,j) + i·ln(g(j)/ε) + (n−i)·ln((1−g(j))/(1−ε)) )
//! ```
//!
//! whose j = 0 term is exactly 1, so r_i ≤ 1 holds in floating point by
//! construction, every inner sum is a stable log-sum-exp, and the outer sum
//! runs in the linear domain under compensated accumulation. The error side
//! is accumulated separately as Σ w_i·(1 − r_i) with `expm1`, so `pe_upper`
//! keeps full relative precision even when the bound saturates near 1.
//!
//! For the row-regular ensemble the two per-row bases are
//! ε·B_j + (1−ε)·A_j on flipped positions and ε·A_j + (1−ε)·B_j on kept
//! positions (A_j odd-overlap, B_j even-overlap). Pairing the bases the
//! other way round would give a j = 0 term of (1−ε)^i ε^{n−i} ≠ numerator
//! and break the b(0) = ε anchor of the margin diagnostics;
//! [`row_regular_j0_anchor`] exposes both pairings so tests can pin the
//! distinction down.
//!
//! # The BEC bound
//!
//! Success probability given an erasure set F is exactly 2^{rank(A_F)−k},
//! so the bound sums binomial erasure-count weights against per-count rank
//! statistics estimated by seeded Monte Carlo. Two estimators are offered:
//! `jensen` uses `2^(E[rank]−k)` (the analytic bound's direction; convexity of
//! 2^x makes it an underestimate) while `direct` averages 2^{rank−k}
//! (unbiased for the true ensemble average). Both estimators are served by
//! the same per-(erasure-count, trial) rank samples for a given seed, so
//! the Jensen ordering holds sample-by-sample, not just in expectation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelSpec;
use crate::ensemble::{EnsembleRule, EnsembleSpec};
use crate::numeric::{binary_entropy, fit_line, q_inv, KahanSum, LnFactorial, LogSumExp};
use crate::rng::substream_seed;
use crate::{Error, Result};

/// Which bound produced a [`BoundResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Bernoulli,
    RowRegular,
    BecJensen,
    BecDirect,
}

impl BoundMethod {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Bernoulli => "bernoulli",
            Self::RowRegular => "row_regular",
            Self::BecJensen => "bec_jensen",
            Self::BecDirect => "bec_direct",
        }
    }
}

/// Contribution of one noise/erasure weight `i` to a bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundTerm {
    pub i: usize,
    /// ln of the binomial weight C(n,i) ε^i (1−ε)^{n−i}.
    pub log_weight: f64,
    /// ln of the per-weight ratio r_i ≤ 1.
    pub log_ratio: f64,
    /// Monte Carlo standard error of r_i (BEC only).
    pub std_error: Option<f64>,
}

/// A bound evaluation: `value` lower-bounds the ensemble-average success
/// probability, `pe_upper = 1 − value` upper-bounds the average error
/// probability (accumulated independently for precision near saturation).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundResult {
    pub value: f64,
    pub pe_upper: f64,
    pub terms: Vec<BoundTerm>,
    /// Inclusive truncation window on i, when one was requested.
    pub window: Option<(usize, usize)>,
    /// Binomial mass outside the window, charged to `pe_upper`.
    pub truncated_mass: f64,
    pub method: BoundMethod,
    /// Combined Monte Carlo standard error of `value` (BEC only).
    pub std_error: Option<f64>,
}

struct PerTerm {
    term: BoundTerm,
    ratio: f64,
    one_minus_ratio: f64,
}

fn xlog(count: usize, log: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * log
    }
}

/// Inclusive i-window `[n(ε−δ), n(ε+δ)] ∩ [0, n]`; full range when no δ.
fn resolve_window(n: usize, eps: f64, delta: Option<f64>) -> Result<(usize, usize)> {
    let Some(d) = delta else {
        return Ok((0, n));
    };
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "truncation window delta must lie in (0,1], got {d}"
        )));
    }
    let lo = (n as f64 * (eps - d)).ceil().max(0.0) as usize;
    let hi = ((n as f64 * (eps + d)).floor() as usize).min(n);
    if lo > hi {
        return Err(Error::InvalidParameter(format!(
            "truncation window [{lo}, {hi}] around n·eps = {} is empty",
            n as f64 * eps
        )));
    }
    Ok((lo, hi))
}

fn reduce_terms(
    per_terms: Vec<PerTerm>,
    window: Option<(usize, usize)>,
    windowed: bool,
    method: BoundMethod,
    mc_errors: bool,
) -> BoundResult {
    let mut value = KahanSum::new();
    let mut pe = KahanSum::new();
    let mut mass = KahanSum::new();
    let mut var = KahanSum::new();
    for t in &per_terms {
        let w = t.term.log_weight.exp();
        mass.add(w);
        value.add(w * t.ratio);
        pe.add(w * t.one_minus_ratio);
        if let Some(se) = t.term.std_error {
            var.add(w * se * w * se);
        }
    }
    let truncated_mass = (1.0 - mass.value()).max(0.0);
    BoundResult {
        value: value.value().clamp(0.0, 1.0),
        pe_upper: (pe.value() + truncated_mass).min(1.0),
        terms: per_terms.into_iter().map(|t| t.term).collect(),
        window: if windowed { window } else { None },
        truncated_mass,
        method,
        std_error: if mc_errors {
            Some(var.value().sqrt())
        } else {
            None
        },
    }
}

/// Lower bound on the ensemble-average success probability over the BSC.
///
/// `window` is an opt-in Chernoff-style truncation half-width δ restricting
/// the outer sum to i ∈ [n(ε−δ), n(ε+δ)]; the mass left out is reported and
/// charged to `pe_upper`, so a truncated result is still a valid bound.
pub fn bsc_ensemble_bound(
    spec: &EnsembleSpec,
    eps: f64,
    window: Option<f64>,
) -> Result<BoundResult> {
    spec.validate()?;
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "the BSC bound requires eps in [0, 1/2); got {eps} (capacity-side conventions break \
             at and above 1/2)"
        )));
    }
    let (n, k) = (spec.n(), spec.k());
    let (lo, hi) = resolve_window(n, eps, window)?;
    let parity = spec.parity_split_table();
    let l_eps = eps.ln();
    let l_1me = (1.0 - eps).ln();

    // Per-j log offsets of the denominator bases relative to the j = 0
    // anchor (g(0), 1−g(0)) = (ε, 1−ε). Both bases are convex mixes of the
    // parity split, so no cancellation occurs here.
    let mut d_flip = vec![0.0f64; k + 1];
    let mut d_keep = vec![0.0f64; k + 1];
    for j in 1..=k {
        let (p_odd, p_even) = parity[j];
        let flip = eps * p_even + (1.0 - eps) * p_odd;
        let keep = eps * p_odd + (1.0 - eps) * p_even;
        d_flip[j] = flip.ln() - l_eps;
        d_keep[j] = keep.ln() - l_1me;
    }

    let lf = LnFactorial::up_to(n.max(k));
    let per_terms: Vec<PerTerm> = (lo..=hi)
        .into_par_iter()
        .filter_map(|i| {
            let log_weight = lf.ln_binomial(n, i) + xlog(i, l_eps) + xlog(n - i, l_1me);
            if log_weight == f64::NEG_INFINITY {
                return None;
            }
            let mut denom = LogSumExp::new();
            for j in 0..=k {
                let mut t = lf.ln_binomial(k, j);
                if i > 0 {
                    t += i as f64 * d_flip[j];
                }
                if i < n {
                    t += (n - i) as f64 * d_keep[j];
                }
                denom.add(t);
            }
            let log_ratio = -denom.value();
            Some(PerTerm {
                term: BoundTerm {
                    i,
                    log_weight,
                    log_ratio,
                    std_error: None,
                },
                ratio: log_ratio.exp(),
                one_minus_ratio: -log_ratio.exp_m1(),
            })
        })
        .collect();

    let method = match spec {
        EnsembleSpec::Bernoulli { .. } => BoundMethod::Bernoulli,
        EnsembleSpec::RowRegular { .. } => BoundMethod::RowRegular,
    };
    Ok(reduce_terms(
        per_terms,
        Some((lo, hi)),
        window.is_some(),
        method,
        false,
    ))
}

/// The two possible pairings of the row-regular per-row bases with the
/// (flipped, kept) exponents. `FlipCarriesOdd` is the implemented
/// convention: on a flipped position the row must disagree with the noise,
/// which happens with probability ε·B_j + (1−ε)·A_j. `FlipCarriesEven`
/// swaps the two bases; it fails the j = 0 anchor (the weight-0 denominator
/// term no longer equals the numerator) and is exposed only so tests can
/// demonstrate the failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentPairing {
    FlipCarriesOdd,
    FlipCarriesEven,
}

/// (log numerator, log j=0 denominator term) of the row-regular bound at
/// noise weight `i` under the given base pairing. With `FlipCarriesOdd`
/// the two are equal by construction.
pub fn row_regular_j0_anchor(
    n: usize,
    k: usize,
    row_weight: usize,
    eps: f64,
    i: usize,
    pairing: ExponentPairing,
) -> Result<(f64, f64)> {
    if i > n {
        return Err(Error::InvalidParameter(format!("i = {i} exceeds n = {n}")));
    }
    if !(0.0 < eps && eps < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "anchor check requires eps in (0, 1/2), got {eps}"
        )));
    }
    let spec = EnsembleSpec::row_regular(n, k, row_weight)?;
    let (p_odd, p_even) = spec.parity_split(0)?;
    let (base_flip, base_keep) = match pairing {
        ExponentPairing::FlipCarriesOdd => (
            eps * p_even + (1.0 - eps) * p_odd,
            eps * p_odd + (1.0 - eps) * p_even,
        ),
        ExponentPairing::FlipCarriesEven => (
            eps * p_odd + (1.0 - eps) * p_even,
            eps * p_even + (1.0 - eps) * p_odd,
        ),
    };
    let log_num = xlog(i, eps.ln()) + xlog(n - i, (1.0 - eps).ln());
    let log_j0 = xlog(i, base_flip.ln()) + xlog(n - i, base_keep.ln());
    Ok((log_num, log_j0))
}

/// Monte Carlo estimator for the per-erasure-count rank statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BecEstimator {
    /// `2^(E[rank]−k)`: the analytic bound's Jensen direction.
    Jensen,
    /// E[2^{rank−k}]: unbiased for the exact ensemble average.
    Direct,
}

impl BecEstimator {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Jensen => "jensen",
            Self::Direct => "direct",
        }
    }
}

/// Rank-based bound on the ensemble-average success probability over the
/// BEC. For each erasure count i in the (optional) window, `trials`
/// matrices of shape (n−i)×k are sampled from the ensemble and their GF(2)
/// ranks summarized by the chosen estimator. Identical (spec, eps, trials,
/// seed) draw identical rank samples for both estimators.
pub fn bec_bound(
    spec: &EnsembleSpec,
    eps: f64,
    estimator: BecEstimator,
    trials: u64,
    seed: u64,
    window: Option<f64>,
) -> Result<BoundResult> {
    spec.validate()?;
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "erasure probability must lie in [0,1), got {eps}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let (n, k) = (spec.n(), spec.k());
    let (lo, hi) = resolve_window(n, eps, window)?;
    let lf = LnFactorial::up_to(n);
    let l_eps = eps.ln();
    let l_1me = (1.0 - eps).ln();
    let ln2 = std::f64::consts::LN_2;

    let per_terms: Vec<PerTerm> = (lo..=hi)
        .into_par_iter()
        .filter_map(|i| {
            let log_weight = lf.ln_binomial(n, i) + xlog(i, l_eps) + xlog(n - i, l_1me);
            if log_weight == f64::NEG_INFINITY {
                return None;
            }
            let sub = spec.with_rows(n - i);
            let i_seed = substream_seed(seed, i as u64);
            let ranks: Vec<f64> = (0..trials)
                .map(|t| sub.sample(substream_seed(i_seed, t)).rank() as f64)
                .collect();
            let tf = trials as f64;
            let mean_rank = ranks.iter().sum::<f64>() / tf;
            let (ratio, one_minus_ratio, log_ratio, se) = match estimator {
                BecEstimator::Jensen => {
                    let log_ratio = ln2 * (mean_rank - k as f64);
                    let ratio = log_ratio.exp();
                    let se_mean = if trials < 2 {
                        0.0
                    } else {
                        let var = ranks.iter().map(|r| (r - mean_rank).powi(2)).sum::<f64>()
                            / (tf - 1.0);
                        (var / tf).sqrt()
                    };
                    // delta method: d/dm 2^{m−k} = ln2 · 2^{m−k}
                    (ratio, -log_ratio.exp_m1(), log_ratio, ln2 * ratio * se_mean)
                }
                BecEstimator::Direct => {
                    let vals: Vec<f64> = ranks.iter().map(|&r| (ln2 * (r - k as f64)).exp()).collect();
                    // complements accumulated on their own so that
                    // 1 − ratio keeps precision when most ranks equal k
                    let one_minus: f64 = ranks
                        .iter()
                        .map(|&r| -(ln2 * (r - k as f64)).exp_m1())
                        .sum::<f64>()
                        / tf;
                    let mean = vals.iter().sum::<f64>() / tf;
                    let se = if trials < 2 {
                        0.0
                    } else {
                        let var =
                            vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (tf - 1.0);
                        (var / tf).sqrt()
                    };
                    (mean, one_minus, mean.ln(), se)
                }
            };
            Some(PerTerm {
                term: BoundTerm {
                    i,
                    log_weight,
                    log_ratio,
                    std_error: Some(se),
                },
                ratio,
                one_minus_ratio,
            })
        })
        .collect();

    let method = match estimator {
        BecEstimator::Jensen => BoundMethod::BecJensen,
        BecEstimator::Direct => BoundMethod::BecDirect,
    };
    Ok(reduce_terms(
        per_terms,
        Some((lo, hi)),
        window.is_some(),
        method,
        true,
    ))
}

/// Options threaded through rate inversion (and anything else that may have
/// to evaluate the BEC bound repeatedly).
#[derive(Debug, Clone, Copy)]
pub struct RateOptions {
    /// Truncation half-width for every bound evaluation (None = exact sum).
    pub window: Option<f64>,
    pub bec_estimator: BecEstimator,
    pub bec_trials: u64,
    pub seed: u64,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            window: None,
            bec_estimator: BecEstimator::Jensen,
            bec_trials: 200,
            seed: 0,
        }
    }
}

/// Largest message length whose bound meets a target error probability.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RatePoint {
    pub n: usize,
    pub k_star: usize,
    pub rate: f64,
    pub target_pe: f64,
    /// pe_upper at k_star (0 when k_star = 0: a zero-rate code never errs).
    pub achieved_pe_bound: f64,
    /// Steps in the descending scan where pe_upper failed to shrink with k;
    /// monotonicity in k is plausible but unproven, so the scan verifies
    /// every candidate instead of bisecting and reports what it saw.
    pub non_monotone_steps: usize,
}

/// Find k* = the largest k ≤ n whose bound meets `target_pe`, by a
/// descending verified scan from k = ⌈n·capacity⌉. The scan stops at the
/// first success; k* = 0 is legal and means even one message bit misses the
/// target.
pub fn max_rate(
    n: usize,
    channel: &ChannelSpec,
    rule: &EnsembleRule,
    target_pe: f64,
    opts: &RateOptions,
) -> Result<RatePoint> {
    channel.validate()?;
    if !(0.0 < target_pe && target_pe < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target error probability must lie in (0,1), got {target_pe}"
        )));
    }
    let k0 = ((n as f64 * channel.capacity()).ceil() as usize).min(n);
    let mut prev_pe: Option<f64> = None;
    let mut non_monotone_steps = 0usize;
    for k in (1..=k0).rev() {
        let spec = rule.instantiate(n, k)?;
        let pe = match *channel {
            ChannelSpec::Bsc { epsilon } => {
                bsc_ensemble_bound(&spec, epsilon, opts.window)?.pe_upper
            }
            ChannelSpec::Bec { epsilon } => {
                bec_bound(
                    &spec,
                    epsilon,
                    opts.bec_estimator,
                    opts.bec_trials,
                    substream_seed(opts.seed, k as u64),
                    opts.window,
                )?
                .pe_upper
            }
        };
        // Descending in k should shrink pe_upper; count the exceptions.
        if let Some(p) = prev_pe {
            if pe > p {
                non_monotone_steps += 1;
            }
        }
        prev_pe = Some(pe);
        if pe <= target_pe {
            return Ok(RatePoint {
                n,
                k_star: k,
                rate: k as f64 / n as f64,
                target_pe,
                achieved_pe_bound: pe,
                non_monotone_steps,
            });
        }
    }
    Ok(RatePoint {
        n,
        k_star: 0,
        rate: 0.0,
        target_pe,
        achieved_pe_bound: 0.0,
        non_monotone_steps,
    })
}

/// Least-squares exponent estimate from (n, pe_upper) pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentFit {
    pub points: Vec<(usize, f64)>,
    /// Slope of −log₂(pe_upper) against n, in bits per symbol. Since
    /// pe_upper upper-bounds the ensemble error probability, the slope is a
    /// lower estimate of the ensemble exponent.
    pub slope_bits_per_symbol: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fit −log₂(pe_upper) = slope·n + intercept. Requires at least three
/// points with pe_upper strictly inside (0, 1).
pub fn exponent_fit(points: &[(usize, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "exponent fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(n, pe)) = points.iter().find(|&&(_, pe)| !(pe > 0.0 && pe < 1.0)) {
        return Err(Error::InvalidParameter(format!(
            "pe_upper must lie strictly in (0,1) for the log fit; got {pe} at n = {n}"
        )));
    }
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, pe)| (n as f64, -pe.log2()))
        .collect();
    let (slope, intercept, r_squared) = fit_line(&xy);
    Ok(ExponentFit {
        points: points.to_vec(),
        slope_bits_per_symbol: slope,
        intercept,
        r_squared,
    })
}

/// Window half-width used by [`margin_diagnostics`] when none is supplied.
pub const DEFAULT_MARGIN_WINDOW: f64 = 0.02;

/// Plain per-message-weight margin
/// a = ((b/ε)^x ((1−b)/(1−ε))^{1−x})^{1/R} at noise fraction x = i/n.
pub fn margin_a(b: f64, eps: f64, rate: f64, noise_fraction: f64) -> f64 {
    let x = noise_fraction;
    (((b / eps).ln() * x + ((1.0 - b) / (1.0 - eps)).ln() * (1.0 - x)) / rate).exp()
}

/// Margin diagnostics for the bound's denominator: b(j) = g(j) and the
/// multiplicity-adjusted margins C(k,j)^{1/k}·a(j,i) with
/// a(j,i) = ((b/ε)^{i/n} ((1−b)/(1−ε))^{(n−i)/n})^{1/R}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundDiagnostics {
    /// max over j ≥ 1 and i in the window of C(k,j)^{1/k}·a(j,i) — the k-th
    /// root of the j-th denominator term over the numerator. The plain
    /// a(j,i) is `inner^{1/R}` for an R-independent `inner < 1`, so it
    /// cannot detect an above-capacity configuration; folding in the count
    /// of weight-j messages restores exactly the quantity whose k-th power
    /// must vanish (≈ a for small j, ≈ 2a at j = k/2, and 2·a(∞) crosses 1
    /// precisely when R ≥ C).
    pub max_a_ji: f64,
    pub argmax_j: usize,
    pub argmax_i: usize,
    /// b(j) for j = 0..=k; b(0) = ε is the anchor, b(j) → 1/2 as j grows.
    pub b_values: Vec<f64>,
}

/// Evaluate the denominator margins over i in the window [n(ε−δ), n(ε+δ)].
/// Below capacity (with a small enough window) the reported maximum sits
/// strictly under 1; above capacity it crosses 1 — this is a diagnostic,
/// not a failure.
pub fn margin_diagnostics(
    spec: &EnsembleSpec,
    eps: f64,
    window: Option<f64>,
) -> Result<BoundDiagnostics> {
    spec.validate()?;
    if !(0.0 < eps && eps < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "margin diagnostics require eps in (0, 1/2), got {eps}"
        )));
    }
    let (n, k) = (spec.n(), spec.k());
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter(
            "margin diagnostics need n >= 1 and k >= 1".into(),
        ));
    }
    let rate = k as f64 / n as f64;
    let (lo, hi) = resolve_window(n, eps, Some(window.unwrap_or(DEFAULT_MARGIN_WINDOW)))?;
    let parity = spec.parity_split_table();
    let lf = LnFactorial::up_to(k);
    let b_values: Vec<f64> = (0..=k)
        .map(|j| {
            let (p_odd, p_even) = parity[j];
            eps * p_even + (1.0 - eps) * p_odd
        })
        .collect();
    let mut max_a = f64::NEG_INFINITY;
    let mut argmax = (1usize, lo);
    for (j, &b) in b_values.iter().enumerate().skip(1) {
        let growth = lf.ln_binomial(k, j) / k as f64;
        for i in lo..=hi {
            let a = growth.exp() * margin_a(b, eps, rate, i as f64 / n as f64);
            if a > max_a {
                max_a = a;
                argmax = (j, i);
            }
        }
    }
    Ok(BoundDiagnostics {
        max_a_ji: max_a,
        argmax_j: argmax.0,
        argmax_i: argmax.1,
        b_values,
    })
}

/// Density schedule for the vanishing-density sweeps: ρ(n) = n^{-γ} on the
/// BSC, ρ(n) = c·ln(n)/n on the BEC, both clipped to (0, 1/2].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "snake_case")]
pub enum DensitySchedule {
    PowerLaw { gamma: f64 },
    LogOverN { c: f64 },
}

impl DensitySchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::PowerLaw { gamma } => {
                if !(0.0 < gamma && gamma < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "power-law exponent gamma must lie in (0,1), got {gamma}"
                    )));
                }
            }
            Self::LogOverN { c } => {
                if c <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "log-over-n coefficient c must be positive, got {c}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn rho(&self, n: usize) -> Result<f64> {
        self.validate()?;
        let raw = match *self {
            Self::PowerLaw { gamma } => (n as f64).powf(-gamma),
            Self::LogOverN { c } => {
                if n < 2 {
                    return Err(Error::InvalidParameter(
                        "log-over-n schedule needs n >= 2".into(),
                    ));
                }
                c * (n as f64).ln() / n as f64
            }
        };
        Ok(raw.min(0.5))
    }

    pub fn label(&self) -> String {
        match *self {
            Self::PowerLaw { gamma } => format!("power_law:{gamma}"),
            Self::LogOverN { c } => format!("log_over_n:{c}"),
        }
    }
}

/// One point of a vanishing-density sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub k: usize,
    pub rho_n: f64,
    pub result: BoundResult,
}

/// Evaluate the matching bound along a density schedule at a fixed fraction
/// of capacity. Purely observational: the output reports the trend and
/// asserts nothing about it. The BSC pairs with the power-law schedule and
/// the BEC with the log-over-n schedule.
pub fn vanishing_density_sweep(
    channel: &ChannelSpec,
    schedule: &DensitySchedule,
    r_over_c: f64,
    n_grid: &[usize],
    window: Option<f64>,
    trials: u64,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    channel.validate()?;
    schedule.validate()?;
    match (channel, schedule) {
        (ChannelSpec::Bsc { .. }, DensitySchedule::PowerLaw { .. }) => {}
        (ChannelSpec::Bec { .. }, DensitySchedule::LogOverN { .. }) => {}
        _ => {
            return Err(Error::InvalidParameter(format!(
                "schedule {} does not apply to the {} channel",
                schedule.label(),
                channel.kind_name()
            )))
        }
    }
    if !(0.0 < r_over_c && r_over_c < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rate fraction R/C must lie in (0,1), got {r_over_c}"
        )));
    }
    let mut out = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let rho_n = schedule.rho(n)?;
        let k = (((n as f64) * r_over_c * channel.capacity()).round() as usize).clamp(1, n);
        let spec = EnsembleSpec::bernoulli(n, k, rho_n)?;
        let result = match *channel {
            ChannelSpec::Bsc { epsilon } => bsc_ensemble_bound(&spec, epsilon, window)?,
            ChannelSpec::Bec { epsilon } => bec_bound(
                &spec,
                epsilon,
                BecEstimator::Jensen,
                trials,
                substream_seed(seed, n as u64),
                window,
            )?,
        };
        out.push(SweepPoint {
            n,
            k,
            rho_n,
            result,
        });
    }
    Ok(out)
}

/// Second-order (normal-approximation) achievable-rate baseline for the BSC:
/// C − √(V/n)·Q⁻¹(pe) + log₂(n)/(2n), with dispersion
/// V = ε(1−ε)·log₂²((1−ε)/ε). Comparison baseline only.
pub fn normal_approx_rate(n: usize, eps: f64, target_pe: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("blocklength must be >= 1".into()));
    }
    if !(0.0 < eps && eps < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "normal approximation requires eps in (0, 1/2), got {eps}"
        )));
    }
    if !(0.0 < target_pe && target_pe < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target error probability must lie in (0,1), got {target_pe}"
        )));
    }
    let capacity = 1.0 - binary_entropy(eps);
    let dispersion = eps * (1.0 - eps) * ((1.0 - eps) / eps).log2().powi(2);
    let nf = n as f64;
    Ok(capacity - (dispersion / nf).sqrt() * q_inv(target_pe) + nf.log2() / (2.0 * nf))
}
