//! Exhaustive oracles at tiny sizes and seeded Monte Carlo estimators at
//! moderate sizes.
//!
//! The oracles compute the decoder's exact success probability:
//!
//! - BSC: p_c(A) = Σ_y P(y) Σ_x P(x|y)², by enumerating all 2^{n+k}
//!   (received word, message) pairs.
//! - BEC: p_c(A) = Σ_F ε^{|F|}(1−ε)^{n−|F|} 2^{rank(A_F)−k}, by enumerating
//!   all 2^n erasure patterns — given the erasure set, the decoder succeeds
//!   with probability exactly 2^{rank(A_F)−k}.
//! - Ensemble averages enumerate every matrix of the ensemble on top.
//!
//! Each enumeration is fenced by an explicit size guard and returns a
//! [`crate::Error::SizeGuard`] rather than silently truncating.
//!
//! The Monte Carlo estimators are Rao-Blackwellized: the decoder's random
//! draw is never simulated. On the BSC a trial scores the posterior mass of
//! the transmitted message (the exact conditional success probability given
//! the channel realisation); on the BEC it scores 2^{rank(A_F)−k}. Both have
//! the same expectation as simulating the decoder, with strictly lower
//! variance. Trials use disjoint seed substreams and are accumulated in
//! trial order, so estimates are identical at any parallelism level.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{posterior_mass_of, ChannelSpec, POSTERIOR_K_MAX};
use crate::ensemble::{is_typical, EnsembleRule, EnsembleSpec, TypicalityParams};
use crate::gf2::{BitMatrix, BitVector};
use crate::numeric::KahanSum;
use crate::rng::{substream_rng, substream_seed};
use crate::{Error, Result};
use rand::Rng;

/// Enumeration guards, named so error messages can cite them.
pub const EXACT_BSC_N_MAX: usize = 16;
pub const EXACT_BSC_K_MAX: usize = 12;
pub const EXACT_BEC_N_MAX: usize = 20;
pub const EXACT_BERNOULLI_CELLS_MAX: usize = 16;
pub const EXACT_ROW_REGULAR_MATRICES_MAX: u128 = 1_000_000;

/// Cap on typicality rejections per trial before the filter is declared
/// infeasible; a filter accepting at least 1% of samples exhausts this with
/// probability below 2e-9 per trial.
const TYPICALITY_MAX_REJECTS: u64 = 2000;

/// A seeded Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub master_seed: u64,
}

fn summarize(values: &[f64], master_seed: u64) -> McEstimate {
    let trials = values.len() as u64;
    let mut acc = KahanSum::new();
    for &v in values {
        acc.add(v);
    }
    let mean = acc.value() / trials as f64;
    let std_error = if trials < 2 {
        0.0
    } else {
        let mut sq = KahanSum::new();
        for &v in values {
            sq.add((v - mean) * (v - mean));
        }
        (sq.value() / ((trials - 1) as f64 * trials as f64)).sqrt()
    };
    McEstimate {
        mean,
        std_error,
        trials,
        master_seed,
    }
}

/// Exact decoder success probability on the BSC for a fixed matrix.
///
/// Enumerates all received words y and, per y, all messages in Gray-code
/// order with incrementally updated codewords, accumulating S1 = Σ_x w(x)
/// and S2 = Σ_x w(x)² so that p_c = 2^{-k} Σ_y S2/S1.
pub fn exact_pc_bsc(a: &BitMatrix, eps: f64) -> Result<f64> {
    let (n, k) = (a.rows(), a.cols());
    if n > EXACT_BSC_N_MAX {
        return Err(Error::SizeGuard(format!(
            "exact_pc_bsc enumerates 2^(n+k) pairs and requires n <= {EXACT_BSC_N_MAX}, got n={n}"
        )));
    }
    if k > EXACT_BSC_K_MAX {
        return Err(Error::SizeGuard(format!(
            "exact_pc_bsc enumerates 2^(n+k) pairs and requires k <= {EXACT_BSC_K_MAX}, got k={k}"
        )));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "cross-over probability must lie in [0,1), got {eps}"
        )));
    }
    let columns = a.column_masks_u64();
    let pow: Vec<f64> = (0..=n)
        .map(|d| eps.powi(d as i32) * (1.0 - eps).powi((n - d) as i32))
        .collect();
    let y_count = 1usize << n;
    let mut s1 = vec![0.0f64; y_count];
    let mut s2 = vec![0.0f64; y_count];
    let mut cw = 0u64;
    let mut gray_prev = 0usize;
    for t in 0..(1usize << k) {
        if t > 0 {
            let gray = t ^ (t >> 1);
            cw ^= columns[(gray ^ gray_prev).trailing_zeros() as usize];
            gray_prev = gray;
        }
        for (y, (v1, v2)) in s1.iter_mut().zip(s2.iter_mut()).enumerate() {
            let d = (y as u64 ^ cw).count_ones() as usize;
            let w = pow[d];
            *v1 += w;
            *v2 += w * w;
        }
    }
    let mut acc = KahanSum::new();
    for y in 0..y_count {
        if s1[y] > 0.0 {
            acc.add(s2[y] / s1[y]);
        }
    }
    Ok(acc.value() / (1u64 << k) as f64)
}

/// Exact decoder success probability on the BEC for a fixed matrix:
/// Σ over erasure sets F of ε^{|F|}(1−ε)^{n−|F|} · 2^{rank(A_F)−k}.
pub fn exact_pc_bec(a: &BitMatrix, eps: f64) -> Result<f64> {
    let (n, k) = (a.rows(), a.cols());
    if n > EXACT_BEC_N_MAX {
        return Err(Error::SizeGuard(format!(
            "exact_pc_bec enumerates 2^n erasure patterns and requires n <= {EXACT_BEC_N_MAX}, got n={n}"
        )));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "erasure probability must lie in [0,1), got {eps}"
        )));
    }
    if eps == 0.0 {
        return Ok(exp2_i(a.rank() as i64 - k as i64));
    }
    let mut acc = KahanSum::new();
    for mask in 0..(1u64 << n) {
        let erased = mask.count_ones() as usize;
        let weight = eps.powi(erased as i32) * (1.0 - eps).powi((n - erased) as i32);
        let keep = BitVector::from_u64(!mask, n);
        let rank = a.keep_rows(&keep)?.rank();
        acc.add(weight * exp2_i(rank as i64 - k as i64));
    }
    Ok(acc.value())
}

fn exp2_i(e: i64) -> f64 {
    (e as f64).exp2()
}

/// Exact ensemble average E_A[p_c(A)] by enumerating every matrix of the
/// ensemble — the gold oracle every bound is compared against.
pub fn exact_ensemble_avg(spec: &EnsembleSpec, channel: &ChannelSpec) -> Result<f64> {
    spec.validate()?;
    channel.validate()?;
    let pc = |m: &BitMatrix| -> Result<f64> {
        match *channel {
            ChannelSpec::Bsc { epsilon } => exact_pc_bsc(m, epsilon),
            ChannelSpec::Bec { epsilon } => exact_pc_bec(m, epsilon),
        }
    };
    match *spec {
        EnsembleSpec::Bernoulli { n, k, rho } => {
            let cells = n * k;
            if cells > EXACT_BERNOULLI_CELLS_MAX {
                return Err(Error::SizeGuard(format!(
                    "exact_ensemble_avg enumerates 2^(n*k) matrices and requires n*k <= \
                     {EXACT_BERNOULLI_CELLS_MAX}, got {cells}"
                )));
            }
            let mut acc = KahanSum::new();
            for bits in 0..(1u64 << cells) {
                let ones = bits.count_ones() as i32;
                let prob = rho.powi(ones) * (1.0 - rho).powi(cells as i32 - ones);
                if prob == 0.0 {
                    continue;
                }
                let mut m = BitMatrix::zeros(n, k);
                for p in 0..cells {
                    if bits >> p & 1 == 1 {
                        m.set(p / k, p % k, true);
                    }
                }
                acc.add(prob * pc(&m)?);
            }
            Ok(acc.value())
        }
        EnsembleSpec::RowRegular { n, k, row_weight } => {
            let patterns = weight_w_vectors(k, row_weight);
            let per_row = patterns.len() as u128;
            let total = per_row
                .checked_pow(n as u32)
                .filter(|&t| t <= EXACT_ROW_REGULAR_MATRICES_MAX)
                .ok_or_else(|| {
                    Error::SizeGuard(format!(
                        "exact_ensemble_avg enumerates C(k,w)^n matrices and requires \
                         C({k},{row_weight})^{n} <= {EXACT_ROW_REGULAR_MATRICES_MAX}"
                    ))
                })?;
            let prob = 1.0 / total as f64;
            let mut digits = vec![0usize; n];
            let mut acc = KahanSum::new();
            loop {
                let rows: Vec<BitVector> = digits.iter().map(|&d| patterns[d].clone()).collect();
                let m = BitMatrix::from_rows(&rows)?;
                acc.add(prob * pc(&m)?);
                // odometer increment over the per-row pattern indices
                let mut pos = 0;
                loop {
                    if pos == n {
                        return Ok(acc.value());
                    }
                    digits[pos] += 1;
                    if digits[pos] < patterns.len() {
                        break;
                    }
                    digits[pos] = 0;
                    pos += 1;
                }
            }
        }
    }
}

/// All weight-w bit vectors of length k, lexicographic by set positions.
fn weight_w_vectors(k: usize, w: usize) -> Vec<BitVector> {
    let mut out = Vec::new();
    let mut choose = vec![0usize; w];
    fn rec(out: &mut Vec<BitVector>, choose: &mut Vec<usize>, k: usize, w: usize, depth: usize) {
        if depth == w {
            let mut v = BitVector::zeros(k);
            for &c in choose.iter() {
                v.set(c, true);
            }
            out.push(v);
            return;
        }
        let start = if depth == 0 { 0 } else { choose[depth - 1] + 1 };
        for c in start..=(k - (w - depth)) {
            choose[depth] = c;
            rec(out, choose, k, w, depth + 1);
        }
    }
    if w == 0 {
        out.push(BitVector::zeros(k));
    } else {
        rec(&mut out, &mut choose, k, w, 0);
    }
    out
}

fn bernoulli_threshold(p: f64) -> u64 {
    (p * 18_446_744_073_709_551_616.0) as u64
}

/// One BSC trial value for a sampled matrix: the posterior mass of the
/// transmitted message under a sampled noise realisation (exact p_c when the
/// enumeration guards allow it).
fn bsc_trial_value(a: &BitMatrix, eps: f64, rng: &mut impl Rng) -> Result<f64> {
    let (n, k) = (a.rows(), a.cols());
    if n <= EXACT_BSC_N_MAX && k <= EXACT_BSC_K_MAX {
        return exact_pc_bsc(a, eps);
    }
    let x_index = rng.gen_range(0..(1usize << k));
    let mut x = BitVector::zeros(k);
    for c in 0..k {
        if x_index >> c & 1 == 1 {
            x.set(c, true);
        }
    }
    let mut y = a.mul_vec(&x)?;
    let threshold = bernoulli_threshold(eps);
    for i in 0..n {
        if rng.gen::<u64>() < threshold {
            y.set(i, !y.get(i));
        }
    }
    Ok(posterior_mass_of(a, &y, eps, x_index))
}

/// One BEC trial value for a sampled matrix: 2^{rank(A_F) − k} for a sampled
/// erasure set F.
fn bec_trial_value(a: &BitMatrix, eps: f64, rng: &mut impl Rng) -> Result<f64> {
    let (n, k) = (a.rows(), a.cols());
    let threshold = bernoulli_threshold(eps);
    let mut keep = BitVector::zeros(n);
    for i in 0..n {
        if rng.gen::<u64>() >= threshold {
            keep.set(i, true);
        }
    }
    let rank = a.keep_rows(&keep)?.rank();
    Ok(exp2_i(rank as i64 - k as i64))
}

/// Seeded Monte Carlo estimate of the ensemble-average success probability,
/// optionally restricted to the density-typical set by rejection sampling.
///
/// Returns the estimate and the number of rejected (non-typical) samples.
pub fn mc_ensemble_pc(
    spec: &EnsembleSpec,
    channel: &ChannelSpec,
    trials: u64,
    seed: u64,
    typicality: Option<TypicalityParams>,
) -> Result<(McEstimate, u64)> {
    spec.validate()?;
    channel.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if matches!(channel, ChannelSpec::Bsc { .. }) && spec.k() > POSTERIOR_K_MAX {
        return Err(Error::SizeGuard(format!(
            "mc_ensemble_pc on the BSC enumerates the posterior and requires k <= \
             {POSTERIOR_K_MAX}, got k={}",
            spec.k()
        )));
    }
    let per_trial: Vec<Result<(f64, u64)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream_rng(seed, t);
            let mut rejected = 0u64;
            let a = loop {
                let candidate = spec.sample(rng.gen::<u64>());
                match &typicality {
                    None => break candidate,
                    Some(p) if is_typical(&candidate, p) => break candidate,
                    Some(p) => {
                        rejected += 1;
                        if rejected >= TYPICALITY_MAX_REJECTS {
                            return Err(Error::Infeasible(format!(
                                "typicality filter (rho_target={}, eta={}) rejected {rejected} \
                                 consecutive samples; acceptance rate is below 1%",
                                p.rho_target, p.eta
                            )));
                        }
                    }
                }
            };
            let value = match *channel {
                ChannelSpec::Bsc { epsilon } => bsc_trial_value(&a, epsilon, &mut rng)?,
                ChannelSpec::Bec { epsilon } => bec_trial_value(&a, epsilon, &mut rng)?,
            };
            Ok((value, rejected))
        })
        .collect();
    let mut values = Vec::with_capacity(trials as usize);
    let mut rejected = 0u64;
    for r in per_trial {
        let (v, rej) = r?;
        values.push(v);
        rejected += rej;
    }
    Ok((summarize(&values, seed), rejected))
}

/// Monte Carlo estimate of p_c for a FIXED matrix over the BEC; used to
/// check the estimator against [`exact_pc_bec`].
pub fn mc_pc_bec(a: &BitMatrix, eps: f64, trials: u64, seed: u64) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "erasure probability must lie in [0,1), got {eps}"
        )));
    }
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream_rng(seed, t);
            bec_trial_value(a, eps, &mut rng)
        })
        .collect::<Result<_>>()?;
    Ok(summarize(&values, seed))
}

/// Monte Carlo mean GF(2) rank of matrices drawn from `spec` (dimensions
/// taken from the ensemble descriptor itself).
pub fn mc_expected_rank(spec: &EnsembleSpec, trials: u64, seed: u64) -> Result<McEstimate> {
    spec.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| spec.sample(substream_seed(seed, t)).rank() as f64)
        .collect();
    Ok(summarize(&values, seed))
}

/// Settings for the random-matrix-sequence convergence experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceSettings {
    pub channel: ChannelSpec,
    pub rule: EnsembleRule,
    /// Code rate R; each grid point uses k = round(n·R).
    pub rate: f64,
    pub n_grid: Vec<usize>,
    pub matrices_per_n: usize,
    /// Threshold for the reported exceedance fraction P(p_e > delta).
    pub delta: f64,
    pub seed: u64,
    /// Per-matrix sample count when exact enumeration is out of reach.
    pub inner_samples: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub n: usize,
    pub k: usize,
    pub matrices_tested: usize,
    pub pe_values: Vec<f64>,
    pub fraction_above_delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub delta: f64,
    pub points: Vec<ConvergencePoint>,
}

/// Per-matrix error probabilities of independently sampled generator
/// sequences: for each n, sample matrices, compute (or estimate) each
/// matrix's p_e, and report the fraction exceeding `delta`.
pub fn convergence_experiment(settings: &ConvergenceSettings) -> Result<ConvergenceReport> {
    let s = settings;
    s.channel.validate()?;
    if !(0.0..=1.0).contains(&s.rate) {
        return Err(Error::InvalidParameter(format!(
            "rate must lie in [0,1], got {}",
            s.rate
        )));
    }
    if s.matrices_per_n == 0 || s.inner_samples == 0 {
        return Err(Error::InvalidParameter(
            "matrices_per_n and inner_samples must be >= 1".into(),
        ));
    }
    let mut points = Vec::with_capacity(s.n_grid.len());
    for (n_idx, &n) in s.n_grid.iter().enumerate() {
        let k = ((n as f64 * s.rate).round() as usize).max(1);
        if matches!(s.channel, ChannelSpec::Bsc { .. }) && k > POSTERIOR_K_MAX {
            return Err(Error::SizeGuard(format!(
                "convergence_experiment on the BSC requires k = round(n*R) <= \
                 {POSTERIOR_K_MAX}, got k={k} at n={n}"
            )));
        }
        let spec = s.rule.instantiate(n, k)?;
        let n_seed = substream_seed(s.seed, n_idx as u64);
        let pe_values: Vec<f64> = (0..s.matrices_per_n)
            .into_par_iter()
            .map(|m_idx| {
                let mut rng = substream_rng(n_seed, m_idx as u64);
                let a = spec.sample(rng.gen::<u64>());
                let pc = match s.channel {
                    ChannelSpec::Bsc { epsilon } => {
                        if n <= EXACT_BSC_N_MAX && k <= EXACT_BSC_K_MAX {
                            exact_pc_bsc(&a, epsilon)?
                        } else {
                            let vals: Vec<f64> = (0..s.inner_samples)
                                .map(|_| bsc_trial_value(&a, epsilon, &mut rng))
                                .collect::<Result<_>>()?;
                            summarize(&vals, 0).mean
                        }
                    }
                    ChannelSpec::Bec { epsilon } => {
                        if n <= EXACT_BEC_N_MAX {
                            exact_pc_bec(&a, epsilon)?
                        } else {
                            let vals: Vec<f64> = (0..s.inner_samples)
                                .map(|_| bec_trial_value(&a, epsilon, &mut rng))
                                .collect::<Result<_>>()?;
                            summarize(&vals, 0).mean
                        }
                    }
                };
                Ok((1.0 - pc).max(0.0))
            })
            .collect::<Result<_>>()?;
        let above = pe_values.iter().filter(|&&p| p > s.delta).count();
        points.push(ConvergencePoint {
            n,
            k,
            matrices_tested: s.matrices_per_n,
            fraction_above_delta: above as f64 / s.matrices_per_n as f64,
            pe_values,
        });
    }
    Ok(ConvergenceReport {
        delta: s.delta,
        points,
    })
}
