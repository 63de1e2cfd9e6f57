//! BSC/BEC noise application and exact posterior computation.
//!
//! The decoder under study draws its output from the posterior P(X = x | Y =
//! y) under a uniform message prior, so its success probability on a fixed
//! generator matrix is E[P(X|Y)]. [`bsc_posterior`] materialises that
//! posterior exactly by enumerating all 2^k messages; it is the reference
//! implementation the Monte Carlo estimators and the exhaustive oracles lean
//! on. Enumeration is guarded at k ≤ 24: the decoder is exponential in k by
//! nature, and larger k is the bounds' territory, not simulation's.

use serde::{Deserialize, Serialize};

use crate::gf2::{BitMatrix, BitVector};
use crate::numeric::{binary_entropy, LogSumExp};
use crate::rng::substream_rng;
use crate::{Error, Result};
use rand::Rng;

/// Largest message length for which the 2^k posterior is enumerated.
pub const POSTERIOR_K_MAX: usize = 24;

/// A memoryless binary channel: symmetric (bit flips) or erasure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSpec {
    /// Binary symmetric channel; `epsilon` is the cross-over probability.
    Bsc { epsilon: f64 },
    /// Binary erasure channel; `epsilon` is the erasure probability.
    Bec { epsilon: f64 },
}

impl ChannelSpec {
    pub fn bsc(epsilon: f64) -> Result<Self> {
        let c = Self::Bsc { epsilon };
        c.validate()?;
        Ok(c)
    }

    pub fn bec(epsilon: f64) -> Result<Self> {
        let c = Self::Bec { epsilon };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let eps = self.epsilon();
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::InvalidParameter(format!(
                "channel parameter must lie in [0,1), got {eps}"
            )));
        }
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        match *self {
            Self::Bsc { epsilon } | Self::Bec { epsilon } => epsilon,
        }
    }

    /// Channel capacity in bits per symbol: 1 − h(ε) for the BSC, 1 − ε for
    /// the BEC.
    pub fn capacity(&self) -> f64 {
        match *self {
            Self::Bsc { epsilon } => 1.0 - binary_entropy(epsilon),
            Self::Bec { epsilon } => 1.0 - epsilon,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Bsc { .. } => "bsc",
            Self::Bec { .. } => "bec",
        }
    }
}

/// Result of pushing a codeword through the erasure channel: the erasure set
/// as a mask (bit = 1 means erased) plus the surviving code bits in their
/// original order.
#[derive(Debug, Clone, PartialEq)]
pub struct BecOutput {
    pub erased: BitVector,
    pub survivors: BitVector,
}

/// Flip each bit of `z` independently with probability `eps`.
pub fn bsc_apply(z: &BitVector, eps: f64, seed: u64) -> Result<BitVector> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "cross-over probability must lie in [0,1), got {eps}"
        )));
    }
    let mut rng = substream_rng(seed, 0);
    let threshold = (eps * 18_446_744_073_709_551_616.0) as u64;
    let mut out = z.clone();
    for i in 0..z.len() {
        if rng.gen::<u64>() < threshold {
            out.set(i, !out.get(i));
        }
    }
    Ok(out)
}

/// Erase each position of `z` independently with probability `eps`; the
/// survivors keep their relative order.
pub fn bec_apply(z: &BitVector, eps: f64, seed: u64) -> Result<BecOutput> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "erasure probability must lie in [0,1), got {eps}"
        )));
    }
    let mut rng = substream_rng(seed, 0);
    let threshold = (eps * 18_446_744_073_709_551_616.0) as u64;
    let mut erased = BitVector::zeros(z.len());
    for i in 0..z.len() {
        if rng.gen::<u64>() < threshold {
            erased.set(i, true);
        }
    }
    Ok(apply_erasures(z, &erased))
}

/// Deterministic part of the erasure channel: split `z` by a given mask.
pub fn apply_erasures(z: &BitVector, erased: &BitVector) -> BecOutput {
    assert_eq!(z.len(), erased.len());
    let mut survivors = BitVector::zeros(z.len() - erased.weight());
    let mut dst = 0;
    for i in 0..z.len() {
        if !erased.get(i) {
            if z.get(i) {
                survivors.set(dst, true);
            }
            dst += 1;
        }
    }
    BecOutput {
        erased: erased.clone(),
        survivors,
    }
}

/// Exact posterior P(X = x | Y = y) for all 2^k messages, indexed by the
/// message read as an integer (message bit c is bit c of the index).
///
/// With a uniform prior the posterior is ε^d (1−ε)^{n−d} normalised over all
/// messages, where d is the Hamming distance from y to the codeword of x.
/// Weights are handled as distance counts and normalised in the log domain,
/// so blocklengths well past the underflow point of plain powers are fine.
/// For ε = 0 the posterior is uniform over the messages whose codeword equals
/// y exactly; if there is none, y is impossible under the model and an error
/// is returned.
pub fn bsc_posterior(a: &BitMatrix, y: &BitVector, eps: f64) -> Result<Vec<f64>> {
    let (n, k) = (a.rows(), a.cols());
    if k > POSTERIOR_K_MAX {
        return Err(Error::SizeGuard(format!(
            "bsc_posterior enumerates 2^k messages and requires k <= {POSTERIOR_K_MAX}, got {k}"
        )));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "received word length {} vs {} code bits",
            y.len(),
            n
        )));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "cross-over probability must lie in [0,1), got {eps}"
        )));
    }

    let distances = codeword_distances(a, y);
    if eps == 0.0 {
        let exact = distances.iter().filter(|&&d| d == 0).count();
        if exact == 0 {
            return Err(Error::Infeasible(
                "received word is not a codeword but the channel is noiseless".into(),
            ));
        }
        let p = 1.0 / exact as f64;
        return Ok(distances
            .iter()
            .map(|&d| if d == 0 { p } else { 0.0 })
            .collect());
    }

    // log-weight of distance d is d·ln(ε) + (n−d)·ln(1−ε); normalize with a
    // log-sum-exp over the distance histogram rather than all 2^k terms.
    let l_eps = eps.ln();
    let l_1me = (1.0 - eps).ln();
    let mut hist = vec![0u64; n + 1];
    for &d in &distances {
        hist[d] += 1;
    }
    let mut lse = LogSumExp::new();
    for (d, &count) in hist.iter().enumerate() {
        if count > 0 {
            lse.add((count as f64).ln() + d as f64 * l_eps + (n - d) as f64 * l_1me);
        }
    }
    let log_norm = lse.value();
    Ok(distances
        .iter()
        .map(|&d| (d as f64 * l_eps + (n - d) as f64 * l_1me - log_norm).exp())
        .collect())
}

/// Hamming distances from `y` to every codeword, Gray-code order folded back
/// to natural message indexing. Codewords are updated incrementally by
/// XOR-ing one generator column per step; the hot loop works on raw words.
pub(crate) fn codeword_distances(a: &BitMatrix, y: &BitVector) -> Vec<usize> {
    let k = a.cols();
    let words = y.words().len();
    let columns: Vec<Vec<u64>> = (0..k)
        .map(|c| {
            let mut col = BitVector::zeros(a.rows());
            for r in 0..a.rows() {
                if a.get(r, c) {
                    col.set(r, true);
                }
            }
            col.words().to_vec()
        })
        .collect();
    let y_words = y.words();
    let mut out = vec![0usize; 1usize << k];
    let mut cw = vec![0u64; words];
    let mut gray_prev = 0usize;
    for t in 0..(1usize << k) {
        if t > 0 {
            let gray = t ^ (t >> 1);
            let flipped = (gray ^ gray_prev).trailing_zeros() as usize;
            for (w, c) in cw.iter_mut().zip(&columns[flipped]) {
                *w ^= c;
            }
            gray_prev = gray;
        }
        out[gray_prev] = cw
            .iter()
            .zip(y_words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum();
    }
    out
}

/// Posterior mass of a single message under the BSC, computed from the same
/// distance histogram as [`bsc_posterior`] without materialising the full
/// 2^k vector. Used by the Monte Carlo estimators.
pub(crate) fn posterior_mass_of(a: &BitMatrix, y: &BitVector, eps: f64, x_index: usize) -> f64 {
    let n = a.rows();
    let distances = codeword_distances(a, y);
    if eps == 0.0 {
        let exact = distances.iter().filter(|&&d| d == 0).count();
        return if distances[x_index] == 0 {
            1.0 / exact as f64
        } else {
            0.0
        };
    }
    let l_eps = eps.ln();
    let l_1me = (1.0 - eps).ln();
    let mut hist = vec![0u64; n + 1];
    for &d in &distances {
        hist[d] += 1;
    }
    let mut lse = LogSumExp::new();
    for (d, &count) in hist.iter().enumerate() {
        if count > 0 {
            lse.add((count as f64).ln() + d as f64 * l_eps + (n - d) as f64 * l_1me);
        }
    }
    let d0 = distances[x_index] as f64;
    (d0 * l_eps + (n - d0 as usize) as f64 * l_1me - lse.value()).exp()
}
