//! Generator-matrix ensembles and their row-overlap parity probabilities.
//!
//! Two distributions over n×k GF(2) matrices are supported:
//!
//! - `Bernoulli`: every entry is independently 1 with probability ρ.
//! - `RowRegular`: every row is drawn uniformly among the C(k, w) vectors of
//!   weight exactly w, rows independent.
//!
//! Besides sampling, the module answers the one question the bound evaluator
//! needs: for a fixed message of weight j, what is the probability that a
//! single ensemble row has odd overlap with it? For Bernoulli rows this is
//! (1 − (1−2ρ)^j)/2; for row-regular rows it is the odd-terms half of a
//! hypergeometric sum,
//!
//! ```text
//! A_j = Σ_{q odd} C(j, q) · C(k−j, w−q) / C(k, w),
//! ```
//!
//! evaluated in the log domain so that k in the thousands is routine. The
//! even-parity mass is B_j = 1 − A_j and is never summed independently
//! outside of tests (the two sums are complements by the Vandermonde
//! identity, so one subtraction is both cheaper and consistent).

use serde::{Deserialize, Serialize};

use crate::gf2::BitMatrix;
use crate::numeric::{LnFactorial, LogSumExp};
use crate::rng::substream_rng;
use crate::{Error, Result};
use rand::Rng;

/// A distribution over n×k generator matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleSpec {
    Bernoulli { n: usize, k: usize, rho: f64 },
    RowRegular { n: usize, k: usize, row_weight: usize },
}

impl EnsembleSpec {
    pub fn bernoulli(n: usize, k: usize, rho: f64) -> Result<Self> {
        let spec = Self::Bernoulli { n, k, rho };
        spec.validate()?;
        Ok(spec)
    }

    pub fn row_regular(n: usize, k: usize, row_weight: usize) -> Result<Self> {
        let spec = Self::RowRegular { n, k, row_weight };
        spec.validate()?;
        Ok(spec)
    }

    /// Row-regular spec with the row weight rounded to the nearest integer
    /// from a target density. Returns the spec and the weight actually used
    /// so callers can record the rounding in their run manifests.
    pub fn row_regular_from_density(n: usize, k: usize, rho: f64) -> Result<(Self, usize)> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::InvalidParameter(format!(
                "target density {rho} outside [0,1]"
            )));
        }
        let w = (k as f64 * rho).round() as usize;
        Ok((Self::row_regular(n, k, w)?, w))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Bernoulli { rho, .. } => {
                if !(0.0..=1.0).contains(&rho) {
                    return Err(Error::InvalidParameter(format!(
                        "Bernoulli density {rho} outside [0,1]"
                    )));
                }
            }
            Self::RowRegular { k, row_weight, .. } => {
                if row_weight > k {
                    return Err(Error::InvalidParameter(format!(
                        "row weight {row_weight} exceeds {k} columns"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        match *self {
            Self::Bernoulli { n, .. } | Self::RowRegular { n, .. } => n,
        }
    }

    pub fn k(&self) -> usize {
        match *self {
            Self::Bernoulli { k, .. } | Self::RowRegular { k, .. } => k,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Bernoulli { .. } => "bernoulli",
            Self::RowRegular { .. } => "row_regular",
        }
    }

    /// The ρ-or-w column value used in CSV output.
    pub fn density_label(&self) -> String {
        match *self {
            Self::Bernoulli { rho, .. } => crate::cli::fmt_real(rho),
            Self::RowRegular { row_weight, .. } => row_weight.to_string(),
        }
    }

    /// Same spec with different dimensions, keeping the density parameter.
    /// For row-regular ensembles the weight is re-rounded from the implied
    /// density of the source spec only when `rescale_weight` is requested;
    /// the plain variant keeps w fixed.
    pub fn with_rows(&self, n: usize) -> Self {
        match *self {
            Self::Bernoulli { k, rho, .. } => Self::Bernoulli { n, k, rho },
            Self::RowRegular { k, row_weight, .. } => Self::RowRegular { n, k, row_weight },
        }
    }

    /// Draw a matrix. Deterministic in (spec, seed); row `i` uses substream
    /// `i` of `seed`, so the sample does not depend on evaluation order.
    pub fn sample(&self, seed: u64) -> BitMatrix {
        match *self {
            Self::Bernoulli { n, k, rho } => {
                let mut m = BitMatrix::zeros(n, k);
                if rho <= 0.0 {
                    return m;
                }
                let all_ones = rho >= 1.0;
                // P(u64 < threshold) = rho up to the f64 quantization of rho·2^64.
                let threshold = (rho * 18_446_744_073_709_551_616.0) as u64;
                for r in 0..n {
                    let mut rng = substream_rng(seed, r as u64);
                    for c in 0..k {
                        if all_ones || rng.gen::<u64>() < threshold {
                            m.set(r, c, true);
                        }
                    }
                }
                m
            }
            Self::RowRegular { n, k, row_weight } => {
                let mut m = BitMatrix::zeros(n, k);
                for r in 0..n {
                    let mut rng = substream_rng(seed, r as u64);
                    // Partial Fisher-Yates: the first `row_weight` entries of
                    // idx end up a uniform w-subset of the columns.
                    let mut idx: Vec<usize> = (0..k).collect();
                    for t in 0..row_weight {
                        let s = rng.gen_range(t..k);
                        idx.swap(t, s);
                        m.set(r, idx[t], true);
                    }
                }
                m
            }
        }
    }

    /// Probability that one ensemble row has odd overlap with a fixed
    /// message of weight `j`.
    pub fn parity_odds(&self, j: usize) -> Result<f64> {
        Ok(self.parity_split(j)?.0)
    }

    /// (odd, even) overlap-parity probabilities for message weight `j`.
    ///
    /// Bernoulli: both halves of (1 ∓ (1−2ρ)^j)/2 are computed through
    /// `log1p`/`expm1` on the magnitude of (1−2ρ)^j, which keeps full
    /// relative precision out to j in the thousands where a plain power
    /// underflows. Row-regular: the odd hypergeometric sum in the log
    /// domain; the even side is its complement.
    pub fn parity_split(&self, j: usize) -> Result<(f64, f64)> {
        if j > self.k() {
            return Err(Error::InvalidParameter(format!(
                "message weight {j} exceeds {} columns",
                self.k()
            )));
        }
        if j == 0 {
            return Ok((0.0, 1.0));
        }
        match *self {
            Self::Bernoulli { rho, .. } => {
                let t = 1.0 - 2.0 * rho;
                // ln |1-2rho|, written to stay precise near |t| = 1.
                let ln_mag = if t >= 0.0 {
                    (-2.0 * rho).ln_1p()
                } else {
                    (2.0 * (rho - 1.0)).ln_1p()
                };
                let magnitude = (j as f64 * ln_mag).exp();
                let near_half = -(j as f64 * ln_mag).exp_m1() / 2.0; // (1 - m)/2
                let other = (1.0 + magnitude) / 2.0;
                let positive = t >= 0.0 || j.is_multiple_of(2); // sign of (1-2rho)^j
                if positive {
                    Ok((near_half, other))
                } else {
                    Ok((other, near_half))
                }
            }
            Self::RowRegular { k, row_weight, .. } => {
                let odd = row_regular_parity_sum(k, row_weight, j, 1);
                Ok((odd, 1.0 - odd))
            }
        }
    }
}

impl EnsembleSpec {
    /// (odd, even) parity split for every message weight j = 0..=k, sharing
    /// one log-factorial table. The bound evaluator calls this once per
    /// evaluation instead of k+1 times through [`Self::parity_split`].
    pub fn parity_split_table(&self) -> Vec<(f64, f64)> {
        let k = self.k();
        match *self {
            Self::Bernoulli { .. } => (0..=k)
                .map(|j| self.parity_split(j).expect("j <= k"))
                .collect(),
            Self::RowRegular { row_weight, .. } => {
                let lf = LnFactorial::up_to(k);
                (0..=k)
                    .map(|j| {
                        let odd = row_regular_parity_with(&lf, k, row_weight, j, 1);
                        (odd, 1.0 - odd)
                    })
                    .collect()
            }
        }
    }
}

/// Σ over q ≡ `parity` (mod 2) of C(j,q)·C(k−j,w−q)/C(k,w), log-domain.
fn row_regular_parity_sum(k: usize, w: usize, j: usize, parity: usize) -> f64 {
    row_regular_parity_with(&LnFactorial::up_to(k), k, w, j, parity)
}

fn row_regular_parity_with(lf: &LnFactorial, k: usize, w: usize, j: usize, parity: usize) -> f64 {
    let ln_denom = lf.ln_binomial(k, w);
    let q_lo = w.saturating_sub(k - j);
    let q_hi = j.min(w);
    let mut lse = LogSumExp::new();
    for q in q_lo..=q_hi {
        if q % 2 == parity {
            lse.add(lf.ln_binomial(j, q) + lf.ln_binomial(k - j, w - q) - ln_denom);
        }
    }
    let v = lse.value();
    if v == f64::NEG_INFINITY {
        0.0
    } else {
        v.exp().clamp(0.0, 1.0)
    }
}

/// A density rule that instantiates an ensemble once the dimensions are
/// known; used wherever n or k vary along a grid (rate inversion, sweeps,
/// convergence experiments). The row-regular variant rounds kρ to the
/// nearest integer row weight, so the weight actually used should be read
/// back from the instantiated spec when it matters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleRule {
    Bernoulli { rho: f64 },
    RowRegular { rho: f64 },
}

impl EnsembleRule {
    pub fn instantiate(&self, n: usize, k: usize) -> Result<EnsembleSpec> {
        match *self {
            Self::Bernoulli { rho } => EnsembleSpec::bernoulli(n, k, rho),
            Self::RowRegular { rho } => {
                Ok(EnsembleSpec::row_regular_from_density(n, k, rho)?.0)
            }
        }
    }

    pub fn rho(&self) -> f64 {
        match *self {
            Self::Bernoulli { rho } | Self::RowRegular { rho } => rho,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Bernoulli { .. } => "bernoulli",
            Self::RowRegular { .. } => "row_regular",
        }
    }
}

/// Membership test parameters for the density-typical set: a matrix is
/// typical when |W(A)/(nk) − ρ| < η.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypicalityParams {
    pub rho_target: f64,
    pub eta: f64,
}

impl TypicalityParams {
    pub fn new(rho_target: f64, eta: f64) -> Result<Self> {
        if eta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "typicality margin eta must be positive, got {eta}"
            )));
        }
        Ok(Self { rho_target, eta })
    }
}

/// Fraction of ones in the matrix; errors on an empty matrix.
pub fn density(a: &BitMatrix) -> Result<f64> {
    let cells = a.rows() * a.cols();
    if cells == 0 {
        return Err(Error::InvalidParameter(
            "density of an empty matrix is undefined".into(),
        ));
    }
    Ok(a.weight() as f64 / cells as f64)
}

/// Whether `a` lies in the density-typical set around `p.rho_target`.
pub fn is_typical(a: &BitMatrix, p: &TypicalityParams) -> bool {
    match density(a) {
        Ok(d) => (d - p.rho_target).abs() < p.eta,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitVector;

    /// Independent even-parity hypergeometric sum for the Vandermonde check.
    fn even_sum(k: usize, w: usize, j: usize) -> f64 {
        row_regular_parity_sum(k, w, j, 0)
    }

    #[test]
    fn degenerate_samples() {
        let zero = EnsembleSpec::bernoulli(5, 7, 0.0).unwrap().sample(3);
        assert_eq!(zero.weight(), 0);
        let ones = EnsembleSpec::row_regular(4, 6, 6).unwrap().sample(3);
        assert_eq!(ones.weight(), 24);
        let dense = EnsembleSpec::bernoulli(4, 6, 1.0).unwrap().sample(9);
        assert_eq!(dense.weight(), 24);
    }

    #[test]
    fn row_regular_rows_have_exact_weight() {
        let spec = EnsembleSpec::row_regular(1000, 100, 30).unwrap();
        let m = spec.sample(17);
        for r in 0..m.rows() {
            assert_eq!(m.row(r).weight(), 30, "row {r}");
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let spec = EnsembleSpec::bernoulli(20, 33, 0.37).unwrap();
        assert_eq!(spec.sample(123), spec.sample(123));
        assert_ne!(spec.sample(123), spec.sample(124));
        let spec = EnsembleSpec::row_regular(20, 33, 11).unwrap();
        assert_eq!(spec.sample(5), spec.sample(5));
    }

    #[test]
    fn density_examples() {
        assert_eq!(density(&BitMatrix::identity(4)).unwrap(), 0.25);
        let ones = EnsembleSpec::row_regular(3, 3, 3).unwrap().sample(0);
        assert_eq!(density(&ones).unwrap(), 1.0);
        assert!(density(&BitMatrix::zeros(0, 4)).is_err());
    }

    #[test]
    fn density_concentrates() {
        // 20000 i.i.d. Bernoulli(0.3) bits stay within 0.05 of the mean with
        // overwhelming probability; demand at least 99% of 1000 seeds.
        let spec = EnsembleSpec::bernoulli(200, 100, 0.3).unwrap();
        let hits = (0..1000u64)
            .filter(|&s| (density(&spec.sample(s)).unwrap() - 0.3).abs() < 0.05)
            .count();
        assert!(hits >= 990, "only {hits}/1000 seeds inside the window");
    }

    #[test]
    fn typicality_examples() {
        let zero = BitMatrix::zeros(3, 3);
        assert!(is_typical(&zero, &TypicalityParams::new(0.0, 0.01).unwrap()));
        let id = BitMatrix::identity(4);
        assert!(is_typical(&id, &TypicalityParams::new(0.25, 1e-3).unwrap()));
        let ones = EnsembleSpec::row_regular(2, 2, 2).unwrap().sample(0);
        assert!(!is_typical(&ones, &TypicalityParams::new(0.3, 0.1).unwrap()));
        assert!(TypicalityParams::new(0.3, 0.0).is_err());
    }

    #[test]
    fn parity_odds_small_cases() {
        let b = EnsembleSpec::bernoulli(4, 8, 0.3).unwrap();
        assert_eq!(b.parity_odds(0).unwrap(), 0.0);
        assert!((b.parity_odds(1).unwrap() - 0.3).abs() < 1e-15);
        // two-bit overlap: P(odd) = 2·0.3·0.7
        assert!((b.parity_odds(2).unwrap() - 0.42).abs() < 1e-15);
        assert!(b.parity_odds(9).is_err());

        // k=4, w=2, j=2: of the six weight-2 rows, four hit the fixed pair
        // in exactly one position.
        let r = EnsembleSpec::row_regular(4, 4, 2).unwrap();
        assert!((r.parity_odds(2).unwrap() - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn parity_half_density_is_half() {
        let b = EnsembleSpec::bernoulli(4, 100, 0.5).unwrap();
        for j in 1..=100 {
            assert_eq!(b.parity_odds(j).unwrap(), 0.5, "j={j}");
        }
    }

    #[test]
    fn parity_survives_extreme_j() {
        // (1-2rho)^j underflows a plain power at rho=0.4, j=2000; the
        // log-domain path must return exactly the limiting value 1/2.
        let b = EnsembleSpec::bernoulli(4, 4000, 0.4).unwrap();
        let p = b.parity_odds(2000).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        // And the rho > 1/2 branch keeps the sign of (1-2rho)^j.
        let d = EnsembleSpec::bernoulli(4, 10, 0.9).unwrap();
        assert!((d.parity_odds(1).unwrap() - 0.9).abs() < 1e-15);
        let expect_j2 = 2.0 * 0.9 * 0.1; // even overlap of two strong bits
        assert!((d.parity_odds(2).unwrap() - expect_j2).abs() < 1e-15);
    }

    #[test]
    fn row_regular_parity_complements_sum_to_one() {
        for &(k, w) in &[(7usize, 3usize), (16, 5), (33, 16), (64, 20)] {
            let spec = EnsembleSpec::row_regular(2, k, w).unwrap();
            for j in 0..=k {
                let a = spec.parity_odds(j).unwrap();
                let b = even_sum(k, w, j);
                assert!(
                    (a + b - 1.0).abs() < 1e-12,
                    "A+B != 1 at k={k} w={w} j={j}: {a} + {b}"
                );
            }
        }
    }

    #[test]
    fn row_regular_full_overlap_forces_row_parity() {
        // j = k forces q = w, so A_k is 1 exactly when w is odd.
        for &(k, w) in &[(9usize, 3usize), (9, 4), (12, 7), (12, 6)] {
            let spec = EnsembleSpec::row_regular(2, k, w).unwrap();
            let a_k = spec.parity_odds(k).unwrap();
            let expect = if w % 2 == 1 { 1.0 } else { 0.0 };
            assert!((a_k - expect).abs() < 1e-12, "k={k} w={w}: A_k={a_k}");
        }
    }

    #[test]
    fn empirical_row_parity_matches_prediction() {
        // 1e5 sampled rows against the analytic odd-overlap probability.
        let trials = 100_000usize;
        let j = 5usize;
        let mut x = BitVector::zeros(24);
        for c in 0..j {
            x.set(c, true);
        }
        for spec in [
            EnsembleSpec::bernoulli(trials, 24, 0.23).unwrap(),
            EnsembleSpec::row_regular(trials, 24, 7).unwrap(),
        ] {
            let p = spec.parity_odds(j).unwrap();
            let m = spec.sample(2024);
            let freq = m.mul_vec(&x).unwrap().weight() as f64 / trials as f64;
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                (freq - p).abs() < 4.0 * se,
                "{}: freq {freq} vs p {p} (se {se})",
                spec.kind_name()
            );
        }
    }

    #[test]
    fn spec_serialization_round_trip() {
        let b = EnsembleSpec::bernoulli(10, 5, 0.25).unwrap();
        let json = serde_json::to_string(&b).unwrap();
        assert!(json.contains("\"kind\":\"bernoulli\"") && json.contains("\"rho\":0.25"));
        assert_eq!(serde_json::from_str::<EnsembleSpec>(&json).unwrap(), b);
        let r = EnsembleSpec::row_regular(10, 5, 2).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"kind\":\"row_regular\"") && json.contains("\"row_weight\":2"));
        assert_eq!(serde_json::from_str::<EnsembleSpec>(&json).unwrap(), r);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(EnsembleSpec::bernoulli(2, 2, -0.1).is_err());
        assert!(EnsembleSpec::bernoulli(2, 2, 1.1).is_err());
        assert!(EnsembleSpec::row_regular(2, 2, 3).is_err());
        let (spec, w) = EnsembleSpec::row_regular_from_density(4, 10, 0.25).unwrap();
        assert_eq!(w, 3); // 2.5 rounds half away from zero
        assert_eq!(spec, EnsembleSpec::row_regular(4, 10, 3).unwrap());
    }
}
