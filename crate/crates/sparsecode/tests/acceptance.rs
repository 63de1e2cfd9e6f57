//! Acceptance suite: one test per shipped criterion, each printing a
//! PASS/FAIL line with the measured quantities (run with `--nocapture` to
//! see them). Every tolerance, grid, seed and threshold is pinned here.
//!
//! Run: `cargo test --test acceptance -- --nocapture`

use std::time::Instant;

use num::rational::BigRational;
use num::{BigInt, One, Zero};

use sparsecode::bounds::{
    bec_bound, bsc_ensemble_bound, exponent_fit, max_rate, normal_approx_rate,
    row_regular_j0_anchor, BecEstimator, ExponentPairing, RateOptions,
};
use sparsecode::channel::ChannelSpec;
use sparsecode::cli;
use sparsecode::ensemble::{EnsembleRule, EnsembleSpec};
use sparsecode::montecarlo::{exact_ensemble_avg, exact_pc_bec, mc_ensemble_pc, mc_expected_rank};
use sparsecode::numeric::binary_entropy;
use sparsecode::BitMatrix;

fn config_path(name: &str) -> String {
    format!("{}/configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn temp_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("sparsecode-acceptance-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Criterion 1 — oracle dominance: on every tiny configuration the bound
/// sits strictly below the exhaustive ensemble average, in under 10 s.
#[test]
fn criterion_01_oracle_dominance() {
    let t0 = Instant::now();
    let mut worst_gap = f64::INFINITY;
    let mut cases = 0usize;
    for n in 1..=4usize {
        for k in 1..=3usize {
            for eps in [0.05, 0.11, 0.25] {
                for rho in [0.1, 0.3, 0.5] {
                    let spec = EnsembleSpec::bernoulli(n, k, rho).unwrap();
                    let bound = bsc_ensemble_bound(&spec, eps, None).unwrap().value;
                    let exact =
                        exact_ensemble_avg(&spec, &ChannelSpec::bsc(eps).unwrap()).unwrap();
                    assert!(
                        bound < exact,
                        "FAIL: criterion 1 — bound {bound} >= exact {exact} at \
                         (n={n}, k={k}, eps={eps}, rho={rho})"
                    );
                    worst_gap = worst_gap.min(exact - bound);
                    cases += 1;
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "FAIL: criterion 1 — runtime {elapsed:?} exceeds 10 s"
    );
    println!(
        "PASS: criterion 1 — bound < exhaustive average on all {cases} cases \
         (smallest gap {worst_gap:.3e}) in {elapsed:?}"
    );
}

fn big_binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Criterion 2 — closed-form collapse at density 1/2 (exact-rational
/// oracle) and the guessing floor at density 0.
#[test]
fn criterion_02_closed_form_collapse() {
    // At rho = 1/2 every j >= 1 denominator term collapses to C(k,j):
    // value = sum_i C(n,i) 2^n e^{2i}(1-e)^{2(n-i)} / (2^n e^i (1-e)^{n-i} + 2^k - 1),
    // evaluated here in exact rational arithmetic with e = 11/100.
    let (n, k) = (8usize, 4usize);
    let e = BigRational::new(BigInt::from(11), BigInt::from(100));
    let one = BigRational::one();
    let two_n = BigRational::from(BigInt::from(1 << n));
    let two_k_minus_1 = BigRational::from(BigInt::from((1 << k) - 1));
    let mut expect = BigRational::zero();
    for i in 0..=n {
        let core = e.clone().pow(i as i32) * (one.clone() - e.clone()).pow((n - i) as i32);
        let num = two_n.clone() * core.clone() * core.clone();
        let den = two_n.clone() * core + two_k_minus_1.clone();
        expect += BigRational::from(big_binomial(n, i)) * num / den;
    }
    let expect = expect.to_string();
    // Exact rational -> f64 via the decimal expansion of num/den.
    let expect: f64 = {
        let parts: Vec<&str> = expect.split('/').collect();
        let p: f64 = parts[0].parse().unwrap();
        let q: f64 = if parts.len() > 1 { parts[1].parse().unwrap() } else { 1.0 };
        p / q
    };
    let spec = EnsembleSpec::bernoulli(n, k, 0.5).unwrap();
    let got = bsc_ensemble_bound(&spec, 0.11, None).unwrap().value;
    let rel = (got - expect).abs() / expect;
    assert!(
        rel <= 1e-10,
        "FAIL: criterion 2 — collapsed form {expect} vs bound {got} (rel {rel:.2e})"
    );

    let spec0 = EnsembleSpec::bernoulli(6, 3, 0.0).unwrap();
    let v0 = bsc_ensemble_bound(&spec0, 0.11, None).unwrap().value;
    let rel0 = (v0 - 0.125).abs() / 0.125;
    assert!(
        rel0 <= 1e-12,
        "FAIL: criterion 2 — zero-density value {v0} vs 2^-3 (rel {rel0:.2e})"
    );
    println!(
        "PASS: criterion 2 — half-density collapse rel err {rel:.2e} (tol 1e-10), \
         zero-density rel err {rel0:.2e} (tol 1e-12)"
    );
}

/// Criterion 3 — the row-regular base pairing anchors the weight-0
/// denominator term to the numerator; the swapped pairing demonstrably
/// does not.
#[test]
fn criterion_03_row_regular_anchor() {
    let grid: Vec<(usize, usize, usize, f64, usize)> = vec![
        (10, 5, 2, 0.05, 1),
        (10, 5, 2, 0.05, 3),
        (20, 10, 3, 0.11, 2),
        (20, 10, 3, 0.11, 6),
        (20, 10, 7, 0.25, 4),
        (30, 15, 4, 0.11, 3),
        (30, 15, 4, 0.11, 9),
        (40, 20, 6, 0.05, 4),
        (40, 20, 6, 0.3, 12),
        (50, 25, 7, 0.11, 5),
        (50, 25, 7, 0.11, 15),
        (60, 30, 9, 0.2, 6),
        (60, 30, 9, 0.2, 18),
        (80, 40, 12, 0.11, 8),
        (80, 40, 12, 0.11, 24),
        (100, 50, 15, 0.11, 11),
        (100, 50, 15, 0.11, 33),
        (150, 75, 20, 0.05, 7),
        (200, 100, 30, 0.11, 22),
        (200, 100, 30, 0.11, 60),
    ];
    assert_eq!(grid.len(), 20);
    let mut worst_ok = 0.0f64;
    let mut best_broken = f64::INFINITY;
    for &(n, k, w, eps, i) in &grid {
        let (num, j0) =
            row_regular_j0_anchor(n, k, w, eps, i, ExponentPairing::FlipCarriesOdd).unwrap();
        let diff = (num - j0).abs();
        assert!(
            diff < 1e-12,
            "FAIL: criterion 3 — anchored pairing off by {diff:.2e} at \
             (n={n}, k={k}, w={w}, eps={eps}, i={i})"
        );
        worst_ok = worst_ok.max(diff);

        let (num, j0) =
            row_regular_j0_anchor(n, k, w, eps, i, ExponentPairing::FlipCarriesEven).unwrap();
        let broken = (num - j0).abs();
        assert!(
            broken >= 1e-12,
            "FAIL: criterion 3 — swapped pairing unexpectedly anchors at \
             (n={n}, k={k}, w={w}, eps={eps}, i={i})"
        );
        best_broken = best_broken.min(broken);
    }
    println!(
        "PASS: criterion 3 — j=0 anchor holds to {worst_ok:.2e} (tol 1e-12) on 20 points; \
         swapped pairing misses by at least {best_broken:.2e}"
    );
}

/// Criterion 4 — BEC exactness and estimator ordering.
#[test]
fn criterion_04_bec_exactness() {
    // Identity matrix closed form (1 - eps/2)^8 at eps = 0.2.
    let pc = exact_pc_bec(&BitMatrix::identity(8), 0.2).unwrap();
    assert!(
        (pc - 0.43046721).abs() <= 1e-12,
        "FAIL: criterion 4 — exact_pc_bec(I_8, 0.2) = {pc}"
    );

    // Direct estimator vs exhaustive ensemble average, within 3 sigma.
    let cases = [
        (EnsembleSpec::row_regular(2, 2, 1).unwrap(), 0.25),
        (EnsembleSpec::bernoulli(3, 2, 0.5).unwrap(), 0.25),
    ];
    for (spec, eps) in &cases {
        let exact = exact_ensemble_avg(spec, &ChannelSpec::bec(*eps).unwrap()).unwrap();
        let direct = bec_bound(spec, *eps, BecEstimator::Direct, 20_000, 4, None).unwrap();
        let sigma = direct.std_error.unwrap();
        assert!(
            (direct.value - exact).abs() <= 3.0 * sigma,
            "FAIL: criterion 4 — direct {} vs exact {exact} (sigma {sigma:.2e}) on {:?}",
            direct.value,
            spec
        );
    }

    // Jensen never exceeds direct (+3 sigma) on every tested configuration;
    // sharing the seed makes the ordering hold sample-by-sample.
    let battery = [
        (EnsembleSpec::row_regular(2, 2, 1).unwrap(), 0.25),
        (EnsembleSpec::bernoulli(3, 2, 0.5).unwrap(), 0.25),
        (EnsembleSpec::bernoulli(24, 12, 0.2).unwrap(), 0.4),
        (EnsembleSpec::row_regular(30, 15, 4).unwrap(), 0.35),
        (EnsembleSpec::bernoulli(40, 20, 0.1).unwrap(), 0.5),
    ];
    for (spec, eps) in &battery {
        let j = bec_bound(spec, *eps, BecEstimator::Jensen, 500, 11, None).unwrap();
        let d = bec_bound(spec, *eps, BecEstimator::Direct, 500, 11, None).unwrap();
        let sigma = j.std_error.unwrap().hypot(d.std_error.unwrap());
        assert!(
            j.value <= d.value + 3.0 * sigma && j.value <= d.value + 1e-12,
            "FAIL: criterion 4 — jensen {} > direct {} on {:?}",
            j.value,
            d.value,
            spec
        );
    }
    println!("PASS: criterion 4 — identity closed form, direct-vs-exact (3 sigma), jensen <= direct");
}

/// Criterion 5 — achievable-rate curves at eps = 0.11, target 0.1.
#[test]
fn criterion_05_rate_curves() {
    let t0 = Instant::now();
    let channel = ChannelSpec::bsc(0.11).unwrap();
    let capacity = 1.0 - binary_entropy(0.11);
    let n_grid: Vec<usize> = (25..=400).step_by(25).collect();
    let mut rates: Vec<Vec<f64>> = Vec::new();
    for rho in [0.1, 0.3, 0.5] {
        let rule = EnsembleRule::Bernoulli { rho };
        let mut per_rho = Vec::new();
        for &n in &n_grid {
            let p = max_rate(n, &channel, &rule, 0.1, &RateOptions::default()).unwrap();
            assert!(
                p.rate < capacity,
                "FAIL: criterion 5 — rate {} >= capacity {capacity} at n={n}, rho={rho}",
                p.rate
            );
            per_rho.push(p.rate);
        }
        // Non-decreasing in n, allowing one unit of k* jitter.
        for t in 1..n_grid.len() {
            assert!(
                per_rho[t] >= per_rho[t - 1] - 1.0 / n_grid[t] as f64,
                "FAIL: criterion 5 — rate falls from {} to {} at n={} (rho={rho})",
                per_rho[t - 1],
                per_rho[t],
                n_grid[t]
            );
        }
        rates.push(per_rho);
    }
    // Density independence at large n: the rho=0.3 / rho=0.5 split at n=400
    // is no wider than at n=50.
    let at = |v: &Vec<f64>, n: usize| v[n_grid.iter().position(|&x| x == n).unwrap()];
    let split_400 = (at(&rates[1], 400) - at(&rates[2], 400)).abs();
    let split_50 = (at(&rates[1], 50) - at(&rates[2], 50)).abs();
    assert!(
        split_400 <= split_50,
        "FAIL: criterion 5 — rho split widens: {split_400} at n=400 vs {split_50} at n=50"
    );
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "FAIL: criterion 5 — runtime {elapsed:?} exceeds 2 min"
    );
    println!(
        "PASS: criterion 5 — 48 rate points under capacity, monotone (±1 k*), \
         rho split {split_400:.4} at n=400 vs {split_50:.4} at n=50, in {elapsed:?}"
    );
}

/// Criterion 6 — achievable rate against the normal-approximation baseline
/// at eps = 0.11, target 1e-3.
#[test]
fn criterion_06_rate_vs_normal_approximation() {
    let channel = ChannelSpec::bsc(0.11).unwrap();
    let n_grid: Vec<usize> = (100..=1000).step_by(100).collect();
    let mut k_stars: Vec<Vec<usize>> = Vec::new();
    for rho in [0.3, 0.5] {
        let rule = EnsembleRule::Bernoulli { rho };
        let mut per_rho = Vec::new();
        for &n in &n_grid {
            let p = max_rate(n, &channel, &rule, 1e-3, &RateOptions::default()).unwrap();
            let baseline = normal_approx_rate(n, 0.11, 1e-3).unwrap();
            assert!(
                p.rate <= baseline + 0.02,
                "FAIL: criterion 6 — rate {} above baseline {baseline}+0.02 at n={n}, rho={rho}",
                p.rate
            );
            per_rho.push(p.k_star);
        }
        k_stars.push(per_rho);
    }
    for (idx, &n) in n_grid.iter().enumerate() {
        if n >= 200 {
            let d = k_stars[0][idx].abs_diff(k_stars[1][idx]);
            assert!(
                d <= 1,
                "FAIL: criterion 6 — k*(0.3) and k*(0.5) differ by {d} at n={n}"
            );
        }
    }
    println!(
        "PASS: criterion 6 — rates within baseline+0.02 on n=100..1000; \
         rho=0.3 and rho=0.5 agree to ±1 message bit from n=200 on"
    );
}

/// Criterion 7 — error-exponent slope fits at eps = 0.05, R = 0.8C over
/// n = 100..1000.
///
/// The positivity and fit-quality prongs hold. The ordering prong
/// slope(0.1) <= slope(0.3) is asserted verbatim and FAILS on this grid:
/// the sparse curve leaves its high-error plateau inside the window and
/// then decays strictly faster than the denser curves (local slopes cross
/// near n ≈ 450), so its fitted slope comes out largest. The bound values
/// were cross-checked against an independent 50-digit evaluation of the
/// unsimplified formula. The ordering genuinely holds only for fit windows
/// below n ≈ 400; see `fig3_ordering_holds_in_the_small_blocklength_regime`
/// in tests/experiments.rs for that demonstration.
#[test]
fn criterion_07_bsc_exponent_ordering() {
    let t0 = Instant::now();
    let capacity = 1.0 - binary_entropy(0.05);
    let n_grid: Vec<usize> = (100..=1000).step_by(100).collect();
    let mut slopes = Vec::new();
    for rho in [0.1, 0.3, 0.5] {
        let points: Vec<(usize, f64)> = n_grid
            .iter()
            .map(|&n| {
                let k = ((n as f64 * 0.8 * capacity).round() as usize).max(1);
                let spec = EnsembleSpec::bernoulli(n, k, rho).unwrap();
                (n, bsc_ensemble_bound(&spec, 0.05, None).unwrap().pe_upper)
            })
            .collect();
        let fit = exponent_fit(&points).unwrap();
        assert!(
            fit.slope_bits_per_symbol > 0.0,
            "FAIL: criterion 7 — slope {} not positive at rho={rho}",
            fit.slope_bits_per_symbol
        );
        assert!(
            fit.r_squared > 0.99,
            "FAIL: criterion 7 — r^2 {} <= 0.99 at rho={rho}",
            fit.r_squared
        );
        slopes.push(fit.slope_bits_per_symbol);
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "FAIL: criterion 7 — runtime {elapsed:?} exceeds 2 min"
    );
    assert!(
        slopes[0] <= slopes[1] && slopes[1] <= slopes[2],
        "FAIL: criterion 7 (ordering prong) — fitted slopes {slopes:.6?} for rho = (0.1, 0.3, 0.5) \
         on the stated grid n=100..1000: the sparse (rho=0.1) curve exits its error plateau inside \
         the window and decays steeper thereafter, so its fitted slope is the largest. Verified \
         against an independent high-precision evaluation; the stated ordering is attainable only \
         on grids confined to n <~ 400 (demonstrated in tests/experiments.rs). Recorded in the \
         decisions ledger."
    );
    println!(
        "PASS: criterion 7 — slopes {slopes:.5?} positive, r^2 > 0.99, ordered, in {elapsed:?}"
    );
}

/// Criterion 8 — BEC exponent trends at eps = 0.01 with 200 rank trials per
/// point and the shipped fixed seed, via the shipped fig4 configuration.
#[test]
fn criterion_08_bec_exponent_trends() {
    let t0 = Instant::now();
    let out = temp_dir("fig4");
    let args: Vec<String> = [
        "exponent",
        "--config",
        &config_path("fig4_bec_exponent.json"),
        "--out",
    ]
    .iter()
    .map(|s| s.to_string())
    .chain([out.display().to_string()])
    .collect();
    let result = cli::run_cli(&args).unwrap();
    let csv = std::fs::read_to_string(&result.csv_path).unwrap();
    let mut slopes = std::collections::BTreeMap::new();
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let rho: f64 = f[0].parse().unwrap();
        let roc: f64 = f[1].parse().unwrap();
        let slope: f64 = f[2].parse().unwrap();
        slopes.insert((format!("{rho:.1}"), format!("{roc:.1}")), slope);
    }
    std::fs::remove_dir_all(&out).ok();

    // Exponent decreasing in R/C at fixed rho = 0.5.
    let rc: Vec<f64> = ["0.5", "0.7", "0.9"]
        .iter()
        .map(|r| slopes[&("0.5".to_string(), r.to_string())])
        .collect();
    assert!(
        rc[0] > rc[1] && rc[1] > rc[2],
        "FAIL: criterion 8 — R/C slopes not decreasing: {rc:.4?}"
    );
    // Exponent increasing in rho at R/C = 0.7.
    let rh: Vec<f64> = ["0.1", "0.3", "0.5"]
        .iter()
        .map(|r| slopes[&(r.to_string(), "0.7".to_string())])
        .collect();
    assert!(
        rh[0] <= rh[1] && rh[1] <= rh[2],
        "FAIL: criterion 8 — rho slopes not increasing: {rh:.4?}"
    );
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "FAIL: criterion 8 — runtime {elapsed:?} exceeds 5 min"
    );
    println!(
        "PASS: criterion 8 — R/C slopes {rc:.3?} decreasing, rho slopes {rh:.3?} increasing, \
         in {elapsed:?}"
    );
}

/// Criterion 9 — expected-rank growth. Thresholds frozen after a pilot run;
/// the trend assertions are the contract.
#[test]
fn criterion_09_rank_growth() {
    // Bernoulli rho = 2 ln(n)/n at m = k = n over n in {128, 256, 512}.
    let mut fracs = Vec::new();
    for n in [128usize, 256, 512] {
        let rho = 2.0 * (n as f64).ln() / n as f64;
        let spec = EnsembleSpec::bernoulli(n, n, rho).unwrap();
        let est = mc_expected_rank(&spec, 200, 1).unwrap();
        fracs.push(est.mean / n as f64);
    }
    assert!(
        fracs[0] <= fracs[1] && fracs[1] <= fracs[2],
        "FAIL: criterion 9 — rank/n not increasing: {fracs:.6?}"
    );
    assert!(
        fracs[2] > 0.98,
        "FAIL: criterion 9 — rank/n {} <= 0.98 at n=512",
        fracs[2]
    );

    // Row-regular m = 0.75n, k = n, w = round(0.3 n) at n = 256.
    let n = 256usize;
    let spec = EnsembleSpec::row_regular(n * 3 / 4, n, (0.3 * n as f64).round() as usize).unwrap();
    let est = mc_expected_rank(&spec, 200, 1).unwrap();
    let frac = est.mean / (n * 3 / 4) as f64;
    assert!(
        frac > 0.99,
        "FAIL: criterion 9 — row-regular rank/m {frac} <= 0.99 at n=256"
    );
    println!(
        "PASS: criterion 9 — bernoulli rank/n {fracs:.5?} increasing and > 0.98; \
         row-regular rank/m {frac:.5}"
    );
}

/// Criterion 10 — Monte Carlo estimates stay above the bounds they certify.
#[test]
fn criterion_10_mc_bound_consistency() {
    // BSC: Bernoulli(40, 20, 0.25) at eps = 0.05, 200 trials.
    let spec = EnsembleSpec::bernoulli(40, 20, 0.25).unwrap();
    let bound = bsc_ensemble_bound(&spec, 0.05, None).unwrap().value;
    let (est, _) =
        mc_ensemble_pc(&spec, &ChannelSpec::bsc(0.05).unwrap(), 200, 1, None).unwrap();
    assert!(
        est.mean >= bound - 3.0 * est.std_error,
        "FAIL: criterion 10 — BSC MC {} ± {} below bound {bound}",
        est.mean,
        est.std_error
    );
    let bsc_line = format!("BSC mc {:.4}±{:.4} vs bound {bound:.4}", est.mean, est.std_error);

    // BEC analog: Bernoulli(200, 100, 0.1) at eps = 0.4.
    let spec = EnsembleSpec::bernoulli(200, 100, 0.1).unwrap();
    let bound = bec_bound(&spec, 0.4, BecEstimator::Jensen, 200, 9, Some(0.25))
        .unwrap()
        .value;
    let (est, _) =
        mc_ensemble_pc(&spec, &ChannelSpec::bec(0.4).unwrap(), 200, 1, None).unwrap();
    assert!(
        est.mean >= bound - 3.0 * est.std_error,
        "FAIL: criterion 10 — BEC MC {} ± {} below bound {bound}",
        est.mean,
        est.std_error
    );
    println!(
        "PASS: criterion 10 — {bsc_line}; BEC mc {:.4}±{:.4} vs bound {bound:.4}",
        est.mean, est.std_error
    );
}

/// Criterion 11 — convergence experiments through the shipped default
/// configs: exceedance fractions non-increasing on both channel paths.
#[test]
fn criterion_11_convergence_experiments() {
    for cfg in ["convergence_bsc.json", "convergence_bec.json"] {
        let out = temp_dir(&format!("conv-{cfg}"));
        let args: Vec<String> = ["convergence", "--config", &config_path(cfg), "--out"]
            .iter()
            .map(|s| s.to_string())
            .chain([out.display().to_string()])
            .collect();
        let result = cli::run_cli(&args).unwrap();
        let csv = std::fs::read_to_string(&result.csv_path).unwrap();
        let fracs: Vec<f64> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
            .collect();
        assert!(
            fracs.windows(2).all(|w| w[1] <= w[0]),
            "FAIL: criterion 11 — {cfg}: fractions {fracs:?} not non-increasing"
        );
        println!("PASS: criterion 11 — {cfg}: fractions {fracs:.2?} non-increasing");
        std::fs::remove_dir_all(&out).ok();
    }
}

/// Criterion 12 — determinism: a shipped config run twice is byte-identical,
/// and a single-threaded run matches an auto-threaded run byte for byte.
#[test]
fn criterion_12_determinism() {
    let bin = env!("CARGO_BIN_EXE_sparsecode");
    let base = temp_dir("determinism");
    let run = |command: &str, cfg: &str, out: &str, threads: Option<&str>| -> Vec<u8> {
        let out_dir = base.join(out);
        let mut cmd = std::process::Command::new(bin);
        cmd.arg(command);
        cmd.args(["--config", &config_path(cfg), "--out"]);
        cmd.arg(&out_dir);
        match threads {
            Some(t) => cmd.env("SPARSECODE_THREADS", t),
            None => cmd.env_remove("SPARSECODE_THREADS"),
        };
        let status = cmd.status().unwrap();
        assert!(status.success(), "FAIL: criterion 12 — run of {cfg} failed");
        let csv = std::fs::read_dir(&out_dir)
            .unwrap()
            .filter_map(|e| e.ok())
            .find(|e| e.path().extension().is_some_and(|x| x == "csv"))
            .unwrap();
        std::fs::read(csv.path()).unwrap()
    };

    // Same config, run twice.
    let a = run("bound", "bound_small.json", "a", None);
    let b = run("bound", "bound_small.json", "b", None);
    assert_eq!(a, b, "FAIL: criterion 12 — repeated runs differ");

    // Monte Carlo command: one thread vs auto.
    let c = run("bec-bound", "bec_bound_mc.json", "c", Some("1"));
    let d = run("bec-bound", "bec_bound_mc.json", "d", Some("0"));
    assert_eq!(c, d, "FAIL: criterion 12 — thread count changes the CSV");
    std::fs::remove_dir_all(&base).ok();
    println!("PASS: criterion 12 — byte-identical CSV across repeats and thread counts");
}
