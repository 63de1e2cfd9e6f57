//! The reproducible experiment runner behind the `sparsecode` binary.
//!
//! Every command turns one of the library operations into figure-ready CSV
//! plus a JSON manifest that echoes the fully-resolved configuration and
//! checksums the emitted files. Runs are deterministic: identical
//! (config, seed, version) produce byte-identical CSV at any parallelism
//! level, because all parallel reductions are ordered. The environment
//! variable `SPARSECODE_THREADS` caps worker threads (0 or unset = auto).
//!
//! Configuration comes from command-line flags, from a flat JSON config file
//! (`--config run.json`) whose keys mirror the flags, or both — flags
//! override file values. Unknown keys are rejected. Grids are written
//! `start:stop:step`, lists comma-separated; reals in the CSV carry 17
//! significant digits.
//!
//! CSV schemas (header rows are part of the contract):
//!
//! ```text
//! bound:         channel,eps,ensemble,n,k,rho_or_w,window,value,pe_upper
//! rate-curve:    n,eps,target_pe,ensemble,rho_or_w,k_star,rate,capacity,normal_approx_rate
//! exponent:      rho_or_w,R_over_C,slope_bits,r_squared,n_min,n_max
//! bec-bound:     channel,eps,ensemble,n,k,rho_or_w,estimator,trials,window,value,pe_upper,std_error
//! simulate:      channel,eps,ensemble,n,k,rho_or_w,trials,eta,mean,std_error,rejected
//! rank-study:    m,k,ensemble,rho_or_w,trials,mean_rank,std_error
//! convergence:   n,k,matrices,delta,fraction_above_delta
//! sweep-density: channel,eps,schedule,param,n,k,rho_n,value,pe_upper
//! oracle-check:  n,k,eps,rho,bound,exact,gap,ok
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::bounds::{
    bec_bound, bsc_ensemble_bound, exponent_fit, max_rate, normal_approx_rate,
    vanishing_density_sweep, BecEstimator, DensitySchedule, RateOptions,
};
use crate::channel::ChannelSpec;
use crate::ensemble::{EnsembleRule, EnsembleSpec, TypicalityParams};
use crate::montecarlo::{
    convergence_experiment, exact_ensemble_avg, mc_ensemble_pc, mc_expected_rank,
    ConvergenceSettings,
};
use crate::rng::substream_seed;
use crate::{Error, Result};

/// Real formatting used in every CSV cell: 17 significant digits, enough to
/// round-trip any f64.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// The experiment commands, named exactly as on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Bound,
    RateCurve,
    Exponent,
    BecBound,
    Simulate,
    RankStudy,
    Convergence,
    SweepDensity,
    OracleCheck,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Bound,
        Command::RateCurve,
        Command::Exponent,
        Command::BecBound,
        Command::Simulate,
        Command::RankStudy,
        Command::Convergence,
        Command::SweepDensity,
        Command::OracleCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Bound => "bound",
            Command::RateCurve => "rate-curve",
            Command::Exponent => "exponent",
            Command::BecBound => "bec-bound",
            Command::Simulate => "simulate",
            Command::RankStudy => "rank-study",
            Command::Convergence => "convergence",
            Command::SweepDensity => "sweep-density",
            Command::OracleCheck => "oracle-check",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command {s:?}")))
    }

    fn allowed_keys(&self) -> &'static [&'static str] {
        match self {
            Command::Bound => &["channel", "eps", "n", "k", "ensemble", "rho", "row_weight", "window"],
            Command::RateCurve => &["channel", "eps", "target_pe", "ensemble", "rho", "n", "window", "trials"],
            Command::Exponent => &["channel", "eps", "r_over_c", "rho", "ensemble", "n", "trials", "window"],
            Command::BecBound => &["channel", "eps", "n", "k", "ensemble", "rho", "row_weight", "estimator", "trials", "window"],
            Command::Simulate => &["channel", "eps", "n", "k", "ensemble", "rho", "row_weight", "trials", "eta", "rho_target"],
            Command::RankStudy => &["m", "k", "ensemble", "rho", "row_weight", "rho_schedule", "trials"],
            Command::Convergence => &["channel", "eps", "rate", "n", "matrices", "delta", "ensemble", "rho", "inner_samples"],
            Command::SweepDensity => &["channel", "eps", "r_over_c", "n", "gamma", "c", "trials", "window"],
            Command::OracleCheck => &["eps", "rho", "n_max", "k_max"],
        }
    }
}

/// A fully-resolved experiment: the command, its parameter map (file values
/// overlaid by flags), the master seed, and the output directory.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: Command,
    pub parameters: Map<String, Value>,
    pub master_seed: u64,
    pub output_path: PathBuf,
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
    pub rows: usize,
    /// Oracle-check violations (0 for every other command).
    pub violations: usize,
}

pub const USAGE: &str = "\
sparsecode — achievability bounds for sparse random linear codes

USAGE:
  sparsecode <command> [--config FILE.json] [--key value]... [--out DIR] [--seed U64]

COMMANDS:
  bound          BSC ensemble-average bound at one (n, k)
  rate-curve     maximal k meeting a target error probability over an n-grid
  exponent       error-exponent slope fits over an n-grid
  bec-bound      rank-based BEC bound (jensen or direct estimator)
  simulate       seeded Monte Carlo ensemble estimate
  rank-study     Monte Carlo expected GF(2) rank over (m, k) grids
  convergence    per-matrix error of random generator sequences
  sweep-density  bound along a vanishing-density schedule
  oracle-check   exhaustive tiny-size check that the bound stays below truth

Flags mirror the flat JSON config keys (flags override the file). Grids are
start:stop:step, lists are comma-separated. Examples:

  sparsecode bound --channel bsc --eps 0.11 --n 200 --k 100 \\
      --ensemble bernoulli --rho 0.3 --out runs/bound
  sparsecode rate-curve --eps 0.11 --target-pe 0.1 --rho 0.1,0.3,0.5 \\
      --n 25:400:25 --out runs/fig1
  sparsecode bec-bound --eps 0.4 --n 200 --k 100 --ensemble bernoulli \\
      --rho 0.1 --estimator jensen --trials 200 --window 0.25 --seed 7

Exit codes: 0 success; 1 oracle violation; 2 usage/config error; 3 size guard.
";

// ---------------------------------------------------------------------------
// Typed parameter access on the merged JSON map
// ---------------------------------------------------------------------------

struct Params<'a> {
    map: &'a Map<String, Value>,
}

impl<'a> Params<'a> {
    fn get(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key)
    }

    fn str_of(v: &Value) -> Option<String> {
        match v {
            Value::String(s) => Some(s.clone()),
            Value::Number(n) => Some(n.to_string()),
            _ => None,
        }
    }

    fn req_f64(&self, key: &str) -> Result<f64> {
        self.opt_f64(key)?
            .ok_or_else(|| Error::Config(format!("missing required parameter --{key}")))
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => {
                let parsed = match v {
                    Value::Number(n) => n.as_f64(),
                    Value::String(s) => s.parse::<f64>().ok(),
                    _ => None,
                };
                parsed
                    .map(Some)
                    .ok_or_else(|| Error::Config(format!("parameter --{key} must be a real, got {v}")))
            }
        }
    }

    fn req_usize(&self, key: &str) -> Result<usize> {
        self.opt_usize(key)?
            .ok_or_else(|| Error::Config(format!("missing required parameter --{key}")))
    }

    fn opt_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => {
                let parsed = match v {
                    Value::Number(n) => n.as_u64().map(|u| u as usize),
                    Value::String(s) => s.parse::<usize>().ok(),
                    _ => None,
                };
                parsed.map(Some).ok_or_else(|| {
                    Error::Config(format!("parameter --{key} must be a non-negative integer, got {v}"))
                })
            }
        }
    }

    fn opt_str(&self, key: &str) -> Result<Option<String>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => Self::str_of(v)
                .map(Some)
                .ok_or_else(|| Error::Config(format!("parameter --{key} must be a string, got {v}"))),
        }
    }

    /// Integer grid: "start:stop:step" (inclusive of stop when hit) or a
    /// single integer.
    fn req_grid(&self, key: &str) -> Result<Vec<usize>> {
        let v = self
            .get(key)
            .ok_or_else(|| Error::Config(format!("missing required parameter --{key}")))?;
        let s = Self::str_of(v)
            .ok_or_else(|| Error::Config(format!("parameter --{key} must be a grid, got {v}")))?;
        parse_grid(&s).map_err(|e| Error::Config(format!("parameter --{key}: {e}")))
    }

    /// Comma-separated list of reals, or a single real.
    fn req_f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let v = self
            .get(key)
            .ok_or_else(|| Error::Config(format!("missing required parameter --{key}")))?;
        let s = Self::str_of(v)
            .ok_or_else(|| Error::Config(format!("parameter --{key} must be a list, got {v}")))?;
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("parameter --{key}: bad real {p:?}")))
            })
            .collect()
    }
}

fn parse_grid(s: &str) -> std::result::Result<Vec<usize>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [single] => single
            .trim()
            .parse::<usize>()
            .map(|v| vec![v])
            .map_err(|_| format!("bad integer {single:?}")),
        [start, stop, step] => {
            let (start, stop, step) = (
                start.trim().parse::<usize>().map_err(|_| format!("bad start {start:?}"))?,
                stop.trim().parse::<usize>().map_err(|_| format!("bad stop {stop:?}"))?,
                step.trim().parse::<usize>().map_err(|_| format!("bad step {step:?}"))?,
            );
            if step == 0 {
                return Err("step must be positive".into());
            }
            if stop < start {
                return Err(format!("stop {stop} precedes start {start}"));
            }
            Ok((start..=stop).step_by(step).collect())
        }
        _ => Err(format!("expected START:STOP:STEP or a single integer, got {s:?}")),
    }
}

fn probability_in_unit(name: &str, v: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&v) {
        return Err(Error::Config(format!("--{name} must lie in [0,1), got {v}")));
    }
    Ok(v)
}

/// Ensemble description shared by most commands: `--ensemble` plus either
/// `--rho` (bernoulli, or a density target for row_regular rules) or
/// `--row_weight` (row_regular at fixed dimensions).
fn ensemble_spec(p: &Params, n: usize, k: usize) -> Result<EnsembleSpec> {
    let kind = p.opt_str("ensemble")?.unwrap_or_else(|| "bernoulli".into());
    match kind.as_str() {
        "bernoulli" => {
            let rho = p.req_f64("rho")?;
            EnsembleSpec::bernoulli(n, k, rho)
        }
        "row_regular" => {
            if let Some(w) = p.opt_usize("row_weight")? {
                EnsembleSpec::row_regular(n, k, w)
            } else {
                let rho = p.req_f64("rho")?;
                Ok(EnsembleSpec::row_regular_from_density(n, k, rho)?.0)
            }
        }
        other => Err(Error::Config(format!(
            "unknown ensemble {other:?} (expected bernoulli or row_regular)"
        ))),
    }
}

fn ensemble_rule(kind: &str, rho: f64) -> Result<EnsembleRule> {
    match kind {
        "bernoulli" => Ok(EnsembleRule::Bernoulli { rho }),
        "row_regular" => Ok(EnsembleRule::RowRegular { rho }),
        other => Err(Error::Config(format!(
            "unknown ensemble {other:?} (expected bernoulli or row_regular)"
        ))),
    }
}

fn channel_of(p: &Params, default_kind: &str) -> Result<ChannelSpec> {
    let kind = p.opt_str("channel")?.unwrap_or_else(|| default_kind.into());
    let eps = probability_in_unit("eps", p.req_f64("eps")?)?;
    match kind.as_str() {
        "bsc" => ChannelSpec::bsc(eps),
        "bec" => ChannelSpec::bec(eps),
        other => Err(Error::Config(format!("unknown channel {other:?} (expected bsc or bec)"))),
    }
}

fn window_label(w: Option<(usize, usize)>) -> String {
    match w {
        Some((lo, hi)) => format!("{lo}:{hi}"),
        None => String::new(),
    }
}

// ---------------------------------------------------------------------------
// Command implementations (each returns the CSV lines, header included)
// ---------------------------------------------------------------------------

fn run_bound(p: &Params, _seed: u64) -> Result<(Vec<String>, usize)> {
    let channel = channel_of(p, "bsc")?;
    let ChannelSpec::Bsc { epsilon } = channel else {
        return Err(Error::Config(
            "the analytic bound serves the BSC; use bec-bound for the erasure channel".into(),
        ));
    };
    let n = p.req_usize("n")?;
    let k = p.req_usize("k")?;
    let spec = ensemble_spec(p, n, k)?;
    let window = p.opt_f64("window")?;
    let r = bsc_ensemble_bound(&spec, epsilon, window)?;
    let mut lines = vec!["channel,eps,ensemble,n,k,rho_or_w,window,value,pe_upper".to_string()];
    lines.push(format!(
        "bsc,{},{},{n},{k},{},{},{},{}",
        fmt_real(epsilon),
        spec.kind_name(),
        spec.density_label(),
        window_label(r.window),
        fmt_real(r.value),
        fmt_real(r.pe_upper),
    ));
    Ok((lines, 0))
}

fn run_rate_curve(p: &Params, seed: u64) -> Result<(Vec<String>, usize)> {
    let channel = channel_of(p, "bsc")?;
    let eps = channel.epsilon();
    let target_pe = p.req_f64("target_pe")?;
    let rhos = p.req_f64_list("rho")?;
    let n_grid = p.req_grid("n")?;
    let kind = p.opt_str("ensemble")?.unwrap_or_else(|| "bernoulli".into());
    let opts = RateOptions {
        window: p.opt_f64("window")?,
        bec_estimator: BecEstimator::Jensen,
        bec_trials: p.opt_usize("trials")?.unwrap_or(200) as u64,
        seed,
    };
    let mut lines =
        vec!["n,eps,target_pe,ensemble,rho_or_w,k_star,rate,capacity,normal_approx_rate".to_string()];
    for &rho in &rhos {
        let rule = ensemble_rule(&kind, rho)?;
        for &n in &n_grid {
            let point = max_rate(n, &channel, &rule, target_pe, &opts)?;
            let normal = match channel {
                ChannelSpec::Bsc { epsilon } => fmt_real(normal_approx_rate(n, epsilon, target_pe)?),
                ChannelSpec::Bec { .. } => String::new(),
            };
            lines.push(format!(
                "{n},{},{},{},{},{},{},{},{normal}",
                fmt_real(eps),
                fmt_real(target_pe),
                rule.kind_name(),
                fmt_real(rho),
                point.k_star,
                fmt_real(point.rate),
                fmt_real(channel.capacity()),
            ));
        }
    }
    Ok((lines, 0))
}

fn run_exponent(p: &Params, seed: u64) -> Result<(Vec<String>, usize)> {
    let channel = channel_of(p, "bsc")?;
    let rocs = p.req_f64_list("r_over_c")?;
    let rhos = p.req_f64_list("rho")?;
    let n_grid = p.req_grid("n")?;
    let kind = p.opt_str("ensemble")?.unwrap_or_else(|| "bernoulli".into());
    let trials = p.opt_usize("trials")?.unwrap_or(200) as u64;
    let window = p.opt_f64("window")?;
    let mut lines = vec!["rho_or_w,R_over_C,slope_bits,r_squared,n_min,n_max".to_string()];
    for (rho_idx, &rho) in rhos.iter().enumerate() {
        let rule = ensemble_rule(&kind, rho)?;
        for (roc_idx, &roc) in rocs.iter().enumerate() {
            if !(0.0 < roc && roc < 1.0) {
                return Err(Error::Config(format!("--r_over_c entries must lie in (0,1), got {roc}")));
            }
            let mut points = Vec::with_capacity(n_grid.len());
            for &n in &n_grid {
                let k = ((n as f64 * roc * channel.capacity()).round() as usize).clamp(1, n);
                let spec = rule.instantiate(n, k)?;
                let pe = match channel {
                    ChannelSpec::Bsc { epsilon } => {
                        bsc_ensemble_bound(&spec, epsilon, window)?.pe_upper
                    }
                    ChannelSpec::Bec { epsilon } => {
                        let s = substream_seed(substream_seed(seed, rho_idx as u64), roc_idx as u64);
                        bec_bound(
                            &spec,
                            epsilon,
                            BecEstimator::Jensen,
                            trials,
                            substream_seed(s, n as u64),
                            window,
                        )?
                        .pe_upper
                    }
                };
                points.push((n, pe));
            }
            let fit = exponent_fit(&points)?;
            lines.push(format!(
                "{},{},{},{},{},{}",
                fmt_real(rho),
                fmt_real(roc),
                fmt_real(fit.slope_bits_per_symbol),
                fmt_real(fit.r_squared),
                n_grid.first().unwrap(),
                n_grid.last().unwrap(),
            ));
        }
    }
    Ok((lines, 0))
}

fn run_bec_bound(p: &Params, seed: u64) -> Result<(Vec<String>, usize)> {
    let eps = probability_in_unit("eps", p.req_f64("eps")?)?;
    let n = p.req_usize("n")?;
    let k = p.req_usize("k")?;
    let spec = ensemble_spec(p, n, k)?;
    let estimator = match p.opt_str("estimator")?.unwrap_or_else(|| "jensen".into()).as_str() {
        "jensen" => BecEstimator::Jensen,
        "direct" => BecEstimator::Direct,
        other => {
            return Err(Error::Config(format!(
                "unknown estimator {other:?} (expected jensen or direct)"
            )))
        }
    };
    let trials = p.opt_usize("trials")?.unwrap_or(200) as u64;
    let window = p.opt_f64("window")?;
    let r = bec_bound(&spec, eps, estimator, trials, seed, window)?;
    let mut lines = vec![
        "channel,eps,ensemble,n,k,rho_or_w,estimator,trials,window,value,pe_upper,std_error"
            .to_string(),
    ];
    lines.push(format!(
        "bec,{},{},{n},{k},{},{},{trials},{},{},{},{}",
        fmt_real(eps),
        spec.kind_name(),
        spec.density_label(),
        estimator.name(),
        window_label(r.window),
        fmt_real(r.value),
        fmt_real(r.pe_upper),
        fmt_real(r.std_error.unwrap_or(0.0)),
    ));
    Ok((lines, 0))
}

fn run_simulate(p: &Params, seed: u64) -> Result<(Vec<String>, usize)> {
    let channel = channel_of(p, "bsc")?;
    let n = p.req_usize("n")?;
    let k = p.req_usize("k")?;
    let spec = ensemble_spec(p, n, k)?;
    let trials = p.req_usize("trials")? as u64;
    let typicality = match p.opt_f64("eta")? {
        None => None,
        Some(eta) => {
            let rho_target = match p.opt_f64("rho_target")? {
                Some(t) => t,
                None => match spec {
                    EnsembleSpec::Bernoulli { rho, .. } => rho,
                    EnsembleSpec::RowRegular { k, row_weight, .. } => row_weight as f64 / k as f64,
                },
            };
            Some(TypicalityParams::new(rho_target, eta)?)
        }
    };
    let (est, rejected) = mc_ensemble_pc(&spec, &channel, trials, seed, typicality)?;
    let mut lines =
        vec!["channel,eps,ensemble,n,k,rho_or_w,trials,eta,mean,std_error,rejected".to_string()];
    lines.push(format!(
        "{},{},{},{n},{k},{},{trials},{},{},{},{rejected}",
        channel.kind_name(),
        fmt_real(channel.epsilon()),
        spec.kind_name(),
        spec.density_label(),
        typicality.map(|t| fmt_real(t.eta)).unwrap_or_default(),
        fmt_real(est.mean),
        fmt_real(est.std_error),
    ));
    Ok((lines, 0))
}

fn run_rank_study(p: &Params, seed: u64) -> Result<(Vec<String>, usize)> {
    let m_grid = p.req_grid("m")?;
    let k_grid = p.req_grid("k")?;
    let (m_grid, k_grid) = broadcast_grids(m_grid, k_grid)?;
    let kind = p.opt_str("ensemble")?.unwrap_or_else(|| "bernoulli".into());
    let trials = p.req_usize("trials")? as u64;
    let schedule = p.opt_str("rho_schedule")?;
    let mut lines = vec!["m,k,ensemble,rho_or_w,trials,mean_rank,std_error".to_string()];
    for (idx, (&m, &k)) in m_grid.iter().zip(&k_grid).enumerate() {
        let spec = if let Some(sched) = &schedule {
            let c = sched
                .strip_prefix("clogn:")
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| {
                    Error::Config(format!("--rho_schedule must look like clogn:<c>, got {sched:?}"))
                })?;
            let rho = DensitySchedule::LogOverN { c }.rho(m)?;
            match kind.as_str() {
                "bernoulli" => EnsembleSpec::bernoulli(m, k, rho)?,
                "row_regular" => EnsembleSpec::row_regular_from_density(m, k, rho)?.0,
                other => return Err(Error::Config(format!("unknown ensemble {other:?}"))),
            }
        } else {
            ensemble_spec(p, m, k)?
        };
        let est = mc_expected_rank(&spec, trials, substream_seed(seed, idx as u64))?;
        lines.push(format!(
            "{m},{k},{},{},{trials},{},{}",
            spec.kind_name(),
            spec.density_label(),
            fmt_real(est.mean),
            fmt_real(est.std_error),
        ));
    }
    Ok((lines, 0))
}

fn broadcast_grids(a: Vec<usize>, b: Vec<usize>) -> Result<(Vec<usize>, Vec<usize>)> {
    if a.len() == b.len() {
        Ok((a, b))
    } else if a.len() == 1 {
        let n = b.len();
        Ok((vec![a[0]; n], b))
    } else if b.len() == 1 {
        let n = a.len();
        Ok((a, vec![b[0]; n]))
    } else {
        Err(Error::Config(format!(
            "grids of incompatible lengths {} and {}",
            a.len(),
            b.len()
        )))
    }
}

fn run_convergence(p: &Params, seed: u64) -> Result<(Vec<String>, usize)> {
    let channel = channel_of(p, "bsc")?;
    let rate = p.req_f64("rate")?;
    let n_grid = p.req_grid("n")?;
    let matrices = p.req_usize("matrices")?;
    let delta = p.req_f64("delta")?;
    let kind = p.opt_str("ensemble")?.unwrap_or_else(|| "bernoulli".into());
    let rule = ensemble_rule(&kind, p.req_f64("rho")?)?;
    let settings = ConvergenceSettings {
        channel,
        rule,
        rate,
        n_grid,
        matrices_per_n: matrices,
        delta,
        seed,
        inner_samples: p.opt_usize("inner_samples")?.unwrap_or(256) as u64,
    };
    let report = convergence_experiment(&settings)?;
    let mut lines = vec!["n,k,matrices,delta,fraction_above_delta".to_string()];
    for point in &report.points {
        lines.push(format!(
            "{},{},{},{},{}",
            point.n,
            point.k,
            point.matrices_tested,
            fmt_real(report.delta),
            fmt_real(point.fraction_above_delta),
        ));
    }
    Ok((lines, 0))
}

fn run_sweep_density(p: &Params, seed: u64) -> Result<(Vec<String>, usize)> {
    let channel = channel_of(p, "bsc")?;
    let r_over_c = p.req_f64("r_over_c")?;
    let n_grid = p.req_grid("n")?;
    let schedule = match channel {
        ChannelSpec::Bsc { .. } => DensitySchedule::PowerLaw {
            gamma: p.req_f64("gamma")?,
        },
        ChannelSpec::Bec { .. } => DensitySchedule::LogOverN { c: p.req_f64("c")? },
    };
    let trials = p.opt_usize("trials")?.unwrap_or(200) as u64;
    let window = p.opt_f64("window")?;
    let points =
        vanishing_density_sweep(&channel, &schedule, r_over_c, &n_grid, window, trials, seed)?;
    let mut lines = vec!["channel,eps,schedule,param,n,k,rho_n,value,pe_upper".to_string()];
    for pt in &points {
        let (name, param) = match schedule {
            DensitySchedule::PowerLaw { gamma } => ("power_law", gamma),
            DensitySchedule::LogOverN { c } => ("log_over_n", c),
        };
        lines.push(format!(
            "{},{},{name},{},{},{},{},{},{}",
            channel.kind_name(),
            fmt_real(channel.epsilon()),
            fmt_real(param),
            pt.n,
            pt.k,
            fmt_real(pt.rho_n),
            fmt_real(pt.result.value),
            fmt_real(pt.result.pe_upper),
        ));
    }
    Ok((lines, 0))
}

fn run_oracle_check(p: &Params, _seed: u64) -> Result<(Vec<String>, usize)> {
    let eps_list = if p.get("eps").is_some() {
        p.req_f64_list("eps")?
    } else {
        vec![0.05, 0.11, 0.25]
    };
    let rho_list = if p.get("rho").is_some() {
        p.req_f64_list("rho")?
    } else {
        vec![0.1, 0.3, 0.5]
    };
    let n_max = p.opt_usize("n_max")?.unwrap_or(4);
    let k_max = p.opt_usize("k_max")?.unwrap_or(3);
    let mut lines = vec!["n,k,eps,rho,bound,exact,gap,ok".to_string()];
    let mut violations = 0usize;
    for n in 1..=n_max {
        for k in 1..=k_max {
            for &eps in &eps_list {
                for &rho in &rho_list {
                    let spec = EnsembleSpec::bernoulli(n, k, rho)?;
                    let bound = bsc_ensemble_bound(&spec, eps, None)?.value;
                    let exact = exact_ensemble_avg(&spec, &ChannelSpec::bsc(eps)?)?;
                    let ok = bound < exact;
                    if !ok {
                        violations += 1;
                    }
                    lines.push(format!(
                        "{n},{k},{},{},{},{},{},{}",
                        fmt_real(eps),
                        fmt_real(rho),
                        fmt_real(bound),
                        fmt_real(exact),
                        fmt_real(exact - bound),
                        if ok { "true" } else { "false" },
                    ));
                }
            }
        }
    }
    Ok((lines, violations))
}

// ---------------------------------------------------------------------------
// The runner: config resolution, thread pool, CSV + manifest emission
// ---------------------------------------------------------------------------

/// Parse command-line arguments (excluding the binary name) into a resolved
/// experiment configuration. `--config FILE` loads a flat JSON object first;
/// remaining flags override its values.
pub fn parse_args(args: &[String]) -> Result<ExperimentConfig> {
    let mut it = args.iter();
    let command_name = it
        .next()
        .ok_or_else(|| Error::Config(format!("missing command\n\n{USAGE}")))?;
    let command = Command::parse(command_name)?;

    let mut flag_map = Map::new();
    let mut config_path: Option<PathBuf> = None;
    while let Some(arg) = it.next() {
        let Some(key) = arg.strip_prefix("--") else {
            return Err(Error::Config(format!("expected --flag, found {arg:?}")));
        };
        let key = key.replace('-', "_");
        let value = it
            .next()
            .ok_or_else(|| Error::Config(format!("flag --{key} is missing a value")))?;
        if key == "config" {
            config_path = Some(PathBuf::from(value));
        } else {
            flag_map.insert(key, Value::String(value.clone()));
        }
    }

    let mut merged = Map::new();
    if let Some(path) = &config_path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let file_value: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("config {} is not valid JSON: {e}", path.display())))?;
        let Value::Object(file_map) = file_value else {
            return Err(Error::Config(format!(
                "config {} must contain a flat JSON object",
                path.display()
            )));
        };
        if let Some(cmd) = file_map.get("command") {
            let from_file = cmd
                .as_str()
                .ok_or_else(|| Error::Config("config key \"command\" must be a string".into()))?;
            if from_file != command.name() {
                return Err(Error::Config(format!(
                    "config file says command {from_file:?} but {:?} was invoked",
                    command.name()
                )));
            }
        }
        merged.extend(file_map);
    }
    merged.remove("command");
    merged.extend(flag_map);

    let p = Params { map: &merged };
    let master_seed = p
        .opt_usize("seed")?
        .map(|s| s as u64)
        .unwrap_or(0);
    let output_path = PathBuf::from(
        p.opt_str("out")?
            .unwrap_or_else(|| format!("runs/{}", command.name())),
    );
    merged.remove("seed");
    merged.remove("out");

    let allowed = command.allowed_keys();
    if let Some(bad) = merged.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::Config(format!(
            "unknown parameter --{bad} for command {} (allowed: {})",
            command.name(),
            allowed.join(", ")
        )));
    }

    Ok(ExperimentConfig {
        command,
        parameters: merged,
        master_seed,
        output_path,
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Execute a resolved experiment: compute rows inside a thread pool sized by
/// `SPARSECODE_THREADS`, write `<command>.csv` under the output directory,
/// then write `manifest.json` atomically (temp file + rename) once the CSV
/// is on disk.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    let started = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true);
    let threads = std::env::var("SPARSECODE_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;

    let p = Params {
        map: &config.parameters,
    };
    let seed = config.master_seed;
    let (lines, violations) = pool.install(|| match config.command {
        Command::Bound => run_bound(&p, seed),
        Command::RateCurve => run_rate_curve(&p, seed),
        Command::Exponent => run_exponent(&p, seed),
        Command::BecBound => run_bec_bound(&p, seed),
        Command::Simulate => run_simulate(&p, seed),
        Command::RankStudy => run_rank_study(&p, seed),
        Command::Convergence => run_convergence(&p, seed),
        Command::SweepDensity => run_sweep_density(&p, seed),
        Command::OracleCheck => run_oracle_check(&p, seed),
    })?;

    std::fs::create_dir_all(&config.output_path)?;
    let csv_name = format!("{}.csv", config.command.name());
    let csv_path = config.output_path.join(&csv_name);
    let csv_bytes = format!("{}\n", lines.join("\n")).into_bytes();
    std::fs::write(&csv_path, &csv_bytes)?;

    let finished = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true);
    let mut echo = config.parameters.clone();
    echo.insert("command".into(), Value::String(config.command.name().into()));
    echo.insert("seed".into(), Value::from(config.master_seed));
    echo.insert(
        "out".into(),
        Value::String(config.output_path.display().to_string()),
    );
    let manifest = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": Value::Object(echo.into_iter().collect()),
        "started": started,
        "finished": finished,
        "outputs": [{
            "path": csv_name,
            "bytes": csv_bytes.len(),
            "sha256": sha256_hex(&csv_bytes),
        }],
    });
    let manifest_path = config.output_path.join("manifest.json");
    write_atomically(&manifest_path, serde_json::to_string_pretty(&manifest).unwrap().as_bytes())?;

    Ok(RunOutput {
        csv_path,
        manifest_path,
        rows: lines.len().saturating_sub(1),
        violations,
    })
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Parse argv and run; the entry point used by the binary.
pub fn run_cli(args: &[String]) -> Result<RunOutput> {
    let config = parse_args(args)?;
    run(&config)
}
