//! Randomly drawn generator sequences: how often does a single sampled
//! matrix exceed an error threshold? The exceedance fraction falls with
//! blocklength on both channels — picking a matrix at random is enough.
//!
//! Run: cargo run --release --example convergence

use sparsecode::channel::ChannelSpec;
use sparsecode::ensemble::EnsembleRule;
use sparsecode::montecarlo::{convergence_experiment, ConvergenceSettings};

fn main() {
    let bsc = ConvergenceSettings {
        channel: ChannelSpec::bsc(0.05).unwrap(),
        rule: EnsembleRule::Bernoulli { rho: 0.5 },
        rate: 0.5,
        n_grid: vec![8, 12, 16],
        matrices_per_n: 50,
        delta: 0.2,
        seed: 1,
        inner_samples: 256,
    };
    let bec = ConvergenceSettings {
        channel: ChannelSpec::bec(0.3).unwrap(),
        rule: EnsembleRule::Bernoulli { rho: 0.1 },
        rate: 0.5,
        n_grid: vec![32, 64, 128],
        matrices_per_n: 50,
        delta: 0.1,
        seed: 1,
        inner_samples: 512,
    };
    for (name, settings) in [("BSC(0.05), rho=0.5", bsc), ("BEC(0.3), rho=0.1", bec)] {
        let report = convergence_experiment(&settings).unwrap();
        println!("{name}, R = {}, delta = {}:", settings.rate, report.delta);
        for p in &report.points {
            let max_pe = p.pe_values.iter().cloned().fold(0.0, f64::max);
            println!(
                "  n={:>4} (k={:>3}): P(pe > delta) = {:.2}   worst sampled pe = {:.3}",
                p.n, p.k, p.fraction_above_delta, max_pe
            );
        }
    }
}
