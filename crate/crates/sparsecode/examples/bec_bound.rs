//! Rank-based BEC bound with both estimators, against the exact ensemble
//! average where enumeration is feasible.
//!
//! Run: cargo run --release --example bec_bound

use sparsecode::bounds::{bec_bound, BecEstimator};
use sparsecode::channel::ChannelSpec;
use sparsecode::ensemble::EnsembleSpec;
use sparsecode::montecarlo::exact_ensemble_avg;

fn main() {
    // Tiny case first: enumeration cross-check.
    let spec = EnsembleSpec::bernoulli(3, 2, 0.5).unwrap();
    let exact = exact_ensemble_avg(&spec, &ChannelSpec::bec(0.25).unwrap()).unwrap();
    let direct = bec_bound(&spec, 0.25, BecEstimator::Direct, 20_000, 4, None).unwrap();
    println!(
        "bernoulli(3,2,0.5) + BEC(0.25): exact {exact:.6}, direct MC {:.6} ± {:.6}",
        direct.value,
        direct.std_error.unwrap()
    );

    // Moderate size: jensen (the bound direction) vs direct (unbiased).
    let spec = EnsembleSpec::bernoulli(200, 100, 0.1).unwrap();
    let eps = 0.4;
    for estimator in [BecEstimator::Jensen, BecEstimator::Direct] {
        let r = bec_bound(&spec, eps, estimator, 200, 9, Some(0.25)).unwrap();
        println!(
            "bernoulli(200,100,0.1) + BEC({eps}) {:<7} value {:.6} pe {:.3e} (se {:.2e}, window {:?})",
            estimator.name(),
            r.value,
            r.pe_upper,
            r.std_error.unwrap(),
            r.window.unwrap()
        );
    }
}
