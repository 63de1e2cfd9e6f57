//! Error-exponent slope fits of the BSC bound for several densities.
//!
//! Run: cargo run --release --example error_exponent

use sparsecode::bounds::{bsc_ensemble_bound, exponent_fit};
use sparsecode::channel::ChannelSpec;
use sparsecode::ensemble::EnsembleSpec;

fn main() {
    let eps = 0.05;
    let capacity = ChannelSpec::bsc(eps).unwrap().capacity();
    let r_over_c = 0.8;
    for (label, n_grid) in [
        ("n = 100..400 ", (100..=400).step_by(50).collect::<Vec<_>>()),
        ("n = 100..1000", (100..=1000).step_by(100).collect::<Vec<_>>()),
    ] {
        println!("fit window {label} (eps={eps}, R = {r_over_c}·C):");
        for rho in [0.1, 0.3, 0.5] {
            let pts: Vec<(usize, f64)> = n_grid
                .iter()
                .map(|&n| {
                    let k = ((n as f64 * r_over_c * capacity).round() as usize).max(1);
                    let spec = EnsembleSpec::bernoulli(n, k, rho).unwrap();
                    (n, bsc_ensemble_bound(&spec, eps, None).unwrap().pe_upper)
                })
                .collect();
            let fit = exponent_fit(&pts).unwrap();
            println!(
                "  rho={rho}: slope {:.5} bits/symbol (r^2 {:.5}), pe {:.2e} -> {:.2e}",
                fit.slope_bits_per_symbol,
                fit.r_squared,
                pts.first().unwrap().1,
                pts.last().unwrap().1
            );
        }
    }
    println!(
        "\nIn the small-blocklength window the sparse curve is flatter (smaller exponent).\n\
         Extending the window past its error plateau, the sparse curve decays steeper while\n\
         it converges back toward the dense ones, so the fitted ordering flips."
    );
}
