//! Bounds along vanishing-density schedules: rho(n) = n^(-gamma) on the BSC
//! (exploratory) and rho(n) = c·ln(n)/n on the BEC.
//!
//! Run: cargo run --release --example density_sweep

use sparsecode::bounds::{vanishing_density_sweep, DensitySchedule};
use sparsecode::channel::ChannelSpec;

fn main() {
    println!("BSC(0.05), R = 0.8 C, rho(n) = n^(-0.5):");
    let points = vanishing_density_sweep(
        &ChannelSpec::bsc(0.05).unwrap(),
        &DensitySchedule::PowerLaw { gamma: 0.5 },
        0.8,
        &[100, 200, 400, 800, 1600],
        None,
        1,
        0,
    )
    .unwrap();
    for p in &points {
        println!(
            "  n={:>5} k={:>4} rho={:.4}: pe_upper = {:.4e}",
            p.n, p.k, p.rho_n, p.result.pe_upper
        );
    }

    println!("\nBEC(0.5), R = 0.8 C, rho(n) = 2 ln(n)/n (48 rank trials per weight):");
    let points = vanishing_density_sweep(
        &ChannelSpec::bec(0.5).unwrap(),
        &DensitySchedule::LogOverN { c: 2.0 },
        0.8,
        &[128, 256, 512, 1024],
        Some(0.1),
        48,
        1,
    )
    .unwrap();
    for p in &points {
        println!(
            "  n={:>5} k={:>4} rho={:.4}: value = {:.4} ± {:.4}",
            p.n,
            p.k,
            p.rho_n,
            p.result.value,
            p.result.std_error.unwrap()
        );
    }
}
