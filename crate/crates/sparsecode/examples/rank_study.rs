//! Expected GF(2) rank of sparse random matrices: the engine behind the BEC
//! results. A log(n)/n density already makes square matrices essentially
//! full rank, and row-regular wide matrices keep full row rank.
//!
//! Run: cargo run --release --example rank_study

use sparsecode::ensemble::EnsembleSpec;
use sparsecode::montecarlo::mc_expected_rank;

fn main() {
    println!("bernoulli n x n, rho = 2 ln(n)/n:");
    for n in [64usize, 128, 256, 512] {
        let rho = 2.0 * (n as f64).ln() / n as f64;
        let spec = EnsembleSpec::bernoulli(n, n, rho).unwrap();
        let est = mc_expected_rank(&spec, 200, 1).unwrap();
        println!(
            "  n={n:>4} rho={rho:.4}: mean rank {:>8.2} ± {:.2}  (rank/n = {:.5})",
            est.mean,
            est.std_error,
            est.mean / n as f64
        );
    }

    println!("\nrow-regular 0.75n x n, w = round(0.3 n):");
    for n in [64usize, 128, 256] {
        let m = n * 3 / 4;
        let w = (0.3 * n as f64).round() as usize;
        let spec = EnsembleSpec::row_regular(m, n, w).unwrap();
        let est = mc_expected_rank(&spec, 200, 1).unwrap();
        println!(
            "  m={m:>4} k={n:>4} w={w:>3}: mean rank {:>8.2} ± {:.2}  (rank/m = {:.5})",
            est.mean,
            est.std_error,
            est.mean / m as f64
        );
    }
}
