//! The decoder under study draws its answer from the exact posterior
//! P(x | y). This example walks through one decoding of a repetition code
//! and compares the decoder's success probability with exhaustive
//! enumeration.
//!
//! Run: cargo run --release --example posterior_decoder

use sparsecode::channel::{bsc_apply, bsc_posterior};
use sparsecode::montecarlo::exact_pc_bsc;
use sparsecode::{BitMatrix, BitVector};

fn main() {
    // Rate-1/5 repetition code: five copies of one message bit.
    let a = BitMatrix::from_rows(&[
        BitVector::from_bit_str("1").unwrap(),
        BitVector::from_bit_str("1").unwrap(),
        BitVector::from_bit_str("1").unwrap(),
        BitVector::from_bit_str("1").unwrap(),
        BitVector::from_bit_str("1").unwrap(),
    ])
    .unwrap();
    let eps = 0.2;

    let x = BitVector::from_bit_str("1").unwrap();
    let z = a.mul_vec(&x).unwrap();
    let y = bsc_apply(&z, eps, 7).unwrap();
    println!("sent codeword {}, received {}", z.to_bit_string(), y.to_bit_string());

    let posterior = bsc_posterior(&a, &y, eps).unwrap();
    println!("posterior: P(x=0|y) = {:.6}, P(x=1|y) = {:.6}", posterior[0], posterior[1]);

    // Averaging the posterior mass of the true message over channel use is
    // exactly the decoder's success probability.
    let pc = exact_pc_bsc(&a, eps).unwrap();
    println!("decoder success probability over the ensemble of channel noise: {pc:.6}");
}
