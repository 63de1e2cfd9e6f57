//! Word-packed GF(2) vectors and matrices.
//!
//! Bits are packed 64 per word, little-endian within each word: bit `i` of a
//! vector lives in word `i / 64` at position `i % 64`. Bits past the logical
//! length of the last word are kept at zero, so `weight` and equality are
//! plain word operations. The layout is stated explicitly because matrices
//! serialize to text for debugging and the packing must be reproducible.
//!
//! Everything here is immutable after construction from the caller's point of
//! view (mutators exist only for building), so values can be shared freely
//! across parallel workers. Rank runs on a scratch copy and never modifies
//! its input.

use crate::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Mask selecting the valid bits of the final word of a `len`-bit vector.
fn tail_mask(len: usize) -> u64 {
    let r = len % WORD_BITS;
    if r == 0 {
        u64::MAX
    } else {
        (1u64 << r) - 1
    }
}

/// A fixed-length bit vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Build from booleans, bit `i` taken from `bits[i]`.
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parse a string of '0'/'1' characters, index 0 first.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "bit string may contain only '0'/'1', found {c:?}"
                    )))
                }
            }
        }
        Ok(v)
    }

    /// Low `len` bits of `word`, for len ≤ 64.
    pub fn from_u64(word: u64, len: usize) -> Self {
        assert!(len <= WORD_BITS);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = word & tail_mask(len);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Bitwise XOR; lengths must agree.
    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch(format!(
                "xor of lengths {} and {}",
                self.len, other.len
            )));
        }
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
        Ok(out)
    }

    /// Hamming distance to `other`; lengths must agree.
    pub fn hamming_distance(&self, other: &BitVector) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch(format!(
                "distance of lengths {} and {}",
                self.len, other.len
            )));
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * WORD_BITS + b);
                w &= w - 1;
            }
        }
        out
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVector({})", self.to_bit_string())
    }
}

/// Parity of `a AND b` over word slices of equal length.
fn and_parity(a: &[u64], b: &[u64]) -> bool {
    let mut acc = 0u64;
    for (x, y) in a.iter().zip(b) {
        acc ^= x & y;
    }
    acc.count_ones() % 2 == 1
}

/// An `n×k` matrix over GF(2), rows packed contiguously.
///
/// The matrix is the generator: a length-`cols` message multiplies on the
/// right, producing a length-`rows` codeword. A matrix with zero rows is
/// legal (every row erased) and has rank 0.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = words_for(cols);
        Self {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Assemble from row vectors; all rows must share one length.
    pub fn from_rows(rows: &[BitVector]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in a matrix with {} columns",
                bad.len(),
                cols
            )));
        }
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let base = i * m.words_per_row;
            m.data[base..base + m.words_per_row].copy_from_slice(r.words());
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.words_per_row + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let idx = r * self.words_per_row + c / WORD_BITS;
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    /// Total number of ones.
    pub fn weight(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// GF(2) product `A·x`: output bit `l` is the parity of row `l` AND `x`.
    pub fn mul_vec(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "mat_vec_mul: vector length {} vs {} columns",
                x.len(),
                self.cols
            )));
        }
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            if and_parity(self.row_words(r), x.words()) {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// GF(2) row rank by forward Gaussian elimination on a scratch copy.
    ///
    /// O(rows · cols · words_per_row) word operations, milliseconds at the
    /// desk scale this crate targets (dimensions up to a few thousand).
    pub fn rank(&self) -> usize {
        let wpr = self.words_per_row;
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let mut data = self.data.clone();
        let mut rank = 0usize;
        for col in 0..self.cols {
            let word = col / WORD_BITS;
            let mask = 1u64 << (col % WORD_BITS);
            let Some(pivot) =
                (rank..self.rows).find(|&r| data[r * wpr + word] & mask != 0)
            else {
                continue;
            };
            if pivot != rank {
                for w in 0..wpr {
                    data.swap(rank * wpr + w, pivot * wpr + w);
                }
            }
            let (head, tail) = data.split_at_mut((rank + 1) * wpr);
            let pivot_row = &head[rank * wpr..];
            for r in 0..(self.rows - rank - 1) {
                let row = &mut tail[r * wpr..(r + 1) * wpr];
                if row[word] & mask != 0 {
                    for w in 0..wpr {
                        row[w] ^= pivot_row[w];
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Submatrix of the rows whose `keep` bit is 1, order preserved.
    pub fn keep_rows(&self, keep: &BitVector) -> Result<BitMatrix> {
        if keep.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "keep_rows: mask length {} vs {} rows",
                keep.len(),
                self.rows
            )));
        }
        let mut out = Self::zeros(keep.weight(), self.cols);
        let mut dst = 0;
        for r in 0..self.rows {
            if keep.get(r) {
                let base = dst * out.words_per_row;
                out.data[base..base + out.words_per_row].copy_from_slice(self.row_words(r));
                dst += 1;
            }
        }
        Ok(out)
    }

    /// Column bitmasks for matrices with at most 64 rows: element `c` has bit
    /// `r` set iff `A[r][c] = 1`. Used by the enumeration fast paths.
    pub(crate) fn column_masks_u64(&self) -> Vec<u64> {
        assert!(self.rows <= WORD_BITS, "column_masks_u64 needs rows <= 64");
        let mut cols = vec![0u64; self.cols];
        for r in 0..self.rows {
            for c in self.row(r).ones() {
                cols[c] |= 1u64 << r;
            }
        }
        cols
    }

    /// Debug/test serialization: first line "n k", then n lines of '0'/'1'.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            s.push_str(&self.row(r).to_bit_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty matrix text".into()))?;
        let mut parts = header.split_whitespace();
        let parse = |p: Option<&str>| -> Result<usize> {
            p.and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::InvalidParameter(format!("bad matrix header {header:?}")))
        };
        let rows = parse(parts.next())?;
        let cols = parse(parts.next())?;
        let mut row_vecs = Vec::with_capacity(rows);
        for _ in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::InvalidParameter("matrix text ended early".into()))?;
            let v = BitVector::from_bit_str(line.trim())?;
            if v.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "matrix row of length {} vs {} columns",
                    v.len(),
                    cols
                )));
            }
            row_vecs.push(v);
        }
        Self::from_rows(&row_vecs)
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitMatrix({}x{})", self.rows, self.cols)
    }
}
