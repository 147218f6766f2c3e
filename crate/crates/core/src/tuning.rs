//! Cost model for the table-driven multiply and the parameters derived from it.
//!
//! Costs are counted in abstract units of one `b`-bit XOR. With `K` tables of
//! `ℓ_1..ℓ_K` bits, building the tables costs `Σ (2^ℓ_j − 1)` XORs and every
//! row of the left operand costs `K` XORs, so for `n` rows split uniformly
//! into `b / c` tables of `c` bits:
//!
//! ```text
//! C(b, c, n) = (b / c) · (2^c − 1 + n)
//! ```

use crate::error::{Error, Result};

/// `C(b, c, n)`: XORs to multiply an `n x b` block by a `b`-row operand.
pub fn m4rm_cost(b: usize, c: usize, n: usize) -> f64 {
    assert!(c >= 1, "table size must be positive");
    (b as f64 / c as f64) * (((1u64 << c) - 1) as f64 + n as f64)
}

/// Cost with explicit table splits `ℓ_1..ℓ_K`: `Σ (2^ℓ_j − 1) + K·n`.
pub fn split_cost(splits: &[usize], n: usize) -> f64 {
    let build: f64 = splits.iter().map(|&l| ((1u64 << l) - 1) as f64).sum();
    build + (splits.len() * n) as f64
}

/// Largest table size considered by [`optimal_table_size`].
pub const MAX_TABLE_SIZE: usize = 16;

/// Integer `c` in `2..=min(b, 16)` minimizing `C(b, c, n)`; ties go to the
/// smaller `c`. Word widths below 2 return `b`.
pub fn optimal_table_size(b: usize, n: usize) -> usize {
    let hi = b.min(MAX_TABLE_SIZE);
    if hi < 2 {
        return b.max(1);
    }
    let mut best = 2;
    let mut best_cost = m4rm_cost(b, 2, n);
    for c in 3..=hi {
        let cost = m4rm_cost(b, c, n);
        if cost < best_cost {
            best = c;
            best_cost = cost;
        }
    }
    best
}

/// Byte budget for the tables of one word of rows; keeps them in L1.
pub const TABLE_CACHE_BYTES: usize = 16 * 1024;

/// [`optimal_table_size`] limited so that the `ceil(b/c)` tables of `2^c`
/// words fit in [`TABLE_CACHE_BYTES`]. The cost model ignores memory, and
/// for tall products it asks for tables that spill out of L1.
pub fn default_table_size(b: usize, n: usize) -> usize {
    let mut c = optimal_table_size(b, n);
    while c > 2 && b.div_ceil(c) * (8 << c) > TABLE_CACHE_BYTES {
        c -= 1;
    }
    c
}

/// Row count at which tables of `c + 1` bits start to beat tables of `c`
/// bits: `C(b, c, n) = C(b, c + 1, n)` exactly at `n = (c − 1)·2^c + 1`,
/// independently of `b`. Below it `c` is cheaper, above it `c + 1` is.
pub fn crossover_rows(c: usize) -> f64 {
    ((c as f64) - 1.0) * (1u64 << c) as f64 + 1.0
}

/// Square size from which one level of Strassen recursion is cheaper
/// than the table-driven multiply: `44c + 6(2^c − 1)`.
pub fn strassen_threshold(c: usize) -> usize {
    assert!(c >= 1, "table size must be positive");
    44 * c + 6 * ((1usize << c) - 1)
}

/// Rank regime whose leading-order decomposition cost is predicted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankRegime {
    Full,
    One,
}

/// Leading term of the decomposition cost of an `n x n` matrix, in XOR
/// units: `n³/(3bc)` at full rank, `n³/(2bc)` at rank one. Lower-order terms
/// are dropped, so this is an estimate only.
pub fn predicted_decomposition_cost(n: usize, b: usize, c: usize, regime: RankRegime) -> f64 {
    let n3 = (n as f64).powi(3);
    let bc = (b * c) as f64;
    match regime {
        RankRegime::Full => n3 / (3.0 * bc),
        RankRegime::One => n3 / (2.0 * bc),
    }
}

/// Word size, table size and unit operation costs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostModel {
    pub word_bits: usize,
    pub table_size: usize,
    pub xor_cost: f64,
    pub popc_cost: f64,
}

impl CostModel {
    pub fn new(word_bits: usize, table_size: usize, xor_cost: f64, popc_cost: f64) -> Result<Self> {
        if table_size < 2 || table_size > word_bits {
            return Err(Error::InvalidParameter(format!(
                "table size {table_size} outside 2..={word_bits}"
            )));
        }
        if !(xor_cost > 0.0 && popc_cost > 0.0) {
            return Err(Error::InvalidParameter(
                "operation costs must be positive".into(),
            ));
        }
        Ok(Self {
            word_bits,
            table_size,
            xor_cost,
            popc_cost,
        })
    }

    /// Unit costs, table size from [`optimal_table_size`] for `b` rows.
    pub fn with_default_table(word_bits: usize) -> Result<Self> {
        Self::new(word_bits, optimal_table_size(word_bits, word_bits), 1.0, 1.0)
    }

    /// `T_c^b + n·R_c^b`, scaled by the XOR cost.
    pub fn block_multiply_cost(&self, n: usize) -> f64 {
        self.xor_cost * m4rm_cost(self.word_bits, self.table_size, n)
    }

    /// `M(n) = N²(T + nR) = Xor_b/(bc) · (n²(2^c − 1) + n³)`: cost of an
    /// `n x n` product with the table-driven multiply alone.
    pub fn square_multiply_cost(&self, n: usize) -> f64 {
        let n = n as f64;
        let bc = (self.word_bits * self.table_size) as f64;
        let t = ((1u64 << self.table_size) - 1) as f64;
        self.xor_cost / bc * (n * n * t + n * n * n)
    }

    /// One Strassen level on top of the table-driven multiply:
    /// `11n²/(2b)·Xor_b + 7·M(n/2)`.
    pub fn strassen_level_cost(&self, n: usize) -> f64 {
        let nf = n as f64;
        11.0 * nf * nf / (2.0 * self.word_bits as f64) * self.xor_cost
            + 7.0 * self.square_multiply_cost(n / 2)
    }

    pub fn strassen_threshold(&self) -> usize {
        strassen_threshold(self.table_size)
    }

    pub fn predicted_decomposition_cost(&self, n: usize, regime: RankRegime) -> f64 {
        self.xor_cost * predicted_decomposition_cost(n, self.word_bits, self.table_size, regime)
    }
}

/// Speed ratio of the same multiply done with words of `b` and `2b` bits:
/// doubling the word halves the number of XORs, so the ratio is
/// `2 · Xor_b / Xor_2b` for measured per-XOR times.
pub fn word_size_ratio(xor_b: f64, xor_2b: f64) -> f64 {
    2.0 * xor_b / xor_2b
}
