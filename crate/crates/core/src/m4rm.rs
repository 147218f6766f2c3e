//! Method of Four Russians multiplication.
//!
//! The rows of a `k`-row operand `B` (`k <= b`) are split into groups of
//! `ℓ_1, ..., ℓ_K` consecutive rows. Table `j` holds all `2^ℓ_j` XOR
//! combinations of the rows of group `j`, so one row of `A·B` costs `K`
//! table lookups instead of up to `k` row XORs.
//!
//! Tables are kept per word-column of `B`: for word-column `q` the `K`
//! tables are stored back to back, and a multiply sweeps one word-column of
//! the result at a time, which keeps the working tables small and the
//! access to `A` and `C` sequential.

use crate::error::{Error, Result};
use crate::packed_matrix::{low_mask, BitMatrix};
use crate::tuning::default_table_size;

/// Largest accepted group size; a table of `2^20` words is already 8 MiB.
pub const MAX_SPLIT: usize = 20;

/// Group sizes `ℓ_1..ℓ_K` of a table set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splits {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    bases: Vec<usize>,
    entries: usize,
    /// `(c, k)` when the groups are `k` groups of `c` followed by at most
    /// one smaller group.
    uniform: Option<(usize, usize)>,
}

impl Splits {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = sizes.iter().find(|&&l| l == 0 || l > MAX_SPLIT) {
            return Err(Error::InvalidParameter(format!(
                "table group size {bad} outside 1..={MAX_SPLIT}"
            )));
        }
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut bases = Vec::with_capacity(sizes.len());
        let (mut off, mut base) = (0, 0);
        for &l in &sizes {
            offsets.push(off);
            bases.push(base);
            off += l;
            base += 1 << l;
        }
        let uniform = sizes.first().and_then(|&c| {
            let k = sizes.iter().take_while(|&&l| l == c).count();
            (sizes.len() - k <= 1 && sizes[k..].iter().all(|&l| l < c)).then_some((c, k))
        });
        Ok(Self {
            sizes,
            offsets,
            bases,
            entries: base,
            uniform,
        })
    }

    /// `⌊total / c⌋` groups of `c` rows followed by one group with the rest.
    pub fn uniform(total: usize, c: usize) -> Result<Self> {
        if c == 0 {
            return Err(Error::InvalidParameter("table size 0".into()));
        }
        let mut sizes = vec![c; total / c];
        if total % c != 0 {
            sizes.push(total % c);
        }
        Self::new(sizes)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of rows covered, `Σ ℓ_j`.
    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Number of tables `K`.
    pub fn n_tables(&self) -> usize {
        self.sizes.len()
    }

    /// Words per word-column of a table set, `Σ 2^ℓ_j`.
    pub fn entries(&self) -> usize {
        self.entries
    }
}

/// Fills `out` (length `splits.entries()`) with the tables of one
/// word-column. `src[t]` is the word of row `t` of `B`; rows past the end of
/// `src` count as zero. Every entry costs one XOR (doubling construction:
/// `T[2^t + g] = T[g] ⊕ row_t`).
pub(crate) fn build_column_tables(src: &[u64], splits: &Splits, out: &mut [u64]) {
    debug_assert_eq!(out.len(), splits.entries);
    for ((&l, &off), &base) in splits.sizes.iter().zip(&splits.offsets).zip(&splits.bases) {
        let table = &mut out[base..base + (1 << l)];
        table[0] = 0;
        for t in 0..l {
            let row = src.get(off + t).copied().unwrap_or(0);
            let half = 1 << t;
            let (lo, hi) = table.split_at_mut(half);
            for (h, &g) in hi[..half].iter_mut().zip(lo.iter()) {
                *h = g ^ row;
            }
        }
    }
}

/// `dst[i] ^= Σ_j T_j[group j of a[i]]` for every row `i`.
pub(crate) fn apply_column_tables(a: &[u64], splits: &Splits, tables: &[u64], dst: &mut [u64]) {
    debug_assert_eq!(a.len(), dst.len());
    let tables = &tables[..splits.entries];
    let Some((c, k)) = splits.uniform else {
        return apply_general(a, splits, tables, dst);
    };
    let rest = splits.sizes.get(k).copied().unwrap_or(0);
    macro_rules! dispatch {
        ($($n:literal)*) => {
            match c {
                $($n => apply_uniform::<$n>(a, k, rest, tables, dst),)*
                _ => apply_general(a, splits, tables, dst),
            }
        };
    }
    dispatch!(1 2 3 4 5 6 7 8 9 10 11 12 13 14 15 16)
}

/// `k` groups of `C` bits, then one group of `rest < C` bits (if nonzero).
/// The group count stays a runtime value; only the width is fixed.
fn apply_uniform<const C: usize>(a: &[u64], k: usize, rest: usize, tables: &[u64], dst: &mut [u64]) {
    let mask = low_mask(C);
    let rest_mask = low_mask(rest);
    let tail_base = k << C;
    let needed = tail_base + if rest > 0 { 1 << rest } else { 0 };
    assert!(tables.len() >= needed, "table set too short");
    let t = tables.as_ptr();
    for (d, &w) in dst.iter_mut().zip(a) {
        let mut acc = 0u64;
        let mut x = w;
        for j in 0..k {
            // SAFETY: j < k and x & mask < 2^C, so the index is below
            // k·2^C <= tables.len().
            acc ^= unsafe { *t.add((j << C) | (x & mask) as usize) };
            x >>= C;
        }
        if rest > 0 {
            // SAFETY: x & rest_mask < 2^rest and tail_base + 2^rest <= tables.len().
            acc ^= unsafe { *t.add(tail_base | (x & rest_mask) as usize) };
        }
        *d ^= acc;
    }
}

/// Like [`apply_column_tables`] for the listed rows only:
/// `dst[rows[t]] ^= Σ_j T_j[group j of ys[t]]`.
pub(crate) fn apply_column_tables_at(rows: &[usize], ys: &[u64], splits: &Splits, tables: &[u64], dst: &mut [u64]) {
    debug_assert_eq!(rows.len(), ys.len());
    let tables = &tables[..splits.entries];
    let groups: Vec<(u32, u64, usize)> = splits
        .sizes
        .iter()
        .zip(&splits.offsets)
        .zip(&splits.bases)
        .map(|((&l, &off), &base)| (off as u32, low_mask(l), base))
        .collect();
    for (&i, &w) in rows.iter().zip(ys) {
        let mut acc = 0u64;
        for &(off, mask, base) in &groups {
            acc ^= tables[base + ((w >> off) & mask) as usize];
        }
        dst[i] ^= acc;
    }
}

fn apply_general(a: &[u64], splits: &Splits, tables: &[u64], dst: &mut [u64]) {
    let groups: Vec<(u32, u64, usize)> = splits
        .sizes
        .iter()
        .zip(&splits.offsets)
        .zip(&splits.bases)
        .map(|((&l, &off), &base)| (off as u32, low_mask(l), base))
        .collect();
    for (d, &w) in dst.iter_mut().zip(a) {
        let mut acc = 0u64;
        for &(off, mask, base) in &groups {
            acc ^= tables[base + ((w >> off) & mask) as usize];
        }
        *d ^= acc;
    }
}

/// Tables for a `k x m` operand, `k <= b`, one table set per word-column.
#[derive(Clone, Debug)]
pub struct M4rmTables {
    splits: Splits,
    n_cols: usize,
    n_word_cols: usize,
    data: Vec<u64>,
}

impl M4rmTables {
    /// Builds the tables of `b_rows`, which must have exactly `splits.total()`
    /// rows and at most one word of rows (`b`).
    pub fn build_tables(b_rows: &BitMatrix, splits: Splits) -> Result<Self> {
        if b_rows.n_rows() != splits.total() {
            return Err(Error::SplitMismatch {
                expected: b_rows.n_rows(),
                got: splits.total(),
            });
        }
        if b_rows.n_rows() > b_rows.word_bits() {
            return Err(Error::Shape(format!(
                "table operand has {} rows, more than the word width {}",
                b_rows.n_rows(),
                b_rows.word_bits()
            )));
        }
        let per_col = splits.entries();
        let mut data = vec![0u64; per_col * b_rows.n_word_cols()];
        for q in 0..b_rows.n_word_cols() {
            build_column_tables(b_rows.word_col(q), &splits, &mut data[q * per_col..(q + 1) * per_col]);
        }
        Ok(Self {
            splits,
            n_cols: b_rows.n_cols(),
            n_word_cols: b_rows.n_word_cols(),
            data,
        })
    }

    pub fn splits(&self) -> &Splits {
        &self.splits
    }

    /// Entry `g` of table `j`, as the packed row word of word-column `q`.
    pub fn entry(&self, j: usize, g: usize, q: usize) -> u64 {
        assert!(j < self.splits.n_tables() && g < 1 << self.splits.sizes[j] && q < self.n_word_cols);
        self.data[q * self.splits.entries() + self.splits.bases[j] + g]
    }

    fn column(&self, q: usize) -> &[u64] {
        let per_col = self.splits.entries();
        &self.data[q * per_col..(q + 1) * per_col]
    }

    /// `C ← C ⊕ A_block·B`, where `A_block` holds a single word-column whose
    /// columns are the rows of `B`.
    pub fn mult_acc(&self, c: &mut BitMatrix, a_block: &BitMatrix) -> Result<()> {
        if a_block.n_cols() != self.splits.total()
            || a_block.n_rows() != c.n_rows()
            || c.n_cols() != self.n_cols
            || a_block.width() != c.width()
        {
            return Err(Error::Shape(format!(
                "C {}x{} += A {}x{} * B {}x{}",
                c.n_rows(),
                c.n_cols(),
                a_block.n_rows(),
                a_block.n_cols(),
                self.splits.total(),
                self.n_cols
            )));
        }
        if a_block.n_word_cols() == 0 {
            return Ok(());
        }
        let a = a_block.word_col(0);
        for q in 0..self.n_word_cols {
            apply_column_tables(a, &self.splits, self.column(q), c.word_col_mut(q));
        }
        Ok(())
    }
}

/// Convenience free-function form of [`M4rmTables::build_tables`].
pub fn build_tables(b_rows: &BitMatrix, splits: Splits) -> Result<M4rmTables> {
    M4rmTables::build_tables(b_rows, splits)
}

/// Convenience free-function form of [`M4rmTables::mult_acc`].
pub fn mult_acc(c: &mut BitMatrix, a_block: &BitMatrix, tables: &M4rmTables) -> Result<()> {
    tables.mult_acc(c, a_block)
}

/// `A·B` by table-driven multiplication over each word-column block of `A`.
/// `c` is the table size; `None` picks
/// [`default_table_size`](crate::tuning::default_table_size) per block.
pub fn m4rm_mult(a: &BitMatrix, b: &BitMatrix, c: Option<usize>) -> Result<BitMatrix> {
    check_product(a, b)?;
    let mut out = BitMatrix::zeros(a.n_rows(), b.n_cols(), a.width());
    m4rm_mult_acc(&mut out, a, b, c)?;
    Ok(out)
}

pub(crate) fn check_product(a: &BitMatrix, b: &BitMatrix) -> Result<()> {
    if a.n_cols() != b.n_rows() || a.width() != b.width() {
        return Err(Error::Shape(format!(
            "product of {}x{} (b={}) and {}x{} (b={})",
            a.n_rows(),
            a.n_cols(),
            a.width(),
            b.n_rows(),
            b.n_cols(),
            b.width()
        )));
    }
    Ok(())
}

/// `C ← C ⊕ A·B`.
pub fn m4rm_mult_acc(out: &mut BitMatrix, a: &BitMatrix, b: &BitMatrix, c: Option<usize>) -> Result<()> {
    check_product(a, b)?;
    if out.n_rows() != a.n_rows() || out.n_cols() != b.n_cols() || out.width() != a.width() {
        return Err(Error::Shape(format!(
            "accumulator {}x{} for a {}x{} product",
            out.n_rows(),
            out.n_cols(),
            a.n_rows(),
            b.n_cols()
        )));
    }
    if let Some(c) = c {
        if c == 0 || c > MAX_SPLIT {
            return Err(Error::InvalidParameter(format!("table size {c} outside 1..={MAX_SPLIT}")));
        }
    }
    let wb = a.word_bits();
    let k = a.n_cols();
    // Per block of `A`: the rows it touches when fewer than half are
    // nonzero, so sparse or low-rank operands skip their zero rows.
    let mut blocks = Vec::new();
    for p in 0..a.n_word_cols() {
        let a_col = a.word_col(p);
        let nonzero = a_col.iter().filter(|&&w| w != 0).count();
        if nonzero == 0 {
            continue;
        }
        let gathered = (nonzero * 2 < a_col.len()).then(|| {
            let rows: Vec<usize> = (0..a_col.len()).filter(|&i| a_col[i] != 0).collect();
            let ys: Vec<u64> = rows.iter().map(|&i| a_col[i]).collect();
            (rows, ys)
        });
        let lo = p * wb;
        let kp = wb.min(k - lo);
        let size = c.unwrap_or_else(|| default_table_size(kp, nonzero)).min(kp);
        blocks.push((p, lo, kp, Splits::uniform(kp, size)?, gathered));
    }
    // Word-columns of the output outermost: each one stays in cache while
    // every block of `A` is added into it.
    let mut scratch = Vec::new();
    for q in 0..b.n_word_cols() {
        let b_col = b.word_col(q);
        let dst = out.word_col_mut(q);
        for (p, lo, kp, splits, gathered) in &blocks {
            scratch.resize(splits.entries(), 0);
            build_column_tables(&b_col[*lo..lo + kp], splits, &mut scratch);
            match gathered {
                Some((rows, ys)) => apply_column_tables_at(rows, ys, splits, &scratch, dst),
                None => apply_column_tables(a.word_col(*p), splits, &scratch, dst),
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packed_matrix::WordWidth;

    #[test]
    fn uniform_splits() {
        let s = Splits::uniform(64, 5).unwrap();
        assert_eq!(s.n_tables(), 13);
        assert!(s.sizes()[..12].iter().all(|&l| l == 5));
        assert_eq!(s.sizes()[12], 4);
        assert_eq!(Splits::uniform(64, 8).unwrap().n_tables(), 8);
        assert_eq!(Splits::uniform(0, 3).unwrap().n_tables(), 0);
        assert!(Splits::uniform(8, 0).is_err());
        assert!(Splits::new(vec![3, 0]).is_err());
    }

    #[test]
    fn identity_tables_are_shifted_indices() {
        let id = BitMatrix::identity(16, WordWidth::W16);
        let splits = Splits::new(vec![5, 3, 8]).unwrap();
        let t = M4rmTables::build_tables(&id, splits).unwrap();
        for g in 0..32 {
            assert_eq!(t.entry(0, g, 0), g as u64);
        }
        for g in 0..8 {
            assert_eq!(t.entry(1, g, 0), (g as u64) << 5);
        }
        for g in 0..256 {
            assert_eq!(t.entry(2, g, 0), (g as u64) << 8);
        }
    }

    #[test]
    fn zero_operand_gives_zero_tables() {
        let z = BitMatrix::zeros(64, 100, WordWidth::W64);
        let t = M4rmTables::build_tables(&z, Splits::uniform(64, 6).unwrap()).unwrap();
        assert!(t.data.iter().all(|&w| w == 0));
    }

    #[test]
    fn split_mismatch_rejected() {
        let z = BitMatrix::zeros(64, 10, WordWidth::W64);
        assert!(matches!(
            M4rmTables::build_tables(&z, Splits::uniform(60, 6).unwrap()),
            Err(Error::SplitMismatch { .. })
        ));
    }

    #[test]
    fn one_by_one() {
        let one = BitMatrix::identity(1, WordWidth::W64);
        assert_eq!(m4rm_mult(&one, &one, None).unwrap(), one);
    }
}
