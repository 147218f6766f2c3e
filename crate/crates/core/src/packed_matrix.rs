//! Bit-packed matrices over GF(2).
//!
//! A matrix with `n` rows and `m` columns is stored as `μ = ceil(m / b)`
//! word-columns. Word-column `q` holds, for every row `i`, one `b`-bit word
//! whose bit `k` (numeric weight `2^k`) is entry `(i, q·b + k)`. The least
//! significant bit is therefore the leftmost logical column of the word.
//!
//! Word-columns are stored one after the other (column-major over words),
//! each starting on a 64-byte boundary, so a sweep down one word-column is a
//! sequential scan. Every word lives in a `u64`; when `b < 64` the high bits
//! are unused and always zero. Bits of the last word-column beyond `m`
//! (padding) are zero after every public operation.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of matrix entries packed in one word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WordWidth(u32);

impl WordWidth {
    pub const W8: WordWidth = WordWidth(8);
    pub const W16: WordWidth = WordWidth(16);
    pub const W32: WordWidth = WordWidth(32);
    pub const W64: WordWidth = WordWidth(64);

    /// One of the supported machine widths: 8, 16, 32 or 64.
    pub fn new(bits: u32) -> Result<Self> {
        match bits {
            8 | 16 | 32 | 64 => Ok(WordWidth(bits)),
            other => Err(Error::InvalidWordWidth(other)),
        }
    }

    /// Any width in `1..=64`, for reproducing layouts that do not match a
    /// machine word (for instance a 3-bit packing). All algorithms accept
    /// emulated widths; only the binary file format refuses them.
    pub fn emulated(bits: u32) -> Result<Self> {
        if (1..=64).contains(&bits) {
            Ok(WordWidth(bits))
        } else {
            Err(Error::InvalidWordWidth(bits))
        }
    }

    #[inline]
    pub fn bits(self) -> usize {
        self.0 as usize
    }

    /// Mask with the low `b` bits set.
    #[inline]
    pub fn mask(self) -> u64 {
        low_mask(self.0 as usize)
    }

    /// True for the widths accepted by [`WordWidth::new`].
    pub fn is_native(self) -> bool {
        matches!(self.0, 8 | 16 | 32 | 64)
    }
}

impl Default for WordWidth {
    fn default() -> Self {
        WordWidth::W64
    }
}

impl fmt::Display for WordWidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Mask with the low `bits` bits set (`bits <= 64`).
#[inline]
pub(crate) fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

#[inline]
fn shr(x: u64, s: usize) -> u64 {
    if s >= 64 {
        0
    } else {
        x >> s
    }
}

const LINE_WORDS: usize = 8;

#[repr(C, align(64))]
#[derive(Clone, Copy, Default)]
struct CacheLine([u64; LINE_WORDS]);

/// Dense matrix over GF(2), bit-packed into word-columns.
#[derive(Clone)]
pub struct BitMatrix {
    n_rows: usize,
    n_cols: usize,
    width: WordWidth,
    n_word_cols: usize,
    /// Words between the starts of consecutive word-columns (a multiple of 8).
    stride: usize,
    lines: Vec<CacheLine>,
}

impl BitMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize, width: WordWidth) -> Self {
        let b = width.bits();
        let n_word_cols = n_cols.div_ceil(b);
        let stride = n_rows.next_multiple_of(LINE_WORDS);
        let lines = vec![CacheLine::default(); stride / LINE_WORDS * n_word_cols];
        Self {
            n_rows,
            n_cols,
            width,
            n_word_cols,
            stride,
            lines,
        }
    }

    pub fn identity(n: usize, width: WordWidth) -> Self {
        let mut m = Self::zeros(n, n, width);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Packs rows of bits. Every row must have the same length.
    pub fn pack<R: AsRef<[bool]>>(rows: &[R], width: WordWidth) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), n_cols, width);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, row 0 has {n_cols}",
                    row.len()
                )));
            }
            for (j, &bit) in row.iter().enumerate() {
                if bit {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Packs rows written as strings of `0` and `1`.
    pub fn from_strs<S: AsRef<str>>(rows: &[S], width: WordWidth) -> Result<Self> {
        let bits: Vec<Vec<bool>> = rows
            .iter()
            .map(|s| {
                s.as_ref()
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(Error::Format(format!("unexpected character {other:?}"))),
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<_>>()?;
        Self::pack(&bits, width)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn width(&self) -> WordWidth {
        self.width
    }

    #[inline]
    pub fn word_bits(&self) -> usize {
        self.width.bits()
    }

    #[inline]
    pub fn n_word_cols(&self) -> usize {
        self.n_word_cols
    }

    #[inline]
    fn words(&self) -> &[u64] {
        // SAFETY: `CacheLine` is `repr(C)` around `[u64; 8]`, so the vector
        // is a contiguous, suitably aligned run of `8 * len` initialized u64s.
        unsafe {
            std::slice::from_raw_parts(
                self.lines.as_ptr().cast::<u64>(),
                self.lines.len() * LINE_WORDS,
            )
        }
    }

    #[inline]
    fn words_mut(&mut self) -> &mut [u64] {
        // SAFETY: as in `words`; the unique borrow of `self` makes it exclusive.
        unsafe {
            std::slice::from_raw_parts_mut(
                self.lines.as_mut_ptr().cast::<u64>(),
                self.lines.len() * LINE_WORDS,
            )
        }
    }

    /// The `n_rows` words of word-column `q`, row 0 first.
    #[inline]
    pub fn word_col(&self, q: usize) -> &[u64] {
        assert!(q < self.n_word_cols, "word-column {q} out of range");
        let start = q * self.stride;
        &self.words()[start..start + self.n_rows]
    }

    /// Mutable words of word-column `q`. Callers must keep padding bits zero.
    #[inline]
    pub fn word_col_mut(&mut self, q: usize) -> &mut [u64] {
        assert!(q < self.n_word_cols, "word-column {q} out of range");
        let start = q * self.stride;
        let n = self.n_rows;
        &mut self.words_mut()[start..start + n]
    }

    #[inline]
    pub fn word(&self, row: usize, q: usize) -> u64 {
        self.word_col(q)[row]
    }

    /// Valid-bit mask of word-column `q` (all `b` bits except in the last).
    #[inline]
    pub fn col_mask(&self, q: usize) -> u64 {
        if q + 1 == self.n_word_cols {
            self.last_word_mask()
        } else {
            self.width.mask()
        }
    }

    /// Mask of the bits of the last word-column that lie inside the matrix.
    pub fn last_word_mask(&self) -> u64 {
        if self.n_word_cols == 0 {
            return 0;
        }
        let b = self.word_bits();
        low_mask(self.n_cols - (self.n_word_cols - 1) * b)
    }

    /// True when every bit outside the logical matrix is zero.
    pub fn padding_is_zero(&self) -> bool {
        if self.n_word_cols == 0 {
            return true;
        }
        let full = self.width.mask();
        let last = self.last_word_mask();
        (0..self.n_word_cols).all(|q| {
            let mask = if q + 1 == self.n_word_cols { last } else { full };
            self.word_col(q).iter().all(|&w| w & !mask == 0)
        }) && self.words().chunks(self.stride.max(1)).all(|block| {
            block[self.n_rows.min(block.len())..].iter().all(|&w| w == 0)
        })
    }

    /// Clears padding bits of the last word-column.
    pub(crate) fn clear_padding(&mut self) {
        if self.n_word_cols == 0 {
            return;
        }
        let q = self.n_word_cols - 1;
        let mask = self.last_word_mask();
        for w in self.word_col_mut(q) {
            *w &= mask;
        }
    }

    #[inline]
    fn locate(&self, row: usize, col: usize) -> (usize, u64) {
        let b = self.word_bits();
        let q = col / b;
        (q * self.stride + row, 1u64 << (col % b))
    }

    /// Entry `(row, col)`.
    ///
    /// # Panics
    /// Panics when the index is out of range; see [`BitMatrix::try_get`].
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(
            row < self.n_rows && col < self.n_cols,
            "index ({row}, {col}) out of range for {}x{} matrix",
            self.n_rows,
            self.n_cols
        );
        let (idx, bit) = self.locate(row, col);
        self.words()[idx] & bit != 0
    }

    /// Sets entry `(row, col)`.
    ///
    /// # Panics
    /// Panics when the index is out of range; see [`BitMatrix::try_set`].
    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        assert!(
            row < self.n_rows && col < self.n_cols,
            "index ({row}, {col}) out of range for {}x{} matrix",
            self.n_rows,
            self.n_cols
        );
        let (idx, bit) = self.locate(row, col);
        let w = &mut self.words_mut()[idx];
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    fn check_index(&self, row: usize, col: usize) -> Result<()> {
        if row < self.n_rows && col < self.n_cols {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                row,
                col,
                n_rows: self.n_rows,
                n_cols: self.n_cols,
            })
        }
    }

    pub fn try_get(&self, row: usize, col: usize) -> Result<bool> {
        self.check_index(row, col)?;
        Ok(self.get(row, col))
    }

    pub fn try_set(&mut self, row: usize, col: usize, value: bool) -> Result<()> {
        self.check_index(row, col)?;
        self.set(row, col, value);
        Ok(())
    }

    fn check_row(&self, row: usize) -> Result<()> {
        if row < self.n_rows {
            Ok(())
        } else {
            Err(Error::RowOutOfRange {
                row,
                n_rows: self.n_rows,
            })
        }
    }

    /// Exchanges rows `i` and `k` across all word-columns.
    pub fn row_swap(&mut self, i: usize, k: usize) -> Result<()> {
        self.check_row(i)?;
        self.check_row(k)?;
        self.swap_rows_in(i, k, 0..self.n_word_cols);
        Ok(())
    }

    /// Exchanges rows `i` and `k` in the given word-columns only.
    #[inline]
    pub(crate) fn swap_rows_in(&mut self, i: usize, k: usize, word_cols: Range<usize>) {
        if i == k {
            return;
        }
        let stride = self.stride;
        let words = self.words_mut();
        for q in word_cols {
            words.swap(q * stride + i, q * stride + k);
        }
    }

    /// `word(dst, q) ^= word(src, q)` for `q` in `q_from..q_to`.
    pub fn row_xor_range(&mut self, dst: usize, src: usize, q_from: usize, q_to: usize) -> Result<()> {
        self.check_row(dst)?;
        self.check_row(src)?;
        if q_from > q_to || q_to > self.n_word_cols {
            return Err(Error::WordColumnRange {
                from: q_from,
                to: q_to,
                n_word_cols: self.n_word_cols,
            });
        }
        let stride = self.stride;
        let words = self.words_mut();
        for q in q_from..q_to {
            let s = words[q * stride + src];
            words[q * stride + dst] ^= s;
        }
        Ok(())
    }

    /// Reads `nbits <= 64` consecutive entries of `row` starting at `col`;
    /// entry `col + t` lands in bit `t` of the result.
    pub(crate) fn bits(&self, row: usize, col: usize, nbits: usize) -> u64 {
        debug_assert!(nbits <= 64 && col + nbits <= self.n_cols);
        let b = self.word_bits();
        let mut out = 0u64;
        let mut done = 0;
        let mut col = col;
        while done < nbits {
            let q = col / b;
            let off = col % b;
            let take = (b - off).min(nbits - done);
            let piece = (self.words()[q * self.stride + row] >> off) & low_mask(take);
            out |= piece << done;
            done += take;
            col += take;
        }
        out
    }

    /// XORs the low `nbits <= 64` bits of `value` into `row` starting at
    /// column `col`.
    pub(crate) fn xor_bits(&mut self, row: usize, col: usize, value: u64, nbits: usize) {
        debug_assert!(nbits <= 64 && col + nbits <= self.n_cols);
        let b = self.word_bits();
        let stride = self.stride;
        let words = self.words_mut();
        let mut value = value & low_mask(nbits);
        let mut left = nbits;
        let mut col = col;
        while left > 0 {
            let q = col / b;
            let off = col % b;
            let take = (b - off).min(left);
            words[q * stride + row] ^= (value & low_mask(take)) << off;
            value = shr(value, take);
            left -= take;
            col += take;
        }
    }

    /// Copy of the rows `rows` and columns `cols`.
    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> Result<BitMatrix> {
        if rows.start > rows.end || rows.end > self.n_rows || cols.start > cols.end || cols.end > self.n_cols {
            return Err(Error::Shape(format!(
                "submatrix {rows:?} x {cols:?} outside {}x{} matrix",
                self.n_rows, self.n_cols
            )));
        }
        let b = self.word_bits();
        let mut out = BitMatrix::zeros(rows.len(), cols.len(), self.width);
        if cols.start % b == 0 {
            let wc0 = cols.start / b;
            for q in 0..out.n_word_cols {
                let src = &self.word_col(wc0 + q)[rows.clone()];
                out.word_col_mut(q).copy_from_slice(src);
            }
            out.clear_padding();
        } else {
            for q in 0..out.n_word_cols {
                let c0 = cols.start + q * b;
                let nbits = b.min(cols.end - c0);
                for (k, i) in rows.clone().enumerate() {
                    let v = self.bits(i, c0, nbits);
                    out.word_col_mut(q)[k] = v;
                }
            }
        }
        Ok(out)
    }

    /// Copy of the rows `rows`, all columns.
    pub fn rows_range(&self, rows: Range<usize>) -> Result<BitMatrix> {
        self.submatrix(rows, 0..self.n_cols)
    }

    /// `nrows x (nwc·b)` block whose word `(i, q)` is word `(row0 + i, wc0 + q)`
    /// of `self`, or zero where that lies outside `self`.
    pub(crate) fn block_zero_extended(&self, row0: usize, nrows: usize, wc0: usize, nwc: usize) -> BitMatrix {
        let mut out = BitMatrix::zeros(nrows, nwc * self.word_bits(), self.width);
        let row_end = (row0 + nrows).min(self.n_rows);
        if row0 >= row_end {
            return out;
        }
        for q in 0..nwc {
            let sq = wc0 + q;
            if sq >= self.n_word_cols {
                break;
            }
            let src = &self.word_col(sq)[row0..row_end];
            out.word_col_mut(q)[..src.len()].copy_from_slice(src);
        }
        out
    }

    fn combine_block(&mut self, row0: usize, wc0: usize, src: &BitMatrix, xor: bool) {
        assert_eq!(self.width, src.width, "word width mismatch");
        let row_end = (row0 + src.n_rows).min(self.n_rows);
        if row0 >= row_end {
            return;
        }
        let len = row_end - row0;
        for q in 0..src.n_word_cols {
            let dq = wc0 + q;
            if dq >= self.n_word_cols {
                break;
            }
            let mask = self.col_mask(dq);
            let s = &src.word_col(q)[..len];
            let d = &mut self.word_col_mut(dq)[row0..row_end];
            if xor {
                for (dw, &sw) in d.iter_mut().zip(s) {
                    *dw ^= sw & mask;
                }
            } else {
                for (dw, &sw) in d.iter_mut().zip(s) {
                    *dw = sw & mask;
                }
            }
        }
    }

    /// Overwrites the block at `(row0, wc0)` with `src`, clipped to `self`.
    pub(crate) fn paste_block(&mut self, row0: usize, wc0: usize, src: &BitMatrix) {
        self.combine_block(row0, wc0, src, false);
    }

    /// XORs `src` into the block at `(row0, wc0)`, clipped to `self`.
    pub(crate) fn xor_block(&mut self, row0: usize, wc0: usize, src: &BitMatrix) {
        self.combine_block(row0, wc0, src, true);
    }

    /// Stacks `top` over `bottom`.
    pub fn vstack(top: &BitMatrix, bottom: &BitMatrix) -> Result<BitMatrix> {
        if top.n_cols != bottom.n_cols || top.width != bottom.width {
            return Err(Error::Shape(format!(
                "vstack of {}x{} and {}x{}",
                top.n_rows, top.n_cols, bottom.n_rows, bottom.n_cols
            )));
        }
        let mut out = BitMatrix::zeros(top.n_rows + bottom.n_rows, top.n_cols, top.width);
        for q in 0..out.n_word_cols {
            let col = out.word_col_mut(q);
            col[..top.n_rows].copy_from_slice(top.word_col(q));
            col[top.n_rows..].copy_from_slice(bottom.word_col(q));
        }
        Ok(out)
    }

    /// In-place entrywise XOR.
    pub fn xor_assign(&mut self, other: &BitMatrix) -> Result<()> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols || self.width != other.width {
            return Err(Error::Shape(format!(
                "xor of {}x{} (b={}) and {}x{} (b={})",
                self.n_rows, self.n_cols, self.width, other.n_rows, other.n_cols, other.width
            )));
        }
        for q in 0..self.n_word_cols {
            let src = other.word_col(q);
            for (d, &s) in self.word_col_mut(q).iter_mut().zip(src) {
                *d ^= s;
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        (0..self.n_word_cols).all(|q| self.word_col(q).iter().all(|&w| w == 0))
    }

    pub fn count_ones(&self) -> usize {
        (0..self.n_word_cols)
            .map(|q| self.word_col(q).iter().map(|w| w.count_ones() as usize).sum::<usize>())
            .sum()
    }

    pub fn transpose(&self) -> BitMatrix {
        let b = self.word_bits();
        let mut out = BitMatrix::zeros(self.n_cols, self.n_rows, self.width);
        if !b.is_power_of_two() {
            for i in 0..self.n_rows {
                for j in 0..self.n_cols {
                    if self.get(i, j) {
                        out.set(j, i, true);
                    }
                }
            }
            return out;
        }
        let masks = transpose_masks(b);
        let mut tile = vec![0u64; b];
        for rb in 0..self.n_rows.div_ceil(b) {
            let r0 = rb * b;
            let rows = b.min(self.n_rows - r0);
            for q in 0..self.n_word_cols {
                tile.fill(0);
                tile[..rows].copy_from_slice(&self.word_col(q)[r0..r0 + rows]);
                transpose_tile(&mut tile, &masks);
                let c0 = q * b;
                let cols = b.min(self.n_cols - c0);
                out.word_col_mut(rb)[c0..c0 + cols].copy_from_slice(&tile[..cols]);
            }
        }
        out
    }

    /// `P·A` for the row permutation `perm`: row `i` of the result is row
    /// `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &RowPermutation) -> Result<BitMatrix> {
        if perm.len() != self.n_rows {
            return Err(Error::Shape(format!(
                "permutation of length {} applied to {} rows",
                perm.len(),
                self.n_rows
            )));
        }
        let mut out = BitMatrix::zeros(self.n_rows, self.n_cols, self.width);
        for q in 0..self.n_word_cols {
            let src = self.word_col(q);
            let dst = out.word_col_mut(q);
            for (d, &p) in dst.iter_mut().zip(perm.as_slice()) {
                *d = src[p];
            }
        }
        Ok(out)
    }

    /// Words in storage order: word-column 0 top to bottom, then word-column 1...
    pub fn storage_words(&self) -> Vec<u64> {
        (0..self.n_word_cols)
            .flat_map(|q| self.word_col(q).iter().copied())
            .collect()
    }

    /// Inverse of [`BitMatrix::storage_words`].
    pub fn from_storage_words(n_rows: usize, n_cols: usize, width: WordWidth, words: &[u64]) -> Result<Self> {
        let mut m = BitMatrix::zeros(n_rows, n_cols, width);
        if words.len() != n_rows * m.n_word_cols {
            return Err(Error::Format(format!(
                "expected {} words for a {n_rows}x{n_cols} matrix with b={width}, got {}",
                n_rows * m.n_word_cols,
                words.len()
            )));
        }
        for q in 0..m.n_word_cols {
            let mask = m.col_mask(q);
            let src = &words[q * n_rows..(q + 1) * n_rows];
            if let Some(bad) = src.iter().position(|&w| w & !mask != 0) {
                return Err(Error::Format(format!(
                    "word ({bad}, {q}) has bits set outside the matrix"
                )));
            }
            m.word_col_mut(q).copy_from_slice(src);
        }
        Ok(m)
    }

    /// The `n x μ` grid of packed words.
    pub fn word_grid(&self) -> Vec<Vec<u64>> {
        (0..self.n_rows)
            .map(|i| (0..self.n_word_cols).map(|q| self.word(i, q)).collect())
            .collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<bool>> {
        (0..self.n_rows)
            .map(|i| (0..self.n_cols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Same entries repacked with another word width.
    pub fn with_width(&self, width: WordWidth) -> BitMatrix {
        if width == self.width {
            return self.clone();
        }
        let mut out = BitMatrix::zeros(self.n_rows, self.n_cols, width);
        let step = width.bits().min(self.word_bits());
        for i in 0..self.n_rows {
            let mut col = 0;
            while col < self.n_cols {
                let len = step.min(self.n_cols - col);
                let v = self.bits(i, col, len);
                out.xor_bits(i, col, v, len);
                col += len;
            }
        }
        out
    }

    /// Random matrix whose entries are 1 with probability `density`.
    ///
    /// The generator is ChaCha8 seeded with `seed_from_u64(seed)`. Rows are
    /// filled in order, 64 columns at a time. For `density == 0.5` each chunk
    /// is one raw `u64` draw (bit `t` is column `64k + t`); otherwise every
    /// entry consumes one `f64` draw, in column order, and is set when the
    /// draw is below `density`. Densities 0 and 1 consume no draws. The
    /// result depends only on the seed and shape, not on `width`.
    pub fn random_dense(
        n_rows: usize,
        n_cols: usize,
        density: f64,
        seed: u64,
        width: WordWidth,
    ) -> Result<BitMatrix> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::InvalidParameter(format!(
                "density {density} outside [0, 1]"
            )));
        }
        let mut m = BitMatrix::zeros(n_rows, n_cols, width);
        if density == 0.0 {
            return Ok(m);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..n_rows {
            let mut col = 0;
            while col < n_cols {
                let len = 64.min(n_cols - col);
                let chunk = if density == 1.0 {
                    u64::MAX
                } else if density == 0.5 {
                    rng.random::<u64>()
                } else {
                    let mut c = 0u64;
                    for t in 0..len {
                        if rng.random::<f64>() < density {
                            c |= 1 << t;
                        }
                    }
                    c
                };
                m.xor_bits(i, col, chunk, len);
                col += len;
            }
        }
        Ok(m)
    }

    /// Random matrix with exactly `ones` nonzero entries per row, at columns
    /// drawn uniformly without replacement. Rows are generated in order from
    /// one ChaCha8 stream.
    pub fn random_sparse_rows(
        n_rows: usize,
        n_cols: usize,
        ones: usize,
        seed: u64,
        width: WordWidth,
    ) -> Result<BitMatrix> {
        if ones > n_cols {
            return Err(Error::InvalidParameter(format!(
                "{ones} ones per row requested in a matrix with {n_cols} columns"
            )));
        }
        let mut m = BitMatrix::zeros(n_rows, n_cols, width);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..n_rows {
            for j in rand::seq::index::sample(&mut rng, n_cols, ones) {
                m.set(i, j, true);
            }
        }
        Ok(m)
    }
}

/// Masks for the in-register transpose: entry `s` selects bits whose index
/// has bit `s` clear.
fn transpose_masks(b: usize) -> Vec<u64> {
    let mut masks = Vec::new();
    let mut j = 1;
    while j < b {
        let mut mask = 0u64;
        for i in 0..b {
            if i & j == 0 {
                mask |= 1 << i;
            }
        }
        masks.push(mask);
        j <<= 1;
    }
    masks
}

/// Transposes a `b x b` tile held as `b` words, `b` a power of two.
fn transpose_tile(tile: &mut [u64], masks: &[u64]) {
    let b = tile.len();
    let mut j = b / 2;
    while j >= 1 {
        let mask = masks[j.trailing_zeros() as usize];
        let mut k = 0;
        while k < b {
            if k & j == 0 {
                let t = ((tile[k] >> j) ^ tile[k + j]) & mask;
                tile[k] ^= t << j;
                tile[k + j] ^= t;
            }
            k += 1;
        }
        j >>= 1;
    }
}

impl PartialEq for BitMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self.width == other.width
            && (0..self.n_word_cols).all(|q| self.word_col(q) == other.word_col(q))
    }
}

impl Eq for BitMatrix {}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix({}x{}, b={})", self.n_rows, self.n_cols, self.width)?;
        if self.n_rows <= 32 && self.n_cols <= 128 {
            write!(f, "\n{self}")?;
        }
        Ok(())
    }
}

/// Row permutation `P`: row `i` of `P·A` is row `perm[i]` of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowPermutation {
    perm: Vec<usize>,
}

impl RowPermutation {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() {
                return Err(Error::NotAPermutation(format!(
                    "entry {p} out of range for length {}",
                    perm.len()
                )));
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::NotAPermutation(format!("entry {p} repeated")));
            }
        }
        Ok(Self { perm })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn inverse(&self) -> RowPermutation {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        RowPermutation { perm: inv }
    }

    /// `P·A`.
    pub fn apply(&self, a: &BitMatrix) -> Result<BitMatrix> {
        a.permute_rows(self)
    }
}
