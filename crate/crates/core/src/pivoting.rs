//! Pivot selection and pseudo-inverse of one word-column block.
//!
//! Given the candidate rows of a `b`-column block, [`build_z`] walks the bit
//! positions `k = 0..b` and, for each, picks the first remaining row that
//! keeps the growing `k x k` leading block invertible. When no row qualifies
//! a virtual unit row `e_k` is inserted instead, so the square system
//! `J·B' + R` (selected rows placed by `J`, unit rows `R` at the inserted
//! positions) stays invertible. Its inverse, with the inserted columns
//! dropped, is the `b x r` matrix `Z` with `B'·Z = I_r`; for every other
//! candidate row `d` of the block, `d·Z` gives the coefficients expressing
//! `d` in the selected rows.
//!
//! `Z` and the working matrix `M` are held as `b` words. Row `j` of `Z` is
//! word `j`, and bit `t` of that word is column `t`.

use crate::m4rm::{apply_column_tables, build_column_tables, Splits};
use crate::packed_matrix::{low_mask, BitMatrix, WordWidth};

/// Returned by [`IncrementalInverse::try_push`] when a row would make the
/// next leading block singular.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rejected;

/// Inverse of the leading block of a growing `b x b` matrix whose rows are
/// appended one at a time.
///
/// After `k` pushes, the rows `B_k` pushed so far (restricted to their first
/// `k` bits) satisfy `B_k · Z_k = I_k`, where `Z_k` is the leading `k x k`
/// block of the state. A row is accepted iff the `(k+1) x (k+1)` block stays
/// invertible, which the state tests with one masked parity: bits beyond
/// position `k` of the row are ignored.
#[derive(Clone, Debug)]
pub struct IncrementalInverse {
    b: usize,
    k: usize,
    z: Vec<u64>,
    m: Vec<u64>,
}

impl IncrementalInverse {
    pub fn new(b: usize) -> Self {
        assert!((1..=64).contains(&b), "width {b} outside 1..=64");
        let units: Vec<u64> = (0..b).map(|j| 1u64 << j).collect();
        Self {
            b,
            k: 0,
            z: units.clone(),
            m: units,
        }
    }

    /// Rows pushed so far.
    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn is_full(&self) -> bool {
        self.k == self.b
    }

    /// Mask `c` such that row `a` is admissible at the next position iff
    /// `popcount(c & a)` is odd.
    pub fn candidate_mask(&self) -> u64 {
        let k = self.k;
        let mut c = 1u64 << k;
        for i in 0..k {
            if self.m[i] >> k & 1 != 0 {
                c ^= 1 << i;
            }
        }
        c
    }

    pub fn admissible(&self, row: u64) -> bool {
        (self.candidate_mask() & row).count_ones() & 1 == 1
    }

    /// Appends `row` if the next leading block stays invertible.
    pub fn try_push(&mut self, row: u64) -> Result<(), Rejected> {
        assert!(!self.is_full(), "all {} positions already filled", self.b);
        let c = self.candidate_mask();
        if (c & row).count_ones() & 1 == 0 {
            return Err(Rejected);
        }
        self.accept(row, c);
        Ok(())
    }

    /// Appends the unit row `e_k`, which is always admissible.
    pub fn insert_unit(&mut self) {
        assert!(!self.is_full(), "all {} positions already filled", self.b);
        let c = self.candidate_mask();
        self.accept(1 << self.k, c);
    }

    fn accept(&mut self, y: u64, c: u64) {
        let k = self.k;
        self.m[k] = y;
        for j in 0..k {
            if y >> j & 1 != 0 {
                self.z[k] ^= self.z[j];
                self.m[k] ^= self.m[j];
            }
        }
        let (zk, mk) = (self.z[k], self.m[k]);
        for j in 0..k {
            if c >> j & 1 != 0 {
                self.z[j] ^= zk;
                self.m[j] ^= mk;
            }
        }
        self.k += 1;
    }

    /// Leading `k x k` block of the inverse, as `k` words of `k` bits.
    pub fn inverse(&self) -> Vec<u64> {
        let mask = low_mask(self.k);
        self.z[..self.k].iter().map(|&w| w & mask).collect()
    }

    /// All `b` words of the state (meaningful once full).
    pub fn z_words(&self) -> &[u64] {
        &self.z
    }
}

/// Outcome of [`build_z`] on one block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotRecord {
    width: usize,
    /// For each bit position, the original index of the row selected there,
    /// or `None` where a unit row was inserted.
    source_rows: Vec<Option<usize>>,
    rank: usize,
    /// Row swaps applied to the candidate words, in order.
    swaps: Vec<(usize, usize)>,
    /// Parity mask used at each bit position.
    masks: Vec<u64>,
    /// Inverse of `J·B' + R`: `b` words of `b` bits.
    z_full: Vec<u64>,
    /// `z_full` with the inserted columns removed: `b` words of `rank` bits.
    z: Vec<u64>,
}

impl PivotRecord {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn source_rows(&self) -> &[Option<usize>] {
        &self.source_rows
    }

    pub fn swaps(&self) -> &[(usize, usize)] {
        &self.swaps
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    /// Compressed pseudo-inverse `Z` (`b` words, each `rank` bits wide).
    pub fn z(&self) -> &[u64] {
        &self.z
    }

    /// Uncompressed `(J·B' + R)⁻¹` (`b` words of `b` bits).
    pub fn z_full(&self) -> &[u64] {
        &self.z_full
    }

    /// Bit positions at which a unit row was inserted.
    pub fn inserted_positions(&self) -> Vec<usize> {
        (0..self.width).filter(|&k| self.source_rows[k].is_none()).collect()
    }

    /// Bit positions at which a real row was selected, in selection order.
    pub fn selected_positions(&self) -> Vec<usize> {
        (0..self.width).filter(|&k| self.source_rows[k].is_some()).collect()
    }

    /// `J` (`b x r`, row `k_t` of column `t` set for the `t`-th selection)
    /// and `R` (`b x b`, unit rows at inserted positions).
    pub fn insertion_matrices(&self, width: WordWidth) -> (BitMatrix, BitMatrix) {
        let mut j = BitMatrix::zeros(self.width, self.rank, width);
        let mut r = BitMatrix::zeros(self.width, self.width, width);
        for (t, k) in self.selected_positions().into_iter().enumerate() {
            j.set(k, t, true);
        }
        for k in self.inserted_positions() {
            r.set(k, k, true);
        }
        (j, r)
    }

    /// `Y = D·Z` for candidate words `d`: row `i` of the result (a
    /// `rank`-bit word) holds the coefficients of `d[i]` over the selected
    /// rows, provided `d[i]` lies in their span.
    pub fn compute_y(&self, d: &[u64]) -> Vec<u64> {
        let mut y = vec![0u64; d.len()];
        self.compute_y_into(d, &mut y);
        y
    }

    /// [`PivotRecord::compute_y`] writing into `y` (overwritten).
    pub fn compute_y_into(&self, d: &[u64], y: &mut [u64]) {
        y.fill(0);
        if self.rank == 0 || d.is_empty() {
            return;
        }
        let splits = Splits::uniform(self.width, 8.min(self.width)).expect("valid table size");
        let mut tables = vec![0u64; splits.entries()];
        build_column_tables(&self.z, &splits, &mut tables);
        apply_column_tables(d, &splits, &tables, y);
    }
}

/// Selects pivots in one block of candidate rows, swapping the selected rows
/// to the front of `rows` in selection order, and returns the pseudo-inverse.
///
/// Each word of `rows` holds the `b` bits of one candidate row, with zero
/// padding above the block's valid columns. The first remaining row that
/// passes the parity test is taken at each position.
pub fn build_z(rows: &mut [u64], width: WordWidth) -> PivotRecord {
    let b = width.bits();
    let mut inv = IncrementalInverse::new(b);
    let mut source_rows = vec![None; b];
    let mut swaps = Vec::new();
    let mut masks = Vec::with_capacity(b);
    // Original index of the rows that moved; positions not listed are in place.
    let mut moved: Vec<(usize, usize)> = Vec::new();
    let original = |moved: &[(usize, usize)], pos: usize| {
        moved.iter().find(|&&(p, _)| p == pos).map_or(pos, |&(_, o)| o)
    };

    let mut next = 0;
    for k in 0..b {
        let c = inv.candidate_mask();
        masks.push(c);
        let found = rows[next..]
            .iter()
            .position(|&a| (c & a).count_ones() & 1 == 1)
            .map(|off| next + off);
        match found {
            Some(i) => {
                let (oi, on) = (original(&moved, i), original(&moved, next));
                source_rows[k] = Some(oi);
                if i != next {
                    rows.swap(i, next);
                    swaps.push((next, i));
                    moved.retain(|&(p, _)| p != i && p != next);
                    moved.push((next, oi));
                    moved.push((i, on));
                }
                inv.accept(rows[next], c);
                next += 1;
            }
            None => inv.accept(1 << k, c),
        }
    }

    let z_full = inv.z_words().to_vec();
    let z = compress(&z_full, &source_rows);
    PivotRecord {
        width: b,
        rank: next,
        source_rows,
        swaps,
        masks,
        z_full,
        z,
    }
}

/// Removes bit `i` from every word for each position `i` without a selected
/// row, shifting the higher bits down.
fn compress(z_full: &[u64], source_rows: &[Option<usize>]) -> Vec<u64> {
    let mut z = z_full.to_vec();
    let mut keep = 0u64;
    for src in source_rows {
        if src.is_none() {
            for w in &mut z {
                *w = ((*w >> 1) & !keep) ^ (*w & keep);
            }
        } else {
            keep = 2 * keep + 1;
        }
    }
    z
}
