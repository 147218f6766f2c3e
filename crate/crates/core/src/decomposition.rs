//! `P·A = L·U` without column permutations.
//!
//! The block variant walks the word-columns of a working copy `W` of `A`.
//! At word-column `j`, with `s` pivot rows already found, [`build_z`] picks
//! up to `b` pivot rows among rows `s..n` and moves them to `s..s+r`. Every
//! remaining row `d` is a combination `y·B'` of those pivots, so its
//! word-column `j` is cleared, `y` becomes its row of `L`, and the rest of
//! the row is updated by `E ← E ⊕ Y·C` with the table-driven multiply.
//! After the last word-column the first `r` rows of `W` are `U`.
//!
//! The recursive variant factors the left half of the word-columns, brings
//! the pivot rows of the right half into `U` form with `L_top⁻¹·C`, applies
//! the update `D ← D ⊕ L_bot·(L_top⁻¹·C)` with Strassen, and factors what is
//! left of the right half.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::m4rm::{apply_column_tables, apply_column_tables_at, build_column_tables, m4rm_mult, Splits};
use crate::packed_matrix::{low_mask, BitMatrix, RowPermutation};
use crate::pivoting::build_z;
use crate::strassen::strassen_mult;
use crate::tuning::{default_table_size, strassen_threshold};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Block,
    Recursive,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Block => "block",
            Variant::Recursive => "recursive",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "block" => Ok(Variant::Block),
            "recursive" | "rec" => Ok(Variant::Recursive),
            other => Err(Error::InvalidParameter(format!("unknown variant {other:?}"))),
        }
    }
}

/// Tuning knobs; `None` fields take the cost-model defaults.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecomposeOptions {
    /// Table size of the update multiplies.
    pub table_size: Option<usize>,
    /// Column count at or below which the recursion switches to the block loop
    /// (default `4b`).
    pub min_cols: Option<usize>,
    /// Switch point of the Strassen multiply in the recursive update.
    pub strassen_threshold: Option<usize>,
}

/// Result of a decomposition: `P·A = L·U`.
#[derive(Clone, Debug)]
pub struct LuFactors {
    p: RowPermutation,
    l: BitMatrix,
    u: BitMatrix,
    block_ranks: Vec<usize>,
}

impl LuFactors {
    pub fn p(&self) -> &RowPermutation {
        &self.p
    }

    /// `n x r` unit lower trapezoidal factor.
    pub fn l(&self) -> &BitMatrix {
        &self.l
    }

    /// `r x m` upper block staircase factor, in the column order of `A`.
    pub fn u(&self) -> &BitMatrix {
        &self.u
    }

    pub fn rank(&self) -> usize {
        self.u.n_rows()
    }

    /// Pivots found in each word-column.
    pub fn block_ranks(&self) -> &[usize] {
        &self.block_ranks
    }

    /// `L·U`, which equals `P·A`.
    pub fn recompose(&self) -> BitMatrix {
        m4rm_mult(&self.l, &self.u, None).expect("factor shapes agree")
    }

    pub fn into_parts(self) -> (RowPermutation, BitMatrix, BitMatrix, Vec<usize>) {
        (self.p, self.l, self.u, self.block_ranks)
    }

    /// Assembles factors without checking them (for fault-injection tests
    /// of the verifier).
    pub fn from_parts(p: RowPermutation, l: BitMatrix, u: BitMatrix, block_ranks: Vec<usize>) -> Self {
        Self {
            p,
            l,
            u,
            block_ranks,
        }
    }
}

pub fn decompose_block(a: &BitMatrix) -> LuFactors {
    decompose(a, Variant::Block, &DecomposeOptions::default())
}

pub fn decompose_recursive(a: &BitMatrix, min_cols: usize) -> LuFactors {
    let opts = DecomposeOptions {
        min_cols: Some(min_cols),
        ..DecomposeOptions::default()
    };
    decompose(a, Variant::Recursive, &opts)
}

pub fn decompose(a: &BitMatrix, variant: Variant, opts: &DecomposeOptions) -> LuFactors {
    let mut f = Factorizer::new(a, *opts);
    let mu = a.n_word_cols();
    let r = match variant {
        Variant::Block => f.factor_block(0, 0..mu),
        Variant::Recursive => f.factor_recursive(0, 0..mu),
    };
    f.finish(r)
}

struct Factorizer {
    w: BitMatrix,
    l: BitMatrix,
    perm: Vec<usize>,
    block_ranks: Vec<usize>,
    opts: DecomposeOptions,
    y: Vec<u64>,
    active: Vec<usize>,
    y_active: Vec<u64>,
    tables: Vec<u64>,
}

impl Factorizer {
    fn new(a: &BitMatrix, opts: DecomposeOptions) -> Self {
        let n = a.n_rows();
        Self {
            w: a.clone(),
            l: BitMatrix::zeros(n, n.min(a.n_cols()), a.width()),
            perm: (0..n).collect(),
            block_ranks: vec![0; a.n_word_cols()],
            opts,
            y: Vec::new(),
            active: Vec::new(),
            y_active: Vec::new(),
            tables: Vec::new(),
        }
    }

    fn finish(self, r: usize) -> LuFactors {
        let n = self.w.n_rows();
        LuFactors {
            p: RowPermutation::new(self.perm).expect("swaps keep a permutation"),
            l: self.l.submatrix(0..n, 0..r).expect("rank fits"),
            u: self.w.rows_range(0..r).expect("rank fits"),
            block_ranks: self.block_ranks,
        }
    }

    fn factor_block(&mut self, row_lo: usize, wcs: Range<usize>) -> usize {
        let mut s = row_lo;
        let hi = wcs.end;
        for j in wcs {
            if s == self.w.n_rows() {
                break;
            }
            s += self.block_step(j, s, hi);
        }
        s - row_lo
    }

    /// Eliminates word-column `j` below row `s`, updating word-columns
    /// `j+1..wc_hi`. Returns the number of pivots found.
    fn block_step(&mut self, j: usize, s: usize, wc_hi: usize) -> usize {
        let n = self.w.n_rows();
        let mu = self.w.n_word_cols();
        let width = self.w.width();
        let rec = build_z(&mut self.w.word_col_mut(j)[s..], width);
        let l_wcs = s.div_ceil(width.bits());
        for &(x, y) in rec.swaps() {
            self.w.swap_rows_in(s + x, s + y, j + 1..mu);
            self.l.swap_rows_in(s + x, s + y, 0..l_wcs);
            self.perm.swap(s + x, s + y);
        }
        let r = rec.rank();
        self.block_ranks[j] = r;
        if r == 0 {
            return 0;
        }

        for t in 0..r {
            self.l.set(s + t, s + t, true);
        }
        let below = s + r..n;
        self.y.resize(below.len(), 0);
        rec.compute_y_into(&self.w.word_col(j)[below.clone()], &mut self.y);
        self.w.word_col_mut(j)[below.clone()].fill(0);
        self.active.clear();
        for (t, &yw) in self.y.iter().enumerate() {
            if yw != 0 {
                self.l.xor_bits(s + r + t, s, yw, r);
                self.active.push(t);
            }
        }
        let active = self.active.len();
        if active == 0 || j + 1 >= wc_hi {
            return r;
        }
        // Few rows to update (sparse or low-rank input): touch only those.
        let gather = active * 2 < below.len();
        if gather {
            self.y_active.clear();
            self.y_active.extend(self.active.iter().map(|&t| self.y[t]));
        }

        let c = self
            .opts
            .table_size
            .unwrap_or_else(|| default_table_size(r, active))
            .clamp(1, r);
        let splits = Splits::uniform(r, c).expect("valid table size");
        self.tables.resize(splits.entries(), 0);
        for q in j + 1..wc_hi {
            let (top, bottom) = self.w.word_col_mut(q).split_at_mut(s + r);
            build_column_tables(&top[s..], &splits, &mut self.tables);
            if gather {
                apply_column_tables_at(&self.active, &self.y_active, &splits, &self.tables, bottom);
            } else {
                apply_column_tables(&self.y, &splits, &self.tables, bottom);
            }
        }
        r
    }

    fn factor_recursive(&mut self, row_lo: usize, wcs: Range<usize>) -> usize {
        let n = self.w.n_rows();
        let b = self.w.word_bits();
        let min_cols = self.opts.min_cols.unwrap_or(4 * b);
        let width = wcs.len();
        if width <= 1 || width * b <= min_cols || row_lo == n {
            return self.factor_block(row_lo, wcs);
        }
        let mid = wcs.start + width.div_ceil(2);
        let r1 = self.factor_recursive(row_lo, wcs.start..mid);
        let top = row_lo..row_lo + r1;
        if r1 > 0 {
            let right = wcs.end - mid;
            let c_blk = self.w.block_zero_extended(row_lo, r1, mid, right);
            let l_top = self.l.submatrix(top.clone(), top.clone()).expect("in range");
            let c_new = trsm_lower(&l_top, &c_blk, self.opts.table_size);
            self.w.paste_block(row_lo, mid, &c_new);
            if top.end < n {
                let l_bot = self.l.submatrix(top.end..n, top.clone()).expect("in range");
                let threshold = self.opts.strassen_threshold.unwrap_or_else(|| {
                    update_threshold(b, n - top.end, self.opts.table_size)
                });
                let update = strassen_mult(&l_bot, &c_new, threshold, self.opts.table_size)
                    .expect("shapes agree");
                self.w.xor_block(top.end, mid, &update);
            }
        }
        let r2 = self.factor_recursive(top.end, mid..wcs.end);
        r1 + r2
    }
}

/// Strassen switch point for the table size the base multiplies of an
/// update with `rows` rows will use.
fn update_threshold(b: usize, rows: usize, table_size: Option<usize>) -> usize {
    strassen_threshold(table_size.unwrap_or_else(|| default_table_size(b, rows)))
}

fn check_unit_lower(l: &BitMatrix) -> Result<()> {
    if l.n_rows() != l.n_cols() {
        return Err(Error::Shape(format!("{}x{} factor is not square", l.n_rows(), l.n_cols())));
    }
    let b = l.word_bits();
    for i in 0..l.n_rows() {
        if !l.get(i, i) {
            return Err(Error::NotUnitLowerTriangular(format!("zero diagonal entry {i}")));
        }
        for q in i / b..l.n_word_cols() {
            let mut above = l.word(i, q);
            if q == i / b {
                above &= !low_mask(i % b + 1);
            }
            if above != 0 {
                return Err(Error::NotUnitLowerTriangular(format!(
                    "nonzero entry above the diagonal in row {i}"
                )));
            }
        }
    }
    Ok(())
}

/// `L⁻¹·C` for unit lower triangular `L`.
pub fn forward_substitute(l: &BitMatrix, c: &BitMatrix) -> Result<BitMatrix> {
    check_unit_lower(l)?;
    if c.n_rows() != l.n_rows() || c.width() != l.width() {
        return Err(Error::Shape(format!(
            "{}x{} triangular factor against {}x{} right-hand side",
            l.n_rows(),
            l.n_cols(),
            c.n_rows(),
            c.n_cols()
        )));
    }
    Ok(trsm_lower(l, c, None))
}

/// Triangular systems at or below this many word rows are solved by block
/// forward substitution instead of being split further.
const TRSM_BASE_WORDS: usize = 64;

/// Unchecked forward substitution. Splits at word boundaries down to
/// `TRSM_BASE_WORDS` words of rows, then substitutes one word block at a
/// time.
fn trsm_lower(l: &BitMatrix, c: &BitMatrix, table_size: Option<usize>) -> BitMatrix {
    let r = l.n_rows();
    let b = l.word_bits();
    if r <= TRSM_BASE_WORDS * b {
        let mut x = c.clone();
        substitute_in_place(l, &mut x, table_size);
        return x;
    }
    let h = (r / 2).div_ceil(b) * b;
    let x1 = trsm_lower(&l.submatrix(0..h, 0..h).expect("in range"), &c.rows_range(0..h).expect("in range"), table_size);
    let l21 = l.submatrix(h..r, 0..h).expect("in range");
    let mut c2 = c.rows_range(h..r).expect("in range");
    c2.xor_assign(
        &strassen_mult(&l21, &x1, update_threshold(b, r - h, table_size), table_size)
            .expect("shapes agree"),
    )
    .expect("shapes agree");
    let x2 = trsm_lower(&l.submatrix(h..r, h..r).expect("in range"), &c2, table_size);
    BitMatrix::vstack(&x1, &x2).expect("shapes agree")
}

/// Overwrites `x` with `L⁻¹·x`. Each word block of rows is first solved
/// against its diagonal block, then removed from every row below it with one
/// table set per word-column.
fn substitute_in_place(l: &BitMatrix, x: &mut BitMatrix, table_size: Option<usize>) {
    let r = l.n_rows();
    let b = l.word_bits();
    let mut tables = Vec::new();
    let mut y = Vec::new();
    let mut rows = Vec::new();
    let mut y_active = Vec::new();
    for t in (0..r).step_by(b) {
        let hi = (t + b).min(r);
        let k = hi - t;
        let p = t / b;
        let diag: Vec<u64> = (t..hi)
            .map(|i| l.word(i, p) & low_mask(i - t))
            .collect();
        if diag.iter().any(|&d| d != 0) {
            for q in 0..x.n_word_cols() {
                let col = &mut x.word_col_mut(q)[t..hi];
                for i in 0..k {
                    let mut d = diag[i];
                    let mut acc = col[i];
                    while d != 0 {
                        acc ^= col[d.trailing_zeros() as usize];
                        d &= d - 1;
                    }
                    col[i] = acc;
                }
            }
        }
        if hi == r {
            break;
        }
        y.clear();
        y.extend((hi..r).map(|i| l.word(i, p) & low_mask(k)));
        rows.clear();
        rows.extend((0..y.len()).filter(|&t| y[t] != 0));
        let active = rows.len();
        if active == 0 {
            continue;
        }
        let gather = active * 2 < y.len();
        if gather {
            y_active.clear();
            y_active.extend(rows.iter().map(|&t| y[t]));
        }
        let c = table_size
            .unwrap_or_else(|| default_table_size(k, active))
            .clamp(1, k);
        let splits = Splits::uniform(k, c).expect("valid table size");
        tables.resize(splits.entries(), 0);
        for q in 0..x.n_word_cols() {
            let (top, bottom) = x.word_col_mut(q)[..r].split_at_mut(hi);
            build_column_tables(&top[t..], &splits, &mut tables);
            if gather {
                apply_column_tables_at(&rows, &y_active, &splits, &tables, bottom);
            } else {
                apply_column_tables(&y, &splits, &tables, bottom);
            }
        }
    }
}

/// Rank of `A`; wide matrices are transposed first.
pub fn rank(a: &BitMatrix) -> usize {
    if a.n_rows() < a.n_cols() {
        decompose(&a.transpose(), Variant::Recursive, &DecomposeOptions::default()).rank()
    } else {
        decompose(a, Variant::Recursive, &DecomposeOptions::default()).rank()
    }
}

/// Row-major bit rows used for the small echelon steps of `null_space` and
/// `solve`.
struct DenseRows {
    words: usize,
    data: Vec<u64>,
}

impl DenseRows {
    fn from_matrix(a: &BitMatrix, extra_cols: usize) -> Self {
        let words = (a.n_cols() + extra_cols).div_ceil(64);
        let mut data = vec![0u64; words * a.n_rows()];
        for i in 0..a.n_rows() {
            for j in 0..a.n_cols() {
                if a.get(i, j) {
                    data[i * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        Self { words, data }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.words + j / 64] >> (j % 64) & 1 != 0
    }

    fn flip(&mut self, i: usize, j: usize) {
        self.data[i * self.words + j / 64] ^= 1 << (j % 64);
    }

    fn xor_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        for t in 0..w {
            let v = self.data[src * w + t];
            self.data[dst * w + t] ^= v;
        }
    }

    /// Reduces the first `n_rows` rows (already full rank) to reduced row
    /// echelon form over the first `n_cols` columns; returns the pivot
    /// column of each row.
    fn reduce_full_rank(&mut self, n_rows: usize, n_cols: usize) -> Vec<usize> {
        let w = self.words;
        let mut pivots = Vec::with_capacity(n_rows);
        let mut row = 0;
        for col in 0..n_cols {
            if row == n_rows {
                break;
            }
            let Some(p) = (row..n_rows).find(|&i| self.get(i, col)) else {
                continue;
            };
            if p != row {
                for t in 0..w {
                    self.data.swap(p * w + t, row * w + t);
                }
            }
            for i in 0..n_rows {
                if i != row && self.get(i, col) {
                    self.xor_row(i, row);
                }
            }
            pivots.push(col);
            row += 1;
        }
        debug_assert_eq!(row, n_rows, "rows of U are independent");
        pivots
    }
}

/// Basis of `{x : A·x = 0}` as the columns of an `m x (m − rank)` matrix.
pub fn null_space(a: &BitMatrix) -> BitMatrix {
    let f = decompose(a, Variant::Recursive, &DecomposeOptions::default());
    let m = a.n_cols();
    let r = f.rank();
    let mut rows = DenseRows::from_matrix(f.u(), 0);
    let pivots = rows.reduce_full_rank(r, m);
    let mut is_pivot = vec![false; m];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = BitMatrix::zeros(m, m - r, a.width());
    for (t, free) in (0..m).filter(|&j| !is_pivot[j]).enumerate() {
        basis.set(free, t, true);
        for (i, &p) in pivots.iter().enumerate() {
            if rows.get(i, free) {
                basis.set(p, t, true);
            }
        }
    }
    basis
}

/// Some `x` with `A·x = rhs`, or `None` when the system is inconsistent.
pub fn solve(a: &BitMatrix, rhs: &[bool]) -> Result<Option<Vec<bool>>> {
    let n = a.n_rows();
    let m = a.n_cols();
    if rhs.len() != n {
        return Err(Error::Shape(format!(
            "right-hand side of length {} for {n} equations",
            rhs.len()
        )));
    }
    let f = decompose(a, Variant::Recursive, &DecomposeOptions::default());
    let r = f.rank();
    let pb: Vec<bool> = f.p().as_slice().iter().map(|&i| rhs[i]).collect();
    let l = f.l();
    // L·y = P·rhs: the top r rows determine y, the rest must agree.
    let mut y = vec![false; r];
    for i in 0..n {
        let mut acc = pb[i];
        for (j, &yj) in y.iter().enumerate().take(i.min(r)) {
            if yj && l.get(i, j) {
                acc = !acc;
            }
        }
        if i < r {
            y[i] = acc;
        } else if acc {
            return Ok(None);
        }
    }
    // U·x = y with free variables set to zero.
    let mut rows = DenseRows::from_matrix(f.u(), 1);
    for (i, &yi) in y.iter().enumerate() {
        if yi {
            rows.flip(i, m);
        }
    }
    let pivots = rows.reduce_full_rank(r, m);
    let mut x = vec![false; m];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = rows.get(i, m);
    }
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packed_matrix::WordWidth;

    fn example() -> BitMatrix {
        BitMatrix::from_strs(&["10111", "10001", "11010", "00111"], WordWidth::W64).unwrap()
    }

    #[test]
    fn identity_factors_trivially() {
        let a = BitMatrix::identity(100, WordWidth::W32);
        for f in [decompose_block(&a), decompose_recursive(&a, 32)] {
            assert!(f.p().is_identity());
            assert_eq!(f.l(), &a);
            assert_eq!(f.u(), &a);
            assert_eq!(f.rank(), 100);
        }
    }

    #[test]
    fn zero_matrix() {
        let a = BitMatrix::zeros(30, 70, WordWidth::W16);
        let f = decompose_block(&a);
        assert_eq!(f.rank(), 0);
        assert_eq!((f.l().n_rows(), f.l().n_cols()), (30, 0));
        assert_eq!((f.u().n_rows(), f.u().n_cols()), (0, 70));
    }

    #[test]
    fn example_has_rank_four() {
        let a = example();
        let f = decompose_block(&a);
        assert_eq!(f.rank(), 4);
        assert_eq!(f.recompose(), f.p().apply(&a).unwrap());
        assert_eq!(rank(&a), 4);
    }

    #[test]
    fn two_by_two_substitution() {
        let l = BitMatrix::from_strs(&["10", "11"], WordWidth::W64).unwrap();
        let c = BitMatrix::from_strs(&["1", "1"], WordWidth::W64).unwrap();
        let x = forward_substitute(&l, &c).unwrap();
        assert_eq!(x, BitMatrix::from_strs(&["1", "0"], WordWidth::W64).unwrap());
    }

    #[test]
    fn substitution_rejects_non_unit() {
        let l = BitMatrix::from_strs(&["10", "10"], WordWidth::W64).unwrap();
        let c = BitMatrix::zeros(2, 3, WordWidth::W64);
        assert!(matches!(forward_substitute(&l, &c), Err(Error::NotUnitLowerTriangular(_))));
        let l = BitMatrix::from_strs(&["11", "01"], WordWidth::W64).unwrap();
        assert!(forward_substitute(&l, &c).is_err());
    }

    #[test]
    fn null_space_extremes() {
        let i = BitMatrix::identity(20, WordWidth::W8);
        assert_eq!(null_space(&i).n_cols(), 0);
        let z = BitMatrix::zeros(5, 9, WordWidth::W8);
        assert_eq!(null_space(&z), BitMatrix::identity(9, WordWidth::W8));
    }

    #[test]
    fn solve_small_systems() {
        let a = example();
        let rhs = [true, false, true, true];
        let x = solve(&a, &rhs).unwrap().unwrap();
        for (i, &bi) in rhs.iter().enumerate() {
            let v = (0..5).fold(false, |acc, j| acc ^ (a.get(i, j) & x[j]));
            assert_eq!(v, bi);
        }
        let dup = BitMatrix::from_strs(&["11", "11"], WordWidth::W64).unwrap();
        assert_eq!(solve(&dup, &[true, false]).unwrap(), None);
        assert!(solve(&dup, &[true]).is_err());
    }
}
