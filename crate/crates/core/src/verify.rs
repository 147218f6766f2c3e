//! Reference implementations and factorization checks.
//!
//! Everything here goes through [`BitMatrix::get`] into plain row-major
//! bit rows, so none of the packed kernels are exercised by the oracles that
//! check them.

use crate::decomposition::LuFactors;
use crate::packed_matrix::{BitMatrix, WordWidth};

/// Row-major copy: row `i` is `ceil(m / 64)` words, column `j` at bit `j % 64`
/// of word `j / 64`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowMajor {
    pub n_rows: usize,
    pub n_cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl RowMajor {
    pub fn from_matrix(a: &BitMatrix) -> Self {
        let mut out = Self::zeros(a.n_rows(), a.n_cols());
        for i in 0..a.n_rows() {
            for j in 0..a.n_cols() {
                if a.get(i, j) {
                    out.data[i * out.words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        out
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        let words = n_cols.div_ceil(64);
        Self {
            n_rows,
            n_cols,
            words,
            data: vec![0; words * n_rows],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.words + j / 64] >> (j % 64) & 1 != 0
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    pub fn to_matrix(&self, width: WordWidth) -> BitMatrix {
        let mut a = BitMatrix::zeros(self.n_rows, self.n_cols, width);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                if self.get(i, j) {
                    a.set(i, j, true);
                }
            }
        }
        a
    }
}

/// `A·B` by the definition: row `i` of the product is the XOR of the rows
/// `t` of `B` with `A[i][t] = 1`.
pub fn naive_mult(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    assert_eq!(a.n_cols(), b.n_rows(), "inner dimensions differ");
    let ra = RowMajor::from_matrix(a);
    let rb = RowMajor::from_matrix(b);
    let mut out = RowMajor::zeros(a.n_rows(), b.n_cols());
    let w = out.words;
    for i in 0..a.n_rows() {
        for t in 0..a.n_cols() {
            if ra.get(i, t) {
                let src = rb.row(t);
                for (d, &s) in out.data[i * w..(i + 1) * w].iter_mut().zip(src) {
                    *d ^= s;
                }
            }
        }
    }
    out.to_matrix(a.width())
}

/// Rank by textbook Gaussian elimination.
pub fn naive_rank(a: &BitMatrix) -> usize {
    let mut m = RowMajor::from_matrix(a);
    let w = m.words;
    let mut rank = 0;
    for col in 0..m.n_cols {
        let Some(p) = (rank..m.n_rows).find(|&i| m.get(i, col)) else {
            continue;
        };
        for t in 0..w {
            m.data.swap(p * w + t, rank * w + t);
        }
        for i in rank + 1..m.n_rows {
            if m.get(i, col) {
                for t in 0..w {
                    let v = m.data[rank * w + t];
                    m.data[i * w + t] ^= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Every violated factorization property, as one message per problem.
/// An empty result means `P·A = L·U` holds and `L`, `U`, `P` and the block
/// ranks have the required structure.
pub fn check_factorization(a: &BitMatrix, f: &LuFactors) -> Vec<String> {
    let mut issues = Vec::new();
    let (n, m) = (a.n_rows(), a.n_cols());
    let r = f.rank();
    let (l, u) = (f.l(), f.u());
    let b = a.word_bits();

    if (l.n_rows(), l.n_cols()) != (n, r) {
        issues.push(format!("L is {}x{}, expected {n}x{r}", l.n_rows(), l.n_cols()));
    }
    if (u.n_rows(), u.n_cols()) != (r, m) {
        issues.push(format!("U is {}x{}, expected {r}x{m}", u.n_rows(), u.n_cols()));
    }
    let perm = f.p().as_slice();
    let mut seen = vec![false; n];
    let bijective = perm.len() == n
        && perm.iter().all(|&p| p < n && !std::mem::replace(&mut seen[p], true));
    if !bijective {
        issues.push("P is not a permutation of the rows".into());
    }
    if !issues.is_empty() {
        return issues;
    }

    let lu = naive_mult(l, u);
    let mut pa = BitMatrix::zeros(n, m, a.width());
    for (i, &p) in perm.iter().enumerate() {
        for j in 0..m {
            if a.get(p, j) {
                pa.set(i, j, true);
            }
        }
    }
    if lu != pa {
        let bad = (0..n)
            .find(|&i| (0..m).any(|j| lu.get(i, j) != pa.get(i, j)))
            .unwrap_or(0);
        issues.push(format!("recomposition mismatch: row {bad} of L·U differs from P·A"));
    }

    for i in 0..r {
        if !l.get(i, i) {
            issues.push(format!("L[{i}][{i}] is zero"));
        }
        if let Some(j) = (i + 1..r).find(|&j| l.get(i, j)) {
            issues.push(format!("L[{i}][{j}] above the diagonal is set"));
        }
    }

    let ranks = f.block_ranks();
    if ranks.len() != a.n_word_cols() {
        issues.push(format!(
            "{} block ranks for {} word-columns",
            ranks.len(),
            a.n_word_cols()
        ));
    } else {
        if ranks.iter().sum::<usize>() != r {
            issues.push(format!("block ranks sum to {}, rank is {r}", ranks.iter().sum::<usize>()));
        }
        let mut row = 0;
        for (j, &rj) in ranks.iter().enumerate() {
            if row + rj > r {
                break;
            }
            let rows = row..row + rj;
            if let Some(i) = rows.clone().find(|&i| (0..(j * b).min(m)).any(|c| u.get(i, c))) {
                issues.push(format!("U row {i} of block {j} is nonzero left of word-column {j}"));
            }
            let cols = j * b..((j + 1) * b).min(m);
            let block = u.submatrix(rows, cols).expect("in range");
            if naive_rank(&block) != rj {
                issues.push(format!("leading block of U block row {j} is not of rank {rj}"));
            }
            row += rj;
        }
    }

    let oracle = naive_rank(a);
    if oracle != r {
        issues.push(format!("rank {r} differs from elimination rank {oracle}"));
    }
    issues
}
