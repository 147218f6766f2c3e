//! Reference implementations shared by the integration tests. They work on
//! plain row-major bitsets read entry by entry through `get`, so they share
//! no code with the packed layout or the table-driven kernels.
#![allow(dead_code)]

use f2lu::{BitMatrix, WordWidth};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const WIDTHS: [WordWidth; 4] = [WordWidth::W8, WordWidth::W16, WordWidth::W32, WordWidth::W64];

pub fn any_width(rng: &mut ChaCha8Rng) -> WordWidth {
    WIDTHS[rng.random_range(0..WIDTHS.len())]
}

/// Row-major dense matrix, one `Vec<u64>` bitset per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rows {
    pub n: usize,
    pub m: usize,
    rows: Vec<Vec<u64>>,
}

impl Rows {
    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            rows: vec![vec![0; m.div_ceil(64)]; n],
        }
    }

    pub fn of(a: &BitMatrix) -> Self {
        let mut r = Self::zeros(a.n_rows(), a.n_cols());
        for i in 0..r.n {
            for j in 0..r.m {
                if a.get(i, j) {
                    r.set(i, j);
                }
            }
        }
        r
    }

    pub fn random(n: usize, m: usize, density: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut r = Self::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                if rng.random::<f64>() < density {
                    r.set(i, j);
                }
            }
        }
        r
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i][j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.rows[i][j / 64] |= 1 << (j % 64);
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i]
    }

    pub fn to_matrix(&self, width: WordWidth) -> BitMatrix {
        let mut a = BitMatrix::zeros(self.n, self.m, width);
        for i in 0..self.n {
            for j in 0..self.m {
                if self.get(i, j) {
                    a.set(i, j, true);
                }
            }
        }
        a
    }

    /// Schoolbook product: row `i` of the result is the XOR of the rows
    /// `j` of `other` with `self[i][j] = 1`.
    pub fn mult(&self, other: &Rows) -> Rows {
        assert_eq!(self.m, other.n);
        let mut out = Rows::zeros(self.n, other.m);
        for i in 0..self.n {
            for j in 0..self.m {
                if self.get(i, j) {
                    for (d, s) in out.rows[i].iter_mut().zip(&other.rows[j]) {
                        *d ^= s;
                    }
                }
            }
        }
        out
    }

    /// Gaussian elimination with row pivoting.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for j in 0..self.m {
            let Some(p) = (rank..self.n).find(|&i| rows[i][j / 64] >> (j % 64) & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && row[j / 64] >> (j % 64) & 1 == 1 {
                    for (d, s) in row.iter_mut().zip(&pivot) {
                        *d ^= s;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Rows `perm[0], perm[1], ...` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Rows {
        Rows {
            n: self.n,
            m: self.m,
            rows: perm.iter().map(|&p| self.rows[p].clone()).collect(),
        }
    }

    pub fn matches(&self, a: &BitMatrix) -> bool {
        a.n_rows() == self.n
            && a.n_cols() == self.m
            && (0..self.n).all(|i| (0..self.m).all(|j| a.get(i, j) == self.get(i, j)))
    }
}

/// Structural and algebraic checks of `P·A = L·U` against the oracle.
/// Returns the first violation found.
pub fn factorization_violation(a: &BitMatrix, f: &f2lu::LuFactors) -> Option<String> {
    let (n, m, b) = (a.n_rows(), a.n_cols(), a.word_bits());
    let r = f.rank();
    let (l, u) = (Rows::of(f.l()), Rows::of(f.u()));
    if (l.n, l.m, u.n, u.m) != (n, r, r, m) {
        return Some(format!("shapes L {}x{}, U {}x{} for rank {r}", l.n, l.m, u.n, u.m));
    }
    let perm = f.p().as_slice();
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Some("P is not a permutation".into());
    }
    if Rows::of(a).permuted(perm) != l.mult(&u) {
        return Some("P·A differs from L·U".into());
    }
    for i in 0..r {
        if !l.get(i, i) || (i + 1..r).any(|j| l.get(i, j)) {
            return Some(format!("row {i} of L is not unit lower triangular"));
        }
    }
    let ranks = f.block_ranks();
    if ranks.len() != m.div_ceil(b) || ranks.iter().sum::<usize>() != r {
        return Some(format!("block ranks {ranks:?} do not add up to {r}"));
    }
    let mut row = 0;
    for (j, &rj) in ranks.iter().enumerate() {
        let cols = j * b..((j + 1) * b).min(m);
        let mut lead = Rows::zeros(rj, cols.len());
        for t in 0..rj {
            if (0..cols.start).any(|c| u.get(row + t, c)) {
                return Some(format!("U row {} starts left of block {j}", row + t));
            }
            for (k, c) in cols.clone().enumerate() {
                if u.get(row + t, c) {
                    lead.set(t, k);
                }
            }
        }
        if lead.rank() != rj {
            return Some(format!("leading block {j} of U is singular"));
        }
        row += rj;
    }
    let oracle = Rows::of(a).rank();
    (oracle != r).then(|| format!("rank {r}, elimination gives {oracle}"))
}

/// `n x m` matrix of rank at most `k`: a product of random `n x k` and
/// `k x m` factors.
pub fn low_rank(n: usize, m: usize, k: usize, rng: &mut ChaCha8Rng) -> Rows {
    Rows::random(n, k, 0.5, rng).mult(&Rows::random(k, m, 0.5, rng))
}

/// Kendall's tau-a between `xs` and `ys`.
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let v = (xs[i] - xs[j]) * (ys[i] - ys[j]);
            s += (v > 0.0) as i64 - (v < 0.0) as i64;
        }
    }
    s as f64 / (n * (n - 1) / 2) as f64
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}
