mod common;

use common::{rng, Rows, WIDTHS};
use f2lu::{BitMatrix, RowPermutation, WordWidth};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn width() -> impl Strategy<Value = WordWidth> {
    prop::sample::select(WIDTHS.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn words_follow_the_layout_rule(n in 0usize..40, m in 0usize..200, bits in 1u32..=64, seed: u64) {
        let w = WordWidth::emulated(bits).unwrap();
        let b = bits as usize;
        let r = Rows::random(n, m, 0.5, &mut rng(seed));
        let a = r.to_matrix(w);
        prop_assert_eq!(a.n_word_cols(), m.div_ceil(b));
        for i in 0..n {
            for q in 0..a.n_word_cols() {
                let want = (0..b).filter(|&k| q * b + k < m && r.get(i, q * b + k)).fold(0u64, |acc, k| acc | 1 << k);
                prop_assert_eq!(a.word(i, q), want);
            }
        }
        let words = a.storage_words();
        prop_assert_eq!(BitMatrix::from_storage_words(n, m, w, &words).unwrap(), a);
    }

    #[test]
    fn transpose_matches_oracle(n in 0usize..150, m in 0usize..150, w in width(), seed: u64) {
        let r = Rows::random(n, m, 0.5, &mut rng(seed));
        let t = r.to_matrix(w).transpose();
        prop_assert_eq!((t.n_rows(), t.n_cols()), (m, n));
        prop_assert!((0..m).all(|i| (0..n).all(|j| t.get(i, j) == r.get(j, i))));
        prop_assert!(t.padding_is_zero());
        prop_assert_eq!(t.transpose(), r.to_matrix(w));
    }

    #[test]
    fn blocks_and_rows(n in 1usize..100, m in 1usize..200, w in width(), seed: u64,
                       cuts in (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0)) {
        let r = Rows::random(n, m, 0.5, &mut rng(seed));
        let a = r.to_matrix(w);
        let (r0, r1) = ((cuts.0 * n as f64) as usize, (cuts.1 * n as f64) as usize);
        let (c0, c1) = ((cuts.2 * m as f64) as usize, (cuts.3 * m as f64) as usize);
        let (r0, r1, c0, c1) = (r0.min(r1), r0.max(r1), c0.min(c1), c0.max(c1));
        let s = a.submatrix(r0..r1, c0..c1).unwrap();
        prop_assert!((0..r1 - r0).all(|i| (0..c1 - c0).all(|j| s.get(i, j) == r.get(r0 + i, c0 + j))));
        prop_assert!(s.padding_is_zero());
        let top = a.rows_range(0..r0).unwrap();
        let bottom = a.rows_range(r0..n).unwrap();
        prop_assert_eq!(BitMatrix::vstack(&top, &bottom).unwrap(), a);
    }

    #[test]
    fn row_operations(n in 2usize..60, m in 1usize..150, w in width(), seed: u64, i in 0usize..60, k in 0usize..60) {
        let (i, k) = (i % n, k % n);
        let r = Rows::random(n, m, 0.5, &mut rng(seed));
        let mut a = r.to_matrix(w);
        a.row_swap(i, k).unwrap();
        prop_assert!((0..m).all(|j| a.get(i, j) == r.get(k, j) && a.get(k, j) == r.get(i, j)));
        a.row_swap(i, k).unwrap();
        a.row_xor_range(i, k, 0, a.n_word_cols()).unwrap();
        for j in 0..m {
            let want = if i == k { false } else { r.get(i, j) ^ r.get(k, j) };
            prop_assert_eq!(a.get(i, j), want);
        }
        prop_assert!(a.padding_is_zero());
    }

    #[test]
    fn permutations(n in 0usize..80, m in 1usize..80, seed: u64) {
        let mut g = rng(seed);
        let r = Rows::random(n, m, 0.5, &mut g);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut g);
        let p = RowPermutation::new(perm.clone()).unwrap();
        let a = r.to_matrix(WordWidth::W8);
        let pa = p.apply(&a).unwrap();
        prop_assert!(r.permuted(&perm).matches(&pa));
        prop_assert_eq!(p.inverse().apply(&pa).unwrap(), a);
    }

    #[test]
    fn width_change_keeps_entries(n in 0usize..50, m in 0usize..200, seed: u64) {
        let a = Rows::random(n, m, 0.5, &mut rng(seed)).to_matrix(WordWidth::W8);
        for w in WIDTHS {
            let c = a.with_width(w);
            prop_assert_eq!(c.to_rows(), a.to_rows());
            prop_assert_eq!(c.with_width(WordWidth::W8), a.clone());
        }
    }
}

#[test]
fn generators_are_reproducible() {
    let w = WordWidth::W32;
    let a = BitMatrix::random_dense(100, 77, 0.3, 5, w).unwrap();
    assert_eq!(a, BitMatrix::random_dense(100, 77, 0.3, 5, w).unwrap());
    assert_ne!(a, BitMatrix::random_dense(100, 77, 0.3, 6, w).unwrap());
    assert_eq!(a.to_rows(), BitMatrix::random_dense(100, 77, 0.3, 5, WordWidth::W8).unwrap().to_rows());
    assert!(BitMatrix::random_dense(50, 50, 0.0, 1, w).unwrap().is_zero());
    assert_eq!(BitMatrix::random_dense(50, 50, 1.0, 1, w).unwrap().count_ones(), 2500);
    assert!(BitMatrix::random_dense(5, 5, 1.5, 1, w).is_err());

    for i in [0, 1, 2, 40, 64] {
        let s = BitMatrix::random_sparse_rows(64, 64, i, 9, w).unwrap();
        let rows = Rows::of(&s);
        assert!((0..64).all(|r| rows.row(r).iter().map(|x| x.count_ones()).sum::<u32>() == i as u32));
        assert_eq!(s, BitMatrix::random_sparse_rows(64, 64, i, 9, w).unwrap());
    }
    assert!(BitMatrix::random_sparse_rows(4, 3, 4, 1, w).is_err());
}

#[test]
fn invalid_construction() {
    assert!(WordWidth::new(12).is_err());
    assert!(WordWidth::emulated(0).is_err());
    assert!(WordWidth::emulated(65).is_err());
    assert!(BitMatrix::from_strs(&["101", "10"], WordWidth::W8).is_err());
    assert!(BitMatrix::from_strs(&["1a1"], WordWidth::W8).is_err());
    assert!(RowPermutation::new(vec![0, 0]).is_err());
    assert!(RowPermutation::new(vec![1, 2]).is_err());
    let a = BitMatrix::zeros(3, 3, WordWidth::W8);
    assert!(a.submatrix(0..4, 0..1).is_err());
    assert!(RowPermutation::identity(2).apply(&a).is_err());
    assert!(BitMatrix::from_storage_words(1, 3, WordWidth::W8, &[0b1000]).is_err());
}

#[test]
fn display_shows_rows() {
    let a = BitMatrix::from_strs(&["101", "010"], WordWidth::W8).unwrap();
    assert_eq!(a.to_string().lines().collect::<Vec<_>>(), vec!["101", "010"]);
}
