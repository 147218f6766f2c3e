use f2lu::tuning::{
    crossover_rows, default_table_size, m4rm_cost, predicted_decomposition_cost, word_size_ratio, TABLE_CACHE_BYTES,
};
use f2lu::{optimal_table_size, strassen_threshold, CostModel, RankRegime};
use proptest::prelude::*;

fn formula(b: usize, c: usize, n: usize) -> f64 {
    b as f64 / c as f64 * (2f64.powi(c as i32) - 1.0 + n as f64)
}

proptest! {
    #[test]
    fn cost_formula(b in 1usize..=64, c in 1usize..=16, n in 0usize..100_000) {
        prop_assert!((m4rm_cost(b, c, n) - formula(b, c, n)).abs() <= 1e-9 * formula(b, c, n).max(1.0));
    }

    #[test]
    fn optimal_size_is_an_argmin(b in 2usize..=64, n in 1usize..1_000_000) {
        let c = optimal_table_size(b, n);
        prop_assert!((2..=b.min(16)).contains(&c));
        for other in 2..=b.min(16) {
            prop_assert!(m4rm_cost(b, c, n) <= m4rm_cost(b, other, n));
            if other < c {
                prop_assert!(m4rm_cost(b, other, n) > m4rm_cost(b, c, n));
            }
        }
    }

    #[test]
    fn cached_size_fits(b in 2usize..=64, n in 1usize..10_000_000) {
        let c = default_table_size(b, n);
        prop_assert!(c <= optimal_table_size(b, n));
        prop_assert!(c == 2 || b.div_ceil(c) * (8 << c) <= TABLE_CACHE_BYTES);
    }

    #[test]
    fn crossover_is_where_costs_meet(c in 1usize..=15, b in 16usize..=64) {
        let n = crossover_rows(c) as usize;
        prop_assert!((m4rm_cost(b, c, n) - m4rm_cost(b, c + 1, n)).abs() < 1e-6);
        prop_assert!(m4rm_cost(b, c, n + 1) > m4rm_cost(b, c + 1, n + 1));
    }
}

#[test]
fn thresholds() {
    assert_eq!(strassen_threshold(5), 406);
    assert_eq!(strassen_threshold(2), 106);
    assert_eq!(strassen_threshold(8), 1882);
    assert_eq!(CostModel::with_default_table(64).unwrap().strassen_threshold(), 406);
    assert_eq!(optimal_table_size(64, 64), 5);
    assert_eq!(optimal_table_size(32, 32), 4);
}

#[test]
fn model_costs() {
    let m = CostModel::new(64, 5, 2.0, 1.0).unwrap();
    assert_eq!(m.block_multiply_cost(64), 2.0 * m4rm_cost(64, 5, 64));
    let n = 1024.0f64;
    assert!((m.square_multiply_cost(1024) - 2.0 / 320.0 * (n * n * 31.0 + n * n * n)).abs() < 1e-3);
    let level = 11.0 * n * n / 128.0 * 2.0 + 7.0 * m.square_multiply_cost(512);
    assert!((m.strassen_level_cost(1024) - level).abs() < 1e-3);
    assert!(CostModel::new(64, 1, 1.0, 1.0).is_err());
    assert!(CostModel::new(8, 9, 1.0, 1.0).is_err());
    assert!(CostModel::new(64, 5, 0.0, 1.0).is_err());
}

#[test]
fn decomposition_estimates() {
    let full = predicted_decomposition_cost(4096, 64, 8, RankRegime::Full);
    let one = predicted_decomposition_cost(4096, 64, 8, RankRegime::One);
    assert_eq!(full, 4096f64.powi(3) / (3.0 * 512.0));
    assert_eq!(one / full, 1.5);
    assert_eq!(word_size_ratio(1.0, 1.0), 2.0);
    assert_eq!(word_size_ratio(1.0, 1.3), 2.0 / 1.3);
}
