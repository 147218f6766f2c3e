//! Dense linear algebra over GF(2) on bit-packed matrices.
//!
//! The main entry points are [`decompose`] (a `P·A = L·U` factorization that
//! never permutes columns), [`rank`], [`null_space`] and [`solve`], built on
//! the table-driven multiply in [`m4rm`] and the Strassen multiply in
//! [`strassen`].

pub mod decomposition;
pub mod error;
pub mod format;
pub mod m4rm;
pub mod packed_matrix;
pub mod pivoting;
pub mod strassen;
pub mod tuning;
pub mod verify;

pub use decomposition::{
    decompose, decompose_block, decompose_recursive, forward_substitute, null_space, rank, solve,
    DecomposeOptions, LuFactors, Variant,
};
pub use error::{Error, Result};
pub use format::Format;
pub use m4rm::{m4rm_mult, M4rmTables, Splits};
pub use packed_matrix::{BitMatrix, RowPermutation, WordWidth};
pub use pivoting::{build_z, IncrementalInverse, PivotRecord};
pub use strassen::{matrix_xor, strassen_mult};
pub use tuning::{default_table_size, optimal_table_size, strassen_threshold, CostModel, RankRegime};
