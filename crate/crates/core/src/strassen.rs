//! Strassen multiplication over GF(2), bottoming out in the table-driven
//! multiply.
//!
//! Each level cuts the rows of `A` in half and the inner and column
//! dimensions at a word-column boundary near the middle. Quadrants that run
//! past the matrix are zero-filled, which makes odd sizes exact without any
//! peeling. Over GF(2) subtraction is XOR, so the classical schedule needs
//! 18 block additions.

use crate::error::{Error, Result};
use crate::m4rm::{check_product, m4rm_mult};
use crate::packed_matrix::BitMatrix;
use crate::tuning::{optimal_table_size, strassen_threshold};

/// Entrywise `A ⊕ B`.
pub fn matrix_xor(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    let mut out = a.clone();
    out.xor_assign(b)?;
    Ok(out)
}

/// Default switch point: [`strassen_threshold`] of the table size the cost
/// model picks for one word of rows.
pub fn default_threshold(word_bits: usize) -> usize {
    strassen_threshold(optimal_table_size(word_bits, word_bits))
}

/// `A·B`, recursing while every dimension is at least `threshold` and the
/// inner and column dimensions span more than one word. Smaller products go
/// to [`m4rm_mult`] with table size `c` (`None` for the cost-model default).
pub fn strassen_mult(a: &BitMatrix, b: &BitMatrix, threshold: usize, c: Option<usize>) -> Result<BitMatrix> {
    check_product(a, b)?;
    if threshold == 0 {
        return Err(Error::InvalidParameter("Strassen threshold must be positive".into()));
    }
    mult(a, b, threshold, c)
}

fn mult(a: &BitMatrix, b: &BitMatrix, threshold: usize, c: Option<usize>) -> Result<BitMatrix> {
    let (n, k, m) = (a.n_rows(), a.n_cols(), b.n_cols());
    let wb = a.word_bits();
    if n.min(k).min(m) < threshold || k <= wb || m <= wb || n < 2 {
        return m4rm_mult(a, b, c);
    }
    let nh = n.div_ceil(2);
    let kh = a.n_word_cols().div_ceil(2);
    let mh = b.n_word_cols().div_ceil(2);
    let kr = kh * wb;

    let a11 = a.block_zero_extended(0, nh, 0, kh);
    let a12 = a.block_zero_extended(0, nh, kh, kh);
    let a21 = a.block_zero_extended(nh, nh, 0, kh);
    let a22 = a.block_zero_extended(nh, nh, kh, kh);
    let b11 = b.block_zero_extended(0, kr, 0, mh);
    let b12 = b.block_zero_extended(0, kr, mh, mh);
    let b21 = b.block_zero_extended(kr, kr, 0, mh);
    let b22 = b.block_zero_extended(kr, kr, mh, mh);

    let rec = |x: &BitMatrix, y: &BitMatrix| mult(x, y, threshold, c);
    let m1 = rec(&matrix_xor(&a11, &a22)?, &matrix_xor(&b11, &b22)?)?;
    let m2 = rec(&matrix_xor(&a21, &a22)?, &b11)?;
    let m3 = rec(&a11, &matrix_xor(&b12, &b22)?)?;
    let m4 = rec(&a22, &matrix_xor(&b21, &b11)?)?;
    let m5 = rec(&matrix_xor(&a11, &a12)?, &b22)?;
    let m6 = rec(&matrix_xor(&a21, &a11)?, &matrix_xor(&b11, &b12)?)?;
    let m7 = rec(&matrix_xor(&a12, &a22)?, &matrix_xor(&b21, &b22)?)?;

    // C11 = M1 + M4 + M5 + M7, C12 = M3 + M5, C21 = M2 + M4,
    // C22 = M1 + M2 + M3 + M6.
    let mut c11 = m1.clone();
    c11.xor_assign(&m4)?;
    c11.xor_assign(&m5)?;
    c11.xor_assign(&m7)?;
    let mut c12 = m3.clone();
    c12.xor_assign(&m5)?;
    let mut c21 = m2.clone();
    c21.xor_assign(&m4)?;
    let mut c22 = m1;
    c22.xor_assign(&m2)?;
    c22.xor_assign(&m3)?;
    c22.xor_assign(&m6)?;

    let mut out = BitMatrix::zeros(n, m, a.width());
    out.paste_block(0, 0, &c11);
    out.paste_block(0, mh, &c12);
    out.paste_block(nh, 0, &c21);
    out.paste_block(nh, mh, &c22);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packed_matrix::WordWidth;

    #[test]
    fn xor_identities() {
        let a = BitMatrix::random_dense(33, 90, 0.5, 1, WordWidth::W16).unwrap();
        let z = BitMatrix::zeros(33, 90, WordWidth::W16);
        assert!(matrix_xor(&a, &a).unwrap().is_zero());
        assert_eq!(matrix_xor(&a, &z).unwrap(), a);
        assert!(matrix_xor(&a, &BitMatrix::zeros(33, 91, WordWidth::W16)).is_err());
    }

    #[test]
    fn small_threshold_matches_m4rm() {
        let a = BitMatrix::random_dense(150, 200, 0.5, 2, WordWidth::W8).unwrap();
        let b = BitMatrix::random_dense(200, 170, 0.5, 3, WordWidth::W8).unwrap();
        let s = strassen_mult(&a, &b, 2, None).unwrap();
        assert_eq!(s, m4rm_mult(&a, &b, None).unwrap());
        assert!(s.padding_is_zero());
    }

    #[test]
    fn default_switch_point() {
        assert_eq!(default_threshold(64), 406);
    }
}
