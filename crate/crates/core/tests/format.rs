mod common;

use common::{rng, Rows, WIDTHS};
use f2lu::format::{load, read_binary, read_matrix, read_text, save, write_binary, write_matrix, write_text};
use f2lu::{BitMatrix, Format, WordWidth};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trips(n in 0usize..120, m in 0usize..260, wi in 0usize..4, density in 0.0f64..=1.0, seed: u64) {
        let w = WIDTHS[wi];
        let a = Rows::random(n, m, density, &mut rng(seed)).to_matrix(w);
        for format in [Format::Text, Format::Binary] {
            let mut buf = Vec::new();
            write_matrix(&a, &mut buf, format).unwrap();
            prop_assert_eq!(&read_matrix(&buf[..], format, w).unwrap(), &a);
        }
    }

    #[test]
    fn binary_size_and_text_lines(n in 0usize..50, m in 1usize..200, wi in 0usize..4, seed: u64) {
        let w = WIDTHS[wi];
        let a = Rows::random(n, m, 0.5, &mut rng(seed)).to_matrix(w);
        let mut bin = Vec::new();
        write_binary(&a, &mut bin).unwrap();
        prop_assert_eq!(bin.len(), 4 + 24 + n * m.div_ceil(w.bits()) * w.bits() / 8);
        let mut text = Vec::new();
        write_text(&a, &mut text).unwrap();
        let text = String::from_utf8(text).unwrap();
        let mut lines = text.lines();
        prop_assert_eq!(lines.next().unwrap(), format!("{n} {m}"));
        prop_assert!(lines.all(|l| l.len() == m));
    }
}

#[test]
fn text_is_width_independent() {
    let a = BitMatrix::random_dense(20, 70, 0.5, 4, WordWidth::W16).unwrap();
    let mut text = Vec::new();
    write_text(&a, &mut text).unwrap();
    for w in WIDTHS {
        assert_eq!(read_text(&text[..], w).unwrap().to_rows(), a.to_rows());
    }
    assert_eq!(read_text(&b"1 3\r\n101\r\n\n"[..], WordWidth::W8).unwrap().to_rows(), vec![vec![true, false, true]]);
}

#[test]
fn files_detect_their_format() {
    let dir = tempfile::tempdir().unwrap();
    let a = BitMatrix::random_dense(33, 71, 0.5, 8, WordWidth::W32).unwrap();
    for (name, format) in [("a.txt", Format::Text), ("a.f2mx", Format::Binary)] {
        let path = dir.path().join(name);
        save(&a, &path, format).unwrap();
        assert_eq!(load(&path, WordWidth::W32).unwrap(), a);
    }
    assert!(load(dir.path().join("missing"), WordWidth::W8).is_err());
}

#[test]
fn example_file() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/example_4x5.txt");
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("4 5\n10111\n"));
    let a = load(path, WordWidth::emulated(3).unwrap()).unwrap();
    assert_eq!(a.word_grid(), vec![vec![5, 3], vec![1, 2], vec![3, 1], vec![4, 3]]);
    assert_eq!(f2lu::rank(&load(path, WordWidth::W64).unwrap()), 4);
}

#[test]
fn binary_header_errors() {
    let mut bytes = Vec::new();
    write_binary(&BitMatrix::zeros(2, 2, WordWidth::W8), &mut bytes).unwrap();
    let mut bad_width = bytes.clone();
    bad_width[20] = 12;
    assert!(read_binary(&bad_width[..]).is_err());
    assert!(read_binary(&bytes[..10]).is_err());
}
