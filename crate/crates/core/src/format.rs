//! Text and binary matrix files.
//!
//! Text: a first line `n m`, then `n` lines of exactly `m` characters `0` or
//! `1`, column 0 leftmost.
//!
//! Binary: the magic bytes `F2MX`, then `n`, `m` and `b` as little-endian
//! `u64`, then the `μ·n` words in storage order (word-column 0 top to
//! bottom, then word-column 1, ...), each written as `b / 8` little-endian
//! bytes. Only the widths 8, 16, 32 and 64 can be stored.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::packed_matrix::{BitMatrix, WordWidth};

pub const MAGIC: &[u8; 4] = b"F2MX";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Binary,
}

pub fn write_text<W: Write>(a: &BitMatrix, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", a.n_rows(), a.n_cols())?;
    let mut line = Vec::with_capacity(a.n_cols() + 1);
    for i in 0..a.n_rows() {
        line.clear();
        line.extend((0..a.n_cols()).map(|j| if a.get(i, j) { b'1' } else { b'0' }));
        line.push(b'\n');
        w.write_all(&line)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the text format, packing with `width`.
pub fn read_text<R: Read>(r: R, width: WordWidth) -> Result<BitMatrix> {
    let mut lines = BufReader::new(r).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty input".into()))??;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Format(format!("bad dimension {s:?} in header {header:?}")))
    };
    let (n, m) = match dims.as_slice() {
        [n, m] => (parse(n)?, parse(m)?),
        _ => return Err(Error::Format(format!("header {header:?} is not \"n m\""))),
    };
    let mut a = BitMatrix::zeros(n, m, width);
    for i in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::Format(format!("expected {n} rows, found {i}")))??;
        let line = line.trim_end_matches('\r');
        if line.len() != m {
            return Err(Error::Format(format!(
                "row {i} has {} characters, expected {m}",
                line.len()
            )));
        }
        for (j, ch) in line.bytes().enumerate() {
            match ch {
                b'0' => {}
                b'1' => a.set(i, j, true),
                other => {
                    return Err(Error::Format(format!(
                        "row {i} column {j}: unexpected character {:?}",
                        other as char
                    )))
                }
            }
        }
    }
    for rest in lines {
        if !rest?.trim().is_empty() {
            return Err(Error::Format(format!("trailing data after {n} rows")));
        }
    }
    Ok(a)
}

pub fn write_binary<W: Write>(a: &BitMatrix, mut w: W) -> Result<()> {
    let width = a.width();
    if !width.is_native() {
        return Err(Error::InvalidWordWidth(width.bits() as u32));
    }
    let bytes = width.bits() / 8;
    w.write_all(MAGIC)?;
    for v in [a.n_rows(), a.n_cols(), width.bits()] {
        w.write_all(&(v as u64).to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(a.n_rows() * bytes);
    for q in 0..a.n_word_cols() {
        buf.clear();
        for &word in a.word_col(q) {
            buf.extend_from_slice(&word.to_le_bytes()[..bytes]);
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<BitMatrix> {
    let mut magic = [0u8; 4];
    read_exact(&mut r, &mut magic, "magic")?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let mut header = [0u64; 3];
    for (slot, name) in header.iter_mut().zip(["n", "m", "b"]) {
        let mut buf = [0u8; 8];
        read_exact(&mut r, &mut buf, name)?;
        *slot = u64::from_le_bytes(buf);
    }
    let to_usize = |v: u64| {
        usize::try_from(v).map_err(|_| Error::Format(format!("dimension {v} too large")))
    };
    let (n, m) = (to_usize(header[0])?, to_usize(header[1])?);
    let width = u32::try_from(header[2])
        .ok()
        .and_then(|b| WordWidth::new(b).ok())
        .ok_or_else(|| Error::Format(format!("unsupported word width {}", header[2])))?;
    let bytes = width.bits() / 8;
    let n_words = n
        .checked_mul(m.div_ceil(width.bits()))
        .ok_or_else(|| Error::Format("payload size overflows".into()))?;
    let mut payload = Vec::new();
    r.by_ref()
        .take((n_words * bytes) as u64)
        .read_to_end(&mut payload)?;
    if payload.len() != n_words * bytes {
        return Err(Error::Format(format!(
            "truncated payload: {} of {} bytes",
            payload.len(),
            n_words * bytes
        )));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    let words: Vec<u64> = payload
        .chunks_exact(bytes)
        .map(|chunk| {
            let mut le = [0u8; 8];
            le[..bytes].copy_from_slice(chunk);
            u64::from_le_bytes(le)
        })
        .collect();
    BitMatrix::from_storage_words(n, m, width, &words)
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format(format!("truncated header ({what})")),
        _ => Error::Io(e),
    })
}

/// Writes `a` to `w` in `format`.
pub fn write_matrix<W: Write>(a: &BitMatrix, w: W, format: Format) -> Result<()> {
    match format {
        Format::Text => write_text(a, w),
        Format::Binary => write_binary(a, w),
    }
}

/// Reads a matrix from `r`. `width` packs text input; binary input carries
/// its own width.
pub fn read_matrix<R: Read>(r: R, format: Format, width: WordWidth) -> Result<BitMatrix> {
    match format {
        Format::Text => read_text(r, width),
        Format::Binary => read_binary(r),
    }
}

pub fn save(a: &BitMatrix, path: impl AsRef<Path>, format: Format) -> Result<()> {
    write_matrix(a, BufWriter::new(File::create(path)?), format)
}

/// Reads a file, detecting the binary format by its magic bytes.
pub fn load(path: impl AsRef<Path>, width: WordWidth) -> Result<BitMatrix> {
    let mut file = BufReader::new(File::open(path)?);
    let is_binary = file.fill_buf()?.starts_with(MAGIC);
    let format = if is_binary { Format::Binary } else { Format::Text };
    read_matrix(file, format, width)
}
