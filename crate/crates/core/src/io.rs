//! `TSM1` dense matrix files: the 4-byte magic `TSM1`, little-endian `u64`
//! rows and cols, then `rows · cols` little-endian `f64` in row-major order.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::dense::Matrix;

pub const MAGIC: &[u8; 4] = b"TSM1";

#[derive(Debug, Error)]
pub enum TsmError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad magic {0:?}, expected TSM1")]
    BadMagic([u8; 4]),
    #[error("matrix dimensions {rows}x{cols} overflow")]
    TooLarge { rows: u64, cols: u64 },
}

pub fn write_matrix<W: Write>(mut w: W, a: &Matrix) -> Result<(), TsmError> {
    w.write_all(MAGIC)?;
    w.write_all(&(a.rows() as u64).to_le_bytes())?;
    w.write_all(&(a.cols() as u64).to_le_bytes())?;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            w.write_all(&a.get(i, j).to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix<R: Read>(mut r: R) -> Result<Matrix, TsmError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(TsmError::BadMagic(magic));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word);
    r.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word);
    let len = rows
        .checked_mul(cols)
        .and_then(|n| usize::try_from(n).ok())
        .filter(|n| n.checked_mul(8).is_some())
        .ok_or(TsmError::TooLarge { rows, cols })?;
    let (rows, cols) = (rows as usize, cols as usize);
    let mut data = Vec::with_capacity(len.min(1 << 24));
    for _ in 0..len {
        r.read_exact(&mut word)?;
        data.push(f64::from_le_bytes(word));
    }
    Ok(Matrix::from_row_major(rows, cols, &data).expect("length matches"))
}

pub fn write_matrix_file(path: impl AsRef<Path>, a: &Matrix) -> Result<(), TsmError> {
    write_matrix(BufWriter::new(File::create(path)?), a)
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<Matrix, TsmError> {
    read_matrix(BufReader::new(File::open(path)?))
}
