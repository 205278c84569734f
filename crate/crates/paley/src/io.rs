//! Flat binary serialization for fields.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! bytes 0..4   magic "LPF1"
//! bytes 4..8   u32 grid dimension n
//! bytes 8..12  u32 points per axis N
//! then         N^n pairs of f64 (re, im), row-major over axes
//! ```

use crate::error::{Error, Result};
use crate::grid::{Field, PeriodicGrid};
use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"LPF1";

/// Writes a field in the flat binary layout.
pub fn write_field<W: Write>(field: &Field, mut writer: W) -> Result<()> {
    writer.write_all(MAGIC)?;
    writer.write_all(&(field.grid().dim() as u32).to_le_bytes())?;
    writer.write_all(&(field.grid().size() as u32).to_le_bytes())?;
    for z in field.samples() {
        writer.write_all(&z.re.to_le_bytes())?;
        writer.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a field written by [`write_field`], validating the header and the
/// sample count.
pub fn read_field<R: Read>(mut reader: R) -> Result<Field> {
    let mut magic = [0u8; 4];
    reader.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            magic, MAGIC
        )));
    }
    let mut word = [0u8; 4];
    reader.read_exact(&mut word)?;
    let dim = u32::from_le_bytes(word) as usize;
    reader.read_exact(&mut word)?;
    let size = u32::from_le_bytes(word) as usize;
    let grid = PeriodicGrid::new(dim, size)?;
    let mut samples = Vec::with_capacity(grid.num_points());
    let mut pair = [0u8; 16];
    for _ in 0..grid.num_points() {
        reader.read_exact(&mut pair)?;
        let re = f64::from_le_bytes(pair[0..8].try_into().expect("8 bytes"));
        let im = f64::from_le_bytes(pair[8..16].try_into().expect("8 bytes"));
        samples.push(Complex64::new(re, im));
    }
    Field::new(grid, samples)
}

/// Writes a field to a file path.
pub fn save_field(field: &Field, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_field(field, std::io::BufWriter::new(file))
}

/// Reads a field from a file path.
pub fn load_field(path: &Path) -> Result<Field> {
    let file = std::fs::File::open(path)?;
    read_field(std::io::BufReader::new(file))
}
