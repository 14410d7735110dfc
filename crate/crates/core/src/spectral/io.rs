//! Field snapshots: `ARKS1` binary and plotting CSV.

use std::io::{Read, Write};

use super::field::Field;
use super::grid::make_grid;
use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: &[u8; 5] = b"ARKS1";

/// Writes magic, `n`, `N` (u64 LE), `L` (f64 LE), then the samples (f64 LE, row-major).
pub fn write_snapshot<W: Write>(field: &Field, mut out: W) -> Result<()> {
    let g = field.grid();
    out.write_all(SNAPSHOT_MAGIC)?;
    out.write_all(&(g.dim() as u64).to_le_bytes())?;
    out.write_all(&(g.points() as u64).to_le_bytes())?;
    out.write_all(&g.length().to_le_bytes())?;
    for v in field.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<Field> {
    let mut magic = [0u8; 5];
    input.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Io(format!("bad snapshot magic {magic:?}")));
    }
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let dim = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let points = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let length = f64::from_le_bytes(word);
    let grid = make_grid(dim, points, length)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        input.read_exact(&mut word)?;
        values.push(f64::from_le_bytes(word));
    }
    Field::new(grid, values)
}

/// CSV with `index,x,value` (1D) or `index,x,y,value` (2D), 17 significant digits.
pub fn write_field_csv<W: Write>(field: &Field, mut out: W) -> Result<()> {
    let g = field.grid();
    if g.dim() == 1 {
        writeln!(out, "index,x,value")?;
    } else {
        writeln!(out, "index,x,y,value")?;
    }
    for (i, v) in field.values().iter().enumerate() {
        let (x, y) = g.coordinates(i);
        if g.dim() == 1 {
            writeln!(out, "{i},{x:.16e},{v:.16e}")?;
        } else {
            writeln!(out, "{i},{x:.16e},{y:.16e},{v:.16e}")?;
        }
    }
    Ok(())
}
