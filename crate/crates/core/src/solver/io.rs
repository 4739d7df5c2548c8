//! Flat binary layout: `nx`, `ny` as little-endian u64, then `h`, `x0`, `y0`
//! and the row-major values as little-endian f64.

use std::io::{Read, Write};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GridValues {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: [f64; 2],
    pub values: Vec<f64>,
}

pub fn write_binary(w: &mut impl Write, g: &GridValues) -> Result<()> {
    if g.values.len() != g.nx * g.ny {
        return Err(Error::DimensionMismatch {
            expected: g.nx * g.ny,
            got: g.values.len(),
        });
    }
    w.write_all(&(g.nx as u64).to_le_bytes())?;
    w.write_all(&(g.ny as u64).to_le_bytes())?;
    for v in [g.h, g.origin[0], g.origin[1]].iter().chain(&g.values) {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary(r: &mut impl Read) -> Result<GridValues> {
    let mut b8 = [0u8; 8];
    let mut next_u64 = |r: &mut dyn Read| -> Result<u64> {
        r.read_exact(&mut b8)?;
        Ok(u64::from_le_bytes(b8))
    };
    let nx = next_u64(r)? as usize;
    let ny = next_u64(r)? as usize;
    let count = nx
        .checked_mul(ny)
        .filter(|c| *c <= 100_000_000)
        .ok_or_else(|| Error::Config(format!("implausible grid header {nx} x {ny}")))?;
    let mut head = [0.0; 3];
    for v in head.iter_mut() {
        *v = f64::from_bits(next_u64(r)?);
    }
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(f64::from_bits(next_u64(r)?));
    }
    Ok(GridValues {
        nx,
        ny,
        h: head[0],
        origin: [head[1], head[2]],
        values,
    })
}

/// `x,y,u` rows; exterior nodes (NaN) are skipped.
pub fn write_csv(w: impl Write, g: &GridValues) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "y", "u"])?;
    for (k, v) in g.values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        let x = g.origin[0] + (k % g.nx) as f64 * g.h;
        let y = g.origin[1] + (k / g.nx) as f64 * g.h;
        out.write_record([x.to_string(), y.to_string(), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}
