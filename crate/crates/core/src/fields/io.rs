//! CSV and binary snapshots of grid fields.
//!
//! The binary dump is little-endian: magic `PLFD`, `u32` version (1), `u32`
//! chart tag (0 interior, 1 collar), `u32` component count, `u32` rows,
//! `u32` columns, then the doubles of each component in row-major order.

use std::io::{Read, Write};

use ndarray::Array2;

use super::field::{Chart, GridField};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"PLFD";
const VERSION: u32 = 1;

/// Writes `x1,x2,i,j,v0[,v1..]` rows.
pub fn write_csv<W: Write>(f: &GridField, mut w: W) -> Result<()> {
    let ncomp = f.n_components();
    let head: Vec<String> = (0..ncomp).map(|k| format!("v{k}")).collect();
    writeln!(w, "x1,x2,i,j,{}", head.join(","))?;
    let pos = f.chart().positions();
    let (_, m) = f.shape();
    for (k, x) in pos.iter().enumerate() {
        let (i, j) = (k / m, k % m);
        write!(w, "{},{},{},{}", x[0], x[1], i, j)?;
        for c in f.comps() {
            write!(w, ",{}", c[[i, j]])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_binary<W: Write>(f: &GridField, mut w: W) -> Result<()> {
    let (n, m) = f.shape();
    w.write_all(MAGIC)?;
    for v in [VERSION, f.chart().tag(), f.n_components() as u32, n as u32, m as u32] {
        w.write_all(&v.to_le_bytes())?;
    }
    for c in f.comps() {
        for v in c.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a dump written by [`write_binary`] onto a chart of matching tag and shape.
pub fn read_binary<R: Read>(chart: Chart, mut r: R) -> Result<GridField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Shape("not a field dump (bad magic)".into()));
    }
    let mut word = || -> Result<u32> {
        let mut b = [0u8; 4];
        r.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    };
    let (version, tag, ncomp, n, m) = (word()?, word()?, word()?, word()?, word()?);
    if version != VERSION || tag != chart.tag() || (n as usize, m as usize) != chart.shape() {
        return Err(Error::Shape(format!(
            "dump header (version {version}, tag {tag}, {n}x{m}) does not match the chart"
        )));
    }
    let mut comps = Vec::with_capacity(ncomp as usize);
    for _ in 0..ncomp {
        let mut buf = vec![0u8; 8 * (n * m) as usize];
        r.read_exact(&mut buf)?;
        let vals: Vec<f64> = buf
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
            .collect();
        comps.push(Array2::from_shape_vec((n as usize, m as usize), vals).expect("sized buffer"));
    }
    GridField::new(chart, comps)
}
