use super::{GridField, Grid3};
use crate::error::{Error, Result};
use std::io::{Read, Write};

const MAGIC: &[u8; 4] = b"VLF1";

/// Contents of a VLF1 file.
#[derive(Debug, Clone, PartialEq)]
pub struct Vlf1Payload {
    pub n: usize,
    pub length: f64,
    pub degree: usize,
    pub components: Vec<Vec<f64>>,
}

/// Writes `"VLF1"`, then `N: u64`, `L: f64`, `degree: u64`, component count `u64`,
/// then every component in grid order; all little-endian.
pub fn write_vlf1<W: Write>(f: &GridField, mut w: W) -> Result<()> {
    let g = f.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(g.n() as u64).to_le_bytes())?;
    w.write_all(&g.length().to_le_bytes())?;
    w.write_all(&(f.degree() as u64).to_le_bytes())?;
    w.write_all(&(f.components().len() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(8 * g.len());
    for c in f.components() {
        buf.clear();
        for v in c {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_vlf1<R: Read>(mut r: R) -> Result<Vlf1Payload> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Invalid("not a VLF1 file".into()));
    }
    let mut word = [0u8; 8];
    let mut next = |r: &mut R| -> Result<[u8; 8]> {
        r.read_exact(&mut word)?;
        Ok(word)
    };
    let n = u64::from_le_bytes(next(&mut r)?) as usize;
    let length = f64::from_le_bytes(next(&mut r)?);
    let degree = u64::from_le_bytes(next(&mut r)?) as usize;
    let count = u64::from_le_bytes(next(&mut r)?) as usize;
    if count != super::component_count(degree) {
        return Err(Error::Invalid(format!("degree {degree} with {count} components")));
    }
    let len = n * n * n;
    let mut components = Vec::with_capacity(count);
    let mut bytes = vec![0u8; 8 * len];
    for _ in 0..count {
        r.read_exact(&mut bytes)?;
        components.push(
            bytes
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
                .collect(),
        );
    }
    Ok(Vlf1Payload { n, length, degree, components })
}

/// Legacy ASCII VTK structured points, one `SCALARS` block per component.
pub fn write_vtk<W: Write>(f: &GridField, name: &str, mut w: W) -> Result<()> {
    let g: &Grid3 = f.grid();
    let n = g.n();
    let h = g.spacing();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{name} degree {}", f.degree())?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET STRUCTURED_POINTS")?;
    writeln!(w, "DIMENSIONS {n} {n} {n}")?;
    writeln!(w, "ORIGIN {o} {o} {o}", o = g.origin())?;
    writeln!(w, "SPACING {h} {h} {h}")?;
    writeln!(w, "POINT_DATA {}", g.len())?;
    for (c, comp) in f.components().iter().enumerate() {
        writeln!(w, "SCALARS {name}_{c} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        // VTK orders points with x fastest.
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    writeln!(w, "{:e}", comp[g.index(ix, iy, iz)])?;
                }
            }
        }
    }
    Ok(())
}
