//! Field containers: binary `FXV1` and plotting CSV.
//!
//! Binary layout, all little-endian: magic `FXV1`, n as u32, N as u32,
//! L as f64, then N^n f64 values in row-major node order.

use std::io::{Read, Write};

use super::{Field, SpectralGrid};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"FXV1";

pub fn write_fxv1<W: Write>(field: &Field, mut w: W) -> Result<()> {
    let g = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    w.write_all(&(g.points_per_axis() as u32).to_le_bytes())?;
    w.write_all(&g.half_length().to_le_bytes())?;
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_fxv1<R: Read>(mut r: R) -> Result<Field> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4)?;
    let npts = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b8)?;
    let half_len = f64::from_le_bytes(b8);
    let grid = SpectralGrid::new(n, npts, half_len)
        .map_err(|e| Error::Format(format!("header describes an invalid grid: {e}")))?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        r.read_exact(&mut b8)
            .map_err(|_| Error::Format("truncated value block".into()))?;
        values.push(f64::from_le_bytes(b8));
    }
    let mut tail = [0u8; 1];
    if r.read(&mut tail)? != 0 {
        return Err(Error::Format("trailing bytes after value block".into()));
    }
    Field::new(&grid, values)
}

/// CSV with columns x0[,x1[,x2]],value.
pub fn write_csv<W: Write>(field: &Field, mut w: W) -> Result<()> {
    let g = field.grid();
    let n = g.dim();
    let header: Vec<String> = (0..n).map(|d| format!("x{d}")).collect();
    writeln!(w, "{},value", header.join(","))?;
    for (i, v) in field.values().iter().enumerate() {
        let x = g.node(i);
        for c in &x[..n] {
            write!(w, "{c:.17e},")?;
        }
        writeln!(w, "{v:.17e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn binary_round_trip_is_bitwise() {
        let g = make_grid(2, 8, 1.25).unwrap();
        let u = Field::from_fn(&g, |x| x[0].sin() * x[1].exp() + 1e-300);
        let mut buf = Vec::new();
        write_fxv1(&u, &mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 4 + 8 + 8 * 64);
        let v = read_fxv1(&buf[..]).unwrap();
        assert_eq!(v.grid(), &g);
        assert!(u.values().iter().zip(v.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn rejects_corrupt_containers() {
        let g = make_grid(1, 8, 1.0).unwrap();
        let mut buf = Vec::new();
        write_fxv1(&Field::zeros(&g), &mut buf).unwrap();
        assert!(read_fxv1(&buf[..buf.len() - 1]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_fxv1(&bad[..]).is_err());
        let mut extra = buf.clone();
        extra.push(0);
        assert!(read_fxv1(&extra[..]).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = make_grid(1, 8, 1.0).unwrap();
        let mut buf = Vec::new();
        write_csv(&Field::zeros(&g), &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 9);
        assert!(s.starts_with("x0,value\n"));
    }
}
