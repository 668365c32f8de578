//! Array exchange: the `MWD1` binary format, CSV and 8-bit PGM heatmaps.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mwd::PhaseSpaceField;
use crate::signals::Grid;

pub const MAGIC: &[u8; 4] = b"MWD1";

/// `"MWD1"`, `u32` rank, `u32` dims, then `f64` (re, im) pairs, all little-endian.
pub fn write_bin<W: Write>(w: &mut W, dims: &[usize], values: &[Complex64]) -> Result<()> {
    let total: usize = dims.iter().product();
    if total != values.len() {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} hold {total} values, got {}",
            values.len()
        )));
    }
    w.write_all(MAGIC)?;
    w.write_all(&(dims.len() as u32).to_le_bytes())?;
    for &d in dims {
        let d = u32::try_from(d).map_err(|_| Error::Io(format!("dimension {d} exceeds u32")))?;
        w.write_all(&d.to_le_bytes())?;
    }
    for v in values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_bin<R: Read>(r: &mut R) -> Result<(Vec<usize>, Vec<Complex64>)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Io(format!("bad magic {magic:?}, expected \"MWD1\"")));
    }
    let mut u = [0u8; 4];
    r.read_exact(&mut u)?;
    let rank = u32::from_le_bytes(u) as usize;
    if rank > 8 {
        return Err(Error::Io(format!("rank {rank} is implausible")));
    }
    let mut dims = Vec::with_capacity(rank);
    for _ in 0..rank {
        r.read_exact(&mut u)?;
        dims.push(u32::from_le_bytes(u) as usize);
    }
    let total = dims
        .iter()
        .try_fold(1usize, |a, &d| a.checked_mul(d))
        .ok_or_else(|| Error::Io("dims overflow".into()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != total * 16 {
        return Err(Error::Io(format!(
            "payload has {} bytes, dims {dims:?} need {}",
            bytes.len(),
            total * 16
        )));
    }
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok((dims, values))
}

pub fn read_bin_file(path: &Path) -> Result<(Vec<usize>, Vec<Complex64>)> {
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_bin(&mut BufReader::new(f))
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn coord_header(prefix: &str, d: usize) -> Vec<String> {
    if d == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=d).map(|i| format!("{prefix}{i}")).collect()
    }
}

/// Header `x,omega,re,im` (`x1,x2,omega1,omega2,re,im` for d = 2); one row per sample.
pub fn write_field_csv<W: Write>(w: &mut W, f: &PhaseSpaceField) -> Result<()> {
    let d = f.dim();
    let mut head = coord_header("x", d);
    head.extend(coord_header("omega", d));
    head.extend(["re".to_string(), "im".to_string()]);
    writeln!(w, "{}", head.join(","))?;
    let nw = f.wgrid.total();
    for j in 0..f.xgrid.total() {
        let x: Vec<String> = f.xgrid.coords(j).into_iter().map(num).collect();
        let x = x.join(",");
        for k in 0..nw {
            let om: Vec<String> = f.wgrid.coords(k).into_iter().map(num).collect();
            let v = f.values[j * nw + k];
            writeln!(w, "{x},{},{},{}", om.join(","), num(v.re), num(v.im))?;
        }
    }
    Ok(())
}

/// Header `t,re,im` (`t1,t2,re,im` for d = 2).
pub fn write_signal_csv<W: Write>(w: &mut W, grid: &Grid, samples: &[Complex64]) -> Result<()> {
    let mut head = coord_header("t", grid.dim());
    head.extend(["re".to_string(), "im".to_string()]);
    writeln!(w, "{}", head.join(","))?;
    for (j, v) in samples.iter().enumerate() {
        let t: Vec<String> = grid.coords(j).into_iter().map(num).collect();
        writeln!(w, "{},{},{}", t.join(","), num(v.re), num(v.im))?;
    }
    Ok(())
}

/// Parsed CSV: header names and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// Trailing `re, im` columns as complex values.
    pub fn values(&self) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|r| Complex64::new(r[r.len() - 2], r[r.len() - 1]))
            .collect()
    }

    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for r in &self.rows {
            let s: Vec<String> = r.iter().map(|v| num(*v)).collect();
            writeln!(w, "{}", s.join(","))?;
        }
        Ok(())
    }
}

pub fn read_csv<R: BufRead>(r: R) -> Result<Table> {
    let mut lines = r.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Io("empty CSV".into()))??
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| Error::Io(format!("line {}: {t:?}: {e}", i + 2)))
            })
            .collect::<Result<_>>()?;
        if row.len() != header.len() {
            return Err(Error::Io(format!(
                "line {}: {} columns, header has {}",
                i + 2,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}

/// Binary PGM of `|F|` scaled so the maximum maps to 255; rows are `x`, columns `ω` (d = 1).
pub fn write_pgm<W: Write>(w: &mut W, f: &PhaseSpaceField) -> Result<()> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch("PGM heatmaps need d = 1".into()));
    }
    let (h, wd) = (f.xgrid.n(), f.wgrid.n());
    let max = f.max_abs();
    write!(w, "P5\n{wd} {h}\n255\n")?;
    let bytes: Vec<u8> = f
        .values
        .iter()
        .map(|v| {
            if max > 0.0 {
                (255.0 * v.norm() / max).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        })
        .collect();
    w.write_all(&bytes)?;
    Ok(())
}

/// Header fields of a binary PGM and its pixel bytes.
pub fn read_pgm(bytes: &[u8]) -> Result<(usize, usize, &[u8])> {
    let bad = |m: &str| Error::Io(format!("PGM: {m}"));
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header"))?);
    }
    if fields[0] != "P5" {
        return Err(bad("magic is not P5"));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| bad("header number"));
    let (width, height, maxval) = (parse(fields[1])?, parse(fields[2])?, parse(fields[3])?);
    if maxval != 255 {
        return Err(bad("maxval is not 255"));
    }
    let pixels = &bytes[pos + 1..];
    if pixels.len() != width * height {
        return Err(bad("pixel count does not match the header"));
    }
    Ok((width, height, pixels))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field() -> PhaseSpaceField {
        let g = Grid::new(1, 8, 4.0).unwrap();
        PhaseSpaceField::from_fn(&g, |x, w| Complex64::new(x[0] + 0.1, w[0] / 3.0))
    }

    #[test]
    fn bin_round_trip() {
        let f = field();
        let mut buf = Vec::new();
        write_bin(&mut buf, &[8, 8], &f.values).unwrap();
        assert_eq!(&buf[..4], b"MWD1");
        assert_eq!(buf.len(), 4 + 4 + 8 + 64 * 16);
        let (dims, v) = read_bin(&mut buf.as_slice()).unwrap();
        assert_eq!(dims, vec![8, 8]);
        assert_eq!(v, f.values);
        assert!(write_bin(&mut Vec::new(), &[3], &f.values).is_err());
        assert!(read_bin(&mut &b"MWD2...."[..]).is_err());
        assert!(read_bin(&mut &buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn csv_round_trip_is_bit_identical() {
        let f = field();
        let mut buf = Vec::new();
        write_field_csv(&mut buf, &f).unwrap();
        let t = read_csv(buf.as_slice()).unwrap();
        assert_eq!(t.header, ["x", "omega", "re", "im"]);
        assert_eq!(t.values(), f.values);
        let mut again = Vec::new();
        t.write(&mut again).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn pgm_layout() {
        let f = field();
        let mut buf = Vec::new();
        write_pgm(&mut buf, &f).unwrap();
        let (w, h, px) = read_pgm(&buf).unwrap();
        assert_eq!((w, h), (8, 8));
        assert_eq!(*px.iter().max().unwrap(), 255);
    }
}
