//! The binary slice container and CSV cuts.
//!
//! Container layout (all multi-byte fields in the byte order named by the
//! tag at offset 8):
//!
//! ```text
//! 0   8   magic  "FWSLICE\0"
//! 8   1   byte order tag, b'L' or b'B'
//! 9   1   version (1)
//! 10  2   u16 axis count
//! 12  4   reserved (0)
//! 16  8   f64 time
//! 24  24  f64 fixed coordinates x, y, z
//! 48  32  per axis: u8 coord (0=x 1=y 2=z), u8 periodic, u16 0, u32 0,
//!         u64 length, f64 start, f64 spacing
//! ..      payload: f64 re, f64 im per sample, row-major
//! ```

use std::io::{Cursor, Read, Write};
use std::path::Path;

use byteorder::{BigEndian, ByteOrder, LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;

use super::grid::{Axis, Coord, FieldSlice, GridSpec};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"FWSLICE\0";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 48;
const AXIS_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ByteOrderTag {
    Little,
    Big,
}

pub fn encode_slice(slice: &FieldSlice) -> Vec<u8> {
    encode_slice_with(slice, ByteOrderTag::Little)
}

pub fn encode_slice_with(slice: &FieldSlice, order: ByteOrderTag) -> Vec<u8> {
    match order {
        ByteOrderTag::Little => encode::<LittleEndian>(slice, b'L'),
        ByteOrderTag::Big => encode::<BigEndian>(slice, b'B'),
    }
}

fn encode<B: ByteOrder>(slice: &FieldSlice, tag: u8) -> Vec<u8> {
    let g = &slice.grid;
    let mut out = Vec::with_capacity(HEADER_LEN + AXIS_LEN * g.axes.len() + 16 * slice.samples.len());
    // writes into a Vec cannot fail
    let w = &mut out;
    w.write_all(MAGIC).unwrap();
    w.write_u8(tag).unwrap();
    w.write_u8(VERSION).unwrap();
    w.write_u16::<B>(g.axes.len() as u16).unwrap();
    w.write_u32::<B>(0).unwrap();
    w.write_f64::<B>(slice.time).unwrap();
    for v in g.fixed {
        w.write_f64::<B>(v).unwrap();
    }
    for a in &g.axes {
        w.write_u8(a.coord.index() as u8).unwrap();
        w.write_u8(a.periodic as u8).unwrap();
        w.write_u16::<B>(0).unwrap();
        w.write_u32::<B>(0).unwrap();
        w.write_u64::<B>(a.len as u64).unwrap();
        w.write_f64::<B>(a.start).unwrap();
        w.write_f64::<B>(a.spacing).unwrap();
    }
    for v in &slice.samples {
        w.write_f64::<B>(v.re).unwrap();
        w.write_f64::<B>(v.im).unwrap();
    }
    out
}

pub fn decode_slice(bytes: &[u8]) -> Result<FieldSlice> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(Error::Parse("not a slice container (bad magic)".into()));
    }
    match bytes[8] {
        b'L' => decode::<LittleEndian>(bytes),
        b'B' => decode::<BigEndian>(bytes),
        other => Err(Error::Parse(format!("unknown byte order tag {other:#04x}"))),
    }
}

fn decode<B: ByteOrder>(bytes: &[u8]) -> Result<FieldSlice> {
    let truncated = |_| Error::Parse("slice container is truncated".into());
    let mut r = Cursor::new(&bytes[9..]);
    let version = r.read_u8().map_err(truncated)?;
    if version != VERSION {
        return Err(Error::Parse(format!("unsupported container version {version}")));
    }
    let ndim = r.read_u16::<B>().map_err(truncated)? as usize;
    r.read_u32::<B>().map_err(truncated)?;
    let time = r.read_f64::<B>().map_err(truncated)?;
    let mut fixed = [0.0; 3];
    for v in &mut fixed {
        *v = r.read_f64::<B>().map_err(truncated)?;
    }
    let mut axes = Vec::with_capacity(ndim);
    for _ in 0..ndim {
        let coord = r.read_u8().map_err(truncated)?;
        let coord = Coord::from_index(coord as usize).ok_or_else(|| Error::Parse(format!("bad axis coordinate {coord}")))?;
        let periodic = r.read_u8().map_err(truncated)? != 0;
        r.read_u16::<B>().map_err(truncated)?;
        r.read_u32::<B>().map_err(truncated)?;
        let len = usize::try_from(r.read_u64::<B>().map_err(truncated)?).map_err(|_| Error::Parse("axis too long".into()))?;
        let start = r.read_f64::<B>().map_err(truncated)?;
        let spacing = r.read_f64::<B>().map_err(truncated)?;
        axes.push(Axis::new(coord, start, spacing, len, periodic)?);
    }
    let grid = GridSpec::new(axes, fixed)?;
    let expected = grid.len().checked_mul(16).ok_or_else(|| Error::Parse("payload size overflows".into()))?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != expected {
        return Err(Error::Parse(format!("payload has {} bytes, grid needs {expected}", payload.len())));
    }
    let samples = payload
        .chunks_exact(16)
        .map(|c| Complex64::new(B::read_f64(&c[..8]), B::read_f64(&c[8..])))
        .collect();
    FieldSlice::new(grid, samples, time)
}

/// Writes `bytes` to a temporary file beside `path` and renames it into
/// place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_slice(path: &Path, slice: &FieldSlice) -> Result<()> {
    atomic_write(path, &encode_slice(slice))
}

pub fn read_slice(path: &Path) -> Result<FieldSlice> {
    decode_slice(&std::fs::read(path)?)
}

/// CSV rows `coord…, re, im, abs` for a 1D or 2D slice, preceded by
/// `#`-prefixed comment lines.
pub fn slice_to_csv(slice: &FieldSlice, comments: &[String]) -> Result<Vec<u8>> {
    if slice.grid.axes.len() > 2 {
        return Err(Error::Unsupported("CSV cuts are 1D or 2D; take a cut first".into()));
    }
    let mut out = Vec::new();
    for c in comments {
        for line in c.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let mut header: Vec<&str> = slice.grid.axes.iter().map(|a| a.coord.name()).collect();
        header.extend(["re", "im", "abs"]);
        w.write_record(&header).map_err(csv_error)?;
        for (i, v) in slice.samples.iter().enumerate() {
            let p = slice.grid.point(i);
            let mut row: Vec<String> = slice.grid.axes.iter().map(|a| fmt(p[a.coord.index()])).collect();
            row.extend([fmt(v.re), fmt(v.im), fmt(v.norm())]);
            w.write_record(&row).map_err(csv_error)?;
        }
        w.flush()?;
    }
    Ok(out)
}

/// Plain rows with a header, for tables that are not slices.
pub fn table_to_csv(header: &[&str], rows: &[Vec<f64>], comments: &[String]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for c in comments {
        for line in c.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header).map_err(csv_error)?;
        for r in rows {
            w.write_record(r.iter().map(|v| fmt(*v))).map_err(csv_error)?;
        }
        w.flush()?;
    }
    Ok(out)
}

/// Shortest representation that round-trips.
fn fmt(v: f64) -> String {
    format!("{v:?}")
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// The 1D or 2D sub-slice where every other axis sits at index `at`
/// (clamped to its length).
pub fn cut(slice: &FieldSlice, keep: &[Coord], at: usize) -> Result<FieldSlice> {
    let g = &slice.grid;
    for c in keep {
        if g.axis(*c).is_none() {
            return Err(Error::GridMismatch(format!("no {} axis to keep", c.name())));
        }
    }
    let axes: Vec<Axis> = g.axes.iter().filter(|a| keep.contains(&a.coord)).copied().collect();
    let mut fixed = g.fixed;
    let mut pinned = vec![0usize; g.axes.len()];
    for (d, a) in g.axes.iter().enumerate() {
        if !keep.contains(&a.coord) {
            pinned[d] = at.min(a.len - 1);
            fixed[a.coord.index()] = a.at(pinned[d]);
        }
    }
    let sub = GridSpec::new(axes, fixed)?;
    let samples = (0..sub.len())
        .map(|i| {
            let idx = sub.unravel(i);
            let mut full = pinned.clone();
            let mut k = 0;
            for (d, a) in g.axes.iter().enumerate() {
                if keep.contains(&a.coord) {
                    full[d] = idx[k];
                    k += 1;
                }
            }
            slice.samples[g.ravel(&full)]
        })
        .collect();
    let mut out = FieldSlice::new(sub, samples, slice.time)?;
    out.meta = slice.meta.clone();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FieldSlice {
        let g = GridSpec::new(
            vec![Axis::closed(Coord::X, 0.0, 2.0, 3).unwrap(), Axis::periodic(Coord::Z, 1.0, 4).unwrap()],
            [0.0, 0.25, 0.0],
        )
        .unwrap();
        FieldSlice::from_fn(g, 0.75, |[x, _, z]| Ok(Complex64::new(x + 0.1 * z, x * z - 1e-300))).unwrap()
    }

    #[test]
    fn round_trip_both_byte_orders() {
        let s = sample();
        for order in [ByteOrderTag::Little, ByteOrderTag::Big] {
            let bytes = encode_slice_with(&s, order);
            assert_eq!(bytes.len(), 48 + 2 * 32 + 16 * 12);
            let back = decode_slice(&bytes).unwrap();
            assert_eq!(back.grid, s.grid);
            assert_eq!(back.time, s.time);
            assert!(back.samples.iter().zip(&s.samples).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
        }
    }

    #[test]
    fn rejects_corrupt_containers() {
        let bytes = encode_slice(&sample());
        assert!(decode_slice(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_slice(&bad).is_err());
        let mut bad = bytes;
        bad[8] = b'Q';
        assert!(decode_slice(&bad).is_err());
    }

    #[test]
    fn csv_has_comments_and_header() {
        let text = String::from_utf8(slice_to_csv(&sample(), &["t = 0.75".into()]).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# t = 0.75"));
        assert_eq!(lines.next(), Some("x,z,re,im,abs"));
        assert_eq!(text.lines().count(), 14);
    }

    #[test]
    fn cut_keeps_one_axis() {
        let s = sample();
        let c = cut(&s, &[Coord::Z], 1).unwrap();
        assert_eq!(c.grid.shape(), vec![4]);
        assert_eq!(c.grid.fixed[0], 1.0);
        assert_eq!(c.samples[2], s.samples[s.grid.ravel(&[1, 2])]);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.fws");
        write_slice(&path, &sample()).unwrap();
        write_slice(&path, &sample()).unwrap();
        assert_eq!(read_slice(&path).unwrap().samples, sample().samples);
    }
}
