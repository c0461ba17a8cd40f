//! CSV (`index,x1[,x2,...]`) and JSON provenance sidecars for point sets.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use super::{PointSet, Provenance};
use crate::error::{Error, Result};

/// 17 significant digits, enough for a bit-exact round trip.
pub fn format_coordinate(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(points: &PointSet, mut w: W) -> Result<()> {
    let mut header = String::from("index");
    for c in 1..=points.dim() {
        header.push_str(&format!(",x{c}"));
    }
    writeln!(w, "{header}")?;
    for (i, p) in points.points().enumerate() {
        let mut row = (i + 1).to_string();
        for &c in p {
            row.push(',');
            row.push_str(&format_coordinate(c));
        }
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a point CSV. The result carries `Imported` provenance.
pub fn read_csv<R: BufRead>(r: R, source: &str) -> Result<PointSet> {
    let mut lines = r.lines();
    let header = loop {
        match lines.next() {
            Some(line) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
            None => return Err(Error::NoPoints),
        }
    };
    let cols: Vec<&str> = header.trim().split(',').map(str::trim).collect();
    if cols.first() != Some(&"index") || cols.len() < 2 {
        return Err(Error::Parse(format!("bad header {header:?}; expected index,x1[,x2,...]")));
    }
    for (i, c) in cols[1..].iter().enumerate() {
        if *c != format!("x{}", i + 1) {
            return Err(Error::Parse(format!("bad column name {c:?}")));
        }
    }
    let dim = cols.len() - 1;
    let mut coords = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != dim + 1 {
            return Err(Error::Parse(format!("row {}: expected {} fields, got {}", lineno + 2, dim + 1, fields.len())));
        }
        for f in &fields[1..] {
            let v: f64 = f.parse().map_err(|_| Error::Parse(format!("row {}: bad number {f:?}", lineno + 2)))?;
            if !(0.0..1.0).contains(&v) {
                return Err(Error::Parse(format!("row {}: coordinate {v} outside [0, 1)", lineno + 2)));
            }
            coords.push(v);
        }
    }
    if coords.is_empty() {
        return Err(Error::NoPoints);
    }
    PointSet::new(dim, coords, Provenance::Imported { source: source.to_string() })
}

/// `points.csv` -> `points.provenance.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("provenance.json")
}

/// Reads a point CSV and, if present, its provenance sidecar.
pub fn load(path: &Path) -> Result<PointSet> {
    let file = std::fs::File::open(path)?;
    let points = read_csv(std::io::BufReader::new(file), &path.display().to_string())?;
    let side = sidecar_path(path);
    if side.exists() {
        let prov: Provenance = serde_json::from_str(&std::fs::read_to_string(side)?)?;
        return Ok(points.with_provenance(prov));
    }
    Ok(points)
}

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| Error::config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes the CSV and its provenance sidecar.
pub fn save(points: &PointSet, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(points, &mut buf)?;
    write_atomic(path, &buf)?;
    let prov = serde_json::to_vec_pretty(points.provenance())?;
    write_atomic(&sidecar_path(path), &prov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_and_rows() {
        let p = PointSet::new(2, vec![0.5, 0.25, 1.0 / 3.0, 0.0], Provenance::Imported { source: "t".into() }).unwrap();
        let mut buf = Vec::new();
        write_csv(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("index,x1,x2"));
        assert_eq!(lines.next(), Some("1,5.0000000000000000e-1,2.5000000000000000e-1"));
        assert_eq!(lines.next().unwrap().split(',').nth(1), Some("3.3333333333333331e-1"));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(read_csv("".as_bytes(), "t"), Err(Error::NoPoints)));
        assert!(matches!(read_csv("index,x1\n".as_bytes(), "t"), Err(Error::NoPoints)));
        assert!(read_csv("i,x\n1,0.5\n".as_bytes(), "t").is_err());
        assert!(read_csv("index,x1\n1,abc\n".as_bytes(), "t").is_err());
        assert!(read_csv("index,x1\n1,1.5\n".as_bytes(), "t").is_err());
        assert!(read_csv("index,x1,x2\n1,0.5\n".as_bytes(), "t").is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(xs in proptest::collection::vec(0.0f64..1.0, 1..40), dim in 1usize..4) {
            let len = xs.len() / dim * dim;
            prop_assume!(len > 0);
            let p = PointSet::new(dim, xs[..len].to_vec(), Provenance::Imported { source: "t".into() }).unwrap();
            let mut buf = Vec::new();
            write_csv(&p, &mut buf).unwrap();
            let q = read_csv(buf.as_slice(), "t").unwrap();
            prop_assert_eq!(q.dim(), dim);
            for (a, b) in p.coords().iter().zip(q.coords()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
