//! Field snapshots: CSV for 1D runs, legacy-VTK structured points otherwise.
//!
//! CSV files have the header `x,rho,u,p` and one row per cell. VTK files use
//! `DATASET STRUCTURED_POINTS` with cell data; `ORIGIN` is the lower domain
//! corner, `DIMENSIONS` counts points (cells + 1) and the title line reads
//! `igflow case=<name> time=<t> step=<n>`. Text values carry 17 significant
//! digits; binary files hold big-endian doubles as the legacy format requires.

use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::vorticity;
use crate::error::{Error, Result};
use crate::gradients::GradientScheme;
use crate::io::config::SnapshotFormat;
use crate::state::{Field, FieldKind, GasModel, Grid};

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub case: String,
    pub time: f64,
    pub step: usize,
    pub n: [usize; 3],
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub scalars: Vec<(String, Vec<f64>)>,
    pub vectors: Vec<(String, Vec<[f64; 3]>)>,
}

impl Snapshot {
    /// Samples interior density, pressure and velocity; `vorticity` adds the
    /// vorticity magnitude computed with that gradient scheme (ghosts of `q`
    /// must be filled).
    pub fn from_field(
        q: &Field,
        grid: &Grid,
        gas: &GasModel,
        case: &str,
        time: f64,
        step: usize,
        vort: Option<GradientScheme>,
    ) -> Result<Self> {
        if !q.matches(grid) {
            return Err(Error::GridMismatch("snapshot field differs from grid".into()));
        }
        let cells: Vec<_> = grid.interior_cells().map(|(i, j, k)| q.primitive_at(grid, gas, i, j, k)).collect();
        let mut scalars = vec![
            ("rho".to_string(), cells.iter().map(|s| s.rho).collect::<Vec<_>>()),
            ("u".to_string(), cells.iter().map(|s| s.u).collect()),
            ("p".to_string(), cells.iter().map(|s| s.p).collect()),
        ];
        let mut vectors = Vec::new();
        if grid.dimension() > 1 {
            scalars.remove(1);
            vectors.push(("velocity".to_string(), cells.iter().map(|s| [s.u, s.v, s.w]).collect()));
            if let Some(scheme) = vort {
                debug_assert_eq!(q.kind, FieldKind::Conserved);
                let w = vorticity(q, grid, gas, scheme)?;
                scalars.push((
                    "vorticity".to_string(),
                    w.iter().map(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()).collect(),
                ));
            }
        }
        Ok(Self {
            case: case.to_string(),
            time,
            step,
            n: grid.n,
            origin: grid.lower,
            spacing: grid.spacing,
            scalars,
            vectors,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n.iter().filter(|&&n| n > 1).count()
    }

    pub fn scalar(&self, name: &str) -> Option<&[f64]> {
        self.scalars.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn vector(&self, name: &str) -> Option<&[[f64; 3]]> {
        self.vectors.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    fn cells(&self) -> usize {
        self.n.iter().product()
    }
}

/// Formats a double so that parsing it returns the same value.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_bytes(s: &Snapshot) -> Result<Vec<u8>> {
    let cols = ["rho", "u", "p"].map(|c| s.scalar(c));
    let [Some(rho), Some(u), Some(p)] = cols else {
        return Err(Error::Config("1D snapshots need rho, u and p".into()));
    };
    let mut out = String::from("x,rho,u,p\n");
    for i in 0..s.n[0] {
        let x = s.origin[0] + (i as f64 + 0.5) * s.spacing[0];
        let _ = writeln!(out, "{},{},{},{}", num(x), num(rho[i]), num(u[i]), num(p[i]));
    }
    Ok(out.into_bytes())
}

fn vtk_bytes(s: &Snapshot, format: SnapshotFormat) -> Vec<u8> {
    let binary = format == SnapshotFormat::Binary;
    let mut out = Vec::new();
    let mut head = format!(
        "# vtk DataFile Version 3.0\nigflow case={} time={} step={}\n{}\nDATASET STRUCTURED_POINTS\n",
        s.case,
        num(s.time),
        s.step,
        if binary { "BINARY" } else { "ASCII" }
    );
    let dims = s.n.map(|n| if n > 1 { n + 1 } else { 1 });
    let spacing = [0, 1, 2].map(|a| if s.n[a] > 1 { s.spacing[a] } else { 1.0 });
    let _ = writeln!(head, "DIMENSIONS {} {} {}", dims[0], dims[1], dims[2]);
    let _ = writeln!(head, "ORIGIN {} {} {}", num(s.origin[0]), num(s.origin[1]), num(s.origin[2]));
    let _ = writeln!(head, "SPACING {} {} {}", num(spacing[0]), num(spacing[1]), num(spacing[2]));
    let _ = writeln!(head, "CELL_DATA {}", s.cells());
    out.extend_from_slice(head.as_bytes());
    let mut block = |header: String, values: &mut dyn Iterator<Item = f64>, per_line: usize| {
        out.extend_from_slice(header.as_bytes());
        if binary {
            for v in values {
                out.extend_from_slice(&v.to_be_bytes());
            }
            out.push(b'\n');
        } else {
            let vals: Vec<f64> = values.collect();
            for chunk in vals.chunks(per_line) {
                let line: Vec<String> = chunk.iter().map(|&v| num(v)).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
    };
    for (name, v) in &s.scalars {
        block(format!("SCALARS {name} double 1\nLOOKUP_TABLE default\n"), &mut v.iter().copied(), 1);
    }
    for (name, v) in &s.vectors {
        block(format!("VECTORS {name} double\n"), &mut v.iter().flat_map(|x| x.iter().copied()), 3);
    }
    out
}

/// Writes a snapshot, CSV when one-dimensional and VTK otherwise.
pub fn write_snapshot(s: &Snapshot, path: &Path, format: SnapshotFormat) -> Result<()> {
    let bytes = if s.dimension() <= 1 && s.vectors.is_empty() { csv_bytes(s)? } else { vtk_bytes(s, format) };
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// File name of the snapshot written at output index `index`.
pub fn snapshot_name(s: &Snapshot, index: usize) -> String {
    let ext = if s.dimension() <= 1 && s.vectors.is_empty() { "csv" } else { "vtk" };
    format!("{}_{index:04}.{ext}", s.case)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn bad(&self, message: impl Into<String>) -> Error {
        Error::Snapshot { path: self.path.to_path_buf(), message: message.into() }
    }

    fn line(&mut self) -> Result<&'a str> {
        if self.pos >= self.bytes.len() {
            return Err(self.bad("unexpected end of file"));
        }
        let rest = &self.bytes[self.pos..];
        let end = rest.iter().position(|&b| b == b'\n').unwrap_or(rest.len());
        self.pos += (end + 1).min(rest.len());
        std::str::from_utf8(&rest[..end]).map(str::trim).map_err(|_| self.bad("header is not UTF-8"))
    }

    fn nonempty_line(&mut self) -> Result<&'a str> {
        loop {
            let l = self.line()?;
            if !l.is_empty() {
                return Ok(l);
            }
        }
    }

    fn doubles(&mut self, count: usize, binary: bool) -> Result<Vec<f64>> {
        if binary {
            let need = 8 * count;
            if self.pos + need > self.bytes.len() {
                return Err(self.bad("binary block is truncated"));
            }
            let v = self.bytes[self.pos..self.pos + need]
                .chunks_exact(8)
                .map(|c| f64::from_be_bytes(c.try_into().unwrap()))
                .collect();
            self.pos += need;
            Ok(v)
        } else {
            let mut v = Vec::with_capacity(count);
            while v.len() < count {
                for t in self.nonempty_line()?.split_whitespace() {
                    v.push(t.parse().map_err(|_| self.bad(format!("bad number '{t}'")))?);
                }
            }
            if v.len() != count {
                return Err(self.bad("data block length mismatch"));
            }
            Ok(v)
        }
    }
}

fn parse_triple<T: std::str::FromStr>(c: &Cursor, line: &str, key: &str) -> Result<[T; 3]> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != key {
        return Err(c.bad(format!("expected '{key} a b c', found '{line}'")));
    }
    let p = |s: &str| s.parse::<T>().map_err(|_| c.bad(format!("bad value in '{line}'")));
    Ok([p(parts[1])?, p(parts[2])?, p(parts[3])?])
}

fn read_vtk(bytes: &[u8], path: &Path) -> Result<Snapshot> {
    let mut c = Cursor { bytes, pos: 0, path };
    if !c.line()?.starts_with("# vtk DataFile") {
        return Err(c.bad("missing VTK signature"));
    }
    let title = c.line()?;
    let mut case = String::new();
    let mut time = 0.0;
    let mut step = 0;
    for t in title.split_whitespace() {
        match t.split_once('=') {
            Some(("case", v)) => case = v.to_string(),
            Some(("time", v)) => time = v.parse().map_err(|_| c.bad("bad time in title"))?,
            Some(("step", v)) => step = v.parse().map_err(|_| c.bad("bad step in title"))?,
            _ => {}
        }
    }
    let binary = match c.line()? {
        "ASCII" => false,
        "BINARY" => true,
        other => return Err(c.bad(format!("unknown encoding '{other}'"))),
    };
    if c.line()? != "DATASET STRUCTURED_POINTS" {
        return Err(c.bad("only STRUCTURED_POINTS is supported"));
    }
    let l = c.line()?;
    let dims: [usize; 3] = parse_triple(&c, l, "DIMENSIONS")?;
    let l = c.line()?;
    let origin: [f64; 3] = parse_triple(&c, l, "ORIGIN")?;
    let l = c.line()?;
    let mut spacing: [f64; 3] = parse_triple(&c, l, "SPACING")?;
    let n = dims.map(|d| if d > 1 { d - 1 } else { 1 });
    for a in 0..3 {
        if n[a] == 1 && dims[a] == 1 {
            spacing[a] = 1.0;
        }
    }
    let cell_line = c.line()?;
    let count: usize = cell_line
        .strip_prefix("CELL_DATA ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| c.bad("expected CELL_DATA"))?;
    if count != n.iter().product::<usize>() {
        return Err(c.bad("CELL_DATA count disagrees with DIMENSIONS"));
    }
    let mut scalars = Vec::new();
    let mut vectors = Vec::new();
    while c.pos < bytes.len() {
        let header = match c.nonempty_line() {
            Ok(h) => h,
            Err(_) => break,
        };
        let parts: Vec<&str> = header.split_whitespace().collect();
        match parts.first().copied() {
            Some("SCALARS") if parts.len() >= 3 => {
                if c.line()? != "LOOKUP_TABLE default" {
                    return Err(c.bad("expected LOOKUP_TABLE default"));
                }
                scalars.push((parts[1].to_string(), c.doubles(count, binary)?));
            }
            Some("VECTORS") if parts.len() >= 3 => {
                let v = c.doubles(3 * count, binary)?;
                vectors.push((parts[1].to_string(), v.chunks_exact(3).map(|x| [x[0], x[1], x[2]]).collect()));
            }
            _ => return Err(c.bad(format!("unexpected line '{header}'"))),
        }
    }
    Ok(Snapshot { case, time, step, n, origin, spacing, scalars, vectors })
}

fn read_csv(bytes: &[u8], path: &Path) -> Result<Snapshot> {
    let bad = |m: String| Error::Snapshot { path: path.to_path_buf(), message: m };
    let text = std::str::from_utf8(bytes).map_err(|_| bad("not UTF-8".into()))?;
    let mut lines = text.lines();
    if lines.next() != Some("x,rho,u,p") {
        return Err(bad("header must be x,rho,u,p".into()));
    }
    let mut cols = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for (i, l) in lines.enumerate() {
        let vals: Vec<&str> = l.split(',').collect();
        if vals.len() != 4 {
            return Err(bad(format!("row {} has {} columns", i + 1, vals.len())));
        }
        for (c, v) in cols.iter_mut().zip(vals) {
            c.push(v.parse::<f64>().map_err(|_| bad(format!("bad number '{v}' in row {}", i + 1)))?);
        }
    }
    let n = cols[0].len();
    if n == 0 {
        return Err(bad("no rows".into()));
    }
    let h = if n > 1 { (cols[0][n - 1] - cols[0][0]) / (n - 1) as f64 } else { 1.0 };
    let [x, rho, u, p] = cols;
    Ok(Snapshot {
        case: String::new(),
        time: f64::NAN,
        step: 0,
        n: [n, 1, 1],
        origin: [x[0] - 0.5 * h, 0.0, 0.0],
        spacing: [h, 1.0, 1.0],
        scalars: vec![("rho".into(), rho), ("u".into(), u), ("p".into(), p)],
        vectors: Vec::new(),
    })
}

/// Reads a snapshot written by [`write_snapshot`]. CSV files carry no case
/// name or time; those fields come back empty and NaN.
pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"# vtk") {
        read_vtk(&bytes, path)
    } else {
        read_csv(&bytes, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::make_case;
    use crate::solver::fill_ghosts;
    use crate::state::PrimitiveState;

    #[test]
    fn sod_csv_contract() {
        let c = make_case("sod").unwrap();
        let g = c.grid().unwrap();
        let q = c.initial_field(&g).unwrap();
        let s = Snapshot::from_field(&q, &g, &c.gas, "sod", 0.2, 10, None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(snapshot_name(&s, 0));
        assert!(path.to_string_lossy().ends_with("sod_0000.csv"));
        write_snapshot(&s, &path, SnapshotFormat::Ascii).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,rho,u,p"));
        assert_eq!(lines.count(), 200);
        let back = read_snapshot(&path).unwrap();
        assert_eq!(back.scalar("rho").unwrap(), s.scalar("rho").unwrap());
        assert!((back.origin[0] - 0.0).abs() < 1e-15 && (back.spacing[0] - 0.005).abs() < 1e-15);
    }

    #[test]
    fn constant_field_has_constant_columns() {
        let g = Grid::rect([6, 4], [0.0, 0.0], [1.0, 1.0], [true; 2]).unwrap();
        let gas = GasModel::inviscid(1.4);
        let q = Field::from_primitive_fn(&g, &gas, |_| PrimitiveState::new_2d(1.3, 0.2, -0.1, 0.7)).unwrap();
        let s = Snapshot::from_field(&q, &g, &gas, "const", 0.0, 0, None).unwrap();
        for (_, v) in &s.scalars {
            assert!(v.iter().all(|x| *x == v[0]));
        }
    }

    #[test]
    fn vtk_roundtrip_ascii_and_binary() {
        let c = make_case("riemann_config3").unwrap();
        let g = c.grid_with([12, 10, 1]).unwrap();
        let mut q = c.initial_field(&g).unwrap();
        fill_ghosts(&mut q, &g, &c.gas, &c.bcs, 0.0).unwrap();
        let s =
            Snapshot::from_field(&q, &g, &c.gas, "riemann_config3", 0.123456789, 7, Some(GradientScheme::Cd4)).unwrap();
        assert!(s.scalar("vorticity").is_some());
        let dir = tempfile::tempdir().unwrap();
        for fmt in [SnapshotFormat::Ascii, SnapshotFormat::Binary] {
            let path = dir.path().join(format!("{fmt:?}.vtk"));
            write_snapshot(&s, &path, fmt).unwrap();
            let back = read_snapshot(&path).unwrap();
            assert_eq!(back, s, "{fmt:?}");
        }
        let text = std::fs::read_to_string(dir.path().join("Ascii.vtk")).unwrap();
        assert!(text.contains("DIMENSIONS 13 11 1\n"));
        assert!(text.contains("CELL_DATA 120\n"));
    }

    #[test]
    fn malformed_files_are_reported_with_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        match read_snapshot(&path) {
            Err(Error::Snapshot { path: p, .. }) => assert_eq!(p, path),
            other => panic!("{other:?}"),
        }
        assert!(matches!(read_snapshot(&dir.path().join("missing.vtk")), Err(Error::Io { .. })));
    }
}
