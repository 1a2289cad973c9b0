//! Output formats: 1D profile CSV, legacy ASCII VTK for 2D fields, and the
//! JSON run manifest.
//!
//! Floating-point values are written with 17 significant digits so that
//! reading a file back reproduces the stored `f64` exactly.

use std::fmt::Write as _;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cases::CaseConfig;
use crate::diagnostics::{conserved_names, field_primitives};
use crate::eos::EosSpec;
use crate::error::{Error, Result};
use crate::solver::{Observer, RunSummary, SimClock};
use crate::state::{FieldSet, PrimitiveState};

/// `v` with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header of a 1D profile file with `m` materials.
pub fn profile_header(m: usize) -> Vec<String> {
    let mut h: Vec<String> = ["x", "rho", "u", "p"].map(String::from).to_vec();
    for prefix in ["Z", "Y", "rho"] {
        h.extend((1..=m).map(|k| format!("{prefix}_{k}")));
    }
    h
}

pub fn write_profile_csv(path: &Path, xs: &[f64], prims: &[PrimitiveState]) -> Result<()> {
    write_profile(std::fs::File::create(path)?, xs, prims)
}

/// Writes a profile table with cell centres `xs` to any byte sink.
pub fn write_profile(sink: impl Write, xs: &[f64], prims: &[PrimitiveState]) -> Result<()> {
    let m = prims.first().map_or(0, |p| p.z.len());
    let mut out = BufWriter::new(sink);
    writeln!(out, "{}", profile_header(m).join(","))?;
    let mut line = String::new();
    for (x, p) in xs.iter().zip(prims) {
        line.clear();
        line.push_str(&fmt_f64(*x));
        for v in [p.rho, p.u[0], p.p].iter().chain(&p.z).chain(&p.y).chain(&p.rho_k) {
            line.push(',');
            line.push_str(&fmt_f64(*v));
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Writes a 1D field as a profile CSV.
pub fn write_field_csv(path: &Path, field: &FieldSet, eos: &[EosSpec]) -> Result<()> {
    if field.grid.dims != 1 {
        return Err(Error::Config("profile CSV output is for 1D fields".into()));
    }
    let xs: Vec<f64> = (0..field.grid.nx).map(|i| field.grid.cell_center(i, 0)[0]).collect();
    write_profile_csv(path, &xs, &field_primitives(field, eos)?)
}

/// Columns of a CSV file with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.headers.iter().position(|h| h == name).map(|i| self.columns[i].as_slice())
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    /// Number of materials of a profile table.
    pub fn materials(&self) -> usize {
        self.headers.iter().filter(|h| h.starts_with("Z_")).count()
    }

    /// Rebuilds the per-cell primitive states of a profile table.
    pub fn primitives(&self) -> Result<Vec<PrimitiveState>> {
        let m = self.materials();
        let col = |name: &str| {
            self.column(name)
                .ok_or_else(|| Error::Config(format!("profile is missing column {name}")))
        };
        let (rho, u, p) = (col("rho")?, col("u")?, col("p")?);
        let z: Vec<&[f64]> = (1..=m).map(|k| col(&format!("Z_{k}"))).collect::<Result<_>>()?;
        let y: Vec<&[f64]> = (1..=m).map(|k| col(&format!("Y_{k}"))).collect::<Result<_>>()?;
        let rk: Vec<&[f64]> = (1..=m).map(|k| col(&format!("rho_{k}"))).collect::<Result<_>>()?;
        Ok((0..self.rows())
            .map(|i| PrimitiveState {
                rho: rho[i],
                u: [u[i], 0.0],
                p: p[i],
                z: z.iter().map(|c| c[i]).collect(),
                y: y.iter().map(|c| c[i]).collect(),
                rho_k: rk.iter().map(|c| c[i]).collect(),
            })
            .collect())
    }
}

pub fn read_csv_table(path: &Path) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        .iter()
        .map(String::from)
        .collect();
    let mut columns = vec![Vec::new(); headers.len()];
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        for (c, field) in columns.iter_mut().zip(rec.iter()) {
            let v = field.parse::<f64>().map_err(|_| {
                Error::Config(format!("{}: row {}: '{field}' is not a number", path.display(), line + 2))
            })?;
            c.push(v);
        }
    }
    Ok(Table { headers, columns })
}

/// Writes a 2D field as legacy ASCII VTK structured points with point data
/// at the cell centres.
pub fn write_vtk(path: &Path, field: &FieldSet, eos: &[EosSpec], t: f64) -> Result<()> {
    let g = &field.grid;
    let m = field.materials();
    let prims = field_primitives(field, eos)?;
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "multimat t = {}", fmt_f64(t));
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET STRUCTURED_POINTS");
    let _ = writeln!(s, "DIMENSIONS {} {} 1", g.nx, g.ny);
    let _ = writeln!(
        s,
        "ORIGIN {} {} 0",
        fmt_f64(g.origin[0] + 0.5 * g.dx),
        fmt_f64(g.origin[1] + 0.5 * g.dy)
    );
    let _ = writeln!(s, "SPACING {} {} 1", fmt_f64(g.dx), fmt_f64(g.dy));
    let _ = writeln!(s, "POINT_DATA {}", prims.len());
    let mut scalar = |name: &str, f: &dyn Fn(&PrimitiveState) -> f64| {
        let _ = writeln!(s, "SCALARS {name} double 1");
        let _ = writeln!(s, "LOOKUP_TABLE default");
        for p in &prims {
            let _ = writeln!(s, "{}", fmt_f64(f(p)));
        }
    };
    scalar("rho", &|p| p.rho);
    scalar("p", &|p| p.p);
    for k in 0..m {
        scalar(&format!("Z_{}", k + 1), &|p| p.z[k]);
    }
    scalar("material", &|p| p.z.iter().enumerate().map(|(k, z)| (k + 1) as f64 * z).sum());
    let _ = writeln!(s, "VECTORS velocity double");
    for p in &prims {
        let _ = writeln!(s, "{} {} 0", fmt_f64(p.u[0]), fmt_f64(p.u[1]));
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Contents of a structured-points VTK file written by [`write_vtk`].
#[derive(Debug, Clone, PartialEq)]
pub struct VtkData {
    pub dims: [usize; 2],
    pub origin: [f64; 2],
    pub spacing: [f64; 2],
    pub scalars: Vec<(String, Vec<f64>)>,
    pub velocity: Vec<[f64; 2]>,
}

impl VtkData {
    pub fn scalar(&self, name: &str) -> Option<&[f64]> {
        self.scalars.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

pub fn read_vtk(path: &Path) -> Result<VtkData> {
    let text = std::fs::read_to_string(path)?;
    let bad = |msg: &str| Error::Config(format!("{}: {msg}", path.display()));
    let mut lines = text.lines().skip(3);
    let mut dims = [0usize; 2];
    let mut origin = [0.0; 2];
    let mut spacing = [0.0; 2];
    let mut npts = 0usize;
    let nums = |rest: &str| -> Vec<f64> { rest.split_whitespace().filter_map(|t| t.parse().ok()).collect() };
    let mut scalars = Vec::new();
    let mut velocity = Vec::new();
    while let Some(line) = lines.next() {
        let mut parts = line.splitn(2, ' ');
        let key = parts.next().unwrap_or("");
        let rest = parts.next().unwrap_or("");
        match key {
            "DATASET" if rest.trim() != "STRUCTURED_POINTS" => return Err(bad("not structured points")),
            "DIMENSIONS" => {
                let v = nums(rest);
                dims = [v[0] as usize, v[1] as usize];
            }
            "ORIGIN" => {
                let v = nums(rest);
                origin = [v[0], v[1]];
            }
            "SPACING" => {
                let v = nums(rest);
                spacing = [v[0], v[1]];
            }
            "POINT_DATA" => npts = rest.trim().parse().map_err(|_| bad("bad POINT_DATA"))?,
            "SCALARS" => {
                let name = rest.split_whitespace().next().ok_or_else(|| bad("unnamed scalar"))?;
                lines.next();
                let vals: Vec<f64> = (0..npts)
                    .map(|_| lines.next().and_then(|l| l.trim().parse().ok()).ok_or_else(|| bad("short scalar")))
                    .collect::<Result<_>>()?;
                scalars.push((name.to_string(), vals));
            }
            "VECTORS" => {
                for _ in 0..npts {
                    let v = nums(lines.next().ok_or_else(|| bad("short vectors"))?);
                    velocity.push([v[0], v[1]]);
                }
            }
            _ => {}
        }
    }
    Ok(VtkData {
        dims,
        origin,
        spacing,
        scalars,
        velocity,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub index: usize,
    pub t: f64,
    pub step: usize,
    pub file: String,
}

/// Observer writing every snapshot to `dir`: CSV in 1D, VTK in 2D.
pub struct SnapshotWriter {
    pub dir: PathBuf,
    pub eos: Vec<EosSpec>,
    pub written: Vec<SnapshotEntry>,
}

impl SnapshotWriter {
    pub fn new(dir: impl Into<PathBuf>, eos: Vec<EosSpec>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(SnapshotWriter {
            dir,
            eos,
            written: Vec::new(),
        })
    }
}

impl Observer for SnapshotWriter {
    fn snapshot(&mut self, field: &FieldSet, clock: &SimClock) -> Result<()> {
        if self.written.last().is_some_and(|e| e.step == clock.step && clock.step > 0) {
            return Ok(());
        }
        let index = self.written.len();
        let ext = if field.grid.dims == 1 { "csv" } else { "vtk" };
        let file = format!("snapshot_{index:04}.{ext}");
        let path = self.dir.join(&file);
        if field.grid.dims == 1 {
            write_field_csv(&path, field, &self.eos)?;
        } else {
            write_vtk(&path, field, &self.eos, clock.t)?;
        }
        self.written.push(SnapshotEntry {
            index,
            t: clock.t,
            step: clock.step,
            file,
        });
        Ok(())
    }
}

/// Effective solver parameters of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub scheme: String,
    pub cfl: f64,
    pub cells: Vec<usize>,
    pub t_end: f64,
    pub snapshot_every: Option<f64>,
    pub threads: usize,
    pub fix_shock_table: bool,
    pub diffusion_epsilon: f64,
}

/// Summary of a completed run, written as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub case: CaseConfig,
    pub effective: EffectiveParams,
    pub steps: usize,
    pub t_final: f64,
    pub wall_time_s: f64,
    /// Steps shortened by the volume-factor floor.
    pub clipped_steps: usize,
    /// Largest conservation budget error per quantity, relative to the
    /// initial `sum |W|`.
    pub conservation_drift: Vec<(String, f64)>,
    pub z_min: f64,
    pub z_max: f64,
    pub z_sum_err: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub y_sum_err: f64,
    pub snapshots: Vec<SnapshotEntry>,
}

impl Manifest {
    pub fn new(case: CaseConfig, effective: EffectiveParams, summary: &RunSummary, snapshots: Vec<SnapshotEntry>) -> Self {
        let names = conserved_names(case.materials());
        Manifest {
            conservation_drift: names.into_iter().zip(summary.max_drift.iter().copied()).collect(),
            case,
            effective,
            steps: summary.clock.step,
            t_final: summary.clock.t,
            wall_time_s: summary.wall_time.as_secs_f64(),
            clipped_steps: summary.clips,
            z_min: summary.z.z_min,
            z_max: summary.z.z_max,
            z_sum_err: summary.z.sum_err,
            y_min: summary.y.z_min,
            y_max: summary.y.z_max,
            y_sum_err: summary.y.sum_err,
            snapshots,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::{builtin, instantiate};

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, -2.5e9, std::f64::consts::PI, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn profile_csv_round_trip() {
        let mut cfg = builtin("test1").unwrap();
        cfg.cells = vec![20];
        let (field, eos) = instantiate(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        write_field_csv(&path, &field, &eos).unwrap();
        let t = read_csv_table(&path).unwrap();
        assert_eq!(t.headers, profile_header(5));
        assert_eq!(t.headers[..6], ["x", "rho", "u", "p", "Z_1", "Z_2"]);
        assert_eq!(t.rows(), 20);
        let back = t.primitives().unwrap();
        let orig = field_primitives(&field, &eos).unwrap();
        assert_eq!(back, orig);
        assert_eq!(t.column("x").unwrap()[0], 0.025);
    }

    #[test]
    fn vtk_round_trip() {
        let mut cfg = builtin("test4").unwrap();
        cfg.cells = vec![12, 10];
        let (field, eos) = instantiate(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.vtk");
        write_vtk(&path, &field, &eos, 0.5).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# vtk DataFile Version 3.0\n"));
        assert!(text.contains("DIMENSIONS 12 10 1\n"));
        let v = read_vtk(&path).unwrap();
        assert_eq!(v.dims, [12, 10]);
        let names: Vec<&str> = v.scalars.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["rho", "p", "Z_1", "Z_2", "Z_3", "Z_4", "material"]);
        let prims = field_primitives(&field, &eos).unwrap();
        let mat = v.scalar("material").unwrap();
        for (p, m) in prims.iter().zip(mat) {
            let k = p.z.iter().position(|&z| z == 1.0).unwrap();
            assert_eq!(*m, (k + 1) as f64);
        }
        assert_eq!(v.velocity[3], prims[3].u);
        assert_eq!(v.origin, [2.5, 3.0]);
    }

    #[test]
    fn vtk_is_for_2d() {
        let (field, eos) = instantiate(&builtin("test2").unwrap()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        assert!(write_field_csv(&dir.path().join("a.csv"), &field, &eos).is_ok());
        let (f2, e2) = instantiate(&{
            let mut c = builtin("test5").unwrap();
            c.cells = vec![7, 3];
            c
        })
        .unwrap();
        assert!(write_field_csv(&dir.path().join("b.csv"), &f2, &e2).is_err());
    }
}
