//! Run metrics: diffusion-cell counts, L1 errors and convergence rates,
//! conservation budgets and material-ordering differences.

use std::io::Write;
use std::path::Path;

use crate::eos::EosSpec;
use crate::error::{Error, Result};
use crate::remap::SimplexStats;
use crate::solver::{budget_drift, Observer, SimClock, StepReport};
use crate::state::{FieldSet, PrimitiveState, PARTIAL};

/// Threshold below which a color function counts as absent.
pub const DIFFUSION_EPSILON: f64 = 1e-6;

/// Percentage of cells where `eps <= z <= 1 - eps`.
pub fn diffusion_cells(z: &[f64], eps: f64) -> f64 {
    if z.is_empty() {
        return 0.0;
    }
    let n = z.iter().filter(|&&v| eps <= v && v <= 1.0 - eps).count();
    100.0 * n as f64 / z.len() as f64
}

/// Relative L1 distance `sum |a - b| / sum |b|`; the absolute distance when
/// the reference vanishes.
pub fn l1_error(numeric: &[f64], reference: &[f64]) -> Result<f64> {
    if numeric.len() != reference.len() {
        return Err(Error::Config(format!(
            "L1 error of fields with {} and {} values",
            numeric.len(),
            reference.len()
        )));
    }
    let diff: f64 = numeric.iter().zip(reference).map(|(a, b)| (a - b).abs()).sum();
    let norm: f64 = reference.iter().map(|b| b.abs()).sum();
    Ok(if norm > 0.0 { diff / norm } else { diff / numeric.len().max(1) as f64 })
}

/// Mean of `|v - c|` over the cells, relative to `|c|`.
pub fn l1_deviation(values: &[f64], c: f64) -> f64 {
    let s: f64 = values.iter().map(|v| (v - c).abs()).sum();
    s / (values.len().max(1) as f64 * if c != 0.0 { c.abs() } else { 1.0 })
}

/// Mean Euclidean distance of a vector field to the constant `c`,
/// relative to `|c|`.
pub fn l1_vector_deviation(values: &[[f64; 2]], c: [f64; 2]) -> f64 {
    let norm = c[0].hypot(c[1]);
    let s: f64 = values.iter().map(|v| (v[0] - c[0]).hypot(v[1] - c[1])).sum();
    s / (values.len().max(1) as f64 * if norm > 0.0 { norm } else { 1.0 })
}

/// Least-squares slope of `log(error)` against `log(dx)`.
pub fn convergence_rate(dx: &[f64], errors: &[f64]) -> Result<f64> {
    if dx.len() != errors.len() {
        return Err(Error::Config("mesh sizes and errors differ in length".into()));
    }
    if dx.len() < 3 {
        return Err(Error::Config(format!(
            "a convergence rate needs at least 3 meshes, got {}",
            dx.len()
        )));
    }
    if dx.iter().chain(errors).any(|v| !(*v > 0.0)) {
        return Err(Error::Config("convergence rates need positive mesh sizes and errors".into()));
    }
    let xs: Vec<f64> = dx.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Named profile columns of a 1D snapshot, in output order:
/// `rho, u, p, Z_1.., Y_1..`.
pub fn profile_columns(prims: &[PrimitiveState]) -> Vec<(String, Vec<f64>)> {
    let m = prims.first().map_or(0, |p| p.z.len());
    let mut cols = vec![
        ("rho".to_string(), prims.iter().map(|p| p.rho).collect()),
        ("u".to_string(), prims.iter().map(|p| p.u[0]).collect()),
        ("p".to_string(), prims.iter().map(|p| p.p).collect()),
    ];
    for k in 0..m {
        cols.push((format!("Z_{}", k + 1), prims.iter().map(|p| p.z[k]).collect()));
    }
    for k in 0..m {
        cols.push((format!("Y_{}", k + 1), prims.iter().map(|p| p.y[k]).collect()));
    }
    cols
}

/// Relative L1 error ([`l1_error`]) of every profile column, in the order
/// `rho, p, u, Z_.., Y_..`.
pub fn profile_errors(numeric: &[PrimitiveState], reference: &[PrimitiveState]) -> Result<Vec<(String, f64)>> {
    let (num, refc) = (profile_columns(numeric), profile_columns(reference));
    let order = [0, 2, 1].into_iter().chain(3..num.len());
    order
        .map(|c| Ok((num[c].0.clone(), l1_error(&num[c].1, &refc[c].1)?)))
        .collect()
}

/// Primitive state of every interior cell, row by row.
pub fn field_primitives(field: &FieldSet, eos: &[EosSpec]) -> Result<Vec<PrimitiveState>> {
    let mut out = Vec::with_capacity(field.grid.n_cells());
    for j in 0..field.grid.ny {
        for i in 0..field.grid.nx {
            out.push(field.primitive(i, j, eos)?);
        }
    }
    Ok(out)
}

/// Largest differences between two runs whose materials are numbered
/// differently.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationDiff {
    /// `e1` for `rho`, `p`, `u`.
    pub e1: [f64; 3],
    /// `e2` for each `Z_k`.
    pub e2_z: Vec<f64>,
    /// `e2` for each `Y_k`.
    pub e2_y: Vec<f64>,
}

impl PermutationDiff {
    pub fn new(m: usize) -> Self {
        PermutationDiff {
            e1: [0.0; 3],
            e2_z: vec![0.0; m],
            e2_y: vec![0.0; m],
        }
    }

    /// Folds one pair of snapshots into the maxima. `sigma` maps material
    /// `k` of run `a` to material `sigma[k]` of run `b` (1-based).
    pub fn accumulate(&mut self, a: &[PrimitiveState], b: &[PrimitiveState], sigma: &[usize]) -> Result<()> {
        if a.len() != b.len() {
            return Err(Error::Config("compared snapshots have different sizes".into()));
        }
        let rel = |x: f64, y: f64| {
            let s = x + y;
            if s == 0.0 {
                0.0
            } else {
                ((x - y) / s).abs()
            }
        };
        for (pa, pb) in a.iter().zip(b) {
            for (e, (x, y)) in self
                .e1
                .iter_mut()
                .zip([(pa.rho, pb.rho), (pa.p, pb.p), (pa.u[0], pb.u[0])])
            {
                *e = e.max(rel(x, y));
            }
            for (k, &s) in sigma.iter().enumerate() {
                self.e2_z[k] = self.e2_z[k].max((pa.z[k] - pb.z[s - 1]).abs());
                self.e2_y[k] = self.e2_y[k].max((pa.y[k] - pb.y[s - 1]).abs());
            }
        }
        Ok(())
    }

    pub fn max(&self) -> f64 {
        self.e1.iter().chain(&self.e2_z).chain(&self.e2_y).fold(0.0, |a, b| a.max(*b))
    }
}

/// `e1` and `e2` over matching snapshot sequences.
pub fn permutation_diff(
    a: &[Vec<PrimitiveState>],
    b: &[Vec<PrimitiveState>],
    sigma: &[usize],
) -> Result<PermutationDiff> {
    if a.len() != b.len() {
        return Err(Error::Config(format!(
            "runs have {} and {} snapshots",
            a.len(),
            b.len()
        )));
    }
    let m = sigma.len();
    let mut d = PermutationDiff::new(m);
    for (sa, sb) in a.iter().zip(b) {
        d.accumulate(sa, sb, sigma)?;
    }
    Ok(d)
}

/// Time series of one metric with named value columns.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub name: String,
    pub columns: Vec<String>,
    pub times: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

impl MetricSeries {
    pub fn new(name: impl Into<String>, columns: Vec<String>) -> Self {
        MetricSeries {
            name: name.into(),
            columns,
            times: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Appends a row; times must increase strictly.
    pub fn push(&mut self, t: f64, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Config(format!(
                "metric {} expects {} values, got {}",
                self.name,
                self.columns.len(),
                row.len()
            )));
        }
        if self.times.last().is_some_and(|&last| !(t > last)) {
            return Err(Error::Config(format!(
                "metric {}: time {t} does not follow {}",
                self.name,
                self.times.last().unwrap()
            )));
        }
        self.times.push(t);
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest value of column `c` over the series.
    pub fn column_max(&self, c: usize) -> f64 {
        self.rows.iter().map(|r| r[c]).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        write!(out, "t")?;
        for c in &self.columns {
            write!(out, ",{c}")?;
        }
        writeln!(out)?;
        for (t, row) in self.times.iter().zip(&self.rows) {
            write!(out, "{}", crate::io::fmt_f64(*t))?;
            for v in row {
                write!(out, ",{}", crate::io::fmt_f64(*v))?;
            }
            writeln!(out)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Names of the conserved totals `[rho u, rho v, rho E, rho_k Z_k ..]`.
pub fn conserved_names(m: usize) -> Vec<String> {
    let mut v = vec!["mom_x".to_string(), "mom_y".to_string(), "energy".to_string()];
    v.extend((1..=m).map(|k| format!("mass_{k}")));
    v
}

/// Observer recording diffusion cells, conservation budget and simplex
/// extremes after every step.
#[derive(Debug, Clone)]
pub struct MetricsRecorder {
    pub epsilon: f64,
    pub diffusion: MetricSeries,
    pub conservation: MetricSeries,
    pub simplex: MetricSeries,
    initial: Vec<f64>,
    scale: Vec<f64>,
    outflow: Vec<f64>,
}

impl MetricsRecorder {
    pub fn new(field: &FieldSet, epsilon: f64) -> Self {
        let m = field.materials();
        let mut diffusion = MetricSeries::new("diffusion", (1..=m).map(|k| format!("Z_{k}")).collect());
        let conservation = MetricSeries::new("conservation", conserved_names(m));
        let simplex = MetricSeries::new(
            "simplex",
            ["z_min", "z_max", "z_sum_err", "y_min", "y_max", "y_sum_err"]
                .map(String::from)
                .to_vec(),
        );
        let initial = field.totals();
        let mut scale = vec![0.0; initial.len()];
        for w in field.interior_cells() {
            for (s, v) in scale.iter_mut().zip(&w[..PARTIAL + m]) {
                *s += v.abs();
            }
        }
        let vol = field.grid.cell_volume();
        scale.iter_mut().for_each(|s| *s *= vol);
        diffusion
            .push(0.0, diffusion_row(field, epsilon))
            .expect("first row");
        let outflow = vec![0.0; initial.len()];
        MetricsRecorder {
            epsilon,
            diffusion,
            conservation,
            simplex,
            initial,
            scale,
            outflow,
        }
    }

    /// Writes `diffusion.csv`, `conservation.csv` and `simplex.csv`.
    pub fn write_all(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for s in [&self.diffusion, &self.conservation, &self.simplex] {
            s.write_csv(&dir.join(format!("{}.csv", s.name)))?;
        }
        Ok(())
    }

    /// Largest simplex violation seen so far, as `(z, y)` extremes.
    pub fn simplex_extremes(&self) -> (SimplexStats, SimplexStats) {
        let mut z = SimplexStats::default();
        let mut y = SimplexStats::default();
        for r in &self.simplex.rows {
            z = z.merge(SimplexStats {
                z_min: r[0],
                z_max: r[1],
                sum_err: r[2],
            });
            y = y.merge(SimplexStats {
                z_min: r[3],
                z_max: r[4],
                sum_err: r[5],
            });
        }
        (z, y)
    }
}

fn diffusion_row(field: &FieldSet, eps: f64) -> Vec<f64> {
    (0..field.materials())
        .map(|k| diffusion_cells(&field.color_field(k), eps))
        .collect()
}

impl Observer for MetricsRecorder {
    fn after_step(&mut self, field: &FieldSet, report: &StepReport, clock: &SimClock) -> Result<()> {
        for (o, v) in self.outflow.iter_mut().zip(&report.boundary_outflow) {
            *o += v;
        }
        let t = clock.t;
        self.diffusion.push(t, diffusion_row(field, self.epsilon))?;
        self.conservation
            .push(t, budget_drift(&self.initial, &field.totals(), &self.outflow, &self.scale))?;
        let (z, y) = (report.z, report.y);
        self.simplex
            .push(t, vec![z.z_min, z.z_max, z.sum_err, y.z_min, y.z_max, y.sum_err])?;
        Ok(())
    }
}

/// Rightmost position where `p` crosses `level`, interpolated linearly
/// between cell centres. For a shock between known `p_ahead` and
/// `p_behind`, use the midpoint level.
pub fn crossing_position(x: &[f64], p: &[f64], level: f64) -> Option<f64> {
    (0..p.len().saturating_sub(1)).rev().find_map(|k| {
        let (a, b) = (p[k] - level, p[k + 1] - level);
        (a * b <= 0.0 && p[k] != p[k + 1]).then(|| x[k] + (level - p[k]) / (p[k + 1] - p[k]) * (x[k + 1] - x[k]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn diffusion_counts() {
        let mut z = vec![0.0; 100];
        z[50..].iter_mut().for_each(|v| *v = 1.0);
        assert_eq!(diffusion_cells(&z, DIFFUSION_EPSILON), 0.0);
        z[10] = 0.5;
        assert_eq!(diffusion_cells(&z, DIFFUSION_EPSILON), 1.0);
        z[11] = 1e-7;
        z[12] = 1.0 - 1e-7;
        z[13] = 1e-6;
        assert_eq!(diffusion_cells(&z, DIFFUSION_EPSILON), 2.0);
        assert_eq!(diffusion_cells(&[], DIFFUSION_EPSILON), 0.0);
    }

    proptest! {
        #[test]
        fn sharpening_never_adds_diffusion_cells(raw in prop::collection::vec(0.0f64..=1.0, 1..64), s in 0.0f64..1.0) {
            // move each value a fraction s of the way to the nearer of 0 and 1
            let sharp: Vec<f64> = raw.iter().map(|&z| if z < 0.5 { z * (1.0 - s) } else { z + (1.0 - z) * s }).collect();
            prop_assert!(diffusion_cells(&sharp, DIFFUSION_EPSILON) <= diffusion_cells(&raw, DIFFUSION_EPSILON));
        }

        #[test]
        fn metrics_are_reproducible(a in prop::collection::vec(0.1f64..10.0, 3..32)) {
            let b: Vec<f64> = a.iter().map(|v| v * 1.01).collect();
            prop_assert_eq!(l1_error(&a, &b).unwrap().to_bits(), l1_error(&a, &b).unwrap().to_bits());
            prop_assert_eq!(diffusion_cells(&a, 1e-6).to_bits(), diffusion_cells(&a, 1e-6).to_bits());
        }
    }

    #[test]
    fn l1_of_identical_fields_is_zero() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(l1_error(&a, &a).unwrap(), 0.0);
        assert_relative_eq!(l1_error(&[1.0, 2.0, 4.0], &a).unwrap(), 1.0 / 6.0);
        assert!(l1_error(&a, &a[..2]).is_err());
        assert_eq!(l1_deviation(&[1.0, 1.0], 1.0), 0.0);
        assert_relative_eq!(l1_deviation(&[1.1, 0.9], 1.0), 0.1, max_relative = 1e-12);
        assert_relative_eq!(l1_vector_deviation(&[[3.0, 4.0]], [0.0, 0.0]), 5.0);
    }

    #[test]
    fn convergence_rate_of_power_laws() {
        let dx = [0.1, 0.05, 0.02, 0.01];
        for order in [0.5, 1.0, 2.0] {
            let e: Vec<f64> = dx.iter().map(|h: &f64| 3.0 * h.powf(order)).collect();
            assert_relative_eq!(convergence_rate(&dx, &e).unwrap(), order, max_relative = 1e-12);
        }
        assert!(convergence_rate(&dx[..2], &[1.0, 0.5]).is_err());
        assert!(convergence_rate(&dx[..3], &[1.0, 0.0, 0.5]).is_err());
    }

    fn prim(p: f64, u: f64, z: Vec<f64>, rho_k: Vec<f64>) -> PrimitiveState {
        PrimitiveState::from_phases(z, rho_k, [u, 0.0], p)
    }

    #[test]
    fn permutation_diff_single_cell() {
        let a = prim(2.0, 1.0, vec![0.25, 0.75], vec![1.0, 3.0]);
        let b = prim(2.2, 1.0, vec![0.75, 0.2], vec![2.9, 1.0]);
        let sigma = [2, 1];
        let d = permutation_diff(&[vec![a.clone()]], &[vec![b.clone()]], &sigma).unwrap();
        assert_relative_eq!(d.e1[0], ((a.rho - b.rho) / (a.rho + b.rho)).abs());
        assert_relative_eq!(d.e1[1], 0.2 / 4.2);
        assert_eq!(d.e1[2], 0.0);
        assert_relative_eq!(d.e2_z[0], 0.05, max_relative = 1e-12);
        assert_relative_eq!(d.e2_z[1], 0.0);
        assert_relative_eq!(d.e2_y[0], (a.y[0] - b.y[1]).abs());
    }

    #[test]
    fn permutation_diff_identical_runs() {
        let a = prim(1.0, 0.0, vec![1.0, 0.0], vec![1.0, 0.0]);
        let z = prim(0.0, 0.0, vec![1.0, 0.0], vec![1.0, 0.0]);
        let d = permutation_diff(&[vec![a.clone(), z.clone()]], &[vec![a, z]], &[1, 2]).unwrap();
        assert_eq!(d.max(), 0.0);
    }

    #[test]
    fn metric_series_requires_increasing_time() {
        let mut s = MetricSeries::new("x", vec!["a".into()]);
        s.push(0.0, vec![1.0]).unwrap();
        assert!(s.push(0.0, vec![1.0]).is_err());
        assert!(s.push(1.0, vec![1.0, 2.0]).is_err());
        s.push(1.0, vec![3.0]).unwrap();
        assert_eq!(s.column_max(0), 3.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        s.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next(), Some("t,a"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn crossing_of_a_ramp() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let p = [5.0, 5.0, 5.0, 5.0, 4.0, 2.0, 1.0, 1.0, 1.0, 1.0];
        // midpoint 3 lies between x = 4 (p = 4) and x = 5 (p = 2)
        assert_relative_eq!(crossing_position(&x, &p, 3.0).unwrap(), 4.5);
        assert_eq!(crossing_position(&x, &[1.0; 10], 3.0), None);
    }
}
