use std::path::Path;

use anyhow::{bail, ensure, Context, Result};

use multimat::cases::CaseConfig;
use multimat::diagnostics::{conserved_names, diffusion_cells, profile_errors, MetricSeries, PermutationDiff};
use multimat::io::{read_csv_table, read_vtk, Manifest};
use multimat::riemann::{juxtaposed_for_case, REFERENCE_SAMPLES};
use multimat::state::{conserved_from_primitive, PrimitiveState};

use crate::args::MetricsArgs;

/// One stored snapshot. 2D files carry no mass fractions or phasic
/// densities, so `y` and `rho_k` of their states are empty.
struct Snapshot {
    t: f64,
    x: Vec<f64>,
    cells: Vec<PrimitiveState>,
}

fn load_snapshot(dir: &Path, file: &str, t: f64, m: usize) -> Result<Snapshot> {
    let path = dir.join(file);
    if file.ends_with(".csv") {
        let table = read_csv_table(&path)?;
        ensure!(table.materials() == m, "{} has {} materials, expected {m}", path.display(), table.materials());
        let x = table.column("x").context("profile has no x column")?.to_vec();
        return Ok(Snapshot {
            t,
            x,
            cells: table.primitives()?,
        });
    }
    let vtk = read_vtk(&path)?;
    let col = |name: &str| {
        vtk.scalar(name)
            .with_context(|| format!("{} has no {name} field", path.display()))
    };
    let (rho, p) = (col("rho")?, col("p")?);
    let z: Vec<&[f64]> = (1..=m).map(|k| col(&format!("Z_{k}"))).collect::<Result<_>>()?;
    let cells = (0..rho.len())
        .map(|i| PrimitiveState {
            rho: rho[i],
            u: vtk.velocity[i],
            p: p[i],
            z: z.iter().map(|c| c[i]).collect(),
            y: Vec::new(),
            rho_k: Vec::new(),
        })
        .collect();
    Ok(Snapshot {
        t,
        x: Vec::new(),
        cells,
    })
}

fn load_run(dir: &Path) -> Result<(Manifest, Vec<Snapshot>)> {
    let manifest = Manifest::read(&dir.join("manifest.json"))
        .with_context(|| format!("{} is not a run directory", dir.display()))?;
    let m = manifest.case.materials();
    let snaps = manifest
        .snapshots
        .iter()
        .map(|e| load_snapshot(dir, &e.file, e.t, m))
        .collect::<Result<_>>()?;
    Ok((manifest, snaps))
}

fn simplex_row(values: impl Iterator<Item = Vec<f64>>) -> [f64; 3] {
    let (mut lo, mut hi, mut err) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for v in values {
        for &x in &v {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        err = err.max((v.iter().sum::<f64>() - 1.0).abs());
    }
    [lo, hi, err]
}

fn totals_row(case: &CaseConfig, snap: &Snapshot, full: bool) -> Result<Vec<f64>> {
    let vol = case.grid()?.cell_volume();
    if !full {
        let mut t = [0.0; 3];
        for c in &snap.cells {
            t[0] += c.rho * vol;
            t[1] += c.rho * c.u[0] * vol;
            t[2] += c.rho * c.u[1] * vol;
        }
        return Ok(t.to_vec());
    }
    let eos = case.eos_specs()?;
    let mut t = vec![0.0; 3 + case.materials()];
    for c in &snap.cells {
        let w = conserved_from_primitive(c, &eos)?;
        let values = w.mom.iter().chain([&w.energy]).chain(&w.partial_mass);
        for (s, v) in t.iter_mut().zip(values) {
            *s += v * vol;
        }
    }
    Ok(t)
}

pub fn metrics(a: &MetricsArgs) -> Result<()> {
    let (manifest, snaps) = load_run(&a.dir)?;
    let case = &manifest.case;
    let m = case.materials();
    let full = case.dims() == 1;
    let out = a.out.clone().unwrap_or_else(|| a.dir.join("metrics"));
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;

    let zk = |prefix: &str| (1..=m).map(|k| format!("{prefix}_{k}")).collect::<Vec<_>>();
    let mut diffusion = MetricSeries::new("diffusion", zk("Z"));
    let mut simplex_cols: Vec<String> = ["z_min", "z_max", "z_sum_err"].map(String::from).to_vec();
    if full {
        simplex_cols.extend(["y_min", "y_max", "y_sum_err"].map(String::from));
    }
    let mut simplex = MetricSeries::new("simplex", simplex_cols);
    let total_cols = if full {
        conserved_names(m)
    } else {
        ["mass", "mom_x", "mom_y"].map(String::from).to_vec()
    };
    let mut totals = MetricSeries::new("totals", total_cols);
    let reference = if full { juxtaposed_for_case(case).ok() } else { None };
    let dx = (case.hi[0] - case.lo[0]) / case.cells[0] as f64;
    let mut errors = reference.as_ref().map(|_| {
        let mut cols: Vec<String> = ["rho", "p", "u"].map(String::from).to_vec();
        cols.extend(zk("Z"));
        cols.extend(zk("Y"));
        MetricSeries::new("exact_errors", cols)
    });

    for s in &snaps {
        let z = |k: usize| s.cells.iter().map(|c| c.z[k]).collect::<Vec<_>>();
        diffusion.push(s.t, (0..m).map(|k| diffusion_cells(&z(k), a.epsilon)).collect())?;
        let mut row = simplex_row(s.cells.iter().map(|c| c.z.clone())).to_vec();
        if full {
            row.extend(simplex_row(s.cells.iter().map(|c| c.y.clone())));
        }
        simplex.push(s.t, row)?;
        totals.push(s.t, totals_row(case, s, full)?)?;
        if let (Some(ex), Some(series)) = (&reference, errors.as_mut()) {
            if s.t <= ex.window_end {
                let exact = ex.cell_averages(&s.x, dx, s.t, m, REFERENCE_SAMPLES)?;
                series.push(s.t, profile_errors(&s.cells, &exact)?.into_iter().map(|(_, e)| e).collect())?;
            }
        }
    }
    let mut written = vec![&diffusion, &simplex, &totals];
    if let Some(e) = &errors {
        written.push(e);
    }
    for series in &written {
        series.write_csv(&out.join(format!("{}.csv", series.name)))?;
    }

    let peaks: Vec<String> = (0..m)
        .map(|k| format!("Z_{} {:.2}%", k + 1, diffusion.column_max(k)))
        .collect();
    println!("{} snapshots of case {}", snaps.len(), case.name);
    println!("max diffusion cells: {}", peaks.join(", "));
    if let Some(e) = &errors {
        if let (Some(t), Some(row)) = (e.times.last(), e.rows.last()) {
            let listed: Vec<String> = e.columns.iter().zip(row).map(|(c, v)| format!("{c} {v:.3e}")).collect();
            println!("L1 error at t = {t}: {}", listed.join(" "));
        }
    }

    if let (Some(other), Some(sigma)) = (&a.against, &a.sigma) {
        let series = permutation(&snaps, other, sigma, m, full)?;
        series.write_csv(&out.join("permutation.csv"))?;
        let worst: Vec<String> = series
            .columns
            .iter()
            .enumerate()
            .map(|(c, name)| format!("{name} {:.2e}", series.column_max(c)))
            .collect();
        println!("ordering differences: {}", worst.join(" "));
    }
    println!("wrote metrics to {}", out.display());
    Ok(())
}

fn permutation(snaps: &[Snapshot], other: &Path, sigma: &[usize], m: usize, full: bool) -> Result<MetricSeries> {
    ensure!(full, "ordering differences need 1D runs with mass fractions");
    let mut seen = sigma.to_vec();
    seen.sort_unstable();
    if seen != (1..=m).collect::<Vec<_>>() {
        bail!("--sigma must be a permutation of 1..={m}");
    }
    let (_, theirs) = load_run(other)?;
    ensure!(
        theirs.len() == snaps.len(),
        "runs have {} and {} snapshots",
        snaps.len(),
        theirs.len()
    );
    let mut cols: Vec<String> = ["e1_rho", "e1_p", "e1_u"].map(String::from).to_vec();
    cols.extend((1..=m).map(|k| format!("e2_Z_{k}")));
    cols.extend((1..=m).map(|k| format!("e2_Y_{k}")));
    let mut series = MetricSeries::new("permutation", cols);
    for (a, b) in snaps.iter().zip(&theirs) {
        ensure!(
            (a.t - b.t).abs() <= 1e-12 * a.t.abs().max(1.0),
            "snapshot times differ: {} and {}",
            a.t,
            b.t
        );
        let mut d = PermutationDiff::new(m);
        d.accumulate(&a.cells, &b.cells, sigma)?;
        series.push(a.t, d.e1.iter().chain(&d.e2_z).chain(&d.e2_y).copied().collect())?;
    }
    Ok(series)
}
