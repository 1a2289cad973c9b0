use std::path::PathBuf;

use anyhow::{Context, Result};

use multimat::cases::instantiate;
use multimat::diagnostics::MetricsRecorder;
use multimat::io::{EffectiveParams, Manifest, SnapshotWriter};
use multimat::solver::{run as simulate, RunOptions, SolverConfig};

use crate::args::RunArgs;

pub fn run(a: &RunArgs) -> Result<()> {
    let mut cfg = a.case.resolve()?;
    if let Some(every) = a.snapshot_every {
        anyhow::ensure!(every > 0.0, "--snapshot-every must be positive (got {every})");
        cfg.snapshot_every = Some(every);
    }
    let out = a
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
    cfg.output = Some(out.clone());

    let (mut field, eos) = instantiate(&cfg)?;
    let mut snapshots = SnapshotWriter::new(&out, eos.clone())
        .with_context(|| format!("creating output directory {}", out.display()))?;
    let mut metrics = MetricsRecorder::new(&field, a.epsilon);
    let opts = RunOptions {
        t_end: cfg.t_end,
        snapshot_every: cfg.snapshot_every,
        progress_every: a.progress,
        max_steps: None,
    };
    let solver = SolverConfig::new(cfg.scheme, cfg.cfl);
    let summary = simulate(&mut field, &eos, &solver, &opts, &mut [&mut snapshots, &mut metrics])
        .with_context(|| format!("case {}", cfg.name))?;
    metrics.write_all(&out)?;

    let effective = EffectiveParams {
        scheme: cfg.scheme.to_string(),
        cfl: cfg.cfl,
        cells: cfg.cells.clone(),
        t_end: cfg.t_end,
        snapshot_every: cfg.snapshot_every,
        threads: rayon::current_num_threads(),
        fix_shock_table: a.case.fix_shock_table,
        diffusion_epsilon: a.epsilon,
    };
    let name = cfg.name.clone();
    let manifest = Manifest::new(cfg, effective, &summary, snapshots.written);
    manifest.write(&out.join("manifest.json"))?;

    println!("case {name}: {} steps to t = {}, {:.2} s wall", manifest.steps, manifest.t_final, manifest.wall_time_s);
    let d = &metrics.diffusion;
    let peaks: Vec<String> = (0..d.columns.len())
        .map(|k| format!("{} {:.2}%", d.columns[k], d.column_max(k)))
        .collect();
    println!("max diffusion cells: {}", peaks.join(", "));
    let drift = manifest.conservation_drift.iter().fold(0.0f64, |acc, (_, v)| acc.max(*v));
    println!(
        "conservation drift {drift:.3e}; Z in [{:.3e}, {:.3e}], |sum Z - 1| {:.3e}",
        manifest.z_min, manifest.z_max, manifest.z_sum_err
    );
    if manifest.clipped_steps > 0 {
        println!("{} steps shortened to keep volume factors positive", manifest.clipped_steps);
    }
    println!("wrote {} snapshots to {}", manifest.snapshots.len(), out.display());
    Ok(())
}
