use std::path::Path;

use anyhow::{ensure, Context, Result};

use multimat::cases::{instantiate, CaseConfig};
use multimat::diagnostics::{convergence_rate, field_primitives, profile_errors};
use multimat::io::fmt_f64;
use multimat::remap::Scheme;
use multimat::riemann::{juxtaposed_for_case, REFERENCE_SAMPLES};
use multimat::solver::{run, RunOptions, SolverConfig};

use crate::args::{load_case, ConvergenceArgs};

/// L1 errors of one scheme on every mesh of the family.
struct Family {
    scheme: Scheme,
    columns: Vec<String>,
    dx: Vec<f64>,
    /// `errors[mesh][column]`
    errors: Vec<Vec<f64>>,
}

impl Family {
    fn rates(&self) -> Result<Vec<f64>> {
        (0..self.columns.len())
            .map(|c| {
                let e: Vec<f64> = self.errors.iter().map(|row| row[c]).collect();
                Ok(convergence_rate(&self.dx, &e)?)
            })
            .collect()
    }

    fn write_csv(&self, cells: &[usize], path: &Path) -> Result<()> {
        let mut text = format!("cells,dx,{}\n", self.columns.join(","));
        for ((n, dx), row) in cells.iter().zip(&self.dx).zip(&self.errors) {
            let values: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            text.push_str(&format!("{n},{},{}\n", fmt_f64(*dx), values.join(",")));
        }
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

fn family(base: &CaseConfig, scheme: Scheme, cells: &[usize]) -> Result<Family> {
    let exact = juxtaposed_for_case(base)?;
    let mut out = Family {
        scheme,
        columns: Vec::new(),
        dx: Vec::new(),
        errors: Vec::new(),
    };
    for &n in cells {
        let mut cfg = base.clone();
        cfg.cells = vec![n];
        cfg.validate()?;
        let (mut field, eos) = instantiate(&cfg)?;
        let opts = RunOptions {
            t_end: cfg.t_end,
            ..Default::default()
        };
        let summary = run(&mut field, &eos, &SolverConfig::new(scheme, cfg.cfl), &opts, &mut [])
            .with_context(|| format!("{scheme} on {n} cells"))?;
        let xs: Vec<f64> = (0..n).map(|i| field.grid.cell_center(i, 0)[0]).collect();
        let reference = exact.cell_averages(&xs, field.grid.dx, cfg.t_end, cfg.materials(), REFERENCE_SAMPLES)?;
        let errors = profile_errors(&field_primitives(&field, &eos)?, &reference)?;
        eprintln!("{scheme:>13} {n:>6} cells: {} steps", summary.clock.step);
        out.columns = errors.iter().map(|(c, _)| c.clone()).collect();
        out.dx.push(field.grid.dx);
        out.errors.push(errors.into_iter().map(|(_, e)| e).collect());
    }
    Ok(out)
}

pub fn convergence(a: &ConvergenceArgs) -> Result<()> {
    let mut base = if a.config.is_some() {
        load_case(None, a.config.as_ref(), false)?
    } else {
        load_case(Some(&a.case), None, false)?
    };
    if let Some(c) = a.cfl {
        base.cfl = c;
    }
    if let Some(t) = a.t_end {
        base.t_end = t;
    }
    base.validate()?;
    ensure!(a.cells.len() >= 3, "a convergence rate needs at least 3 meshes");
    let schemes = match a.scheme {
        Some(s) => vec![s],
        None => vec![Scheme::Upwind, Scheme::AntiDiffusive],
    };
    let families: Vec<Family> = schemes
        .iter()
        .map(|&s| family(&base, s, &a.cells))
        .collect::<Result<_>>()?;
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for f in &families {
            f.write_csv(&a.cells, &dir.join(format!("convergence_{}.csv", f.scheme)))?;
        }
    }

    let rates: Vec<Vec<f64>> = families.iter().map(Family::rates).collect::<Result<_>>()?;
    println!("Convergence rates of {} on {:?} cells at t = {}", base.name, a.cells, base.t_end);
    let mut header = format!("{:<10}", "variable");
    for f in &families {
        header.push_str(&format!("{:>15}", f.scheme.to_string()));
    }
    println!("{header}");
    for (c, name) in families[0].columns.iter().enumerate() {
        let mut line = format!("{name:<10}");
        for r in &rates {
            line.push_str(&format!("{:>15.3}", r[c]));
        }
        println!("{line}");
    }
    Ok(())
}
