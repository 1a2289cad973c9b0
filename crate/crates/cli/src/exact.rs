use anyhow::{Context, Result};

use multimat::io::{write_profile, write_profile_csv};
use multimat::riemann::juxtaposed_for_case;

use crate::args::ExactArgs;

/// Samples the exact solution at the cell centres of the case grid.
pub fn exact(a: &ExactArgs) -> Result<()> {
    let cfg = a.case.resolve()?;
    let t = a.t.unwrap_or(cfg.t_end);
    let reference = juxtaposed_for_case(&cfg)?;
    let grid = cfg.grid()?;
    let xs: Vec<f64> = (0..grid.nx).map(|i| grid.cell_center(i, 0)[0]).collect();
    let prims = reference
        .profile(&xs, t, cfg.materials())
        .with_context(|| format!("exact solution of {} at t = {t}", cfg.name))?;
    match &a.out {
        Some(path) => {
            write_profile_csv(path, &xs, &prims).with_context(|| format!("writing {}", path.display()))?;
            eprintln!(
                "D1 {:.6} D2 {:.6} t_shock {:.6e}; wrote {}",
                reference.d1(),
                reference.d2(),
                reference.t_shock,
                path.display()
            );
        }
        None => write_profile(std::io::stdout().lock(), &xs, &prims)?,
    }
    Ok(())
}
