use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use multimat::cases::{builtin_with, CaseConfig};
use multimat::diagnostics::DIFFUSION_EPSILON;
use multimat::remap::Scheme;

#[derive(Debug, Parser)]
#[command(name = "multimat", version, about = "Anti-diffusive Lagrange-Remap solver for m-material compressible flows")]
pub struct Cli {
    /// Worker threads for the solver.
    #[arg(long, global = true, env = "MULTIMAT_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a case and write snapshots, metrics and a manifest.
    Run(RunArgs),
    /// Write the exact reference profile of a juxtaposed Riemann case.
    Exact(ExactArgs),
    /// Recompute metrics from the snapshots of a finished run.
    Metrics(MetricsArgs),
    /// Run a case on a family of meshes and report L1 convergence rates.
    Convergence(ConvergenceArgs),
    /// List the built-in cases, or print one as TOML.
    Cases(CasesArgs),
}

/// Where the case comes from and which of its parameters to override.
#[derive(Debug, Args, Clone)]
pub struct CaseArgs {
    /// Built-in case id (see `multimat cases`).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub case: Option<String>,

    /// TOML case file.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// `upwind` or `antidiffusive`; defaults to the case setting.
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<Scheme>,

    /// Cells per direction. A single value on a 2D case keeps the aspect ratio.
    #[arg(long, value_delimiter = ',')]
    pub cells: Option<Vec<usize>>,

    /// CFL number in (0, 1].
    #[arg(long)]
    pub cfl: Option<f64>,

    /// Final simulated time.
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,

    /// Use Rankine-Hugoniot consistent air states in test6.
    #[arg(long)]
    pub fix_shock_table: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub case: CaseArgs,

    /// Output directory; defaults to the case's `output` or `out/<name>`.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Simulated time between snapshots.
    #[arg(long = "snapshot-every")]
    pub snapshot_every: Option<f64>,

    /// Color-function threshold of the diffusion-cell count.
    #[arg(long, default_value_t = DIFFUSION_EPSILON)]
    pub epsilon: f64,

    /// Print a progress line every N steps.
    #[arg(long, value_name = "N")]
    pub progress: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub case: CaseArgs,

    /// Sampling time; defaults to the case end time.
    #[arg(long)]
    pub t: Option<f64>,

    /// Output CSV file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Run directory holding `manifest.json`.
    pub dir: PathBuf,

    /// Output directory; defaults to `<dir>/metrics`.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Color-function threshold of the diffusion-cell count.
    #[arg(long, default_value_t = DIFFUSION_EPSILON)]
    pub epsilon: f64,

    /// Second run of the same case with its materials renumbered.
    #[arg(long, requires = "sigma")]
    pub against: Option<PathBuf>,

    /// 1-based map from the materials of `dir` to those of `--against`.
    #[arg(long, value_delimiter = ',')]
    pub sigma: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long, default_value = "test2")]
    pub case: String,

    /// TOML case file instead of a built-in.
    #[arg(long, conflicts_with = "case")]
    pub config: Option<PathBuf>,

    /// Only this scheme; both when omitted.
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<Scheme>,

    /// Mesh family.
    #[arg(long, value_delimiter = ',', default_value = "100,200,500,1000,2000")]
    pub cells: Vec<usize>,

    /// CFL number in (0, 1].
    #[arg(long)]
    pub cfl: Option<f64>,

    /// Final simulated time.
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,

    /// Directory for `convergence_<scheme>.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CasesArgs {
    /// Print this case as TOML instead of listing.
    #[arg(long, value_name = "ID")]
    pub show: Option<String>,

    /// Use Rankine-Hugoniot consistent air states in test6.
    #[arg(long)]
    pub fix_shock_table: bool,
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    s.parse().map_err(|e: multimat::Error| e.to_string())
}

pub fn load_case(case: Option<&str>, config: Option<&PathBuf>, fix_shock_table: bool) -> Result<CaseConfig> {
    match (case, config) {
        (Some(id), None) => Ok(builtin_with(id, fix_shock_table)?),
        (None, Some(path)) => {
            if fix_shock_table {
                bail!("--fix-shock-table applies to the built-in test6 only");
            }
            CaseConfig::from_toml_path(path).with_context(|| format!("loading {}", path.display()))
        }
        _ => bail!("give exactly one of --case and --config"),
    }
}

impl CaseArgs {
    /// The case with every command-line override applied and validated.
    pub fn resolve(&self) -> Result<CaseConfig> {
        let mut cfg = load_case(self.case.as_deref(), self.config.as_ref(), self.fix_shock_table)?;
        if let Some(s) = self.scheme {
            cfg.scheme = s;
        }
        if let Some(c) = self.cfl {
            cfg.cfl = c;
        }
        if let Some(t) = self.t_end {
            cfg.t_end = t;
        }
        if let Some(cells) = &self.cells {
            cfg.cells = resolve_cells(&cfg.cells, cells)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Applies a `--cells` override to the case's own cell counts.
pub fn resolve_cells(own: &[usize], given: &[usize]) -> Result<Vec<usize>> {
    match (own.len(), given) {
        (d, g) if g.len() == d => Ok(g.to_vec()),
        (2, [n]) => {
            let m = (*n as f64 * own[1] as f64 / own[0] as f64).round().max(1.0) as usize;
            Ok(vec![*n, m])
        }
        (d, g) => bail!("--cells has {} values for a {d}D case", g.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_count_keeps_aspect_ratio() {
        assert_eq!(resolve_cells(&[700, 300], &[350]).unwrap(), vec![350, 150]);
        assert_eq!(resolve_cells(&[500], &[80]).unwrap(), vec![80]);
        assert_eq!(resolve_cells(&[200, 200], &[10, 20]).unwrap(), vec![10, 20]);
        assert!(resolve_cells(&[500], &[10, 20]).is_err());
    }

    #[test]
    fn overrides_apply() {
        let a = CaseArgs {
            case: Some("test2".into()),
            config: None,
            scheme: Some(Scheme::Upwind),
            cells: Some(vec![50]),
            cfl: Some(0.5),
            t_end: Some(0.01),
            fix_shock_table: false,
        };
        let cfg = a.resolve().unwrap();
        assert_eq!((cfg.scheme, cfg.cells.clone(), cfg.cfl, cfg.t_end), (Scheme::Upwind, vec![50], 0.5, 0.01));
    }

    #[test]
    fn bad_overrides_are_rejected() {
        let mut a = CaseArgs {
            case: Some("test1".into()),
            config: None,
            scheme: None,
            cells: None,
            cfl: Some(-1.0),
            t_end: None,
            fix_shock_table: false,
        };
        assert!(a.resolve().is_err());
        a.cfl = None;
        a.case = Some("nope".into());
        assert!(a.resolve().is_err());
    }

    #[test]
    fn parser_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
