//! Finite-volume solver for compressible flows of `m` immiscible materials.
//!
//! The flow model is the five-equation system with an isobaric closure: one
//! velocity and one pressure per cell, a partial mass `rho_k Z_k` and a color
//! function `Z_k` per material. Each time step is a Lagrangian acoustic step
//! followed by a remap onto the fixed grid, with either upwind or
//! anti-diffusive color-function fluxes. The anti-diffusive fluxes are picked
//! inside per-material trust intervals so that the color functions stay on
//! the unit simplex. 2D runs use directional splitting.
//!
//! ```
//! use multimat::cases::{builtin, instantiate};
//! use multimat::remap::Scheme;
//! use multimat::solver::{run, RunOptions, SolverConfig};
//!
//! let mut cfg = builtin("test2")?;
//! cfg.cells = vec![100];
//! let (mut field, eos) = instantiate(&cfg)?;
//! let opts = RunOptions { t_end: 0.01, ..Default::default() };
//! let summary = run(&mut field, &eos, &SolverConfig::new(Scheme::AntiDiffusive, cfg.cfl), &opts, &mut [])?;
//! assert_eq!(summary.clock.t, 0.01);
//! # Ok::<(), multimat::Error>(())
//! ```

// `!(x > 0.0)` is the NaN-rejecting form throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cases;
pub mod diagnostics;
pub mod eos;
pub mod error;
pub mod io;
pub mod lagrange;
pub mod remap;
pub mod riemann;
pub mod solver;
pub mod state;

pub use error::{CellIndex, Error, Result};
