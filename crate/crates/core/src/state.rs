//! Cell and grid data: conserved/primitive conversion, ghost layers and
//! boundary conditions.
//!
//! A cell is stored as `3 + 2m` contiguous values
//! `[rho u, rho v, rho E, rho_1 Z_1 .. rho_m Z_m, Z_1 .. Z_m]`.
//! 2D fields are row-major with x varying fastest, so an x-pencil is a
//! contiguous slice.

use serde::{Deserialize, Serialize};

use crate::eos::{mixture_pressure, phasic_energy_density, EosSpec, PHASE_THRESHOLD};
use crate::error::{CellIndex, Error, Result};

/// Ghost layers on each side of the grid. The anti-diffusive flux at face
/// `i+1/2` reads cells `i-1 .. i+2`.
pub const GHOST: usize = 2;

pub const MOM_X: usize = 0;
pub const MOM_Y: usize = 1;
pub const ENERGY: usize = 2;
pub const PARTIAL: usize = 3;

/// Number of stored values per cell for `m` materials.
#[inline]
pub const fn nvar(m: usize) -> usize {
    3 + 2 * m
}

/// Offset of the first color function.
#[inline]
pub const fn color(m: usize) -> usize {
    3 + m
}

/// Conserved variables of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellState {
    /// Momentum `(rho u, rho v)`; the second component is zero in 1D.
    pub mom: [f64; 2],
    /// Total energy density `rho E`.
    pub energy: f64,
    /// Partial masses `rho_k Z_k`.
    pub partial_mass: Vec<f64>,
    /// Color functions `Z_k`.
    pub z: Vec<f64>,
}

impl CellState {
    pub fn density(&self) -> f64 {
        self.partial_mass.iter().sum()
    }

    pub fn to_slots(&self, out: &mut [f64]) {
        let m = self.z.len();
        out[MOM_X] = self.mom[0];
        out[MOM_Y] = self.mom[1];
        out[ENERGY] = self.energy;
        out[PARTIAL..PARTIAL + m].copy_from_slice(&self.partial_mass);
        out[color(m)..color(m) + m].copy_from_slice(&self.z);
    }

    pub fn from_slots(w: &[f64], m: usize) -> Self {
        CellState {
            mom: [w[MOM_X], w[MOM_Y]],
            energy: w[ENERGY],
            partial_mass: w[PARTIAL..PARTIAL + m].to_vec(),
            z: w[color(m)..color(m) + m].to_vec(),
        }
    }
}

/// Primitive description of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: [f64; 2],
    pub p: f64,
    pub z: Vec<f64>,
    /// Mass fractions `Y_k = rho_k Z_k / rho`.
    pub y: Vec<f64>,
    /// Phasic densities; zero where a phase holds no mass.
    pub rho_k: Vec<f64>,
}

impl PrimitiveState {
    /// Builds the state from color functions and phasic densities.
    pub fn from_phases(z: Vec<f64>, rho_k: Vec<f64>, u: [f64; 2], p: f64) -> Self {
        let rho_k: Vec<f64> = z
            .iter()
            .zip(&rho_k)
            .map(|(&zk, &rk)| if zk > 0.0 { rk } else { 0.0 })
            .collect();
        let rho: f64 = z.iter().zip(&rho_k).map(|(zk, rk)| zk * rk).sum();
        let y = z.iter().zip(&rho_k).map(|(zk, rk)| zk * rk / rho).collect();
        PrimitiveState {
            rho,
            u,
            p,
            z,
            y,
            rho_k,
        }
    }

    /// Single-material state.
    pub fn pure(m: usize, k: usize, rho: f64, u: [f64; 2], p: f64) -> Self {
        let mut z = vec![0.0; m];
        let mut rho_k = vec![0.0; m];
        z[k] = 1.0;
        rho_k[k] = rho;
        Self::from_phases(z, rho_k, u, p)
    }
}

/// Phasic density `pm / Z_k`, zero where the phase holds no mass.
#[inline]
pub fn phasic_density(partial_mass: f64, z: f64) -> f64 {
    if z > 0.0 && partial_mass > 0.0 {
        partial_mass / z
    } else {
        0.0
    }
}

/// Passes EOS results through, except that a failure on a trace phase
/// counts as no contribution.
#[inline]
pub fn trace_tolerant(z: f64, r: Result<f64>) -> Result<f64> {
    if z < PHASE_THRESHOLD {
        Ok(r.unwrap_or(0.0))
    } else {
        r
    }
}

pub fn primitive_from_conserved(cell: &CellState, eos: &[EosSpec]) -> Result<PrimitiveState> {
    let rho = cell.density();
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::State {
            reason: format!("non-positive density {rho}"),
            cell: None,
        });
    }
    let u = [cell.mom[0] / rho, cell.mom[1] / rho];
    let rho_e = cell.energy - 0.5 * rho * (u[0] * u[0] + u[1] * u[1]);
    if !(rho_e >= 0.0) {
        return Err(Error::State {
            reason: format!("negative internal energy {rho_e}"),
            cell: None,
        });
    }
    let rho_k: Vec<f64> = cell
        .partial_mass
        .iter()
        .zip(&cell.z)
        .map(|(&pm, &zk)| phasic_density(pm, zk))
        .collect();
    let p = mixture_pressure(&cell.z, &rho_k, rho_e, eos)?;
    let y = cell.partial_mass.iter().map(|pm| pm / rho).collect();
    Ok(PrimitiveState {
        rho,
        u,
        p,
        z: cell.z.clone(),
        y,
        rho_k,
    })
}

pub fn conserved_from_primitive(prim: &PrimitiveState, eos: &[EosSpec]) -> Result<CellState> {
    let mut partial_mass = Vec::with_capacity(prim.z.len());
    let mut rho_e = 0.0;
    for ((&zk, &rk), e) in prim.z.iter().zip(&prim.rho_k).zip(eos) {
        if zk <= 0.0 {
            partial_mass.push(0.0);
        } else {
            partial_mass.push(zk * rk);
            rho_e += zk * trace_tolerant(zk, phasic_energy_density(e, rk, prim.p))?;
        }
    }
    let rho: f64 = partial_mass.iter().sum();
    let kinetic = 0.5 * rho * (prim.u[0] * prim.u[0] + prim.u[1] * prim.u[1]);
    Ok(CellState {
        mom: [rho * prim.u[0], rho * prim.u[1]],
        energy: rho_e + kinetic,
        partial_mass,
        z: prim.z.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Transparent,
    Wall,
}

/// Boundary kind on each side: `[low, high]` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Boundaries {
    pub x: [Boundary; 2],
    pub y: [Boundary; 2],
}

impl Boundaries {
    pub fn uniform(b: Boundary) -> Self {
        Boundaries { x: [b; 2], y: [b; 2] }
    }

    pub fn validate(&self) -> Result<()> {
        for (axis, sides) in [("x", self.x), ("y", self.y)] {
            if (sides[0] == Boundary::Periodic) != (sides[1] == Boundary::Periodic) {
                return Err(Error::Config(format!(
                    "periodic boundaries must be set on both {axis} sides"
                )));
            }
        }
        Ok(())
    }
}

/// Fills the two ghost cells at each end of a pencil of `n` interior cells.
/// Slot 0 of each cell is the momentum normal to the boundary.
pub(crate) fn fill_pencil_ghosts(buf: &mut [f64], n: usize, nv: usize, bc: [Boundary; 2]) {
    let copy = |buf: &mut [f64], dst: usize, src: usize, negate: bool| {
        buf.copy_within(src * nv..(src + 1) * nv, dst * nv);
        if negate {
            buf[dst * nv] = -buf[dst * nv];
        }
    };
    let (first, last) = (GHOST, GHOST + n - 1);
    match bc[0] {
        Boundary::Periodic => {
            copy(buf, 0, last - 1, false);
            copy(buf, 1, last, false);
        }
        Boundary::Transparent => {
            copy(buf, 0, first, false);
            copy(buf, 1, first, false);
        }
        Boundary::Wall => {
            copy(buf, 0, first + 1, true);
            copy(buf, 1, first, true);
        }
    }
    match bc[1] {
        Boundary::Periodic => {
            copy(buf, last + 1, first, false);
            copy(buf, last + 2, first + 1, false);
        }
        Boundary::Transparent => {
            copy(buf, last + 1, last, false);
            copy(buf, last + 2, last, false);
        }
        Boundary::Wall => {
            copy(buf, last + 1, last, true);
            copy(buf, last + 2, last - 1, true);
        }
    }
}

/// Uniform Cartesian grid in one or two dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub dims: usize,
    pub nx: usize,
    /// 1 in 1D.
    pub ny: usize,
    pub origin: [f64; 2],
    pub dx: f64,
    /// Unit width in 1D so that cell volumes are `dx`.
    pub dy: f64,
}

impl Grid {
    pub fn new_1d(x0: f64, x1: f64, nx: usize) -> Result<Self> {
        if nx < 2 || !(x1 > x0) {
            return Err(Error::Config(format!("bad 1D grid: [{x0}, {x1}] with {nx} cells")));
        }
        Ok(Grid {
            dims: 1,
            nx,
            ny: 1,
            origin: [x0, 0.0],
            dx: (x1 - x0) / nx as f64,
            dy: 1.0,
        })
    }

    pub fn new_2d(lo: [f64; 2], hi: [f64; 2], nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 || !(hi[0] > lo[0]) || !(hi[1] > lo[1]) {
            return Err(Error::Config(format!("bad 2D grid: {lo:?}..{hi:?} with {nx}x{ny} cells")));
        }
        Ok(Grid {
            dims: 2,
            nx,
            ny,
            origin: lo,
            dx: (hi[0] - lo[0]) / nx as f64,
            dy: (hi[1] - lo[1]) / ny as f64,
        })
    }

    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        let y = if self.dims == 1 {
            0.0
        } else {
            self.origin[1] + (j as f64 + 0.5) * self.dy
        };
        [self.origin[0] + (i as f64 + 0.5) * self.dx, y]
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dy
    }
}

/// Cell data over a grid, including ghost layers.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSet {
    pub grid: Grid,
    pub bc: Boundaries,
    m: usize,
    data: Vec<f64>,
}

impl FieldSet {
    pub fn new(grid: Grid, bc: Boundaries, m: usize) -> Self {
        let sy = if grid.dims == 1 { 1 } else { grid.ny + 2 * GHOST };
        let len = (grid.nx + 2 * GHOST) * sy * nvar(m);
        FieldSet {
            grid,
            bc,
            m,
            data: vec![0.0; len],
        }
    }

    pub fn materials(&self) -> usize {
        self.m
    }

    pub fn nvar(&self) -> usize {
        nvar(self.m)
    }

    /// Cells per stored row, ghosts included.
    pub fn row_len(&self) -> usize {
        self.grid.nx + 2 * GHOST
    }

    /// Stored rows, ghosts included (1 in 1D).
    pub fn n_rows(&self) -> usize {
        if self.grid.dims == 1 {
            1
        } else {
            self.grid.ny + 2 * GHOST
        }
    }

    /// Stored row of interior row `j`.
    #[inline]
    pub fn row_of(&self, j: usize) -> usize {
        if self.grid.dims == 1 {
            0
        } else {
            j + GHOST
        }
    }

    #[inline]
    pub fn offset(&self, i: usize, j: usize) -> usize {
        (self.row_of(j) * self.row_len() + i + GHOST) * self.nvar()
    }

    #[inline]
    fn raw_offset(&self, gi: usize, gj: usize) -> usize {
        (gj * self.row_len() + gi) * self.nvar()
    }

    pub fn cell(&self, i: usize, j: usize) -> &[f64] {
        let o = self.offset(i, j);
        &self.data[o..o + self.nvar()]
    }

    pub fn cell_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let o = self.offset(i, j);
        let nv = self.nvar();
        &mut self.data[o..o + nv]
    }

    pub fn get(&self, i: usize, j: usize) -> CellState {
        CellState::from_slots(self.cell(i, j), self.m)
    }

    pub fn set(&mut self, i: usize, j: usize, cell: &CellState) {
        let m = self.m;
        cell.to_slots(self.cell_mut(i, j));
        debug_assert_eq!(cell.z.len(), m);
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Color function of material `k` over the interior, row-major.
    pub fn color_field(&self, k: usize) -> Vec<f64> {
        let slot = color(self.m) + k;
        self.interior_cells().map(|w| w[slot]).collect()
    }

    /// Iterates interior cells row by row.
    pub fn interior_cells(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.grid.ny).flat_map(move |j| (0..self.grid.nx).map(move |i| self.cell(i, j)))
    }

    /// Volume integrals of `[rho u, rho v, rho E, rho_k Z_k ..]` over the
    /// interior.
    pub fn totals(&self) -> Vec<f64> {
        let n = PARTIAL + self.m;
        let mut sums = vec![0.0; n];
        for w in self.interior_cells() {
            for (s, v) in sums.iter_mut().zip(w) {
                *s += v;
            }
        }
        let vol = self.grid.cell_volume();
        sums.iter_mut().for_each(|s| *s *= vol);
        sums
    }

    /// Fills the ghost layers from the interior according to the boundary
    /// kinds. Corner ghosts are not used and are left untouched.
    pub fn fill_ghost(&mut self) {
        let nv = self.nvar();
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let row_len = self.row_len();
        for j in 0..ny {
            let start = self.row_of(j) * row_len * nv;
            let bc = self.bc.x;
            fill_pencil_ghosts(&mut self.data[start..start + row_len * nv], nx, nv, bc);
        }
        if self.grid.dims == 2 {
            let mut column = vec![0.0; (ny + 2 * GHOST) * nv];
            for gi in GHOST..GHOST + nx {
                for gj in 0..ny + 2 * GHOST {
                    let o = self.raw_offset(gi, gj);
                    let dst = &mut column[gj * nv..(gj + 1) * nv];
                    dst.copy_from_slice(&self.data[o..o + nv]);
                    dst.swap(MOM_X, MOM_Y);
                }
                fill_pencil_ghosts(&mut column, ny, nv, self.bc.y);
                for gj in (0..GHOST).chain(GHOST + ny..ny + 2 * GHOST) {
                    let o = self.raw_offset(gi, gj);
                    let src = &column[gj * nv..(gj + 1) * nv];
                    let dst = &mut self.data[o..o + nv];
                    dst.copy_from_slice(src);
                    dst.swap(MOM_X, MOM_Y);
                }
            }
        }
    }

    /// Ghost cell `gi` (ghost-inclusive index) of interior row `j`.
    pub fn raw_cell(&self, gi: usize, gj: usize) -> &[f64] {
        let o = self.raw_offset(gi, gj);
        &self.data[o..o + self.nvar()]
    }

    /// Primitive state of interior cell `(i, j)`.
    pub fn primitive(&self, i: usize, j: usize, eos: &[EosSpec]) -> Result<PrimitiveState> {
        primitive_from_conserved(&self.get(i, j), eos).map_err(|e| e.with_cell(CellIndex { i, j }))
    }

    /// Checks the per-cell invariants on the interior.
    pub fn validate(&self) -> Result<()> {
        let m = self.m;
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let w = self.cell(i, j);
                let z = &w[color(m)..color(m) + m];
                let sum: f64 = z.iter().sum();
                let rho: f64 = w[PARTIAL..PARTIAL + m].iter().sum();
                let reason = if z.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                    Some(format!("color functions {z:?} outside [0, 1]"))
                } else if (sum - 1.0).abs() > 1e-12 {
                    Some(format!("color functions sum to {sum}"))
                } else if !(rho > 0.0) {
                    Some(format!("non-positive density {rho}"))
                } else {
                    None
                };
                if let Some(reason) = reason {
                    return Err(Error::State {
                        reason,
                        cell: Some(CellIndex { i, j }),
                    });
                }
            }
        }
        Ok(())
    }
}
