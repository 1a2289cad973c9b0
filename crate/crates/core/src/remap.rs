//! Projection of the Lagrangian state back onto the Eulerian grid, with
//! upwind or anti-diffusive color-function fluxes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::lagrange::LagrangeCellUpdate;
use crate::state::{color, ENERGY, MOM_X, MOM_Y, PARTIAL};

pub type Values = SmallVec<[f64; 8]>;

/// Tolerance on the unit constraint and on the `[0, 1]` range of color
/// functions after a remap.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Color function below which `rho_k Z_k / Z_k` is treated as round-off when
/// picking the phasic values of a face flux.
pub const ROUNDOFF_FRACTION: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Upwind,
    #[default]
    #[serde(alias = "anti-diffusive")]
    AntiDiffusive,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Upwind => "upwind",
            Scheme::AntiDiffusive => "antidiffusive",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upwind" => Ok(Scheme::Upwind),
            "antidiffusive" | "anti-diffusive" => Ok(Scheme::AntiDiffusive),
            other => Err(Error::Config(format!(
                "unknown scheme {other:?} (expected upwind or antidiffusive)"
            ))),
        }
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn new(a: f64, b: f64) -> Self {
        Bounds {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.max(self.lo).min(self.hi)
    }
}

/// Donor-cell color fluxes; a zero velocity takes the right state.
pub fn upwind_color_flux(z_left: &[f64], z_right: &[f64], u_star: f64) -> Values {
    if u_star > 0.0 {
        SmallVec::from_slice(z_left)
    } else {
        SmallVec::from_slice(z_right)
    }
}

/// `[min, max]` of the two cells sharing the face.
pub fn consistency_bounds(z_left: f64, z_right: f64) -> Bounds {
    Bounds::new(z_left, z_right)
}

/// Which side of the face the anti-diffusive bounds are built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowCase {
    /// `u*` positive at `i-1/2` and `i+1/2`: the bound protects cell `i`.
    Rightward,
    /// `u*` negative at `i+1/2` and `i+3/2`: the bound protects cell `i+1`.
    Leftward,
}

/// Velocity floor below which a face falls back to upwind.
pub fn velocity_floor(max_abs_u: f64) -> f64 {
    1e-12 * max_abs_u.max(1.0)
}

/// Classifies face `i+1/2` from the velocities at `i-1/2, i+1/2, i+3/2`.
pub fn flow_case(u: [f64; 3], floor: f64) -> Option<FlowCase> {
    if u[1].abs() < floor {
        None
    } else if u[1] > 0.0 && u[0] > 0.0 {
        Some(FlowCase::Rightward)
    } else if u[1] < 0.0 && u[2] < 0.0 {
        Some(FlowCase::Leftward)
    } else {
        None
    }
}

/// Flux bounds at face `i+1/2` for one material that keep the updated color
/// function of the upstream cell within the bounds of its other face.
///
/// `z` holds cells `i-1 .. i+2`, `u` the velocities at `i-1/2 .. i+3/2`, and
/// `lambda = dt / dx`. Returns `None` when the face is not applicable.
pub fn stability_bounds(z: [f64; 4], u: [f64; 3], lambda: f64, floor: f64) -> Option<Bounds> {
    let (center, far, factor) = match flow_case(u, floor)? {
        FlowCase::Rightward => (z[1], z[0], u[0] / u[1] - 1.0 / (lambda * u[1])),
        FlowCase::Leftward => (z[2], z[3], u[2] / u[1] + 1.0 / (lambda * u[1])),
    };
    let outer = consistency_bounds(center, far);
    let a = center + (outer.hi - center) * factor;
    let big_a = center + (outer.lo - center) * factor;
    Some(Bounds::new(a, big_a))
}

/// `[omega, Omega]`: the intersection of the consistency and stability
/// bounds. Never empty in exact arithmetic because it holds the upwind value.
pub fn admissible_interval(consistency: Bounds, stability: Bounds) -> Result<Bounds> {
    let lo = consistency.lo.max(stability.lo);
    let hi = consistency.hi.min(stability.hi);
    if lo > hi {
        return Err(Error::EmptyInterval { material: 0, lo, hi });
    }
    Ok(Bounds { lo, hi })
}

/// Trust interval `[d_k, D_k]` of material `k` given the fluxes already
/// fixed for materials `0 .. k`.
pub fn trust_interval(k: usize, omegas: &[Bounds], chosen: &[f64]) -> Result<Bounds> {
    debug_assert_eq!(chosen.len(), k);
    let fixed: f64 = chosen.iter().sum();
    let (mut upper_rest, mut lower_rest) = (0.0, 0.0);
    for b in &omegas[k + 1..] {
        upper_rest += b.hi;
        lower_rest += b.lo;
    }
    let d = omegas[k].lo.max(1.0 - fixed - upper_rest);
    let big_d = omegas[k].hi.min(1.0 - fixed - lower_rest);
    if d <= big_d {
        Ok(Bounds { lo: d, hi: big_d })
    } else if d - big_d <= SIMPLEX_TOL {
        // round-off inversion: either end closes the sum within tolerance
        Ok(Bounds { lo: big_d, hi: d })
    } else {
        Err(Error::EmptyInterval {
            material: k,
            lo: d,
            hi: big_d,
        })
    }
}

/// Runs the trust-interval recursion in ascending material order, picking
/// in each interval the value closest to `target`.
pub fn select_fluxes(omegas: &[Bounds], target: &[f64]) -> Result<(Values, SmallVec<[Bounds; 8]>)> {
    let mut fluxes = Values::new();
    let mut intervals = SmallVec::new();
    for k in 0..omegas.len() {
        let trust = trust_interval(k, omegas, &fluxes)?;
        fluxes.push(trust.clamp(target[k]));
        intervals.push(trust);
    }
    Ok((fluxes, intervals))
}

/// Admissible intervals `[omega_k, Omega_k]` at face `i+1/2`, or `None` when
/// the face falls back to upwind. `z` holds the color columns of cells
/// `i-1 .. i+2`.
pub fn admissible_intervals(
    z: [&[f64]; 4],
    u: [f64; 3],
    lambda: f64,
    floor: f64,
) -> Result<Option<SmallVec<[Bounds; 8]>>> {
    if flow_case(u, floor).is_none() {
        return Ok(None);
    }
    let m = z[1].len();
    let mut out = SmallVec::with_capacity(m);
    for k in 0..m {
        let cons = consistency_bounds(z[1][k], z[2][k]);
        let stab = stability_bounds([z[0][k], z[1][k], z[2][k], z[3][k]], u, lambda, floor)
            .expect("applicability checked above");
        let omega = admissible_interval(cons, stab).map_err(|e| match e {
            Error::EmptyInterval { lo, hi, .. } => Error::EmptyInterval { material: k, lo, hi },
            other => other,
        })?;
        out.push(omega);
    }
    Ok(Some(out))
}

/// Anti-diffusive color fluxes at face `i+1/2`: each flux is the value of its
/// trust interval closest to the downwind color function. Falls back to
/// upwind where the bounds do not apply.
pub fn antidiffusive_color_fluxes(z: [&[f64]; 4], u: [f64; 3], lambda: f64, floor: f64) -> Result<Values> {
    let Some(omegas) = admissible_intervals(z, u, lambda, floor)? else {
        return Ok(upwind_color_flux(z[1], z[2], u[1]));
    };
    let downwind = if u[1] > 0.0 { z[2] } else { z[1] };
    Ok(select_fluxes(&omegas, downwind)?.0)
}

/// Lagrangian phasic data of a cell used to build remap fluxes.
#[derive(Debug, Clone, PartialEq)]
pub struct TildeCell {
    pub z: Values,
    /// Phasic densities; zero where a phase holds no mass.
    pub rho_k: Values,
    /// Phasic internal energies per unit volume `rho_k e_k`.
    pub rho_e_k: Values,
    /// Velocity `(normal, transverse)`.
    pub u: [f64; 2],
}

/// Remap fluxes through one face.
#[derive(Debug, Clone, PartialEq)]
pub struct RemapFaceFlux {
    pub z: Values,
    pub rho: f64,
    pub rho_e: f64,
    pub mom: [f64; 2],
    pub energy: f64,
    pub partial: Values,
}

/// Assembles the face fluxes from the donor's phasic density and energy.
/// Where the donor holds only a round-off amount of material `k` (`Z_k` below
/// [`ROUNDOFF_FRACTION`]), its `rho_k Z_k / Z_k` means nothing: a color flux
/// beyond the donor's `Z_k` then takes the other cell's values, and a flux
/// carried with such a ratio is capped at that cell's `Z_k`, so it never
/// moves more mass than the cell holds.
pub fn remap_face_flux(left: &TildeCell, right: &TildeCell, u_star: f64, z_flux: &[f64]) -> RemapFaceFlux {
    let (donor, other) = if u_star > 0.0 { (left, right) } else { (right, left) };
    let mut rho = 0.0;
    let mut rho_e = 0.0;
    let mut partial = Values::with_capacity(z_flux.len());
    for (k, &zf) in z_flux.iter().enumerate() {
        let zd = donor.z[k];
        let src = if zd >= ROUNDOFF_FRACTION || zf <= zd || zd >= other.z[k] { donor } else { other };
        let carried = if src.z[k] >= ROUNDOFF_FRACTION { zf } else { zf.min(src.z[k]) };
        let pm = carried * src.rho_k[k];
        partial.push(pm);
        rho += pm;
        rho_e += carried * src.rho_e_k[k];
    }
    let [un, ut] = donor.u;
    RemapFaceFlux {
        z: SmallVec::from_slice(z_flux),
        rho,
        rho_e,
        mom: [rho * un, rho * ut],
        energy: rho_e + 0.5 * rho * (un * un + ut * ut),
        partial,
    }
}

/// Extremes of the color functions before clamping, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexStats {
    pub z_min: f64,
    pub z_max: f64,
    /// Largest `|sum Z_k - 1|` before renormalization.
    pub sum_err: f64,
}

impl Default for SimplexStats {
    fn default() -> Self {
        SimplexStats {
            z_min: f64::INFINITY,
            z_max: f64::NEG_INFINITY,
            sum_err: 0.0,
        }
    }
}

impl SimplexStats {
    pub fn merge(self, o: SimplexStats) -> SimplexStats {
        SimplexStats {
            z_min: self.z_min.min(o.z_min),
            z_max: self.z_max.max(o.z_max),
            sum_err: self.sum_err.max(o.sum_err),
        }
    }
}

/// Final update `W^{n+1} = L W~ - lambda (u*_{i+1/2} W_{i+1/2} - u*_{i-1/2} W_{i-1/2})`
/// written into `out`. Color functions within [`SIMPLEX_TOL`] of `[0, 1]` are
/// clamped and renormalized; larger excursions are a stability error.
#[allow(clippy::too_many_arguments)]
pub fn remap_update(
    lag: &LagrangeCellUpdate,
    m: usize,
    left: &RemapFaceFlux,
    right: &RemapFaceFlux,
    u_left: f64,
    u_right: f64,
    lambda: f64,
    out: &mut [f64],
) -> Result<SimplexStats> {
    let s = &lag.scaled;
    let (ul, ur) = (lambda * u_left, lambda * u_right);
    out[MOM_X] = s[MOM_X] - (ur * right.mom[0] - ul * left.mom[0]);
    out[MOM_Y] = s[MOM_Y] - (ur * right.mom[1] - ul * left.mom[1]);
    out[ENERGY] = s[ENERGY] - (ur * right.energy - ul * left.energy);
    for k in 0..m {
        out[PARTIAL + k] = s[PARTIAL + k] - (ur * right.partial[k] - ul * left.partial[k]);
    }
    let c = color(m);
    let mut stats = SimplexStats::default();
    let mut sum = 0.0;
    for k in 0..m {
        let z = s[c + k] * lag.l - (ur * right.z[k] - ul * left.z[k]);
        if !(-SIMPLEX_TOL..=1.0 + SIMPLEX_TOL).contains(&z) {
            return Err(Error::Stability {
                material: k,
                value: z,
                cell: None,
            });
        }
        stats.z_min = stats.z_min.min(z);
        stats.z_max = stats.z_max.max(z);
        sum += z;
        out[c + k] = z;
    }
    stats.sum_err = (sum - 1.0).abs();
    if stats.sum_err > SIMPLEX_TOL {
        return Err(Error::Stability {
            material: m,
            value: sum,
            cell: None,
        });
    }
    let mut clamped_sum = 0.0;
    for v in &mut out[c..c + m] {
        *v = v.clamp(0.0, 1.0);
        clamped_sum += *v;
    }
    if clamped_sum != 1.0 {
        out[c..c + m].iter_mut().for_each(|v| *v /= clamped_sum);
    }
    Ok(stats)
}
