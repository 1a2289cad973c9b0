//! One-dimensional Lagrange-Remap kernel on a pencil of cells.
//!
//! A pencil holds `n` interior cells and two ghosts per side, indexed
//! `0 .. n+4` with the interior at `2 .. n+2`. Face `f` separates cells `f`
//! and `f+1`. Slot 0 of each cell is the momentum normal to the sweep and
//! slot 1 the transverse one.

use smallvec::SmallVec;

use crate::eos::{mixture_pressure, mixture_state, phasic_energy_density, EosSpec};
use crate::error::{CellIndex, Error, Result};
use crate::lagrange::{acoustic_flux, lagrange_update, AcousticFaceFlux, AcousticState, DtLimits, LagrangeCellUpdate};
use crate::remap::{
    antidiffusive_color_fluxes, remap_face_flux, remap_update, upwind_color_flux, velocity_floor, RemapFaceFlux,
    Scheme, SimplexStats, TildeCell, Values,
};
use crate::state::{color, nvar, phasic_density, trace_tolerant, ENERGY, MOM_X, MOM_Y, PARTIAL};

/// Primitive view of a stored cell.
pub fn cell_acoustic_state(w: &[f64], m: usize, eos: &[EosSpec]) -> Result<AcousticState> {
    let pm = &w[PARTIAL..PARTIAL + m];
    let z = &w[color(m)..color(m) + m];
    let rho: f64 = pm.iter().sum();
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::State {
            reason: format!("non-positive density {rho}"),
            cell: None,
        });
    }
    let u = w[MOM_X] / rho;
    let v = w[MOM_Y] / rho;
    let rho_e = w[ENERGY] - 0.5 * rho * (u * u + v * v);
    if !(rho_e >= 0.0) {
        return Err(Error::State {
            reason: format!("negative internal energy {rho_e}"),
            cell: None,
        });
    }
    let rho_k: Values = pm
        .iter()
        .zip(z)
        .map(|(&p, &zk)| phasic_density(p, zk))
        .collect();
    let mix = mixture_state(z, &rho_k, rho_e, eos)?;
    Ok(AcousticState {
        rho,
        u,
        p: mix.p,
        c2: mix.c2,
    })
}

/// Lagrangian phasic state of a cell after the acoustic step.
pub(crate) fn tilde_cell(lag: &LagrangeCellUpdate, m: usize, eos: &[EosSpec]) -> Result<TildeCell> {
    let s = &lag.scaled;
    let c = color(m);
    let z: Values = SmallVec::from_slice(&s[c..c + m]);
    let scaled_rho: f64 = s[PARTIAL..PARTIAL + m].iter().sum();
    let u = [s[MOM_X] / scaled_rho, s[MOM_Y] / scaled_rho];
    let rho = scaled_rho / lag.l;
    let rho_e = s[ENERGY] / lag.l - 0.5 * rho * (u[0] * u[0] + u[1] * u[1]);
    // Trace phases keep their own density so that the partial-mass flux they
    // donate matches what they hold.
    let rho_k: Values = (0..m).map(|k| phasic_density(s[PARTIAL + k] / lag.l, z[k])).collect();
    let p = mixture_pressure(&z, &rho_k, rho_e, eos)?;
    let mut rho_e_k = Values::with_capacity(m);
    for k in 0..m {
        rho_e_k.push(if z[k] > 0.0 {
            trace_tolerant(z[k], phasic_energy_density(&eos[k], rho_k[k], p))?
        } else {
            0.0
        });
    }
    Ok(TildeCell { z, rho_k, rho_e_k, u })
}

/// What a pencil update reports besides the new cell values.
#[derive(Debug, Clone)]
pub(crate) struct PencilReport {
    pub z: SimplexStats,
    pub y: SimplexStats,
    /// Total flux of each conserved slot through the right boundary face
    /// minus the left one, per unit time and face area.
    pub net_flux: Values,
}

#[derive(Default)]
pub(crate) struct Scratch {
    prim: Vec<AcousticState>,
    faces: Vec<AcousticFaceFlux>,
    rho: Vec<f64>,
    lag: Vec<LagrangeCellUpdate>,
    tilde: Vec<TildeCell>,
    fluxes: Vec<RemapFaceFlux>,
}

/// Maps a pencil position to grid coordinates for error reports.
pub(crate) type Locate<'a> = &'a (dyn Fn(usize) -> CellIndex + Sync);

fn located<T>(r: Result<T>, at: CellIndex) -> Result<T> {
    r.map_err(|e| e.with_cell(at))
}

fn faces_and_states(
    buf: &[f64],
    n: usize,
    m: usize,
    eos: &[EosSpec],
    scratch: &mut Scratch,
    locate: Locate,
) -> Result<()> {
    let nv = nvar(m);
    scratch.prim.clear();
    scratch.rho.clear();
    for c in 0..n + 4 {
        let s = located(cell_acoustic_state(&buf[c * nv..(c + 1) * nv], m, eos), locate(c))?;
        scratch.rho.push(s.rho);
        scratch.prim.push(s);
    }
    scratch.faces.clear();
    for f in 0..n + 3 {
        let face = located(acoustic_flux(&scratch.prim[f], &scratch.prim[f + 1]), locate(f))?;
        scratch.faces.push(face);
    }
    Ok(())
}

/// Time-step limits of a pencil whose ghosts are filled.
#[allow(clippy::too_many_arguments)]
pub(crate) fn pencil_dt_limits(
    buf: &[f64],
    n: usize,
    m: usize,
    eos: &[EosSpec],
    dx: f64,
    cfl: f64,
    scratch: &mut Scratch,
    locate: Locate,
) -> Result<DtLimits> {
    faces_and_states(buf, n, m, eos, scratch, locate)?;
    Ok(DtLimits::from_faces(&scratch.faces, &scratch.rho, dx, cfl))
}

/// Advances the interior of a ghost-filled pencil by one sweep, writing the
/// `n` updated cells into `out`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn advance_pencil(
    buf: &[f64],
    n: usize,
    m: usize,
    eos: &[EosSpec],
    lambda: f64,
    scheme: Scheme,
    scratch: &mut Scratch,
    out: &mut [f64],
    locate: Locate,
) -> Result<PencilReport> {
    let nv = nvar(m);
    faces_and_states(buf, n, m, eos, scratch, locate)?;
    let faces = &scratch.faces;

    scratch.lag.clear();
    scratch.tilde.clear();
    for c in 1..n + 3 {
        let w = &buf[c * nv..(c + 1) * nv];
        let lag = located(lagrange_update(w, m, &faces[c - 1], &faces[c], lambda), locate(c))?;
        scratch.tilde.push(located(tilde_cell(&lag, m, eos), locate(c))?);
        scratch.lag.push(lag);
    }
    // lag[c - 1] and tilde[c - 1] belong to cell c

    let floor = velocity_floor(faces.iter().fold(0.0f64, |a, f| a.max(f.u_star.abs())));
    let zc = color(m);
    let z_of = |c: usize| &buf[c * nv + zc..c * nv + zc + m];
    scratch.fluxes.clear();
    for f in 1..n + 2 {
        let u = faces[f].u_star;
        let zf = match scheme {
            Scheme::Upwind => upwind_color_flux(z_of(f), z_of(f + 1), u),
            Scheme::AntiDiffusive => located(
                antidiffusive_color_fluxes(
                    [z_of(f - 1), z_of(f), z_of(f + 1), z_of(f + 2)],
                    [faces[f - 1].u_star, u, faces[f + 1].u_star],
                    lambda,
                    floor,
                ),
                locate(f),
            )?,
        };
        scratch
            .fluxes
            .push(remap_face_flux(&scratch.tilde[f - 1], &scratch.tilde[f], u, &zf));
    }
    // fluxes[f - 1] belongs to face f

    let mut z_stats = SimplexStats::default();
    let mut y_stats = SimplexStats::default();
    for c in 2..n + 2 {
        let dst = &mut out[(c - 2) * nv..(c - 1) * nv];
        let s = located(
            remap_update(
                &scratch.lag[c - 1],
                m,
                &scratch.fluxes[c - 2],
                &scratch.fluxes[c - 1],
                faces[c - 1].u_star,
                faces[c].u_star,
                lambda,
                dst,
            ),
            locate(c),
        )?;
        z_stats = z_stats.merge(s);
        let rho: f64 = dst[PARTIAL..PARTIAL + m].iter().sum();
        let mut ysum = 0.0;
        for &pm in &dst[PARTIAL..PARTIAL + m] {
            let y = pm / rho;
            y_stats.z_min = y_stats.z_min.min(y);
            y_stats.z_max = y_stats.z_max.max(y);
            ysum += y;
        }
        y_stats.sum_err = y_stats.sum_err.max((ysum - 1.0).abs());
    }

    let total_flux = |f: usize| -> Values {
        let face = &faces[f];
        let rf = &scratch.fluxes[f - 1];
        let u = face.u_star;
        let mut v = Values::with_capacity(PARTIAL + m);
        v.push(face.p_star + u * rf.mom[0]);
        v.push(u * rf.mom[1]);
        v.push(face.p_star * u + u * rf.energy);
        v.extend(rf.partial.iter().map(|pm| u * pm));
        v
    };
    let (lo, hi) = (total_flux(1), total_flux(n + 1));
    let net_flux = hi.iter().zip(&lo).map(|(h, l)| h - l).collect();
    Ok(PencilReport {
        z: z_stats,
        y: y_stats,
        net_flux,
    })
}
