//! Acoustic Lagrangian step: face fluxes, time-step bound and cell update.

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::state::{color, ENERGY, MOM_X, PARTIAL};

/// The cell data a face solver needs on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcousticState {
    pub rho: f64,
    /// Velocity normal to the face.
    pub u: f64,
    pub p: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcousticFaceFlux {
    pub p_star: f64,
    pub u_star: f64,
    pub rho_c_star: f64,
}

pub fn acoustic_flux(left: &AcousticState, right: &AcousticState) -> Result<AcousticFaceFlux> {
    let stiff = (left.rho * left.c2).max(right.rho * right.c2);
    let rho_c = (stiff * left.rho.min(right.rho)).sqrt();
    if !(rho_c > 0.0) || !rho_c.is_finite() {
        return Err(Error::Hyperbolicity {
            c2: left.c2.min(right.c2),
            cell: None,
        });
    }
    Ok(AcousticFaceFlux {
        p_star: 0.5 * (left.p + right.p) - 0.5 * rho_c * (right.u - left.u),
        u_star: 0.5 * (left.u + right.u) - (right.p - left.p) / (2.0 * rho_c),
        rho_c_star: rho_c,
    })
}

/// Fastest signal speed seen by a face.
#[inline]
pub fn face_signal_speed(face: &AcousticFaceFlux, rho_left: f64, rho_right: f64) -> f64 {
    face.u_star.abs().max(face.rho_c_star / rho_left.min(rho_right))
}

/// Smallest volume factor the time step is allowed to produce.
pub const MIN_VOLUME_FACTOR: f64 = 0.1;

/// Time-step limits collected over one or more pencils.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtLimits {
    /// CFL bound; infinite when no wave moves.
    pub cfl: f64,
    /// Largest step keeping every volume factor above [`MIN_VOLUME_FACTOR`].
    pub positivity: f64,
}

impl DtLimits {
    pub const UNBOUNDED: DtLimits = DtLimits {
        cfl: f64::INFINITY,
        positivity: f64::INFINITY,
    };

    /// Limits from the face fluxes of a pencil. Face `f` separates cells `f`
    /// and `f + 1`, so `rho` has one more entry than `faces`.
    pub fn from_faces(faces: &[AcousticFaceFlux], rho: &[f64], dx: f64, cfl: f64) -> Self {
        debug_assert_eq!(rho.len(), faces.len() + 1);
        let mut speed: f64 = 0.0;
        for (f, face) in faces.iter().enumerate() {
            speed = speed.max(face_signal_speed(face, rho[f], rho[f + 1]));
        }
        let mut compression: f64 = 0.0;
        for pair in faces.windows(2) {
            compression = compression.max(pair[0].u_star - pair[1].u_star);
        }
        DtLimits {
            cfl: if speed > 0.0 { cfl * dx / speed } else { f64::INFINITY },
            positivity: if compression > 0.0 {
                (1.0 - MIN_VOLUME_FACTOR) * dx / compression
            } else {
                f64::INFINITY
            },
        }
    }

    pub fn merge(self, other: DtLimits) -> DtLimits {
        DtLimits {
            cfl: self.cfl.min(other.cfl),
            positivity: self.positivity.min(other.positivity),
        }
    }

    /// The admissible step, capped by `dt_max`, and whether the positivity
    /// clip was active.
    pub fn resolve(self, dt_max: f64) -> (f64, bool) {
        let clipped = self.positivity < self.cfl;
        (self.cfl.min(self.positivity).min(dt_max), clipped)
    }
}

/// `dt = C dx / max_f max(|u*|, (rho c)* / min rho)`, clipped so every
/// volume factor stays above [`MIN_VOLUME_FACTOR`].
pub fn compute_dt(faces: &[AcousticFaceFlux], rho: &[f64], dx: f64, cfl: f64, dt_max: f64) -> (f64, bool) {
    DtLimits::from_faces(faces, rho, dx, cfl).resolve(dt_max)
}

/// Result of the Lagrangian step for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeCellUpdate {
    /// Volume factor `L_i`.
    pub l: f64,
    /// `L_i` times the Lagrangian state for momentum, energy and partial
    /// masses; the unchanged color functions in the color slots.
    pub scaled: SmallVec<[f64; 16]>,
}

impl LagrangeCellUpdate {
    /// Lagrangian value of conserved slot `s` (color slots hold `Z` already).
    pub fn tilde(&self, s: usize, m: usize) -> f64 {
        if s >= color(m) {
            self.scaled[s]
        } else {
            self.scaled[s] / self.l
        }
    }

    pub fn density(&self, m: usize) -> f64 {
        self.scaled[PARTIAL..PARTIAL + m].iter().sum::<f64>() / self.l
    }
}

/// Lagrangian update of cell data `w` between faces `left` and `right`,
/// with `lambda = dt / dx`.
pub fn lagrange_update(
    w: &[f64],
    m: usize,
    left: &AcousticFaceFlux,
    right: &AcousticFaceFlux,
    lambda: f64,
) -> Result<LagrangeCellUpdate> {
    let l = 1.0 + lambda * (right.u_star - left.u_star);
    if !(l > 0.0) {
        return Err(Error::TimeStep { l, cell: None });
    }
    let mut scaled: SmallVec<[f64; 16]> = SmallVec::from_slice(w);
    scaled[MOM_X] = w[MOM_X] - lambda * (right.p_star - left.p_star);
    scaled[ENERGY] = w[ENERGY] - lambda * (right.p_star * right.u_star - left.p_star * left.u_star);
    debug_assert_eq!(scaled.len(), crate::state::nvar(m));
    Ok(LagrangeCellUpdate { l, scaled })
}
