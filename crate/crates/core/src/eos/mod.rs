//! Pure-material equations of state and the isobaric mixture closure.
//!
//! Every supported material is a Mie-Gruneisen fluid,
//!
//! ```text
//! p = p_ref(rho) + Gamma(rho) * rho * (e - e_ref(rho))
//! ```
//!
//! so each EOS is evaluated through its `(Gamma, e_ref, p_ref)` triple and
//! the derivatives of those curves. Perfect and stiffened gases have constant
//! `Gamma = gamma - 1`; the Van der Waals fluid has
//! `Gamma = (gamma - 1) / (1 - b rho)`, `p_ref = -a rho^2`, `e_ref = -a rho`.

mod mixture;
mod tabular;

use std::sync::Arc;

use crate::error::{Error, Result};

pub use mixture::{
    closure_residual, mixture_pressure, mixture_pressure_with, mixture_sound_speed_sq,
    mixture_state, ClosureMethod, MixtureState, PHASE_THRESHOLD,
};
pub use tabular::{MieGruneisenTable, MonotoneCubic};

/// Equation of state of one material.
#[derive(Debug, Clone, PartialEq)]
pub enum EosSpec {
    PerfectGas { gamma: f64 },
    StiffenedGas { gamma: f64, pi: f64 },
    VanDerWaals { gamma: f64, a: f64, b: f64 },
    MieGruneisenTabular(Arc<MieGruneisenTable>),
}

/// Mie-Gruneisen coefficients of a material at a given density, with their
/// density derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgCoefficients {
    pub gruneisen: f64,
    pub e_ref: f64,
    pub p_ref: f64,
    pub d_gruneisen: f64,
    pub d_e_ref: f64,
    pub d_p_ref: f64,
}

impl EosSpec {
    pub fn perfect_gas(gamma: f64) -> Result<Self> {
        let eos = EosSpec::PerfectGas { gamma };
        eos.validate()?;
        Ok(eos)
    }

    pub fn stiffened_gas(gamma: f64, pi: f64) -> Result<Self> {
        let eos = EosSpec::StiffenedGas { gamma, pi };
        eos.validate()?;
        Ok(eos)
    }

    pub fn van_der_waals(gamma: f64, a: f64, b: f64) -> Result<Self> {
        let eos = EosSpec::VanDerWaals { gamma, a, b };
        eos.validate()?;
        Ok(eos)
    }

    /// Checks the parameter invariants that do not depend on the state.
    pub fn validate(&self) -> Result<()> {
        let gamma_ok = |g: f64| g.is_finite() && g > 1.0;
        match *self {
            EosSpec::PerfectGas { gamma } if !gamma_ok(gamma) => Err(Error::Config(format!(
                "perfect gas requires gamma > 1, got {gamma}"
            ))),
            EosSpec::StiffenedGas { gamma, pi } if !gamma_ok(gamma) || !(pi >= 0.0) => {
                Err(Error::Config(format!(
                    "stiffened gas requires gamma > 1 and pi >= 0, got gamma = {gamma}, pi = {pi}"
                )))
            }
            EosSpec::VanDerWaals { gamma, a, b } if !gamma_ok(gamma) || !(a >= 0.0) || !(b >= 0.0) => {
                Err(Error::Config(format!(
                    "Van der Waals fluid requires gamma > 1, a >= 0, b >= 0, got {gamma}, {a}, {b}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Mie-Gruneisen coefficients at density `rho`.
    pub fn coefficients(&self, rho: f64) -> Result<MgCoefficients> {
        // zero density is the limit a phase without mass is evaluated at
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::EosDomain(format!("negative density {rho}")));
        }
        let c = match *self {
            EosSpec::PerfectGas { gamma } => MgCoefficients {
                gruneisen: gamma - 1.0,
                e_ref: 0.0,
                p_ref: 0.0,
                d_gruneisen: 0.0,
                d_e_ref: 0.0,
                d_p_ref: 0.0,
            },
            EosSpec::StiffenedGas { gamma, pi } => MgCoefficients {
                gruneisen: gamma - 1.0,
                e_ref: 0.0,
                p_ref: -gamma * pi,
                d_gruneisen: 0.0,
                d_e_ref: 0.0,
                d_p_ref: 0.0,
            },
            EosSpec::VanDerWaals { gamma, a, b } => {
                let covolume = 1.0 - b * rho;
                if !(covolume > 0.0) {
                    return Err(Error::EosDomain(format!(
                        "Van der Waals co-volume: 1 - b rho = {covolume} at rho = {rho}"
                    )));
                }
                MgCoefficients {
                    gruneisen: (gamma - 1.0) / covolume,
                    e_ref: -a * rho,
                    p_ref: -a * rho * rho,
                    d_gruneisen: (gamma - 1.0) * b / (covolume * covolume),
                    d_e_ref: -a,
                    d_p_ref: -2.0 * a * rho,
                }
            }
            EosSpec::MieGruneisenTabular(ref table) => table.coefficients(rho)?,
        };
        if !(c.gruneisen > 0.0) {
            return Err(Error::Hypothesis {
                xi: 1.0 / c.gruneisen,
            });
        }
        Ok(c)
    }

    /// Whether the material is a Mie-Gruneisen fluid, so that the closed-form
    /// mixture pressure applies. All built-in kinds are.
    pub fn is_mie_gruneisen(&self) -> bool {
        true
    }
}

/// Specific internal energy `e_k(rho_k, p_k)`.
pub fn phasic_energy(eos: &EosSpec, rho: f64, p: f64) -> Result<f64> {
    let c = eos.coefficients(rho)?;
    Ok(c.e_ref + (p - c.p_ref) / (c.gruneisen * rho))
}

/// Internal energy per unit volume `rho_k e_k(rho_k, p_k)`, finite at zero
/// density.
pub fn phasic_energy_density(eos: &EosSpec, rho: f64, p: f64) -> Result<f64> {
    let c = eos.coefficients(rho)?;
    Ok(rho * c.e_ref + (p - c.p_ref) / c.gruneisen)
}

/// Pressure `p_k(rho_k, e_k)`.
pub fn phasic_pressure(eos: &EosSpec, rho: f64, e: f64) -> Result<f64> {
    let c = eos.coefficients(rho)?;
    Ok(c.p_ref + c.gruneisen * rho * (e - c.e_ref))
}

/// `xi_k = d(rho_k e_k)/dp_k` at fixed density, i.e. `1 / Gamma_k`.
pub fn phasic_xi(eos: &EosSpec, rho: f64) -> Result<f64> {
    Ok(1.0 / eos.coefficients(rho)?.gruneisen)
}

/// Squared sound speed `(dp/drho)_e + p/rho^2 (dp/de)_rho`.
///
/// The sign is not checked: a Van der Waals phase may leave its hyperbolic
/// region, and only the mixture value has to stay positive.
pub fn phasic_sound_speed_sq(eos: &EosSpec, rho: f64, p: f64) -> Result<f64> {
    let c = eos.coefficients(rho)?;
    Ok(sound_speed_sq_from(&c, rho, p))
}

#[inline]
pub(crate) fn sound_speed_sq_from(c: &MgCoefficients, rho: f64, p: f64) -> f64 {
    let excess = p - c.p_ref;
    c.d_p_ref + excess * c.d_gruneisen / c.gruneisen - rho * c.gruneisen * c.d_e_ref
        + excess / rho
        + c.gruneisen * p / rho
}
