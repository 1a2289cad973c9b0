//! Isobaric closure of the m-component mixture.

use smallvec::SmallVec;

use crate::eos::{phasic_energy_density, sound_speed_sq_from, EosSpec, MgCoefficients};
use crate::error::{Error, Result};
use crate::state::trace_tolerant;

/// Phases with a color function below this value are trace phases: they
/// still enter the closure sums, but an EOS evaluation that fails on their
/// (possibly meaningless) density drops them instead of raising an error.
pub const PHASE_THRESHOLD: f64 = 1e-8;

/// How the mixture pressure is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClosureMethod {
    /// Closed form when every material is Mie-Gruneisen, which is always the
    /// case for the built-in EOS kinds.
    #[default]
    Auto,
    /// Bracketed bisection on the closure residual followed by Newton steps.
    Iterative,
}

/// Pressure and sound speed of a mixture cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureState {
    pub p: f64,
    pub c2: f64,
}

type Coeffs = SmallVec<[Option<MgCoefficients>; 8]>;

fn check_inputs(z: &[f64], rho_k: &[f64], eos: &[EosSpec]) -> Result<()> {
    if z.len() != rho_k.len() || z.len() != eos.len() || z.is_empty() {
        return Err(Error::State {
            reason: format!(
                "mismatched material counts: {} color functions, {} densities, {} EOS",
                z.len(),
                rho_k.len(),
                eos.len()
            ),
            cell: None,
        });
    }
    let sum: f64 = z.iter().sum();
    if (sum - 1.0).abs() > 1e-12 || z.iter().any(|&zk| !(-1e-12..=1.0 + 1e-12).contains(&zk)) {
        return Err(Error::State {
            reason: format!("color functions {z:?} are not on the simplex"),
            cell: None,
        });
    }
    Ok(())
}

fn present_coefficients(z: &[f64], rho_k: &[f64], eos: &[EosSpec]) -> Result<Coeffs> {
    z.iter()
        .zip(rho_k)
        .zip(eos)
        .map(|((&zk, &rk), e)| {
            if zk <= 0.0 {
                Ok(None)
            } else if zk < PHASE_THRESHOLD {
                Ok(e.coefficients(rk).ok())
            } else {
                e.coefficients(rk).map(Some)
            }
        })
        .collect()
}

fn closed_form_pressure(z: &[f64], rho_k: &[f64], rho_e: f64, coeffs: &Coeffs) -> f64 {
    let mut num = rho_e;
    let mut den = 0.0;
    for ((&zk, &rk), c) in z.iter().zip(rho_k).zip(coeffs) {
        if let Some(c) = c {
            num += zk * (c.p_ref / c.gruneisen - rk * c.e_ref);
            den += zk / c.gruneisen;
        }
    }
    num / den
}

/// Closure residual `sum_k Z_k rho_k e_k(rho_k, p) - rho e`.
pub fn closure_residual(z: &[f64], rho_k: &[f64], rho_e: f64, eos: &[EosSpec], p: f64) -> Result<f64> {
    let mut sum = 0.0;
    for ((&zk, &rk), e) in z.iter().zip(rho_k).zip(eos) {
        if zk > 0.0 {
            sum += zk * trace_tolerant(zk, phasic_energy_density(e, rk, p))?;
        }
    }
    Ok(sum - rho_e)
}

/// Mixture pressure with the default closure method.
pub fn mixture_pressure(z: &[f64], rho_k: &[f64], rho_e: f64, eos: &[EosSpec]) -> Result<f64> {
    mixture_pressure_with(z, rho_k, rho_e, eos, ClosureMethod::Auto)
}

pub fn mixture_pressure_with(
    z: &[f64],
    rho_k: &[f64],
    rho_e: f64,
    eos: &[EosSpec],
    method: ClosureMethod,
) -> Result<f64> {
    check_inputs(z, rho_k, eos)?;
    let coeffs = present_coefficients(z, rho_k, eos)?;
    let p = match method {
        ClosureMethod::Auto if eos.iter().all(EosSpec::is_mie_gruneisen) => {
            closed_form_pressure(z, rho_k, rho_e, &coeffs)
        }
        _ => iterative_pressure(z, rho_k, rho_e, eos, &coeffs)?,
    };
    if !p.is_finite() {
        return Err(Error::Closure {
            residual: f64::NAN,
            cell: None,
        });
    }
    Ok(p)
}

fn iterative_pressure(z: &[f64], rho_k: &[f64], rho_e: f64, eos: &[EosSpec], coeffs: &Coeffs) -> Result<f64> {
    const MAX_EXPANSIONS: usize = 64;
    let residual = |p: f64| closure_residual(z, rho_k, rho_e, eos, p);
    // d(residual)/dp = sum Z_k xi_k
    let xi: f64 = z
        .iter()
        .zip(coeffs)
        .filter_map(|(&zk, c)| c.map(|c| zk / c.gruneisen))
        .sum();
    let scale = (rho_e.abs() / xi).max(f64::MIN_POSITIVE);

    let mut lo = 1e-8 * scale;
    let mut hi = 1e8 * scale;
    let mut r_lo = residual(lo)?;
    let mut step = scale;
    let mut n = 0;
    while r_lo > 0.0 {
        n += 1;
        if n > MAX_EXPANSIONS {
            return Err(Error::Closure { residual: r_lo, cell: None });
        }
        hi = lo;
        lo -= step;
        step *= 10.0;
        r_lo = residual(lo)?;
    }
    let mut r_hi = residual(hi)?;
    n = 0;
    while r_hi < 0.0 {
        n += 1;
        if n > MAX_EXPANSIONS {
            return Err(Error::Closure { residual: r_hi, cell: None });
        }
        lo = hi;
        hi *= 10.0;
        r_hi = residual(hi)?;
    }

    let mut p = 0.5 * (lo + hi);
    for _ in 0..400 {
        p = 0.5 * (lo + hi);
        if hi - lo <= 1e-8 * p.abs() {
            break;
        }
        if residual(p)? > 0.0 {
            hi = p;
        } else {
            lo = p;
        }
    }
    let mut r = residual(p)?;
    for _ in 0..8 {
        let next = p - r / xi;
        let r_next = residual(next)?;
        if !(r_next.abs() < r.abs()) {
            break;
        }
        p = next;
        r = r_next;
    }
    Ok(p)
}

/// Squared mixture sound speed `(sum Z_k rho_k xi_k c_k^2) / (rho xi)`.
pub fn mixture_sound_speed_sq(z: &[f64], rho_k: &[f64], p: f64, eos: &[EosSpec]) -> Result<f64> {
    check_inputs(z, rho_k, eos)?;
    let coeffs = present_coefficients(z, rho_k, eos)?;
    sound_speed_from(z, rho_k, p, &coeffs)
}

fn sound_speed_from(z: &[f64], rho_k: &[f64], p: f64, coeffs: &Coeffs) -> Result<f64> {
    let (mut num, mut rho, mut xi) = (0.0, 0.0, 0.0);
    for ((&zk, &rk), c) in z.iter().zip(rho_k).zip(coeffs) {
        if let Some(c) = c {
            let xik = 1.0 / c.gruneisen;
            if rk > 0.0 {
                num += zk * rk * xik * sound_speed_sq_from(c, rk, p);
            }
            rho += zk * rk;
            xi += zk * xik;
        }
    }
    let c2 = num / (rho * xi);
    if !(c2 > 0.0) || !c2.is_finite() {
        return Err(Error::Hyperbolicity { c2, cell: None });
    }
    Ok(c2)
}

/// Pressure and sound speed in one pass, evaluating each EOS once.
pub fn mixture_state(z: &[f64], rho_k: &[f64], rho_e: f64, eos: &[EosSpec]) -> Result<MixtureState> {
    check_inputs(z, rho_k, eos)?;
    let coeffs = present_coefficients(z, rho_k, eos)?;
    let p = closed_form_pressure(z, rho_k, rho_e, &coeffs);
    if !p.is_finite() {
        return Err(Error::Closure {
            residual: f64::NAN,
            cell: None,
        });
    }
    let c2 = sound_speed_from(z, rho_k, p, &coeffs)?;
    Ok(MixtureState { p, c2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::{phasic_energy, phasic_pressure, phasic_sound_speed_sq, phasic_xi};
    use approx::assert_relative_eq;

    fn test1_eos() -> Vec<EosSpec> {
        vec![
            EosSpec::perfect_gas(1.6).unwrap(),
            EosSpec::stiffened_gas(4.4, 6e8).unwrap(),
            EosSpec::van_der_waals(1.4, 5.0, 1e-3).unwrap(),
            EosSpec::stiffened_gas(2.4, 2e8).unwrap(),
            EosSpec::perfect_gas(1.6).unwrap(),
        ]
    }

    #[test]
    fn single_material_matches_phasic_pressure() {
        let eos = [EosSpec::stiffened_gas(4.4, 6e8).unwrap()];
        let e = 1.2e6;
        let p = mixture_pressure(&[1.0], &[1000.0], 1000.0 * e, &eos).unwrap();
        assert_relative_eq!(p, phasic_pressure(&eos[0], 1000.0, e).unwrap(), max_relative = 1e-13);
        let c2 = mixture_sound_speed_sq(&[1.0], &[1000.0], p, &eos).unwrap();
        assert_relative_eq!(c2, phasic_sound_speed_sq(&eos[0], 1000.0, p).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn two_perfect_gases_invert_forward_constructed_energy() {
        let eos = [EosSpec::perfect_gas(1.6).unwrap(), EosSpec::perfect_gas(2.4).unwrap()];
        let z = [0.5, 0.5];
        let rho = [1.0, 0.125];
        let rho_e = 0.5 * (1.0 / 0.6) + 0.5 * (1.0 / 1.4);
        assert_relative_eq!(rho_e, 1.1905, max_relative = 1e-4);
        for method in [ClosureMethod::Auto, ClosureMethod::Iterative] {
            let p = mixture_pressure_with(&z, &rho, rho_e, &eos, method).unwrap();
            assert_relative_eq!(p, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn identical_gases_give_common_sound_speed() {
        let eos = [EosSpec::perfect_gas(1.4).unwrap(), EosSpec::perfect_gas(1.4).unwrap()];
        let c2 = mixture_sound_speed_sq(&[0.3, 0.7], &[2.0, 2.0], 3.0, &eos).unwrap();
        assert_relative_eq!(c2, 1.4 * 3.0 / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn half_half_mixture_sound_speed_matches_direct_formula() {
        let eos = [EosSpec::perfect_gas(1.6).unwrap(), EosSpec::perfect_gas(2.4).unwrap()];
        let (z, rho, p) = ([0.5, 0.5], [1.0, 0.125], 0.1);
        let (xi1, xi2) = (1.0 / 0.6, 1.0 / 1.4);
        let (c1, c2) = (1.6 * p / 1.0, 2.4 * p / 0.125);
        let r = 0.5 * 1.0 + 0.5 * 0.125;
        let xi = 0.5 * xi1 + 0.5 * xi2;
        let direct = (0.5 * 1.0 * xi1 * c1 + 0.5 * 0.125 * xi2 * c2) / (r * xi);
        assert_relative_eq!(mixture_sound_speed_sq(&z, &rho, p, &eos).unwrap(), direct, max_relative = 1e-14);
        assert_relative_eq!(phasic_xi(&eos[0], 1.0).unwrap(), xi1);
    }

    /// Dense logarithmic scan of the residual sign, independent of the solver.
    fn scan_root(z: &[f64], rho: &[f64], rho_e: f64, eos: &[EosSpec]) -> f64 {
        let r = |p: f64| closure_residual(z, rho, rho_e, eos, p).unwrap();
        let mut prev = 1.0;
        let mut next = prev;
        for i in 1..=20_000 {
            next = 10f64.powf(i as f64 * 15.0 / 20_000.0);
            if r(prev) <= 0.0 && r(next) > 0.0 {
                break;
            }
            prev = next;
        }
        let (mut lo, mut hi) = (prev, next);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if r(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn van_der_waals_mixture_matches_dense_scan() {
        let eos = test1_eos();
        let z = [0.0, 0.2, 0.5, 0.3, 0.0];
        let rho = [50.0, 1000.0, 500.0, 1200.0, 150.0];
        let p_true = 1e5;
        let rho_e: f64 = (0..5)
            .filter(|&k| z[k] > 0.0)
            .map(|k| z[k] * rho[k] * phasic_energy(&eos[k], rho[k], p_true).unwrap())
            .sum();
        let reference = scan_root(&z, &rho, rho_e, &eos);
        let it = mixture_pressure_with(&z, &rho, rho_e, &eos, ClosureMethod::Iterative).unwrap();
        let cf = mixture_pressure_with(&z, &rho, rho_e, &eos, ClosureMethod::Auto).unwrap();
        assert_relative_eq!(it, reference, max_relative = 1e-10);
        assert_relative_eq!(cf, reference, max_relative = 1e-10);
        assert_relative_eq!(it, p_true, max_relative = 1e-10);
    }

    #[test]
    fn sound_speed_positive_for_test1_pure_states() {
        let eos = test1_eos();
        let rho = [50.0, 1000.0, 500.0, 1200.0, 150.0];
        for k in 0..5 {
            let mut z = [0.0; 5];
            z[k] = 1.0;
            assert!(mixture_sound_speed_sq(&z, &rho, 1e5, &eos).unwrap() > 0.0);
        }
    }

    #[test]
    fn trace_phase_keeps_its_share_of_energy() {
        let eos = [EosSpec::perfect_gas(1.4).unwrap(), EosSpec::perfect_gas(2.0).unwrap()];
        let z = [1.0 - 1e-9, 1e-9];
        let rho = [1.0, 0.0];
        let rho_e = 2.5 * z[0] + z[1];
        for method in [ClosureMethod::Auto, ClosureMethod::Iterative] {
            let p = mixture_pressure_with(&z, &rho, rho_e, &eos, method).unwrap();
            assert_relative_eq!(p, 1.0, max_relative = 1e-14);
        }
        assert!(mixture_state(&z, &rho, rho_e, &eos).is_ok());
    }

    #[test]
    fn failing_trace_phase_is_dropped() {
        let eos = [EosSpec::perfect_gas(1.4).unwrap(), EosSpec::van_der_waals(1.4, 1.0, 1e-3).unwrap()];
        // beyond the covolume limit
        let rho = [1.0, 2000.0];
        assert!(mixture_pressure(&[1.0 - 1e-9, 1e-9], &rho, 2.5, &eos).is_ok());
        assert!(mixture_pressure(&[0.5, 0.5], &rho, 2.5, &eos).is_err());
    }

    #[test]
    fn off_simplex_input_is_rejected() {
        let eos = [EosSpec::perfect_gas(1.4).unwrap(), EosSpec::perfect_gas(2.0).unwrap()];
        assert!(mixture_pressure(&[0.6, 0.6], &[1.0, 1.0], 1.0, &eos).is_err());
    }

    #[test]
    fn negative_sound_speed_is_hyperbolicity_error() {
        // a strongly attractive Van der Waals fluid at low pressure
        let eos = [EosSpec::van_der_waals(1.4, 1e4, 1e-4).unwrap()];
        let p = 1.0;
        assert!(phasic_sound_speed_sq(&eos[0], 500.0, p).unwrap() < 0.0);
        assert!(matches!(
            mixture_sound_speed_sq(&[1.0], &[500.0], p, &eos),
            Err(Error::Hyperbolicity { .. })
        ));
    }
}
