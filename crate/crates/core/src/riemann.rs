//! Exact Riemann solver for perfect and stiffened gases, and the reference
//! solution of two juxtaposed Riemann problems.
//!
//! A stiffened gas with pressure `p` behaves like a perfect gas with
//! pressure `p + pi`, so all wave relations are written in the shifted
//! pressure `P = p + pi`.

use crate::eos::EosSpec;
use crate::error::{Error, Result};
use crate::state::PrimitiveState;

/// Midpoint-rule points per cell used for reference cell averages.
pub const REFERENCE_SAMPLES: usize = 32;

/// Constant state of a perfect or stiffened gas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasState {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
    pub gamma: f64,
    pub pi: f64,
}

impl GasState {
    pub fn new(rho: f64, u: f64, p: f64, gamma: f64, pi: f64) -> Result<Self> {
        let s = GasState { rho, u, p, gamma, pi };
        if !(rho > 0.0) || !(gamma > 1.0) || !(pi >= 0.0) || !(p + pi > 0.0) || !u.is_finite() {
            return Err(Error::State {
                reason: format!("unphysical Riemann state {s:?}"),
                cell: None,
            });
        }
        Ok(s)
    }

    /// State with the parameters of a perfect or stiffened gas EOS.
    pub fn with_eos(rho: f64, u: f64, p: f64, eos: &EosSpec) -> Result<Self> {
        match *eos {
            EosSpec::PerfectGas { gamma } => Self::new(rho, u, p, gamma, 0.0),
            EosSpec::StiffenedGas { gamma, pi } => Self::new(rho, u, p, gamma, pi),
            _ => Err(Error::Config(
                "the exact Riemann solver supports perfect and stiffened gases only".into(),
            )),
        }
    }

    fn shifted(&self) -> f64 {
        self.p + self.pi
    }

    pub fn sound_speed(&self) -> f64 {
        (self.gamma * self.shifted() / self.rho).sqrt()
    }

    fn with(&self, rho: f64, u: f64, p: f64) -> Self {
        GasState { rho, u, p, ..*self }
    }
}

/// Nonlinear wave on one side of the contact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wave {
    Shock { speed: f64 },
    /// Head and tail speeds; equal for a wave of zero strength.
    Rarefaction { head: f64, tail: f64 },
}

impl Wave {
    /// Speed of the edge that first meets undisturbed fluid.
    pub fn leading_speed(&self) -> f64 {
        match *self {
            Wave::Shock { speed } => speed,
            Wave::Rarefaction { head, .. } => head,
        }
    }
}

/// Self-similar solution of a Riemann problem centred at `x = 0, t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolution {
    pub left: GasState,
    pub right: GasState,
    pub p_star: f64,
    pub u_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
    pub left_wave: Wave,
    pub right_wave: Wave,
}

/// Point value of a Riemann fan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
    /// `false` left of the contact, `true` right of it.
    pub right_material: bool,
}

/// Velocity jump across the wave facing `s` when the star pressure is `p`,
/// and its derivative.
fn wave_function(s: &GasState, p: f64) -> (f64, f64) {
    let (g, pk) = (s.gamma, s.shifted());
    let pp = p + s.pi;
    if pp > pk {
        let a = 2.0 / ((g + 1.0) * s.rho);
        let b = (g - 1.0) / (g + 1.0) * pk;
        let q = (a / (pp + b)).sqrt();
        ((pp - pk) * q, q * (1.0 - 0.5 * (pp - pk) / (pp + b)))
    } else {
        let c = s.sound_speed();
        let e = (g - 1.0) / (2.0 * g);
        let r = pp / pk;
        (2.0 * c / (g - 1.0) * (r.powf(e) - 1.0), r.powf(-(g + 1.0) / (2.0 * g)) / (s.rho * c))
    }
}

fn star_density(s: &GasState, p: f64) -> f64 {
    let (g, r) = (s.gamma, (p + s.pi) / s.shifted());
    if r > 1.0 {
        let mu = (g - 1.0) / (g + 1.0);
        s.rho * (r + mu) / (mu * r + 1.0)
    } else {
        s.rho * r.powf(1.0 / g)
    }
}

/// Shock speed magnitude relative to the fluid ahead.
fn shock_factor(s: &GasState, p: f64) -> f64 {
    let (g, r) = (s.gamma, (p + s.pi) / s.shifted());
    s.sound_speed() * ((g + 1.0) / (2.0 * g) * r + (g - 1.0) / (2.0 * g)).sqrt()
}

const MAX_ITER: usize = 200;

/// Solves the Riemann problem between two perfect or stiffened gas states.
pub fn solve_exact(left: GasState, right: GasState) -> Result<RiemannSolution> {
    let du = right.u - left.u;
    let f = |p: f64| {
        let (fl, dl) = wave_function(&left, p);
        let (fr, dr) = wave_function(&right, p);
        (fl + fr + du, dl + dr)
    };
    // the pressure function is increasing and concave on p > p_min
    let p_min = -left.pi.min(right.pi);
    let f_min = f(p_min).0;
    if f_min >= 0.0 {
        return Err(Error::Vacuum(f_min));
    }

    let mut lo = p_min;
    let mut hi = left.p.max(right.p).max(p_min + 1.0);
    while f(hi).0 < 0.0 {
        hi = p_min + 2.0 * (hi - p_min);
        if !hi.is_finite() {
            return Err(Error::Config("pressure function has no finite root".into()));
        }
    }
    // acoustic guess, kept inside the bracket
    let (zl, zr) = (left.rho * left.sound_speed(), right.rho * right.sound_speed());
    let mut p = (zr * left.p + zl * right.p - zl * zr * du) / (zl + zr);
    if !(p > lo && p < hi) {
        p = 0.5 * (lo + hi);
    }
    let scale = |p: f64| (p + left.pi.max(right.pi)).abs().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_ITER {
        let (v, d) = f(p);
        if v == 0.0 {
            break;
        }
        if v < 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        let mut next = p - v / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - p).abs() <= 1e-15 * scale(next) || hi - lo <= 1e-15 * scale(p);
        p = next;
        if done {
            break;
        }
    }

    let (fl, _) = wave_function(&left, p);
    let (fr, _) = wave_function(&right, p);
    let u_star = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
    let rho_star_left = star_density(&left, p);
    let rho_star_right = star_density(&right, p);
    let left_wave = if p + left.pi > left.shifted() {
        Wave::Shock {
            speed: left.u - shock_factor(&left, p),
        }
    } else {
        let cs = left.with(rho_star_left, u_star, p).sound_speed();
        Wave::Rarefaction {
            head: left.u - left.sound_speed(),
            tail: u_star - cs,
        }
    };
    let right_wave = if p + right.pi > right.shifted() {
        Wave::Shock {
            speed: right.u + shock_factor(&right, p),
        }
    } else {
        let cs = right.with(rho_star_right, u_star, p).sound_speed();
        Wave::Rarefaction {
            head: right.u + right.sound_speed(),
            tail: u_star + cs,
        }
    };
    Ok(RiemannSolution {
        left,
        right,
        p_star: p,
        u_star,
        rho_star_left,
        rho_star_right,
        left_wave,
        right_wave,
    })
}

impl RiemannSolution {
    /// Residual of the pressure equation at the computed root, relative to
    /// the velocity scale of the problem.
    pub fn residual(&self) -> f64 {
        let (fl, _) = wave_function(&self.left, self.p_star);
        let (fr, _) = wave_function(&self.right, self.p_star);
        let scale = self.left.sound_speed() + self.right.sound_speed() + self.left.u.abs() + self.right.u.abs();
        (fl + fr + self.right.u - self.left.u).abs() / scale
    }

    /// State on the ray `x / t = xi`.
    pub fn sample(&self, xi: f64) -> Sample {
        let right_material = xi >= self.u_star;
        let (s, wave, rho_star, sign) = if right_material {
            (&self.right, self.right_wave, self.rho_star_right, 1.0)
        } else {
            (&self.left, self.left_wave, self.rho_star_left, -1.0)
        };
        let star = Sample {
            rho: rho_star,
            u: self.u_star,
            p: self.p_star,
            right_material,
        };
        let outer = Sample {
            rho: s.rho,
            u: s.u,
            p: s.p,
            right_material,
        };
        // `sign * xi` grows away from the contact
        match wave {
            Wave::Shock { speed } => {
                if sign * xi >= sign * speed {
                    outer
                } else {
                    star
                }
            }
            Wave::Rarefaction { head, tail } => {
                if sign * xi >= sign * head {
                    outer
                } else if sign * xi <= sign * tail {
                    star
                } else {
                    let (g, c) = (s.gamma, s.sound_speed());
                    let k = 2.0 / (g + 1.0);
                    let u = k * (-sign * c + 0.5 * (g - 1.0) * s.u + xi);
                    let cf = k * (c - sign * 0.5 * (g - 1.0) * (s.u - xi));
                    let ratio = cf / c;
                    Sample {
                        rho: s.rho * ratio.powf(2.0 / (g - 1.0)),
                        u,
                        p: s.shifted() * ratio.powf(2.0 * g / (g - 1.0)) - s.pi,
                        right_material,
                    }
                }
            }
        }
    }
}

/// Reference solution of two adjacent Riemann problems at `x0 < x1`: the
/// right-going shock of the first one hits the contact at `x1` at
/// `t_shock`, which starts a second Riemann problem there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Juxtaposed {
    pub x0: f64,
    pub x1: f64,
    pub first: RiemannSolution,
    pub second: RiemannSolution,
    pub t_shock: f64,
    /// The reference stops being exact when the left-going wave of the
    /// second problem reaches the first contact.
    pub window_end: f64,
}

/// Point value of the juxtaposed reference, with the 0-based material index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JuxtaposedSample {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
    pub material: usize,
}

pub fn compose_juxtaposed(x0: f64, x1: f64, states: [GasState; 3]) -> Result<Juxtaposed> {
    if !(x1 > x0) {
        return Err(Error::Config(format!("interfaces must satisfy x0 < x1 (got {x0}, {x1})")));
    }
    let [l, m, r] = states;
    if m.u != r.u || m.p != r.p {
        return Err(Error::Config(
            "the second interface must be a contact (equal u and p on both sides)".into(),
        ));
    }
    let first = solve_exact(l, m)?;
    let d1 = match first.right_wave {
        Wave::Shock { speed } if speed > 0.0 => speed,
        _ => {
            return Err(Error::Config(
                "the first Riemann problem must send a right-going shock".into(),
            ))
        }
    };
    let t_shock = (x1 - x0) / d1;
    let shocked = m.with(first.rho_star_right, first.u_star, first.p_star);
    let second = solve_exact(shocked, r)?;
    let lead = second.left_wave.leading_speed();
    let window_end = if lead < first.u_star {
        (x1 - x0 - lead * t_shock) / (first.u_star - lead)
    } else {
        f64::INFINITY
    };
    Ok(Juxtaposed {
        x0,
        x1,
        first,
        second,
        t_shock,
        window_end,
    })
}

impl Juxtaposed {
    /// Shock speed of the first problem.
    pub fn d1(&self) -> f64 {
        self.first.right_wave.leading_speed()
    }

    /// Right-going wave speed of the second problem.
    pub fn d2(&self) -> f64 {
        self.second.right_wave.leading_speed()
    }

    /// Position of the leading right-going shock at time `t`.
    pub fn shock_position(&self, t: f64) -> f64 {
        if t <= self.t_shock {
            self.x0 + self.d1() * t
        } else {
            self.x1 + self.d2() * (t - self.t_shock)
        }
    }

    pub fn sample(&self, x: f64, t: f64) -> Result<JuxtaposedSample> {
        if t > self.window_end * (1.0 + 1e-12) || t < 0.0 {
            return Err(Error::OutsideWindow {
                t,
                window_end: self.window_end,
            });
        }
        let from_first = |s: Sample| JuxtaposedSample {
            rho: s.rho,
            u: s.u,
            p: s.p,
            material: s.right_material as usize,
        };
        if t == 0.0 {
            let s = if x < self.x0 {
                self.first.left
            } else if x <= self.x1 {
                self.first.right
            } else {
                self.second.right
            };
            let material = if x < self.x0 { 0 } else if x <= self.x1 { 1 } else { 2 };
            return Ok(JuxtaposedSample {
                rho: s.rho,
                u: s.u,
                p: s.p,
                material,
            });
        }
        let second_front = if t <= self.t_shock {
            self.x1
        } else {
            self.x1 + self.second.left_wave.leading_speed() * (t - self.t_shock)
        };
        if x < second_front || (t <= self.t_shock && x == self.x1) {
            return Ok(from_first(self.first.sample((x - self.x0) / t)));
        }
        if t <= self.t_shock {
            let r = self.second.right;
            return Ok(JuxtaposedSample {
                rho: r.rho,
                u: r.u,
                p: r.p,
                material: 2,
            });
        }
        let s = self.second.sample((x - self.x1) / (t - self.t_shock));
        Ok(JuxtaposedSample {
            rho: s.rho,
            u: s.u,
            p: s.p,
            material: 1 + s.right_material as usize,
        })
    }

    /// Reference profile at the cell centres `xs`, as pure-material states
    /// among `m` materials.
    pub fn profile(&self, xs: &[f64], t: f64, m: usize) -> Result<Vec<PrimitiveState>> {
        xs.iter()
            .map(|&x| {
                let s = self.sample(x, t)?;
                Ok(PrimitiveState::pure(m, s.material, s.rho, [s.u, 0.0], s.p))
            })
            .collect()
    }

    /// Reference cell averages over `[x - dx/2, x + dx/2]` for each centre,
    /// by the midpoint rule on `samples` points per cell. Density, velocity,
    /// pressure and color functions are volume averages, mass fractions and
    /// phasic densities mass averages.
    pub fn cell_averages(&self, xs: &[f64], dx: f64, t: f64, m: usize, samples: usize) -> Result<Vec<PrimitiveState>> {
        let n = samples.max(1);
        let w = 1.0 / n as f64;
        xs.iter()
            .map(|&xc| {
                let (mut rho, mut u, mut p) = (0.0, 0.0, 0.0);
                let mut z = vec![0.0; m];
                let mut mass = vec![0.0; m];
                for j in 0..n {
                    let s = self.sample(xc + dx * ((j as f64 + 0.5) * w - 0.5), t)?;
                    rho += w * s.rho;
                    u += w * s.u;
                    p += w * s.p;
                    z[s.material] += w;
                    mass[s.material] += w * s.rho;
                }
                let y = mass.iter().map(|q| q / rho).collect();
                let rho_k = mass.iter().zip(&z).map(|(&q, &zk)| if zk > 0.0 { q / zk } else { 0.0 }).collect();
                Ok(PrimitiveState {
                    rho,
                    u: [u, 0.0],
                    p,
                    z,
                    y,
                    rho_k,
                })
            })
            .collect()
    }
}

/// Juxtaposed reference for a three-region 1D case laid out as
/// `[lo, x0) | [x0, x1) | rest` with materials 1, 2, 3.
pub fn juxtaposed_for_case(cfg: &crate::cases::CaseConfig) -> Result<Juxtaposed> {
    use crate::cases::Shape;
    let bad = || Error::Config(format!("case {} is not a pair of juxtaposed Riemann problems", cfg.name));
    if cfg.dims() != 1 || cfg.regions.len() != 3 || cfg.materials() != 3 {
        return Err(bad());
    }
    let eos = cfg.eos_specs()?;
    let (x0, x1) = match (&cfg.regions[0].shape, &cfg.regions[1].shape, &cfg.regions[2].shape) {
        (Shape::Interval { hi: a, .. }, Shape::Interval { lo: b, hi: c }, Shape::All) if a == b => (*a, *c),
        _ => return Err(bad()),
    };
    let mut states = Vec::with_capacity(3);
    for (k, r) in cfg.regions.iter().enumerate() {
        if r.material != k + 1 {
            return Err(bad());
        }
        states.push(GasState::with_eos(r.rho, r.velocity()[0], r.p, &eos[k])?);
    }
    compose_juxtaposed(x0, x1, [states[0], states[1], states[2]])
}
