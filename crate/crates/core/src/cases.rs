//! Case definitions: the configuration schema for user cases and the
//! built-in benchmark problems.
//!
//! A case lists its materials, then an ordered list of regions. Each cell is
//! assigned to the first region whose shape contains the cell centre, so
//! later regions act as backgrounds for earlier ones.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::eos::{EosSpec, MieGruneisenTable};
use crate::error::{Error, Result};
use crate::remap::Scheme;
use crate::state::{conserved_from_primitive, Boundaries, Boundary, FieldSet, Grid, PrimitiveState};

/// Equation of state as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EosConfig {
    PerfectGas { gamma: f64 },
    StiffenedGas { gamma: f64, pi: f64 },
    VanDerWaals { gamma: f64, a: f64, b: f64 },
    /// CSV table with `rho,Gamma,e_ref,p_ref` rows.
    Tabular { path: PathBuf },
}

impl EosConfig {
    pub fn to_spec(&self) -> Result<EosSpec> {
        match self {
            EosConfig::PerfectGas { gamma } => EosSpec::perfect_gas(*gamma),
            EosConfig::StiffenedGas { gamma, pi } => EosSpec::stiffened_gas(*gamma, *pi),
            EosConfig::VanDerWaals { gamma, a, b } => EosSpec::van_der_waals(*gamma, *a, *b),
            EosConfig::Tabular { path } => Ok(EosSpec::MieGruneisenTabular(Arc::new(
                MieGruneisenTable::from_csv_path(path)?,
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialConfig {
    pub name: String,
    pub eos: EosConfig,
}

/// Geometric predicate evaluated at cell centres. 1D cases only look at `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    All,
    /// `lo <= x < hi`.
    Interval { lo: f64, hi: f64 },
    /// `normal . x < offset`.
    HalfPlane { normal: [f64; 2], offset: f64 },
    /// Closed axis-aligned box.
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
    /// `|x - center| <= radius`.
    Disk { center: [f64; 2], radius: f64 },
    /// `inner < |x - center| <= outer`.
    Ring { center: [f64; 2], inner: f64, outer: f64 },
    /// Open slab `lo < normal . x < hi`.
    Band { normal: [f64; 2], lo: f64, hi: f64 },
    Intersection { shapes: Vec<Shape> },
}

impl Shape {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let dot = |n: &[f64; 2]| n[0] * p[0] + n[1] * p[1];
        let dist2 = |c: &[f64; 2]| (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
        match self {
            Shape::All => true,
            Shape::Interval { lo, hi } => *lo <= p[0] && p[0] < *hi,
            Shape::HalfPlane { normal, offset } => dot(normal) < *offset,
            Shape::Rectangle { lo, hi } => (0..2).all(|d| lo[d] <= p[d] && p[d] <= hi[d]),
            Shape::Disk { center, radius } => dist2(center) <= radius * radius,
            Shape::Ring { center, inner, outer } => {
                let d2 = dist2(center);
                inner * inner < d2 && d2 <= outer * outer
            }
            Shape::Band { normal, lo, hi } => {
                let s = dot(normal);
                *lo < s && s < *hi
            }
            Shape::Intersection { shapes } => shapes.iter().all(|s| s.contains(p)),
        }
    }

    /// Hexagonal region bounded by the strip `|y - cy| < h / 2` and two bands
    /// of slope `±√3` and vertical width `2h` through the centre.
    pub fn star(center: [f64; 2], h: f64) -> Shape {
        let s3 = 3f64.sqrt();
        let [cx, cy] = center;
        Shape::Intersection {
            shapes: vec![
                Shape::Band {
                    normal: [0.0, 1.0],
                    lo: cy - h / 2.0,
                    hi: cy + h / 2.0,
                },
                Shape::Band {
                    normal: [-s3, 1.0],
                    lo: cy - h - s3 * cx,
                    hi: cy + h - s3 * cx,
                },
                Shape::Band {
                    normal: [s3, 1.0],
                    lo: cy - h + s3 * cx,
                    hi: cy + h + s3 * cx,
                },
            ],
        }
    }
}

/// A region of uniform initial state, filled with one material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub shape: Shape,
    /// 1-based material index.
    pub material: usize,
    pub rho: f64,
    pub p: f64,
    /// Velocity; 1D cases may give a single component.
    #[serde(default)]
    pub u: Vec<f64>,
}

impl Region {
    pub fn velocity(&self) -> [f64; 2] {
        [
            self.u.first().copied().unwrap_or(0.0),
            self.u.get(1).copied().unwrap_or(0.0),
        ]
    }
}

/// Velocity field added on top of the region states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Perturbation {
    /// `v += amplitude sin(wavenumber pi x) sum_b exp(-(y - b)^2 / (2 sigma^2))`.
    KelvinHelmholtz {
        amplitude: f64,
        sigma: f64,
        bands: Vec<f64>,
        #[serde(default = "default_wavenumber")]
        wavenumber: f64,
    },
}

fn default_wavenumber() -> f64 {
    4.0
}

impl Perturbation {
    pub fn velocity(&self, p: [f64; 2]) -> [f64; 2] {
        match self {
            Perturbation::KelvinHelmholtz {
                amplitude,
                sigma,
                bands,
                wavenumber,
            } => {
                let g: f64 = bands
                    .iter()
                    .map(|b| (-(p[1] - b).powi(2) / (2.0 * sigma * sigma)).exp())
                    .sum();
                [0.0, amplitude * (wavenumber * PI * p[0]).sin() * g]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConfig {
    pub x: [Boundary; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<[Boundary; 2]>,
}

impl BoundaryConfig {
    pub fn uniform(b: Boundary, dims: usize) -> Self {
        BoundaryConfig {
            x: [b; 2],
            y: (dims == 2).then_some([b; 2]),
        }
    }
}

/// Full description of a simulation case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Free-form remarks carried along with the case.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Lower domain corner, one entry per dimension.
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub cells: Vec<usize>,
    pub cfl: f64,
    pub t_end: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_every: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub boundaries: BoundaryConfig,
    pub materials: Vec<MaterialConfig>,
    pub regions: Vec<Region>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
}

/// Identifiers accepted by [`builtin`].
pub const BUILTIN_IDS: [&str; 8] = [
    "test1",
    "test2",
    "test2-printed",
    "test3",
    "test4",
    "test5",
    "test6",
    "test7",
];

impl CaseConfig {
    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn materials(&self) -> usize {
        self.materials.len()
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: CaseConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim().to_owned()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative table paths are resolved against the
    /// file's directory.
    pub fn from_toml_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for mat in &mut cfg.materials {
            if let EosConfig::Tabular { path } = &mut mat.eos {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("case {}: {msg}", self.name)));
        let d = self.dims();
        if !(d == 1 || d == 2) || self.hi.len() != d || self.cells.len() != d {
            return bad(format!(
                "lo, hi and cells must all have 1 or 2 entries (got {}, {}, {})",
                self.lo.len(),
                self.hi.len(),
                self.cells.len()
            ));
        }
        if (0..d).any(|k| !(self.hi[k] > self.lo[k])) {
            return bad("hi must exceed lo on every axis".into());
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad(format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be finite and non-negative, got {}", self.t_end));
        }
        if self.snapshot_every.is_some_and(|s| !(s > 0.0)) {
            return bad("snapshot_every must be positive".into());
        }
        if (d == 2) != self.boundaries.y.is_some() {
            return bad("y boundaries are required in 2D and forbidden in 1D".into());
        }
        self.grid_boundaries().validate()?;
        if self.materials.is_empty() {
            return bad("at least one material is required".into());
        }
        if self.regions.is_empty() {
            return bad("at least one region is required".into());
        }
        for (i, r) in self.regions.iter().enumerate() {
            if r.material == 0 || r.material > self.materials() {
                return bad(format!(
                    "region {} uses material {} but only 1..={} exist",
                    i + 1,
                    r.material,
                    self.materials()
                ));
            }
            if r.u.len() > d {
                return bad(format!("region {} has {} velocity components in {d}D", i + 1, r.u.len()));
            }
            if !(r.rho > 0.0) || !r.p.is_finite() {
                return bad(format!("region {} needs rho > 0 and a finite pressure", i + 1));
            }
        }
        Ok(())
    }

    fn grid_boundaries(&self) -> Boundaries {
        Boundaries {
            x: self.boundaries.x,
            y: self.boundaries.y.unwrap_or(self.boundaries.x),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        if self.dims() == 1 {
            Grid::new_1d(self.lo[0], self.hi[0], self.cells[0])
        } else {
            Grid::new_2d(
                [self.lo[0], self.lo[1]],
                [self.hi[0], self.hi[1]],
                self.cells[0],
                self.cells[1],
            )
        }
    }

    pub fn eos_specs(&self) -> Result<Vec<EosSpec>> {
        self.materials.iter().map(|m| m.eos.to_spec()).collect()
    }

    /// Index of the region containing `p`.
    pub fn region_at(&self, p: [f64; 2]) -> Option<usize> {
        self.regions.iter().position(|r| r.shape.contains(p))
    }

    /// Same case with material `k` renumbered `sigma[k]` (both 1-based).
    pub fn permuted(&self, sigma: &[usize]) -> Result<Self> {
        let m = self.materials();
        let mut seen = vec![false; m];
        if sigma.len() != m || sigma.iter().any(|&s| s == 0 || s > m || std::mem::replace(&mut seen[s - 1], true)) {
            return Err(Error::Config(format!("{sigma:?} is not a permutation of 1..={m}")));
        }
        let mut out = self.clone();
        for (k, &s) in sigma.iter().enumerate() {
            out.materials[s - 1] = self.materials[k].clone();
        }
        for r in &mut out.regions {
            r.material = sigma[r.material - 1];
        }
        Ok(out)
    }
}

/// Builds the initial field by sampling the regions at cell centres.
pub fn instantiate(cfg: &CaseConfig) -> Result<(FieldSet, Vec<EosSpec>)> {
    cfg.validate()?;
    let eos = cfg.eos_specs()?;
    let grid = cfg.grid()?;
    let m = cfg.materials();
    let mut field = FieldSet::new(grid, cfg.grid_boundaries(), m);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let x = grid.cell_center(i, j);
            let r = cfg.region_at(x).map(|r| &cfg.regions[r]).ok_or_else(|| {
                let at = if cfg.dims() == 1 {
                    format!("x = {}", x[0])
                } else {
                    format!("(x, y) = ({}, {})", x[0], x[1])
                };
                Error::Config(format!("case {}: no region covers the cell centre at {at}", cfg.name))
            })?;
            let mut u = r.velocity();
            if let Some(pert) = &cfg.perturbation {
                let du = pert.velocity(x);
                u = [u[0] + du[0], u[1] + du[1]];
            }
            if cfg.dims() == 1 {
                u[1] = 0.0;
            }
            let prim = PrimitiveState::pure(m, r.material - 1, r.rho, u, r.p);
            let cell = conserved_from_primitive(&prim, &eos).map_err(|e| e.with_cell(crate::CellIndex { i, j }))?;
            field.set(i, j, &cell);
        }
    }
    field.fill_ghost();
    Ok((field, eos))
}

/// Post-shock state behind a shock of Mach number `mach` running into a
/// quiescent perfect gas, in the frame where the gas ahead is at rest.
/// Returns `(rho, p, |u|)`.
pub fn shock_jump(gamma: f64, rho: f64, p: f64, mach: f64) -> (f64, f64, f64) {
    let m2 = mach * mach;
    let p2 = p * (1.0 + 2.0 * gamma / (gamma + 1.0) * (m2 - 1.0));
    let rho2 = rho * (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0);
    let w = mach * (gamma * p / rho).sqrt();
    (rho2, p2, w * (1.0 - rho / rho2))
}

pub fn builtin(id: &str) -> Result<CaseConfig> {
    builtin_with(id, false)
}

/// Built-in case. `fix_shock_table` replaces the air states of `test6` with
/// quiescent air ahead of a Mach 1.22 shock and the matching post-shock
/// state behind it.
pub fn builtin_with(id: &str, fix_shock_table: bool) -> Result<CaseConfig> {
    let cfg = match id {
        "test1" => test1(),
        "test2" => test2([1.4, 2.4, 1.6], "test2"),
        "test2-printed" => test2([1.6, 2.4, 1.4], "test2-printed"),
        "test3" => test3(),
        "test4" => test4(),
        "test5" => test5(),
        "test6" => test6(fix_shock_table),
        "test7" => test7(),
        _ => {
            return Err(Error::Config(format!(
                "unknown case '{id}' (known: {})",
                BUILTIN_IDS.join(", ")
            )))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

fn pg(name: &str, gamma: f64) -> MaterialConfig {
    MaterialConfig {
        name: name.into(),
        eos: EosConfig::PerfectGas { gamma },
    }
}

fn region(shape: Shape, material: usize, rho: f64, p: f64, u: &[f64]) -> Region {
    Region {
        shape,
        material,
        rho,
        p,
        u: u.to_vec(),
    }
}

fn base_1d(name: &str, description: &str, cells: usize, cfl: f64, t_end: f64, bc: Boundary) -> CaseConfig {
    CaseConfig {
        name: name.into(),
        description: description.into(),
        notes: Vec::new(),
        lo: vec![0.0],
        hi: vec![1.0],
        cells: vec![cells],
        cfl,
        t_end,
        scheme: Scheme::AntiDiffusive,
        snapshot_every: None,
        output: None,
        boundaries: BoundaryConfig::uniform(bc, 1),
        materials: Vec::new(),
        regions: Vec::new(),
        perturbation: None,
    }
}

fn test1() -> CaseConfig {
    let mut c = base_1d(
        "test1",
        "five-material passive transport, one period",
        100,
        0.9,
        0.01,
        Boundary::Periodic,
    );
    c.materials = vec![
        pg("pg-1.6", 1.6),
        MaterialConfig {
            name: "sg-4.4".into(),
            eos: EosConfig::StiffenedGas { gamma: 4.4, pi: 6e8 },
        },
        MaterialConfig {
            name: "vdw-1.4".into(),
            eos: EosConfig::VanDerWaals {
                gamma: 1.4,
                a: 5.0,
                b: 1e-3,
            },
        },
        MaterialConfig {
            name: "sg-2.4".into(),
            eos: EosConfig::StiffenedGas { gamma: 2.4, pi: 2e8 },
        },
        pg("pg-1.6b", 1.6),
    ];
    let x = [0.0, 0.1, 0.25, 0.7, 0.9, 1.0];
    let rho = [50.0, 1000.0, 500.0, 1200.0, 150.0];
    c.regions = (0..5)
        .map(|k| region(Shape::Interval { lo: x[k], hi: x[k + 1] }, k + 1, rho[k], 1e5, &[100.0]))
        .collect();
    c
}

fn test2(gamma: [f64; 3], name: &str) -> CaseConfig {
    let mut c = base_1d(
        name,
        "three-material juxtaposed Riemann problems",
        500,
        0.8,
        0.12,
        Boundary::Transparent,
    );
    if name == "test2-printed" {
        c.notes.push("gamma values in table order (1.6, 2.4, 1.4); wave speeds differ from the quoted ones".into());
    } else {
        c.notes
            .push("gamma = (1.4, 2.4, 1.6) reproduces the quoted D1 = 2.2780, t_shock = 0.0878, D2 = 2.034".into());
    }
    c.materials = vec![pg("left", gamma[0]), pg("middle", gamma[1]), pg("right", gamma[2])];
    c.regions = vec![
        region(Shape::Interval { lo: 0.0, hi: 0.4 }, 1, 1.0, 1.0, &[0.0]),
        region(Shape::Interval { lo: 0.4, hi: 0.6 }, 2, 0.125, 0.1, &[0.0]),
        region(Shape::All, 3, 0.1, 0.1, &[0.0]),
    ];
    c
}

fn test3() -> CaseConfig {
    let mut c = base_1d(
        "test3",
        "juxtaposed Riemann problems with a 1e4 pressure ratio",
        2000,
        0.8,
        270e-6,
        Boundary::Transparent,
    );
    c.materials = vec![
        MaterialConfig {
            name: "water".into(),
            eos: EosConfig::StiffenedGas { gamma: 4.4, pi: 6e8 },
        },
        pg("pg-2.4", 2.4),
        pg("air", 1.4),
    ];
    c.regions = vec![
        region(Shape::Interval { lo: 0.0, hi: 0.75 }, 1, 1000.0, 1e9, &[0.0]),
        region(Shape::Interval { lo: 0.75, hi: 0.95 }, 2, 50.0, 1e5, &[0.0]),
        region(Shape::All, 3, 1.0, 1e5, &[0.0]),
    ];
    c
}

fn base_2d(name: &str, description: &str, hi: [f64; 2], cells: [usize; 2], t_end: f64, bc: Boundary) -> CaseConfig {
    CaseConfig {
        name: name.into(),
        description: description.into(),
        notes: Vec::new(),
        lo: vec![0.0, 0.0],
        hi: hi.to_vec(),
        cells: cells.to_vec(),
        cfl: 0.8,
        t_end,
        scheme: Scheme::AntiDiffusive,
        snapshot_every: None,
        output: None,
        boundaries: BoundaryConfig::uniform(bc, 2),
        materials: Vec::new(),
        regions: Vec::new(),
        perturbation: None,
    }
}

fn test4() -> CaseConfig {
    let mut c = base_2d(
        "test4",
        "four-material passive transport of a disk, star and square",
        [60.0, 60.0],
        [200, 200],
        42.5,
        Boundary::Periodic,
    );
    c.materials = vec![pg("g2.2", 2.2), pg("g1.6", 1.6), pg("g1.4", 1.4), pg("g1.2", 1.2)];
    let u = [2f64.sqrt(), 3f64.sqrt()];
    c.regions = vec![
        region(
            Shape::Rectangle {
                lo: [27.5, 27.5],
                hi: [32.5, 32.5],
            },
            4,
            10.0,
            1.0,
            &u,
        ),
        region(Shape::star([30.0, 30.0], 15.0), 3, 1.0, 1.0, &u),
        region(
            Shape::Disk {
                center: [30.0, 30.0],
                radius: 15.0,
            },
            2,
            0.1,
            1.0,
            &u,
        ),
        region(Shape::All, 1, 0.01, 1.0, &u),
    ];
    c
}

fn test5() -> CaseConfig {
    let mut c = base_2d(
        "test5",
        "triple point",
        [7.0, 3.0],
        [700, 300],
        5.0,
        Boundary::Wall,
    );
    c.materials = vec![pg("driver", 1.6), pg("light", 1.5), pg("heavy", 1.4)];
    c.regions = vec![
        region(
            Shape::Rectangle {
                lo: [0.0, 0.0],
                hi: [1.0, 3.0],
            },
            1,
            1.0,
            1.0,
            &[0.0, 0.0],
        ),
        region(
            Shape::Rectangle {
                lo: [1.0, 1.5],
                hi: [7.0, 3.0],
            },
            2,
            0.125,
            0.1,
            &[0.0, 0.0],
        ),
        region(Shape::All, 3, 1.0, 0.1, &[0.0, 0.0]),
    ];
    c
}

/// Post-shock air state behind the Mach 1.22 shock of the shock-bubble case.
pub fn shock_bubble_post_shock() -> (f64, f64, f64) {
    shock_jump(1.4, 1.225, 101325.0, 1.22)
}

fn test6(fix_shock_table: bool) -> CaseConfig {
    let mut c = base_2d(
        "test6",
        "shock / helium bubble / R22 ring interaction",
        [0.445, 0.089],
        [1250, 250],
        1200e-6,
        Boundary::Wall,
    );
    c.materials = vec![pg("helium", 1.6), pg("r22", 1.249), pg("air", 1.4)];
    let center = [0.225, 0.0445];
    let x_shock = 0.275;
    let (left, right) = if fix_shock_table {
        let (rho, p, u) = shock_bubble_post_shock();
        c.notes.push(format!(
            "air states from the Mach 1.22 jump relations: quiescent air left of the shock, \
             rho = {rho}, p = {p}, u = {} behind it",
            -u
        ));
        ((1.225, 101325.0, 0.0), (rho, p, -u))
    } else {
        c.notes.push(
            "air states as tabulated; the pre/post-shock rows look swapped relative to a Mach 1.22 shock \
             (use --fix-shock-table for the jump-consistent states)"
                .into(),
        );
        ((1.686, 1.59e5, 0.0), (1.225, 101325.0, -113.5))
    };
    c.regions = vec![
        region(Shape::Disk { center, radius: 0.015 }, 1, 0.138, 101325.0, &[0.0, 0.0]),
        region(
            Shape::Ring {
                center,
                inner: 0.015,
                outer: 0.025,
            },
            2,
            3.863,
            101325.0,
            &[0.0, 0.0],
        ),
        region(
            Shape::HalfPlane {
                normal: [1.0, 0.0],
                offset: x_shock,
            },
            3,
            left.0,
            left.1,
            &[left.2, 0.0],
        ),
        region(Shape::All, 3, right.0, right.1, &[right.2, 0.0]),
    ];
    c
}

fn test7() -> CaseConfig {
    let mut c = base_2d(
        "test7",
        "three-material Kelvin-Helmholtz instability",
        [1.0, 1.0],
        [1000, 1000],
        2.0,
        Boundary::Periodic,
    );
    c.materials = vec![pg("light", 5.0 / 3.0), pg("core", 1.4), pg("sides", 2.4)];
    c.regions = vec![
        region(
            Shape::Rectangle {
                lo: [0.25, 0.25],
                hi: [0.75, 0.75],
            },
            2,
            2.0,
            2.5,
            &[0.5, 0.0],
        ),
        region(
            Shape::Rectangle {
                lo: [0.0, 0.25],
                hi: [1.0, 0.75],
            },
            3,
            2.0,
            2.5,
            &[0.5, 0.0],
        ),
        region(Shape::All, 1, 1.0, 2.5, &[-0.5, 0.0]),
    ];
    c.perturbation = Some(Perturbation::KelvinHelmholtz {
        amplitude: 0.1,
        sigma: 0.05 / 2f64.sqrt(),
        bands: vec![0.25, 0.75],
        wavenumber: 4.0,
    });
    c
}
