use std::fmt;

/// Grid coordinates of an interior cell (`j` is 0 in 1D).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellIndex {
    pub i: usize,
    pub j: usize,
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

fn at(cell: &Option<CellIndex>) -> String {
    match cell {
        Some(c) => format!(" at cell {c}"),
        None => String::new(),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("EOS domain violation: {0}")]
    EosDomain(String),

    #[error("EOS hypothesis violated (xi = {xi} must be positive)")]
    Hypothesis { xi: f64 },

    #[error("isobaric closure failed (residual {residual:e}){}", at(.cell))]
    Closure {
        residual: f64,
        cell: Option<CellIndex>,
    },

    #[error("loss of hyperbolicity: mixture c^2 = {c2:e}{}", at(.cell))]
    Hyperbolicity { c2: f64, cell: Option<CellIndex> },

    #[error("invalid state: {reason}{}", at(.cell))]
    State {
        reason: String,
        cell: Option<CellIndex>,
    },

    #[error("time step too large: Lagrangian volume factor L = {l}{}", at(.cell))]
    TimeStep { l: f64, cell: Option<CellIndex> },

    #[error("color function {value:e} of material {material} left [0, 1]{}", at(.cell))]
    Stability {
        material: usize,
        value: f64,
        cell: Option<CellIndex>,
    },

    #[error("empty flux interval [{lo}, {hi}] for material {material}")]
    EmptyInterval { material: usize, lo: f64, hi: f64 },

    #[error("vacuum generated by Riemann problem (pressure positivity test {0:e})")]
    Vacuum(f64),

    #[error("reference solution not valid at t = {t} (window ends at {window_end})")]
    OutsideWindow { t: f64, window_end: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("step {step} (t = {t:e}): {source}")]
    AtStep {
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Attaches a cell location to errors that carry one.
    pub fn with_cell(self, c: CellIndex) -> Self {
        match self {
            Error::Closure { residual, .. } => Error::Closure {
                residual,
                cell: Some(c),
            },
            Error::Hyperbolicity { c2, .. } => Error::Hyperbolicity { c2, cell: Some(c) },
            Error::State { reason, .. } => Error::State {
                reason,
                cell: Some(c),
            },
            Error::TimeStep { l, .. } => Error::TimeStep { l, cell: Some(c) },
            Error::Stability {
                material, value, ..
            } => Error::Stability {
                material,
                value,
                cell: Some(c),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
