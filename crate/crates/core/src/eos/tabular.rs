//! Tabulated Mie-Gruneisen curves with monotone piecewise-cubic interpolation.

use std::path::Path;

use crate::eos::MgCoefficients;
use crate::error::{Error, Result};

/// Monotone cubic Hermite interpolant (Fritsch-Carlson slopes with
/// harmonic-mean weighting). Preserves monotonicity of the samples and has a
/// continuous first derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Config(
                "monotone interpolation needs at least two (x, y) samples".into(),
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("interpolation abscissae must be strictly increasing".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Config("interpolation samples must be finite".into()));
        }
        let slope = fritsch_carlson_slopes(&x, &y);
        Ok(MonotoneCubic { x, y, slope })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Value and first derivative at `t`, or `None` outside the sample range.
    pub fn eval(&self, t: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return None;
        }
        let k = match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            n if n >= self.x.len() => self.x.len() - 2,
            n => n - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (y0, y1) = (self.y[k], self.y[k + 1]);
        let (m0, m1) = (self.slope[k], self.slope[k + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let value = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -d00;
        let d11 = 3.0 * s2 - 2.0 * s;
        let deriv = (d00 * y0 + d01 * y1) / h + d10 * m0 + d11 * m1;
        Some((value, deriv))
    }
}

fn fritsch_carlson_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        if a * b > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / a + w2 / b);
        }
    }
    d[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

/// One-sided three-point end slope, limited to keep the end interval monotone.
fn edge_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() || m0 == 0.0 {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

/// Mie-Gruneisen material given by sampled `Gamma(rho)`, `e_ref(rho)` and
/// `p_ref(rho)` curves.
#[derive(Debug, Clone, PartialEq)]
pub struct MieGruneisenTable {
    gruneisen: MonotoneCubic,
    e_ref: MonotoneCubic,
    p_ref: MonotoneCubic,
}

impl MieGruneisenTable {
    /// Builds the table from `(rho, Gamma, e_ref, p_ref)` rows.
    pub fn from_rows(rows: &[[f64; 4]]) -> Result<Self> {
        let col = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<_>>();
        let rho = col(0);
        if rho.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("EOS table densities must be strictly increasing".into()));
        }
        if rows.iter().any(|r| !(r[0] > 0.0) || !(r[1] > 0.0)) {
            return Err(Error::Config(
                "EOS table requires positive densities and Gruneisen coefficients".into(),
            ));
        }
        Ok(MieGruneisenTable {
            gruneisen: MonotoneCubic::new(rho.clone(), col(1))?,
            e_ref: MonotoneCubic::new(rho.clone(), col(2))?,
            p_ref: MonotoneCubic::new(rho, col(3))?,
        })
    }

    /// Reads a CSV file with a `rho,Gamma,e_ref,p_ref` header.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut rows = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            if record.len() != 4 {
                return Err(Error::Config(format!(
                    "{}: row {} has {} columns, expected rho,Gamma,e_ref,p_ref",
                    path.display(),
                    line + 1,
                    record.len()
                )));
            }
            let mut row = [0.0; 4];
            for (slot, field) in row.iter_mut().zip(record.iter()) {
                *slot = field.parse().map_err(|_| {
                    Error::Config(format!("{}: row {}: bad number {field:?}", path.display(), line + 1))
                })?;
            }
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    pub fn density_range(&self) -> (f64, f64) {
        self.gruneisen.domain()
    }

    pub(crate) fn coefficients(&self, rho: f64) -> Result<MgCoefficients> {
        let out_of_range = || {
            let (lo, hi) = self.density_range();
            Error::EosDomain(format!("density {rho} outside tabulated range [{lo}, {hi}]"))
        };
        let (gruneisen, d_gruneisen) = self.gruneisen.eval(rho).ok_or_else(out_of_range)?;
        let (e_ref, d_e_ref) = self.e_ref.eval(rho).ok_or_else(out_of_range)?;
        let (p_ref, d_p_ref) = self.p_ref.eval(rho).ok_or_else(out_of_range)?;
        Ok(MgCoefficients {
            gruneisen,
            e_ref,
            p_ref,
            d_gruneisen,
            d_e_ref,
            d_p_ref,
        })
    }
}
