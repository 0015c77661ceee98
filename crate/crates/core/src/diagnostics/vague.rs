//! mu_t(f) along a t grid against the closed-form limit mu_bullet(f).

use crate::dilation::DilationStructure;
use crate::error::Result;
use crate::limits::LimitMeasure;
use crate::measures::{rescaled_measure_integral_tol, StepMeasure};
use crate::testfn::TestFunction;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct VagueRow {
    pub t: f64,
    pub f_index: usize,
    pub value: f64,
    pub error: f64,
    pub method: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitValue {
    pub f_index: usize,
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VagueTable {
    pub rows: Vec<VagueRow>,
    pub limits: Vec<LimitValue>,
    /// |mu_t(f) - mu_bullet(f)| / |mu_bullet(f)| at the largest t, per f.
    pub final_rel_err: Vec<f64>,
}

impl VagueTable {
    /// t, f_index, value, lo, hi, limit.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,f_index,value,lo,hi,limit\n");
        for r in &self.rows {
            let lim = self.limits.iter().find(|l| l.f_index == r.f_index).map(|l| l.value).unwrap_or(f64::NAN);
            s += &format!("{},{},{:e},{:e},{:e},{:e}\n", r.t, r.f_index, r.value, r.value - r.error, r.value + r.error, lim);
        }
        s
    }

    pub fn max_final_rel_err(&self) -> f64 {
        self.final_rel_err.iter().cloned().fold(0.0, f64::max)
    }
}

/// Tolerances: mu_t by continuum quadrature at `rel_tol`, the limit at rel_tol / 1000.
pub fn vague_convergence(
    m: &StepMeasure,
    d: &DilationStructure,
    limit: Option<&LimitMeasure>,
    fs: &[TestFunction],
    ts: &[f64],
    rel_tol: f64,
) -> Result<VagueTable> {
    let mut rows = Vec::new();
    for &t in ts {
        for (i, f) in fs.iter().enumerate() {
            let r = rescaled_measure_integral_tol(m, d, t, f, rel_tol)?;
            rows.push(VagueRow { t, f_index: i, value: r.value, error: r.error, method: r.method });
        }
    }
    let mut limits = Vec::new();
    let mut final_rel_err = Vec::new();
    if let Some(mu) = limit {
        let tmax = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (i, f) in fs.iter().enumerate() {
            let q = mu.integrate(f, (rel_tol * 1e-3).max(1e-9));
            limits.push(LimitValue { f_index: i, value: q.value, error: q.error });
            if let Some(r) = rows.iter().find(|r| r.t == tmax && r.f_index == i) {
                let rel = if q.value != 0.0 { (r.value - q.value).abs() / q.value.abs() } else { r.value.abs() };
                final_rel_err.push(rel);
            }
        }
    }
    Ok(VagueTable { rows, limits, final_rel_err })
}
