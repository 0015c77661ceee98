//! Limit Levy measures mu_bullet given by densities on coordinate subspaces.

use crate::dilation::DilationStructure;
use crate::error::{Error, Result};
use crate::measures::{RadialNorm, StepMeasure};
use crate::special::cyclic_constant;
use crate::quad::{integrate_box_dyn, QuadResult};
use crate::testfn::TestFunction;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LimitPart {
    /// kappa |x|^{-1-alpha} dx along one axis.
    AxisPower { axis: usize, kappa: f64, alpha: f64 },
    /// kappa |v|^{-m-alpha} dv on the listed axes.
    Radial { axes: Vec<usize>, kappa: f64, alpha: f64, norm: RadialNorm },
    /// kappa rho^{-alpha-4}, rho = sqrt(x1^2 + x2^2 + |x3 - s x1 x2|).
    Gauge { axes: Vec<usize>, kappa: f64, alpha: f64, shear: f64 },
}

impl LimitPart {
    pub fn axes(&self) -> Vec<usize> {
        match self {
            LimitPart::AxisPower { axis, .. } => vec![*axis],
            LimitPart::Radial { axes, .. } | LimitPart::Gauge { axes, .. } => axes.clone(),
        }
    }

    pub fn alpha(&self) -> f64 {
        match self {
            LimitPart::AxisPower { alpha, .. } | LimitPart::Radial { alpha, .. } | LimitPart::Gauge { alpha, .. } => *alpha,
        }
    }

    /// Density at the subspace coordinates v.
    pub fn density(&self, v: &[f64]) -> f64 {
        match self {
            LimitPart::AxisPower { kappa, alpha, .. } => kappa * v[0].abs().powf(-1.0 - alpha),
            LimitPart::Radial { kappa, alpha, norm, .. } => {
                let m = v.len() as f64;
                let r = match norm {
                    RadialNorm::L1 => v.iter().map(|x| x.abs()).sum::<f64>(),
                    RadialNorm::Euclid => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
                };
                kappa * r.powf(-m - alpha)
            }
            LimitPart::Gauge { kappa, alpha, shear, .. } => {
                let q = v[0] * v[0] + v[1] * v[1] + (v[2] - shear * v[0] * v[1]).abs();
                kappa * q.powf(-(alpha + 4.0) / 2.0)
            }
        }
    }

    fn breaks(&self, k: usize, prev: &[f64]) -> Vec<f64> {
        match (self, k) {
            (LimitPart::Gauge { shear, .. }, 2) => {
                let c = shear * prev[0] * prev[1];
                let w = prev[0] * prev[0] + prev[1] * prev[1];
                let mut out = vec![c];
                let mut s = w.max(1e-6) * 1e-3;
                while s < 1e3 {
                    out.push(c - s);
                    out.push(c + s);
                    s *= 8.0;
                }
                out
            }
            _ => vec![0.0],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LimitMeasure {
    pub dim: usize,
    pub parts: Vec<LimitPart>,
}

impl LimitMeasure {
    pub fn new(dim: usize, parts: Vec<LimitPart>) -> Result<Self> {
        for p in &parts {
            let a = p.alpha();
            // int min(1, |z|^2) mu(dz) < infinity iff 0 < alpha < 2 for these homogeneous densities.
            if !(a > 0.0 && a < 2.0) {
                return Err(Error::InvalidMeasure(format!("limit density with alpha = {a} is not a Levy measure")));
            }
            if p.axes().iter().any(|&i| i >= dim) {
                return Err(Error::Dimension { expected: dim, got: p.axes().into_iter().max().unwrap() + 1 });
            }
        }
        Ok(LimitMeasure { dim, parts })
    }

    /// mu_bullet(f) by nested adaptive quadrature over f's support box.
    pub fn integrate(&self, f: &TestFunction, rel_tol: f64) -> QuadResult {
        let (lo, hi) = f.support_box();
        let fb = f.breaks();
        let mut total = QuadResult { value: 0.0, error: 0.0, evals: 0, converged: true };
        for p in &self.parts {
            let axes = p.axes();
            if (0..self.dim).any(|i| !axes.contains(&i) && (lo[i] > 0.0 || hi[i] < 0.0)) {
                continue;
            }
            let plo: Vec<f64> = axes.iter().map(|&a| lo[a]).collect();
            let phi: Vec<f64> = axes.iter().map(|&a| hi[a]).collect();
            let dim = self.dim;
            let g = |v: &[f64]| {
                let mut u = vec![0.0; dim];
                for (k, &a) in axes.iter().enumerate() {
                    u[a] = v[k];
                }
                let fv = f.eval(&u);
                if fv == 0.0 {
                    0.0
                } else {
                    fv * p.density(v)
                }
            };
            let br = |k: usize, prev: &[f64]| {
                let mut b = fb[axes[k]].clone();
                b.extend(p.breaks(k, prev));
                b
            };
            let r = integrate_box_dyn(&g, &plo, &phi, &br, 0.0, rel_tol, 4000);
            total.value += r.value;
            total.error += r.error;
            total.evals += r.evals;
            total.converged &= r.converged;
        }
        total
    }

    /// Density of the part containing the point, summed over parts whose subspace contains it.
    pub fn density_at(&self, u: &[f64]) -> f64 {
        let mut s = 0.0;
        for p in &self.parts {
            let axes = p.axes();
            if (0..self.dim).all(|i| axes.contains(&i) || u[i] == 0.0) {
                let v: Vec<f64> = axes.iter().map(|&a| u[a]).collect();
                if v.iter().any(|x| *x != 0.0) {
                    s += p.density(&v);
                }
            }
        }
        s
    }
}

/// Limit of t delta_{1/t}(mu) for a measure whose components are all cyclic on
/// coordinate axes: axis i carries weight p c_alpha |x|^{-1-alpha} when
/// alpha b_i = 1 and vanishes when alpha b_i > 1.
pub fn axis_limit(m: &StepMeasure, d: &DilationStructure) -> Result<LimitMeasure> {
    let b = d.b_f64();
    let mut parts: Vec<LimitPart> = Vec::new();
    for c in &m.components {
        let g = c
            .linear_generator()
            .ok_or_else(|| Error::Unsupported("automatic limit needs axis-cyclic components; give `limit` explicitly".into()))?;
        let axis = (0..g.len())
            .find(|&i| g[i].abs() == 1 && (0..g.len()).all(|j| j == i || g[j] == 0))
            .ok_or_else(|| Error::Unsupported("automatic limit needs generators on coordinate axes".into()))?;
        let e = c.alpha * b[axis];
        if (e - 1.0).abs() < 1e-12 {
            let kappa = c.weight * cyclic_constant(c.alpha);
            match parts.iter_mut().find(|p| matches!(p, LimitPart::AxisPower { axis: a, alpha, .. } if *a == axis && *alpha == c.alpha)) {
                Some(LimitPart::AxisPower { kappa: k, .. }) => *k += kappa,
                _ => parts.push(LimitPart::AxisPower { axis, kappa, alpha: c.alpha }),
            }
        } else if e < 1.0 {
            return Err(Error::InvalidDilation(format!(
                "axis {} has alpha b = {e} < 1: t delta_(1/t)(mu) diverges",
                axis + 1
            )));
        }
    }
    LimitMeasure::new(m.dim(), parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::h3_matrix;
    use crate::measures::MeasureSpec;

    #[test]
    fn axis_limit_drops_fast_axes() {
        let m = StepMeasure::new(&h3_matrix(), &MeasureSpec::axis_cyclic(3, &[1.0, 1.5, 1.0])).unwrap();
        let d = DilationStructure::parse("1,2/3,5/3").unwrap();
        let mu = axis_limit(&m, &d).unwrap();
        assert_eq!(mu.parts.len(), 2);
        assert!(matches!(mu.parts[1], LimitPart::AxisPower { axis: 1, alpha, .. } if alpha == 1.5));
        let bad = DilationStructure::parse("1,1/2,5/3").unwrap();
        assert!(axis_limit(&m, &bad).is_err());
    }
}
