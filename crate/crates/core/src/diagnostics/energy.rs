//! Rescaled lattice Dirichlet forms E^(t) and the limit form E_bullet.
//!
//! Both forms are written over a box S containing supp u and supp v:
//!
//!   E(u,v) = 1/2 int_S [ sum_{g : xg in S} w(g) (u(x)-u(xg)) (v(x)-v(xg))
//!                        + 2 u(x) v(x) w({g : xg not in S}) ] dx,
//!
//! which uses right invariance of Lebesgue measure (the laws are unimodular).
//! For E^(t) the jumps are x ._t delta_{1/t}(s^k) with weight t mu(s^k), summed
//! exactly over k for |k| <= 256 and by quadrature in k beyond; the sum over
//! x in Gamma_t is replaced by Gauss-Legendre cubature of the same smooth
//! integrand. The error estimate is the change between 12 and 16 nodes per axis.

use crate::dilation::DilationStructure;
use crate::error::{Error, Result};
use crate::group::GroupLaw;
use crate::limits::{LimitMeasure, LimitPart};
use crate::measures::StepMeasure;
use crate::quad::{gauss_legendre, integrate_breaks};
use crate::testfn::TestFunction;
use serde::Serialize;

const EXACT_K: i64 = 256;

#[derive(Clone, Debug, Serialize)]
pub struct FormValue {
    pub value: f64,
    pub error: f64,
    pub method: String,
}

fn union_box(u: &TestFunction, v: &TestFunction) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = u.support_box();
    let (c, d) = v.support_box();
    (a.iter().zip(&c).map(|(x, y)| x.min(*y)).collect(), b.iter().zip(&d).map(|(x, y)| x.max(*y)).collect())
}

/// Real interval {s : lo <= c0 + s c1 <= hi coordinatewise}.
fn affine_interval(c0: &[f64], c1: &[f64], lo: &[f64], hi: &[f64]) -> (f64, f64) {
    let (mut a, mut b) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..c0.len() {
        if c1[i].abs() < 1e-300 {
            if c0[i] < lo[i] || c0[i] > hi[i] {
                return (1.0, -1.0);
            }
            continue;
        }
        let (p, q) = ((lo[i] - c0[i]) / c1[i], (hi[i] - c0[i]) / c1[i]);
        a = a.max(p.min(q));
        b = b.min(p.max(q));
    }
    (a, b)
}

fn cubature<F: FnMut(&[f64]) -> f64>(lo: &[f64], hi: &[f64], n: usize, mut g: F) -> f64 {
    let (x, w) = gauss_legendre(n);
    let d = lo.len();
    let mut idx = vec![0usize; d];
    let mut p = vec![0.0; d];
    let mut total = 0.0;
    loop {
        let mut wt = 1.0;
        for k in 0..d {
            let h = 0.5 * (hi[k] - lo[k]);
            p[k] = lo[k] + h * (x[idx[k]] + 1.0);
            wt *= h * w[idx[k]];
        }
        total += wt * g(&p);
        let mut k = 0;
        loop {
            if k == d {
                return total;
            }
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn two_level<F: FnMut(&[f64]) -> f64>(lo: &[f64], hi: &[f64], mut g: F) -> (f64, f64) {
    let fine = cubature(lo, hi, 16, &mut g);
    let coarse = cubature(lo, hi, 12, &mut g);
    (fine, (fine - coarse).abs())
}

/// E^(t)(u, v) for a measure made of linear cyclic components.
pub fn jump_form(m: &StepMeasure, d: &DilationStructure, t: f64, u: &TestFunction, v: &TestFunction) -> Result<FormValue> {
    let law = &m.law;
    let dim = law.dim();
    if d.dim() != dim || u.dim() != dim || v.dim() != dim {
        return Err(Error::Dimension { expected: dim, got: d.dim() });
    }
    let fac = d.factors(t);
    let inv_fac: Vec<f64> = fac.iter().map(|f| 1.0 / f).collect();
    let (lo, hi) = union_box(u, v);
    struct Comp {
        gen: Vec<f64>,
        idx: usize,
        weight: f64,
        alpha: f64,
        z: f64,
    }
    let mut comps = Vec::new();
    for (i, c) in m.components.iter().enumerate() {
        let g = c.linear_generator().ok_or_else(|| {
            Error::Unsupported("jump_form needs cyclic components with linear powers".into())
        })?;
        comps.push(Comp { gen: g.iter().map(|&x| x as f64).collect(), idx: i, weight: c.weight, alpha: c.alpha, z: c.z });
    }
    // y(s) = x ._t delta_{1/t}(s gen), s real.
    let jump = |x: &[f64], s: f64, gen: &[f64], out: &mut [f64]| {
        let xr: Vec<f64> = x.iter().zip(&fac).map(|(a, f)| a * f).collect();
        let g: Vec<f64> = gen.iter().map(|a| a * s).collect();
        law.mul_f64(&xr, &g, out);
        for (o, f) in out.iter_mut().zip(&inv_fac) {
            *o *= f;
        }
    };
    // Affine check on a probe point.
    let probe: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.37 * a + 0.63 * b).collect();
    for c in &comps {
        let mut y0 = vec![0.0; dim];
        let mut y1 = vec![0.0; dim];
        let mut y2 = vec![0.0; dim];
        jump(&probe, 0.0, &c.gen, &mut y0);
        jump(&probe, 1.0, &c.gen, &mut y1);
        jump(&probe, -3.0, &c.gen, &mut y2);
        for i in 0..dim {
            let pred = y0[i] - 3.0 * (y1[i] - y0[i]);
            if (pred - y2[i]).abs() > 1e-9 * (1.0 + y2[i].abs()) {
                return Err(Error::Unsupported("jump_form needs jumps affine in the power k".into()));
            }
        }
    }
    let integrand = |x: &[f64]| -> f64 {
        let ux = u.eval(x);
        let vx = v.eval(x);
        let mut total = 0.0;
        let mut y = vec![0.0; dim];
        let mut y0 = vec![0.0; dim];
        let mut y1 = vec![0.0; dim];
        for c in &comps {
            jump(x, 0.0, &c.gen, &mut y0);
            jump(x, 1.0, &c.gen, &mut y1);
            let c1: Vec<f64> = y1.iter().zip(&y0).map(|(a, b)| a - b).collect();
            let (sa, sb) = affine_interval(&y0, &c1, &lo, &hi);
            if sa > sb {
                continue;
            }
            let (ka, kb) = (sa.ceil() as i64, sb.floor() as i64);
            let w = |k: f64| t * c.weight * (1.0 + k.abs()).powf(-1.0 - c.alpha) / c.z;
            let term = |k: f64, y: &mut [f64]| -> f64 {
                for i in 0..dim {
                    y[i] = y0[i] + k * c1[i];
                }
                w(k) * (ux - u.eval(y)) * (vx - v.eval(y))
            };
            let mut s = 0.0;
            for k in ka.max(-EXACT_K)..=kb.min(EXACT_K) {
                if k != 0 {
                    s += term(k as f64, &mut y);
                }
            }
            if kb > EXACT_K {
                let mut f = |k: f64| term(k, &mut y);
                s += integrate_breaks(&mut f, &[EXACT_K as f64 + 0.5, kb as f64 + 0.5], 0.0, 1e-9, 400).value;
            }
            if ka < -EXACT_K {
                let mut f = |k: f64| term(k, &mut y);
                s += integrate_breaks(&mut f, &[ka as f64 - 0.5, -EXACT_K as f64 - 0.5], 0.0, 1e-9, 400).value;
            }
            let out_mass = t * c.weight * (1.0 - m.components[c.idx].interval_mass(ka, kb)).max(0.0);
            total += s + 2.0 * ux * vx * out_mass;
        }
        0.5 * total
    };
    let (value, error) = two_level(&lo, &hi, integrand);
    Ok(FormValue { value, error, method: "exact-k-sum+gauss-legendre-x".into() })
}

/// E_bullet(u, v) for a limit measure made of axis parts, in the limit law.
pub fn limit_form(mu: &LimitMeasure, law: &GroupLaw, u: &TestFunction, v: &TestFunction) -> Result<FormValue> {
    let dim = law.dim();
    if mu.dim != dim {
        return Err(Error::Dimension { expected: dim, got: mu.dim });
    }
    // Re-validates the Levy integrability condition.
    let mu = LimitMeasure::new(mu.dim, mu.parts.clone())?;
    let mut axes = Vec::new();
    for p in &mu.parts {
        match p {
            LimitPart::AxisPower { axis, kappa, alpha } => axes.push((*axis, *kappa, *alpha)),
            other => return Err(Error::Unsupported(format!("limit_form supports axis parts only, got {other:?}"))),
        }
    }
    let (lo, hi) = union_box(u, v);
    let integrand = |x: &[f64]| -> f64 {
        let ux = u.eval(x);
        let vx = v.eval(x);
        let mut total = 0.0;
        let mut y0 = vec![0.0; dim];
        let mut y1 = vec![0.0; dim];
        let mut y = vec![0.0; dim];
        for &(axis, kappa, alpha) in &axes {
            let mut e = vec![0.0; dim];
            law.mul_f64(x, &e, &mut y0);
            e[axis] = 1.0;
            law.mul_f64(x, &e, &mut y1);
            let c1: Vec<f64> = y1.iter().zip(&y0).map(|(a, b)| a - b).collect();
            let (sa, sb) = affine_interval(&y0, &c1, &lo, &hi);
            if !(sa < 0.0 && sb > 0.0) {
                continue;
            }
            let mut f = |s: f64| {
                if s == 0.0 {
                    return 0.0;
                }
                for i in 0..dim {
                    y[i] = y0[i] + s * c1[i];
                }
                kappa * s.abs().powf(-1.0 - alpha) * (ux - u.eval(&y)) * (vx - v.eval(&y))
            };
            let inner = integrate_breaks(&mut f, &[sa, sa / 2.0, 0.0, sb / 2.0, sb], 0.0, 1e-9, 400).value;
            let outside = kappa * (sb.powf(-alpha) + (-sa).powf(-alpha)) / alpha;
            total += inner + 2.0 * ux * vx * outside;
        }
        0.5 * total
    };
    let (value, error) = two_level(&lo, &hi, integrand);
    Ok(FormValue { value, error, method: "quadrature".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::abelian;
    use crate::measures::MeasureSpec;
    use crate::special::cyclic_constant;

    #[test]
    fn abelian_form_matches_limit() {
        let law = abelian(1);
        let m = StepMeasure::new(&law, &MeasureSpec::axis_cyclic(1, &[1.0])).unwrap();
        let d = DilationStructure::from_ints(&[1]);
        let u = TestFunction::ProductWindow { center: vec![0.0], half_widths: vec![1.0] };
        let e = jump_form(&m, &d, 1e4, &u, &u).unwrap();
        let mu = LimitMeasure::new(1, vec![LimitPart::AxisPower { axis: 0, kappa: cyclic_constant(1.0), alpha: 1.0 }]).unwrap();
        let l = limit_form(&mu, &law, &u, &u).unwrap();
        assert!(e.value > 0.0);
        assert!((e.value - l.value).abs() / l.value < 0.01, "{} vs {}", e.value, l.value);
    }

    #[test]
    fn limit_form_matches_fourier_side() {
        // Index 1 on R: E(u,u) = kappa int_0^inf xi |u_hat(xi)|^2 dxi.
        let law = abelian(1);
        let kappa = 0.7;
        let mu = LimitMeasure::new(1, vec![LimitPart::AxisPower { axis: 0, kappa, alpha: 1.0 }]).unwrap();
        let u = TestFunction::ProductWindow { center: vec![0.3], half_widths: vec![1.0] };
        let (x, w) = gauss_legendre(128);
        let u_hat = |xi: f64| -> f64 {
            x.iter().zip(&w).map(|(s, ws)| ws * (1.0 - s * s).powi(3) * (xi * s).cos()).sum()
        };
        // |u_hat| decays like xi^-4; the tail past 100 is below 1e-10.
        let edges: Vec<f64> = (0..=100).map(|k| k as f64).collect();
        let mut g = |xi: f64| xi * u_hat(xi).powi(2);
        let oracle = kappa * integrate_breaks(&mut g, &edges, 0.0, 1e-12, 4000).value;
        let l = limit_form(&mu, &law, &u, &u).unwrap();
        assert!((l.value - oracle).abs() / oracle < 1e-5, "{} vs {oracle}", l.value);
    }

    #[test]
    fn symmetric_in_arguments() {
        let law = abelian(1);
        let m = StepMeasure::new(&law, &MeasureSpec::axis_cyclic(1, &[1.3])).unwrap();
        let d = DilationStructure::parse("10/13").unwrap();
        let u = TestFunction::ProductWindow { center: vec![0.0], half_widths: vec![1.0] };
        let v = TestFunction::ProductWindow { center: vec![0.4], half_widths: vec![0.7] };
        let a = jump_form(&m, &d, 100.0, &u, &v).unwrap().value;
        let b = jump_form(&m, &d, 100.0, &v, &u).unwrap().value;
        assert!((a - b).abs() < 1e-10 * a.abs().max(1e-12));
    }
}
