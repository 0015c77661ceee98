//! Adaptive Gauss-Kronrod quadrature (G7/K15) and Gauss-Legendre rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

/// 15 Kronrod nodes on [-1,1] with Kronrod and embedded Gauss weights (zero off the Gauss nodes).
pub fn gk15_rule() -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(15);
    let mut wk = Vec::with_capacity(15);
    let mut wg = Vec::with_capacity(15);
    for i in 0..7 {
        x.push(-XGK[i]);
        wk.push(WGK[i]);
        wg.push(if i % 2 == 1 { WG[i / 2] } else { 0.0 });
    }
    x.push(0.0);
    wk.push(WGK[7]);
    wg.push(WG[3]);
    for i in (0..7).rev() {
        x.push(XGK[i]);
        wk.push(WGK[i]);
        wg.push(if i % 2 == 1 { WG[i / 2] } else { 0.0 });
    }
    (x, wk, wg)
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[i] * s;
        if i % 2 == 1 {
            rg += WG[i / 2] * s;
        }
    }
    let val = rk * h;
    let err = ((rk - rg) * h).abs();
    (val, err)
}

struct Seg {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Seg {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Seg {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.partial_cmp(&o.err).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive integration of f over [a, b].
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_segs: usize) -> QuadResult {
    integrate_breaks(&mut f, &[a, b], abs_tol, rel_tol, max_segs)
}

/// Like [`integrate`], with the initial partition given by sorted break points.
pub fn integrate_breaks<F: FnMut(f64) -> f64>(
    f: &mut F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_segs: usize,
) -> QuadResult {
    let mut heap = BinaryHeap::new();
    let (mut total, mut err) = (0.0, 0.0);
    let mut evals = 0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(f, w[0], w[1]);
        evals += 15;
        total += v;
        err += e;
        heap.push(Seg { a: w[0], b: w[1], val: v, err: e });
    }
    while err > abs_tol.max(rel_tol * total.abs()) && heap.len() < max_segs {
        let s = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            heap.push(s);
            break;
        }
        let (v1, e1) = gk15(f, s.a, m);
        let (v2, e2) = gk15(f, m, s.b);
        evals += 30;
        total += v1 + v2 - s.val;
        err += e1 + e2 - s.err;
        heap.push(Seg { a: s.a, b: m, val: v1, err: e1 });
        heap.push(Seg { a: m, b: s.b, val: v2, err: e2 });
    }
    // Re-sum to limit cancellation drift.
    let total: f64 = heap.iter().map(|s| s.val).sum();
    let err: f64 = heap.iter().map(|s| s.err).sum();
    QuadResult { value: total, error: err, evals, converged: err <= abs_tol.max(rel_tol * total.abs()) }
}

/// Integral over [a, inf) via x = a + s/(1-s).
pub fn integrate_to_inf<F: FnMut(f64) -> f64>(mut f: F, a: f64, abs_tol: f64, rel_tol: f64, max_segs: usize) -> QuadResult {
    let mut g = |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let one_m = 1.0 - s;
        let x = a + s / one_m;
        f(x) / (one_m * one_m)
    };
    integrate_breaks(&mut g, &[0.0, 0.5, 0.9, 0.99, 1.0], abs_tol, rel_tol, max_segs)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Nested adaptive integration over a box; `f` receives the full point.
pub fn integrate_box<F: Fn(&[f64]) -> f64>(f: &F, lo: &[f64], hi: &[f64], abs_tol: f64, rel_tol: f64, max_segs: usize) -> QuadResult {
    integrate_box_dyn(f, lo, hi, &|_, _| Vec::new(), abs_tol, rel_tol, max_segs)
}

/// Like [`integrate_box`] with per-axis interior break points.
pub fn integrate_box_breaks<F: Fn(&[f64]) -> f64>(
    f: &F,
    lo: &[f64],
    hi: &[f64],
    breaks: &[Vec<f64>],
    abs_tol: f64,
    rel_tol: f64,
    max_segs: usize,
) -> QuadResult {
    let b = |axis: usize, _: &[f64]| breaks.get(axis).cloned().unwrap_or_default();
    integrate_box_dyn(f, lo, hi, &b, abs_tol, rel_tol, max_segs)
}

/// Nested integration where the break points of axis k may depend on the
/// already fixed coordinates x[..k].
pub fn integrate_box_dyn<F: Fn(&[f64]) -> f64>(
    f: &F,
    lo: &[f64],
    hi: &[f64],
    breaks: &dyn Fn(usize, &[f64]) -> Vec<f64>,
    abs_tol: f64,
    rel_tol: f64,
    max_segs: usize,
) -> QuadResult {
    let d = lo.len();
    let mut x = vec![0.0; d];
    let mut evals = 0usize;
    let r = nested(f, lo, hi, breaks, abs_tol, rel_tol, max_segs, 0, &mut x, &mut evals);
    QuadResult { value: r.value, error: r.error, evals, converged: r.converged }
}

#[allow(clippy::too_many_arguments)]
fn nested<F: Fn(&[f64]) -> f64>(
    f: &F,
    lo: &[f64],
    hi: &[f64],
    breaks: &dyn Fn(usize, &[f64]) -> Vec<f64>,
    abs_tol: f64,
    rel_tol: f64,
    max_segs: usize,
    axis: usize,
    x: &mut Vec<f64>,
    evals: &mut usize,
) -> QuadResult {
    let d = lo.len();
    let mut pts = vec![lo[axis]];
    pts.extend(breaks(axis, &x[..axis]).into_iter().filter(|&p| p > lo[axis] && p < hi[axis]));
    pts.push(hi[axis]);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if axis + 1 == d {
        let mut g = |t: f64| {
            x[axis] = t;
            *evals += 1;
            f(x)
        };
        return integrate_breaks(&mut g, &pts, abs_tol, rel_tol, max_segs);
    }
    let span = hi[axis] - lo[axis];
    let inner_abs = abs_tol / span.max(1e-300) * 0.1;
    let mut all_conv = true;
    let mut inner_total_err = 0.0;
    let mut g = |t: f64| {
        x[axis] = t;
        let r = nested(f, lo, hi, breaks, inner_abs, rel_tol * 0.1, max_segs, axis + 1, x, evals);
        all_conv &= r.converged;
        inner_total_err = f64::max(inner_total_err, r.error);
        r.value
    };
    let mut r = integrate_breaks(&mut g, &pts, abs_tol, rel_tol, max_segs);
    r.error += inner_total_err * span;
    r.converged &= all_conv;
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-13, 1e-13, 50);
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 1e-10, 500);
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn half_line() {
        let r = integrate_to_inf(|x| (1.0 + x).powf(-2.5), 0.0, 1e-12, 1e-12, 500);
        assert!((r.value - 1.0 / 1.5).abs() < 1e-10);
    }

    #[test]
    fn legendre_rule() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
    }

    #[test]
    fn box_integral() {
        let f = |p: &[f64]| p[0] * p[0] + p[1] * p[2];
        let r = integrate_box(&f, &[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0], 1e-10, 1e-10, 100);
        // int x^2 = 6 * 1/3 = 2; int y z = 1 * 2 * 4.5 = 9.
        assert!((r.value - 11.0).abs() < 1e-9);
    }

    #[test]
    fn gk_rule_weights() {
        let (x, wk, wg) = gk15_rule();
        assert!((wk.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!((wg.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let s: f64 = x.iter().zip(&wg).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-13);
    }
}
