//! Return probabilities mu^(n)(e) with two-sided brackets.
//!
//! Three routes:
//! - Z with one cyclic component: a window-truncated FFT power gives a lower
//!   bound (every dropped path has positive mass) and the return probability on
//!   Z/N an upper bound (wrapped paths only add mass).
//! - H3 (matrix coordinates) with three axis-cyclic components of index 1:
//!   Fourier transform in (y, z). For fixed frequencies (t2, t) the walk acts on
//!   functions of x by A = p1 C + diag(p2 phi(t2 + t x) + p3 phi(t)), where C is
//!   convolution by the x-step law, so mu^(n)(e) = (2 pi)^-2 int <d0, A^n d0>.
//!   x lives on a circular window; the bracket half-width is the change against
//!   half the window with a coarser frequency rule.
//! - Anything else: sparse truncated convolution, value in [table, table + deficit].

use crate::dilation::DilationStructure;
use crate::error::{Error, Result};
use crate::fft::{circular_return, folded_cyclic_pmf, power_window, square_window, symmetric_dft};
use crate::geometry::HomNorm;
use crate::group::h3_matrix;
use crate::measures::{convolve_truncated, StepMeasure};
use crate::quad::gauss_legendre;
use crate::special::{cyclic_constant, hurwitz_zeta};
use num::ToPrimitive;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Debug, Serialize)]
pub struct LltRow {
    pub n: u64,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub r_n: f64,
    pub r_lower: f64,
    pub r_upper: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LltReport {
    pub method: String,
    pub gamma0: f64,
    pub rows: Vec<LltRow>,
    /// max over the last three dyadic steps of |r_2n / r_n - 1|.
    pub plateau: f64,
    /// max r_n / min r_n over the grid.
    pub band_ratio: f64,
    pub brackets_valid: bool,
}

impl LltReport {
    fn finish(method: &str, gamma0: f64, mut rows: Vec<LltRow>) -> Self {
        rows.sort_by_key(|r| r.n);
        for r in rows.iter_mut() {
            let s = (r.n as f64).powf(gamma0);
            r.r_n = s * r.value;
            r.r_lower = s * r.lower;
            r.r_upper = s * r.upper;
        }
        let mut plateau: f64 = 0.0;
        let k = rows.len();
        for i in k.saturating_sub(4)..k.saturating_sub(1) {
            if rows[i + 1].n == 2 * rows[i].n {
                plateau = plateau.max((rows[i + 1].r_n / rows[i].r_n - 1.0).abs());
            }
        }
        let mx = rows.iter().map(|r| r.r_n).fold(f64::MIN, f64::max);
        let mn = rows.iter().map(|r| r.r_n).fold(f64::MAX, f64::min);
        let brackets_valid = rows.iter().all(|r| r.lower <= r.value && r.value <= r.upper);
        LltReport { method: method.into(), gamma0, rows, plateau, band_ratio: mx / mn, brackets_valid }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,lo,hi\n");
        for r in &self.rows {
            s += &format!("{},{:.10e},{:.10e},{:.10e}\n", r.n, r.r_n, r.r_lower, r.r_upper);
        }
        s
    }
}

fn row(n: u64, value: f64, lower: f64, upper: f64) -> LltRow {
    LltRow { n, value, lower, upper, r_n: 0.0, r_lower: 0.0, r_upper: 0.0 }
}

/// Return-probability table over the grid `ns`.
pub fn llt(m: &StepMeasure, d: &DilationStructure, ns: &[u64], max_cells: usize) -> Result<LltReport> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(Error::InvalidMeasure("llt needs a grid of positive step counts".into()));
    }
    let gamma0 = d.trace().to_f64().unwrap_or(f64::NAN);
    if let Some(alpha) = z_cyclic(m) {
        return Ok(LltReport::finish("z-fft-window", gamma0, llt_z(alpha, ns, max_cells)?));
    }
    if let Some(p) = h3_axis_unit(m) {
        let cfg = H3Fourier::default_for(*ns.iter().max().unwrap());
        return Ok(LltReport::finish("h3-fourier-transfer", gamma0, cfg.run(p, ns)?));
    }
    let norm = HomNorm::from_dilation(d);
    let mut rows = Vec::new();
    for &n in ns {
        let radius = 4.0 * (n as f64).powf(1.0 / d.beta_f64());
        let t = convolve_truncated(m, &norm, n, radius, max_cells)?;
        let v = t.value(&vec![0; m.dim()]);
        rows.push(row(n, v, v, v + t.deficit));
    }
    Ok(LltReport::finish("truncated-convolution", gamma0, rows))
}

fn z_cyclic(m: &StepMeasure) -> Option<f64> {
    if m.dim() != 1 || m.components.len() != 1 {
        return None;
    }
    let c = &m.components[0];
    match c.linear_generator() {
        Some(g) if g[0].abs() == 1 => Some(c.alpha),
        _ => None,
    }
}

fn llt_z(alpha: f64, ns: &[u64], max_cells: usize) -> Result<Vec<LltRow>> {
    let nmax = *ns.iter().max().unwrap();
    let c = cyclic_constant(alpha);
    // Window half-width: far beyond the n^{1/alpha} scale, within the budget.
    let want = (32.0 * (nmax as f64).powf(1.0 / alpha)).max(1024.0);
    let half = (want as usize).next_power_of_two().min(max_cells / 4);
    if half < 64 {
        return Err(Error::Budget(format!("llt window of {max_cells} cells is too small")));
    }
    let base: Vec<f64> = (0..=2 * half).map(|i| c * (1.0 + (i as f64 - half as f64).abs()).powf(-1.0 - alpha)).collect();
    let circ_n = 4 * half;
    let dft = symmetric_dft(&folded_cyclic_pmf(alpha, c, circ_n));
    let mut sorted: Vec<u64> = ns.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut rows = Vec::new();
    // Tables T_{n/2} (or T_n for odd n); dyadic grids reuse squares.
    let mut cache: Option<(u64, Vec<f64>)> = None;
    for &n in &sorted {
        let upper = circular_return(&dft, n).min(1.0);
        let lower = if n % 2 == 0 {
            let h = n / 2;
            let t = match cache.take() {
                Some((k, t)) if 2 * k == h => clamp(square_window(&t)),
                Some((k, t)) if k == h => t,
                _ => power_window(&base, h),
            };
            let s: f64 = t.iter().map(|x| x * x).sum();
            cache = Some((h, t));
            s
        } else {
            power_window(&base, n)[half]
        };
        // The window value is a lower bound; keep it as the centre.
        rows.push(row(n, lower, lower.min(upper), upper.max(lower)));
    }
    Ok(rows)
}

fn clamp(mut v: Vec<f64>) -> Vec<f64> {
    v.iter_mut().for_each(|x| *x = x.max(0.0));
    v
}

/// Weights (p1, p2, p3) when m is the axis-cyclic index-1 measure on H3.
fn h3_axis_unit(m: &StepMeasure) -> Option<[f64; 3]> {
    if m.dim() != 3 || m.law.mult() != h3_matrix().mult() || m.components.len() != 3 {
        return None;
    }
    let mut p = [0.0; 3];
    for c in &m.components {
        if (c.alpha - 1.0).abs() > 1e-12 {
            return None;
        }
        let g = c.linear_generator()?;
        let axis = (0..3).find(|&i| g[i].abs() == 1 && (0..3).all(|j| j == i || g[j] == 0))?;
        p[axis] += c.weight;
    }
    if p.iter().all(|&x| x > 0.0) {
        Some(p)
    } else {
        None
    }
}

/// Characteristic function of c (1+|k|)^{-2}:
/// phi(t) = c [2 (cos t Re Li2(e^{it}) + sin t Cl2(t)) - 1].
pub fn cyclic_phi_alpha1(theta: f64) -> f64 {
    // c = 1 / (2 zeta(2) - 1)
    let c = 3.0 / (PI * PI - 3.0);
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t = 2.0 * PI - t;
    }
    let re_li2 = PI * PI / 6.0 - PI * t / 2.0 + t * t / 4.0;
    c * (2.0 * (t.cos() * re_li2 + t.sin() * clausen2(t)) - 1.0)
}

/// Cl2(t) = sum sin(k t)/k^2 for 0 <= t <= pi.
fn clausen2(t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let coef = clausen_coefficients();
    let u = (t / (2.0 * PI)).powi(2);
    let mut s = 0.0;
    let mut pw = t;
    for c in coef {
        pw *= u;
        s += c * pw;
    }
    t - t * t.ln() + s
}

fn clausen_coefficients() -> &'static [f64] {
    use std::sync::OnceLock;
    static C: OnceLock<Vec<f64>> = OnceLock::new();
    C.get_or_init(|| {
        // |B_2k| t^{2k+1} / (2k (2k+1)!) = 2 zeta(2k) (t/2pi)^{2k} t / (2k (2k+1)).
        (1..=40)
            .map(|k| {
                let k2 = 2.0 * k as f64;
                let z = if k < 20 { hurwitz_zeta(k2, 1.0) } else { 1.0 };
                2.0 * z / (k2 * (k2 + 1.0))
            })
            .collect()
    })
}

/// Fourier-transfer settings for H3.
#[derive(Clone, Debug)]
pub struct H3Fourier {
    pub window: usize,
    /// Gauss-Legendre nodes per geometric panel.
    pub nodes: usize,
    /// Smallest panel edge in t and t2.
    pub t_min: f64,
    pub t2_min: f64,
    /// Ratio of consecutive geometric panel edges.
    pub ratio: f64,
}

impl H3Fourier {
    pub fn default_for(nmax: u64) -> Self {
        let n = nmax as f64;
        let window = ((8.0 * n) as usize).next_power_of_two().clamp(256, 1 << 14);
        H3Fourier { window, nodes: 8, t_min: 0.02 / (n * n), t2_min: 0.02 / n, ratio: 3.0 }
    }

    fn panels(&self, lo: f64) -> Vec<(f64, f64)> {
        let mut v = vec![(0.0, lo)];
        let mut a = lo;
        while a < PI {
            let b = (self.ratio * a).min(PI);
            v.push((a, b));
            a = b;
        }
        v
    }

    fn grid(&self) -> Vec<(f64, f64, f64)> {
        let (x, w) = gauss_legendre(self.nodes);
        let rule = |(a, b): (f64, f64)| -> Vec<(f64, f64)> {
            let h = 0.5 * (b - a);
            x.iter().zip(&w).map(|(xi, wi)| (a + h * (xi + 1.0), h * wi)).collect()
        };
        let t: Vec<(f64, f64)> = self.panels(self.t_min).into_iter().flat_map(rule).collect();
        let t2: Vec<(f64, f64)> = self.panels(self.t2_min).into_iter().flat_map(rule).collect();
        let mut g = Vec::with_capacity(t.len() * t2.len());
        for &(a, wa) in &t {
            for &(b, wb) in &t2 {
                g.push((b, a, wa * wb));
            }
        }
        g
    }

    /// <d0, A^n d0> integrated, for every n in `ns`, on a window of `w` sites.
    fn integrate(&self, p: [f64; 3], ns: &[u64], w: usize) -> Vec<f64> {
        let nmax = *ns.iter().max().unwrap() as usize;
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(w);
        let inv = planner.plan_fft_inverse(w);
        let kernel: Vec<f64> =
            symmetric_dft(&folded_cyclic_pmf(1.0, cyclic_constant(1.0), w)).iter().map(|k| p[0] * k / w as f64).collect();
        let xs: Vec<f64> = (0..w).map(|i| if i < w / 2 { i as f64 } else { i as f64 - w as f64 }).collect();
        let grid = self.grid();
        let mut acc = vec![0.0; ns.len()];
        let mut buf = vec![Complex64::new(0.0, 0.0); w];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];
        let mut da = vec![0.0; w];
        let mut db = vec![0.0; w];
        for pair in grid.chunks(2) {
            let (a2, a, wa) = pair[0];
            let (b2, b, wb) = if pair.len() == 2 { pair[1] } else { (0.0, 0.0, 0.0) };
            let (pa, pb) = (p[2] * cyclic_phi_alpha1(a), p[2] * cyclic_phi_alpha1(b));
            for i in 0..w {
                da[i] = p[1] * cyclic_phi_alpha1(a2 + a * xs[i]) + pa;
                db[i] = p[1] * cyclic_phi_alpha1(b2 + b * xs[i]) + pb;
            }
            buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            buf[0] = Complex64::new(1.0, 1.0);
            let mut k = 0;
            for step in 1..=nmax {
                let prev = buf.clone();
                fwd.process_with_scratch(&mut buf, &mut scratch);
                for (z, kk) in buf.iter_mut().zip(&kernel) {
                    *z *= kk;
                }
                inv.process_with_scratch(&mut buf, &mut scratch);
                for i in 0..w {
                    buf[i] += Complex64::new(da[i] * prev[i].re, db[i] * prev[i].im);
                }
                while k < ns.len() && ns[k] as usize == step {
                    acc[k] += wa * buf[0].re + wb * buf[0].im;
                    k += 1;
                }
            }
        }
        acc.iter().map(|v| v / (PI * PI)).collect()
    }

    pub fn run(&self, p: [f64; 3], ns: &[u64]) -> Result<Vec<LltRow>> {
        let mut sorted: Vec<u64> = ns.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let fine = self.integrate(p, &sorted, self.window);
        // Half the window and a coarser rule: the change bounds both error sources.
        let coarse_cfg = H3Fourier { nodes: (self.nodes * 3 / 4).max(4), ratio: self.ratio * 4.0 / 3.0, ..self.clone() };
        let coarse = coarse_cfg.integrate(p, &sorted, self.window / 2);
        Ok(sorted
            .iter()
            .zip(fine.iter().zip(&coarse))
            .map(|(&n, (&f, &c))| {
                let e = (f - c).abs();
                row(n, f, f - e, f + e)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::abelian;
    use crate::measures::MeasureSpec;

    #[test]
    fn phi_matches_direct_sum() {
        let c = cyclic_constant(1.0);
        for &t in &[0.0, 1e-3, 0.3, 1.7, 3.1, -2.2, 7.0] {
            let direct: f64 = c * (1.0 + 2.0 * (1..2_000_000).map(|k| (k as f64 * t).cos() / ((1 + k) as f64).powi(2)).sum::<f64>());
            assert!((cyclic_phi_alpha1(t) - direct).abs() < 1e-6, "{t}");
        }
    }

    #[test]
    fn z_brackets_and_small_n() {
        let law = abelian(1);
        let m = StepMeasure::new(&law, &MeasureSpec::axis_cyclic(1, &[1.0])).unwrap();
        let d = DilationStructure::from_ints(&[1]);
        let r = llt(&m, &d, &[2, 4, 8], 1 << 16).unwrap();
        assert!(r.brackets_valid);
        // n = 2: sum_k mu(k)^2.
        let c = cyclic_constant(1.0);
        let exact = c * c * (2.0 * hurwitz_zeta(4.0, 1.0) - 1.0);
        assert!((r.rows[0].value - exact).abs() < 1e-6 * exact);
        assert!((r.rows[0].upper - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn h3_two_steps() {
        let law = h3_matrix();
        let m = StepMeasure::new(&law, &MeasureSpec::axis_cyclic(3, &[1.0, 1.0, 1.0])).unwrap();
        let p = h3_axis_unit(&m).unwrap();
        let cfg = H3Fourier { window: 1024, nodes: 8, t_min: 1e-3, t2_min: 1e-2, ratio: 2.0 };
        let r = &cfg.run(p, &[2]).unwrap()[0];
        let c = cyclic_constant(1.0);
        // mu(e) = c; off the identity the three axes do not overlap.
        let exact = c * c + 3.0 * (c / 3.0).powi(2) * (2.0 * hurwitz_zeta(4.0, 1.0) - 2.0);
        assert!((r.value - exact).abs() < 1e-5 * exact, "{} vs {exact}", r.value);
        assert!(r.lower <= exact && exact <= r.upper, "{r:?}");
    }
}
