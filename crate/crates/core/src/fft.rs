//! FFT helpers for one-dimensional lattice convolutions.

use crate::special::hurwitz_zeta;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Linear convolution of two real sequences.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len() + b.len() - 1;
    let n = len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    // Pack a in the real part and b in the imaginary part.
    let mut buf: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(a.get(i).copied().unwrap_or(0.0), b.get(i).copied().unwrap_or(0.0)))
        .collect();
    fwd.process(&mut buf);
    let mut prod = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let z = buf[k];
        let zc = buf[(n - k) % n].conj();
        let fa = (z + zc) * 0.5;
        let fb = (z - zc) * Complex64::new(0.0, -0.5);
        prod[k] = fa * fb;
    }
    inv.process(&mut prod);
    let s = 1.0 / n as f64;
    prod[..len].iter().map(|z| z.re * s).collect()
}

/// Self-convolution of a centered window (length 2L+1) cut back to the same window.
pub fn square_window(t: &[f64]) -> Vec<f64> {
    let l = t.len() / 2;
    let full = convolve(t, t);
    full[l..l + t.len()].to_vec()
}

fn mul_window(a: &[f64], b: &[f64]) -> Vec<f64> {
    let l = a.len() / 2;
    let full = convolve(a, b);
    full[l..l + a.len()].to_vec()
}

/// n-th convolution power of a centered window, truncated to the window after
/// every product (each value is a lower bound for the untruncated power).
pub fn power_window(base: &[f64], n: u64) -> Vec<f64> {
    assert!(n >= 1 && base.len() % 2 == 1);
    let mut result: Option<Vec<f64>> = None;
    let mut b = base.to_vec();
    let mut e = n;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => b.clone(),
                Some(r) => clamp(mul_window(&r, &b)),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        b = clamp(square_window(&b));
    }
    result.unwrap()
}

fn clamp(mut v: Vec<f64>) -> Vec<f64> {
    v.iter_mut().for_each(|x| *x = x.max(0.0));
    v
}

/// c (1+|k|)^{-1-alpha} folded onto Z/N: entry i is the mass of k = i mod N.
pub fn folded_cyclic_pmf(alpha: f64, c: f64, n: usize) -> Vec<f64> {
    let s = 1.0 + alpha;
    let nf = n as f64;
    // Wrapped images beyond the nearest two are a smooth function of i.
    let far = |i: f64| nf.powf(-s) * (hurwitz_zeta(s, 1.0 + (1.0 + i) / nf) + hurwitz_zeta(s, 1.0 + (1.0 + nf - i) / nf));
    let stride = 16usize.min(n);
    // Knots at i = (j - 1) stride for j = 0..=n/stride + 3; cubic Lagrange in between.
    let knots: Vec<f64> = (0..=n / stride + 3).map(|j| far(j as f64 * stride as f64 - stride as f64)).collect();
    (0..n)
        .map(|i| {
            let near = (1.0 + i as f64).powf(-s) + (1.0 + (n - i) as f64).powf(-s);
            let j = i / stride + 1;
            let x = (i % stride) as f64 / stride as f64;
            let (f0, f1, f2, f3) = (knots[j - 1], knots[j], knots[j + 1], knots[j + 2]);
            let far_i = -x * (x - 1.0) * (x - 2.0) / 6.0 * f0 + (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0 * f1
                - (x + 1.0) * x * (x - 2.0) / 2.0 * f2
                + (x + 1.0) * x * (x - 1.0) / 6.0 * f3;
            c * (near + far_i)
        })
        .collect()
}

/// Real DFT values F_k = sum_i p_i cos(2 pi i k / N) of a symmetric sequence on Z/N.
pub fn symmetric_dft(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex64> = p.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fwd.process(&mut buf);
    buf.iter().map(|z| z.re).collect()
}

/// (1/N) sum_k F_k^n: the n-step return probability on Z/N.
pub fn circular_return(dft: &[f64], n: u64) -> f64 {
    let s: f64 = dft.iter().map(|f| f.powf(n as f64)).sum();
    s / dft.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolve_small() {
        let c = convolve(&[1.0, 2.0], &[3.0, 4.0, 5.0]);
        let e = [3.0, 10.0, 13.0, 10.0];
        for (x, y) in c.iter().zip(e) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn folded_mass_is_one() {
        let alpha = 1.0;
        let c = crate::special::cyclic_constant(alpha);
        let p = folded_cyclic_pmf(alpha, c, 1 << 12);
        let s: f64 = p.iter().sum();
        assert!((s - 1.0).abs() < 1e-12, "{s}");
    }
}
