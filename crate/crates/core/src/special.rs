//! Special functions: Hurwitz zeta, stable-law constants, Cauchy and Kolmogorov distributions.

use statrs::function::gamma::gamma;
use std::f64::consts::PI;

// B_{2j} / (2j)! for j = 1..=7.
const BERN_OVER_FACT: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
];

/// Hurwitz zeta sum_{k>=0} (k+a)^{-s} for s > 1, a > 0 (Euler-Maclaurin, ~1e-15 relative).
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta needs s > 1, a > 0");
    let n = 12usize;
    let mut sum = 0.0;
    for k in 0..n {
        sum += (k as f64 + a).powf(-s);
    }
    let x = n as f64 + a;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // Rising factorial s(s+1)...(s+2j-2) times x^{-s-2j+1}.
    let mut fac = s;
    let mut xp = x.powf(-s - 1.0);
    for (j, b) in BERN_OVER_FACT.iter().enumerate() {
        sum += b * fac * xp;
        let m = 2.0 * j as f64 + 1.0;
        fac *= (s + m) * (s + m + 1.0);
        xp /= x * x;
    }
    sum
}

/// sum_{m in Z} (1+|m|)^{-1-alpha} = 2 zeta(1+alpha) - 1.
pub fn cyclic_series(alpha: f64) -> f64 {
    2.0 * hurwitz_zeta(1.0 + alpha, 1.0) - 1.0
}

/// Normalizing constant c_alpha of the cyclic law c_alpha (1+|m|)^{-1-alpha}.
pub fn cyclic_constant(alpha: f64) -> f64 {
    1.0 / cyclic_series(alpha)
}

/// int_{R^d} (1 - cos(theta . z)) |z|^{-d-alpha} dz / |theta|^alpha.
pub fn stable_exponent_constant(d: usize, alpha: f64) -> f64 {
    let df = d as f64;
    if d == 1 && (alpha - 1.0).abs() < 1e-14 {
        return PI;
    }
    2.0 * PI.powf(df / 2.0) * gamma(1.0 - alpha / 2.0)
        / (alpha * 2f64.powf(alpha) * gamma((df + alpha) / 2.0))
}

pub fn cauchy_cdf(x: f64, scale: f64) -> f64 {
    0.5 + (x / scale).atan() / PI
}

/// Kolmogorov survival function P(K > lambda).
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

pub fn beta_fn(a: f64, b: f64) -> f64 {
    gamma(a) * gamma(b) / gamma(a + b)
}

pub fn gamma_fn(x: f64) -> f64 {
    gamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_two() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - PI.powi(4) / 90.0).abs() < 1e-14);
    }

    #[test]
    fn hurwitz_shift() {
        // zeta(s, a) = a^{-s} + zeta(s, a+1).
        let (s, a) = (1.37, 0.4);
        assert!((hurwitz_zeta(s, a) - a.powf(-s) - hurwitz_zeta(s, a + 1.0)).abs() < 1e-13);
    }

    #[test]
    fn cyclic_alpha_one() {
        let c = cyclic_constant(1.0);
        assert!((c - 1.0 / (PI * PI / 3.0 - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn one_dim_stable_constant_closed_form() {
        for &a in &[0.5, 0.8, 1.2, 1.7] {
            let expect = 2.0 * gamma(1.0 - a) * (PI * a / 2.0).cos() / a;
            assert!((stable_exponent_constant(1, a) - expect).abs() < 1e-10 * expect);
        }
    }

    #[test]
    fn kolmogorov_known_value() {
        // 5% critical value 1.3581.
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-4);
    }
}
