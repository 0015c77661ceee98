//! Symmetric stable samplers.
//!
//! One-dimensional draws use the Chambers-Mallows-Stuck method. Isotropic
//! two-dimensional draws are sub-Gaussian: sqrt(A) G with A a positive
//! (alpha/2)-stable variable (Kanter's representation) and G ~ N(0, 2 I).
//! Both are normalized to E exp(i theta.X) = exp(-|theta|^alpha).

use crate::special::stable_exponent_constant;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use std::f64::consts::PI;

/// Standard symmetric alpha-stable variable, characteristic function exp(-|theta|^alpha).
pub fn standard_sas<G: Rng + ?Sized>(alpha: f64, rng: &mut G) -> f64 {
    let u = PI * (rng.gen::<f64>() - 0.5);
    if (alpha - 1.0).abs() < 1e-12 {
        return u.tan();
    }
    let w: f64 = Exp1.sample(rng);
    let a = alpha;
    (a * u).sin() / u.cos().powf(1.0 / a) * ((u * (1.0 - a)).cos() / w).powf((1.0 - a) / a)
}

/// Positive a-stable variable with Laplace transform exp(-s^a), 0 < a < 1.
pub fn positive_stable<G: Rng + ?Sized>(a: f64, rng: &mut G) -> f64 {
    let u = PI * rng.gen::<f64>();
    let w: f64 = Exp1.sample(rng);
    (a * u).sin() / u.sin().powf(1.0 / a) * (((1.0 - a) * u).sin() / w).powf((1.0 - a) / a)
}

/// Isotropic 2-d stable vector with characteristic function exp(-|theta|^alpha).
pub fn isotropic_sas2<G: Rng + ?Sized>(alpha: f64, rng: &mut G) -> [f64; 2] {
    let a = positive_stable(alpha / 2.0, rng).sqrt() * std::f64::consts::SQRT_2;
    let g1: f64 = StandardNormal.sample(rng);
    let g2: f64 = StandardNormal.sample(rng);
    [a * g1, a * g2]
}

/// Scale s such that s X (X standard) has Levy density kappa |z|^{-m-alpha} on R^m
/// per unit time, evaluated for a time step dt.
pub fn scale_for_levy_density(m: usize, alpha: f64, kappa: f64, dt: f64) -> f64 {
    (kappa * stable_exponent_constant(m, alpha) * dt).powf(1.0 / alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cauchy_quartiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut v: Vec<f64> = (0..200_000).map(|_| standard_sas(1.0, &mut rng)).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q = |p: f64| v[(p * v.len() as f64) as usize];
        // Quartiles of the standard Cauchy law are -1 and 1; sd of a sample quartile ~ 0.0056 here.
        assert!((q(0.25) + 1.0).abs() < 0.03 && (q(0.75) - 1.0).abs() < 0.03);
        assert!(q(0.5).abs() < 0.02);
    }

    #[test]
    fn empirical_characteristic_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &a in &[0.7, 1.3, 1.8] {
            let n = 100_000;
            let th = 0.8;
            let m: f64 = (0..n).map(|_| (th * standard_sas(a, &mut rng)).cos()).sum::<f64>() / n as f64;
            let expect = (-(th as f64).powf(a)).exp();
            assert!((m - expect).abs() < 0.01, "alpha {a}: {m} vs {expect}");
            let m2: f64 = (0..n)
                .map(|_| {
                    let z = isotropic_sas2(a, &mut rng);
                    (th * 0.6 * z[0] + th * 0.8 * z[1]).cos()
                })
                .sum::<f64>()
                / n as f64;
            assert!((m2 - expect).abs() < 0.01, "2-d alpha {a}: {m2} vs {expect}");
        }
    }
}
