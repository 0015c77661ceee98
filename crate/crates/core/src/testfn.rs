//! Compactly supported test functions for vague convergence and energy forms.

use crate::geometry::HomNorm;
use serde::{Deserialize, Serialize};

/// chi(tau) = (4 tau (1 - tau))^3 on [0, 1], zero outside. C^2 with peak 1 at 1/2.
pub fn chi(tau: f64) -> f64 {
    if tau <= 0.0 || tau >= 1.0 {
        return 0.0;
    }
    let s = 4.0 * tau * (1.0 - tau);
    s * s * s
}

/// Window (1 - s^2)^3 on (-1, 1).
pub fn window(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        return 0.0;
    }
    let q = 1.0 - s * s;
    q * q * q
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    /// chi((||u|| - a)/(b - a)), supported on the annulus a <= ||u|| <= b.
    AnnulusBump { a: f64, b: f64, norm: HomNorm },
    /// prod_i window((u_i - c_i)/h_i).
    ProductWindow { center: Vec<f64>, half_widths: Vec<f64> },
    /// f(delta_r u) for a coordinatewise factor vector.
    Dilated { inner: Box<TestFunction>, factors: Vec<f64> },
    Zero { dim: usize },
}

impl TestFunction {
    pub fn annulus(a: f64, b: f64, norm: &HomNorm) -> Self {
        assert!(0.0 < a && a < b, "annulus needs 0 < a < b");
        TestFunction::AnnulusBump { a, b, norm: norm.clone() }
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunction::AnnulusBump { norm, .. } => norm.b.len(),
            TestFunction::ProductWindow { center, .. } => center.len(),
            TestFunction::Dilated { inner, .. } => inner.dim(),
            TestFunction::Zero { dim } => *dim,
        }
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        match self {
            TestFunction::AnnulusBump { a, b, norm } => {
                let r = norm.norm(u);
                chi((r - a) / (b - a))
            }
            TestFunction::ProductWindow { center, half_widths } => {
                let mut p = 1.0;
                for ((x, c), h) in u.iter().zip(center).zip(half_widths) {
                    p *= window((x - c) / h);
                    if p == 0.0 {
                        break;
                    }
                }
                p
            }
            TestFunction::Dilated { inner, factors } => {
                let v: Vec<f64> = u.iter().zip(factors).map(|(x, f)| x * f).collect();
                inner.eval(&v)
            }
            TestFunction::Zero { .. } => 0.0,
        }
    }

    /// Closed box containing the support.
    pub fn support_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            TestFunction::AnnulusBump { b, norm, .. } => {
                let h = norm.ball_half_widths(*b);
                (h.iter().map(|x| -x).collect(), h)
            }
            TestFunction::ProductWindow { center, half_widths } => (
                center.iter().zip(half_widths).map(|(c, h)| c - h).collect(),
                center.iter().zip(half_widths).map(|(c, h)| c + h).collect(),
            ),
            TestFunction::Dilated { inner, factors } => {
                let (lo, hi) = inner.support_box();
                let mut l = Vec::new();
                let mut r = Vec::new();
                for i in 0..lo.len() {
                    let (p, q) = (lo[i] / factors[i], hi[i] / factors[i]);
                    l.push(p.min(q));
                    r.push(p.max(q));
                }
                (l, r)
            }
            TestFunction::Zero { dim } => (vec![0.0; *dim], vec![0.0; *dim]),
        }
    }

    /// Interior break points per axis where the function has reduced smoothness.
    pub fn breaks(&self) -> Vec<Vec<f64>> {
        match self {
            TestFunction::AnnulusBump { a, norm, .. } => {
                norm.ball_half_widths(*a).iter().map(|h| vec![-h, 0.0, *h]).collect()
            }
            TestFunction::ProductWindow { center, .. } => center.iter().map(|c| vec![*c]).collect(),
            TestFunction::Dilated { inner, factors } => inner
                .breaks()
                .into_iter()
                .zip(factors)
                .map(|(b, f)| b.into_iter().map(|x| x / f).collect())
                .collect(),
            TestFunction::Zero { dim } => vec![Vec::new(); *dim],
        }
    }

    /// Smallest homogeneous norm on the support (0 if the support meets the origin).
    pub fn inner_radius(&self) -> f64 {
        match self {
            TestFunction::AnnulusBump { a, .. } => *a,
            _ => 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TestFunction::Zero { .. })
    }
}

/// Built-in bump family: annuli [1/2, 1], [1, 2], [2, 4] in the given norm.
pub fn bump_family(norm: &HomNorm) -> Vec<TestFunction> {
    [(0.5, 1.0), (1.0, 2.0), (2.0, 4.0)].iter().map(|&(a, b)| TestFunction::annulus(a, b, norm)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_shape() {
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(chi(0.0), 0.0);
        assert_eq!(chi(1.2), 0.0);
        // C^1 at the ends: difference quotient -> 0.
        assert!(chi(1e-4) / 1e-4 < 1e-6);
    }

    #[test]
    fn annulus_support() {
        let n = HomNorm { b: vec![1.0, 2.0], beta: 1.0 };
        let f = TestFunction::annulus(1.0, 2.0, &n);
        assert_eq!(f.eval(&[0.5, 0.0]), 0.0);
        assert!((f.eval(&[1.5, 0.0]) - 1.0).abs() < 1e-15);
        assert!((f.eval(&[0.0, 2.25]) - 1.0).abs() < 1e-15);
        let (lo, hi) = f.support_box();
        assert_eq!(hi, vec![2.0, 4.0]);
        assert_eq!(lo, vec![-2.0, -4.0]);
    }
}
