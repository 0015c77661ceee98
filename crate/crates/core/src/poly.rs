//! Sparse multivariate polynomials with exact rational coefficients.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Exponent vector, one entry per variable.
pub type Powers = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Powers, BigRational>,
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut pw = vec![0; nvars];
        pw[i] = 1;
        let mut p = Poly::zero(nvars);
        p.add_term(pw, BigRational::one());
        p
    }

    /// Monomial `c * prod v_i^{e_i}` given as sparse `(variable, exponent)` pairs.
    pub fn monomial(nvars: usize, c: BigRational, vars: &[(usize, u32)]) -> Self {
        let mut pw = vec![0; nvars];
        for &(v, e) in vars {
            pw[v] += e;
        }
        let mut p = Poly::zero(nvars);
        p.add_term(pw, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Powers, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, pw: Powers, c: BigRational) {
        assert_eq!(pw.len(), self.nvars, "exponent vector length");
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(pw).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn coeff(&self, pw: &[u32]) -> BigRational {
        self.terms.get(pw).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|p| p.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut r = self.clone();
        for (p, c) in &other.terms {
            r.add_term(p.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        let mut r = Poly::zero(self.nvars);
        if c.is_zero() {
            return r;
        }
        for (p, v) in &self.terms {
            r.terms.insert(p.clone(), v * c);
        }
        r
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut r = Poly::zero(self.nvars);
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                let pw: Powers = p.iter().zip(q).map(|(x, y)| x + y).collect();
                r.add_term(pw, a * b);
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::constant(self.nvars, BigRational::one());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Substitute variable `i` by `subs[i]`; all substitutes share one variable set.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.nvars);
        let m = subs.first().map(|p| p.nvars).unwrap_or(0);
        let mut r = Poly::zero(m);
        for (p, c) in &self.terms {
            let mut t = Poly::constant(m, c.clone());
            for (i, &e) in p.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&subs[i].pow(e));
                }
            }
            r = r.add(&t);
        }
        r
    }

    /// Set the listed variables to zero.
    pub fn restrict_zero(&self, vars: &[usize]) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (p, c) in &self.terms {
            if vars.iter().all(|&v| p[v] == 0) {
                r.add_term(p.clone(), c.clone());
            }
        }
        r
    }

    pub fn eval_rational(&self, x: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (p, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in p.iter().enumerate() {
                if e > 0 {
                    t *= num::pow(x[i].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (p, c) in &self.terms {
            let mut t = rat_to_f64(c);
            for (i, &e) in p.iter().enumerate() {
                if e > 0 {
                    t *= x[i].powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Apply `f` to every coefficient, dropping terms that become zero.
    pub fn map_coeffs(&self, mut f: impl FnMut(&Powers, &BigRational) -> BigRational) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (p, c) in &self.terms {
            r.add_term(p.clone(), f(p, c));
        }
        r
    }

    pub fn filter_terms(&self, mut keep: impl FnMut(&Powers, &BigRational) -> bool) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (p, c) in &self.terms {
            if keep(p, c) {
                r.add_term(p.clone(), c.clone());
            }
        }
        r
    }
}

pub fn rat_to_f64(c: &BigRational) -> f64 {
    match (c.numer().to_f64(), c.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Very large numerator or denominator: scale down by a common power of two.
            let shift = c.numer().bits().max(c.denom().bits()).saturating_sub(1000);
            let n = (c.numer().abs() >> shift).to_f64().unwrap_or(f64::MAX);
            let d = (c.denom() >> shift).to_f64().unwrap_or(f64::MAX);
            let v = n / d;
            if c.is_negative() {
                -v
            } else {
                v
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_square() {
        // (x + y)^2 with x -> a, y -> a gives 4a^2.
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.add(&y).pow(2);
        let a = Poly::var(1, 0);
        let r = p.compose(&[a.clone(), a.clone()]);
        assert_eq!(r, a.pow(2).scale(&rat(4, 1)));
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = Poly::var(1, 0);
        assert!(x.sub(&x).is_zero());
    }
}
