//! Straight dilations, rescaled laws and the limit law.

use crate::error::{Error, Result};
use crate::group::{format_poly, Element, GroupLaw, LawFile};
use crate::poly::{rat_to_f64, Poly};
use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DilationSource {
    Manual,
    FromWeights,
}

/// delta_t(u) = (t^{b_i} u_i).
#[derive(Clone, Debug, PartialEq)]
pub struct DilationStructure {
    b: Vec<BigRational>,
    beta: BigRational,
    pub source: DilationSource,
}

/// Scale parameter: exact rational or float.
#[derive(Clone, Debug)]
pub enum Scale {
    Exact(BigRational),
    Float(f64),
}

impl Scale {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scale::Exact(r) => rat_to_f64(r),
            Scale::Float(f) => *f,
        }
    }

    fn is_positive(&self) -> bool {
        match self {
            Scale::Exact(r) => r.is_positive(),
            Scale::Float(f) => *f > 0.0,
        }
    }

    /// t^e, exact when t is exact and e an integer.
    fn pow(&self, e: &BigRational) -> BigRational {
        if let Scale::Exact(t) = self {
            if e.is_integer() {
                if let Some(k) = e.to_integer().to_i32() {
                    return num::traits::Pow::pow(t, k);
                }
            }
        }
        let v = self.to_f64().powf(rat_to_f64(e));
        BigRational::from_float(v).unwrap_or_else(BigRational::zero)
    }
}

impl DilationStructure {
    pub fn new(b: Vec<BigRational>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::InvalidDilation("empty exponent vector".into()));
        }
        if let Some(i) = b.iter().position(|x| !x.is_positive()) {
            return Err(Error::InvalidDilation(format!("exponent b_{} = {} is not positive", i + 1, b[i])));
        }
        let min = b.iter().min().cloned().expect("nonempty");
        let beta = min.recip();
        Ok(DilationStructure { b, beta, source: DilationSource::Manual })
    }

    /// Parse exponents such as `1,1,2` or `2/3,1,5/3`.
    pub fn parse(s: &str) -> Result<Self> {
        let b = s.split(',').map(|t| parse_rational(t.trim())).collect::<Result<Vec<_>>>()?;
        DilationStructure::new(b)
    }

    pub fn from_ints(b: &[i64]) -> Self {
        DilationStructure::new(b.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
            .expect("positive exponents")
    }

    pub fn with_beta(mut self, beta: BigRational) -> Result<Self> {
        let max_beta_i = self.b.iter().min().expect("nonempty").recip();
        if beta < max_beta_i {
            return Err(Error::InvalidDilation(format!("beta {beta} below max beta_i {max_beta_i}")));
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn with_source(mut self, s: DilationSource) -> Self {
        self.source = s;
        self
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn exponents(&self) -> &[BigRational] {
        &self.b
    }

    pub fn b_f64(&self) -> Vec<f64> {
        self.b.iter().map(rat_to_f64).collect()
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn beta_f64(&self) -> f64 {
        rat_to_f64(&self.beta)
    }

    /// Warnings for coordinates whose beta_i = 1/b_i leaves (0, 2).
    pub fn stable_mode_warnings(&self) -> Vec<String> {
        let two = BigRational::from_integer(BigInt::from(2));
        self.b
            .iter()
            .enumerate()
            .filter(|(_, b)| b.recip() >= two)
            .map(|(i, b)| format!("beta_{} = {} is not in (0,2)", i + 1, b.recip()))
            .collect()
    }

    /// sum_i b_i = log det(delta_t) / log t.
    pub fn trace(&self) -> BigRational {
        self.b.iter().fold(BigRational::zero(), |a, x| a + x)
    }

    pub fn det(&self, t: f64) -> f64 {
        t.powf(rat_to_f64(&self.trace()))
    }

    pub fn dilate_f64(&self, t: f64, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.b).map(|(xi, b)| xi * t.powf(rat_to_f64(b))).collect()
    }

    /// Scaling factors t^{b_i}.
    pub fn factors(&self, t: f64) -> Vec<f64> {
        self.b.iter().map(|b| t.powf(rat_to_f64(b))).collect()
    }

    pub fn dilate(&self, t: &Scale, x: &Element) -> Result<Element> {
        if !t.is_positive() {
            return Err(Error::InvalidDilation("dilation parameter must be positive".into()));
        }
        if x.dim() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: x.dim() });
        }
        if let (Scale::Exact(_), Element::Int(v)) = (t, x) {
            let out: Vec<BigRational> =
                v.iter().zip(&self.b).map(|(c, b)| BigRational::from_integer(c.clone()) * t.pow(b)).collect();
            if self.b.iter().all(|b| b.is_integer()) && out.iter().all(|c| c.is_integer()) {
                return Ok(Element::Int(out.iter().map(|c| c.to_integer()).collect()));
            }
            return Ok(Element::Float(out.iter().map(rat_to_f64).collect()));
        }
        Ok(Element::Float(self.dilate_f64(t.to_f64(), &x.to_f64())))
    }

    /// t-exponent of a monomial of coordinate i: sum(powers * b) - b_i.
    pub fn monomial_exponent(&self, powers: &[u32], i: usize) -> BigRational {
        let d = self.dim();
        let mut e = -self.b[i].clone();
        for (j, &p) in powers.iter().enumerate() {
            if p > 0 {
                e += &self.b[j % d] * BigRational::from_integer(BigInt::from(p));
            }
        }
        e
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidDilation(format!("cannot parse {s:?} as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(BigRational::from_integer(n));
    }
    // Decimal literal: exact decimal value.
    let (int, frac) = s.split_once('.').ok_or_else(bad)?;
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(n, den))
}

fn rescale_polys(polys: &[Poly], d: &DilationStructure, t: &Scale) -> Vec<Poly> {
    polys
        .iter()
        .enumerate()
        .map(|(i, p)| p.map_coeffs(|pw, c| c * t.pow(&d.monomial_exponent(pw, i))))
        .collect()
}

/// Law of x ._t y = delta_t^{-1}(delta_t x . delta_t y).
pub fn rescaled_law(law: &GroupLaw, d: &DilationStructure, t: &Scale) -> Result<GroupLaw> {
    check_dims(law, d)?;
    if !t.is_positive() {
        return Err(Error::InvalidDilation("dilation parameter must be positive".into()));
    }
    let mult = rescale_polys(law.mult(), d, t);
    let inv = rescale_polys(law.inv(), d, t);
    let log = law.log_map().map(|l| rescale_polys(l, d, t));
    GroupLaw::new(&format!("{}@t={}", law.name, t.to_f64()), mult, inv, log)
}

fn check_dims(law: &GroupLaw, d: &DilationStructure) -> Result<()> {
    if law.dim() != d.dim() {
        return Err(Error::Dimension { expected: law.dim(), got: d.dim() });
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OffendingMonomial {
    /// "mult", "inv" or "log".
    pub polynomial: String,
    /// 1-based coordinate.
    pub coordinate: usize,
    pub monomial: String,
    pub exponent: String,
}

#[derive(Clone, Debug)]
pub struct LimitLawResult {
    pub admissible: bool,
    pub limit: Option<GroupLaw>,
    pub offending: Vec<OffendingMonomial>,
}

#[derive(Serialize, Deserialize)]
pub struct LimitLawJson {
    pub admissible: bool,
    pub exponents: Vec<String>,
    pub limit: Option<LawFile>,
    pub limit_text: Option<String>,
    pub offending: Vec<OffendingMonomial>,
}

impl LimitLawResult {
    pub fn to_json(&self, d: &DilationStructure) -> LimitLawJson {
        LimitLawJson {
            admissible: self.admissible,
            exponents: d.exponents().iter().map(|b| b.to_string()).collect(),
            limit: self.limit.as_ref().map(|l| l.to_json()),
            limit_text: self.limit.as_ref().map(|l| l.describe()),
            offending: self.offending.clone(),
        }
    }
}

fn var_names(d: usize, binary: bool) -> Vec<String> {
    let mut names: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    if binary {
        names.extend((1..=d).map(|i| format!("y{i}")));
    }
    names
}

fn limit_polys(
    polys: &[Poly],
    d: &DilationStructure,
    label: &str,
    binary: bool,
    offending: &mut Vec<OffendingMonomial>,
) -> Vec<Poly> {
    let names = var_names(d.dim(), binary);
    polys
        .iter()
        .enumerate()
        .map(|(i, p)| {
            for (pw, c) in p.terms() {
                let e = d.monomial_exponent(pw, i);
                if e.is_positive() {
                    let mut mono = Poly::zero(pw.len());
                    mono.add_term(pw.clone(), c.clone());
                    offending.push(OffendingMonomial {
                        polynomial: label.into(),
                        coordinate: i + 1,
                        monomial: format_poly(&mono, &names),
                        exponent: e.to_string(),
                    });
                }
            }
            p.filter_terms(|pw, _| d.monomial_exponent(pw, i).is_zero())
        })
        .collect()
}

/// Symbolic limit of the rescaled laws as t -> infinity.
pub fn limit_law(law: &GroupLaw, d: &DilationStructure) -> Result<LimitLawResult> {
    check_dims(law, d)?;
    let mut offending = Vec::new();
    let mult = limit_polys(law.mult(), d, "mult", true, &mut offending);
    let inv = limit_polys(law.inv(), d, "inv", false, &mut offending);
    let mut log_off = Vec::new();
    let log = law.log_map().map(|l| limit_polys(l, d, "log", false, &mut log_off));
    if !offending.is_empty() {
        return Ok(LimitLawResult { admissible: false, limit: None, offending });
    }
    // A log map with positive exponents cannot be carried to the limit.
    let log = if log_off.is_empty() { log } else { None };
    let name = format!("lim[{}]", law.name);
    let limit = GroupLaw::new(&name, mult, inv, log)?;
    Ok(LimitLawResult { admissible: true, limit: Some(limit), offending })
}

/// True iff every monomial of the law has t-exponent exactly 0.
pub fn check_automorphism(limit: &GroupLaw, d: &DilationStructure) -> bool {
    if limit.dim() != d.dim() {
        return false;
    }
    let zero_exp = |polys: &[Poly]| {
        polys.iter().enumerate().all(|(i, p)| p.terms().all(|(pw, _)| d.monomial_exponent(pw, i).is_zero()))
    };
    zero_exp(limit.mult()) && zero_exp(limit.inv())
}

/// Non-linear monomials of the multiplication law, as (1-based coordinate, monomial text).
pub fn bracket_monomials(law: &GroupLaw) -> Vec<(usize, String)> {
    let names = var_names(law.dim(), true);
    let mut out = Vec::new();
    for (i, p) in law.mult().iter().enumerate() {
        for (pw, c) in p.terms() {
            if pw.iter().sum::<u32>() > 1 {
                let mut m = Poly::zero(pw.len());
                m.add_term(pw.clone(), c.clone());
                out.push((i + 1, format_poly(&m, &names)));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeRow {
    pub t: f64,
    pub value: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeTable {
    pub rows: Vec<ProbeRow>,
    /// max_i |row_last_i - (x . y)_i| when a reference limit is supplied.
    pub max_deviation: Option<f64>,
    pub diverging: bool,
}

/// Rows of delta_{1/t}(delta_t x . delta_t y) over `t_grid`.
pub fn numeric_limit_probe(
    law: &GroupLaw,
    d: &DilationStructure,
    x: &[f64],
    y: &[f64],
    t_grid: &[f64],
    reference: Option<&GroupLaw>,
) -> Result<ProbeTable> {
    check_dims(law, d)?;
    if t_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid.iter().any(|&t| t <= 0.0) {
        return Err(Error::InvalidDilation("t grid must be positive and increasing".into()));
    }
    let dim = law.dim();
    let mut rows = Vec::with_capacity(t_grid.len());
    let mut out = vec![0.0; dim];
    for &t in t_grid {
        let xt = d.dilate_f64(t, x);
        let yt = d.dilate_f64(t, y);
        law.mul_f64(&xt, &yt, &mut out);
        rows.push(ProbeRow { t, value: d.dilate_f64(1.0 / t, &out) });
    }
    let first = rows.first().map(|r| r.value.iter().fold(0.0f64, |m, v| m.max(v.abs()))).unwrap_or(0.0);
    let last = rows.last().map(|r| r.value.iter().fold(0.0f64, |m, v| m.max(v.abs()))).unwrap_or(0.0);
    let diverging = last > 1e3 * (1.0 + first);
    let max_deviation = match (reference, rows.last()) {
        (Some(lim), Some(r)) => {
            let mut z = vec![0.0; dim];
            lim.mul_f64(x, y, &mut z);
            Some(r.value.iter().zip(&z).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
        }
        _ => None,
    };
    Ok(ProbeTable { rows, max_deviation, diverging })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::h3_matrix;

    #[test]
    fn parse_forms() {
        let d = DilationStructure::parse("1, 2/3, 0.5").unwrap();
        assert_eq!(d.exponents()[1], BigRational::new(2.into(), 3.into()));
        assert_eq!(d.exponents()[2], BigRational::new(1.into(), 2.into()));
        assert_eq!(*d.beta(), BigRational::from_integer(2.into()));
        assert!(DilationStructure::parse("1,0").is_err());
    }

    #[test]
    fn exact_dilate_example() {
        let d = DilationStructure::from_ints(&[1, 1, 2]);
        let t = Scale::Exact(BigRational::from_integer(4.into()));
        let y = d.dilate(&t, &Element::int(&[1, 1, 1])).unwrap();
        assert_eq!(y, Element::int(&[4, 4, 16]));
    }

    #[test]
    fn offending_listing() {
        let r = limit_law(&h3_matrix(), &DilationStructure::from_ints(&[1, 1, 1])).unwrap();
        assert!(!r.admissible);
        let m = r.offending.iter().find(|o| o.polynomial == "mult").unwrap();
        assert_eq!((m.coordinate, m.monomial.as_str(), m.exponent.as_str()), (3, "x1*y2", "1"));
    }
}
