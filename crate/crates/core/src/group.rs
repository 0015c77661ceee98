//! Group laws in polynomial coordinates and exact/float group operations.

use crate::error::{Error, Result};
use crate::poly::{rat, rat_to_f64, Poly};
use num::integer::Integer;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A point of G = (R^d, .): exact lattice point or float point.
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Int(Vec<BigInt>),
    Float(Vec<f64>),
}

impl Element {
    pub fn int(coords: &[i64]) -> Self {
        Element::Int(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn float(coords: &[f64]) -> Self {
        Element::Float(coords.to_vec())
    }

    pub fn dim(&self) -> usize {
        match self {
            Element::Int(v) => v.len(),
            Element::Float(v) => v.len(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Element::Int(v) => v.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect(),
            Element::Float(v) => v.clone(),
        }
    }

    pub fn to_i128(&self) -> Option<Vec<i128>> {
        match self {
            Element::Int(v) => v.iter().map(|c| c.to_i128()).collect(),
            Element::Float(_) => None,
        }
    }

    pub fn from_i128(v: &[i128]) -> Self {
        Element::Int(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Element::Int(v) => v.iter().all(|c| c.is_zero()),
            Element::Float(v) => v.iter().all(|&c| c == 0.0),
        }
    }
}

/// One monomial term compiled for fast evaluation.
#[derive(Clone, Debug)]
struct FastTerm {
    /// Integer coefficient after clearing the coordinate's common denominator.
    scaled: Option<i128>,
    coeff: f64,
    vars: Vec<(usize, u32)>,
}

#[derive(Clone, Debug)]
struct FastPoly {
    den: Option<i128>,
    terms: Vec<FastTerm>,
}

impl FastPoly {
    fn compile(p: &Poly) -> Self {
        let mut l = BigInt::one();
        for (_, c) in p.terms() {
            l = l.lcm(c.denom());
        }
        let den = l.to_i128();
        let terms = p
            .terms()
            .map(|(pw, c)| {
                let scaled = (c * BigRational::from_integer(l.clone())).to_integer().to_i128();
                let vars = pw
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e))
                    .collect();
                FastTerm { scaled: if den.is_some() { scaled } else { None }, coeff: rat_to_f64(c), vars }
            })
            .collect();
        FastPoly { den, terms }
    }

    fn eval_f64(&self, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            let mut m = t.coeff;
            for &(i, e) in &t.vars {
                m *= if e == 1 { v[i] } else { v[i].powi(e as i32) };
            }
            acc += m;
        }
        acc
    }

    fn eval_i128(&self, v: &[i128]) -> std::result::Result<i128, FastFail> {
        let den = self.den.ok_or(FastFail::Overflow)?;
        let mut acc: i128 = 0;
        for t in &self.terms {
            let mut m = t.scaled.ok_or(FastFail::Overflow)?;
            for &(i, e) in &t.vars {
                for _ in 0..e {
                    m = m.checked_mul(v[i]).ok_or(FastFail::Overflow)?;
                }
            }
            acc = acc.checked_add(m).ok_or(FastFail::Overflow)?;
        }
        if den == 1 {
            Ok(acc)
        } else if acc % den == 0 {
            Ok(acc / den)
        } else {
            Err(FastFail::NonIntegral)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FastFail {
    Overflow,
    NonIntegral,
}

/// Group law (R^d, .) with multiplication P(x, y), inverse Q(x) and optional log map.
///
/// `mult` polynomials live on 2d variables (x_1..x_d, y_1..y_d); `inv` and `log` on d.
#[derive(Clone, Debug)]
pub struct GroupLaw {
    pub name: String,
    dim: usize,
    mult: Vec<Poly>,
    inv: Vec<Poly>,
    log: Option<Vec<Poly>>,
    fast_mult: Vec<FastPoly>,
    fast_inv: Vec<FastPoly>,
}

impl PartialEq for GroupLaw {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.mult == other.mult && self.inv == other.inv
    }
}

impl GroupLaw {
    /// Build a law; checks shapes and the degree cap, not the group axioms (see [`GroupLaw::validate`]).
    pub fn new(name: &str, mult: Vec<Poly>, inv: Vec<Poly>, log: Option<Vec<Poly>>) -> Result<Self> {
        let dim = mult.len();
        if inv.len() != dim {
            return Err(Error::Dimension { expected: dim, got: inv.len() });
        }
        for p in &mult {
            if p.nvars() != 2 * dim {
                return Err(Error::InvalidLaw("multiplication polynomial must use 2d variables".into()));
            }
            if p.degree() as usize > dim.max(1) {
                return Err(Error::InvalidLaw(format!("degree {} exceeds cap {}", p.degree(), dim)));
            }
        }
        for p in inv.iter().chain(log.iter().flatten()) {
            if p.nvars() != dim {
                return Err(Error::InvalidLaw("inverse/log polynomial must use d variables".into()));
            }
        }
        if let Some(l) = &log {
            if l.len() != dim {
                return Err(Error::Dimension { expected: dim, got: l.len() });
            }
        }
        let fast_mult = mult.iter().map(FastPoly::compile).collect();
        let fast_inv = inv.iter().map(FastPoly::compile).collect();
        Ok(GroupLaw { name: name.to_string(), dim, mult, inv, log, fast_mult, fast_inv })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mult(&self) -> &[Poly] {
        &self.mult
    }

    pub fn inv(&self) -> &[Poly] {
        &self.inv
    }

    pub fn log_map(&self) -> Option<&[Poly]> {
        self.log.as_deref()
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn with_log(mut self, log: Option<Vec<Poly>>) -> Self {
        self.log = log;
        self
    }

    pub fn identity(&self) -> Element {
        Element::Int(vec![BigInt::zero(); self.dim])
    }

    pub fn is_abelian(&self) -> bool {
        self.mult.iter().all(|p| p.num_terms() == 2)
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        match (a, b) {
            (Element::Int(x), Element::Int(y)) => {
                if let (Some(xs), Some(ys)) = (a.to_i128(), b.to_i128()) {
                    let mut out = vec![0i128; self.dim];
                    match self.mul_i128(&xs, &ys, &mut out) {
                        Ok(()) => return Ok(Element::from_i128(&out)),
                        Err(FastFail::NonIntegral) => {}
                        Err(FastFail::Overflow) => {}
                    }
                }
                let v: Vec<BigRational> =
                    x.iter().chain(y).map(|c| BigRational::from_integer(c.clone())).collect();
                let mut out = Vec::with_capacity(self.dim);
                for (i, p) in self.mult.iter().enumerate() {
                    let r = p.eval_rational(&v);
                    if !r.is_integer() {
                        return Err(Error::NonIntegral { coord: i });
                    }
                    out.push(r.to_integer());
                }
                Ok(Element::Int(out))
            }
            (Element::Float(x), Element::Float(y)) => {
                let mut out = vec![0.0; self.dim];
                self.mul_f64(x, y, &mut out);
                Ok(Element::Float(out))
            }
            _ => Err(Error::InvalidLaw("mixed scalar kinds in multiply".into())),
        }
    }

    pub fn inverse(&self, a: &Element) -> Result<Element> {
        self.check_dim(a)?;
        match a {
            Element::Int(x) => {
                if let Some(xs) = a.to_i128() {
                    let mut out = vec![0i128; self.dim];
                    if self.inv_i128(&xs, &mut out).is_ok() {
                        return Ok(Element::from_i128(&out));
                    }
                }
                let v: Vec<BigRational> = x.iter().map(|c| BigRational::from_integer(c.clone())).collect();
                let mut out = Vec::with_capacity(self.dim);
                for (i, p) in self.inv.iter().enumerate() {
                    let r = p.eval_rational(&v);
                    if !r.is_integer() {
                        return Err(Error::NonIntegral { coord: i });
                    }
                    out.push(r.to_integer());
                }
                Ok(Element::Int(out))
            }
            Element::Float(x) => {
                let mut out = vec![0.0; self.dim];
                self.inv_f64(x, &mut out);
                Ok(Element::Float(out))
            }
        }
    }

    /// Integer power g^k (k may be negative), by binary powering.
    pub fn power(&self, g: &Element, k: i64) -> Result<Element> {
        let base = if k < 0 { self.inverse(g)? } else { g.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = match g {
            Element::Int(_) => self.identity(),
            Element::Float(_) => Element::Float(vec![0.0; self.dim]),
        };
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.multiply(&acc, &sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = self.multiply(&sq, &sq)?;
            }
        }
        Ok(acc)
    }

    /// Commutator [a, b] = a^-1 b^-1 a b.
    pub fn commutator(&self, a: &Element, b: &Element) -> Result<Element> {
        let ai = self.inverse(a)?;
        let bi = self.inverse(b)?;
        let t = self.multiply(&ai, &bi)?;
        let t = self.multiply(&t, a)?;
        self.multiply(&t, b)
    }

    /// Fixed-width product; callers fall back to [`GroupLaw::multiply`] on failure.
    pub fn mul_i128(&self, x: &[i128], y: &[i128], out: &mut [i128]) -> std::result::Result<(), FastFail> {
        let d = self.dim;
        let mut v = [0i128; 16];
        let v: &mut [i128] = if 2 * d <= 16 { &mut v[..2 * d] } else { return Err(FastFail::Overflow) };
        v[..d].copy_from_slice(x);
        v[d..].copy_from_slice(y);
        for (o, p) in out.iter_mut().zip(&self.fast_mult) {
            *o = p.eval_i128(v)?;
        }
        Ok(())
    }

    pub fn inv_i128(&self, x: &[i128], out: &mut [i128]) -> std::result::Result<(), FastFail> {
        for (o, p) in out.iter_mut().zip(&self.fast_inv) {
            *o = p.eval_i128(x)?;
        }
        Ok(())
    }

    pub fn mul_f64(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let d = self.dim;
        let mut buf = [0.0f64; 32];
        let v: Vec<f64>;
        let v: &[f64] = if 2 * d <= 32 {
            buf[..d].copy_from_slice(x);
            buf[d..2 * d].copy_from_slice(y);
            &buf[..2 * d]
        } else {
            v = x.iter().chain(y).copied().collect();
            &v
        };
        for (o, p) in out.iter_mut().zip(&self.fast_mult) {
            *o = p.eval_f64(v);
        }
    }

    pub fn inv_f64(&self, x: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.fast_inv) {
            *o = p.eval_f64(x);
        }
    }

    /// Exact log coordinates of a lattice element (requires a log map).
    pub fn log_rational(&self, g: &Element) -> Result<Vec<BigRational>> {
        let log = self.log.as_ref().ok_or_else(|| Error::Unsupported(format!("no log map for {}", self.name)))?;
        let v: Vec<BigRational> = match g {
            Element::Int(x) => x.iter().map(|c| BigRational::from_integer(c.clone())).collect(),
            Element::Float(_) => return Err(Error::Unsupported("exact log of a float element".into())),
        };
        Ok(log.iter().map(|p| p.eval_rational(&v)).collect())
    }

    fn check_dim(&self, a: &Element) -> Result<()> {
        if a.dim() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: a.dim() });
        }
        Ok(())
    }

    /// Check the structural invariants symbolically and associativity at random float points.
    pub fn validate(&self) -> ValidationReport {
        let d = self.dim;
        let mut issues = Vec::new();
        let mut identity = true;
        let mut triangular = true;
        let mut inverse_form = true;
        for (i, p) in self.mult.iter().enumerate() {
            for (pw, c) in p.terms() {
                let xdeg: u32 = pw[..d].iter().sum();
                let ydeg: u32 = pw[d..].iter().sum();
                let lin_x = xdeg == 1 && ydeg == 0 && pw[i] == 1;
                let lin_y = ydeg == 1 && xdeg == 0 && pw[d + i] == 1;
                if lin_x || lin_y {
                    if !c.is_one() {
                        identity = false;
                        issues.push(format!("p_{}: linear coefficient {} != 1", i + 1, c));
                    }
                    continue;
                }
                if xdeg == 0 || ydeg == 0 {
                    identity = false;
                    issues.push(format!("p_{}: term {:?} survives at x=0 or y=0", i + 1, pw));
                }
                if pw[i..d].iter().chain(&pw[d + i..]).any(|&e| e > 0) {
                    triangular = false;
                    issues.push(format!("p_{}: term {:?} uses a coordinate >= {}", i + 1, pw, i + 1));
                }
            }
            let lx = p.coeff(&unit(2 * d, i));
            let ly = p.coeff(&unit(2 * d, d + i));
            if !lx.is_one() || !ly.is_one() {
                identity = false;
                issues.push(format!("p_{}: missing linear part x_{0} + y_{0}", i + 1));
            }
        }
        for (i, q) in self.inv.iter().enumerate() {
            if q.coeff(&unit(d, i)) != -BigRational::one() {
                inverse_form = false;
                issues.push(format!("q_{}: linear part is not -x_{}", i + 1, i + 1));
            }
            for (pw, _) in q.terms() {
                let lin = pw.iter().sum::<u32>() == 1 && pw[i] == 1;
                if !lin && pw[i..].iter().any(|&e| e > 0) {
                    inverse_form = false;
                    issues.push(format!("q_{}: term {:?} uses a coordinate >= {}", i + 1, pw, i + 1));
                }
            }
        }
        // P(Q(x), x) = 0.
        let xs: Vec<Poly> = (0..d).map(|i| Poly::var(d, i)).collect();
        let subs: Vec<Poly> = self.inv.iter().cloned().chain(xs).collect();
        let mut inverse_identity = true;
        for (i, p) in self.mult.iter().enumerate() {
            if !p.compose(&subs).is_zero() {
                inverse_identity = false;
                issues.push(format!("P(Q(x),x)_{} is not identically zero", i + 1));
            }
        }
        let degree_cap = self.mult.iter().chain(&self.inv).all(|p| p.degree() as usize <= d.max(1));
        if !degree_cap {
            issues.push("degree cap exceeded".into());
        }
        let assoc = self.associativity_residual(1000, 0x5eed);
        let associativity_ok = assoc <= 1e-9;
        if !associativity_ok {
            issues.push(format!("associativity residual {assoc:.3e}"));
        }
        ValidationReport {
            identity,
            triangular,
            inverse_form,
            inverse_identity,
            degree_cap,
            associativity_max_rel: assoc,
            associativity_ok,
            issues,
        }
    }

    /// Max relative residual of (ab)c vs a(bc) over random points in [-2,2]^d.
    pub fn associativity_residual(&self, points: usize, seed: u64) -> f64 {
        let d = self.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        let (mut ab, mut abc, mut bc, mut abc2) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
        for _ in 0..points {
            let a: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let b: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            self.mul_f64(&a, &b, &mut ab);
            self.mul_f64(&ab, &c, &mut abc);
            self.mul_f64(&b, &c, &mut bc);
            self.mul_f64(&a, &bc, &mut abc2);
            for i in 0..d {
                let scale = 1.0f64.max(abc[i].abs());
                worst = worst.max((abc[i] - abc2[i]).abs() / scale);
            }
        }
        worst
    }

    pub fn to_json(&self) -> LawFile {
        LawFile {
            name: self.name.clone(),
            dim: self.dim,
            mult: self.mult.iter().map(|p| encode_poly(p, self.dim, true)).collect(),
            inv: self.inv.iter().map(|p| encode_poly(p, self.dim, false)).collect(),
            log: self.log.as_ref().map(|l| l.iter().map(|p| encode_poly(p, self.dim, false)).collect()),
        }
    }

    pub fn from_json(f: &LawFile) -> Result<Self> {
        let d = f.dim;
        if f.mult.len() != d || f.inv.len() != d {
            return Err(Error::InvalidLaw("polynomial count differs from dim".into()));
        }
        let mult = f.mult.iter().map(|m| decode_poly(m, d, true)).collect::<Result<Vec<_>>>()?;
        let inv = f.inv.iter().map(|m| decode_poly(m, d, false)).collect::<Result<Vec<_>>>()?;
        let log = match &f.log {
            Some(l) => Some(l.iter().map(|m| decode_poly(m, d, false)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        GroupLaw::new(&f.name, mult, inv, log)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("law serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: LawFile = serde_json::from_str(s)?;
        GroupLaw::from_json(&f)
    }

    /// Human-readable polynomial listing.
    pub fn describe(&self) -> String {
        let d = self.dim;
        let mut names: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        names.extend((1..=d).map(|i| format!("y{i}")));
        let mut s = format!("group {} (dim {})\nmultiplication:\n", self.name, d);
        for (i, p) in self.mult.iter().enumerate() {
            s += &format!("  z{} = {}\n", i + 1, format_poly(p, &names));
        }
        s += "inverse:\n";
        for (i, p) in self.inv.iter().enumerate() {
            s += &format!("  q{} = {}\n", i + 1, format_poly(p, &names[..d]));
        }
        if let Some(l) = &self.log {
            s += "log:\n";
            for (i, p) in l.iter().enumerate() {
                s += &format!("  l{} = {}\n", i + 1, format_poly(p, &names[..d]));
            }
        }
        s
    }
}

pub fn format_poly(p: &Poly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    // Order by total degree, then lexicographically, for stable output.
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by_key(|(pw, _)| (pw.iter().sum::<u32>(), std::cmp::Reverse((*pw).clone())));
    for (pw, c) in terms {
        let mut mono = Vec::new();
        for (i, &e) in pw.iter().enumerate() {
            match e {
                0 => {}
                1 => mono.push(names[i].clone()),
                _ => mono.push(format!("{}^{}", names[i], e)),
            }
        }
        let m = mono.join("*");
        let body = if m.is_empty() {
            c.to_string()
        } else if c.is_one() {
            m
        } else if *c == -BigRational::one() {
            format!("-{m}")
        } else {
            format!("({c})*{m}")
        };
        parts.push(body);
    }
    parts.join(" + ").replace("+ -", "- ")
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ValidationReport {
    pub identity: bool,
    pub triangular: bool,
    pub inverse_form: bool,
    pub inverse_identity: bool,
    pub degree_cap: bool,
    pub associativity_max_rel: f64,
    pub associativity_ok: bool,
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.identity
            && self.triangular
            && self.inverse_form
            && self.inverse_identity
            && self.degree_cap
            && self.associativity_ok
    }
}

/// Integer that serializes as a JSON number when it fits in i64, else as a decimal string.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    fn from_big(b: &BigInt) -> Self {
        match b.to_i64() {
            Some(v) => JsonInt::Small(v),
            None => JsonInt::Big(b.to_string()),
        }
    }

    fn to_big(&self) -> Result<BigInt> {
        match self {
            JsonInt::Small(v) => Ok(BigInt::from(*v)),
            JsonInt::Big(s) => s.parse().map_err(|_| Error::InvalidLaw(format!("bad integer {s:?}"))),
        }
    }
}

/// Monomial as `[coeff_num, coeff_den, x_powers, y_powers]`.
pub type JsonMonomial = (JsonInt, JsonInt, Vec<u32>, Vec<u32>);

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LawFile {
    #[serde(default)]
    pub name: String,
    pub dim: usize,
    pub mult: Vec<Vec<JsonMonomial>>,
    pub inv: Vec<Vec<JsonMonomial>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log: Option<Vec<Vec<JsonMonomial>>>,
}

fn encode_poly(p: &Poly, d: usize, binary: bool) -> Vec<JsonMonomial> {
    p.terms()
        .map(|(pw, c)| {
            let (xp, yp) = if binary { (pw[..d].to_vec(), pw[d..].to_vec()) } else { (pw.clone(), vec![0; d]) };
            (JsonInt::from_big(c.numer()), JsonInt::from_big(c.denom()), xp, yp)
        })
        .collect()
}

fn decode_poly(ms: &[JsonMonomial], d: usize, binary: bool) -> Result<Poly> {
    let mut p = Poly::zero(if binary { 2 * d } else { d });
    for (num, den, xp, yp) in ms {
        if xp.len() != d || yp.len() != d {
            return Err(Error::InvalidLaw("power vector length differs from dim".into()));
        }
        let den = den.to_big()?;
        if den.is_zero() {
            return Err(Error::InvalidLaw("zero denominator".into()));
        }
        let c = BigRational::new(num.to_big()?, den);
        if c.is_zero() {
            return Err(Error::InvalidLaw("stored monomial with zero coefficient".into()));
        }
        let pw = if binary {
            xp.iter().chain(yp).copied().collect()
        } else {
            if yp.iter().any(|&e| e > 0) {
                return Err(Error::InvalidLaw("unary polynomial with y powers".into()));
            }
            xp.clone()
        };
        p.add_term(pw, c);
    }
    Ok(p)
}

// ----- built-in laws -----

fn lin_mult(d: usize, i: usize) -> Poly {
    Poly::var(2 * d, i).add(&Poly::var(2 * d, d + i))
}

fn xy(d: usize, c: BigRational, i: usize, j: usize) -> Poly {
    Poly::monomial(2 * d, c, &[(i, 1), (d + j, 1)])
}

fn m1(d: usize, c: BigRational, vars: &[(usize, u32)]) -> Poly {
    Poly::monomial(d, c, vars)
}

pub fn abelian(d: usize) -> GroupLaw {
    let mult = (0..d).map(|i| lin_mult(d, i)).collect();
    let inv = (0..d).map(|i| Poly::var(d, i).scale(&rat(-1, 1))).collect();
    let log = (0..d).map(|i| Poly::var(d, i)).collect();
    GroupLaw::new(&format!("abelian({d})"), mult, inv, Some(log)).expect("abelian law")
}

/// Heisenberg group in matrix coordinates: z = x3 + y3 + x1*y2.
pub fn h3_matrix() -> GroupLaw {
    let d = 3;
    let mult = vec![lin_mult(d, 0), lin_mult(d, 1), lin_mult(d, 2).add(&xy(d, rat(1, 1), 0, 1))];
    let inv = vec![
        m1(d, rat(-1, 1), &[(0, 1)]),
        m1(d, rat(-1, 1), &[(1, 1)]),
        m1(d, rat(-1, 1), &[(2, 1)]).add(&m1(d, rat(1, 1), &[(0, 1), (1, 1)])),
    ];
    let log = vec![
        Poly::var(d, 0),
        Poly::var(d, 1),
        Poly::var(d, 2).add(&m1(d, rat(-1, 2), &[(0, 1), (1, 1)])),
    ];
    GroupLaw::new("h3_matrix", mult, inv, Some(log)).expect("h3 law")
}

/// Heisenberg group in exponential coordinates: w = w + w' + (uv' - u'v)/2.
pub fn h3_exp() -> GroupLaw {
    let d = 3;
    let w = lin_mult(d, 2).add(&xy(d, rat(1, 2), 0, 1)).add(&xy(d, rat(-1, 2), 1, 0));
    let mult = vec![lin_mult(d, 0), lin_mult(d, 1), w];
    let inv = (0..d).map(|i| Poly::var(d, i).scale(&rat(-1, 1))).collect();
    let log = (0..d).map(|i| Poly::var(d, i)).collect();
    GroupLaw::new("h3_exp", mult, inv, Some(log)).expect("h3 exp law")
}

/// Coordinate change from matrix to exponential coordinates on H3: (x, y, z - xy/2).
pub fn h3_matrix_to_exp() -> Vec<Poly> {
    let d = 3;
    vec![Poly::var(d, 0), Poly::var(d, 1), Poly::var(d, 2).add(&m1(d, rat(-1, 2), &[(0, 1), (1, 1)]))]
}

/// Unipotent 4x4 upper-triangular matrices; coordinates
/// (x12, x23, x34, x13, x24, x14).
pub fn u4_matrix() -> GroupLaw {
    let d = 6;
    let one = || rat(1, 1);
    let mult = vec![
        lin_mult(d, 0),
        lin_mult(d, 1),
        lin_mult(d, 2),
        lin_mult(d, 3).add(&xy(d, one(), 0, 1)),
        lin_mult(d, 4).add(&xy(d, one(), 1, 2)),
        lin_mult(d, 5).add(&xy(d, one(), 0, 4)).add(&xy(d, one(), 3, 2)),
    ];
    let neg = |i: usize| Poly::var(d, i).scale(&rat(-1, 1));
    let inv = vec![
        neg(0),
        neg(1),
        neg(2),
        neg(3).add(&m1(d, one(), &[(0, 1), (1, 1)])),
        neg(4).add(&m1(d, one(), &[(1, 1), (2, 1)])),
        neg(5)
            .add(&m1(d, one(), &[(0, 1), (4, 1)]))
            .add(&m1(d, one(), &[(3, 1), (2, 1)]))
            .add(&m1(d, rat(-1, 1), &[(0, 1), (1, 1), (2, 1)])),
    ];
    let log = vec![
        Poly::var(d, 0),
        Poly::var(d, 1),
        Poly::var(d, 2),
        Poly::var(d, 3).add(&m1(d, rat(-1, 2), &[(0, 1), (1, 1)])),
        Poly::var(d, 4).add(&m1(d, rat(-1, 2), &[(1, 1), (2, 1)])),
        Poly::var(d, 5)
            .add(&m1(d, rat(-1, 2), &[(0, 1), (4, 1)]))
            .add(&m1(d, rat(-1, 2), &[(3, 1), (2, 1)]))
            .add(&m1(d, rat(1, 3), &[(0, 1), (1, 1), (2, 1)])),
    ];
    GroupLaw::new("u4_matrix", mult, inv, Some(log)).expect("u4 law")
}

/// Built-in law by name: `abelian(d)`, `abelianD`, `h3_matrix`, `h3_exp`, `u4_matrix`.
pub fn builtin(name: &str) -> Result<GroupLaw> {
    let n = name.trim();
    if let Some(rest) = n.strip_prefix("abelian") {
        let digits = rest.trim_start_matches('(').trim_end_matches(')');
        let d: usize = digits.parse().map_err(|_| Error::InvalidLaw(format!("unknown group {name:?}")))?;
        if d == 0 || d > 8 {
            return Err(Error::InvalidLaw(format!("abelian dimension {d} out of range 1..=8")));
        }
        return Ok(abelian(d));
    }
    match n {
        "h3_matrix" => Ok(h3_matrix()),
        "h3_exp" => Ok(h3_exp()),
        "u4_matrix" => Ok(u4_matrix()),
        _ => Err(Error::InvalidLaw(format!("unknown group {name:?}"))),
    }
}

pub const BUILTIN_NAMES: &[&str] = &["abelian(d)", "h3_matrix", "h3_exp", "u4_matrix"];

/// Unit coordinate vector e_i as a lattice element.
pub fn basis(d: usize, i: usize) -> Element {
    let mut v = vec![0i64; d];
    v[i] = 1;
    Element::int(&v)
}

impl Element {
    pub fn abs_max(&self) -> f64 {
        self.to_f64().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Sign of a big integer as f64 helper used by samplers.
pub fn big_sign(b: &BigInt) -> f64 {
    if b.is_negative() {
        -1.0
    } else {
        1.0
    }
}
