//! Stable-like symmetric step measures: exact pmfs, exact samplers, truncated
//! convolution powers and rescaled integrals mu_t(f).
//!
//! Every component is a density phi on a lattice Z^m embedded in the group,
//! either along the powers of one generator (`cyclic`) or on a set of
//! coordinate axes. Samplers draw an auxiliary shell radius R from the exact
//! weights C(R) h(R), where C(R) counts the shell and h(R) >= phi on it, then a
//! uniform shell point, and accept with phi/h(R).

use crate::dilation::DilationStructure;
use crate::error::{Error, Result};
use crate::group::{Element, GroupLaw};
use crate::quad::{integrate_box_dyn, QuadResult};
use crate::special::hurwitz_zeta;
use crate::testfn::TestFunction;
use rand::Rng;
use rand_distr::{Distribution, WeightedAliasIndex};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Radii up to this bound come from an alias table; larger ones from the Pareto envelope.
const TABLE_K: u64 = 2048;
/// Tail radii above this are re-drawn (probability below 1e-12 for the supported alphas).
const MAX_RADIUS: f64 = 9.0e15;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RadialNorm {
    #[default]
    L1,
    Euclid,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ExplicitDensity {
    /// (1 + sqrt(x1^2 + x2^2 + |x3 - s x1 x2|))^{-(alpha+4)}
    HeisenbergGauge,
}

fn default_shear() -> f64 {
    0.5
}

fn default_gauge_axes() -> Vec<usize> {
    vec![0, 1, 2]
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ComponentSpec {
    /// kappa (1 + |k|)^{-1-alpha} on s^k.
    Cyclic { generator: Vec<i64>, alpha: f64, weight: f64 },
    /// kappa (1 + |v|)^{-alpha-m} on the coordinate axes listed.
    SubgroupRadial {
        axes: Vec<usize>,
        alpha: f64,
        #[serde(default)]
        norm: RadialNorm,
        weight: f64,
    },
    ExplicitDensity {
        density: ExplicitDensity,
        #[serde(default = "default_gauge_axes")]
        axes: Vec<usize>,
        alpha: f64,
        #[serde(default = "default_shear")]
        shear: f64,
        weight: f64,
    },
}

impl ComponentSpec {
    pub fn alpha(&self) -> f64 {
        match self {
            ComponentSpec::Cyclic { alpha, .. }
            | ComponentSpec::SubgroupRadial { alpha, .. }
            | ComponentSpec::ExplicitDensity { alpha, .. } => *alpha,
        }
    }

    pub fn weight(&self) -> f64 {
        match self {
            ComponentSpec::Cyclic { weight, .. }
            | ComponentSpec::SubgroupRadial { weight, .. }
            | ComponentSpec::ExplicitDensity { weight, .. } => *weight,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MeasureSpec {
    pub components: Vec<ComponentSpec>,
}

impl MeasureSpec {
    /// Equal-weight cyclic components on the coordinate axes.
    pub fn axis_cyclic(dim: usize, alphas: &[f64]) -> Self {
        let p = 1.0 / alphas.len() as f64;
        let components = alphas
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let mut g = vec![0i64; dim];
                g[i] = 1;
                ComponentSpec::Cyclic { generator: g, alpha: a, weight: p }
            })
            .collect();
        MeasureSpec { components }
    }

    /// The Heisenberg gauge density with shear 1/2 on matrix coordinates.
    pub fn woob34(alpha: f64) -> Self {
        MeasureSpec {
            components: vec![ComponentSpec::ExplicitDensity {
                density: ExplicitDensity::HeisenbergGauge,
                axes: vec![0, 1, 2],
                alpha,
                shear: 0.5,
                weight: 1.0,
            }],
        }
    }

    /// Field-level validation; `prefix` names the enclosing config field.
    pub fn validate(&self, prefix: &str) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::Config { field: format!("{prefix}.components"), msg: "at least one component".into() });
        }
        let mut total = 0.0;
        for (i, c) in self.components.iter().enumerate() {
            let a = c.alpha();
            if !(a > 0.0 && a < 2.0) {
                return Err(Error::Config {
                    field: format!("{prefix}.components[{i}].alpha"),
                    msg: format!("alpha must lie in (0, 2), got {a}"),
                });
            }
            let w = c.weight();
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Config {
                    field: format!("{prefix}.components[{i}].weight"),
                    msg: format!("weight must be positive, got {w}"),
                });
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config {
                field: format!("{prefix}.components"),
                msg: format!("weights sum to {total}, not 1"),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Shape {
    L1,
    Euclid,
    Gauge { shear: f64 },
}

fn gauge_center(shear: f64, x1: i64, x2: i64) -> i64 {
    (shear * x1 as f64 * x2 as f64 + 0.5).floor() as i64
}

impl Shape {
    fn phi(&self, v: &[f64], alpha: f64) -> f64 {
        let m = v.len() as f64;
        match self {
            Shape::L1 => (1.0 + v.iter().map(|x| x.abs()).sum::<f64>()).powf(-alpha - m),
            Shape::Euclid => (1.0 + v.iter().map(|x| x * x).sum::<f64>().sqrt()).powf(-alpha - m),
            Shape::Gauge { shear } => {
                let q = v[0] * v[0] + v[1] * v[1] + (v[2] - shear * v[0] * v[1]).abs();
                (1.0 + q.sqrt()).powf(-alpha - 4.0)
            }
        }
    }

    /// Points in shell R.
    fn shell_count(&self, m: usize, r: u64) -> f64 {
        if r == 0 {
            return 1.0;
        }
        let rf = r as f64;
        match self {
            Shape::L1 => match m {
                1 => 2.0,
                2 => 4.0 * rf,
                _ => 4.0 * rf * rf + 2.0,
            },
            Shape::Euclid => (2.0 * rf + 1.0).powi(m as i32) - (2.0 * rf - 1.0).powi(m as i32),
            Shape::Gauge { .. } => 32.0 * rf * rf * rf - 24.0 * rf * rf + 20.0 * rf - 2.0,
        }
    }

    /// h(R) >= phi on shell R.
    fn envelope(&self, m: usize, r: u64, alpha: f64) -> f64 {
        let rf = r as f64;
        match self {
            Shape::L1 | Shape::Euclid => (1.0 + rf).powf(-alpha - m as f64),
            Shape::Gauge { .. } => {
                if r == 0 {
                    1.0
                } else {
                    rf.powf(-alpha - 4.0)
                }
            }
        }
    }

    /// A with C(R) h(R) <= A R^{-1-alpha} for R >= 1.
    fn tail_const(&self, m: usize) -> f64 {
        match self {
            Shape::L1 => [2.0, 4.0, 6.0][m - 1],
            Shape::Euclid => 2.0 * m as f64 * 3f64.powi(m as i32 - 1),
            Shape::Gauge { .. } => 32.0,
        }
    }

    fn exact_radial(&self) -> bool {
        matches!(self, Shape::L1)
    }

    /// Uniform point of shell R (R >= 1).
    fn sample_shell<G: Rng + ?Sized>(&self, m: usize, r: u64, rng: &mut G, out: &mut [i64]) {
        let ri = r as i64;
        match self {
            Shape::L1 => match m {
                1 => out[0] = if rng.gen::<bool>() { ri } else { -ri },
                2 => l1_ring(ri, rng.gen_range(0..4 * ri), out),
                _ => loop {
                    let t = rng.gen_range(-ri..=ri);
                    let rest = ri - t.abs();
                    let w = if rest == 0 { 1 } else { 4 * rest };
                    if rng.gen_range(0..4 * ri) < w {
                        out[2] = t;
                        if rest == 0 {
                            out[0] = 0;
                            out[1] = 0;
                        } else {
                            l1_ring(rest, rng.gen_range(0..4 * rest), &mut out[..2]);
                        }
                        break;
                    }
                },
            },
            Shape::Euclid => loop {
                let axis = rng.gen_range(0..m);
                let mut on_face = 0;
                for (i, o) in out.iter_mut().enumerate().take(m) {
                    *o = if i == axis {
                        if rng.gen::<bool>() {
                            ri
                        } else {
                            -ri
                        }
                    } else {
                        rng.gen_range(-ri..=ri)
                    };
                    if o.abs() == ri {
                        on_face += 1;
                    }
                }
                if on_face == 1 || rng.gen_range(0..on_face) == 0 {
                    break;
                }
            },
            Shape::Gauge { shear } => {
                let r128 = ri as i128;
                let lo = (r128 - 1) * (r128 - 1);
                let a = (2 * r128 + 1) * (2 * r128 + 1) * 2 * (r128 * r128 - lo);
                let b = (2 * lo + 1) * 8 * r128;
                let pick = rng.gen_range(0..(a + b));
                let j;
                if pick < a {
                    out[0] = rng.gen_range(-ri..=ri);
                    out[1] = rng.gen_range(-ri..=ri);
                    let mag = rng.gen_range((lo + 1) as i64..=(r128 * r128) as i64);
                    j = if rng.gen::<bool>() { mag } else { -mag };
                } else {
                    square_ring(ri, rng.gen_range(0..8 * ri), out);
                    j = rng.gen_range(-(lo as i64)..=lo as i64);
                }
                out[2] = j + gauge_center(*shear, out[0], out[1]);
            }
        }
    }

    /// Calls f on every point of shell R.
    fn for_each_in_shell(&self, m: usize, r: u64, f: &mut dyn FnMut(&[i64])) {
        let ri = r as i64;
        let mut v = vec![0i64; m];
        if r == 0 {
            f(&v);
            return;
        }
        match self {
            Shape::L1 => unreachable!("l1 normalization is closed form"),
            Shape::Euclid => {
                // odometer over [-R, R]^m, keep max |v_i| = R
                for x in v.iter_mut() {
                    *x = -ri;
                }
                loop {
                    if v.iter().any(|x| x.abs() == ri) {
                        f(&v);
                    }
                    let mut i = 0;
                    loop {
                        if i == m {
                            return;
                        }
                        if v[i] < ri {
                            v[i] += 1;
                            break;
                        }
                        v[i] = -ri;
                        i += 1;
                    }
                }
            }
            Shape::Gauge { shear } => {
                let lo = (ri - 1) * (ri - 1);
                let hi = ri * ri;
                for x1 in -ri..=ri {
                    for x2 in -ri..=ri {
                        let c = gauge_center(*shear, x1, x2);
                        let edge = x1.abs() == ri || x2.abs() == ri;
                        v[0] = x1;
                        v[1] = x2;
                        if edge {
                            for j in -lo..=lo {
                                v[2] = j + c;
                                f(&v);
                            }
                        }
                        for mag in lo + 1..=hi {
                            for j in [mag, -mag] {
                                v[2] = j + c;
                                f(&v);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Break-point hint for rescaled axis k given the raw earlier coordinates:
    /// (center, width) in raw units.
    fn concentration(&self, k: usize, raw_prev: &[f64]) -> (f64, f64) {
        match (self, k) {
            (_, 0) => (0.0, 1.0),
            (Shape::Gauge { shear }, 2) => {
                (shear * raw_prev[0] * raw_prev[1], (raw_prev[0] * raw_prev[0] + raw_prev[1] * raw_prev[1]).max(1.0))
            }
            _ => (0.0, raw_prev.iter().fold(1.0f64, |a, x| a.max(x.abs()))),
        }
    }
}

fn l1_ring(r: i64, i: i64, out: &mut [i64]) {
    let (q, j) = (i / r, i % r);
    let (mut x, mut y) = (r - j, j);
    for _ in 0..q {
        (x, y) = (-y, x);
    }
    out[0] = x;
    out[1] = y;
}

fn square_ring(r: i64, i: i64, out: &mut [i64]) {
    let (side, k) = (i / (2 * r), i % (2 * r));
    let (mut x, mut y) = (r, -r + k);
    for _ in 0..side {
        (x, y) = (-y, x);
    }
    out[0] = x;
    out[1] = y;
}

type NormKey = (u8, usize, u64, u64);

fn norm_cache() -> &'static Mutex<HashMap<NormKey, (f64, f64)>> {
    static C: OnceLock<Mutex<HashMap<NormKey, (f64, f64)>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// (sum_v phi(v), error estimate).
fn normalizer(shape: Shape, m: usize, alpha: f64) -> (f64, f64) {
    let a = alpha;
    match shape {
        Shape::L1 => {
            let z = |s: f64| hurwitz_zeta(s, 2.0);
            let v = match m {
                1 => 1.0 + 2.0 * z(a + 1.0),
                2 => 1.0 + 4.0 * (z(a + 1.0) - z(a + 2.0)),
                _ => 1.0 + 4.0 * z(a + 1.0) - 8.0 * z(a + 2.0) + 6.0 * z(a + 3.0),
            };
            (v, 1e-14 * v)
        }
        Shape::Euclid | Shape::Gauge { .. } => {
            let (tag, sh) = match shape {
                Shape::Gauge { shear } => (1u8, shear.to_bits()),
                _ => (0u8, 0),
            };
            let key = (tag, m, a.to_bits(), sh);
            if let Some(v) = norm_cache().lock().unwrap().get(&key) {
                return *v;
            }
            let k0: u64 = match (shape, m) {
                (Shape::Gauge { .. }, _) => 48,
                (_, 2) => 400,
                (_, 3) => 64,
                _ => 16,
            };
            let mut shells = Vec::with_capacity(k0 as usize + 1);
            let mut vf = vec![0.0; m];
            for r in 0..=k0 {
                let mut s = 0.0;
                shape.for_each_in_shell(m, r, &mut |v: &[i64]| {
                    for (o, x) in vf.iter_mut().zip(v) {
                        *o = *x as f64;
                    }
                    s += shape.phi(&vf, a);
                });
                shells.push(s);
            }
            let head: f64 = shells.iter().sum();
            // S(R) R^{1+a} ~ sum_j c_j R^{-j} on the upper half of the shells.
            let fit = |terms: usize| -> f64 {
                let pts: Vec<(f64, f64)> =
                    (k0 / 2..=k0).map(|r| (r as f64, shells[r as usize] * (r as f64).powf(1.0 + a))).collect();
                let c = lstsq_inverse_powers(&pts, terms);
                let q = (k0 + 1) as f64;
                c.iter().enumerate().map(|(j, cj)| cj * hurwitz_zeta(1.0 + a + j as f64, q)).sum()
            };
            let t5 = fit(5);
            let t4 = fit(4);
            let v = (head + t5, (t5 - t4).abs() + 1e-13 * head);
            norm_cache().lock().unwrap().insert(key, v);
            v
        }
    }
}

/// Least squares for y = sum_j c_j x^{-j}, j < terms.
fn lstsq_inverse_powers(pts: &[(f64, f64)], terms: usize) -> Vec<f64> {
    let mut ata = vec![vec![0.0; terms]; terms];
    let mut aty = vec![0.0; terms];
    for &(x, y) in pts {
        let row: Vec<f64> = (0..terms).map(|j| x.powi(-(j as i32))).collect();
        for i in 0..terms {
            aty[i] += row[i] * y;
            for j in 0..terms {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    // Gaussian elimination with partial pivoting.
    let n = terms;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| ata[i][c].abs().partial_cmp(&ata[j][c].abs()).unwrap()).unwrap();
        ata.swap(c, p);
        aty.swap(c, p);
        for i in c + 1..n {
            let f = ata[i][c] / ata[c][c];
            for j in c..n {
                ata[i][j] -= f * ata[c][j];
            }
            aty[i] -= f * aty[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| ata[i][j] * x[j]).sum();
        x[i] = (aty[i] - s) / ata[i][i];
    }
    x
}

/// Exact sampler for the radius law proportional to w(R) = C(R) h(R).
#[derive(Clone, Debug)]
struct RadiusSampler {
    alias: WeightedAliasIndex<f64>,
    table: Vec<f64>,
    p_table: f64,
    alpha: f64,
    a_const: f64,
}

impl RadiusSampler {
    fn new(shape: Shape, m: usize, alpha: f64) -> Self {
        let table: Vec<f64> =
            (0..=TABLE_K).map(|r| shape.shell_count(m, r) * shape.envelope(m, r, alpha)).collect();
        let w_tab: f64 = table.iter().sum();
        let a_const = shape.tail_const(m);
        let kp = TABLE_K as f64 + 0.5;
        // Envelope e(R) = (A/a) [(R-1/2)^{-a} - (R+1/2)^{-a}] has total mass A kp^{-a}/a.
        let env_mass = a_const * kp.powf(-alpha) / alpha;
        let alias = WeightedAliasIndex::new(table.clone()).expect("positive radius weights");
        RadiusSampler { alias, table, p_table: w_tab / (w_tab + env_mass), alpha, a_const }
    }

    fn sample<G: Rng + ?Sized>(&self, rng: &mut G, shape: Shape, m: usize) -> u64 {
        let kp = TABLE_K as f64 + 0.5;
        loop {
            if rng.gen::<f64>() < self.p_table {
                return self.alias.sample(rng) as u64;
            }
            let u: f64 = rng.gen();
            let x = kp * (1.0 - u).powf(-1.0 / self.alpha);
            if !(x < MAX_RADIUS) {
                continue;
            }
            let r = (x + 0.5).floor();
            let lo = r - 0.5;
            let diff = lo.powf(-self.alpha) * -(-self.alpha * (1.0 / lo).ln_1p()).exp_m1();
            let env = self.a_const / self.alpha * diff;
            let ri = r as u64;
            let w = shape.shell_count(m, ri) * shape.envelope(m, ri, self.alpha);
            if rng.gen::<f64>() * env < w {
                return ri;
            }
        }
    }

    /// Mass of radii <= TABLE_K relative to the table (for tests).
    fn table_weight(&self, r: u64) -> f64 {
        self.table[r as usize]
    }
}

#[derive(Clone, Debug)]
enum Embed {
    /// k -> s^k; `linear` when s^k = k s coordinatewise.
    Cyclic { gen: Vec<i128>, linear: bool },
    Axes(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct Component {
    pub spec: ComponentSpec,
    embed: Embed,
    shape: Shape,
    m: usize,
    pub alpha: f64,
    pub weight: f64,
    /// sum_v phi(v) and its error estimate.
    pub z: f64,
    pub z_err: f64,
    radius: RadiusSampler,
}

impl Component {
    fn new(law: &GroupLaw, spec: &ComponentSpec) -> Result<Self> {
        let d = law.dim();
        let alpha = spec.alpha();
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::InvalidMeasure(format!("alpha must lie in (0, 2), got {alpha}")));
        }
        let check_axes = |axes: &[usize]| -> Result<()> {
            let mut seen = vec![false; d];
            for &a in axes {
                if a >= d || seen[a] {
                    return Err(Error::InvalidMeasure(format!("bad axis list {axes:?} for dimension {d}")));
                }
                seen[a] = true;
            }
            Ok(())
        };
        let (embed, shape, m) = match spec {
            ComponentSpec::Cyclic { generator, .. } => {
                if generator.len() != d || generator.iter().all(|&x| x == 0) {
                    return Err(Error::InvalidMeasure(format!("generator {generator:?} is not a nontrivial element of dimension {d}")));
                }
                let s = Element::int(generator);
                let mut linear = true;
                for k in [-2i64, -1, 2, 3, 4, 5] {
                    let p = law.power(&s, k)?;
                    let expect: Vec<i64> = generator.iter().map(|x| x * k).collect();
                    if p != Element::int(&expect) {
                        linear = false;
                    }
                }
                (Embed::Cyclic { gen: generator.iter().map(|&x| x as i128).collect(), linear }, Shape::L1, 1)
            }
            ComponentSpec::SubgroupRadial { axes, norm, .. } => {
                check_axes(axes)?;
                let m = axes.len();
                if m == 0 || m > 3 {
                    return Err(Error::Unsupported(format!("radial components need 1 to 3 axes, got {m}")));
                }
                let shape = match norm {
                    RadialNorm::L1 => Shape::L1,
                    RadialNorm::Euclid if m == 1 => Shape::L1,
                    RadialNorm::Euclid => Shape::Euclid,
                };
                (Embed::Axes(axes.clone()), shape, m)
            }
            ComponentSpec::ExplicitDensity { axes, shear, .. } => {
                check_axes(axes)?;
                if axes.len() != 3 {
                    return Err(Error::InvalidMeasure("the Heisenberg gauge density needs three axes".into()));
                }
                if !shear.is_finite() {
                    return Err(Error::InvalidMeasure("shear must be finite".into()));
                }
                (Embed::Axes(axes.clone()), Shape::Gauge { shear: *shear }, 3)
            }
        };
        let (z, z_err) = normalizer(shape, m, alpha);
        Ok(Component {
            spec: spec.clone(),
            embed,
            shape,
            m,
            alpha,
            weight: spec.weight(),
            z,
            z_err,
            radius: RadiusSampler::new(shape, m, alpha),
        })
    }

    /// Lattice coordinates of g in this component's support.
    fn coords_of(&self, law: &GroupLaw, g: &[i128]) -> Option<Vec<i64>> {
        match &self.embed {
            Embed::Axes(axes) => {
                for (i, x) in g.iter().enumerate() {
                    if *x != 0 && !axes.contains(&i) {
                        return None;
                    }
                }
                Some(axes.iter().map(|&a| g[a] as i64).collect())
            }
            Embed::Cyclic { gen, .. } => {
                if g.iter().all(|&x| x == 0) {
                    return Some(vec![0]);
                }
                // First nonzero coordinate j of s: (s^k)_j = k s_j.
                let j = gen.iter().position(|&x| x != 0)?;
                if g[..j].iter().any(|&x| x != 0) || g[j] % gen[j] != 0 {
                    return None;
                }
                let k = g[j] / gen[j];
                let p = self.element_i128(law, &[k as i64]).ok()?;
                (p == g).then_some(vec![k as i64])
            }
        }
    }

    fn element_i128(&self, law: &GroupLaw, v: &[i64]) -> Result<Vec<i128>> {
        let d = law.dim();
        match &self.embed {
            Embed::Axes(axes) => {
                let mut out = vec![0i128; d];
                for (a, x) in axes.iter().zip(v) {
                    out[*a] = *x as i128;
                }
                Ok(out)
            }
            Embed::Cyclic { gen, linear } => {
                let k = v[0];
                if *linear {
                    return Ok(gen.iter().map(|x| x * k as i128).collect());
                }
                let base = if k < 0 {
                    let mut iv = vec![0i128; d];
                    law.inv_i128(gen, &mut iv).map_err(|_| Error::Numerical("generator inverse".into()))?;
                    iv
                } else {
                    gen.clone()
                };
                let mut acc = vec![0i128; d];
                let mut b = base;
                let mut e = k.unsigned_abs();
                let mut tmp = vec![0i128; d];
                while e > 0 {
                    if e & 1 == 1 {
                        law.mul_i128(&acc, &b, &mut tmp).map_err(|_| Error::Budget("overflow in power".into()))?;
                        acc.copy_from_slice(&tmp);
                    }
                    e >>= 1;
                    if e > 0 {
                        law.mul_i128(&b, &b, &mut tmp).map_err(|_| Error::Budget("overflow in power".into()))?;
                        b.copy_from_slice(&tmp);
                    }
                }
                Ok(acc)
            }
        }
    }

    fn phi_int(&self, v: &[i64]) -> f64 {
        let vf: Vec<f64> = v.iter().map(|&x| x as f64).collect();
        self.shape.phi(&vf, self.alpha)
    }

    /// Normalized mass at lattice coordinates v.
    pub fn density(&self, v: &[i64]) -> f64 {
        self.phi_int(v) / self.z
    }

    fn sample_coords<G: Rng + ?Sized>(&self, rng: &mut G, v: &mut [i64]) {
        loop {
            let r = self.radius.sample(rng, self.shape, self.m);
            if r == 0 {
                v.iter_mut().for_each(|x| *x = 0);
                return;
            }
            self.shape.sample_shell(self.m, r, rng, v);
            if self.shape.exact_radial() {
                return;
            }
            let h = self.shape.envelope(self.m, r, self.alpha);
            if rng.gen::<f64>() * h < self.phi_int(v) {
                return;
            }
        }
    }

    pub fn lattice_dim(&self) -> usize {
        self.m
    }

    /// Coordinates the component lives on (the generator support for cyclic ones).
    pub fn axes(&self) -> Vec<usize> {
        match &self.embed {
            Embed::Axes(a) => a.clone(),
            Embed::Cyclic { gen, .. } => (0..gen.len()).filter(|&i| gen[i] != 0).collect(),
        }
    }

    /// Generator s of a cyclic component with s^k = k s coordinatewise.
    pub fn linear_generator(&self) -> Option<Vec<i128>> {
        match &self.embed {
            Embed::Cyclic { gen, linear: true } => Some(gen.clone()),
            _ => None,
        }
    }

    /// Normalized mass of the indices k in [a, b] for a cyclic component.
    pub fn interval_mass(&self, a: i64, b: i64) -> f64 {
        assert!(matches!(self.embed, Embed::Cyclic { .. }), "interval_mass needs a cyclic component");
        if a > b {
            return 0.0;
        }
        let s = 1.0 + self.alpha;
        // F(n) = sum_{k=0}^{n} (1+k)^{-s}.
        let big = |n: i64| hurwitz_zeta(s, 1.0) - hurwitz_zeta(s, n as f64 + 2.0);
        let part = |lo: i64, hi: i64| -> f64 {
            // 0 <= lo <= hi
            if hi - lo < 64 {
                (lo..=hi).map(|k| (1.0 + k as f64).powf(-s)).sum()
            } else {
                big(hi) - if lo == 0 { 0.0 } else { big(lo - 1) }
            }
        };
        let mut m = 0.0;
        if b >= 0 {
            m += part(a.max(0), b);
        }
        if a < 0 {
            m += part((-b).max(1), -a);
        }
        m / self.z
    }

    /// Mass of {v : |v| > K} in the auxiliary shell radius; exact for cyclic components.
    pub fn tail_mass_beyond(&self, k: u64) -> f64 {
        match self.shape {
            Shape::L1 if self.m == 1 => 2.0 * hurwitz_zeta(1.0 + self.alpha, k as f64 + 2.0) / self.z,
            _ => {
                let head: f64 = (0..=k.min(TABLE_K)).map(|r| self.shell_mass(r)).sum();
                (1.0 - head).max(0.0)
            }
        }
    }

    fn shell_mass(&self, r: u64) -> f64 {
        match self.shape {
            Shape::L1 => self.radius.table_weight(r) / self.z,
            _ => {
                let mut s = 0.0;
                let mut vf = vec![0.0; self.m];
                self.shape.for_each_in_shell(self.m, r, &mut |v: &[i64]| {
                    for (o, x) in vf.iter_mut().zip(v) {
                        *o = *x as f64;
                    }
                    s += self.shape.phi(&vf, self.alpha);
                });
                s / self.z
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct StepMeasure {
    pub law: GroupLaw,
    pub components: Vec<Component>,
    picker: Option<WeightedAliasIndex<f64>>,
}

impl StepMeasure {
    pub fn new(law: &GroupLaw, spec: &MeasureSpec) -> Result<Self> {
        spec.validate("measure")?;
        let components: Vec<Component> = spec.components.iter().map(|c| Component::new(law, c)).collect::<Result<_>>()?;
        let picker = if components.len() > 1 {
            Some(WeightedAliasIndex::new(components.iter().map(|c| c.weight).collect()).expect("positive weights"))
        } else {
            None
        };
        let m = StepMeasure { law: law.clone(), components, picker };
        let defect = m.symmetry_defect(200, 7);
        if defect > 1e-9 {
            return Err(Error::InvalidMeasure(format!(
                "measure is not symmetric under inversion (relative defect {defect:.3e})"
            )));
        }
        Ok(m)
    }

    pub fn spec(&self) -> MeasureSpec {
        MeasureSpec { components: self.components.iter().map(|c| c.spec.clone()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.law.dim()
    }

    pub fn pmf_i128(&self, g: &[i128]) -> f64 {
        self.components
            .iter()
            .map(|c| match c.coords_of(&self.law, g) {
                Some(v) => c.weight * c.density(&v),
                None => 0.0,
            })
            .sum()
    }

    pub fn pmf(&self, g: &Element) -> Result<f64> {
        let v = g.to_i128().ok_or_else(|| Error::NonIntegral { coord: 0 })?;
        if v.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: v.len() });
        }
        Ok(self.pmf_i128(&v))
    }

    /// Relative error of pmf values coming from the normalizing constants.
    pub fn pmf_tolerance(&self) -> f64 {
        self.components.iter().map(|c| c.z_err / c.z).fold(0.0, f64::max)
    }

    pub fn sample_into<G: Rng + ?Sized>(&self, rng: &mut G, out: &mut [i128]) {
        let i = match &self.picker {
            Some(p) => p.sample(rng),
            None => 0,
        };
        let c = &self.components[i];
        let mut v = [0i64; 3];
        c.sample_coords(rng, &mut v[..c.m]);
        match &c.embed {
            Embed::Axes(axes) => {
                out.iter_mut().for_each(|x| *x = 0);
                for (a, x) in axes.iter().zip(&v[..c.m]) {
                    out[*a] = *x as i128;
                }
            }
            Embed::Cyclic { gen, linear: true } => {
                for (o, g) in out.iter_mut().zip(gen) {
                    *o = g * v[0] as i128;
                }
            }
            Embed::Cyclic { .. } => {
                let e = c.element_i128(&self.law, &v[..1]).expect("power within i128");
                out.copy_from_slice(&e);
            }
        }
    }

    pub fn sample<G: Rng + ?Sized>(&self, rng: &mut G) -> Element {
        let mut out = vec![0i128; self.dim()];
        self.sample_into(rng, &mut out);
        Element::from_i128(&out)
    }

    /// max |pmf(g) - pmf(g^-1)| / pmf(g) over sampled g.
    pub fn symmetry_defect(&self, n: usize, seed: u64) -> f64 {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d = self.dim();
        let mut g = vec![0i128; d];
        let mut gi = vec![0i128; d];
        let mut worst: f64 = 0.0;
        for _ in 0..n {
            self.sample_into(&mut rng, &mut g);
            if self.law.inv_i128(&g, &mut gi).is_err() {
                continue;
            }
            let (p, q) = (self.pmf_i128(&g), self.pmf_i128(&gi));
            if p > 0.0 {
                worst = worst.max((p - q).abs() / p);
            }
        }
        worst
    }

    /// Support elements in a coordinate box |g_i| <= h_i, with masses; also
    /// returns the enumerated mass. Errors when more than `max_cells` points qualify.
    pub fn support_in_box(&self, h: &[f64], max_cells: usize) -> Result<(Vec<(Vec<i128>, f64)>, f64)> {
        let d = self.dim();
        let mut acc: HashMap<Vec<i128>, f64> = HashMap::new();
        for c in &self.components {
            match &c.embed {
                Embed::Axes(axes) => {
                    let lim: Vec<i64> = axes.iter().map(|&a| h[a].floor() as i64).collect();
                    let count: f64 = lim.iter().map(|l| (2 * l + 1) as f64).product();
                    if count > max_cells as f64 {
                        return Err(Error::Budget(format!("support box has {count:.0} points > {max_cells}")));
                    }
                    let mut v: Vec<i64> = lim.iter().map(|l| -l).collect();
                    'odo: loop {
                        let mut g = vec![0i128; d];
                        for (a, x) in axes.iter().zip(&v) {
                            g[*a] = *x as i128;
                        }
                        *acc.entry(g).or_insert(0.0) += c.weight * c.density(&v);
                        let mut i = 0;
                        loop {
                            if i == v.len() {
                                break 'odo;
                            }
                            if v[i] < lim[i] {
                                v[i] += 1;
                                break;
                            }
                            v[i] = -lim[i];
                            i += 1;
                        }
                    }
                }
                Embed::Cyclic { .. } => {
                    *acc.entry(vec![0i128; d]).or_insert(0.0) += c.weight * c.density(&[0]);
                    for sign in [1i64, -1] {
                        let mut k = 1i64;
                        loop {
                            let g = c.element_i128(&self.law, &[sign * k])?;
                            if g.iter().zip(h).any(|(x, hh)| (*x as f64).abs() > *hh) {
                                break;
                            }
                            *acc.entry(g).or_insert(0.0) += c.weight * c.density(&[sign * k]);
                            k += 1;
                            if acc.len() > max_cells {
                                return Err(Error::Budget(format!("support exceeds {max_cells} points")));
                            }
                        }
                    }
                }
            }
        }
        let mut out: Vec<(Vec<i128>, f64)> = acc.into_iter().collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        let mass = out.iter().map(|x| x.1).sum();
        Ok((out, mass))
    }
}

/// Truncated convolution power: values are lower bounds for mu^(n) on the
/// ball, and mu^(n)(g) <= value + deficit.
#[derive(Clone, Debug, Serialize)]
pub struct ConvTable {
    pub n: u64,
    pub radius: f64,
    pub cells: Vec<(Vec<i64>, f64)>,
    /// 1 - sum of the table: mass of all paths leaving the ball at some step.
    pub deficit: f64,
}

impl ConvTable {
    pub fn value(&self, g: &[i64]) -> f64 {
        match self.cells.binary_search_by(|c| c.0.as_slice().cmp(g)) {
            Ok(i) => self.cells[i].1,
            Err(_) => 0.0,
        }
    }

    pub fn to_csv(&self) -> String {
        let d = self.cells.first().map(|c| c.0.len()).unwrap_or(0);
        let mut s: String = (1..=d).map(|i| format!("x{i},")).collect();
        s += "value,lower,upper\n";
        for (g, v) in &self.cells {
            for x in g {
                s += &format!("{x},");
            }
            s += &format!("{v:.17e},{v:.17e},{:.17e}\n", v + self.deficit);
        }
        s
    }
}

/// mu^(n) restricted to paths that stay in the box ball B(R) of `norm`.
///
/// Deficit policy: every path that leaves the ball is dropped and its mass is
/// reported as the deficit, never renormalized. One-dimensional abelian laws
/// use FFT squaring; everything else a sparse product.
pub fn convolve_truncated(
    m: &StepMeasure,
    norm: &crate::geometry::HomNorm,
    n: u64,
    radius: f64,
    max_cells: usize,
) -> Result<ConvTable> {
    if n == 0 {
        return Err(Error::InvalidMeasure("convolution power must be >= 1".into()));
    }
    let h = norm.ball_half_widths(radius);
    let d = m.dim();
    if d == 1 && m.law.is_abelian() {
        let l = h[0].floor() as usize;
        if 2 * l + 1 > max_cells {
            return Err(Error::Budget(format!("window {} exceeds {max_cells} cells", 2 * l + 1)));
        }
        let base: Vec<f64> = (0..=2 * l).map(|i| m.pmf_i128(&[i as i128 - l as i128])).collect();
        let t = crate::fft::power_window(&base, n);
        let cells: Vec<(Vec<i64>, f64)> =
            t.iter().enumerate().map(|(i, &v)| (vec![i as i64 - l as i64], v.max(0.0))).collect();
        let total: f64 = cells.iter().map(|c| c.1).sum();
        return Ok(ConvTable { n, radius, cells, deficit: (1.0 - total).max(0.0) });
    }
    let (supp, _) = m.support_in_box(&h, max_cells)?;
    let inside = |g: &[i128]| g.iter().zip(&h).all(|(x, hh)| (*x as f64).abs() <= *hh);
    let mut cur: HashMap<Vec<i128>, f64> = supp.iter().cloned().collect();
    let mut out = vec![0i128; d];
    for _ in 1..n {
        let mut next: HashMap<Vec<i128>, f64> = HashMap::with_capacity(cur.len() * 2);
        for (g, pg) in &cur {
            for (s, ps) in &supp {
                m.law.mul_i128(g, s, &mut out).map_err(|_| Error::Budget("overflow in convolution".into()))?;
                if inside(&out) {
                    *next.entry(out.clone()).or_insert(0.0) += pg * ps;
                }
            }
            if next.len() > max_cells {
                return Err(Error::Budget(format!("convolution table exceeds {max_cells} cells")));
            }
        }
        cur = next;
    }
    let mut cells: Vec<(Vec<i64>, f64)> = cur.into_iter().map(|(g, v)| (g.iter().map(|&x| x as i64).collect(), v)).collect();
    cells.sort_by(|a, b| a.0.cmp(&b.0));
    let total: f64 = cells.iter().map(|c| c.1).sum();
    Ok(ConvTable { n, radius, cells, deficit: (1.0 - total).max(0.0) })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error: f64,
    /// "exact-lattice" or "continuum".
    pub method: String,
    pub lattice_points: f64,
}

/// Lattice sums with at most this many points per component are done exactly.
pub const EXACT_SUM_CAP: f64 = 4.0e7;

/// mu_t(f) = t sum_g f(delta_{1/t} g) mu(g).
///
/// Components whose rescaled support box holds more than [`EXACT_SUM_CAP`]
/// lattice points are replaced by the Riemann integral
/// t det(delta_t) int f(u) phi(delta_t u) du / Z, which differs from the lattice
/// sum by O(scale^-2) relative where scale is the raw size of the support.
pub fn rescaled_measure_integral(m: &StepMeasure, d: &DilationStructure, t: f64, f: &TestFunction) -> Result<IntegralResult> {
    rescaled_measure_integral_tol(m, d, t, f, 1e-6)
}

/// [`rescaled_measure_integral`] with the relative tolerance of the continuum quadrature.
pub fn rescaled_measure_integral_tol(
    m: &StepMeasure,
    d: &DilationStructure,
    t: f64,
    f: &TestFunction,
    rel_tol: f64,
) -> Result<IntegralResult> {
    let dim = m.dim();
    if d.dim() != dim || f.dim() != dim {
        return Err(Error::Dimension { expected: dim, got: d.dim().min(f.dim()) });
    }
    if f.is_zero() {
        return Ok(IntegralResult { value: 0.0, error: 0.0, method: "exact-lattice".into(), lattice_points: 0.0 });
    }
    let b = d.b_f64();
    let fac: Vec<f64> = b.iter().map(|bi| t.powf(*bi)).collect();
    let (lo, hi) = f.support_box();
    let mut total = 0.0;
    let mut err = 0.0;
    let mut points = 0.0;
    let mut methods = Vec::new();
    for c in &m.components {
        let axes = c.axes();
        // Off-support coordinates are 0; the box must contain 0 there.
        if (0..dim).any(|i| !axes.contains(&i) && (lo[i] > 0.0 || hi[i] < 0.0)) {
            continue;
        }
        let (v, e, method, pts) = component_integral(m, c, &fac, t, f, &lo, &hi, rel_tol)?;
        total += c.weight * v;
        err += c.weight * e;
        points += pts;
        methods.push(method);
    }
    methods.dedup();
    Ok(IntegralResult { value: total, error: err, method: methods.join("+"), lattice_points: points })
}

#[allow(clippy::too_many_arguments)]
fn component_integral(
    m: &StepMeasure,
    c: &Component,
    fac: &[f64],
    t: f64,
    f: &TestFunction,
    lo: &[f64],
    hi: &[f64],
    rel_tol: f64,
) -> Result<(f64, f64, &'static str, f64)> {
    let dim = m.dim();
    let mut u = vec![0.0; dim];
    match &c.embed {
        Embed::Cyclic { gen, linear } => {
            // k ranges over the multiples of s inside the box.
            let mut kmax = f64::INFINITY;
            for i in 0..dim {
                if gen[i] != 0 {
                    let lim = lo[i].abs().max(hi[i].abs()) * fac[i] / (gen[i] as f64).abs();
                    kmax = kmax.min(lim);
                }
            }
            if !linear {
                return Err(Error::Unsupported("rescaled integral for nonlinear cyclic generators".into()));
            }
            let kmax = kmax.floor();
            if 2.0 * kmax + 1.0 <= EXACT_SUM_CAP {
                let mut s = 0.0;
                for k in -(kmax as i64)..=(kmax as i64) {
                    for i in 0..dim {
                        u[i] = gen[i] as f64 * k as f64 / fac[i];
                    }
                    let fv = f.eval(&u);
                    if fv != 0.0 {
                        s += fv * c.density(&[k]);
                    }
                }
                return Ok((t * s, 1e-12 * t * s.abs(), "exact-lattice", 2.0 * kmax + 1.0));
            }
            // Continuum in k: x = k / kscale where kscale = fac[j]/|s_j| for the leading axis.
            let j = (0..dim).find(|&i| gen[i] != 0).unwrap();
            let ks = fac[j] / gen[j] as f64;
            let g = |p: &[f64]| {
                let k = p[0] * ks;
                let mut uu = vec![0.0; dim];
                for i in 0..dim {
                    uu[i] = gen[i] as f64 * k / fac[i];
                }
                f.eval(&uu) * c.shape.phi(&[k], c.alpha)
            };
            let r = integrate_box_dyn(&g, &[-kmax / ks], &[kmax / ks], &|_, _| f.breaks()[j].clone(), 0.0, 1e-9, 4000);
            let v = t * ks.abs() * r.value / c.z;
            Ok((v, t * ks.abs() * r.error / c.z + em_error(v, kmax / 2.0), "continuum", 2.0 * kmax + 1.0))
        }
        Embed::Axes(axes) => {
            let lat_lo: Vec<i64> = axes.iter().map(|&a| (lo[a] * fac[a]).ceil() as i64).collect();
            let lat_hi: Vec<i64> = axes.iter().map(|&a| (hi[a] * fac[a]).floor() as i64).collect();
            let count: f64 = lat_lo.iter().zip(&lat_hi).map(|(l, h)| (h - l + 1).max(0) as f64).product();
            if count == 0.0 {
                return Ok((0.0, 0.0, "exact-lattice", 0.0));
            }
            if count <= EXACT_SUM_CAP {
                let mut v = lat_lo.clone();
                let mut s = 0.0;
                'odo: loop {
                    for (k, &a) in axes.iter().enumerate() {
                        u[a] = v[k] as f64 / fac[a];
                    }
                    let fv = f.eval(&u);
                    if fv != 0.0 {
                        s += fv * c.density(&v);
                    }
                    let mut i = 0;
                    loop {
                        if i == v.len() {
                            break 'odo;
                        }
                        if v[i] < lat_hi[i] {
                            v[i] += 1;
                            break;
                        }
                        v[i] = lat_lo[i];
                        i += 1;
                    }
                }
                return Ok((t * s, 1e-12 * t * s.abs(), "exact-lattice", count));
            }
            let afac: Vec<f64> = axes.iter().map(|&a| fac[a]).collect();
            let plo: Vec<f64> = axes.iter().map(|&a| lo[a]).collect();
            let phi_ = hi;
            let phi_hi: Vec<f64> = axes.iter().map(|&a| phi_[a]).collect();
            let fbreaks = f.breaks();
            let g = |p: &[f64]| {
                let mut uu = vec![0.0; dim];
                let mut raw = [0.0; 3];
                for (k, &a) in axes.iter().enumerate() {
                    uu[a] = p[k];
                    raw[k] = p[k] * afac[k];
                }
                let fv = f.eval(&uu);
                if fv == 0.0 {
                    return 0.0;
                }
                fv * c.shape.phi(&raw[..axes.len()], c.alpha)
            };
            let breaks = |k: usize, prev: &[f64]| -> Vec<f64> {
                let mut out = fbreaks[axes[k]].clone();
                let raw_prev: Vec<f64> = prev.iter().zip(&afac).map(|(x, s)| x * s).collect();
                let (center, width) = c.shape.concentration(k, &raw_prev);
                let (cc, w) = (center / afac[k], width / afac[k]);
                let range = phi_hi[k] - plo[k];
                out.push(cc);
                let mut s = w;
                while s < range {
                    out.push(cc - s);
                    out.push(cc + s);
                    s *= 8.0;
                }
                out
            };
            let r: QuadResult = integrate_box_dyn(&g, &plo, &phi_hi, &breaks, 0.0, rel_tol, 2000);
            let jac: f64 = afac.iter().product();
            let v = t * jac * r.value / c.z;
            // Raw size of the support away from the origin.
            let scale = axes
                .iter()
                .map(|&a| fbreaks[a].iter().fold(0.0f64, |m, x| m.max(x.abs())) * fac[a])
                .fold(f64::INFINITY, f64::min)
                .max(1.0);
            Ok((v, t * jac * r.error / c.z + em_error(v, scale), "continuum", count))
        }
    }
}

/// Riemann-sum discretization estimate for a summand varying on raw scale s.
fn em_error(v: f64, scale: f64) -> f64 {
    v.abs() / (scale * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{abelian, h3_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ring_enumerations_are_bijective() {
        for r in 1..6i64 {
            let mut seen = std::collections::HashSet::new();
            let mut out = [0i64; 2];
            for i in 0..4 * r {
                l1_ring(r, i, &mut out);
                assert_eq!(out[0].abs() + out[1].abs(), r);
                seen.insert(out);
            }
            assert_eq!(seen.len() as i64, 4 * r);
            seen.clear();
            for i in 0..8 * r {
                square_ring(r, i, &mut out);
                assert_eq!(out[0].abs().max(out[1].abs()), r);
                seen.insert(out);
            }
            assert_eq!(seen.len() as i64, 8 * r);
        }
    }

    #[test]
    fn shell_counts_match_enumeration() {
        let g = Shape::Gauge { shear: 0.5 };
        for r in 0..5u64 {
            let mut n = 0.0;
            g.for_each_in_shell(3, r, &mut |_| n += 1.0);
            assert_eq!(n, g.shell_count(3, r));
        }
        for m in 2..=3 {
            for r in 0..5u64 {
                let mut n = 0.0;
                Shape::Euclid.for_each_in_shell(m, r, &mut |_| n += 1.0);
                assert_eq!(n, Shape::Euclid.shell_count(m, r));
            }
        }
    }

    #[test]
    fn envelope_dominates_gauge() {
        let g = Shape::Gauge { shear: 0.5 };
        for r in 1..8u64 {
            let h = g.envelope(3, r, 1.0);
            g.for_each_in_shell(3, r, &mut |v| {
                let vf: Vec<f64> = v.iter().map(|&x| x as f64).collect();
                assert!(g.phi(&vf, 1.0) <= h * (1.0 + 1e-12), "{v:?}");
            });
        }
    }

    #[test]
    fn gauge_normalizer_stable() {
        // Tail extrapolation agrees with a direct larger truncation.
        let (z, e) = normalizer(Shape::Gauge { shear: 0.5 }, 3, 1.0);
        assert!(e < 1e-6 * z, "err {e}");
        // independent evaluation: shells to 64 with a 4-term tail fit gives 4.0382457
        assert!((z - 4.038_245_7).abs() < 1e-6 * z, "{z}");
        let shape = Shape::Gauge { shear: 0.5 };
        let mut head = 0.0;
        for r in 0..=48 {
            shape.for_each_in_shell(3, r, &mut |v| {
                let vf: Vec<f64> = v.iter().map(|&x| x as f64).collect();
                head += shape.phi(&vf, 1.0);
            });
        }
        // remaining tail beyond 48 is ~ c / 48 by the envelope bound
        assert!(head < z && z - head < 32.0 / 48.0);
    }

    #[test]
    fn cyclic_constant_alpha_one() {
        let law = abelian(1);
        let m = StepMeasure::new(&law, &MeasureSpec::axis_cyclic(1, &[1.0])).unwrap();
        let c1 = m.pmf(&Element::int(&[0])).unwrap();
        assert!((c1 - 1.0 / (std::f64::consts::PI * std::f64::consts::PI / 3.0 - 1.0)).abs() < 1e-14, "{c1}");
    }

    #[test]
    fn woob34_symmetric_and_samples() {
        let law = h3_matrix();
        let m = StepMeasure::new(&law, &MeasureSpec::woob34(1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut out = [0i128; 3];
        let mut zero = 0;
        let n = 200_000;
        for _ in 0..n {
            m.sample_into(&mut rng, &mut out);
            if out == [0, 0, 0] {
                zero += 1;
            }
        }
        let p0 = m.pmf(&Element::int(&[0, 0, 0])).unwrap();
        let sd = (p0 * (1.0 - p0) / n as f64).sqrt();
        assert!((zero as f64 / n as f64 - p0).abs() < 4.0 * sd);
    }

    #[test]
    fn asymmetric_shear_rejected() {
        let law = h3_matrix();
        let spec = MeasureSpec {
            components: vec![ComponentSpec::ExplicitDensity {
                density: ExplicitDensity::HeisenbergGauge,
                axes: vec![0, 1, 2],
                alpha: 1.0,
                shear: 1.0,
                weight: 1.0,
            }],
        };
        assert!(StepMeasure::new(&law, &spec).is_err());
    }
}
