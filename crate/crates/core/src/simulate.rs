//! Random walks on the lattice, their rescalings, and the Euler-product scheme
//! for the limit Levy process.
//!
//! Every replica draws from its own ChaCha stream (seed, replica), so results do
//! not depend on how replicas are spread over worker threads.

use crate::dilation::DilationStructure;
use crate::error::{Error, Result};
use crate::geometry::{ls_slope, HomNorm};
use crate::group::GroupLaw;
use crate::limits::{LimitMeasure, LimitPart};
use crate::measures::{RadialNorm, StepMeasure};
use crate::poly::Poly;
use crate::quad::integrate_box_dyn;
use crate::stable::{isotropic_sas2, scale_for_levy_density, standard_sas};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Stream for one replica.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(replica);
    r
}

#[derive(Clone, Debug)]
pub struct WalkConfig {
    pub law: GroupLaw,
    pub measure: StepMeasure,
    pub horizon: f64,
    /// Steps per unit time.
    pub steps_per_unit: u64,
    pub replicas: u64,
    pub seed: u64,
}

impl WalkConfig {
    pub fn total_steps(&self) -> u64 {
        (self.horizon * self.steps_per_unit as f64).ceil() as u64
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WalkPath {
    pub times: Vec<f64>,
    pub coords: Vec<Vec<i128>>,
    /// The steps xi_1..xi_n.
    pub steps: Vec<Vec<i128>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevyPath {
    pub times: Vec<f64>,
    pub coords: Vec<Vec<f64>>,
}

impl LevyPath {
    pub fn to_csv(&self) -> String {
        let d = self.coords.first().map(|c| c.len()).unwrap_or(0);
        let mut s = String::from("time");
        for i in 1..=d {
            s += &format!(",coord_{i}");
        }
        s.push('\n');
        for (t, c) in self.times.iter().zip(&self.coords) {
            s += &format!("{t}");
            for x in c {
                s += &format!(",{x:e}");
            }
            s.push('\n');
        }
        s
    }
}

impl WalkPath {
    pub fn to_csv(&self) -> String {
        let d = self.coords.first().map(|c| c.len()).unwrap_or(0);
        let mut s = String::from("time");
        for i in 1..=d {
            s += &format!(",coord_{i}");
        }
        s.push('\n');
        for (t, c) in self.times.iter().zip(&self.coords) {
            s += &format!("{t}");
            for x in c {
                s += &format!(",{x}");
            }
            s.push('\n');
        }
        s
    }

    /// Recompute coords from the stored steps; true when identical.
    pub fn is_consistent(&self, law: &GroupLaw) -> bool {
        let d = law.dim();
        let mut x = vec![0i128; d];
        let mut out = vec![0i128; d];
        if self.coords[0] != x {
            return false;
        }
        for (k, s) in self.steps.iter().enumerate() {
            if law.mul_i128(&x, s, &mut out).is_err() {
                return false;
            }
            x.copy_from_slice(&out);
            if self.coords[k + 1] != x {
                return false;
            }
        }
        true
    }
}

fn overflow() -> Error {
    Error::Budget("lattice coordinate left the 128-bit range".into())
}

/// S_k = xi_1 ... xi_k from the identity for one replica.
pub fn run_walk(cfg: &WalkConfig, replica: u64) -> Result<WalkPath> {
    let d = cfg.law.dim();
    let n = cfg.total_steps();
    let mut rng = replica_rng(cfg.seed, replica);
    let mut x = vec![0i128; d];
    let mut s = vec![0i128; d];
    let mut out = vec![0i128; d];
    let mut times = vec![0.0];
    let mut coords = vec![x.clone()];
    let mut steps = Vec::with_capacity(n as usize);
    for k in 1..=n {
        cfg.measure.sample_into(&mut rng, &mut s);
        cfg.law.mul_i128(&x, &s, &mut out).map_err(|_| overflow())?;
        x.copy_from_slice(&out);
        times.push(k as f64 / cfg.steps_per_unit as f64);
        coords.push(x.clone());
        steps.push(s.clone());
    }
    Ok(WalkPath { times, coords, steps })
}

/// Positions S_n after n steps for replicas 0..replicas (order fixed).
pub fn walk_endpoints(law: &GroupLaw, m: &StepMeasure, n: u64, replicas: u64, seed: u64) -> Result<Vec<Vec<i128>>> {
    let d = law.dim();
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let mut x = vec![0i128; d];
            let mut s = vec![0i128; d];
            let mut out = vec![0i128; d];
            for _ in 0..n {
                m.sample_into(&mut rng, &mut s);
                law.mul_i128(&x, &s, &mut out).map_err(|_| overflow())?;
                std::mem::swap(&mut x, &mut out);
            }
            Ok(x)
        })
        .collect()
}

/// delta_{1/t} applied to the path, with time divided by t.
pub fn rescale_path(p: &WalkPath, d: &DilationStructure, t: f64) -> LevyPath {
    let f: Vec<f64> = d.b_f64().iter().map(|b| t.powf(-b)).collect();
    LevyPath {
        times: p.times.iter().map(|s| s / t).collect(),
        coords: p.coords.iter().map(|c| c.iter().zip(&f).map(|(x, s)| *x as f64 * s).collect()).collect(),
    }
}

pub fn rescale_point(x: &[i128], d: &DilationStructure, t: f64) -> Vec<f64> {
    x.iter().zip(d.b_f64()).map(|(v, b)| *v as f64 * t.powf(-b)).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IncrementBlock {
    /// Levy density kappa |x|^{-1-alpha} on one coordinate.
    Stable1d { axis: usize, alpha: f64, kappa: f64 },
    /// Levy density kappa |z|_2^{-2-alpha} on two coordinates.
    Isotropic2d { axes: [usize; 2], alpha: f64, kappa: f64 },
    Zero { axis: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LevyIncrementSpec {
    pub dim: usize,
    pub blocks: Vec<IncrementBlock>,
    #[serde(default)]
    pub drift: Vec<f64>,
}

impl LevyIncrementSpec {
    pub fn validate(&self) -> Result<()> {
        let mut used = vec![false; self.dim];
        for b in &self.blocks {
            let (axes, alpha): (Vec<usize>, Option<f64>) = match b {
                IncrementBlock::Stable1d { axis, alpha, .. } => (vec![*axis], Some(*alpha)),
                IncrementBlock::Isotropic2d { axes, alpha, .. } => (axes.to_vec(), Some(*alpha)),
                IncrementBlock::Zero { axis } => (vec![*axis], None),
            };
            if let Some(a) = alpha {
                if !(a > 0.0 && a < 2.0) {
                    return Err(Error::InvalidMeasure(format!("stable index {a} outside (0, 2)")));
                }
            }
            for a in axes {
                if a >= self.dim || used[a] {
                    return Err(Error::InvalidMeasure(format!("increment blocks overlap or exceed dimension at axis {a}")));
                }
                used[a] = true;
            }
        }
        if !self.drift.is_empty() && self.drift.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: self.drift.len() });
        }
        Ok(())
    }

    /// Blocks for a limit measure made of axis and Euclidean-plane parts.
    pub fn from_limit(mu: &LimitMeasure) -> Result<Self> {
        let mut blocks = Vec::new();
        for p in &mu.parts {
            match p {
                LimitPart::AxisPower { axis, kappa, alpha } => {
                    blocks.push(IncrementBlock::Stable1d { axis: *axis, alpha: *alpha, kappa: *kappa })
                }
                LimitPart::Radial { axes, kappa, alpha, norm: RadialNorm::Euclid } if axes.len() == 2 => {
                    blocks.push(IncrementBlock::Isotropic2d { axes: [axes[0], axes[1]], alpha: *alpha, kappa: *kappa })
                }
                other => {
                    return Err(Error::Unsupported(format!("no increment sampler for limit part {other:?}")));
                }
            }
        }
        let s = LevyIncrementSpec { dim: mu.dim, blocks, drift: Vec::new() };
        s.validate()?;
        Ok(s)
    }
}

/// Writes one increment of the block over time dt into `out` (other coordinates untouched).
pub fn sample_stable_increment<G: Rng + ?Sized>(b: &IncrementBlock, dt: f64, rng: &mut G, out: &mut [f64]) {
    match b {
        IncrementBlock::Stable1d { axis, alpha, kappa } => {
            out[*axis] = scale_for_levy_density(1, *alpha, *kappa, dt) * standard_sas(*alpha, rng);
        }
        IncrementBlock::Isotropic2d { axes, alpha, kappa } => {
            let s = scale_for_levy_density(2, *alpha, *kappa, dt);
            let z = isotropic_sas2(*alpha, rng);
            out[axes[0]] = s * z[0];
            out[axes[1]] = s * z[1];
        }
        IncrementBlock::Zero { axis } => out[*axis] = 0.0,
    }
}

/// n T increments of length 1/n, drift included.
pub fn sample_increments<G: Rng + ?Sized>(spec: &LevyIncrementSpec, n: u64, horizon: f64, rng: &mut G) -> Vec<Vec<f64>> {
    let steps = (horizon * n as f64).ceil() as usize;
    let dt = 1.0 / n as f64;
    (0..steps)
        .map(|_| {
            let mut z = vec![0.0; spec.dim];
            for b in &spec.blocks {
                sample_stable_increment(b, dt, rng, &mut z);
            }
            for (x, b) in z.iter_mut().zip(&spec.drift) {
                *x += b * dt;
            }
            z
        })
        .collect()
}

/// X_k = X_{k-1} . dZ_k in the limit law, from given increments.
pub fn euler_from_increments(law: &GroupLaw, incs: &[Vec<f64>], n: u64) -> LevyPath {
    let d = law.dim();
    let mut x = vec![0.0; d];
    let mut out = vec![0.0; d];
    let mut times = vec![0.0];
    let mut coords = vec![x.clone()];
    for (k, z) in incs.iter().enumerate() {
        law.mul_f64(&x, z, &mut out);
        std::mem::swap(&mut x, &mut out);
        times.push((k + 1) as f64 / n as f64);
        coords.push(x.clone());
    }
    LevyPath { times, coords }
}

/// Euler-product approximation of the limit process on [0, T] with step 1/n.
pub fn euler_product<G: Rng + ?Sized>(spec: &LevyIncrementSpec, law: &GroupLaw, n: u64, horizon: f64, rng: &mut G) -> Result<LevyPath> {
    spec.validate()?;
    if spec.dim != law.dim() {
        return Err(Error::Dimension { expected: law.dim(), got: spec.dim });
    }
    let incs = sample_increments(spec, n, horizon, rng);
    Ok(euler_from_increments(law, &incs, n))
}

/// Time-T values of independent Euler-product paths, replica r on stream (seed, r).
pub fn euler_endpoints(spec: &LevyIncrementSpec, law: &GroupLaw, n: u64, horizon: f64, replicas: u64, seed: u64) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let d = law.dim();
    let steps = (horizon * n as f64).ceil() as u64;
    let dt = 1.0 / n as f64;
    Ok((0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let mut x = vec![0.0; d];
            let mut z = vec![0.0; d];
            let mut out = vec![0.0; d];
            for _ in 0..steps {
                z.iter_mut().for_each(|v| *v = 0.0);
                for b in &spec.blocks {
                    sample_stable_increment(b, dt, &mut rng, &mut z);
                }
                for (v, b) in z.iter_mut().zip(&spec.drift) {
                    *v += b * dt;
                }
                law.mul_f64(&x, &z, &mut out);
                std::mem::swap(&mut x, &mut out);
            }
            x
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftReport {
    pub drift: Vec<f64>,
    pub error: f64,
    /// "symbolic-zero" or "quadrature".
    pub method: String,
}

/// Drift b_j = 1/2 int (z_j + (z^{-1})_j) nu(dz) over {|z|_2 <= 1, |z^{-1}|_2 <= 1}
/// + int z_j nu(dz) over {|z|_2 <= 1 < |z^{-1}|_2}.
///
/// Zero without quadrature when z + z^{-1} vanishes identically on the
/// coordinate subspace carrying each part. The small-ball limit is taken at r = 1e-4.
pub fn drift_correction(mu: &LimitMeasure, law: &GroupLaw) -> Result<DriftReport> {
    let d = law.dim();
    if mu.dim != d {
        return Err(Error::Dimension { expected: d, got: mu.dim });
    }
    let sum_polys: Vec<Poly> = (0..d).map(|j| law.inv()[j].add(&Poly::var(d, j))).collect();
    let mut drift = vec![0.0; d];
    let mut err = 0.0;
    let mut quad = false;
    for p in &mu.parts {
        let axes = p.axes();
        let off: Vec<usize> = (0..d).filter(|i| !axes.contains(i)).collect();
        if sum_polys.iter().all(|q| q.restrict_zero(&off).is_zero()) {
            continue;
        }
        quad = true;
        let m = axes.len();
        for j in 0..d {
            let g = |v: &[f64]| {
                let mut z = vec![0.0; d];
                for (k, &a) in axes.iter().enumerate() {
                    z[a] = v[k];
                }
                let n2: f64 = z.iter().map(|x| x * x).sum::<f64>();
                if n2 > 1.0 || n2 < 1e-8 {
                    return 0.0;
                }
                let mut zi = vec![0.0; d];
                law.inv_f64(&z, &mut zi);
                let ni: f64 = zi.iter().map(|x| x * x).sum::<f64>();
                let val = if ni <= 1.0 { 0.5 * (z[j] + zi[j]) } else { z[j] };
                val * p.density(v)
            };
            let lo = vec![-1.0; m];
            let hi = vec![1.0; m];
            let br = |_k: usize, _prev: &[f64]| vec![-1e-2, 0.0, 1e-2];
            let r = integrate_box_dyn(&g, &lo, &hi, &br, 1e-9, 1e-6, 2000);
            drift[j] += r.value;
            err += r.error;
        }
    }
    Ok(DriftReport { drift, error: err, method: if quad { "quadrature".into() } else { "symbolic-zero".into() } })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExitRow {
    pub radius: f64,
    pub mean_steps: f64,
    /// Half-width of a 95% normal interval.
    pub ci95: f64,
    pub censored_fraction: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExitTable {
    pub rows: Vec<ExitRow>,
    /// Log-log slope over radii with no censored paths (None when fewer than two).
    pub slope: Option<f64>,
    pub max_steps: u64,
}

/// Monte-Carlo E[tau_{B(r)}], tau = first n with ||S_n|| >= r.
pub fn exit_time(law: &GroupLaw, m: &StepMeasure, norm: &HomNorm, radii: &[f64], replicas: u64, max_steps: u64, seed: u64) -> Result<ExitTable> {
    if radii.is_empty() {
        return Err(Error::InvalidMeasure("exit_time needs at least one radius".into()));
    }
    let d = law.dim();
    let rmax = radii.iter().cloned().fold(0.0, f64::max);
    let per: Vec<Vec<Option<u64>>> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replica_rng(seed, rep);
            let mut x = vec![0i128; d];
            let mut s = vec![0i128; d];
            let mut out = vec![0i128; d];
            let mut hit: Vec<Option<u64>> = vec![None; radii.len()];
            let mut u = vec![0.0; d];
            for k in 1..=max_steps {
                m.sample_into(&mut rng, &mut s);
                law.mul_i128(&x, &s, &mut out).map_err(|_| overflow())?;
                std::mem::swap(&mut x, &mut out);
                for (o, v) in u.iter_mut().zip(&x) {
                    *o = *v as f64;
                }
                let nv = norm.norm(&u);
                for (h, r) in hit.iter_mut().zip(radii) {
                    if h.is_none() && nv >= *r {
                        *h = Some(k);
                    }
                }
                if nv >= rmax && hit.iter().all(|h| h.is_some()) {
                    break;
                }
            }
            Ok(hit)
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (i, &r) in radii.iter().enumerate() {
        let done: Vec<f64> = per.iter().filter_map(|h| h[i]).map(|k| k as f64).collect();
        let cens = 1.0 - done.len() as f64 / replicas as f64;
        let n = done.len().max(1) as f64;
        let mean = done.iter().sum::<f64>() / n;
        let var = done.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
        rows.push(ExitRow { radius: r, mean_steps: mean, ci95: 1.96 * (var / n).sqrt(), censored_fraction: cens });
    }
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.censored_fraction == 0.0).map(|r| (r.radius.ln(), r.mean_steps.ln())).collect();
    let slope = if pts.len() >= 2 { Some(ls_slope(&pts)) } else { None };
    if rows.iter().all(|r| r.censored_fraction == 1.0) {
        return Err(Error::Budget(format!("every path censored at {max_steps} steps")));
    }
    Ok(ExitTable { rows, slope, max_steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::h3_matrix;
    use crate::measures::MeasureSpec;

    #[test]
    fn h3_walk_third_coordinate() {
        let law = h3_matrix();
        let spec = MeasureSpec::axis_cyclic(3, &[1.0, 1.2, 1.5]);
        let mut spec2 = spec.clone();
        spec2.components.truncate(2);
        for c in spec2.components.iter_mut() {
            if let crate::measures::ComponentSpec::Cyclic { weight, .. } = c {
                *weight = 0.5;
            }
        }
        let m = StepMeasure::new(&law, &spec2).unwrap();
        let cfg = WalkConfig { law: law.clone(), measure: m, horizon: 1.0, steps_per_unit: 500, replicas: 1, seed: 3 };
        let p = run_walk(&cfg, 0).unwrap();
        assert!(p.is_consistent(&law));
        // Z_n = sum X_{k-1} (Y_k - Y_{k-1}).
        let mut z = 0i128;
        for k in 1..p.coords.len() {
            z += p.coords[k - 1][0] * (p.coords[k][1] - p.coords[k - 1][1]);
            assert_eq!(p.coords[k][2], z);
        }
        let q = run_walk(&cfg, 0).unwrap();
        assert_eq!(p.coords, q.coords);
    }

    #[test]
    fn abelian_euler_is_partial_sum() {
        let law = crate::group::abelian(2);
        let spec = LevyIncrementSpec {
            dim: 2,
            blocks: vec![IncrementBlock::Isotropic2d { axes: [0, 1], alpha: 1.2, kappa: 0.3 }],
            drift: vec![],
        };
        let mut rng = replica_rng(5, 0);
        let incs = sample_increments(&spec, 100, 1.0, &mut rng);
        let p = euler_from_increments(&law, &incs, 100);
        let s: f64 = incs.iter().map(|z| z[1]).sum();
        assert!((p.coords.last().unwrap()[1] - s).abs() < 1e-12 * s.abs().max(1.0));
    }

    #[test]
    fn axis_support_has_symbolic_zero_drift() {
        let law = h3_matrix();
        let mu = LimitMeasure::new(
            3,
            vec![
                LimitPart::AxisPower { axis: 0, kappa: 0.2, alpha: 1.0 },
                LimitPart::AxisPower { axis: 1, kappa: 0.2, alpha: 1.0 },
            ],
        )
        .unwrap();
        let r = drift_correction(&mu, &law).unwrap();
        assert_eq!(r.method, "symbolic-zero");
        assert_eq!(r.drift, vec![0.0; 3]);
    }
}
