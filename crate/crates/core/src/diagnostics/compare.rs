//! Kolmogorov-Smirnov tests and the energy distance between sample clouds.

use crate::error::{Error, Result};
use crate::special::kolmogorov_sf;
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Samples required per side by [`marginal_compare`].
pub const MIN_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub m: usize,
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// p-value with Stephens' small-sample correction.
fn ks_p(d: f64, ne: f64) -> f64 {
    let s = ne.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

pub fn ks_one_sample<F: Fn(f64) -> f64>(x: &[f64], cdf: F) -> KsResult {
    let s = sorted(x);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, v) in s.iter().enumerate() {
        let f = cdf(*v);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    KsResult { statistic: d, p_value: ks_p(d, n), n: s.len(), m: 0 }
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let (sa, sb) = (sorted(a), sorted(b));
    let (n, m) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < sa.len() && j < sb.len() {
        let v = sa[i].min(sb[j]);
        while i < sa.len() && sa[i] <= v {
            i += 1;
        }
        while j < sb.len() && sb[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    KsResult { statistic: d, p_value: ks_p(d, n * m / (n + m)), n: sa.len(), m: sb.len() }
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyResult {
    /// nm/(n+m) (2 E|X-Y| - E|X-X'| - E|Y-Y'|) on the transformed points.
    pub statistic: f64,
    pub p_value: f64,
    pub subsample: usize,
    pub permutations: usize,
}

/// Energy distance with a permutation p-value.
///
/// Coordinates go through u -> atan(u / s) with s the pooled median of |u|, so
/// heavy-tailed clouds have the first moments the statistic needs.
pub fn energy_distance(a: &[Vec<f64>], b: &[Vec<f64>], subsample: usize, permutations: usize, seed: u64) -> Result<EnergyResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Numerical("energy distance needs two non-empty samples".into()));
    }
    let dim = a[0].len();
    if a.iter().chain(b).any(|p| p.len() != dim) {
        return Err(Error::Dimension { expected: dim, got: 0 });
    }
    // Selection depends only on (length, seed), so swapping a and b swaps the subsamples.
    let pick = |v: &[Vec<f64>], k: usize| -> Vec<Vec<f64>> {
        let k = k.min(v.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ v.len() as u64);
        let mut idx = sample(&mut rng, v.len(), k).into_vec();
        idx.sort_unstable();
        idx.iter().map(|&i| v[i].clone()).collect()
    };
    let half = (subsample / 2).max(1);
    let (sa, sb) = (pick(a, half), pick(b, half));
    let scales: Vec<f64> = (0..dim)
        .map(|k| {
            let mut v: Vec<f64> = sa.iter().chain(&sb).map(|p| p[k].abs()).collect();
            v.sort_by(|x, y| x.total_cmp(y));
            let s = v[v.len() / 2];
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let pooled: Vec<Vec<f64>> =
        sa.iter().chain(&sb).map(|p| p.iter().zip(&scales).map(|(x, s)| (x / s).atan()).collect()).collect();
    let n = pooled.len();
    let mut dist = vec![0f32; n * n];
    for i in 0..n {
        for j in 0..i {
            let d: f64 = pooled[i].iter().zip(&pooled[j]).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            dist[i * n + j] = d as f32;
            dist[j * n + i] = d as f32;
        }
    }
    let stat = |label: &[bool]| -> f64 {
        let (mut xy, mut xx, mut yy) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..n {
            let row = &dist[i * n..(i + 1) * n];
            for j in 0..n {
                let d = row[j] as f64;
                match (label[i], label[j]) {
                    (true, true) => xx += d,
                    (false, false) => yy += d,
                    _ => xy += d,
                }
            }
        }
        let na = label.iter().filter(|&&l| l).count() as f64;
        let nb = n as f64 - na;
        let e = xy / (na * nb) - xx / (na * na) - yy / (nb * nb);
        na * nb / (na + nb) * e
    };
    let mut labels: Vec<bool> = (0..n).map(|i| i < sa.len()).collect();
    let observed = stat(&labels);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37_79b9));
    let mut exceed = 0usize;
    for _ in 0..permutations {
        labels.shuffle(&mut rng);
        if stat(&labels) >= observed {
            exceed += 1;
        }
    }
    Ok(EnergyResult {
        statistic: observed,
        p_value: (exceed + 1) as f64 / (permutations + 1) as f64,
        subsample: n,
        permutations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginalReport {
    pub ks: Vec<KsResult>,
    pub energy: EnergyResult,
}

impl MarginalReport {
    pub fn min_ks_p(&self) -> f64 {
        self.ks.iter().map(|k| k.p_value).fold(1.0, f64::min)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("coordinate,statistic,p_value\n");
        for (i, k) in self.ks.iter().enumerate() {
            s += &format!("{},{:.6e},{:.6e}\n", i + 1, k.statistic, k.p_value);
        }
        s
    }
}

/// Per-coordinate two-sample KS plus the joint energy distance.
pub fn marginal_compare(a: &[Vec<f64>], b: &[Vec<f64>], subsample: usize, permutations: usize, seed: u64) -> Result<MarginalReport> {
    if a.len() < MIN_SAMPLES || b.len() < MIN_SAMPLES {
        return Err(Error::Numerical(format!(
            "insufficient samples: {} and {} (need {MIN_SAMPLES} each)",
            a.len(),
            b.len()
        )));
    }
    let dim = a[0].len();
    let ks = (0..dim)
        .map(|k| {
            let x: Vec<f64> = a.iter().map(|p| p[k]).collect();
            let y: Vec<f64> = b.iter().map(|p| p[k]).collect();
            ks_two_sample(&x, &y)
        })
        .collect();
    let energy = energy_distance(a, b, subsample, permutations, seed)?;
    Ok(MarginalReport { ks, energy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::cauchy_cdf;
    use crate::stable::standard_sas;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn identical_samples_give_zero() {
        let v: Vec<f64> = (0..500).map(|i| (i as f64 * 0.37).sin()).collect();
        let r = ks_two_sample(&v, &v);
        assert_eq!(r.statistic, 0.0);
        assert!(r.p_value > 0.999);
    }

    #[test]
    fn known_two_sample_statistic() {
        // Empirical CDFs differ by 2/4 at 2.5.
        let r = ks_two_sample(&[1.0, 2.0, 3.0, 4.0], &[3.0, 4.0, 5.0, 6.0]);
        assert!((r.statistic - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cauchy_sample_passes_and_shifted_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..20_000).map(|_| 2.0 * standard_sas(1.0, &mut rng)).collect();
        assert!(ks_one_sample(&x, |v| cauchy_cdf(v, 2.0)).p_value > 0.01);
        assert!(ks_one_sample(&x, |v| cauchy_cdf(v - 0.3, 2.0)).p_value < 1e-6);
    }

    #[test]
    fn energy_symmetric_and_sensitive() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut cloud = |shift: f64| -> Vec<Vec<f64>> {
            (0..600)
                .map(|_| {
                    let a: f64 = StandardNormal.sample(&mut rng);
                    let b: f64 = StandardNormal.sample(&mut rng);
                    vec![a + shift, b]
                })
                .collect()
        };
        let (x, y, z) = (cloud(0.0), cloud(0.0), cloud(0.5));
        let e1 = energy_distance(&x, &y, 400, 99, 1).unwrap();
        let e2 = energy_distance(&y, &x, 400, 99, 1).unwrap();
        assert!((e1.statistic - e2.statistic).abs() < 1e-9 * e1.statistic.abs().max(1e-12));
        assert!(e1.p_value > 0.01);
        assert!(energy_distance(&x, &z, 400, 99, 1).unwrap().p_value < 0.05);
    }
}
