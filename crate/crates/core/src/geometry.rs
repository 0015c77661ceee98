//! Homogeneous quasi-norms, word balls, growth fits and the weighted word norm.

use crate::dilation::DilationStructure;
use crate::error::{Error, Result};
use crate::group::{Element, GroupLaw};
use num::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};

/// ||u|| = max_i |u_i|^{beta_i / beta} with beta_i = 1/b_i.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HomNorm {
    pub b: Vec<f64>,
    pub beta: f64,
}

impl HomNorm {
    pub fn from_dilation(d: &DilationStructure) -> Self {
        HomNorm { b: d.b_f64(), beta: d.beta_f64() }
    }

    /// Power p_i with ||u|| = max |u_i|^{p_i}.
    pub fn powers(&self) -> Vec<f64> {
        self.b.iter().map(|b| 1.0 / (b * self.beta)).collect()
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        let mut m: f64 = 0.0;
        for (x, b) in u.iter().zip(&self.b) {
            if *x != 0.0 {
                m = m.max(x.abs().powf(1.0 / (b * self.beta)));
            }
        }
        m
    }

    /// Half-widths r^{beta b_i} of the box B(r) = {||u|| < r}.
    pub fn ball_half_widths(&self, r: f64) -> Vec<f64> {
        self.b.iter().map(|b| r.powf(b * self.beta)).collect()
    }

    /// Lebesgue volume of B(r): 2^d r^{beta sum b_i}.
    pub fn ball_volume(&self, r: f64) -> f64 {
        self.ball_half_widths(r).iter().map(|h| 2.0 * h).product()
    }
}

/// gamma_0 = sum_i b_i.
pub fn gamma0(d: &DilationStructure) -> BigRational {
    d.trace()
}

#[derive(Clone, Debug, Serialize)]
pub struct BallTable {
    pub radius: u32,
    /// (coordinates, word length), sorted by length then coordinates.
    pub entries: Vec<(Vec<i64>, u32)>,
    /// V(r) for r = 0..=radius.
    pub volumes: Vec<u64>,
}

impl BallTable {
    pub fn to_csv(&self) -> String {
        let d = self.entries.first().map(|e| e.0.len()).unwrap_or(0);
        let mut s: String = (1..=d).map(|i| format!("x{i},")).collect();
        s += "word_length\n";
        for (c, l) in &self.entries {
            for v in c {
                s += &format!("{v},");
            }
            s += &format!("{l}\n");
        }
        s
    }

    pub fn length_of(&self, g: &[i64]) -> Option<u32> {
        self.entries.iter().find(|(c, _)| c == g).map(|e| e.1)
    }
}

/// Exact word lengths |g|_S <= radius by breadth-first search; S is symmetrized.
pub fn word_ball(law: &GroupLaw, gens: &[Element], radius: u32, max_states: usize) -> Result<BallTable> {
    let d = law.dim();
    let mut s: Vec<Vec<i128>> = Vec::new();
    for g in gens {
        let v = g.to_i128().ok_or_else(|| Error::Unsupported("word ball needs lattice generators".into()))?;
        let mut iv = vec![0i128; d];
        law.inv_i128(&v, &mut iv).map_err(|_| Error::NonIntegral { coord: 0 })?;
        for c in [v, iv] {
            if !s.contains(&c) && c.iter().any(|&x| x != 0) {
                s.push(c);
            }
        }
    }
    let mut dist: HashMap<Vec<i128>, u32> = HashMap::new();
    let e = vec![0i128; d];
    dist.insert(e.clone(), 0);
    let mut queue = VecDeque::from([e]);
    let mut out = vec![0i128; d];
    while let Some(g) = queue.pop_front() {
        let l = dist[&g];
        if l == radius {
            continue;
        }
        for h in &s {
            law.mul_i128(&g, h, &mut out).map_err(|_| Error::Budget("coordinate overflow in word ball".into()))?;
            if !dist.contains_key(&out) {
                dist.insert(out.clone(), l + 1);
                queue.push_back(out.clone());
                if dist.len() > max_states {
                    return Err(Error::Budget(format!("word ball exceeds {max_states} states")));
                }
            }
        }
    }
    let mut entries: Vec<(Vec<i64>, u32)> =
        dist.into_iter().map(|(k, v)| (k.into_iter().map(|x| x as i64).collect(), v)).collect();
    entries.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    let mut volumes = vec![0u64; radius as usize + 1];
    for (_, l) in &entries {
        for v in volumes.iter_mut().skip(*l as usize) {
            *v += 1;
        }
    }
    Ok(BallTable { radius, entries, volumes })
}

/// Least-squares slope of log V(r) against log r.
pub fn growth_exponent_fit(radii: &[f64], volumes: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(volumes)
        .filter(|(r, v)| **r > 0.0 && **v > 0.0)
        .map(|(r, v)| (r.ln(), v.ln()))
        .collect();
    let mut distinct: Vec<f64> = pts.iter().map(|p| p.0).collect();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::Numerical("growth fit needs at least 3 distinct radii".into()));
    }
    Ok(ls_slope(&pts))
}

pub fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Bottleneck norm ||g||_{Sigma,w}: least R such that g is a word using at most
/// floor(R^{w_i}) letters sigma_i^{+-1} for each i.
pub fn sigma_w_norm(
    law: &GroupLaw,
    g: &Element,
    sigma: &[Element],
    w: &[f64],
    r_max: f64,
    max_states: usize,
) -> Result<f64> {
    let d = law.dim();
    let target = g.to_i128().ok_or_else(|| Error::Unsupported("sigma_w_norm needs a lattice element".into()))?;
    if target.iter().all(|&x| x == 0) {
        return Ok(0.0);
    }
    let letters: Vec<(usize, Vec<i128>)> = sigma
        .iter()
        .enumerate()
        .flat_map(|(i, s)| {
            let v = s.to_i128().expect("lattice generator");
            let mut iv = vec![0i128; d];
            law.inv_i128(&v, &mut iv).expect("lattice inverse");
            [(i, v), (i, iv)]
        })
        .collect();
    // Candidate radii: u^{1/w_i}, u = 1, 2, ...
    let mut cands: Vec<f64> = Vec::new();
    for &wi in w {
        let mut u = 1.0f64;
        loop {
            let r = u.powf(1.0 / wi);
            if r > r_max * (1.0 + 1e-12) {
                break;
            }
            cands.push(r);
            u += 1.0;
        }
    }
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cands.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * b.abs().max(1.0));
    let mut total_states = 0usize;
    for r in cands {
        let caps: Vec<u32> = w.iter().map(|wi| (r.powf(*wi) + 1e-9).floor() as u32).collect();
        let mut seen: HashSet<(Vec<i128>, Vec<u32>)> = HashSet::new();
        let start = (vec![0i128; d], vec![0u32; w.len()]);
        seen.insert(start.clone());
        let mut stack = vec![start];
        let mut out = vec![0i128; d];
        while let Some((h, used)) = stack.pop() {
            for (i, l) in &letters {
                if used[*i] >= caps[*i] {
                    continue;
                }
                law.mul_i128(&h, l, &mut out).map_err(|_| Error::Budget("overflow in word search".into()))?;
                if out == target {
                    return Ok(r);
                }
                let mut u2 = used.clone();
                u2[*i] += 1;
                let st = (out.clone(), u2);
                if seen.insert(st.clone()) {
                    total_states += 1;
                    if total_states > max_states {
                        return Err(Error::Budget(format!("sigma_w_norm exceeded {max_states} states")));
                    }
                    stack.push(st);
                }
            }
        }
    }
    Err(Error::Budget(format!("element not reachable within R = {r_max}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        let n = HomNorm { b: vec![1.0, 1.0, 2.0], beta: 1.0 };
        assert_eq!(n.norm(&[8.0, 0.0, 0.0]), 8.0);
        assert_eq!(n.norm(&[0.0, 0.0, 16.0]), 4.0);
        assert!((n.norm(&[9.0, 9.0, 81.0]) - 9.0).abs() < 1e-12);
        assert_eq!(n.norm(&[0.0, 0.0, 0.0]), 0.0);
    }
}
