//! Commutator weight systems, the weight filtration and adapted dilation exponents.

use crate::dilation::{DilationSource, DilationStructure};
use crate::error::{Error, Result};
use crate::group::{Element, GroupLaw};
use crate::linalg::{in_span, rank, rref};
use crate::poly::rat_to_f64;
use num::{BigRational, Signed, Zero};
use serde::Serialize;
use std::collections::HashSet;

#[derive(Clone, Debug)]
pub struct WeightedGenerators {
    pub sigma: Vec<Element>,
    /// w(sigma_i) = 1/alpha_i.
    pub w: Vec<BigRational>,
    /// Maximal formal commutator length; defaults to the dimension.
    pub class_cap: Option<usize>,
}

impl WeightedGenerators {
    pub fn new(sigma: Vec<Element>, w: Vec<BigRational>) -> Result<Self> {
        if sigma.len() != w.len() || sigma.is_empty() {
            return Err(Error::Filtration("need one positive weight per generator".into()));
        }
        if w.iter().any(|x| !x.is_positive()) {
            return Err(Error::Filtration("weights must be positive".into()));
        }
        Ok(WeightedGenerators { sigma, w, class_cap: None })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorEntry {
    pub formal: String,
    pub length: usize,
    #[serde(serialize_with = "ser_rat")]
    pub weight: BigRational,
    #[serde(skip)]
    pub element: Element,
    #[serde(serialize_with = "ser_rat_vec")]
    pub log: Vec<BigRational>,
}

fn ser_rat<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ser_rat_vec<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&r.to_string())?;
    }
    seq.end()
}

#[derive(Clone, Debug, Serialize)]
pub struct Ledger {
    pub dim: usize,
    pub entries: Vec<CommutatorEntry>,
}

/// All formal commutators over Sigma and Sigma^{-1} up to the class cap, with
/// [a, b] = a^-1 b^-1 a b. Trivial evaluations are dropped; repeats of the same
/// (element, weight) pair are kept once.
pub fn enumerate_commutators(gen: &WeightedGenerators, law: &GroupLaw) -> Result<Ledger> {
    if law.log_map().is_none() {
        return Err(Error::Unsupported(format!("log map unavailable for {}", law.name)));
    }
    let d = law.dim();
    let cap = gen.class_cap.unwrap_or(d).max(1);
    let mut levels: Vec<Vec<CommutatorEntry>> = Vec::new();
    let mut seen: HashSet<(Vec<String>, String)> = HashSet::new();
    let key = |e: &Element, w: &BigRational| -> (Vec<String>, String) {
        let coords = match e {
            Element::Int(v) => v.iter().map(|c| c.to_string()).collect(),
            Element::Float(v) => v.iter().map(|c| format!("{c:e}")).collect(),
        };
        (coords, w.to_string())
    };
    let mut first = Vec::new();
    for (i, (s, w)) in gen.sigma.iter().zip(&gen.w).enumerate() {
        if s.dim() != d {
            return Err(Error::Dimension { expected: d, got: s.dim() });
        }
        for (sign, g) in [("", s.clone()), ("^-1", law.inverse(s)?)] {
            if g.is_identity() || !seen.insert(key(&g, w)) {
                continue;
            }
            let log = law.log_rational(&g)?;
            first.push(CommutatorEntry { formal: format!("s{}{}", i + 1, sign), length: 1, weight: w.clone(), element: g, log });
        }
    }
    levels.push(first);
    for n in 2..=cap {
        let mut level = Vec::new();
        for l1 in 1..n {
            let l2 = n - l1;
            for a in &levels[l1 - 1] {
                for b in &levels[l2 - 1] {
                    let c = law.commutator(&a.element, &b.element)?;
                    if c.is_identity() {
                        continue;
                    }
                    let w = &a.weight + &b.weight;
                    if !seen.insert(key(&c, &w)) {
                        continue;
                    }
                    let log = law.log_rational(&c)?;
                    level.push(CommutatorEntry {
                        formal: format!("[{},{}]", a.formal, b.formal),
                        length: n,
                        weight: w,
                        element: c,
                        log,
                    });
                }
            }
        }
        if level.is_empty() {
            break;
        }
        levels.push(level);
    }
    Ok(Ledger { dim: d, entries: levels.into_iter().flatten().collect() })
}

#[derive(Clone, Debug, Serialize)]
pub struct Filtration {
    #[serde(serialize_with = "ser_rat_vec")]
    pub thresholds: Vec<BigRational>,
    pub dims: Vec<usize>,
    /// Orthonormal basis of each layer n_j.
    pub layers: Vec<Vec<Vec<f64>>>,
    /// Exact spanning rows (reduced echelon form) of g_{w_j} = sum_{l >= j} n_l.
    #[serde(skip)]
    pub spans: Vec<Vec<Vec<BigRational>>>,
    #[serde(serialize_with = "ser_rat")]
    pub gamma0: BigRational,
    pub dim: usize,
}

fn span_at(ledger: &Ledger, s: &BigRational) -> Vec<Vec<BigRational>> {
    let rows: Vec<Vec<BigRational>> = ledger.entries.iter().filter(|e| &e.weight >= s).map(|e| e.log.clone()).collect();
    if rows.is_empty() {
        return rows;
    }
    rref(&rows).0
}

/// Weight filtration g_s = span{log c : w(c) >= s} and its thresholds.
pub fn filtration(ledger: &Ledger) -> Result<Filtration> {
    let d = ledger.dim;
    let mut weights: Vec<BigRational> = ledger.entries.iter().map(|e| e.weight.clone()).collect();
    weights.sort();
    weights.dedup();
    if weights.is_empty() {
        return Err(Error::Filtration("empty commutator ledger".into()));
    }
    let spans: Vec<Vec<Vec<BigRational>>> = weights.iter().map(|s| span_at(ledger, s)).collect();
    if spans[0].len() != d {
        return Err(Error::Filtration(format!(
            "span deficiency: commutator logs span dimension {} < {}",
            spans[0].len(),
            d
        )));
    }
    // Threshold = last weight of each block on which the span is constant.
    let mut thresholds = Vec::new();
    let mut block_spans = Vec::new();
    for k in 0..weights.len() {
        let next_rank = spans.get(k + 1).map(|s| s.len()).unwrap_or(0);
        if next_rank < spans[k].len() {
            thresholds.push(weights[k].clone());
            block_spans.push(spans[k].clone());
        }
    }
    let mut dims = Vec::new();
    let mut layers = Vec::new();
    for j in 0..block_spans.len() {
        let next: Vec<Vec<BigRational>> = block_spans.get(j + 1).cloned().unwrap_or_default();
        dims.push(block_spans[j].len() - next.len());
        // Complement: extend the next span by echelon rows of this one, lowest pivot first.
        let mut basis = next.clone();
        let mut layer = Vec::new();
        for row in &block_spans[j] {
            if !in_span(row, &basis) {
                basis.push(row.clone());
                layer.push(row.iter().map(rat_to_f64).collect::<Vec<f64>>());
            }
        }
        layers.push(gram_schmidt(layer));
    }
    let gamma0 = thresholds
        .iter()
        .zip(&dims)
        .fold(BigRational::zero(), |a, (w, &n)| a + w * BigRational::from_integer(n.into()));
    Ok(Filtration { thresholds, dims, layers, spans: block_spans, gamma0, dim: d })
}

fn gram_schmidt(vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mut v in vs {
        for u in &out {
            let p: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (a, b) in v.iter_mut().zip(u) {
                *a -= p * b;
            }
        }
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-12 {
            out.push(v.into_iter().map(|a| a / n).collect());
        }
    }
    out
}

fn axis(d: usize, i: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); d];
    v[i] = BigRational::from_integer(1.into());
    v
}

/// Dilation exponents b_i = threshold of the layer containing coordinate axis i.
pub fn to_dilation(f: &Filtration) -> Result<DilationStructure> {
    let d = f.dim;
    let mut b: Vec<Option<BigRational>> = vec![None; d];
    for (j, span) in f.spans.iter().enumerate() {
        let members: Vec<usize> = (0..d).filter(|&i| in_span(&axis(d, i), span)).collect();
        if members.len() != span.len() {
            let basis: Vec<Vec<String>> = span.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
            return Err(Error::Filtration(format!(
                "layer {} (threshold {}) is not spanned by coordinate axes; basis {:?}",
                j + 1,
                f.thresholds[j],
                basis
            )));
        }
        for i in members {
            b[i] = Some(f.thresholds[j].clone());
        }
    }
    let b: Vec<BigRational> = b.into_iter().map(|x| x.expect("first span is the whole space")).collect();
    Ok(DilationStructure::new(b)?.with_source(DilationSource::FromWeights))
}

#[derive(Clone, Debug, Serialize)]
pub struct ModifiedWeight {
    pub formal: String,
    #[serde(serialize_with = "ser_rat")]
    pub weight: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub underline: BigRational,
}

/// underline-w(c) = max{w_j : log c in g_{w_j}}.
///
/// Membership of some power c^m in the subgroup generated by the weight->=w_j
/// commutators is equivalent to log c lying in the rational span of their logs,
/// so no explicit power search is needed.
pub fn modified_weights(ledger: &Ledger, f: &Filtration) -> Vec<ModifiedWeight> {
    ledger
        .entries
        .iter()
        .map(|e| {
            let mut best = e.weight.clone();
            for (w, span) in f.thresholds.iter().zip(&f.spans) {
                if w > &best && in_span(&e.log, span) {
                    best = w.clone();
                }
            }
            ModifiedWeight { formal: e.formal.clone(), weight: e.weight.clone(), underline: best }
        })
        .collect()
}

/// Rank of the log vectors in the ledger (generation check).
pub fn ledger_rank(ledger: &Ledger) -> usize {
    let rows: Vec<Vec<BigRational>> = ledger.entries.iter().map(|e| e.log.clone()).collect();
    if rows.is_empty() {
        0
    } else {
        rank(&rows)
    }
}
