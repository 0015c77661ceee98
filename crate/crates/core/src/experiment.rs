//! Experiment configs, runners and reports.
//!
//! A config names a group, a step measure, a dilation (explicit or derived from
//! generator weights) and a list of experiments. Reports are JSON with sorted
//! keys and no timing data, so equal configs and seeds give identical bytes.

use crate::diagnostics::{ball_count_convergence, ks_one_sample, llt, marginal_compare, vague_convergence};
use crate::dilation::{check_automorphism, limit_law, parse_rational, DilationStructure};
use crate::error::{Error, Result};
use crate::geometry::{growth_exponent_fit, word_ball, HomNorm};
use crate::group::{basis, builtin, Element, GroupLaw};
use crate::limits::{axis_limit, LimitMeasure, LimitPart};
use crate::measures::{MeasureSpec, StepMeasure};
use crate::simulate::{
    drift_correction, euler_endpoints, euler_product, exit_time, replica_rng, rescale_path, rescale_point, run_walk,
    walk_endpoints, LevyIncrementSpec, WalkConfig,
};
use crate::special::cauchy_cdf;
use crate::testfn::bump_family;
use crate::weights::{enumerate_commutators, filtration, to_dilation, WeightedGenerators};
use num::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum GroupSource {
    Builtin(String),
    File { file: String },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DilationChoice {
    /// "auto": exponents from the weight filtration.
    Auto(String),
    Explicit(Vec<String>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub generators: Vec<Vec<i64>>,
    /// w(sigma_i) = 1/alpha_i as rationals, e.g. "2/3".
    pub weights: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default = "default_cells")]
    pub memory_cells: usize,
    /// Total walk steps over all replicas.
    #[serde(default = "default_steps")]
    pub steps: u64,
    #[serde(default = "default_replicas")]
    pub replicas: u64,
}

fn default_cells() -> usize {
    1 << 24
}
fn default_steps() -> u64 {
    4_000_000_000
}
fn default_replicas() -> u64 {
    10_000
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { memory_cells: default_cells(), steps: default_steps(), replicas: default_replicas() }
    }
}

fn default_vague_ts() -> Vec<f64> {
    vec![1e2, 1e4, 1e6]
}
fn default_rel_tol() -> f64 {
    1e-4
}
fn default_vague_gate() -> f64 {
    0.03
}
fn default_one() -> f64 {
    1.0
}
fn default_p_min() -> f64 {
    0.01
}
fn default_subsample() -> usize {
    2000
}
fn default_permutations() -> usize {
    200
}
fn default_slope_tol() -> f64 {
    0.15
}
fn default_volume_gate() -> f64 {
    0.02
}
fn default_paths() -> u64 {
    4
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    LimitLaw {},
    Gamma0 {},
    Vague {
        #[serde(default = "default_vague_ts")]
        ts: Vec<f64>,
        #[serde(default = "default_rel_tol")]
        rel_tol: f64,
        #[serde(default = "default_vague_gate")]
        max_rel_err: f64,
    },
    Walk {
        steps: u64,
        #[serde(default)]
        replicas: Option<u64>,
        /// Full paths written to CSV.
        #[serde(default = "default_paths")]
        paths: u64,
    },
    SimulateLimit {
        steps: u64,
        #[serde(default = "default_one")]
        horizon: f64,
        #[serde(default)]
        replicas: Option<u64>,
        #[serde(default = "default_paths")]
        paths: u64,
    },
    Llt {
        ns: Vec<u64>,
        /// Gate on max r_n / min r_n.
        #[serde(default)]
        max_band: Option<f64>,
    },
    Compare {
        /// Walk steps; the walk is rescaled by delta_{1/n}.
        n: u64,
        euler_steps: u64,
        #[serde(default)]
        samples: Option<u64>,
        #[serde(default = "default_subsample")]
        subsample: usize,
        #[serde(default = "default_permutations")]
        permutations: usize,
        #[serde(default = "default_p_min")]
        p_min: f64,
    },
    ExitTimes {
        radii: Vec<f64>,
        max_steps: u64,
        #[serde(default)]
        replicas: Option<u64>,
        #[serde(default = "default_slope_tol")]
        slope_tol: f64,
    },
    Volume {
        ts: Vec<f64>,
        #[serde(default = "default_one")]
        r: f64,
        #[serde(default)]
        x: Option<Vec<f64>>,
        #[serde(default = "default_volume_gate")]
        max_rel_err: f64,
        /// Word-ball growth fit over radii fit_from..=growth_radius.
        #[serde(default)]
        growth_radius: Option<u32>,
        #[serde(default)]
        growth_target: Option<f64>,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::LimitLaw {} => "limit-law",
            Experiment::Gamma0 {} => "gamma0",
            Experiment::Vague { .. } => "vague",
            Experiment::Walk { .. } => "walk",
            Experiment::SimulateLimit { .. } => "simulate-limit",
            Experiment::Llt { .. } => "llt",
            Experiment::Compare { .. } => "compare",
            Experiment::ExitTimes { .. } => "exit-times",
            Experiment::Volume { .. } => "volume",
        }
    }

    fn stochastic(&self) -> bool {
        matches!(
            self,
            Experiment::Walk { .. } | Experiment::SimulateLimit { .. } | Experiment::Compare { .. } | Experiment::ExitTimes { .. }
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupSource,
    pub measure: MeasureSpec,
    pub dilation: DilationChoice,
    /// Scaling exponent beta of the norm (defaults to 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightSpec>,
    /// Limit Levy measure; derived for axis-cyclic measures when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<LimitMeasure>,
    pub experiments: Vec<Experiment>,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_output")]
    pub output: String,
}

fn default_output() -> String {
    "nilwalk-out".into()
}

fn cfg_err(field: &str, msg: impl Into<String>) -> Error {
    Error::Config { field: field.into(), msg: msg.into() }
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Field-level checks beyond the JSON schema.
    pub fn validate(&self) -> Result<()> {
        self.measure.validate("measure")?;
        match &self.dilation {
            DilationChoice::Auto(s) if s == "auto" => {
                if self.weights.is_none() {
                    return Err(cfg_err("weights", "dilation \"auto\" needs generator weights"));
                }
            }
            DilationChoice::Auto(s) => {
                return Err(cfg_err("dilation", format!("expected \"auto\" or a list of exponents, got {s:?}")))
            }
            DilationChoice::Explicit(v) => {
                for (i, b) in v.iter().enumerate() {
                    parse_rational(b).map_err(|e| cfg_err(&format!("dilation[{i}]"), e.to_string()))?;
                }
            }
        }
        if let Some(b) = &self.beta {
            parse_rational(b).map_err(|e| cfg_err("beta", e.to_string()))?;
        }
        if let Some(w) = &self.weights {
            if w.generators.len() != w.weights.len() {
                return Err(cfg_err("weights.weights", "one weight per generator"));
            }
            for (i, x) in w.weights.iter().enumerate() {
                parse_rational(x).map_err(|e| cfg_err(&format!("weights.weights[{i}]"), e.to_string()))?;
            }
        }
        if self.experiments.is_empty() {
            return Err(cfg_err("experiments", "at least one experiment"));
        }
        for (i, e) in self.experiments.iter().enumerate() {
            let f = |name: &str| format!("experiments[{i}].{name}");
            if e.stochastic() && self.seed.is_none() {
                return Err(cfg_err("seed", format!("experiment {} is stochastic and needs a seed", e.kind())));
            }
            match e {
                Experiment::Vague { ts, rel_tol, .. } => {
                    if ts.is_empty() || ts.iter().any(|t| *t < 1.0) {
                        return Err(cfg_err(&f("ts"), "scales must be >= 1"));
                    }
                    if !(*rel_tol > 0.0 && *rel_tol < 1.0) {
                        return Err(cfg_err(&f("rel_tol"), "must lie in (0, 1)"));
                    }
                }
                Experiment::Walk { steps, .. } | Experiment::SimulateLimit { steps, .. } if *steps == 0 => {
                    return Err(cfg_err(&f("steps"), "must be positive"));
                }
                Experiment::Llt { ns, .. } if ns.is_empty() || ns.contains(&0) => {
                    return Err(cfg_err(&f("ns"), "need positive step counts"));
                }
                Experiment::Compare { n, euler_steps, .. } if *n == 0 || *euler_steps == 0 => {
                    return Err(cfg_err(&f("n"), "n and euler_steps must be positive"));
                }
                Experiment::ExitTimes { radii, .. } if radii.len() < 2 || radii.iter().any(|r| *r <= 0.0) => {
                    return Err(cfg_err(&f("radii"), "need at least two positive radii"));
                }
                Experiment::Volume { ts, r, .. } if ts.is_empty() || *r <= 0.0 => {
                    return Err(cfg_err(&f("ts"), "need scales and a positive radius"));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub replicas: Option<u64>,
    pub memory_cells: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentOutcome {
    pub kind: String,
    pub passed: bool,
    pub gate: String,
    pub result: Value,
    #[serde(skip)]
    pub csv: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub group: String,
    pub dilation: Vec<String>,
    pub beta: String,
    pub seed: Option<u64>,
    pub experiments: Vec<ExperimentOutcome>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.experiments.iter().all(|e| e.passed)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Resolved objects shared by the experiments of one config.
pub struct Context {
    pub law: GroupLaw,
    pub measure: StepMeasure,
    pub dilation: DilationStructure,
    pub auto_gamma0: Option<BigRational>,
    /// Thresholds w_j and dims of n_j when the dilation came from weights.
    pub layers: Option<(Vec<String>, Vec<usize>)>,
    /// Weighted generators from the config; word balls use them when present.
    pub generators: Option<Vec<Element>>,
    limit: Option<LimitMeasure>,
    seed: u64,
    budgets: Budgets,
    replicas_override: Option<u64>,
}

fn load_group(g: &GroupSource) -> Result<GroupLaw> {
    match g {
        GroupSource::Builtin(name) => builtin(name).map_err(|e| cfg_err("group", e.to_string())),
        GroupSource::File { file } => {
            let s = std::fs::read_to_string(file).map_err(|e| cfg_err("group.file", format!("{file}: {e}")))?;
            GroupLaw::from_json_str(&s).map_err(|e| cfg_err("group.file", e.to_string()))
        }
    }
}

impl Context {
    pub fn new(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Self> {
        let law = load_group(&cfg.group)?;
        let measure = StepMeasure::new(&law, &cfg.measure)?;
        let mut auto_gamma0 = None;
        let mut layers = None;
        let mut dilation = match &cfg.dilation {
            DilationChoice::Explicit(v) => {
                if v.len() != law.dim() {
                    return Err(cfg_err("dilation", format!("expected {} exponents, got {}", law.dim(), v.len())));
                }
                DilationStructure::new(v.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?)?
            }
            DilationChoice::Auto(_) => {
                let w = cfg.weights.as_ref().expect("validated");
                let sigma: Vec<Element> = w.generators.iter().map(|g| Element::int(g)).collect();
                let ws = w.weights.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?;
                let ledger = enumerate_commutators(&WeightedGenerators::new(sigma, ws)?, &law)?;
                let f = filtration(&ledger)?;
                auto_gamma0 = Some(f.gamma0.clone());
                layers = Some((f.thresholds.iter().map(|w| w.to_string()).collect(), f.dims.clone()));
                to_dilation(&f)?
            }
        };
        if let Some(b) = &cfg.beta {
            dilation = dilation.with_beta(parse_rational(b)?)?;
        }
        let generators = cfg.weights.as_ref().map(|w| w.generators.iter().map(|g| Element::int(g)).collect());
        let mut budgets = cfg.budgets.clone();
        if let Some(c) = opts.memory_cells {
            budgets.memory_cells = c;
        }
        Ok(Context {
            law,
            measure,
            dilation,
            auto_gamma0,
            layers,
            generators,
            limit: cfg.limit.clone(),
            seed: opts.seed.or(cfg.seed).unwrap_or(0),
            budgets,
            replicas_override: opts.replicas,
        })
    }

    fn limit_measure(&self) -> Result<LimitMeasure> {
        match &self.limit {
            Some(l) => Ok(l.clone()),
            None => axis_limit(&self.measure, &self.dilation),
        }
    }

    fn limit_group(&self) -> Result<GroupLaw> {
        let r = limit_law(&self.law, &self.dilation)?;
        r.limit.ok_or_else(|| {
            let offending: Vec<String> = r.offending.iter().map(|o| format!("{} in coordinate {}", o.monomial, o.coordinate)).collect();
            Error::Inadmissible(offending.join(", "))
        })
    }

    fn replicas(&self, own: Option<u64>) -> u64 {
        self.replicas_override.or(own).unwrap_or(self.budgets.replicas)
    }

    fn check_steps(&self, replicas: u64, steps: u64) -> Result<()> {
        let total = replicas.saturating_mul(steps);
        if total > self.budgets.steps {
            return Err(Error::Budget(format!("{replicas} x {steps} steps exceeds the step budget {}", self.budgets.steps)));
        }
        Ok(())
    }
}

/// Estimate with a two-sided interval.
fn est(value: f64, lo: f64, hi: f64) -> Value {
    json!({ "value": value, "lo": lo, "hi": hi })
}

/// Sample quantile with a 95% distribution-free interval from order statistics.
fn quantile(sorted: &[f64], q: f64) -> Value {
    let n = sorted.len();
    let nf = n as f64;
    let at = |x: f64| sorted[(x.max(0.0) as usize).min(n - 1)];
    let s = 1.96 * (nf * q * (1.0 - q)).sqrt();
    est(at(q * nf), at(q * nf - s), at(q * nf + s))
}

fn marginal_summary(points: &[Vec<f64>]) -> Value {
    let d = points.first().map(|p| p.len()).unwrap_or(0);
    let coords: Vec<Value> = (0..d)
        .map(|k| {
            let mut v: Vec<f64> = points.iter().map(|p| p[k]).collect();
            v.sort_by(|a, b| a.total_cmp(b));
            json!({ "q25": quantile(&v, 0.25), "median": quantile(&v, 0.5), "q75": quantile(&v, 0.75) })
        })
        .collect();
    json!({ "samples": points.len(), "coordinates": coords })
}

fn points_csv(points: &[Vec<f64>]) -> String {
    let d = points.first().map(|p| p.len()).unwrap_or(0);
    let mut s = (1..=d).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    for p in points {
        s += &p.iter().map(|x| format!("{x:.10e}")).collect::<Vec<_>>().join(",");
        s.push('\n');
    }
    s
}

fn outcome(kind: &str, passed: bool, gate: String, result: Value, csv: Vec<(String, String)>) -> ExperimentOutcome {
    ExperimentOutcome { kind: kind.into(), passed, gate, result, csv }
}

pub fn run_experiment(ctx: &Context, e: &Experiment) -> Result<ExperimentOutcome> {
    let d = &ctx.dilation;
    match e {
        Experiment::LimitLaw {} => {
            let r = limit_law(&ctx.law, d)?;
            let json_r = serde_json::to_value(r.to_json(d))?;
            let (auto, resid) = match &r.limit {
                Some(l) => (check_automorphism(l, d), l.associativity_residual(1000, ctx.seed)),
                None => (false, f64::NAN),
            };
            let passed = r.admissible && auto && resid < 1e-9;
            let result = json!({
                "limit_law": json_r,
                "automorphism": auto,
                "associativity_residual": est(resid, 0.0, resid),
            });
            Ok(outcome("limit-law", passed, "admissible, delta_t automorphism, associativity residual < 1e-9".into(), result, vec![]))
        }
        Experiment::Gamma0 {} => {
            let g = d.trace();
            let mut result = json!({
                "exponents": d.exponents().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                "gamma0": g.to_string(),
            });
            let mut passed = true;
            if let Some(a) = &ctx.auto_gamma0 {
                result["gamma0_filtration"] = json!(a.to_string());
                if let Some((w, dims)) = &ctx.layers {
                    result["thresholds"] = json!(w);
                    result["dims"] = json!(dims);
                }
                passed = a == &g;
            }
            Ok(outcome("gamma0", passed, "sum b_i equals sum w_j dim n_j (exact)".into(), result, vec![]))
        }
        Experiment::Vague { ts, rel_tol, max_rel_err } => {
            let mu = ctx.limit_measure().ok();
            let fs = bump_family(&HomNorm::from_dilation(d));
            let table = vague_convergence(&ctx.measure, d, mu.as_ref(), &fs, ts, *rel_tol)?;
            let worst = table.max_final_rel_err();
            let passed = mu.is_some() && worst < *max_rel_err;
            let result = json!({ "table": serde_json::to_value(&table)?, "max_final_rel_err": worst });
            Ok(outcome("vague", passed, format!("max relative error at the largest t < {max_rel_err}"), result, vec![("vague.csv".into(), table.to_csv())]))
        }
        Experiment::Walk { steps, replicas, paths } => {
            let reps = ctx.replicas(*replicas);
            ctx.check_steps(reps, *steps)?;
            let cfg = WalkConfig {
                law: ctx.law.clone(),
                measure: ctx.measure.clone(),
                horizon: 1.0,
                steps_per_unit: *steps,
                replicas: reps,
                seed: ctx.seed,
            };
            let mut csv = Vec::new();
            let mut consistent = true;
            for r in 0..(*paths).min(reps) {
                let p = run_walk(&cfg, r)?;
                consistent &= p.is_consistent(&ctx.law);
                csv.push((format!("walk_path_{r}.csv"), rescale_path(&p, d, *steps as f64).to_csv()));
            }
            let ends = walk_endpoints(&ctx.law, &ctx.measure, *steps, reps, ctx.seed)?;
            let pts: Vec<Vec<f64>> = ends.iter().map(|x| rescale_point(x, d, *steps as f64)).collect();
            csv.push(("walk_endpoints.csv".into(), points_csv(&pts)));
            let result = json!({ "steps": steps, "replicas": reps, "paths_consistent": consistent, "rescaled_endpoint": marginal_summary(&pts) });
            Ok(outcome("walk", consistent, "stored paths reproduce from their step logs".into(), result, csv))
        }
        Experiment::SimulateLimit { steps, horizon, replicas, paths } => {
            let reps = ctx.replicas(*replicas);
            ctx.check_steps(reps, *steps)?;
            let mu = ctx.limit_measure()?;
            let lim = ctx.limit_group()?;
            let drift = drift_correction(&mu, &lim)?;
            let mut spec = LevyIncrementSpec::from_limit(&mu)?;
            spec.drift = drift.drift.clone();
            let mut csv = Vec::new();
            for r in 0..(*paths).min(reps) {
                let mut rng = replica_rng(ctx.seed, r);
                let p = euler_product(&spec, &lim, *steps, *horizon, &mut rng)?;
                csv.push((format!("levy_path_{r}.csv"), p.to_csv()));
            }
            let ends = euler_endpoints(&spec, &lim, *steps, *horizon, reps, ctx.seed)?;
            csv.push(("levy_endpoints.csv".into(), points_csv(&ends)));
            let result = json!({
                "increments": serde_json::to_value(&spec)?,
                "drift": serde_json::to_value(&drift)?,
                "endpoint": marginal_summary(&ends),
            });
            let passed = drift.error.is_finite();
            Ok(outcome("simulate-limit", passed, "drift quadrature converged".into(), result, csv))
        }
        Experiment::Llt { ns, max_band } => {
            let r = llt(&ctx.measure, d, ns, ctx.budgets.memory_cells)?;
            let band = max_band.unwrap_or(if r.method == "z-fft-window" { 1.05 } else { 1.5 });
            let passed = r.brackets_valid && r.band_ratio < band;
            let csv = vec![("llt.csv".into(), r.to_csv())];
            Ok(outcome("llt", passed, format!("brackets valid and max r_n / min r_n < {band}"), serde_json::to_value(&r)?, csv))
        }
        Experiment::Compare { n, euler_steps, samples, subsample, permutations, p_min } => {
            let reps = ctx.replicas(*samples);
            ctx.check_steps(reps, *n)?;
            let mu = ctx.limit_measure()?;
            let lim = ctx.limit_group()?;
            let mut spec = LevyIncrementSpec::from_limit(&mu)?;
            spec.drift = drift_correction(&mu, &lim)?.drift;
            let ends = walk_endpoints(&ctx.law, &ctx.measure, *n, reps, ctx.seed)?;
            let walk: Vec<Vec<f64>> = ends.iter().map(|x| rescale_point(x, d, *n as f64)).collect();
            let levy = euler_endpoints(&spec, &lim, *euler_steps, 1.0, reps, ctx.seed.wrapping_add(1))?;
            let rep = marginal_compare(&walk, &levy, *subsample, *permutations, ctx.seed)?;
            let mut min_p = rep.min_ks_p();
            let mut result = json!({ "samples": reps, "walk_steps": n, "euler_steps": euler_steps, "marginals": serde_json::to_value(&rep)? });
            // Exact Cauchy marginal for the one-dimensional index-1 limit.
            if let [LimitPart::AxisPower { axis: 0, kappa, alpha }] = mu.parts.as_slice() {
                if mu.dim == 1 && (*alpha - 1.0).abs() < 1e-12 {
                    let scale = kappa * std::f64::consts::PI;
                    let x: Vec<f64> = walk.iter().map(|p| p[0]).collect();
                    let k = ks_one_sample(&x, |v| cauchy_cdf(v, scale));
                    min_p = min_p.min(k.p_value);
                    result["cauchy"] = json!({ "scale": scale, "ks": serde_json::to_value(&k)? });
                }
            }
            let csv = vec![("compare.csv".into(), rep.to_csv())];
            Ok(outcome("compare", min_p > *p_min, format!("every KS p-value > {p_min}"), result, csv))
        }
        Experiment::ExitTimes { radii, max_steps, replicas, slope_tol } => {
            let reps = ctx.replicas(*replicas);
            ctx.check_steps(reps, *max_steps)?;
            let norm = HomNorm::from_dilation(d);
            let t = exit_time(&ctx.law, &ctx.measure, &norm, radii, reps, *max_steps, ctx.seed)?;
            let beta = d.beta_f64();
            let passed = t.slope.map(|s| ((s - beta) / beta).abs() < *slope_tol).unwrap_or(false);
            let mut csv = String::from("x,y,lo,hi\n");
            for r in &t.rows {
                csv += &format!("{},{:.6e},{:.6e},{:.6e}\n", r.radius, r.mean_steps, r.mean_steps - r.ci95, r.mean_steps + r.ci95);
            }
            let result = json!({ "beta": beta, "table": serde_json::to_value(&t)? });
            Ok(outcome("exit-times", passed, format!("log-log slope within {slope_tol} of beta (relative)"), result, vec![("exit_times.csv".into(), csv)]))
        }
        Experiment::Volume { ts, r, x, max_rel_err, growth_radius, growth_target } => {
            let x = x.clone().unwrap_or_else(|| vec![0.0; ctx.law.dim()]);
            let rows = ball_count_convergence(&ctx.law, d, &x, *r, ts, ctx.budgets.memory_cells)?;
            let last = rows.last().map(|r| r.rel_err).unwrap_or(f64::NAN);
            let mut passed = last < *max_rel_err;
            let mut csv = String::from("x,y,lo,hi\n");
            for row in &rows {
                csv += &format!("{},{:.10e},{:.10e},{:.10e}\n", row.t, row.scaled, row.volume, row.volume);
            }
            let mut result = json!({ "rows": serde_json::to_value(&rows)?, "final_rel_err": last });
            if let Some(rad) = growth_radius {
                let gens = ctx
                    .generators
                    .clone()
                    .unwrap_or_else(|| (0..ctx.law.dim()).map(|i| basis(ctx.law.dim(), i)).collect());
                let ball = word_ball(&ctx.law, &gens, *rad, ctx.budgets.memory_cells)?;
                let from = (*rad / 3).max(1);
                let radii: Vec<f64> = (from..=*rad).map(|k| k as f64).collect();
                let vols: Vec<f64> = (from..=*rad).map(|k| ball.volumes[k as usize] as f64).collect();
                let slope = growth_exponent_fit(&radii, &vols)?;
                result["growth"] = json!({ "radii": radii, "volumes": vols, "slope": slope });
                if let Some(target) = growth_target {
                    passed &= (slope - target).abs() < 0.7;
                }
            }
            Ok(outcome("volume", passed, format!("relative error at the largest t < {max_rel_err}; growth slope within 0.7 of target"), result, vec![("volume.csv".into(), csv)]))
        }
    }
}

/// Runs every experiment, writes report.json and CSV files under the output dir.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunReport> {
    cfg.validate()?;
    let ctx = Context::new(cfg, opts)?;
    let mut outcomes = Vec::new();
    for e in &cfg.experiments {
        outcomes.push(run_experiment(&ctx, e)?);
    }
    let report = RunReport {
        group: ctx.law.name.clone(),
        dilation: ctx.dilation.exponents().iter().map(|b| b.to_string()).collect(),
        beta: ctx.dilation.beta().to_string(),
        seed: opts.seed.or(cfg.seed),
        experiments: outcomes,
    };
    let out = opts.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output));
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("report.json"), report.to_json_string())?;
    for (i, o) in report.experiments.iter().enumerate() {
        for (name, body) in &o.csv {
            std::fs::write(out.join(format!("{:02}_{name}", i + 1)), body)?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h3_cfg(extra: &str) -> String {
        format!(
            r#"{{
  "group": "h3_matrix",
  "measure": {{"components": [
    {{"kind": "cyclic", "generator": [1,0,0], "alpha": 1.0, "weight": 0.34}},
    {{"kind": "cyclic", "generator": [0,1,0], "alpha": 1.0, "weight": 0.33}},
    {{"kind": "cyclic", "generator": [0,0,1], "alpha": {extra}, "weight": 0.33}}]}},
  "dilation": "auto",
  "weights": {{"generators": [[1,0,0],[0,1,0]], "weights": ["1", "1"]}},
  "experiments": [{{"kind": "limit-law"}}, {{"kind": "gamma0"}}]
}}"#
        )
    }

    #[test]
    fn bad_alpha_names_the_field() {
        let err = ExperimentConfig::from_json_str(&h3_cfg("2.5")).unwrap_err().to_string();
        assert!(err.contains("measure.components[2].alpha"), "{err}");
    }

    #[test]
    fn stochastic_experiment_needs_seed() {
        let s = h3_cfg("1.0").replace(r#"{"kind": "gamma0"}"#, r#"{"kind": "walk", "steps": 10}"#);
        let err = ExperimentConfig::from_json_str(&s).unwrap_err().to_string();
        assert!(err.contains("seed"), "{err}");
    }

    #[test]
    fn exact_experiments_pass_and_round_trip() {
        let cfg = ExperimentConfig::from_json_str(&h3_cfg("1.0")).unwrap();
        let back = ExperimentConfig::from_json_str(&cfg.to_json_string()).unwrap();
        assert_eq!(cfg, back);
        let ctx = Context::new(&cfg, &RunOptions::default()).unwrap();
        for e in &cfg.experiments {
            let o = run_experiment(&ctx, e).unwrap();
            assert!(o.passed, "{} failed: {}", o.kind, o.result);
        }
        assert_eq!(ctx.dilation.trace().to_string(), "4");
    }
}
