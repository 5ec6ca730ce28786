//! Batch runs: several methods over repeated trials, with per-trial records
//! and per-method aggregates.

use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::analytic::{approx_single, bounds_single, indicators_single};
use crate::error::{Error, Result};
use crate::model::{Network, Path, PathPair};
use crate::optimize::{optimal_pair, optimal_path, SolveStatus};
use crate::oracle::{exact_pair_failure_with, exact_path_failure_with, OracleLimits};
use crate::routing::{approx_reliable_path, max_capacity_path, reliable_pair_heuristic};
use crate::sampler::{estimate_pair_failure, estimate_path_failure};
use crate::scenario::{gen_scenario, Scenario};

pub const THREADS_ENV: &str = "INTERDEP_ROUTE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Indicators,
    Sampling,
    Bounds,
    Oracle,
    BestPathApprox,
    BestPathMaxcap,
    BestPathIlp,
    BestPairHeuristic,
    BestPairIlp,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Indicators,
        Method::Sampling,
        Method::Bounds,
        Method::Oracle,
        Method::BestPathApprox,
        Method::BestPathMaxcap,
        Method::BestPathIlp,
        Method::BestPairHeuristic,
        Method::BestPairIlp,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Method::Indicators => "indicators",
            Method::Sampling => "sampling",
            Method::Bounds => "bounds",
            Method::Oracle => "oracle",
            Method::BestPathApprox => "best-path-approx",
            Method::BestPathMaxcap => "best-path-maxcap",
            Method::BestPathIlp => "best-path-ilp",
            Method::BestPairHeuristic => "best-pair-heuristic",
            Method::BestPairIlp => "best-pair-ilp",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.label() == text)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{text}`")))
    }
}

/// Where each trial's network comes from.
#[derive(Debug, Clone)]
pub enum Source {
    Fixed(Network),
    /// Regenerated per trial with a trial-specific seed.
    Generated(Scenario),
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub methods: Vec<Method>,
    pub trials: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub budget: u64,
    pub limits: OracleLimits,
    /// Path evaluated by indicators, sampling, bounds and oracle; defaults to
    /// the approximate most reliable path of each trial.
    pub path: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evaluation {
    Exact,
    Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub method: Method,
    /// Failure probability (exact or estimated) of the route the method
    /// produced or evaluated; the lower bound for `bounds`.
    pub value: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub evaluation: Option<Evaluation>,
    pub route: Option<String>,
    pub detail: Option<serde_json::Value>,
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub method: Method,
    pub count: usize,
    pub errors: usize,
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<Aggregate>,
}

/// Aggregates over the records' values, one per method in `methods` order.
pub fn aggregate(methods: &[Method], records: &[TrialRecord]) -> Vec<Aggregate> {
    methods
        .iter()
        .map(|&method| {
            let mine: Vec<&TrialRecord> = records.iter().filter(|r| r.method == method).collect();
            let values: Vec<f64> = mine.iter().filter_map(|r| r.value).collect();
            let count = values.len();
            Aggregate {
                method,
                count,
                errors: mine.iter().filter(|r| r.error.is_some()).count(),
                mean: (count > 0).then(|| values.iter().sum::<f64>() / count as f64),
                min: values.iter().copied().reduce(f64::min),
                max: values.iter().copied().reduce(f64::max),
            }
        })
        .collect()
}

/// Seed of trial `trial`, independent across trials.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    rng.next_u64()
}

/// Common supply failure probability, if all supplies share one.
pub fn uniform_probability(net: &Network) -> Option<f64> {
    let first = net.supplies().first()?.p_fail;
    net.supplies().iter().all(|s| s.p_fail == first).then_some(first)
}

/// Rayon pool honoring [`THREADS_ENV`].
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var(THREADS_ENV) {
        let n: usize = text
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got `{text}`")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))
}

struct Outcome {
    value: Option<f64>,
    lower: Option<f64>,
    upper: Option<f64>,
    evaluation: Option<Evaluation>,
    route: Option<String>,
    detail: Option<serde_json::Value>,
}

impl Outcome {
    fn valued(value: f64, evaluation: Evaluation, route: String) -> Self {
        Self {
            value: Some(value),
            lower: None,
            upper: None,
            evaluation: Some(evaluation),
            route: Some(route),
            detail: None,
        }
    }

    fn with_detail(mut self, detail: serde_json::Value) -> Self {
        self.detail = Some(detail);
        self
    }
}

fn pair_display(net: &Network, pair: &PathPair) -> String {
    format!("{} | {}", pair.first.display(net), pair.second.display(net))
}

struct Trial<'a> {
    net: &'a Network,
    spec: &'a ExperimentSpec,
    seed: u64,
}

impl Trial<'_> {
    /// Exact failure probability when within the oracle cap, else an
    /// importance-sampling estimate.
    fn path_value(&self, path: &Path) -> Result<(f64, Evaluation)> {
        match exact_path_failure_with(self.net, path, self.spec.limits) {
            Ok(r) => Ok((r.probability, Evaluation::Exact)),
            Err(Error::OracleTooLarge { .. }) => {
                let e = estimate_path_failure(self.net, path, self.spec.epsilon, self.spec.delta, self.seed)?;
                Ok((e.value, Evaluation::Estimate))
            }
            Err(e) => Err(e),
        }
    }

    fn pair_value(&self, pair: &PathPair) -> Result<(f64, Evaluation)> {
        match exact_pair_failure_with(self.net, pair, self.spec.limits) {
            Ok(r) => Ok((r.probability, Evaluation::Exact)),
            Err(Error::OracleTooLarge { .. }) => {
                let e = estimate_pair_failure(self.net, pair, self.spec.epsilon, self.spec.delta, self.seed)?;
                Ok((e.value, Evaluation::Estimate))
            }
            Err(e) => Err(e),
        }
    }

    fn reference_path(&self) -> Result<Path> {
        match &self.spec.path {
            Some(ids) => Path::from_ids(self.net, ids),
            None => Ok(approx_reliable_path(self.net)?.path),
        }
    }

    fn run(&self, method: Method) -> Result<Outcome> {
        let net = self.net;
        let spec = self.spec;
        match method {
            Method::Indicators => {
                let path = self.reference_path()?;
                let ind = indicators_single(net, &path)?;
                let mut out = Outcome {
                    value: None,
                    lower: None,
                    upper: None,
                    evaluation: None,
                    route: Some(path.display(net)),
                    detail: None,
                };
                let mut note = None;
                if let Some(p) = uniform_probability(net) {
                    out.value = Some(ind.m_bar as f64 * p.powi(ind.n_s_min as i32));
                    match approx_single(&ind, p, spec.epsilon, ind.interior_len, ind.uniform_supply_degree) {
                        Ok(iv) => {
                            out.lower = Some(iv.lo);
                            out.upper = Some(iv.hi);
                        }
                        Err(e) => note = Some(e.to_string()),
                    }
                } else {
                    note = Some("supply failure probabilities differ; no interval".to_string());
                }
                Ok(out.with_detail(json!({"n_s_min": ind.n_s_min, "m_bar": ind.m_bar, "note": note})))
            }
            Method::Sampling => {
                let path = self.reference_path()?;
                let e = estimate_path_failure(net, &path, spec.epsilon, spec.delta, self.seed)?;
                Ok(Outcome::valued(e.value, Evaluation::Estimate, path.display(net))
                    .with_detail(json!({"trials": e.trials_a, "successes": e.successes_b})))
            }
            Method::Bounds => {
                let path = self.reference_path()?;
                let b = bounds_single(net, &path);
                Ok(Outcome {
                    value: Some(b.lower),
                    lower: Some(b.lower),
                    upper: Some(b.upper),
                    evaluation: None,
                    route: Some(path.display(net)),
                    detail: Some(json!({"ratio_cap": b.ratio_cap})),
                })
            }
            Method::Oracle => {
                let path = self.reference_path()?;
                let r = exact_path_failure_with(net, &path, spec.limits)?;
                Ok(Outcome::valued(r.probability, Evaluation::Exact, path.display(net)))
            }
            Method::BestPathApprox => {
                let routed = approx_reliable_path(net)?;
                let (v, ev) = self.path_value(&routed.path)?;
                Ok(Outcome::valued(v, ev, routed.path.display(net))
                    .with_detail(json!({"surrogate_length": routed.surrogate_length})))
            }
            Method::BestPathMaxcap => {
                let (path, k) = max_capacity_path(net)?;
                let (v, ev) = self.path_value(&path)?;
                Ok(Outcome::valued(v, ev, path.display(net)).with_detail(json!({"capacity": k})))
            }
            Method::BestPathIlp => {
                let opt = optimal_path(net, spec.budget)?;
                let path = opt.path.ok_or(match opt.status {
                    SolveStatus::BudgetExceeded => Error::BudgetExceeded { budget: spec.budget },
                    _ => Error::Infeasible,
                })?;
                let (v, ev) = self.path_value(&path)?;
                Ok(Outcome::valued(v, ev, path.display(net))
                    .with_detail(json!({"k": opt.k, "m_bar": opt.m_bar, "status": opt.status})))
            }
            Method::BestPairHeuristic => {
                let routed = reliable_pair_heuristic(net)?;
                let (v, ev) = self.pair_value(&routed.pair)?;
                Ok(Outcome::valued(v, ev, pair_display(net, &routed.pair))
                    .with_detail(json!({"surrogate_length": routed.surrogate_length})))
            }
            Method::BestPairIlp => {
                let opt = optimal_pair(net, spec.budget)?;
                let pair = opt.pair.ok_or(match opt.status {
                    SolveStatus::BudgetExceeded => Error::BudgetExceeded { budget: spec.budget },
                    _ => Error::NoDisjointPair,
                })?;
                let (v, ev) = self.pair_value(&pair)?;
                Ok(Outcome::valued(v, ev, pair_display(net, &pair))
                    .with_detail(json!({"d": opt.d, "m_bar": opt.m_bar, "status": opt.status})))
            }
        }
    }
}

fn run_trial(source: &Source, spec: &ExperimentSpec, trial: usize) -> Vec<TrialRecord> {
    let seed = trial_seed(spec.seed, trial);
    let generated;
    let net = match source {
        Source::Fixed(net) => Ok(net),
        Source::Generated(sc) => {
            let mut sc = sc.clone();
            sc.seed = seed;
            generated = gen_scenario(&sc);
            generated.as_ref().map_err(|e| e.to_string())
        }
    };
    spec.methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let result = match &net {
                Ok(net) => Trial { net, spec, seed }.run(method).map_err(|e| e.to_string()),
                Err(e) => Err(format!("scenario: {e}")),
            };
            let runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            match result {
                Ok(o) => TrialRecord {
                    trial,
                    method,
                    value: o.value,
                    lower: o.lower,
                    upper: o.upper,
                    evaluation: o.evaluation,
                    route: o.route,
                    detail: o.detail,
                    error: None,
                    runtime_ms,
                },
                Err(error) => TrialRecord {
                    trial,
                    method,
                    value: None,
                    lower: None,
                    upper: None,
                    evaluation: None,
                    route: None,
                    detail: None,
                    error: Some(error),
                    runtime_ms,
                },
            }
        })
        .collect()
}

/// Runs every method on every trial. Trials run in parallel; records come
/// back in (trial, method) order. Method failures are recorded, not raised.
pub fn run_experiment(source: &Source, spec: &ExperimentSpec) -> Result<ExperimentReport> {
    if spec.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if spec.methods.is_empty() {
        return Err(Error::InvalidParameter("no methods requested".into()));
    }
    let pool = worker_pool()?;
    let per_trial: Vec<Vec<TrialRecord>> = pool.install(|| {
        (0..spec.trials)
            .into_par_iter()
            .map(|trial| run_trial(source, spec, trial))
            .collect()
    });
    let records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
    Ok(ExperimentReport {
        seed: spec.seed,
        trials: spec.trials,
        methods: spec.methods.clone(),
        aggregates: aggregate(&spec.methods, &records),
        records,
    })
}

impl ExperimentReport {
    /// Pretty JSON. Runtimes are wall-clock and vary between runs, so they
    /// are included only on request.
    pub fn to_json(&self, timings: bool) -> Result<String> {
        let mut report = self.clone();
        if !timings {
            for r in &mut report.records {
                r.runtime_ms = None;
            }
        }
        Ok(serde_json::to_string_pretty(&report)? + "\n")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(["trial", "method", "value", "lower", "upper", "evaluation", "route", "error", "runtime_ms"])
            .map_err(io)?;
        let num = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.trial.to_string(),
                r.method.label().to_string(),
                num(r.value),
                num(r.lower),
                num(r.upper),
                r.evaluation
                    .map(|e| match e {
                        Evaluation::Exact => "exact",
                        Evaluation::Estimate => "estimate",
                    })
                    .unwrap_or_default()
                    .to_string(),
                r.route.clone().unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
                r.runtime_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}
