//! Command-line front end.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analytic::{approx_pair, approx_single, bounds_single, indicators_pair, indicators_single};
use crate::error::{Error, Result};
use crate::experiment::{run_experiment, uniform_probability, ExperimentSpec, Method, Source};
use crate::model::{validate_network, Network, NetworkDoc, Path, PathPair};
use crate::optimize::{
    build_max_d, build_min_mbar, build_min_weighted, export_lp, optimal_pair, optimal_path, SolveStatus, DEFAULT_BUDGET,
};
use crate::oracle::{
    exact_best_pair_with, exact_best_path_with, exact_pair_failure_with, exact_path_failure_with, OracleLimits,
    DEFAULT_PATH_BUDGET, DEFAULT_SUPPLY_CAP,
};
use crate::routing::{approx_reliable_path, max_capacity_path, reliable_pair_heuristic};
use crate::sampler::{estimate_pair_failure, estimate_path_failure, naive_monte_carlo, Estimate, Target};
use crate::scenario::{gen_scenario_doc, AssignmentRule, BoundingBox, PFailRule, Scenario, Topology, DEFAULT_BBOX};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "interdep-route", version, about = "Reliability and routing in interdependent networks")]
pub struct Cli {
    /// Print a JSON report instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a network file and report every violation.
    Validate { network: PathBuf },
    /// Generate a network from a topology and random supplies.
    GenScenario {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Failure probability of one path.
    EvalPath {
        network: PathBuf,
        /// Comma-separated node ids.
        #[arg(long)]
        path: String,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Probability that both paths of a pair fail.
    EvalPair {
        network: PathBuf,
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
        /// Accept pairs sharing interior nodes.
        #[arg(long)]
        allow_shared: bool,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Reliability indicators and, for uniform p, the small-p interval.
    Indicators {
        network: PathBuf,
        #[arg(long, required_unless_present = "pair")]
        path: Option<String>,
        /// Two disjoint paths: report pair indicators instead.
        #[arg(long, num_args = 2, value_names = ["FIRST", "SECOND"], conflicts_with = "path")]
        pair: Option<Vec<String>>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Lower and upper bounds on path failure probability.
    Bounds {
        network: PathBuf,
        #[arg(long)]
        path: String,
    },
    /// Compute a reliable path.
    BestPath {
        network: PathBuf,
        #[arg(long, value_enum, default_value_t = PathMethod::Approx)]
        method: PathMethod,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Compute a reliable node-disjoint pair.
    BestPair {
        network: PathBuf,
        #[arg(long, value_enum, default_value_t = PairMethod::Heuristic)]
        method: PairMethod,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Exhaustive evaluation or search (small instances).
    Oracle {
        network: PathBuf,
        #[arg(long, conflicts_with_all = ["first", "best_path", "best_pair"])]
        path: Option<String>,
        #[arg(long, requires = "second")]
        first: Option<String>,
        #[arg(long, requires = "first")]
        second: Option<String>,
        /// Most reliable path by enumeration.
        #[arg(long)]
        best_path: bool,
        /// Most reliable node-disjoint pair by enumeration.
        #[arg(long)]
        best_pair: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Write an integer program in LP format.
    ExportLp {
        network: PathBuf,
        #[arg(long, value_enum)]
        model: LpModel,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run several methods over repeated trials.
    Experiment {
        /// Fixed network; without it every trial generates a scenario.
        network: Option<PathBuf>,
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Comma-separated methods.
        #[arg(long, default_value = "indicators,sampling,bounds")]
        methods: String,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        limits: LimitArgs,
        /// Path for indicators, sampling, bounds and oracle (default: the
        /// approximate most reliable path).
        #[arg(long)]
        path: Option<String>,
        /// Also write per-trial records as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Include wall-clock runtimes in the JSON report.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_enum, default_value_t = EvalMethod::Sampling)]
    method: EvalMethod,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Trials for naive Monte Carlo.
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Args, Debug)]
struct LimitArgs {
    /// Most supply nodes the oracle enumerates.
    #[arg(long, default_value_t = DEFAULT_SUPPLY_CAP)]
    cap: usize,
    /// Most paths or pairs the oracle enumerates.
    #[arg(long, default_value_t = DEFAULT_PATH_BUDGET)]
    path_budget: usize,
}

impl LimitArgs {
    fn limits(&self) -> OracleLimits {
        OracleLimits {
            supply_cap: self.cap,
            path_budget: self.path_budget,
        }
    }
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// Demand topology file (its supplies are replaced).
    #[arg(long)]
    topology: Option<PathBuf>,
    /// Nodes of a generated geometric topology.
    #[arg(long, default_value_t = 60)]
    nodes: usize,
    /// Connection radius of a generated geometric topology.
    #[arg(long, default_value_t = 4.5)]
    radius: f64,
    #[arg(long, default_value_t = 36)]
    supplies: usize,
    /// `nearest:K`, `random:K` or `range:LO-HI`.
    #[arg(long, default_value = "nearest:2")]
    assign: String,
    /// Constant supply failure probability.
    #[arg(long, conflicts_with = "p_range")]
    p: Option<f64>,
    /// Uniform supply failure probability `LO,HI`.
    #[arg(long)]
    p_range: Option<String>,
    /// Supply placement box `XMIN,YMIN,XMAX,YMAX`.
    #[arg(long)]
    bbox: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EvalMethod {
    /// Importance sampling with an (epsilon, delta) guarantee.
    Sampling,
    /// Plain Monte Carlo over `--trials` draws.
    Naive,
    /// Exhaustive enumeration.
    Oracle,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PathMethod {
    Approx,
    Maxcap,
    Ilp,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PairMethod {
    Heuristic,
    Ilp,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LpModel {
    MinMbar,
    MaxD,
    MinWeighted,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn parse_floats(text: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage(format!("{what}: expected {n} comma-separated numbers, got `{text}`")))?;
    if values.len() != n {
        return Err(usage(format!("{what}: expected {n} comma-separated numbers, got `{text}`")));
    }
    Ok(values)
}

fn parse_assignment(text: &str) -> Result<AssignmentRule> {
    let bad = || usage(format!("--assign: expected nearest:K, random:K or range:LO-HI, got `{text}`"));
    let (kind, arg) = text.split_once(':').ok_or_else(bad)?;
    let int = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    match kind {
        "nearest" => Ok(AssignmentRule::NearestK(int(arg)?)),
        "random" => Ok(AssignmentRule::UniformRandomK(int(arg)?)),
        "range" => {
            let (lo, hi) = arg.split_once('-').ok_or_else(bad)?;
            Ok(AssignmentRule::RandomKInRange {
                lo: int(lo)?,
                hi: int(hi)?,
            })
        }
        _ => Err(bad()),
    }
}

impl ScenarioArgs {
    fn scenario(&self, seed: u64) -> Result<Scenario> {
        let topology = match &self.topology {
            Some(file) => Topology::Given(read_doc(file)?),
            None => Topology::Geometric {
                nodes: self.nodes,
                radius: self.radius,
            },
        };
        let p_fail = match (&self.p, &self.p_range) {
            (_, Some(range)) => {
                let v = parse_floats(range, 2, "--p-range")?;
                PFailRule::Uniform { lo: v[0], hi: v[1] }
            }
            (Some(p), None) => PFailRule::Constant(*p),
            (None, None) => PFailRule::Constant(0.01),
        };
        let bbox = match &self.bbox {
            Some(text) => {
                let v = parse_floats(text, 4, "--bbox")?;
                BoundingBox {
                    x_min: v[0],
                    y_min: v[1],
                    x_max: v[2],
                    y_max: v[3],
                }
            }
            None => DEFAULT_BBOX,
        };
        Ok(Scenario {
            topology,
            supply_count: self.supplies,
            assignment: parse_assignment(&self.assign)?,
            p_fail,
            bbox,
            seed,
        })
    }
}

fn read_doc(file: &PathBuf) -> Result<NetworkDoc> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", file.display()))))?;
    NetworkDoc::from_json(&text)
}

fn read_network(file: &PathBuf) -> Result<Network> {
    Network::from_doc(&read_doc(file)?)
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(file) => std::fs::write(file, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

/// Report printed either as JSON or as aligned `key  value` lines.
struct Report {
    json: Value,
    lines: Vec<(String, String)>,
}

impl Report {
    fn new(json: Value) -> Self {
        Self {
            json,
            lines: Vec::new(),
        }
    }

    fn line(mut self, key: &str, value: impl Into<String>) -> Self {
        self.lines.push((key.into(), value.into()));
        self
    }

    fn print(&self, as_json: bool) -> Result<()> {
        if as_json {
            println!("{}", serde_json::to_string_pretty(&self.json)?);
        } else {
            let width = self.lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in &self.lines {
                println!("{k:<width$}  {v}");
            }
        }
        Ok(())
    }
}

fn estimate_report(est: &Estimate, route: Value) -> Report {
    let mut r = Report::new(json!({"route": route, "estimate": est}))
        .line("method", format!("{:?}", est.method))
        .line("failure probability", sci(est.value))
        .line("trials", est.trials_a.to_string())
        .line("successes", est.successes_b.to_string());
    if let (Some(e), Some(d)) = (est.epsilon, est.delta) {
        r = r.line("guarantee", format!("within 1 ± {e} with probability {}", 1.0 - d));
    }
    r
}

fn path_json(net: &Network, path: &Path) -> Value {
    json!(path.ids(net))
}

fn pair_json(net: &Network, pair: &PathPair) -> Value {
    json!({"first": pair.first.ids(net), "second": pair.second.ids(net)})
}

fn status_error(status: SolveStatus, budget: u64) -> Option<Error> {
    match status {
        SolveStatus::Optimal => None,
        SolveStatus::Infeasible => Some(Error::Infeasible),
        SolveStatus::BudgetExceeded => Some(Error::BudgetExceeded { budget }),
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let seed = cli.seed;
    let as_json = cli.json;
    match cli.command {
        Command::Validate { network } => {
            let doc = read_doc(&network)?;
            let violations = validate_network(&doc);
            let report = Report::new(json!({
                "valid": violations.is_empty(),
                "violations": violations,
                "demand_nodes": doc.demand_nodes.len(),
                "supply_nodes": doc.supply_nodes.len(),
                "edges": doc.edges.len(),
            }));
            let mut report = report.line(
                "status",
                if violations.is_empty() { "valid" } else { "invalid" },
            );
            for v in &violations {
                report = report.line(&v.element, v.message.clone());
            }
            report.print(as_json)?;
            return Ok(if violations.is_empty() { EXIT_OK } else { EXIT_USAGE });
        }
        Command::GenScenario { scenario, out } => {
            let doc = gen_scenario_doc(&scenario.scenario(seed)?)?;
            Network::from_doc(&doc)?;
            write_output(&out, &doc.to_json()?)?;
        }
        Command::EvalPath { network, path, eval } => {
            let net = read_network(&network)?;
            let path = Path::parse(&net, &path)?;
            let route = path_json(&net, &path);
            let report = match eval.method {
                EvalMethod::Sampling => {
                    estimate_report(&estimate_path_failure(&net, &path, eval.epsilon, eval.delta, seed)?, route)
                }
                EvalMethod::Naive => {
                    estimate_report(&naive_monte_carlo(&net, Target::Path(&path), eval.trials, seed)?, route)
                }
                EvalMethod::Oracle => {
                    let r = exact_path_failure_with(&net, &path, eval.limits.limits())?;
                    Report::new(json!({"route": route, "exact": r}))
                        .line("method", "oracle")
                        .line("failure probability", sci(r.probability))
                        .line("supplies enumerated", r.enumerated_supply_count.to_string())
                }
            };
            report.print(as_json)?;
        }
        Command::EvalPair {
            network,
            first,
            second,
            allow_shared,
            eval,
        } => {
            let net = read_network(&network)?;
            let pair = PathPair::new(&net, Path::parse(&net, &first)?, Path::parse(&net, &second)?, !allow_shared)?;
            let route = pair_json(&net, &pair);
            let report = match eval.method {
                EvalMethod::Sampling => {
                    estimate_report(&estimate_pair_failure(&net, &pair, eval.epsilon, eval.delta, seed)?, route)
                }
                EvalMethod::Naive => {
                    estimate_report(&naive_monte_carlo(&net, Target::Pair(&pair), eval.trials, seed)?, route)
                }
                EvalMethod::Oracle => {
                    let r = exact_pair_failure_with(&net, &pair, eval.limits.limits())?;
                    Report::new(json!({"route": route, "exact": r}))
                        .line("method", "oracle")
                        .line("failure probability", sci(r.probability))
                        .line("supplies enumerated", r.enumerated_supply_count.to_string())
                }
            };
            report.print(as_json)?;
        }
        Command::Indicators {
            network,
            path,
            pair,
            epsilon,
        } => {
            let net = read_network(&network)?;
            let p = uniform_probability(&net);
            let report = match (path, pair) {
                (Some(path), _) => {
                    let first = Path::parse(&net, &path)?;
                    let ind = indicators_single(&net, &first)?;
                    let interval = p.map(|p| approx_single(&ind, p, epsilon, ind.interior_len, ind.uniform_supply_degree));
                    let mut r = Report::new(json!({
                        "route": path_json(&net, &first),
                        "indicators": ind,
                        "uniform_p": p,
                        "interval": interval.as_ref().and_then(|i| i.as_ref().ok()),
                        "note": interval.as_ref().and_then(|i| i.as_ref().err()).map(|e| e.to_string()),
                    }))
                    .line("n_s_min", ind.n_s_min.to_string())
                    .line("m_bar", ind.m_bar.to_string());
                    r = match interval {
                        Some(Ok(i)) => r.line("interval", format!("[{}, {}]", sci(i.lo), sci(i.hi))),
                        Some(Err(e)) => r.line("interval", e.to_string()),
                        None => r.line("interval", "needs a uniform supply failure probability"),
                    };
                    r
                }
                (None, pair) => {
                    let pair = pair.unwrap_or_default();
                    let pair = PathPair::new(&net, Path::parse(&net, &pair[0])?, Path::parse(&net, &pair[1])?, true)?;
                    let ind = indicators_pair(&net, &pair)?;
                    let (m1, m2) = (pair.first.interior(&net).len(), pair.second.interior(&net).len());
                    let interval = p.map(|p| approx_pair(&ind, p, epsilon, m1, m2));
                    let mut r = Report::new(json!({
                        "route": pair_json(&net, &pair),
                        "indicators": ind,
                        "uniform_p": p,
                        "interval": interval.as_ref().and_then(|i| i.as_ref().ok()),
                        "note": interval.as_ref().and_then(|i| i.as_ref().err()).map(|e| e.to_string()),
                    }))
                    .line("d", ind.d.to_string())
                    .line("m_bar", ind.m_bar.to_string());
                    r = match interval {
                        Some(Ok(i)) => r.line("interval", format!("[{}, {}]", sci(i.lo), sci(i.hi))),
                        Some(Err(e)) => r.line("interval", e.to_string()),
                        None => r.line("interval", "needs a uniform supply failure probability"),
                    };
                    r
                }
            };
            report.print(as_json)?;
        }
        Command::Bounds { network, path } => {
            let net = read_network(&network)?;
            let path = Path::parse(&net, &path)?;
            let b = bounds_single(&net, &path);
            Report::new(json!({"route": path_json(&net, &path), "bounds": b}))
                .line("lower", sci(b.lower))
                .line("upper", sci(b.upper))
                .line("ratio cap", format!("{}", b.ratio_cap))
                .print(as_json)?;
        }
        Command::BestPath { network, method, budget } => {
            let net = read_network(&network)?;
            let report = match method {
                PathMethod::Approx => {
                    let r = approx_reliable_path(&net)?;
                    let mut rep = Report::new(json!({
                        "method": "approx",
                        "route": path_json(&net, &r.path),
                        "surrogate_length": r.surrogate_length,
                        "certain_failure": r.certain_failure,
                    }))
                    .line("path", r.path.display(&net))
                    .line("surrogate length", format!("{}", r.surrogate_length));
                    if r.certain_failure {
                        rep = rep.line("note", "failure probability 1");
                    }
                    rep
                }
                PathMethod::Maxcap => {
                    let (path, k) = max_capacity_path(&net)?;
                    Report::new(json!({"method": "maxcap", "route": path_json(&net, &path), "capacity": k}))
                        .line("path", path.display(&net))
                        .line("capacity", k.map_or("no interior".into(), |k| k.to_string()))
                }
                PathMethod::Ilp => {
                    let opt = optimal_path(&net, budget)?;
                    let Some(path) = &opt.path else {
                        return Err(status_error(opt.status, budget).unwrap_or(Error::Infeasible));
                    };
                    let rep = Report::new(json!({"method": "ilp", "route": path_json(&net, path), "solution": opt}))
                        .line("path", path.display(&net))
                        .line("k", opt.k.map_or("no interior".into(), |k| k.to_string()))
                        .line("m_bar", opt.m_bar.map(|m| m.to_string()).unwrap_or_default())
                        .line("status", format!("{:?}", opt.status));
                    rep.print(as_json)?;
                    return Ok(status_error(opt.status, budget).map_or(EXIT_OK, |e| exit_code(&e)));
                }
            };
            report.print(as_json)?;
        }
        Command::BestPair { network, method, budget } => {
            let net = read_network(&network)?;
            match method {
                PairMethod::Heuristic => {
                    let r = reliable_pair_heuristic(&net)?;
                    Report::new(json!({
                        "method": "heuristic",
                        "route": pair_json(&net, &r.pair),
                        "surrogate_length": r.surrogate_length,
                    }))
                    .line("first", r.pair.first.display(&net))
                    .line("second", r.pair.second.display(&net))
                    .line("surrogate length", format!("{}", r.surrogate_length))
                    .print(as_json)?;
                }
                PairMethod::Ilp => {
                    let opt = optimal_pair(&net, budget)?;
                    let Some(pair) = &opt.pair else {
                        return Err(status_error(opt.status, budget).unwrap_or(Error::NoDisjointPair));
                    };
                    Report::new(json!({"method": "ilp", "route": pair_json(&net, pair), "solution": opt}))
                        .line("first", pair.first.display(&net))
                        .line("second", pair.second.display(&net))
                        .line("d", opt.d.map(|d| d.to_string()).unwrap_or_default())
                        .line("m_bar", opt.m_bar.map(|m| m.to_string()).unwrap_or_default())
                        .line("status", format!("{:?}", opt.status))
                        .print(as_json)?;
                    return Ok(status_error(opt.status, budget).map_or(EXIT_OK, |e| exit_code(&e)));
                }
            }
        }
        Command::Oracle {
            network,
            path,
            first,
            second,
            best_path,
            best_pair,
            limits,
        } => {
            let net = read_network(&network)?;
            let limits = limits.limits();
            let (route, result) = if let Some(path) = path {
                let path = Path::parse(&net, &path)?;
                (path_json(&net, &path), exact_path_failure_with(&net, &path, limits)?)
            } else if let (Some(a), Some(b)) = (first, second) {
                let pair = PathPair::new(&net, Path::parse(&net, &a)?, Path::parse(&net, &b)?, true)?;
                (pair_json(&net, &pair), exact_pair_failure_with(&net, &pair, limits)?)
            } else if best_path {
                let (path, r) = exact_best_path_with(&net, limits)?;
                (path_json(&net, &path), r)
            } else if best_pair {
                let (pair, r) = exact_best_pair_with(&net, true, limits)?;
                (pair_json(&net, &pair), r)
            } else {
                return Err(usage("oracle needs --path, --first/--second, --best-path or --best-pair"));
            };
            let shown = match &route {
                Value::Array(_) => route.as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect::<Vec<_>>().join(","),
                other => other.to_string(),
            };
            Report::new(json!({"route": route, "exact": result}))
                .line("route", shown)
                .line("failure probability", sci(result.probability))
                .line("supplies enumerated", result.enumerated_supply_count.to_string())
                .print(as_json)?;
        }
        Command::ExportLp { network, model, out } => {
            let net = read_network(&network)?;
            let model = match model {
                LpModel::MinMbar => build_min_mbar(&net)?,
                LpModel::MaxD => build_max_d(&net)?,
                LpModel::MinWeighted => build_min_weighted(&net)?,
            };
            write_output(&out, &export_lp(&model))?;
        }
        Command::Experiment {
            network,
            scenario,
            methods,
            trials,
            epsilon,
            delta,
            budget,
            limits,
            path,
            csv,
            timings,
        } => {
            let source = match network {
                Some(file) => Source::Fixed(read_network(&file)?),
                None => Source::Generated(scenario.scenario(seed)?),
            };
            let methods = methods
                .split(',')
                .map(|m| Method::parse(m.trim()))
                .collect::<Result<Vec<_>>>()?;
            let spec = ExperimentSpec {
                methods,
                trials,
                seed,
                epsilon,
                delta,
                budget,
                limits: limits.limits(),
                path: path.map(|p| p.split(',').map(|s| s.trim().to_string()).collect()),
            };
            let report = run_experiment(&source, &spec)?;
            if let Some(file) = csv {
                std::fs::write(file, report.to_csv()?)?;
            }
            if as_json {
                print!("{}", report.to_json(timings)?);
            } else {
                print_experiment_table(&report);
            }
        }
    }
    Ok(EXIT_OK)
}

fn print_experiment_table(report: &crate::experiment::ExperimentReport) {
    let opt = |x: Option<f64>| x.map(sci).unwrap_or_else(|| "-".into());
    println!(
        "{:>5}  {:<20}  {:>13}  {:>13}  {:>13}  {:>10}  route / error",
        "trial", "method", "value", "lower", "upper", "ms"
    );
    for r in &report.records {
        println!(
            "{:>5}  {:<20}  {:>13}  {:>13}  {:>13}  {:>10.2}  {}",
            r.trial,
            r.method.label(),
            opt(r.value),
            opt(r.lower),
            opt(r.upper),
            r.runtime_ms.unwrap_or(0.0),
            r.error.as_deref().or(r.route.as_deref()).unwrap_or("")
        );
    }
    println!();
    println!(
        "{:<20}  {:>5}  {:>6}  {:>13}  {:>13}  {:>13}",
        "method", "count", "errors", "mean", "min", "max"
    );
    for a in &report.aggregates {
        println!(
            "{:<20}  {:>5}  {:>6}  {:>13}  {:>13}  {:>13}",
            a.method.label(),
            a.count,
            a.errors,
            opt(a.mean),
            opt(a.min),
            opt(a.max)
        );
    }
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Disconnected | Error::NoDisjointPair | Error::Infeasible => EXIT_INFEASIBLE,
        Error::BudgetExceeded { .. } | Error::PathBudgetExceeded { .. } | Error::OracleTooLarge { .. } => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
