//! Command-line driver for `ecgraph-core`: parses a [`RunConfig`], runs one
//! command and renders a [`Report`] as JSON or indented text.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ecgraph_core::ec_check::{self, brute_force_cost, sufficient_certificate, sufficient_condition_margin};
use ecgraph_core::pseudorandom::{
    best_pr_trend, cheeger_spectral_lower, mixing_scan, quasirandom_stats, TrendVerdict,
};
use ecgraph_core::spectrum::{character_sum_spectrum, closed_form_spectrum, numerical_spectrum, NUMERICAL_CAP};
use ecgraph_core::{build_graph, BruteForceOptions, CayleyGraph, Error, GraphParams};
use serde::Serialize;
use serde_json::{json, Value};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const THREADS_ENV: &str = "ECGRAPH_THREADS";

/// Largest n for which `spectrum` runs the character-sum oracle by default.
const CHARACTER_ORACLE_CAP: u64 = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Construct,
    Spectrum,
    CheckEc,
    Mixing,
    Trend,
    FindQ1,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Construct => "construct",
            Command::Spectrum => "spectrum",
            Command::CheckEc => "check-ec",
            Command::Mixing => "mixing",
            Command::Trend => "trend",
            Command::FindQ1 => "find-q1",
            Command::Report => "report",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum EcMethod {
    #[default]
    Exhaustive,
    Sufficient,
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub q: Option<u64>,
    pub e: Option<u32>,
    pub t: Option<u32>,
    pub qs: Vec<u64>,
    pub samples: usize,
    pub seed: u64,
    pub budget: f64,
    pub force: bool,
    pub threads: Option<usize>,
    pub method: EcMethod,
    pub numerical: bool,
    pub edges_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            q: None,
            e: None,
            t: None,
            qs: Vec::new(),
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            budget: ec_check::DEFAULT_BUDGET,
            force: false,
            threads: None,
            method: EcMethod::default(),
            numerical: false,
            edges_path: None,
            output_path: None,
            format: Format::default(),
        }
    }

    pub fn with_params(mut self, q: u64, e: u32) -> Self {
        self.q = Some(q);
        self.e = Some(e);
        self
    }

    pub fn with_t(mut self, t: u32) -> Self {
        self.t = Some(t);
        self
    }
}

#[derive(Debug, Parser)]
#[command(name = "ecgraph", version, about = "Quadratic unitary Cayley graphs: t-e.c. checks, spectra, pseudo-randomness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 1)]
    pub e: u32,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Build G_{q^e} and report its basic invariants.
    Construct {
        #[command(flatten)]
        graph: GraphArgs,
        /// Also write the edge list to this path.
        #[arg(long)]
        edges: Option<PathBuf>,
    },
    /// Closed-form spectrum with multiplicities.
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
        /// Cross-check against a dense eigensolver (n <= 3000).
        #[arg(long)]
        numerical: bool,
    },
    /// Certify or refute the t-e.c. property.
    CheckEc {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        t: u32,
        #[arg(long, value_enum, default_value_t = EcMethod::Exhaustive)]
        method: EcMethod,
        /// Word-operation budget for the exhaustive search.
        #[arg(long, default_value_t = ec_check::DEFAULT_BUDGET)]
        budget: f64,
        /// Run even when the cost estimate exceeds the budget.
        #[arg(long)]
        force: bool,
    },
    /// Sampled expander-mixing deviations.
    Mixing {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// lambda / sqrt(d) across several primes at a fixed e.
    Trend {
        #[arg(long, default_value_t = 3)]
        e: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        qs: Vec<u64>,
    },
    /// Least Pythagorean prime satisfying the sufficient condition.
    FindQ1 {
        #[arg(long)]
        t: u32,
        #[arg(long, default_value_t = 3)]
        e: u32,
    },
    /// Summary of construction, spectrum, sufficient condition and mixing.
    Report {
        #[command(flatten)]
        graph: GraphArgs,
        /// Also run the exhaustive check at this t.
        #[arg(long)]
        t: Option<u32>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = ec_check::DEFAULT_BUDGET)]
        budget: f64,
    },
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let mut cfg = match cli.command {
            CliCommand::Construct { graph, edges } => {
                let mut c = RunConfig::new(Command::Construct).with_params(graph.q, graph.e);
                c.edges_path = edges;
                c
            }
            CliCommand::Spectrum { graph, numerical } => {
                let mut c = RunConfig::new(Command::Spectrum).with_params(graph.q, graph.e);
                c.numerical = numerical;
                c
            }
            CliCommand::CheckEc {
                graph,
                t,
                method,
                budget,
                force,
            } => {
                let mut c = RunConfig::new(Command::CheckEc).with_params(graph.q, graph.e).with_t(t);
                c.method = method;
                c.budget = budget;
                c.force = force;
                c
            }
            CliCommand::Mixing { graph, samples } => {
                let mut c = RunConfig::new(Command::Mixing).with_params(graph.q, graph.e);
                c.samples = samples;
                c
            }
            CliCommand::Trend { e, qs } => {
                let mut c = RunConfig::new(Command::Trend);
                c.e = Some(e);
                c.qs = qs;
                c
            }
            CliCommand::FindQ1 { t, e } => {
                let mut c = RunConfig::new(Command::FindQ1).with_t(t);
                c.e = Some(e);
                c
            }
            CliCommand::Report {
                graph,
                t,
                samples,
                budget,
            } => {
                let mut c = RunConfig::new(Command::Report).with_params(graph.q, graph.e);
                c.t = t;
                c.samples = samples;
                c.budget = budget;
                c
            }
        };
        cfg.seed = cli.common.seed;
        cfg.format = cli.common.format;
        cfg.output_path = cli.common.output;
        cfg.threads = cli.common.threads;
        cfg
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ecgraph_core::Error),
    #[error("missing required parameter --{0} for this command")]
    Missing(&'static str),
    #[error("--threads must be at least 1, got {0}")]
    BadThreads(usize),
    #[error("could not start thread pool: {0}")]
    Pool(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 3 for budget or size-cap refusals, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(ecgraph_core::Error::BudgetExceeded { .. })
            | CliError::Core(ecgraph_core::Error::CapExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamsView {
    pub q: u64,
    pub e: u32,
    pub n: u64,
    pub degree: u64,
}

impl From<&GraphParams> for ParamsView {
    fn from(p: &GraphParams) -> Self {
        ParamsView {
            q: p.q(),
            e: p.e(),
            n: p.n(),
            degree: p.degree(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            ok,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub params: Option<ParamsView>,
    pub command: String,
    pub seed: u64,
    pub result: Value,
    pub checks: Vec<Check>,
}

/// A finished command: the report and the process exit code.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

fn params_of(cfg: &RunConfig) -> Result<GraphParams, CliError> {
    let q = cfg.q.ok_or(CliError::Missing("q"))?;
    let e = cfg.e.ok_or(CliError::Missing("e"))?;
    Ok(GraphParams::new(q, e)?)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// Runs the configured command, inside a dedicated pool when `threads` is set.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.threads {
        Some(0) => Err(CliError::BadThreads(0)),
        Some(threads) => rayon_pool(threads)?.install(|| dispatch(cfg)),
        None => dispatch(cfg),
    }
}

fn rayon_pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))
}

fn dispatch(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Construct => construct(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::CheckEc => check_ec(cfg),
        Command::Mixing => mixing(cfg),
        Command::Trend => trend(cfg),
        Command::FindQ1 => find_q1(cfg),
        Command::Report => full_report(cfg),
    }
}

fn outcome(cfg: &RunConfig, params: Option<&GraphParams>, result: Value, checks: Vec<Check>, exit_code: i32) -> Outcome {
    Outcome {
        report: Report {
            params: params.map(ParamsView::from),
            command: cfg.command.name().to_string(),
            seed: cfg.seed,
            result,
            checks,
        },
        exit_code,
    }
}

fn structure_checks(g: &CayleyGraph) -> Vec<Check> {
    let n = g.n();
    let regular = (0..n).all(|x| g.row(x).count_ones() as u64 == g.degree());
    let symmetric = (0..n).all(|x| !g.row(x).contains(x) && g.neighbors(x).all(|y| g.row(y).contains(x)));
    let t = g.connection_set();
    let negation_closed = t.iter().all(|&s| t.binary_search(&(n as u64 - s)).is_ok());
    vec![
        Check::new("regular", regular, format!("every row has popcount {}", g.degree())),
        Check::new("symmetric_loopless", symmetric, "adjacency symmetric with zero diagonal"),
        Check::new("connection_set_symmetric", negation_closed, "T = -T"),
    ]
}

fn construct(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = params_of(cfg)?;
    let g = build_graph(params)?;
    let mut result = json!({
        "n": params.n(),
        "degree": g.degree(),
        "edge_count": g.edge_count(),
        "connection_set": g.connection_set(),
    });
    if let Some(path) = &cfg.edges_path {
        g.export_edge_list(path)?;
        result["edge_list"] = json!(path.display().to_string());
    }
    let checks = structure_checks(&g);
    let code = if checks.iter().all(|c| c.ok) { 0 } else { 1 };
    Ok(outcome(cfg, Some(&params), result, checks, code))
}

fn spectrum_value(params: &GraphParams) -> Value {
    let s = closed_form_spectrum(params);
    let q = params.q();
    let eigenvalues: Vec<Value> = s
        .eigenvalues
        .iter()
        .map(|ev| {
            json!({
                "a_coeff": ev.a_coeff,
                "b_coeff": ev.b_coeff,
                "mult": ev.multiplicity,
                "value": ev.value(q),
            })
        })
        .collect();
    json!({
        "eigenvalues": eigenvalues,
        "lambda": s.lambda,
        "lambda2": s.lambda2(),
        "cheeger_lower": cheeger_spectral_lower(&s),
    })
}

fn spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = params_of(cfg)?;
    let s = closed_form_spectrum(&params);
    let mut checks = vec![
        Check::new("trace_zero", s.trace_exact() == (0, 0), "sum mult * lambda = 0, exact"),
        Check::new(
            "second_moment",
            s.second_moment_exact() == (4 * params.n() as i128 * params.degree() as i128, 0),
            "sum mult * lambda^2 = n d, exact",
        ),
    ];
    let expanded = s.expanded();
    if params.n() <= CHARACTER_ORACLE_CAP {
        let mut sums: Vec<f64> = character_sum_spectrum(&params).iter().map(|z| z.re).collect();
        sums.sort_by(|a, b| b.total_cmp(a));
        let worst = max_gap(&expanded, &sums);
        checks.push(Check::new("character_sum_oracle", worst < 1e-8, format!("max deviation {}", sig12(worst))));
    }
    if cfg.numerical {
        let numeric = numerical_spectrum(&build_graph(params)?, NUMERICAL_CAP)?;
        let worst = max_gap(&expanded, &numeric);
        checks.push(Check::new("numerical_oracle", worst < 1e-8, format!("max deviation {}", sig12(worst))));
    }
    let code = if checks.iter().all(|c| c.ok) { 0 } else { 1 };
    Ok(outcome(cfg, Some(&params), spectrum_value(&params), checks, code))
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn check_ec(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = params_of(cfg)?;
    let t = cfg.t.ok_or(CliError::Missing("t"))?;
    let sufficient = ec_check::sufficient_condition(&params, t);
    let margin = sufficient_condition_margin(&params, t);
    match cfg.method {
        EcMethod::Sufficient => {
            let cert = sufficient_certificate(&params, t);
            let mut result = to_value(&cert);
            result["margin"] = json!(margin);
            let checks = vec![Check::new(
                "sufficient_condition",
                sufficient,
                format!("inequality margin {}", sig12(margin)),
            )];
            Ok(outcome(cfg, Some(&params), result, checks, 0))
        }
        EcMethod::Exhaustive => {
            let cost = brute_force_cost(params.n(), t);
            if cost > cfg.budget && !cfg.force {
                return Err(Error::BudgetExceeded { cost, budget: cfg.budget }.into());
            }
            let g = build_graph(params)?;
            let opts = BruteForceOptions {
                budget: cfg.budget,
                force: cfg.force,
                threads: None,
            };
            let cert = ec_check::brute_force_ec(&g, t, &opts)?;
            let mut result = to_value(&cert);
            result["cost_estimate"] = json!(brute_force_cost(params.n(), t));
            result["sufficient_condition"] = json!(sufficient);
            let checks = vec![Check::new(
                "sufficient_condition_sound",
                !sufficient || cert.verified,
                format!("sufficient condition {}, margin {}", if sufficient { "holds" } else { "fails" }, sig12(margin)),
            )];
            let code = if cert.verified { 0 } else { 1 };
            Ok(outcome(cfg, Some(&params), result, checks, code))
        }
    }
}

fn mixing(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = params_of(cfg)?;
    let g = build_graph(params)?;
    let s = closed_form_spectrum(&params);
    let scan = mixing_scan(&g, &s, cfg.samples, cfg.seed)?;
    let checks = vec![Check::new(
        "expander_mixing",
        scan.ok,
        format!("{} of {} samples exceed lambda", scan.violations, scan.sample_count),
    )];
    let code = if scan.ok { 0 } else { 1 };
    Ok(outcome(cfg, Some(&params), to_value(&scan), checks, code))
}

fn trend(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let e = cfg.e.ok_or(CliError::Missing("e"))?;
    let instances = cfg
        .qs
        .iter()
        .map(|&q| GraphParams::new(q, e))
        .collect::<Result<Vec<_>, _>>()?;
    let report = best_pr_trend(&instances)?;
    let mut checks = vec![Check::new(
        "edge_probability",
        report.instances.iter().all(|i| i.edge_probability_exact),
        "d/n = 1/2 - 1/(2q) for every instance",
    )];
    if e >= 3 {
        checks.push(Check::new(
            "ratio_increasing",
            report.verdict == TrendVerdict::GrowingRatio,
            "lambda/sqrt(d) strictly increasing in q",
        ));
    } else {
        checks.push(Check::new(
            "ratio_bounded",
            report.verdict == TrendVerdict::BoundedRatio,
            format!("max lambda/sqrt(d) = {}", sig12(report.max_ratio)),
        ));
    }
    Ok(outcome(cfg, None, to_value(&report), checks, 0))
}

fn find_q1(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t = cfg.t.ok_or(CliError::Missing("t"))?;
    let e = cfg.e.ok_or(CliError::Missing("e"))?;
    let q1 = ec_check::find_least_q1(t, e)?;
    let params = GraphParams::new(q1, e)?;
    let result = json!({
        "q1": q1,
        "t": t,
        "e": e,
        "margin": sufficient_condition_margin(&params, t),
    });
    Ok(outcome(cfg, Some(&params), result, Vec::new(), 0))
}

fn full_report(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = params_of(cfg)?;
    let g = build_graph(params)?;
    let s = closed_form_spectrum(&params);
    let mut checks = structure_checks(&g);
    let scan = mixing_scan(&g, &s, cfg.samples, cfg.seed)?;
    checks.push(Check::new(
        "expander_mixing",
        scan.ok,
        format!("{} of {} samples exceed lambda", scan.violations, scan.sample_count),
    ));
    let sufficient: Vec<Value> = (1..=6u32)
        .map(|t| json!({"t": t, "holds": ec_check::sufficient_condition(&params, t)}))
        .collect();
    let mut result = json!({
        "edge_count": g.edge_count(),
        "spectrum": spectrum_value(&params),
        "quasirandom": to_value(&quasirandom_stats(&g, &s)),
        "sufficient_condition": sufficient,
        "mixing": to_value(&scan),
    });
    let mut code = 0;
    if let Some(t) = cfg.t {
        let opts = BruteForceOptions {
            budget: cfg.budget,
            force: cfg.force,
            threads: None,
        };
        let cert = ec_check::brute_force_ec(&g, t, &opts)?;
        if !cert.verified {
            code = 1;
        }
        result["exhaustive"] = to_value(&cert);
    }
    if checks.iter().any(|c| !c.ok) {
        code = 1;
    }
    Ok(outcome(cfg, Some(&params), result, checks, code))
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            if let Some(r) = num.as_f64().map(sig12).and_then(serde_json::Number::from_f64) {
                *num = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                match item {
                    Value::Object(_) | Value::Array(_) if !is_flat(item) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(item, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar_text(item))),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if is_flat(item) {
                    out.push_str(&format!("{pad}- {}\n", scalar_text(item)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(item, indent + 1, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar_text(other))),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| !i.is_object() && !i.is_array()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) if items.is_empty() => "-".into(),
        Value::Array(items) => items.iter().map(scalar_text).collect::<Vec<_>>().join(", "),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// Serializes a report. JSON keeps schema field order; floats carry 12 significant digits.
pub fn render_report(report: &Report, format: Format) -> String {
    let mut tree = to_value(report);
    round_floats(&mut tree);
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&tree).expect("json");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            render_text(&tree, 0, &mut s);
            s
        }
    }
}

/// Writes the report to `destination`, or stdout when `None`.
pub fn emit_report(report: &Report, format: Format, destination: Option<&Path>) -> Result<(), CliError> {
    let text = render_report(report, format);
    match destination {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

/// Parse, run and emit; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 2 } else { 0 };
        }
    };
    let cfg = RunConfig::from(cli);
    match run(&cfg).and_then(|o| emit_report(&o.report, cfg.format, cfg.output_path.as_deref()).map(|_| o.exit_code)) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
