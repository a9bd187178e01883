//! Command dispatch for the `numrange` tool.

pub mod catalog;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::ValueEnum;
use serde_json::{json, Value};
use thiserror::Error;

use numrange::scalar::format_rational;
use numrange::{
    daugavet_defect, dual_space, eps_norm, index_of, numerical_radius, nuclear_norm_operator, op_norm, pi_norm, slice, v_delta, verify_suite, Config, Functional,
    SliceSpec, Verdict, DEFAULT_SEED,
};

use catalog::{load_catalog_file, parse_catalog, parse_vector, parse_vector_exact, Catalog, CATALOG_ENV, DEFAULT_CATALOG};
use report::{matrix_json, vector_json, witness, Flagged, Report, ReportItem};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("label {label:?} is a {found}, expected a {expected}")]
    WrongKind {
        label: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("catalog entry {entry} ({label}): {message}")]
    Catalog { entry: usize, label: String, message: String },
    #[error("malformed catalog: {0}")]
    Json(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Norm,
    Dual,
    Opnorm,
    Vradius,
    Vdelta,
    Nindex,
    TensorNorm,
    Nuclear,
    Daugavet,
    Slice,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Dual => "dual",
            Command::Opnorm => "opnorm",
            Command::Vradius => "vradius",
            Command::Vdelta => "vdelta",
            Command::Nindex => "nindex",
            Command::TensorNorm => "tensor-norm",
            Command::Nuclear => "nuclear",
            Command::Daugavet => "daugavet",
            Command::Slice => "slice",
            Command::Verify => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Human,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Pi,
    Eps,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Catalog file; the environment variable and then the shipped catalog
    /// are used when absent.
    pub catalog: Option<PathBuf>,
    pub command: Command,
    pub targets: Vec<String>,
    /// Tolerance for inequality reports with a heuristic side.
    pub tol: Option<f64>,
    /// Multistart budget (number of index-estimator starts; other budgets
    /// scale with it) and falsifier attempts.
    pub budget: Option<usize>,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Vector or functional argument for `norm`, `dual` and `slice`.
    pub vector: Option<String>,
    pub delta: Option<f64>,
    pub kind: Option<KindArg>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            catalog: None,
            command,
            targets: Vec::new(),
            tol: None,
            budget: None,
            seed: DEFAULT_SEED,
            format: Format::Json,
            out: None,
            vector: None,
            delta: None,
            kind: None,
        }
    }

    pub fn library_config(&self) -> Result<Config, CliError> {
        let mut cfg = Config::default().with_seed(self.seed);
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
            }
            cfg.heuristic_tol = t;
        }
        if let Some(b) = self.budget {
            if b == 0 {
                return Err(CliError::Usage("--budget must be positive".into()));
            }
            let f = b as f64 / cfg.index_starts as f64;
            cfg = cfg.scaled_budget(f);
        }
        Ok(cfg)
    }
}

pub struct Outcome {
    pub report: Report,
    /// 0 on completion, 2 when a verified inequality is violated.
    pub exit_code: i32,
}

pub fn load_catalog(rc: &RunConfig, cfg: &Config) -> Result<Catalog, CliError> {
    let path = rc.catalog.clone().or_else(|| std::env::var_os(CATALOG_ENV).map(PathBuf::from));
    match path {
        Some(p) => load_catalog_file(&p, cfg),
        None => parse_catalog(DEFAULT_CATALOG, cfg),
    }
}

fn need<'a, T>(v: &'a Option<T>, flag: &str, cmd: Command) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::Usage(format!("{} needs {flag}", cmd.name())))
}

/// Runs one command. Input errors (catalog, labels, arguments) are returned
/// as `Err`; failures inside a computation are reported per item.
pub fn run_command(rc: &RunConfig) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let cfg = rc.library_config()?;
    let cat = load_catalog(rc, &cfg)?;
    let cmd = rc.command;
    let targets: Vec<String> = if rc.targets.is_empty() && cmd == Command::Verify {
        cat.spaces().iter().map(|s| s.label().to_string()).collect()
    } else {
        rc.targets.clone()
    };
    if targets.is_empty() {
        return Err(CliError::Usage(format!("{} needs --target", cmd.name())));
    }
    // resolve every label before computing anything
    for t in &targets {
        cat.get(t)?;
    }
    let mut items = Vec::new();
    let mut exit_code = 0;
    match cmd {
        Command::Norm | Command::Dual => {
            let vs = need(&rc.vector, "--vector", cmd)?;
            let v = parse_vector(vs)?;
            for t in &targets {
                let s = cat.space(t)?;
                let (space, q) = if cmd == Command::Norm { (s.clone(), "norm") } else { (dual_space(s), "dual-norm") };
                let exact = parse_vector_exact(vs).filter(|_| space.is_real()).and_then(|r| space.eval_norm_exact(&r).ok());
                items.push(match space.eval_norm_witness(&v) {
                    Ok(e) => {
                        let mut it = ReportItem::new(t, q)
                            .value(e.value, e.exact)
                            .witness(witness(e.exact, vec![("functional", vector_json(&e.functional))]));
                        it.rational = exact.map(|r| format_rational(&r));
                        it
                    }
                    Err(err) => ReportItem::failed(t, q, err),
                });
            }
        }
        Command::Opnorm => {
            for t in &targets {
                let op = cat.operator(t)?;
                let n = op_norm(op);
                let mut it = ReportItem::new(t, "operator-norm")
                    .value(n.value, n.exact)
                    .method(n.route)
                    .witness(witness(n.exact, vec![("argument", vector_json(&n.argument)), ("functional", vector_json(&n.functional))]));
                it.rational = op.norm_exact().ok().map(|r| format_rational(&r));
                items.push(it);
            }
        }
        Command::Vradius => {
            for t in &targets {
                let op = cat.operator(t)?;
                items.push(match numerical_radius(op) {
                    Ok(r) => {
                        let sched: Vec<Value> = r.delta_schedule.iter().map(|(d, v)| json!({"delta": Flagged::exact(*d), "v_delta": Flagged::new(*v, r.exact)})).collect();
                        let mut it = ReportItem::new(t, "numerical-radius").value(r.value, r.exact).method(r.method).witness(witness(
                            r.exact,
                            vec![
                                ("x", vector_json(&r.witness.x)),
                                ("x_star", vector_json(r.witness.x_star.coefficients())),
                                ("gap", json!(r.witness.gap)),
                                ("delta_schedule", Value::Array(sched)),
                            ],
                        ));
                        it.rational = numrange::numerical_radius_exact(op).ok().map(|q| format_rational(&q));
                        it
                    }
                    Err(e) => ReportItem::failed(t, "numerical-radius", e),
                });
            }
        }
        Command::Vdelta => {
            let d = *need(&rc.delta, "--delta", cmd)?;
            for t in &targets {
                let op = cat.operator(t)?;
                items.push(match v_delta(op, d, None, None) {
                    Ok(r) => ReportItem::new(t, "v-delta").value(r.value, r.exact).witness(witness(
                        r.exact,
                        vec![
                            ("delta", json!(d)),
                            ("x", vector_json(&r.witness.x)),
                            ("x_star", vector_json(r.witness.x_star.coefficients())),
                            ("gap", json!(r.witness.gap)),
                        ],
                    )),
                    Err(e) => ReportItem::failed(t, "v-delta", e),
                });
            }
        }
        Command::Nindex => {
            for t in &targets {
                let s = cat.space(t)?;
                items.push(match index_of(s, &cfg) {
                    Ok(c) => ReportItem::new(t, "numerical-index").value(c.value, c.exact).method(c.method.name()).witness(witness(
                        c.exact,
                        vec![("operator", matrix_json(c.witness_operator.matrix())), ("ratio", json!(c.witness_value))],
                    )),
                    Err(e) => ReportItem::failed(t, "numerical-index", e),
                });
            }
        }
        Command::TensorNorm => {
            for t in &targets {
                let u = cat.tensor(t)?;
                if rc.kind != Some(KindArg::Pi) {
                    let e = eps_norm(u);
                    items.push(
                        ReportItem::new(t, "eps-norm")
                            .value(e.value, e.exact)
                            .witness(witness(e.exact, vec![("x_star", vector_json(&e.x_star)), ("y_star", vector_json(&e.y_star))])),
                    );
                }
                if rc.kind != Some(KindArg::Eps) {
                    let p = pi_norm(u);
                    items.push(pi_item(t, "pi-norm", &p));
                }
            }
        }
        Command::Nuclear => {
            for t in &targets {
                let op = cat.operator(t)?;
                items.push(pi_item(t, "nuclear-norm", &nuclear_norm_operator(op)));
            }
        }
        Command::Daugavet => {
            for t in &targets {
                let op = cat.operator(t)?;
                match daugavet_defect(op) {
                    Ok(d) => {
                        let holds = d.defect.abs() <= cfg.opt_tol;
                        let mut it = ReportItem::new(t, "daugavet-defect").value(d.defect, d.exact).witness(witness(
                            d.exact,
                            vec![
                                ("x", vector_json(&d.witness.x)),
                                ("x_star", vector_json(d.witness.x_star.coefficients())),
                            ],
                        ));
                        it.method = Some(if holds { "equation holds".into() } else { "equation fails".into() });
                        items.push(it);
                        items.push(ReportItem::new(t, "sup-re-v").value(d.sup_re_v, d.exact));
                        items.push(ReportItem::new(t, "norm").value(d.norm, d.exact));
                        items.push(ReportItem::new(t, "norm-id-plus-t").value(d.norm_id_plus_t, d.exact));
                    }
                    Err(e) => items.push(ReportItem::failed(t, "daugavet-defect", e)),
                }
            }
        }
        Command::Slice => {
            let f = parse_vector(need(&rc.vector, "--vector", cmd)?)?;
            let d = *need(&rc.delta, "--delta", cmd)?;
            for t in &targets {
                let s = cat.space(t)?;
                let r = Functional::new(s, f.clone()).and_then(|fun| SliceSpec::on_ball(s, &fun, d)).and_then(|spec| {
                    let pts = slice(&spec)?;
                    let sup = spec.set.iter().map(|x| fun_re(&f, x)).fold(f64::NEG_INFINITY, f64::max);
                    Ok((pts, sup))
                });
                items.push(match r {
                    Ok((pts, sup)) => {
                        let pj: Vec<Value> = pts.iter().map(|p| vector_json(p)).collect();
                        ReportItem::new(t, "slice")
                            .value(sup, true)
                            .method("ball vertices")
                            .witness(witness(true, vec![("points", Value::Array(pj)), ("depth", json!(d))]))
                    }
                    Err(e) => ReportItem::failed(t, "slice", e),
                });
            }
        }
        Command::Verify => {
            let spaces: Vec<_> = targets.iter().map(|t| cat.space(t).cloned()).collect::<Result<_, _>>()?;
            for r in verify_suite(&spaces, &cfg) {
                if r.verdict == Verdict::Violated {
                    exit_code = 2;
                }
                let exact = r.lhs.exact && r.rhs.exact;
                let mut it = ReportItem::new(&r.name, "inequality");
                if r.lhs.value.is_finite() {
                    it.value = Some(Flagged::new(r.lhs.value, r.lhs.exact));
                    it.margin = Some(Flagged::new(r.margin, exact));
                    it.witness = Some(witness(
                        exact,
                        vec![
                            ("lhs", json!(Flagged::new(r.lhs.value, r.lhs.exact))),
                            ("rhs", json!(Flagged::new(r.rhs.value, r.rhs.exact))),
                            ("strict", json!(r.strict)),
                            ("certificates", json!(r.witnesses)),
                        ],
                    ));
                } else {
                    it.error = r.witnesses.first().cloned();
                }
                it.verdict = Some(r.verdict.name().to_string());
                items.push(it);
            }
        }
    }
    let report = Report {
        command: cmd.name().to_string(),
        targets,
        seed: format!("{:#x}", rc.seed),
        tolerance: Flagged::exact(cfg.heuristic_tol),
        budget: Flagged::exact(cfg.index_starts as f64),
        items,
        wall_time_ms: Flagged::new(start.elapsed().as_secs_f64() * 1e3, false),
    };
    Ok(Outcome { report, exit_code })
}

fn fun_re(f: &[numrange::C64], x: &[numrange::C64]) -> f64 {
    f.iter().zip(x).map(|(a, b)| a * b).sum::<numrange::C64>().re
}

fn pi_item(t: &str, q: &str, p: &numrange::PiNorm) -> ReportItem {
    let terms: Vec<Value> = p
        .decomposition
        .iter()
        .map(|r| json!({"weight": r.weight, "x": vector_json(&r.x), "y": vector_json(&r.y)}))
        .collect();
    let mut it = ReportItem::new(t, q).value(p.value, p.exact).method(p.method).witness(witness(
        p.exact,
        vec![
            ("dual_bound", json!(p.dual)),
            ("decomposition", Value::Array(terms)),
            ("certificate", matrix_json(&p.certificate)),
        ],
    ));
    it.margin = Some(Flagged::new(p.primal - p.dual, p.exact));
    it
}

/// Parses `--seed` values: hexadecimal with or without `0x`.
pub fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let t = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    u64::from_str_radix(t, 16).map_err(|e| format!("bad hex seed {s:?}: {e}"))
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report::render_json(report),
        Format::Csv => report::render_csv(report),
        Format::Human => report::render_human(report),
    }
}

/// JSON report with the wall-time field removed, for determinism checks.
pub fn without_wall_time(json_text: &str) -> Value {
    let mut v: Value = serde_json::from_str(json_text).expect("report json");
    if let Some(o) = v.as_object_mut() {
        o.remove("wall_time_ms");
    }
    v
}
