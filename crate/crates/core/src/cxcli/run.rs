//! Scenario execution and report rendering.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use super::parse::{param, Item, ModuleDef, ParamValue, Param, Scenario, TaskKind};
use crate::cioper::{build_kchi, chi_self_extension, eisenbud_operators, testci_run, vartest_check, MonomialCi};
use crate::exactla::Field;
use crate::gmod::{coker_presentation, direct_sum, residue_field, AMatrix, Module};
use crate::gralg::{Algebra, Polynomial, DEFAULT_DEGREE_CAP};
use crate::resol::{estimate_complexity, resolve, syzygy, verify_complex, DEFAULT_MAX_DEGREE, DEFAULT_STABILIZATION};
use crate::yoneda::{
    ext_table, pushout, reduction_sequence, self_ext_pd_check, symmetry_check, tor_table, BoundVerdict, ReductionResult,
    SearchOptions, SymmetryVerdict, DEFAULT_SEARCH_BUDGET, DEFAULT_TAIL,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const ENGINE: &str = concat!("cxlab ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Overrides the default resolution length for tasks that do not set `maxdeg`.
    pub max_degree: Option<usize>,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    /// The task ran but a verification it performs did not hold.
    Failed,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct TaskReport {
    pub index: usize,
    pub line: usize,
    pub task: String,
    pub status: Status,
    pub summary: String,
    pub result: Value,
    /// Wall-clock time; rendered in text only so JSON stays reproducible.
    #[serde(skip)]
    pub millis: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub engine: &'static str,
    pub seed: u64,
    pub max_degree: Option<usize>,
    pub tasks: Vec<TaskReport>,
}

impl Report {
    pub fn success(&self) -> bool {
        self.tasks.iter().all(|t| t.status == Status::Ok)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{ENGINE}  schema {}  seed {}", self.schema, self.seed);
        let width = self.tasks.iter().map(|t| t.task.len()).max().unwrap_or(0);
        for t in &self.tasks {
            let status = match t.status {
                Status::Ok => "ok",
                Status::Failed => "FAILED",
                Status::Error => "ERROR",
            };
            let _ = writeln!(
                out,
                "[{:>2}] line {:<4} {:<width$}  {:<6}  {:>6} ms",
                t.index + 1,
                t.line,
                t.task,
                status,
                t.millis
            );
            for l in t.summary.lines() {
                let _ = writeln!(out, "       {l}");
            }
        }
        out
    }
}

struct Context<'a> {
    scenario: &'a Scenario,
    field: Field,
    opts: RunOptions,
    rings: HashMap<String, Result<Arc<Algebra>, String>>,
    modules: HashMap<String, Result<Arc<Module>, String>>,
}

type TaskOutcome = Result<(Status, String, Value), String>;

impl<'a> Context<'a> {
    fn ring(&mut self, name: &str) -> Result<Arc<Algebra>, String> {
        if let Some(r) = self.rings.get(name) {
            return r.clone();
        }
        let (vars, rels) = self.scenario.ring(name).ok_or_else(|| format!("unknown ring '{name}'"))?;
        let built = (|| {
            let polys = rels
                .iter()
                .map(|r| Polynomial::parse(r, vars, self.field))
                .collect::<Result<Vec<_>, _>>()?;
            Algebra::build(self.field, vars.to_vec(), polys, DEFAULT_DEGREE_CAP)
        })()
        .map_err(|e| format!("ring '{name}': {e}"));
        self.rings.insert(name.to_string(), built.clone());
        built
    }

    fn module(&mut self, name: &str) -> Result<Arc<Module>, String> {
        if let Some(m) = self.modules.get(name) {
            return m.clone();
        }
        let def = self.scenario.module(name).ok_or_else(|| format!("unknown module '{name}'"))?.clone();
        let built = self.build_module(&def).map_err(|e| format!("module '{name}': {e}"));
        self.modules.insert(name.to_string(), built.clone());
        built
    }

    fn build_module(&mut self, def: &ModuleDef) -> Result<Arc<Module>, String> {
        match def {
            ModuleDef::Coker { ring, matrix, degrees } => {
                let a = self.ring(ring)?;
                let m = parse_matrix(&a, matrix)?;
                let degrees: Vec<i32> = degrees.iter().map(|&d| d as i32).collect();
                coker_presentation(&m, &degrees).map_err(|e| e.to_string())
            }
            ModuleDef::Residue { ring } => Ok(residue_field(&self.ring(ring)?)),
            ModuleDef::Kchi { ring, j } => {
                let ci = MonomialCi::detect(&self.ring(ring)?).map_err(|e| e.to_string())?;
                Ok(build_kchi(&ci, *j as usize).map_err(|e| e.to_string())?.module)
            }
            ModuleDef::Cut { module, j } => {
                let m = self.module(module)?;
                let ci = MonomialCi::detect(m.algebra()).map_err(|e| e.to_string())?;
                let ops = eisenbud_operators(&ci, &m, 3).map_err(|e| e.to_string())?;
                let eta = chi_self_extension(&ops, *j as usize).map_err(|e| e.to_string())?;
                Ok(pushout(&eta).map_err(|e| e.to_string())?.module)
            }
            ModuleDef::Syzygy { module, i } => Ok(syzygy(&self.module(module)?, *i as usize)),
            ModuleDef::Sum { left, right } => {
                let (l, r) = (self.module(left)?, self.module(right)?);
                direct_sum(&l, &r).map_err(|e| e.to_string())
            }
        }
    }

    fn max_degree(&self, params: &[Param]) -> usize {
        param(params, "maxdeg")
            .map(|p| p.int() as usize)
            .or(self.opts.max_degree)
            .unwrap_or(DEFAULT_MAX_DEGREE)
    }

    fn tests(&mut self, params: &[Param]) -> Result<Vec<(String, Arc<Module>)>, String> {
        let Some(ParamValue::Names(ns)) = param(params, "tests").map(|p| &p.value) else {
            return Ok(Vec::new());
        };
        ns.iter().map(|n| Ok((n.clone(), self.module(n)?))).collect()
    }

    fn run_task(&mut self, kind: TaskKind, args: &[String], params: &[Param]) -> TaskOutcome {
        let int = |key: &str, default: usize| param(params, key).map_or(default, |p| p.int() as usize);
        match kind {
            TaskKind::Betti => {
                let m = self.module(&args[0])?;
                let n = self.max_degree(params);
                let res = resolve(&m, n);
                let betti = res.betti();
                let graded: Vec<Vec<[i64; 2]>> = res
                    .graded_betti()
                    .iter()
                    .map(|g| g.iter().map(|(&d, &c)| [d as i64, c as i64]).collect())
                    .collect();
                Ok((
                    Status::Ok,
                    betti_text(&betti),
                    json!({ "max_degree": n, "betti": betti, "graded": graded }),
                ))
            }
            TaskKind::Complexity => {
                let m = self.module(&args[0])?;
                let n = self.max_degree(params);
                let s = int("s", DEFAULT_STABILIZATION);
                let betti = resolve(&m, n).betti();
                let est = estimate_complexity(&betti, s).map_err(|e| e.to_string())?;
                let summary = format!(
                    "estimate {} ({}), window N={n} s={s}",
                    est.value,
                    if est.stabilized { "stabilized" } else { "NOT stabilized" }
                );
                Ok((Status::Ok, summary, json!({ "max_degree": n, "estimate": est })))
            }
            TaskKind::Ext | TaskKind::Tor => {
                let (m, other) = (self.module(&args[0])?, self.module(&args[1])?);
                let n = self.max_degree(params);
                let table = if kind == TaskKind::Ext {
                    ext_table(&m, &other, n)
                } else {
                    tor_table(&m, &other, n)
                }
                .map_err(|e| e.to_string())?;
                Ok((Status::Ok, table_text("i", "dim", &table), json!({ "max_degree": n, "dims": table })))
            }
            TaskKind::VerifyComplex => {
                let a = self.ring(&args[0])?;
                let Some(ParamValue::Matrices(ms)) = param(params, "matrices").map(|p| &p.value) else {
                    unreachable!("validated")
                };
                let Some(ParamValue::Range(start, _)) = param(params, "range").map(|p| &p.value) else {
                    unreachable!("validated")
                };
                let matrices = ms.iter().map(|m| parse_matrix(&a, m)).collect::<Result<Vec<_>, _>>()?;
                let degrees: Option<Vec<i32>> = match param(params, "degrees").map(|p| &p.value) {
                    Some(ParamValue::Ints(v)) => Some(v.iter().map(|&d| d as i32).collect()),
                    _ => None,
                };
                let rep = verify_complex(&matrices, *start, degrees.as_deref()).map_err(|e| e.to_string())?;
                let status = if rep.passed() { Status::Ok } else { Status::Failed };
                let spots = matrices.len() - 1;
                let mut summary = format!(
                    "exact at {}/{spots} spots, d^2 = 0 at {}/{spots}, minimal: {}",
                    rep.exact_at.len(),
                    rep.square_zero_at.len(),
                    rep.minimal
                );
                for f in &rep.failures {
                    let _ = write!(summary, "\nfailure: {f}");
                }
                Ok((status, summary, serde_json::to_value(&rep).expect("serializes")))
            }
            TaskKind::Reduce => {
                let m = self.module(&args[0])?;
                let opts = SearchOptions {
                    max_search_degree: int("maxdeg", 8),
                    budget: int("budget", DEFAULT_SEARCH_BUDGET),
                    seed: self.opts.seed,
                    max_degree: self.opts.max_degree.unwrap_or(DEFAULT_MAX_DEGREE),
                    stabilization: DEFAULT_STABILIZATION,
                };
                let result = reduction_sequence(&m, &opts).map_err(|e| e.to_string())?;
                let (seq, transcript, complete) = match &result {
                    ReductionResult::Complete(s) => (s, 0, true),
                    ReductionResult::NotFound { partial, transcript } => (partial, transcript.len(), false),
                };
                let links: Vec<Value> = seq
                    .links
                    .iter()
                    .map(|l| {
                        json!({
                            "dim": l.module.dim(),
                            "eta_degree": l.eta_degree,
                            "eta_shift": l.eta_shift,
                            "n": l.syzygy_index(),
                            "estimate": l.estimate.value,
                            "betti": l.estimate.betti,
                        })
                    })
                    .collect();
                let chain: Vec<String> = seq.estimates().iter().map(usize::to_string).collect();
                let mut summary = format!("estimates {}", chain.join(" -> "));
                for l in seq.links.iter().skip(1) {
                    let _ = write!(
                        summary,
                        "\nreducing class in degree {} (internal shift {}), K of dimension {}",
                        l.eta_degree.unwrap_or(0),
                        l.eta_shift.unwrap_or(0),
                        l.module.dim()
                    );
                }
                if !complete {
                    let _ = write!(
                        summary,
                        "\nno reducing class found within search degree {} and budget {} ({transcript} candidates tried); \
                         this says nothing about the module",
                        opts.max_search_degree, opts.budget
                    );
                }
                Ok((
                    Status::Ok,
                    summary,
                    json!({
                        "complete": complete,
                        "max_search_degree": opts.max_search_degree,
                        "budget": opts.budget,
                        "window": opts.max_degree,
                        "stabilization": opts.stabilization,
                        "links": links,
                        "candidates_tried_without_success": transcript,
                    }),
                ))
            }
            TaskKind::ProjdimCheck => {
                let m = self.module(&args[0])?;
                let n = self.max_degree(params);
                let c = self_ext_pd_check(&m, n).map_err(|e| e.to_string())?;
                let status = if c.consistent { Status::Ok } else { Status::Failed };
                let summary = format!(
                    "free: {}, Ext^i(M,M) = 0 for 1 <= i <= {n}: {}, consistent: {}",
                    c.free, c.self_ext_vanishes, c.consistent
                );
                Ok((status, summary, serde_json::to_value(&c).expect("serializes")))
            }
            TaskKind::Symmetry => {
                let (m, other) = (self.module(&args[0])?, self.module(&args[1])?);
                let n = self.max_degree(params);
                let tail = int("tail", DEFAULT_TAIL);
                let c = symmetry_check(&m, &other, n, tail).map_err(|e| e.to_string())?;
                let verdict = match c.verdict {
                    SymmetryVerdict::CoOccurrence { both_vanish: true } => "both directions vanish".to_string(),
                    SymmetryVerdict::CoOccurrence { both_vanish: false } => "neither direction vanishes".to_string(),
                    SymmetryVerdict::WindowTooShort {
                        forward_vanishes,
                        backward_vanishes,
                    } => format!(
                        "window too short: Ext(M,N) vanishes {forward_vanishes}, Ext(N,M) vanishes {backward_vanishes}"
                    ),
                };
                let summary = format!("{verdict} on degrees {}..={n} (observational)", n - tail.min(n));
                Ok((Status::Ok, summary, serde_json::to_value(&c).expect("serializes")))
            }
            TaskKind::Vartest => {
                let m = self.module(&args[0])?;
                let n = self.max_degree(params);
                let tail = int("tail", DEFAULT_TAIL);
                let t = int("t", 0);
                let tests = self.tests(params)?;
                let with_t: Vec<(Arc<Module>, usize)> = tests.iter().map(|(_, m)| (Arc::clone(m), t)).collect();
                let v = vartest_check(&m, &with_t, n, tail).map_err(|e| e.to_string())?;
                Ok((Status::Ok, verdict_text(&v, &tests, "cx M <="), verdict_json(&v, &tests)))
            }
            TaskKind::Testci => {
                let m = self.module(&args[0])?;
                let ci = MonomialCi::detect(m.algebra()).map_err(|e| e.to_string())?;
                let tests = self.tests(params)?;
                let mods: Vec<Arc<Module>> = tests.iter().map(|(_, m)| Arc::clone(m)).collect();
                let count = param(params, "count").map(|p| p.int() as usize);
                let v = testci_run(&ci, &m, int("t", 1), int("q", 1), int("n", 2), &mods, count)
                    .map_err(|e| e.to_string())?;
                Ok((Status::Ok, verdict_text(&v, &tests, "cx M <"), verdict_json(&v, &tests)))
            }
        }
    }
}

fn parse_matrix(a: &Arc<Algebra>, m: &[Vec<String>]) -> Result<AMatrix, String> {
    let polys = m
        .iter()
        .map(|row| row.iter().map(|s| Polynomial::parse(s, a.var_names(), a.field())).collect())
        .collect::<Result<Vec<Vec<_>>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(AMatrix::from_polynomials(a, &polys))
}

fn table_text(index: &str, value: &str, values: &[usize]) -> String {
    let w = values.iter().map(|v| v.to_string().len()).max().unwrap_or(1).max(2);
    let head: Vec<String> = (0..values.len()).map(|i| format!("{i:>w$}")).collect();
    let body: Vec<String> = values.iter().map(|v| format!("{v:>w$}")).collect();
    let lw = index.len().max(value.len());
    format!("{index:<lw$} {}\n{value:<lw$} {}", head.join(" "), body.join(" "))
}

fn betti_text(betti: &[usize]) -> String {
    table_text("n", "beta", betti)
}

fn verdict_text(v: &BoundVerdict, tests: &[(String, Arc<Module>)], relation: &str) -> String {
    let head = match &v.outcome {
        crate::yoneda::BoundOutcome::BoundEstablished { bound } => format!("bound established: {relation} {bound}"),
        crate::yoneda::BoundOutcome::Inconclusive { witness } => format!(
            "inconclusive: Ext^{}(M, {}) has dimension {}",
            witness.degree, tests[witness.test].0, witness.dim
        ),
    };
    format!("{head}\ndegrees checked {:?}\n{}", v.degrees, v.caveat)
}

fn verdict_json(v: &BoundVerdict, tests: &[(String, Arc<Module>)]) -> Value {
    let mut value = serde_json::to_value(v).expect("serializes");
    value["tests"] = json!(tests.iter().map(|(n, _)| n).collect::<Vec<_>>());
    value
}

/// Runs every task in order; a failing task never stops the others.
pub fn run(scenario: &Scenario, opts: RunOptions) -> Report {
    let field = Field::new(scenario.field()).expect("validated prime");
    let mut ctx = Context {
        scenario,
        field,
        opts,
        rings: HashMap::new(),
        modules: HashMap::new(),
    };
    let mut tasks = Vec::new();
    for (index, item) in scenario.tasks().enumerate() {
        let Item::Task { kind, args, params, loc } = item else {
            unreachable!()
        };
        let started = std::time::Instant::now();
        let outcome = ctx.run_task(*kind, args, params);
        let millis = started.elapsed().as_millis();
        let (status, summary, result) = match outcome {
            Ok(x) => x,
            Err(e) => (Status::Error, format!("error: {e}"), Value::Null),
        };
        tasks.push(TaskReport {
            index,
            line: loc.line,
            task: format!("{} {}", kind.name(), args.join(" ")),
            status,
            summary,
            result,
            millis,
        });
    }
    Report {
        schema: SCHEMA_VERSION,
        engine: ENGINE,
        seed: opts.seed,
        max_degree: opts.max_degree,
        tasks,
    }
}
