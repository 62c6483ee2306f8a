//! Method × problem benchmark matrices and their CSV / Markdown reports.

use std::fmt::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::method::make_method;
use crate::oracle::{self, OracleError};
use crate::problem::{
    ConfigError, Estimator, Exhausted, MethodConfig, MethodId, Problem, RunStatus, SolveError,
};

pub const CSV_HEADER: &str = "problem,method,r,eps,trials,best_x,best_f,status,success";

/// How the reliability parameter is chosen for adaptive methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reliability {
    Fixed(f64),
    /// Start at `start` and, for problems that fail, retry with `r` raised
    /// by `step` until they succeed or `r` would exceed `max`.
    Auto {
        start: f64,
        step: f64,
        max: f64,
    },
}

impl Reliability {
    pub const PROTOCOL: Reliability = Reliability::Auto {
        start: 1.1,
        step: 0.1,
        max: 3.0,
    };

    fn ladder(&self) -> Vec<f64> {
        match *self {
            Reliability::Fixed(r) => vec![r],
            Reliability::Auto { start, step, max } => {
                // integer steps keep the printed values clean (1.1, 1.2, ...)
                let count = ((max - start) / step + 1e-9).floor() as usize;
                (0..=count)
                    .map(|i| ((start + step * i as f64) * 1e6).round() / 1e6)
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub methods: Vec<MethodId>,
    pub eps: f64,
    pub eps_relative: bool,
    pub delta: Option<f64>,
    pub exhausted: Exhausted,
    pub xi: f64,
    pub reliability: Reliability,
    pub max_trials: usize,
    /// Worker threads; 0 lets the pool decide.
    pub parallel: usize,
    /// Grid size for oracle constants supplied to known-constant methods.
    pub oracle_grid: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            methods: MethodId::ALL.to_vec(),
            eps: crate::problem::DEFAULT_EPS,
            eps_relative: true,
            delta: None,
            exhausted: Exhausted::Adjacent,
            xi: crate::problem::DEFAULT_XI,
            reliability: Reliability::Fixed(1.1),
            max_trials: crate::problem::DEFAULT_MAX_TRIALS,
            parallel: 0,
            oracle_grid: oracle::DEFAULT_GRID,
        }
    }
}

impl BenchConfig {
    fn method_config(&self, id: MethodId, r: f64) -> MethodConfig {
        let mut c = MethodConfig::new(id.scheme, id.estimator, id.selector)
            .with_r(r)
            .with_eps(self.eps, self.eps_relative)
            .with_xi(self.xi)
            .with_exhausted(self.exhausted)
            .with_max_trials(self.max_trials);
        c.delta = self.delta;
        c
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("oracle failed on `{problem}`: {source}")]
    Oracle {
        problem: String,
        #[source]
        source: OracleError,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Outcome of one (problem, method) cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Finished(RunStatus),
    Failed(String),
}

impl Outcome {
    pub fn as_str(&self) -> &str {
        match self {
            Outcome::Finished(s) => s.as_str(),
            Outcome::Failed(_) => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub problem: String,
    pub method: MethodId,
    /// `None` for known-constant methods.
    pub r: Option<f64>,
    pub eps: f64,
    pub trials: usize,
    pub best_x: f64,
    pub best_f: f64,
    pub outcome: Outcome,
    pub success: bool,
}

/// Success rule: within `eps` of the known minimizer when one is known,
/// otherwise plain convergence.
pub fn is_success(outcome: &Outcome, best_x: f64, known_min_x: Option<f64>, eps: f64) -> bool {
    match (outcome, known_min_x) {
        (Outcome::Failed(_), _) | (Outcome::Finished(RunStatus::Rejected), _) => false,
        (_, Some(x_star)) => (best_x - x_star).abs() <= eps,
        (Outcome::Finished(status), None) => *status == RunStatus::Converged,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub problems: Vec<String>,
    pub methods: Vec<MethodId>,
    /// Problem-major: all methods of problem 0, then problem 1, ...
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn rows_for(&self, method: MethodId) -> impl Iterator<Item = &BenchRow> {
        self.rows.iter().filter(move |r| r.method == method)
    }

    /// Mean trial count over the successful rows of `method`.
    pub fn average(&self, method: MethodId) -> Option<f64> {
        let (sum, n) = self
            .rows_for(method)
            .filter(|r| r.success)
            .fold((0usize, 0usize), |(s, n), r| (s + r.trials, n + 1));
        (n > 0).then(|| sum as f64 / n as f64)
    }

    pub fn all_success(&self) -> bool {
        self.rows.iter().all(|r| r.success)
    }

    /// Distinct `r` values used by `method`, ascending.
    pub fn r_values(&self, method: MethodId) -> Vec<f64> {
        let mut rs: Vec<f64> = self.rows_for(method).filter_map(|r| r.r).collect();
        rs.sort_by(f64::total_cmp);
        rs.dedup();
        rs
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Markdown => self.to_markdown(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                row.problem,
                row.method,
                row.r.map(|r| r.to_string()).unwrap_or_default(),
                row.eps,
                row.trials,
                row.best_x,
                row.best_f,
                row.outcome.as_str(),
                row.success
            );
        }
        out
    }

    /// Problems as rows, methods as columns, and a final `Average` row.
    /// Cells that needed a larger `r` than the method's smallest are starred;
    /// unsuccessful cells read `fail(n)`.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| Problem |");
        for m in &self.methods {
            let _ = write!(out, " {} |", m.label().replace('_', "\\_"));
        }
        out.push_str("\n|---|");
        out.push_str(&"---:|".repeat(self.methods.len()));
        out.push('\n');
        let base_r: Vec<Option<f64>> = self
            .methods
            .iter()
            .map(|&m| self.r_values(m).first().copied())
            .collect();
        for (p, name) in self.problems.iter().enumerate() {
            let _ = write!(out, "| {name} |");
            for (i, _) in self.methods.iter().enumerate() {
                let row = &self.rows[p * self.methods.len() + i];
                let star = if row.r.is_some() && row.r != base_r[i] {
                    "*"
                } else {
                    ""
                };
                if row.success {
                    let _ = write!(out, " {}{star} |", row.trials);
                } else {
                    let _ = write!(out, " fail({}){star} |", row.trials);
                }
            }
            out.push('\n');
        }
        out.push_str("| Average |");
        for &m in &self.methods {
            match self.average(m) {
                Some(avg) => {
                    let _ = write!(out, " {avg:.2} |");
                }
                None => out.push_str(" n/a |"),
            }
        }
        out.push('\n');
        let r_notes: Vec<String> = self
            .methods
            .iter()
            .filter_map(|&m| {
                let rs = self.r_values(m);
                (!rs.is_empty()).then(|| {
                    let list: Vec<String> = rs.iter().map(|r| r.to_string()).collect();
                    format!("{}: r = {}", m.label(), list.join(", "))
                })
            })
            .collect();
        if !r_notes.is_empty() {
            let _ = write!(out, "\n{}\n", r_notes.join("; "));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            other => Err(format!(
                "unknown report format `{other}` (expected csv or md)"
            )),
        }
    }
}

fn run_cell(problem: &Problem, config: MethodConfig) -> BenchRow {
    let eps = config.effective_eps(problem.width());
    let r = config.uses_reliability().then_some(config.r);
    let (trials, best_x, best_f, outcome) = match make_method(config).map(|m| m.run(problem)) {
        Ok(Ok(res)) => (
            res.n_trials,
            res.best_x,
            res.best_f,
            Outcome::Finished(res.status),
        ),
        Ok(Err(SolveError::Rejected(_))) => (
            0,
            f64::NAN,
            f64::NAN,
            Outcome::Finished(RunStatus::Rejected),
        ),
        Ok(Err(SolveError::Run(e))) => (0, f64::NAN, f64::NAN, Outcome::Failed(e.to_string())),
        Err(e) => (0, f64::NAN, f64::NAN, Outcome::Failed(e.to_string())),
    };
    let success = is_success(&outcome, best_x, problem.known_min_x(), eps);
    BenchRow {
        problem: problem.name().to_string(),
        method: config.id(),
        r,
        eps,
        trials,
        best_x,
        best_f,
        outcome,
        success,
    }
}

/// Fills in oracle constants wherever a known-constant method needs them.
pub fn prepare_problems(
    problems: &[Problem],
    config: &BenchConfig,
) -> Result<Vec<Problem>, BenchError> {
    let needs_oracle = config
        .methods
        .iter()
        .any(|m| m.estimator == Estimator::KnownConstant);
    if !needs_oracle {
        return Ok(problems.to_vec());
    }
    problems
        .iter()
        .map(|p| {
            oracle::with_oracle_constants(p, config.oracle_grid).map_err(|source| {
                BenchError::Oracle {
                    problem: p.name().to_string(),
                    source,
                }
            })
        })
        .collect()
}

fn run_matrix(problems: &[Problem], config: &BenchConfig) -> Vec<BenchRow> {
    let ladder = config.reliability.ladder();
    let cells: Vec<(usize, MethodId)> = (0..problems.len())
        .flat_map(|p| config.methods.iter().map(move |&m| (p, m)))
        .collect();
    cells
        .par_iter()
        .map(|&(p, id)| {
            let problem = &problems[p];
            let rs: &[f64] = if id.estimator == Estimator::KnownConstant {
                &ladder[..1]
            } else {
                &ladder
            };
            let mut row = run_cell(problem, config.method_config(id, rs[0]));
            for &r in &rs[1..] {
                if row.success {
                    break;
                }
                row = run_cell(problem, config.method_config(id, r));
            }
            row
        })
        .collect()
}

/// Runs every method on every problem. Problems should already carry the
/// constants known-constant methods need (see [`prepare_problems`]);
/// otherwise those rows are reported as rejected.
pub fn run_bench(problems: &[Problem], config: &BenchConfig) -> Result<BenchReport, BenchError> {
    for &id in &config.methods {
        config
            .method_config(id, config.reliability.ladder()[0])
            .validate()?;
    }
    let rows = if config.parallel == 0 {
        run_matrix(problems, config)
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.parallel)
            .build()
            .map_err(|e| BenchError::Pool(e.to_string()))?
            .install(|| run_matrix(problems, config))
    };
    Ok(BenchReport {
        problems: problems.iter().map(|p| p.name().to_string()).collect(),
        methods: config.methods.clone(),
        rows,
    })
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub problem: String,
    pub method: MethodId,
    pub r: Option<f64>,
    pub eps: f64,
    pub trials: usize,
    pub best_x: f64,
    pub best_f: f64,
    pub status: String,
    pub success: bool,
}

/// Parses a report written by [`BenchReport::to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("missing or unexpected header".into());
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let err = |what: &str| format!("row {}: bad {what}", i + 1);
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(err("field count"));
            }
            Ok(CsvRow {
                problem: f[0].to_string(),
                method: f[1].parse().map_err(|_| err("method"))?,
                r: if f[2].is_empty() {
                    None
                } else {
                    Some(f[2].parse().map_err(|_| err("r"))?)
                },
                eps: f[3].parse().map_err(|_| err("eps"))?,
                trials: f[4].parse().map_err(|_| err("trials"))?,
                best_x: f[5].parse().map_err(|_| err("best_x"))?,
                best_f: f[6].parse().map_err(|_| err("best_f"))?,
                status: f[7].to_string(),
                success: f[8].parse().map_err(|_| err("success"))?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(problem: &str, method: &str, trials: usize, success: bool) -> BenchRow {
        BenchRow {
            problem: problem.into(),
            method: method.parse().unwrap(),
            r: Some(1.1),
            eps: 1e-3,
            trials,
            best_x: 0.5,
            best_f: 0.0,
            outcome: Outcome::Finished(RunStatus::Converged),
            success,
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let report = BenchReport {
            problems: vec![],
            methods: vec![],
            rows: vec![],
        };
        assert_eq!(report.to_csv(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn markdown_shape_and_averages() {
        let methods: Vec<MethodId> = ["PKC", "GE", "LT", "PKC_LI", "GE_LI", "LT_LI"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let mut rows = Vec::new();
        let mut problems = Vec::new();
        for p in 0..20 {
            problems.push(format!("p{p}"));
            for m in &methods {
                rows.push(row(&format!("p{p}"), m.label(), 10 + p, true));
            }
        }
        let report = BenchReport {
            problems,
            methods,
            rows,
        };
        let md = report.to_markdown();
        let table_rows = md.lines().take_while(|l| l.starts_with('|')).count();
        assert_eq!(table_rows, 2 + 21);
        assert!(md.contains("| Average | 19.50 |"));
        assert!(md.contains("PKC\\_LI"));
    }

    #[test]
    fn average_skips_failures() {
        let report = BenchReport {
            problems: vec!["a".into(), "b".into()],
            methods: vec!["GE".parse().unwrap()],
            rows: vec![row("a", "GE", 10, true), row("b", "GE", 1000, false)],
        };
        assert_eq!(report.average("GE".parse().unwrap()), Some(10.0));
        assert!(report.to_markdown().contains("fail(1000)"));
        assert!(!report.all_success());
    }

    #[test]
    fn success_rule() {
        let done = Outcome::Finished(RunStatus::Converged);
        assert!(is_success(&done, 1.0005, Some(1.0), 1e-3));
        assert!(!is_success(&done, 1.002, Some(1.0), 1e-3));
        assert!(is_success(&done, 7.0, None, 1e-3));
        assert!(!is_success(
            &Outcome::Finished(RunStatus::TrialCapReached),
            7.0,
            None,
            1e-3
        ));
        assert!(!is_success(
            &Outcome::Failed("x".into()),
            1.0,
            Some(1.0),
            1e-3
        ));
    }

    #[test]
    fn protocol_ladder() {
        let ladder = Reliability::PROTOCOL.ladder();
        assert_eq!(&ladder[..4], &[1.1, 1.2, 1.3, 1.4]);
        assert_eq!(*ladder.last().unwrap(), 3.0);
        assert_eq!(Reliability::Fixed(1.7).ladder(), vec![1.7]);
    }

    #[test]
    fn csv_round_trip() {
        let mut r = row("p", "DKC", 12, true);
        r.r = None;
        r.best_x = -0.1234567890123;
        let report = BenchReport {
            problems: vec!["p".into()],
            methods: vec![r.method],
            rows: vec![r.clone()],
        };
        let parsed = parse_csv(&report.to_csv()).unwrap();
        assert_eq!(parsed[0].best_x, r.best_x);
        assert_eq!(parsed[0].r, None);
        assert_eq!(parsed[0].method.label(), "DKC");
    }
}
