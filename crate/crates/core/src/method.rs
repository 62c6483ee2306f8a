//! Runnable methods: one of the twelve (scheme, estimator, selector) variants.

use crate::engine::{run_scheme, IntervalTable, Iteration, Selection, SelectorState};
use crate::linear::{LinearInterval, LinearScheme};
use crate::problem::{
    validate_problem, ConfigError, Estimator, MethodConfig, Problem, RunResult, Scheme, SolveError,
};
use crate::smooth::{SmoothInterval, SmoothScheme};

/// Scheme-specific interval data seen by an observer.
#[derive(Debug, Clone, Copy)]
pub enum IntervalData<'a> {
    Linear(&'a [LinearInterval]),
    Smooth(&'a [SmoothInterval]),
}

/// Per-iteration snapshot handed to [`Method::run_observed`] callbacks.
#[derive(Debug, Clone, Copy)]
pub struct IterationView<'a> {
    pub table: &'a IntervalTable,
    pub intervals: IntervalData<'a>,
    pub characteristics: &'a [f64],
    pub selection: Selection,
    pub state: SelectorState,
    pub next_x: Option<f64>,
}

/// A validated method configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Method {
    config: MethodConfig,
}

/// Checks `config` and wraps it as a runnable method.
pub fn make_method(config: MethodConfig) -> Result<Method, ConfigError> {
    config.validate()?;
    Ok(Method { config })
}

impl Method {
    pub fn config(&self) -> &MethodConfig {
        &self.config
    }

    pub fn label(&self) -> &'static str {
        self.config.label()
    }

    pub fn run(&self, problem: &Problem) -> Result<RunResult, SolveError> {
        self.run_observed(problem, |_| {})
    }

    /// Runs the method, calling `observer` once per iteration after the
    /// interval selection.
    pub fn run_observed<F>(
        &self,
        problem: &Problem,
        mut observer: F,
    ) -> Result<RunResult, SolveError>
    where
        F: FnMut(&IterationView<'_>),
    {
        validate_problem(problem, &self.config)?;
        let c = &self.config;
        let result = match c.scheme {
            Scheme::Linear => {
                let hooks = LinearScheme {
                    estimator: c.estimator,
                    r: c.r,
                    xi: c.xi,
                    known_l: known(c.estimator, problem.known_lipschitz()),
                };
                run_scheme(problem, c, &hooks, |it: &Iteration<'_, LinearInterval>| {
                    observer(&view(it, IntervalData::Linear(it.intervals)))
                })?
            }
            Scheme::Derivative => {
                let hooks = SmoothScheme {
                    estimator: c.estimator,
                    r: c.r,
                    xi: c.xi,
                    known_m: known(c.estimator, problem.known_derivative_lipschitz()),
                };
                run_scheme(problem, c, &hooks, |it: &Iteration<'_, SmoothInterval>| {
                    observer(&view(it, IntervalData::Smooth(it.intervals)))
                })?
            }
        };
        Ok(result)
    }
}

fn known(estimator: Estimator, constant: Option<f64>) -> f64 {
    match estimator {
        Estimator::KnownConstant => constant.expect("validated"),
        _ => f64::NAN,
    }
}

fn view<'a, D>(it: &Iteration<'a, D>, intervals: IntervalData<'a>) -> IterationView<'a> {
    IterationView {
        table: it.table,
        intervals,
        characteristics: it.characteristics,
        selection: it.selection,
        state: it.state,
        next_x: it.next_x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{ConfigError, RunStatus};

    #[test]
    fn rejects_invalid_configs() {
        let cfg = MethodConfig::from_label("GE").unwrap().with_r(1.0);
        assert_eq!(make_method(cfg).unwrap_err(), ConfigError::Reliability(1.0));
    }

    #[test]
    fn identity_on_unit_interval() {
        let p = Problem::new("id", 0.0, 1.0, |x| x).unwrap();
        let cfg = MethodConfig::from_label("GE").unwrap().with_eps(0.5, false);
        let res = make_method(cfg).unwrap().run(&p).unwrap();
        assert_eq!(res.status, RunStatus::Converged);
        assert_eq!((res.best_x, res.best_f), (0.0, 0.0));
        // after the third trial both characteristics equal -1/440 exactly in
        // real arithmetic; rounding favours the wide interval, costing one trial
        let mut chars = Vec::new();
        make_method(cfg)
            .unwrap()
            .run_observed(&p, |it| {
                if it.table.len() == 3 {
                    chars = it.characteristics.to_vec();
                }
            })
            .unwrap();
        assert!((chars[0] - chars[1]).abs() < 1e-15);
        assert!(res.n_trials <= 4);
    }

    #[test]
    fn trial_cap_of_two_keeps_the_endpoints() {
        let p = Problem::new("q", -1.0, 2.0, |x| x * x).unwrap();
        let cfg = MethodConfig::from_label("LT").unwrap().with_max_trials(2);
        let res = make_method(cfg).unwrap().run(&p).unwrap();
        assert_eq!(res.status, RunStatus::TrialCapReached);
        let xs: Vec<f64> = res.trials.iter().map(|t| t.x).collect();
        assert_eq!(xs, [-1.0, 2.0]);
    }

    #[test]
    fn derivative_run_without_derivative_is_rejected() {
        let p = Problem::new("q", -1.0, 2.0, |x| x * x).unwrap();
        let method = make_method(MethodConfig::from_label("DLT").unwrap()).unwrap();
        assert!(matches!(method.run(&p), Err(SolveError::Rejected(_))));
    }

    #[test]
    fn non_finite_values_name_the_abscissa() {
        let p = Problem::new("log", -1.0, 1.0, |x: f64| (x + 0.5).ln()).unwrap();
        let method = make_method(MethodConfig::from_label("GE").unwrap()).unwrap();
        match method.run(&p) {
            Err(SolveError::Run(crate::problem::RunError::NonFinite { x, .. })) => {
                assert_eq!(x, -1.0)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tight_constants_split_at_the_midpoint() {
        let p = Problem::new("line", 0.0, 1.0, |x| x)
            .unwrap()
            .with_lipschitz(1.0)
            .unwrap();
        let cfg = MethodConfig::from_label("PKC")
            .unwrap()
            .with_eps(0.1, false);
        let res = make_method(cfg).unwrap().run(&p).unwrap();
        assert_eq!(res.status, RunStatus::Converged);
        assert_eq!(res.trials[2].x, 0.5);

        let p = Problem::new("bowl", -1.0, 2.0, |x| x * x)
            .unwrap()
            .with_derivative(|x| 2.0 * x)
            .with_derivative_lipschitz(2.0)
            .unwrap();
        let res = make_method(MethodConfig::from_label("DKC").unwrap())
            .unwrap()
            .run(&p)
            .unwrap();
        assert_eq!(res.trials[2].x, 0.0);
        assert_eq!(res.status, RunStatus::Converged);
    }

    #[test]
    fn underestimated_constant_surfaces_as_error() {
        let p = Problem::new("steep", 0.0, 1.0, |x| 10.0 * x)
            .unwrap()
            .with_lipschitz(1.0)
            .unwrap();
        let method = make_method(MethodConfig::from_label("PKC").unwrap()).unwrap();
        assert!(matches!(
            method.run(&p),
            Err(SolveError::Run(
                crate::problem::RunError::EstimateViolated { .. }
            ))
        ));
    }
}
