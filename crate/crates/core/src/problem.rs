//! Problem, configuration and run-result types shared by both schemes.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

/// A scalar evaluator `x -> f(x)`.
///
/// Evaluators must be deterministic. A failure (domain error, overflow) is
/// reported by returning a non-finite value; the engine turns that into a
/// [`RunError::NonFinite`] naming the abscissa.
pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("interval must satisfy a < b, got [{a}, {b}]")]
    EmptyInterval { a: f64, b: f64 },
    #[error("{name} must be finite and strictly positive, got {value}")]
    NonPositiveConstant { name: &'static str, value: f64 },
}

/// A univariate minimization problem on a closed interval `[a, b]`.
#[derive(Clone)]
pub struct Problem {
    name: String,
    a: f64,
    b: f64,
    f: Evaluator,
    df: Option<Evaluator>,
    known_l: Option<f64>,
    known_m: Option<f64>,
    known_min_x: Option<f64>,
    known_min_f: Option<f64>,
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        a: f64,
        b: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, ProblemError> {
        Self::from_evaluator(name, a, b, Arc::new(f))
    }

    pub fn from_evaluator(
        name: impl Into<String>,
        a: f64,
        b: f64,
        f: Evaluator,
    ) -> Result<Self, ProblemError> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(ProblemError::EmptyInterval { a, b });
        }
        Ok(Self {
            name: name.into(),
            a,
            b,
            f,
            df: None,
            known_l: None,
            known_m: None,
            known_min_x: None,
            known_min_f: None,
        })
    }

    pub fn with_derivative(self, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.with_derivative_evaluator(Arc::new(df))
    }

    pub fn with_derivative_evaluator(mut self, df: Evaluator) -> Self {
        self.df = Some(df);
        self
    }

    /// Sets the Lipschitz constant of `f`.
    pub fn with_lipschitz(mut self, l: f64) -> Result<Self, ProblemError> {
        self.known_l = Some(positive("lipschitz_f", l)?);
        Ok(self)
    }

    /// Sets the Lipschitz constant of `f'`.
    pub fn with_derivative_lipschitz(mut self, m: f64) -> Result<Self, ProblemError> {
        self.known_m = Some(positive("lipschitz_df", m)?);
        Ok(self)
    }

    pub fn with_known_minimum(mut self, x: Option<f64>, f: Option<f64>) -> Self {
        self.known_min_x = x;
        self.known_min_f = f;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn eval_derivative(&self, x: f64) -> Option<f64> {
        self.df.as_ref().map(|df| df(x))
    }

    pub fn has_derivative(&self) -> bool {
        self.df.is_some()
    }

    pub fn objective(&self) -> &Evaluator {
        &self.f
    }

    pub fn derivative(&self) -> Option<&Evaluator> {
        self.df.as_ref()
    }

    pub fn known_lipschitz(&self) -> Option<f64> {
        self.known_l
    }

    pub fn known_derivative_lipschitz(&self) -> Option<f64> {
        self.known_m
    }

    pub fn known_min_x(&self) -> Option<f64> {
        self.known_min_x
    }

    pub fn known_min_f(&self) -> Option<f64> {
        self.known_min_f
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("has_derivative", &self.df.is_some())
            .field("known_l", &self.known_l)
            .field("known_m", &self.known_m)
            .field("known_min_x", &self.known_min_x)
            .field("known_min_f", &self.known_min_f)
            .finish()
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64, ProblemError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ProblemError::NonPositiveConstant { name, value })
    }
}

/// One evaluation of the objective (and, for [`Scheme::Derivative`], of its
/// derivative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trial {
    pub x: f64,
    pub z: f64,
    pub dz: Option<f64>,
}

/// Kind of auxiliary function a method builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Piece-wise linear minorants from a Lipschitz bound on `f`.
    Linear,
    /// Smooth piece-wise quadratic minorants from a Lipschitz bound on `f'`.
    Derivative,
}

/// How the Lipschitz constant in force on each interval is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    KnownConstant,
    GlobalEstimate,
    LocalTuning,
}

/// Interval selection policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selector {
    MinCharacteristic,
    LocalImprovement,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("reliability parameter r must exceed 1 for adaptive estimators, got {0}")]
    Reliability(f64),
    #[error("{name} must be finite and strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("max_trials must be at least 2")]
    TrialCap,
    #[error("unknown method label `{0}`")]
    UnknownLabel(String),
}

/// What local improvement does when both intervals next to the incumbent
/// are no wider than `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exhausted {
    /// Select the interval on the current side anyway. With `delta <= eps`
    /// the stopping rule then ends the search.
    #[default]
    Adjacent,
    /// Use the minimal-characteristic rule for that iteration.
    MinCharacteristic,
}

/// Full parameterization of one of the twelve methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodConfig {
    pub scheme: Scheme,
    pub estimator: Estimator,
    pub selector: Selector,
    /// Reliability parameter; ignored for [`Estimator::KnownConstant`].
    pub r: f64,
    /// Floor on rate estimates.
    pub xi: f64,
    /// Stopping accuracy.
    pub eps: f64,
    /// When set, the effective accuracy is `eps * (b - a)`.
    pub eps_relative: bool,
    /// Local-improvement width threshold. `None` means "the effective eps".
    pub delta: Option<f64>,
    pub exhausted: Exhausted,
    pub max_trials: usize,
}

pub const DEFAULT_XI: f64 = 1e-8;
pub const DEFAULT_EPS: f64 = 1e-4;
pub const DEFAULT_MAX_TRIALS: usize = 1_000_000;

impl MethodConfig {
    pub fn new(scheme: Scheme, estimator: Estimator, selector: Selector) -> Self {
        Self {
            scheme,
            estimator,
            selector,
            r: 1.1,
            xi: DEFAULT_XI,
            eps: DEFAULT_EPS,
            eps_relative: true,
            delta: None,
            exhausted: Exhausted::Adjacent,
            max_trials: DEFAULT_MAX_TRIALS,
        }
    }

    /// Builds the configuration named by a method label such as `"LT_LI"`.
    pub fn from_label(label: &str) -> Result<Self, ConfigError> {
        let id: MethodId = label.parse()?;
        Ok(Self::new(id.scheme, id.estimator, id.selector))
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = r;
        self
    }

    pub fn with_eps(mut self, eps: f64, relative: bool) -> Self {
        self.eps = eps;
        self.eps_relative = relative;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn with_exhausted(mut self, exhausted: Exhausted) -> Self {
        self.exhausted = exhausted;
        self
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    pub fn with_max_trials(mut self, max_trials: usize) -> Self {
        self.max_trials = max_trials;
        self
    }

    pub fn id(&self) -> MethodId {
        MethodId {
            scheme: self.scheme,
            estimator: self.estimator,
            selector: self.selector,
        }
    }

    pub fn label(&self) -> &'static str {
        self.id().label()
    }

    pub fn effective_eps(&self, width: f64) -> f64 {
        if self.eps_relative {
            self.eps * width
        } else {
            self.eps
        }
    }

    pub fn effective_delta(&self, width: f64) -> f64 {
        self.delta.unwrap_or_else(|| self.effective_eps(width))
    }

    pub fn uses_reliability(&self) -> bool {
        self.estimator != Estimator::KnownConstant
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.uses_reliability() && !(self.r.is_finite() && self.r > 1.0) {
            return Err(ConfigError::Reliability(self.r));
        }
        let mut checks = vec![("xi", self.xi), ("eps", self.eps)];
        if let Some(delta) = self.delta {
            checks.push(("delta", delta));
        }
        for (name, value) in checks {
            if !(value.is_finite() && value > 0.0) {
                return Err(ConfigError::NonPositive { name, value });
            }
        }
        if self.max_trials < 2 {
            return Err(ConfigError::TrialCap);
        }
        Ok(())
    }
}

/// The (scheme, estimator, selector) triple identifying one of the twelve
/// named methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MethodId {
    pub scheme: Scheme,
    pub estimator: Estimator,
    pub selector: Selector,
}

impl MethodId {
    pub const ALL: [MethodId; 12] = [
        MethodId::of(
            Scheme::Linear,
            Estimator::KnownConstant,
            Selector::MinCharacteristic,
        ),
        MethodId::of(
            Scheme::Linear,
            Estimator::GlobalEstimate,
            Selector::MinCharacteristic,
        ),
        MethodId::of(
            Scheme::Linear,
            Estimator::LocalTuning,
            Selector::MinCharacteristic,
        ),
        MethodId::of(
            Scheme::Linear,
            Estimator::KnownConstant,
            Selector::LocalImprovement,
        ),
        MethodId::of(
            Scheme::Linear,
            Estimator::GlobalEstimate,
            Selector::LocalImprovement,
        ),
        MethodId::of(
            Scheme::Linear,
            Estimator::LocalTuning,
            Selector::LocalImprovement,
        ),
        MethodId::of(
            Scheme::Derivative,
            Estimator::KnownConstant,
            Selector::MinCharacteristic,
        ),
        MethodId::of(
            Scheme::Derivative,
            Estimator::GlobalEstimate,
            Selector::MinCharacteristic,
        ),
        MethodId::of(
            Scheme::Derivative,
            Estimator::LocalTuning,
            Selector::MinCharacteristic,
        ),
        MethodId::of(
            Scheme::Derivative,
            Estimator::KnownConstant,
            Selector::LocalImprovement,
        ),
        MethodId::of(
            Scheme::Derivative,
            Estimator::GlobalEstimate,
            Selector::LocalImprovement,
        ),
        MethodId::of(
            Scheme::Derivative,
            Estimator::LocalTuning,
            Selector::LocalImprovement,
        ),
    ];

    pub const fn of(scheme: Scheme, estimator: Estimator, selector: Selector) -> Self {
        Self {
            scheme,
            estimator,
            selector,
        }
    }

    pub fn label(&self) -> &'static str {
        use Estimator::*;
        use Scheme::*;
        use Selector::*;
        match (self.scheme, self.estimator, self.selector) {
            (Linear, KnownConstant, MinCharacteristic) => "PKC",
            (Linear, GlobalEstimate, MinCharacteristic) => "GE",
            (Linear, LocalTuning, MinCharacteristic) => "LT",
            (Linear, KnownConstant, LocalImprovement) => "PKC_LI",
            (Linear, GlobalEstimate, LocalImprovement) => "GE_LI",
            (Linear, LocalTuning, LocalImprovement) => "LT_LI",
            (Derivative, KnownConstant, MinCharacteristic) => "DKC",
            (Derivative, GlobalEstimate, MinCharacteristic) => "DGE",
            (Derivative, LocalTuning, MinCharacteristic) => "DLT",
            (Derivative, KnownConstant, LocalImprovement) => "DKC_LI",
            (Derivative, GlobalEstimate, LocalImprovement) => "DGE_LI",
            (Derivative, LocalTuning, LocalImprovement) => "DLT_LI",
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MethodId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_uppercase();
        MethodId::ALL
            .into_iter()
            .find(|id| id.label() == wanted)
            .ok_or_else(|| ConfigError::UnknownLabel(s.to_string()))
    }
}

/// Why a (problem, method) pair cannot be run.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Rejection {
    #[error("derivative required: problem `{0}` has no derivative evaluator")]
    DerivativeRequired(String),
    #[error("known constant required: problem `{problem}` lacks {constant}")]
    KnownConstantRequired {
        problem: String,
        constant: &'static str,
    },
}

/// Checks that `problem` carries everything `config` needs.
pub fn validate_problem(problem: &Problem, config: &MethodConfig) -> Result<(), Rejection> {
    if config.scheme == Scheme::Derivative && !problem.has_derivative() {
        return Err(Rejection::DerivativeRequired(problem.name.clone()));
    }
    if config.estimator == Estimator::KnownConstant {
        let (present, constant) = match config.scheme {
            Scheme::Linear => (problem.known_l.is_some(), "lipschitz_f"),
            Scheme::Derivative => (problem.known_m.is_some(), "lipschitz_df"),
        };
        if !present {
            return Err(Rejection::KnownConstantRequired {
                problem: problem.name.clone(),
                constant,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("non-finite {quantity} value at x = {x}")]
    NonFinite { x: f64, quantity: &'static str },
    #[error("degenerate placement: x = {x} coincides with an existing trial")]
    DegeneratePlacement { x: f64 },
    #[error("estimate violated: placement x = {x} is outside the open interval ({lo}, {hi})")]
    EstimateViolated { x: f64, lo: f64, hi: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Rejected(#[from] Rejection),
    #[error(transparent)]
    Run(#[from] RunError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunStatus {
    Converged,
    TrialCapReached,
    Rejected,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::TrialCapReached => "trial_cap",
            RunStatus::Rejected => "rejected",
        }
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of a completed run, with the full trial trace in evaluation order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_x: f64,
    pub best_f: f64,
    pub trials: Vec<Trial>,
    pub n_trials: usize,
    pub status: RunStatus,
    pub method_label: &'static str,
}

impl RunResult {
    /// Writes the trace as CSV: `k,x,z` plus `dz` for derivative runs.
    pub fn trace_csv(&self) -> String {
        use std::fmt::Write;
        let with_dz = self.trials.iter().any(|t| t.dz.is_some());
        let mut out = String::from(if with_dz { "k,x,z,dz\n" } else { "k,x,z\n" });
        for (k, t) in self.trials.iter().enumerate() {
            let _ = write!(out, "{},{},{}", k + 1, t.x, t.z);
            if with_dz {
                let _ = write!(out, ",{}", t.dz.unwrap_or(f64::NAN));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic() -> Problem {
        Problem::new("quad", -1.0, 2.0, |x| x * x).unwrap()
    }

    #[test]
    fn labels_cover_all_twelve_methods() {
        let labels: Vec<_> = MethodId::ALL.iter().map(MethodId::label).collect();
        assert_eq!(
            labels,
            [
                "PKC", "GE", "LT", "PKC_LI", "GE_LI", "LT_LI", "DKC", "DGE", "DLT", "DKC_LI",
                "DGE_LI", "DLT_LI"
            ]
        );
        for id in MethodId::ALL {
            assert_eq!(id.label().parse::<MethodId>().unwrap(), id);
        }
        assert!("XYZ".parse::<MethodId>().is_err());
    }

    #[test]
    fn named_examples() {
        let pkc = MethodId::of(
            Scheme::Linear,
            Estimator::KnownConstant,
            Selector::MinCharacteristic,
        );
        assert_eq!(pkc.label(), "PKC");
        let dlt_li = MethodId::of(
            Scheme::Derivative,
            Estimator::LocalTuning,
            Selector::LocalImprovement,
        );
        assert_eq!(dlt_li.label(), "DLT_LI");
    }

    #[test]
    fn reliability_must_exceed_one() {
        let cfg = MethodConfig::from_label("GE").unwrap().with_r(1.0);
        assert_eq!(cfg.validate(), Err(ConfigError::Reliability(1.0)));
        // r is ignored by the known-constant estimator
        let cfg = MethodConfig::from_label("PKC").unwrap().with_r(1.0);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn rejects_bad_parameters() {
        let base = MethodConfig::from_label("LT").unwrap();
        assert!(base.with_xi(0.0).validate().is_err());
        assert!(base.with_eps(-1.0, true).validate().is_err());
        assert!(base.with_delta(f64::NAN).validate().is_err());
        assert_eq!(
            base.with_max_trials(1).validate(),
            Err(ConfigError::TrialCap)
        );
    }

    #[test]
    fn effective_tolerances() {
        let cfg = MethodConfig::from_label("LT_LI")
            .unwrap()
            .with_eps(1e-4, true);
        assert!((cfg.effective_eps(10.0) - 1e-3).abs() < 1e-18);
        assert_eq!(cfg.effective_delta(10.0), cfg.effective_eps(10.0));
        let cfg = cfg.with_eps(1e-4, false).with_delta(0.5);
        assert_eq!(cfg.effective_eps(10.0), 1e-4);
        assert_eq!(cfg.effective_delta(10.0), 0.5);
    }

    #[test]
    fn problem_invariants() {
        assert!(Problem::new("bad", 1.0, 1.0, |x| x).is_err());
        assert!(Problem::new("bad", 2.0, 1.0, |x| x).is_err());
        assert!(quadratic().with_lipschitz(0.0).is_err());
        assert!(quadratic().with_derivative_lipschitz(-2.0).is_err());
    }

    #[test]
    fn validation_examples() {
        let dge = MethodConfig::from_label("DGE").unwrap();
        assert_eq!(
            validate_problem(&quadratic(), &dge),
            Err(Rejection::DerivativeRequired("quad".into()))
        );
        let pkc = MethodConfig::from_label("PKC").unwrap();
        let err = validate_problem(&quadratic(), &pkc).unwrap_err();
        assert!(err.to_string().contains("known constant required"));

        let full = quadratic()
            .with_derivative(|x| 2.0 * x)
            .with_lipschitz(4.0)
            .unwrap()
            .with_derivative_lipschitz(2.0)
            .unwrap();
        for id in MethodId::ALL {
            let cfg = MethodConfig::new(id.scheme, id.estimator, id.selector);
            assert!(validate_problem(&full, &cfg).is_ok(), "{id}");
        }
        let dkc = MethodConfig::from_label("DKC").unwrap();
        let only_l = quadratic()
            .with_derivative(|x| 2.0 * x)
            .with_lipschitz(4.0)
            .unwrap();
        assert!(validate_problem(&only_l, &dkc).is_err());
    }
}
