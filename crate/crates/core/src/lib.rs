//! Univariate Lipschitz global optimization.
//!
//! Two families of methods minimize `f` over `[a, b]`:
//!
//! * the linear scheme (`PKC`, `GE`, `LT` and their `_LI` variants) builds
//!   piece-wise linear minorants from a Lipschitz bound on `f`;
//! * the derivative scheme (`DKC`, `DGE`, `DLT` and their `_LI` variants)
//!   builds smooth piece-wise quadratic minorants from a Lipschitz bound on
//!   `f'`.
//!
//! The bound is either known (`KC`), estimated globally (`GE`) or tuned per
//! interval (`LT`). The `_LI` variants alternate global steps with local
//! improvement around the incumbent.
//!
//! ```
//! use unilip::{make_method, MethodConfig, Problem};
//!
//! let p = Problem::new("quad", -1.0, 2.0, |x| (x - 0.3) * (x - 0.3)).unwrap();
//! let method = make_method(MethodConfig::from_label("LT_LI").unwrap()).unwrap();
//! let result = method.run(&p).unwrap();
//! assert!((result.best_x - 0.3).abs() < 1e-3);
//! ```

pub mod bench;
pub mod engine;
pub mod estimate;
pub mod linear;
pub mod method;
pub mod oracle;
pub mod problem;
pub mod smooth;
pub mod testbed;

pub use method::{make_method, IntervalData, IterationView, Method};
pub use problem::{
    validate_problem, ConfigError, Estimator, Exhausted, MethodConfig, MethodId, Problem,
    ProblemError, Rejection, RunError, RunResult, RunStatus, Scheme, Selector, SolveError, Trial,
};
