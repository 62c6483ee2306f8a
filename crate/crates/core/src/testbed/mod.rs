//! Test problems: the randomized `[-5, 5]` class, expression-defined
//! fixtures, and the symbolic differentiator that supplies their
//! derivatives.

pub mod diff;
pub mod expr;
pub mod fixture;
pub mod pinter;

pub use diff::{differentiate, NonDifferentiable};
pub use expr::{parse_expression, EvalError, Expr, ParseError};
pub use fixture::{
    load_fixture, load_fixture_dir, parse_fixture, read_fixture, Fixture, FixtureError,
};
pub use pinter::{pinter_problem, pinter_suite, PinterInstance};
