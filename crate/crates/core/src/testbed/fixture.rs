//! Line-oriented `key = value` problem fixtures.
//!
//! ```text
//! # comment
//! name = shifted_square
//! interval = -1 2
//! expr = (x - 0.5)^2
//! lipschitz_f = 3        # optional
//! lipschitz_df = 2       # optional
//! known_min_x = 0.5      # optional
//! known_min_f = 0        # optional
//! ```

use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use super::diff::differentiate;
use super::expr::{parse_expression, Expr, ParseError};
use crate::problem::{Problem, ProblemError};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("line {line}: {source}")]
    Expression {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Parsed fixture contents.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub expr: Expr,
    /// `None` when the expression uses a non-differentiable primitive.
    pub derivative: Option<Expr>,
    pub lipschitz_f: Option<f64>,
    pub lipschitz_df: Option<f64>,
    pub known_min_x: Option<f64>,
    pub known_min_f: Option<f64>,
}

fn number(line: usize, text: &str) -> Result<f64, FixtureError> {
    text.replace('\u{2212}', "-")
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| FixtureError::Line {
            line,
            message: format!("`{text}` is not a finite number"),
        })
}

fn set<T>(slot: &mut Option<T>, value: T, key: &str, line: usize) -> Result<(), FixtureError> {
    if slot.replace(value).is_some() {
        return Err(FixtureError::Line {
            line,
            message: format!("duplicate key `{key}`"),
        });
    }
    Ok(())
}

pub fn parse_fixture(text: &str) -> Result<Fixture, FixtureError> {
    let mut name = None;
    let mut interval = None;
    let mut expr = None;
    let mut lipschitz_f = None;
    let mut lipschitz_df = None;
    let mut known_min_x = None;
    let mut known_min_f = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| FixtureError::Line {
            line,
            message: "expected `key = value`".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "name" => {
                let valid = !value.is_empty()
                    && value
                        .chars()
                        .all(|c| c.is_alphanumeric() || "_-.".contains(c));
                if !valid {
                    return Err(FixtureError::Line {
                        line,
                        message: format!("`{value}` is not a valid identifier"),
                    });
                }
                set(&mut name, value.to_string(), key, line)?;
            }
            "interval" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(FixtureError::Line {
                        line,
                        message: "interval needs exactly two numbers".into(),
                    });
                }
                let (a, b) = (number(line, parts[0])?, number(line, parts[1])?);
                if a >= b {
                    return Err(FixtureError::Line {
                        line,
                        message: format!("interval [{a}, {b}] must satisfy a < b"),
                    });
                }
                set(&mut interval, (a, b), key, line)?;
            }
            "expr" => {
                let parsed = parse_expression(value)
                    .map_err(|source| FixtureError::Expression { line, source })?;
                set(&mut expr, parsed, key, line)?;
            }
            "lipschitz_f" | "lipschitz_df" => {
                let v = number(line, value)?;
                if v <= 0.0 {
                    return Err(FixtureError::Line {
                        line,
                        message: format!("{key} must be positive"),
                    });
                }
                let slot = if key == "lipschitz_f" {
                    &mut lipschitz_f
                } else {
                    &mut lipschitz_df
                };
                set(slot, v, key, line)?;
            }
            "known_min_x" => set(&mut known_min_x, number(line, value)?, key, line)?,
            "known_min_f" => set(&mut known_min_f, number(line, value)?, key, line)?,
            other => {
                return Err(FixtureError::Line {
                    line,
                    message: format!("unknown key `{other}`"),
                })
            }
        }
    }

    let expr = expr.ok_or(FixtureError::Missing("expr"))?;
    let (a, b) = interval.ok_or(FixtureError::Missing("interval"))?;
    Ok(Fixture {
        name: name.ok_or(FixtureError::Missing("name"))?,
        a,
        b,
        derivative: differentiate(&expr).ok(),
        expr,
        lipschitz_f,
        lipschitz_df,
        known_min_x,
        known_min_f,
    })
}

impl Fixture {
    pub fn to_problem(&self) -> Result<Problem, FixtureError> {
        let f = Arc::new(self.expr.clone());
        let mut problem = Problem::new(self.name.clone(), self.a, self.b, move |x| {
            f.eval(x).unwrap_or(f64::NAN)
        })?
        .with_known_minimum(self.known_min_x, self.known_min_f);
        if let Some(df) = &self.derivative {
            let df = Arc::new(df.clone());
            problem = problem.with_derivative(move |x| df.eval(x).unwrap_or(f64::NAN));
        }
        if let Some(l) = self.lipschitz_f {
            problem = problem.with_lipschitz(l)?;
        }
        if let Some(m) = self.lipschitz_df {
            problem = problem.with_derivative_lipschitz(m)?;
        }
        Ok(problem)
    }
}

pub fn read_fixture(path: impl AsRef<Path>) -> Result<Fixture, FixtureError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| FixtureError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_fixture(&text)
}

pub fn load_fixture(path: impl AsRef<Path>) -> Result<Problem, FixtureError> {
    read_fixture(path)?.to_problem()
}

/// Loads every `*.fixture` file in a directory, sorted by file name.
pub fn load_fixture_dir(dir: impl AsRef<Path>) -> Result<Vec<Fixture>, FixtureError> {
    let dir = dir.as_ref();
    let io = |source| FixtureError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "fixture"))
        .collect();
    paths.sort();
    paths.iter().map(read_fixture).collect()
}
