//! Brute-force ground truth on a uniform grid: the grid minimum and sampled
//! Lipschitz constants of `f` and `f'`.

use rayon::prelude::*;
use thiserror::Error;

use crate::problem::Problem;

/// Multiplier applied to sampled constants so they over-estimate the true
/// supremum of the divided differences.
pub const SAFETY_FACTOR: f64 = 1.01;

/// Default number of grid points, endpoints included.
pub const DEFAULT_GRID: usize = 1_000_001;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("grid needs at least 2 points, got {0}")]
    GridTooSmall(usize),
    #[error("non-finite {quantity} value at x = {x}")]
    NonFinite { x: f64, quantity: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub grid_n: usize,
    pub x_min: f64,
    pub f_min: f64,
    /// Sampled Lipschitz constant of `f`, safety factor included.
    pub l_hat: f64,
    /// Sampled Lipschitz constant of `f'`, safety factor included.
    pub m_hat: Option<f64>,
}

fn grid(problem: &Problem, n: usize) -> Result<Vec<f64>, OracleError> {
    if n < 2 {
        return Err(OracleError::GridTooSmall(n));
    }
    let (a, b) = (problem.a(), problem.b());
    let h = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
        .collect())
}

fn sample(
    xs: &[f64],
    f: &(dyn Fn(f64) -> f64 + Send + Sync),
    quantity: &'static str,
) -> Result<Vec<f64>, OracleError> {
    let values: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect();
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(OracleError::NonFinite { x: xs[i], quantity }),
        None => Ok(values),
    }
}

fn argmin(xs: &[f64], values: &[f64]) -> (f64, f64) {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    (xs[best], values[best])
}

fn max_slope(xs: &[f64], values: &[f64]) -> f64 {
    xs.windows(2)
        .zip(values.windows(2))
        .map(|(x, v)| (v[1] - v[0]).abs() / (x[1] - x[0]))
        .fold(0.0, f64::max)
}

/// Smallest sampled value of `f` on an `n`-point uniform grid; ties go to
/// the smallest abscissa.
pub fn grid_min(problem: &Problem, n: usize) -> Result<(f64, f64), OracleError> {
    let xs = grid(problem, n)?;
    let values = sample(&xs, problem.objective().as_ref(), "objective")?;
    Ok(argmin(&xs, &values))
}

/// Sampled Lipschitz constants of `f` and (when available) `f'`, each
/// multiplied by [`SAFETY_FACTOR`].
pub fn estimate_constants(problem: &Problem, n: usize) -> Result<(f64, Option<f64>), OracleError> {
    let report = report(problem, n)?;
    Ok((report.l_hat, report.m_hat))
}

/// Grid minimum and sampled constants in a single pass over the grid.
pub fn report(problem: &Problem, n: usize) -> Result<OracleReport, OracleError> {
    let xs = grid(problem, n)?;
    let values = sample(&xs, problem.objective().as_ref(), "objective")?;
    let (x_min, f_min) = argmin(&xs, &values);
    let l_hat = SAFETY_FACTOR * max_slope(&xs, &values);
    let m_hat = match problem.derivative() {
        Some(df) => {
            let slopes = sample(&xs, df.as_ref(), "derivative")?;
            Some(SAFETY_FACTOR * max_slope(&xs, &slopes))
        }
        None => None,
    };
    Ok(OracleReport {
        grid_n: n,
        x_min,
        f_min,
        l_hat,
        m_hat,
    })
}

/// Returns `problem` with any missing known constants filled in from the
/// oracle.
pub fn with_oracle_constants(problem: &Problem, n: usize) -> Result<Problem, OracleError> {
    let mut p = problem.clone();
    if p.known_lipschitz().is_some()
        && (p.known_derivative_lipschitz().is_some() || !p.has_derivative())
    {
        return Ok(p);
    }
    let report = report(problem, n)?;
    if p.known_lipschitz().is_none() && report.l_hat > 0.0 {
        p = p.with_lipschitz(report.l_hat).expect("positive");
    }
    if p.known_derivative_lipschitz().is_none() {
        if let Some(m) = report.m_hat.filter(|m| *m > 0.0) {
            p = p.with_derivative_lipschitz(m).expect("positive");
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_minimum() {
        let p = Problem::new("sq", -1.0, 2.0, |x| x * x).unwrap();
        let (x, f) = grid_min(&p, 3001).unwrap();
        assert!(x.abs() <= 1e-3);
        assert!(f <= 1e-6);
    }

    #[test]
    fn constant_function_picks_left_end() {
        let p = Problem::new("c", 2.0, 5.0, |_| 1.5).unwrap();
        assert_eq!(grid_min(&p, 101).unwrap(), (2.0, 1.5));
    }

    #[test]
    fn linear_slope() {
        let p = Problem::new("lin", 0.0, 1.0, |x| 3.0 * x).unwrap();
        let (l, m) = estimate_constants(&p, 1001).unwrap();
        assert!((l - 3.0 * 1.01).abs() < 1e-9);
        assert!(m.is_none());
    }

    #[test]
    fn quadratic_curvature() {
        let (c, q, n0) = (3.7, -1.2, 0.4);
        let p = Problem::new("q", -2.0, 3.0, move |x| 0.5 * c * x * x + q * x + n0)
            .unwrap()
            .with_derivative(move |x| c * x + q);
        let (_, m) = estimate_constants(&p, 10_001).unwrap();
        let m = m.unwrap();
        assert!((m / (c * 1.01) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sine_slope() {
        let p = Problem::new("sin", 0.0, std::f64::consts::TAU, f64::sin).unwrap();
        let (l, _) = estimate_constants(&p, 100_001).unwrap();
        assert!((1.0..=1.02).contains(&l), "{l}");
    }

    #[test]
    fn errors() {
        let p = Problem::new("s", 0.0, 1.0, |x| x).unwrap();
        assert_eq!(grid_min(&p, 1), Err(OracleError::GridTooSmall(1)));
        let p = Problem::new("log", -1.0, 1.0, f64::ln).unwrap();
        assert!(matches!(grid_min(&p, 11), Err(OracleError::NonFinite { x, .. }) if x == -1.0));
    }

    #[test]
    fn sampled_constant_stabilizes_with_grid_size() {
        let p = Problem::new("w", -3.0, 4.0, |x: f64| (2.0 * x).sin() + 0.3 * x * x).unwrap();
        let (l1, _) = estimate_constants(&p, 5_001).unwrap();
        let (l2, _) = estimate_constants(&p, 10_001).unwrap();
        assert!(l2 >= l1 / 1.001);
    }
}
