//! Piece-wise linear minorants built from a Lipschitz bound on `f`.

use crate::engine::{interior_or_midpoint, IntervalEnds, IntervalTable, SchemeHooks};
use crate::estimate::{global_estimate, local_tuning};
use crate::problem::Estimator;

/// Scratch data for one interval of the linear scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearInterval {
    /// `|z1 - z0| / (x1 - x0)`.
    pub rate: f64,
    pub lambda: f64,
    pub gamma: f64,
    /// Lipschitz estimate `l` in force.
    pub estimate: f64,
    pub characteristic: f64,
}

/// Divided-difference magnitude of `f` over an interval.
pub fn rate_h(x0: f64, x1: f64, z0: f64, z1: f64) -> f64 {
    assert!(x1 > x0, "zero-width interval [{x0}, {x1}]");
    (z1 - z0).abs() / (x1 - x0)
}

pub fn rates(table: &IntervalTable) -> Vec<f64> {
    let (xs, zs) = (table.xs(), table.zs());
    (0..table.interval_count())
        .map(|j| rate_h(xs[j], xs[j + 1], zs[j], zs[j + 1]))
        .collect()
}

/// Rounding-error bound on [`rate_h`].
pub fn rate_slack(ends: &IntervalEnds) -> f64 {
    8.0 * f64::EPSILON * (ends.z0.abs() + ends.z1.abs()) / ends.width()
}

/// Minimum of the tent `max(z0 - l(x - x0), z1 + l(x - x1))` over the interval.
pub fn characteristic(ends: &IntervalEnds, l: f64) -> f64 {
    0.5 * (ends.z0 + ends.z1) - 0.5 * l * ends.width()
}

/// Abscissa where the tent attains its minimum.
pub fn place_trial(ends: &IntervalEnds, l: f64) -> f64 {
    0.5 * (ends.x0 + ends.x1) + (ends.z0 - ends.z1) / (2.0 * l)
}

/// The tent function of one interval.
pub fn tent(ends: &IntervalEnds, l: f64, x: f64) -> f64 {
    (ends.z0 - l * (x - ends.x0)).max(ends.z1 + l * (x - ends.x1))
}

/// Evaluates the auxiliary function `C^k(x)` given the per-interval
/// estimates in force.
pub fn eval_lower_bound(table: &IntervalTable, estimates: &[f64], x: f64) -> f64 {
    let xs = table.xs();
    let j = xs
        .partition_point(|&xi| xi <= x)
        .clamp(1, table.interval_count())
        - 1;
    tent(&table.interval(j), estimates[j], x)
}

/// Hooks for the linear scheme with one of the three estimators.
#[derive(Debug, Clone, Copy)]
pub struct LinearScheme {
    pub estimator: Estimator,
    pub r: f64,
    pub xi: f64,
    /// Used by [`Estimator::KnownConstant`].
    pub known_l: f64,
}

impl LinearScheme {
    pub fn estimates(&self, table: &IntervalTable, rates: &[f64]) -> Vec<(f64, f64, f64)> {
        match self.estimator {
            Estimator::KnownConstant => vec![(0.0, 0.0, self.known_l); rates.len()],
            Estimator::GlobalEstimate => {
                vec![(0.0, 0.0, global_estimate(rates, self.r, self.xi)); rates.len()]
            }
            Estimator::LocalTuning => {
                let widths: Vec<f64> = (0..table.interval_count())
                    .map(|j| table.width(j))
                    .collect();
                local_tuning(rates, &widths, self.r, self.xi)
                    .into_iter()
                    .map(|e| (e.lambda, e.gamma, e.value))
                    .collect()
            }
        }
    }
}

impl SchemeHooks for LinearScheme {
    type Interval = LinearInterval;

    fn refresh(&self, table: &IntervalTable) -> Vec<LinearInterval> {
        let rates = rates(table);
        self.estimates(table, &rates)
            .into_iter()
            .enumerate()
            .map(|(j, (lambda, gamma, l))| LinearInterval {
                rate: rates[j],
                lambda,
                gamma,
                estimate: l,
                characteristic: characteristic(&table.interval(j), l),
            })
            .collect()
    }

    fn characteristic(interval: &LinearInterval) -> f64 {
        interval.characteristic
    }

    fn place(&self, table: &IntervalTable, t: usize, interval: &LinearInterval) -> f64 {
        let ends = table.interval(t);
        let x = place_trial(&ends, interval.estimate);
        interior_or_midpoint(
            &ends,
            x,
            interval.estimate,
            interval.rate,
            rate_slack(&ends),
        )
    }

    fn needs_derivative(&self) -> bool {
        false
    }
}
