//! Smooth piece-wise quadratic minorants built from a Lipschitz bound `m`
//! on `f'`.
//!
//! On an interval `[x0, x1]` the support function `psi` is made of three
//! pieces: the concave parabola `phi0` hanging from the left trial, a convex
//! parabola `pi` with curvature `m`, and the concave parabola `phi1` hanging
//! from the right trial. `pi` touches `phi0` at `y'` and `phi1` at `y` with
//! matching value and slope, so `psi` is C¹.

use thiserror::Error;

use crate::engine::{interior_or_midpoint, IntervalEnds, IntervalTable, SchemeHooks};
use crate::estimate::{global_estimate, local_tuning};
use crate::problem::Estimator;

/// Curvature rate of an interval and the square-root term it is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureRate {
    pub v: f64,
    pub d: f64,
}

/// Smallest curvature compatible with the values and slopes at both ends.
pub fn rate_v(ends: &IntervalEnds) -> CurvatureRate {
    let w = ends.width();
    assert!(w > 0.0, "zero-width interval [{}, {}]", ends.x0, ends.x1);
    let chord = (2.0 * (ends.z0 - ends.z1) + (ends.dz0 + ends.dz1) * w).abs();
    let slope = (ends.dz1 - ends.dz0) * w;
    let d = chord.hypot(slope);
    CurvatureRate {
        v: (chord + d) / (w * w),
        d,
    }
}

/// Rounding-error bound on [`rate_v`].
pub fn rate_slack(ends: &IntervalEnds) -> f64 {
    let w = ends.width();
    let magnitude = 2.0 * (ends.z0.abs() + ends.z1.abs()) + (ends.dz0.abs() + ends.dz1.abs()) * w;
    16.0 * f64::EPSILON * magnitude / (w * w)
}

pub fn rates(table: &IntervalTable) -> Vec<CurvatureRate> {
    (0..table.interval_count())
        .map(|j| rate_v(&table.interval(j)))
        .collect()
}

/// Which piece of `psi` holds its minimum, deciding where the next trial
/// goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// `pi'` changes sign on `[y', y]`; the trial goes to the vertex.
    Interior,
    /// `psi` is monotone and `z0 < z1`; the trial goes to `y'`.
    LeftContact,
    /// `psi` is monotone and `z0 >= z1`; the trial goes to `y`.
    RightContact,
}

/// Contact points and vertex of the middle parabola.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportGeometry {
    pub m: f64,
    /// Contact with the left parabola.
    pub y_prime: f64,
    /// Contact with the right parabola.
    pub y: f64,
    /// Vertex of the middle parabola.
    pub x_bar: f64,
    /// `phi1(y)`: value of the middle parabola at `y`.
    pub anchor_value: f64,
    /// `phi1'(y)`: slope of the middle parabola at `y`.
    pub anchor_slope: f64,
}

impl SupportGeometry {
    /// Value of the middle parabola.
    pub fn pi(&self, x: f64) -> f64 {
        let u = x - self.y;
        self.anchor_value + self.anchor_slope * u + 0.5 * self.m * u * u
    }

    pub fn pi_slope(&self, x: f64) -> f64 {
        self.anchor_slope + self.m * (x - self.y)
    }

    /// `pi'(x) = m (x - x_bar)`.
    pub fn pi_slope_from_vertex(&self, x: f64) -> f64 {
        self.m * (x - self.x_bar)
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum GeometryError {
    #[error("degenerate geometry: denominator {denominator} does not exceed {guard}")]
    Degenerate { denominator: f64, guard: f64 },
    #[error("x = {x} lies outside the interval [{x0}, {x1}]")]
    OutsideInterval { x: f64, x0: f64, x1: f64 },
}

/// Value and slope of the concave parabola hanging from the left trial.
pub fn phi_left(ends: &IntervalEnds, m: f64, x: f64) -> (f64, f64) {
    let u = x - ends.x0;
    (ends.z0 + ends.dz0 * u - 0.5 * m * u * u, ends.dz0 - m * u)
}

/// Value and slope of the concave parabola hanging from the right trial.
pub fn phi_right(ends: &IntervalEnds, m: f64, x: f64) -> (f64, f64) {
    let u = ends.x1 - x;
    (ends.z1 - ends.dz1 * u - 0.5 * m * u * u, ends.dz1 + m * u)
}

/// Solves for the contact points and the vertex of the middle parabola.
///
/// The closed-form contact points are evaluated in coordinates local to
/// `x0`, which is algebraically identical and avoids cancellation in
/// `x1² - x0²` on narrow intervals far from the origin.
pub fn support_geometry(ends: &IntervalEnds, m: f64) -> Result<SupportGeometry, GeometryError> {
    let w = ends.width();
    let dslope = ends.dz1 - ends.dz0;
    let denominator = m * w + dslope;
    let guard = 1e-12 * (m * w).max(1.0);
    if denominator.is_nan() || denominator <= guard {
        return Err(GeometryError::Degenerate { denominator, guard });
    }
    let numerator = ends.z0 - ends.z1 + ends.dz1 * w + 0.5 * m * w * w;
    let centre = ends.x0 + numerator / denominator;
    let half_gap = 0.25 * w + dslope / (4.0 * m);
    let y = centre + half_gap;
    let y_prime = centre - half_gap;
    let x_bar = 2.0 * y - ends.dz1 / m - ends.x1;
    let (anchor_value, anchor_slope) = phi_right(ends, m, y);
    Ok(SupportGeometry {
        m,
        y_prime,
        y,
        x_bar,
        anchor_value,
        anchor_slope,
    })
}

/// Characteristic (minimum of `psi`) and case tag of an interval.
pub fn classify_and_characterize(
    ends: &IntervalEnds,
    geometry: &SupportGeometry,
) -> (f64, CaseTag) {
    let left = geometry.pi_slope_from_vertex(geometry.y_prime);
    let right = geometry.pi_slope_from_vertex(geometry.y);
    if left * right < 0.0 {
        let vertex_value = geometry.pi(geometry.x_bar);
        (ends.z0.min(vertex_value).min(ends.z1), CaseTag::Interior)
    } else if ends.z0 < ends.z1 {
        (ends.z0.min(ends.z1), CaseTag::LeftContact)
    } else {
        (ends.z0.min(ends.z1), CaseTag::RightContact)
    }
}

pub fn place_trial_smooth(case: CaseTag, geometry: &SupportGeometry) -> f64 {
    match case {
        CaseTag::LeftContact => geometry.y_prime,
        CaseTag::Interior => geometry.x_bar,
        CaseTag::RightContact => geometry.y,
    }
}

/// Value and slope of the support function `psi` at `x`.
pub fn eval_support(
    ends: &IntervalEnds,
    geometry: &SupportGeometry,
    x: f64,
) -> Result<(f64, f64), GeometryError> {
    if !(x >= ends.x0 && x <= ends.x1) {
        return Err(GeometryError::OutsideInterval {
            x,
            x0: ends.x0,
            x1: ends.x1,
        });
    }
    Ok(if x <= geometry.y_prime {
        phi_left(ends, geometry.m, x)
    } else if x <= geometry.y {
        (geometry.pi(x), geometry.pi_slope(x))
    } else {
        phi_right(ends, geometry.m, x)
    })
}

/// The non-smooth minorant `max(phi0(x), phi1(x))`.
pub fn eval_nonsmooth_bound(ends: &IntervalEnds, m: f64, x: f64) -> f64 {
    phi_left(ends, m, x).0.max(phi_right(ends, m, x).0)
}

/// Scratch data for one interval of the derivative scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothInterval {
    pub rate: CurvatureRate,
    pub lambda: f64,
    pub gamma: f64,
    /// Estimate `m` in force.
    pub estimate: f64,
    /// `None` when the geometry denominator vanished; the interval is then
    /// split at its midpoint.
    pub geometry: Option<SupportGeometry>,
    pub case: Option<CaseTag>,
    pub characteristic: f64,
}

/// Hooks for the derivative scheme with one of the three estimators.
#[derive(Debug, Clone, Copy)]
pub struct SmoothScheme {
    pub estimator: Estimator,
    pub r: f64,
    pub xi: f64,
    /// Used by [`Estimator::KnownConstant`].
    pub known_m: f64,
}

impl SchemeHooks for SmoothScheme {
    type Interval = SmoothInterval;

    fn refresh(&self, table: &IntervalTable) -> Vec<SmoothInterval> {
        let rates = rates(table);
        let vs: Vec<f64> = rates.iter().map(|r| r.v).collect();
        let estimates: Vec<(f64, f64, f64)> = match self.estimator {
            Estimator::KnownConstant => vec![(0.0, 0.0, self.known_m); vs.len()],
            Estimator::GlobalEstimate => {
                vec![(0.0, 0.0, global_estimate(&vs, self.r, self.xi)); vs.len()]
            }
            Estimator::LocalTuning => {
                let widths: Vec<f64> = (0..table.interval_count())
                    .map(|j| table.width(j))
                    .collect();
                local_tuning(&vs, &widths, self.r, self.xi)
                    .into_iter()
                    .map(|e| (e.lambda, e.gamma, e.value))
                    .collect()
            }
        };
        estimates
            .into_iter()
            .enumerate()
            .map(|(j, (lambda, gamma, m))| {
                let ends = table.interval(j);
                let geometry = support_geometry(&ends, m).ok();
                let (characteristic, case) = match &geometry {
                    Some(g) => {
                        let (r, case) = classify_and_characterize(&ends, g);
                        (r, Some(case))
                    }
                    None => (ends.z0.min(ends.z1), None),
                };
                SmoothInterval {
                    rate: rates[j],
                    lambda,
                    gamma,
                    estimate: m,
                    geometry,
                    case,
                    characteristic,
                }
            })
            .collect()
    }

    fn characteristic(interval: &SmoothInterval) -> f64 {
        interval.characteristic
    }

    fn place(&self, table: &IntervalTable, t: usize, interval: &SmoothInterval) -> f64 {
        let ends = table.interval(t);
        match (interval.case, &interval.geometry) {
            (Some(case), Some(g)) => {
                let x = place_trial_smooth(case, g);
                interior_or_midpoint(
                    &ends,
                    x,
                    interval.estimate,
                    interval.rate.v,
                    rate_slack(&ends),
                )
            }
            _ => 0.5 * (ends.x0 + ends.x1),
        }
    }

    fn needs_derivative(&self) -> bool {
        true
    }
}

/// Lower bound on the relative distance of `y'` and `y` from the interval
/// ends guaranteed by estimates of the form `m >= r * v`.
pub fn contact_margin(r: f64) -> f64 {
    (r - 1.0).powi(2) / (4.0 * r * (r + 1.0))
}
