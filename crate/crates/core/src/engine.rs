//! Scheme-agnostic outer loop shared by the linear and derivative schemes.
//!
//! Intervals are indexed from zero: interval `j` is `[xs[j], xs[j + 1]]`,
//! so a table with `k` trials has `k - 1` intervals. Trial positions in the
//! sorted order are also zero-based.

use crate::problem::{
    Exhausted, MethodConfig, Problem, RunError, RunResult, RunStatus, Selector, Trial,
};

/// Sorted trial abscissas with their values (and derivatives, when the
/// scheme evaluates them).
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalTable {
    xs: Vec<f64>,
    zs: Vec<f64>,
    dzs: Option<Vec<f64>>,
}

impl IntervalTable {
    /// Starts a table from the two endpoint trials.
    pub fn from_endpoints(left: Trial, right: Trial) -> Self {
        debug_assert!(left.x < right.x);
        let dzs = match (left.dz, right.dz) {
            (Some(l), Some(r)) => Some(vec![l, r]),
            _ => None,
        };
        Self {
            xs: vec![left.x, right.x],
            zs: vec![left.z, right.z],
            dzs,
        }
    }

    /// Builds a table from already sorted, strictly increasing data.
    pub fn from_sorted(xs: Vec<f64>, zs: Vec<f64>, dzs: Option<Vec<f64>>) -> Self {
        assert!(xs.len() >= 2 && xs.len() == zs.len());
        assert!(
            xs.windows(2).all(|w| w[0] < w[1]),
            "abscissas must increase"
        );
        if let Some(d) = &dzs {
            assert_eq!(d.len(), xs.len());
        }
        Self { xs, zs, dzs }
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn zs(&self) -> &[f64] {
        &self.zs
    }

    pub fn dzs(&self) -> Option<&[f64]> {
        self.dzs.as_deref()
    }

    /// Number of trials `k`.
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn interval_count(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn width(&self, j: usize) -> f64 {
        self.xs[j + 1] - self.xs[j]
    }

    /// Largest interval width, `X^max`.
    pub fn max_width(&self) -> f64 {
        (0..self.interval_count())
            .map(|j| self.width(j))
            .fold(0.0, f64::max)
    }

    pub fn interval(&self, j: usize) -> IntervalEnds {
        IntervalEnds {
            x0: self.xs[j],
            x1: self.xs[j + 1],
            z0: self.zs[j],
            z1: self.zs[j + 1],
            dz0: self.dzs.as_ref().map_or(f64::NAN, |d| d[j]),
            dz1: self.dzs.as_ref().map_or(f64::NAN, |d| d[j + 1]),
        }
    }

    /// Inserts a trial and returns its position in the sorted order.
    ///
    /// Fails when `x` coincides with an existing abscissa or lies outside
    /// `[xs[0], xs[k-1]]`.
    pub fn insert(&mut self, x: f64, z: f64, dz: Option<f64>) -> Result<usize, RunError> {
        let pos = self.xs.partition_point(|&xi| xi < x);
        if pos == 0 || pos == self.xs.len() || self.xs[pos] == x {
            return Err(RunError::DegeneratePlacement { x });
        }
        self.xs.insert(pos, x);
        self.zs.insert(pos, z);
        if let Some(d) = self.dzs.as_mut() {
            d.insert(pos, dz.unwrap_or(f64::NAN));
        }
        Ok(pos)
    }
}

/// Values at the two ends of one interval. `dz0`/`dz1` are NaN when the
/// table carries no derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalEnds {
    pub x0: f64,
    pub x1: f64,
    pub z0: f64,
    pub z1: f64,
    pub dz0: f64,
    pub dz1: f64,
}

impl IntervalEnds {
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }
}

/// Per-scheme callbacks: rate/estimate/characteristic refresh and point
/// placement.
pub trait SchemeHooks {
    type Interval: Clone;

    /// Recomputes scratch data for every interval of the table.
    fn refresh(&self, table: &IntervalTable) -> Vec<Self::Interval>;

    fn characteristic(interval: &Self::Interval) -> f64;

    /// Proposes the next trial inside interval `t`.
    fn place(&self, table: &IntervalTable, t: usize, interval: &Self::Interval) -> f64;

    fn needs_derivative(&self) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

impl Side {
    pub fn opposite(self) -> Self {
        match self {
            Side::Right => Side::Left,
            Side::Left => Side::Right,
        }
    }
}

/// Bookkeeping for the local-improvement selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectorState {
    /// `true` means the next selection is a local-improvement step.
    pub flag: bool,
    /// Sorted position of the incumbent (best) trial.
    pub imin: usize,
    pub side: Side,
    /// Sorted position of the most recent trial.
    pub last_trial_index: usize,
}

impl SelectorState {
    /// State after the two endpoint trials; ties keep the left endpoint.
    pub fn initial(table: &IntervalTable) -> Self {
        let zs = table.zs();
        let imin = if zs[1] < zs[0] { 1 } else { 0 };
        Self {
            flag: false,
            imin,
            side: Side::Right,
            last_trial_index: 1,
        }
    }

    /// Shifts indices after a trial was inserted at `pos` and adopts it as
    /// incumbent if strictly better.
    pub fn record_insertion(&mut self, table: &IntervalTable, pos: usize) {
        if pos <= self.imin {
            self.imin += 1;
        }
        self.last_trial_index = pos;
        if table.zs()[pos] < table.zs()[self.imin] {
            self.imin = pos;
        }
    }
}

/// Trials closer than this fraction of the width to an end of their
/// interval are moved to the midpoint.
pub const END_MARGIN: f64 = 1e-9;

/// Guards placements against tight bounds, whose minima sit on (or within
/// rounding of) an end of the interval. Such placements move to the
/// midpoint. A placement outside the interval with an estimate below the
/// rate by more than `slack` is returned unchanged so that the engine
/// reports the violated estimate.
pub fn interior_or_midpoint(
    ends: &IntervalEnds,
    x: f64,
    estimate: f64,
    rate: f64,
    slack: f64,
) -> f64 {
    let inside = x > ends.x0 && x < ends.x1;
    if !inside && estimate < rate - slack {
        return x;
    }
    let margin = END_MARGIN * ends.width();
    if x - ends.x0 <= margin || ends.x1 - x <= margin {
        0.5 * (ends.x0 + ends.x1)
    } else {
        x
    }
}

/// Index of the smallest characteristic; ties go to the smallest index.
pub fn select_min_characteristic(characteristics: &[f64]) -> usize {
    assert!(!characteristics.is_empty());
    let mut best = 0;
    for (j, &r) in characteristics.iter().enumerate().skip(1) {
        if r < characteristics[best] {
            best = j;
        }
    }
    best
}

/// Result of an interval selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub interval: usize,
    pub pick: Pick,
}

/// Which rule produced a [`Selection`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pick {
    MinCharacteristic,
    /// Local improvement, interval wider than `delta`.
    Local,
    /// Local improvement with both neighbours of the incumbent no wider
    /// than `delta` (see [`Exhausted::Adjacent`]).
    Exhausted,
}

impl Selection {
    pub fn global(characteristics: &[f64]) -> Self {
        Self {
            interval: select_min_characteristic(characteristics),
            pick: Pick::MinCharacteristic,
        }
    }
}

/// Alternates minimal-characteristic steps with steps that subdivide an
/// interval adjacent to the incumbent.
///
/// When both neighbours of the incumbent are no wider than `delta` the
/// minimal-characteristic rule is used for that step.
pub fn select_local_improvement(
    table: &IntervalTable,
    characteristics: &[f64],
    state: SelectorState,
    delta: f64,
    exhausted: Exhausted,
) -> (Selection, SelectorState) {
    let mut next = state;
    next.flag = !state.flag;
    let global = Selection::global(characteristics);
    if !state.flag {
        return (global, next);
    }

    if table.zs()[state.last_trial_index] < table.zs()[next.imin] {
        next.imin = state.last_trial_index;
    }
    let k = table.len();
    let adjacent = |side: Side| -> usize {
        if next.imin == 0 {
            0
        } else if next.imin == k - 1 {
            k - 2
        } else {
            match side {
                Side::Right => next.imin,
                Side::Left => next.imin - 1,
            }
        }
    };
    for side in [state.side, state.side.opposite()] {
        let j = adjacent(side);
        if table.width(j) > delta {
            next.side = side.opposite();
            return (
                Selection {
                    interval: j,
                    pick: Pick::Local,
                },
                next,
            );
        }
    }
    match exhausted {
        Exhausted::Adjacent => (
            Selection {
                interval: adjacent(state.side),
                pick: Pick::Exhausted,
            },
            next,
        ),
        Exhausted::MinCharacteristic => (global, next),
    }
}

/// `true` when a selected interval of this width ends the search.
pub fn stop_check(width: f64, eps_eff: f64) -> bool {
    width <= eps_eff
}

/// What the observer sees once per iteration, after selection.
#[derive(Debug)]
pub struct Iteration<'a, D> {
    pub table: &'a IntervalTable,
    pub intervals: &'a [D],
    pub characteristics: &'a [f64],
    pub selection: Selection,
    /// Selector state the selection was made from.
    pub state: SelectorState,
    /// The next trial abscissa, or `None` when the run stops here.
    pub next_x: Option<f64>,
}

/// Runs a scheme to completion.
///
/// The caller is responsible for having validated `problem` against `config`.
pub fn run_scheme<H, O>(
    problem: &Problem,
    config: &MethodConfig,
    hooks: &H,
    mut observer: O,
) -> Result<RunResult, RunError>
where
    H: SchemeHooks,
    O: FnMut(&Iteration<'_, H::Interval>),
{
    let with_dz = hooks.needs_derivative();
    let evaluate = |x: f64| -> Result<Trial, RunError> {
        let z = problem.eval(x);
        if !z.is_finite() {
            return Err(RunError::NonFinite {
                x,
                quantity: "objective",
            });
        }
        let dz = if with_dz {
            let d = problem.eval_derivative(x).unwrap_or(f64::NAN);
            if !d.is_finite() {
                return Err(RunError::NonFinite {
                    x,
                    quantity: "derivative",
                });
            }
            Some(d)
        } else {
            None
        };
        Ok(Trial { x, z, dz })
    };

    let eps_eff = config.effective_eps(problem.width());
    let delta = config.effective_delta(problem.width());

    let mut trials = vec![evaluate(problem.a())?, evaluate(problem.b())?];
    let mut table = IntervalTable::from_endpoints(trials[0], trials[1]);
    let mut state = SelectorState::initial(&table);

    let status = loop {
        let intervals = hooks.refresh(&table);
        let characteristics: Vec<f64> = intervals.iter().map(H::characteristic).collect();
        let (selection, next_state) = match config.selector {
            Selector::MinCharacteristic => (Selection::global(&characteristics), state),
            Selector::LocalImprovement => {
                select_local_improvement(&table, &characteristics, state, delta, config.exhausted)
            }
        };
        let t = selection.interval;

        let stop = if stop_check(table.width(t), eps_eff) {
            Some(RunStatus::Converged)
        } else if trials.len() >= config.max_trials {
            Some(RunStatus::TrialCapReached)
        } else {
            None
        };
        let next_x = match stop {
            Some(_) => None,
            None => Some(hooks.place(&table, t, &intervals[t])),
        };
        observer(&Iteration {
            table: &table,
            intervals: &intervals,
            characteristics: &characteristics,
            selection,
            state,
            next_x,
        });
        if let Some(status) = stop {
            break status;
        }

        let x = next_x.expect("placement computed when continuing");
        let (lo, hi) = (table.xs()[t], table.xs()[t + 1]);
        if !(x > lo && x < hi) {
            return Err(RunError::EstimateViolated { x, lo, hi });
        }
        let trial = evaluate(x)?;
        let pos = table.insert(trial.x, trial.z, trial.dz)?;
        trials.push(trial);
        state = next_state;
        state.record_insertion(&table, pos);
    };

    let (best_x, best_f) = trials
        .iter()
        .fold((f64::NAN, f64::INFINITY), |(bx, bf), t| {
            if t.z < bf {
                (t.x, t.z)
            } else {
                (bx, bf)
            }
        });
    Ok(RunResult {
        best_x,
        best_f,
        n_trials: trials.len(),
        trials,
        status,
        method_label: config.label(),
    })
}
