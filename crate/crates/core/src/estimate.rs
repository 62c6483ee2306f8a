//! Adaptive Lipschitz estimators shared by both schemes.
//!
//! Both schemes feed per-interval rates (divided differences `H_i` for the
//! linear scheme, curvature rates `v_i` for the derivative scheme) into the
//! same global and local-tuning formulas.

/// Estimate in force on one interval together with its two local-tuning
/// components. For the global estimator `lambda` and `gamma` are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalEstimate {
    pub lambda: f64,
    pub gamma: f64,
    pub value: f64,
}

/// Largest rate over all intervals, `H^k`.
pub fn max_rate(rates: &[f64]) -> f64 {
    rates.iter().copied().fold(0.0, f64::max)
}

/// `r * max(xi, H^k)`, the same value for every interval.
pub fn global_estimate(rates: &[f64], r: f64, xi: f64) -> f64 {
    r * xi.max(max_rate(rates))
}

/// Local tuning: `r * max(lambda_j, gamma_j, xi)` per interval, where
/// `lambda_j` is the largest rate among interval `j` and its immediate
/// neighbours and `gamma_j = H^k * width_j / X^max`.
///
/// At the two ends the neighbourhood is truncated to the existing
/// intervals; with a single interval `lambda` is its own rate.
pub fn local_tuning(rates: &[f64], widths: &[f64], r: f64, xi: f64) -> Vec<LocalEstimate> {
    debug_assert_eq!(rates.len(), widths.len());
    let n = rates.len();
    let h_max = max_rate(rates);
    let x_max = widths.iter().copied().fold(0.0, f64::max);
    (0..n)
        .map(|j| {
            let lo = j.saturating_sub(1);
            let hi = (j + 1).min(n - 1);
            let lambda = max_rate(&rates[lo..=hi]);
            let gamma = h_max * widths[j] / x_max;
            LocalEstimate {
                lambda,
                gamma,
                value: r * lambda.max(gamma).max(xi),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn global_floor_binds() {
        assert_eq!(global_estimate(&[0.0], 1.1, 1e-8), 1.1 * 1e-8);
        assert_eq!(global_estimate(&[1e-8], 1.1, 1e-8), 1.1 * 1e-8);
        assert!((global_estimate(&[1.0, 0.1], 1.1, 1e-8) - 1.1).abs() < 1e-15);
    }

    #[test]
    fn single_interval_uses_its_own_rate() {
        let est = local_tuning(&[0.7], &[2.0], 1.2, 1e-8);
        assert_eq!(est[0].lambda, 0.7);
        assert_eq!(est[0].gamma, 0.7);
        assert!((est[0].value - 1.2 * 0.7).abs() < 1e-15);
    }

    #[test]
    fn two_intervals_share_the_neighbourhood() {
        let est = local_tuning(&[0.2, 0.9], &[1.0, 1.0], 1.1, 1e-8);
        assert_eq!(est[0].lambda, 0.9);
        assert_eq!(est[1].lambda, 0.9);
    }

    #[test]
    fn widest_interval_sees_the_global_rate() {
        let est = local_tuning(&[5.0, 0.1, 0.2, 0.1], &[0.1, 0.3, 2.0, 0.5], 1.1, 1e-8);
        assert_eq!(est[2].gamma, 5.0);
        assert!(est[2].value >= 1.1 * 5.0);
        // lambda only looks one interval away
        assert_eq!(est[3].lambda, 0.2);
    }
}
