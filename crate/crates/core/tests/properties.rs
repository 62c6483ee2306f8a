use proptest::prelude::*;

use unilip::engine::{IntervalEnds, IntervalTable};
use unilip::estimate::{global_estimate, local_tuning};
use unilip::linear::{characteristic, place_trial, rate_h, tent};
use unilip::smooth::{
    classify_and_characterize, contact_margin, eval_support, phi_left, phi_right,
    place_trial_smooth, rate_v, support_geometry, CaseTag,
};

fn linear_ends() -> impl Strategy<Value = IntervalEnds> {
    (
        -10.0..10.0f64,
        1e-3..10.0f64,
        -10.0..10.0f64,
        -10.0..10.0f64,
    )
        .prop_map(|(x0, w, z0, z1)| IntervalEnds {
            x0,
            x1: x0 + w,
            z0,
            z1,
            dz0: f64::NAN,
            dz1: f64::NAN,
        })
}

fn smooth_ends() -> impl Strategy<Value = IntervalEnds> {
    (
        -10.0..10.0f64,
        1e-3..10.0f64,
        -10.0..10.0f64,
        -10.0..10.0f64,
        -20.0..20.0f64,
        -20.0..20.0f64,
    )
        .prop_map(|(x0, w, z0, z1, dz0, dz1)| IntervalEnds {
            x0,
            x1: x0 + w,
            z0,
            z1,
            dz0,
            dz1,
        })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn linear_placement_is_interior_and_attains_the_characteristic(
        e in linear_ends(),
        r in 1.001..3.0f64,
    ) {
        let l = r * rate_h(e.x0, e.x1, e.z0, e.z1).max(1e-8);
        let x = place_trial(&e, l);
        prop_assert!(x > e.x0 && x < e.x1);
        let c = characteristic(&e, l);
        prop_assert!(close(tent(&e, l, x), c, 1e-12));
        prop_assert!(c <= e.z0.min(e.z1));
        for i in 0..=50 {
            let t = e.x0 + e.width() * i as f64 / 50.0;
            prop_assert!(tent(&e, l, t) >= c - 1e-12 * c.abs().max(1.0));
        }
    }

    #[test]
    fn estimates_dominate_their_rates(
        rates in prop::collection::vec(0.0..50.0f64, 1..20),
        r in 1.001..3.0f64,
    ) {
        let widths: Vec<f64> = (0..rates.len()).map(|i| 0.1 + i as f64 * 0.05).collect();
        let g = global_estimate(&rates, r, 1e-8);
        for (j, est) in local_tuning(&rates, &widths, r, 1e-8).iter().enumerate() {
            prop_assert!(est.value >= r * rates[j]);
            prop_assert!(est.value <= g * (1.0 + 1e-12));
        }
        prop_assert!(rates.iter().all(|&h| g >= r * h));
    }

    #[test]
    fn smooth_contacts_keep_their_margin(e in smooth_ends(), r in 1.01..3.0f64) {
        let v = rate_v(&e).v;
        let m = r * v.max(1e-8);
        let g = support_geometry(&e, m).unwrap();
        let beta = contact_margin(r);
        let w = e.width();
        prop_assert!(g.y_prime - e.x0 >= beta * w * (1.0 - 1e-9));
        prop_assert!(e.x1 - g.y >= beta * w * (1.0 - 1e-9));
        prop_assert!(g.y_prime <= g.y);
    }

    #[test]
    fn smooth_support_is_c1_and_its_vertex_is_flat(e in smooth_ends(), r in 1.01..3.0f64) {
        let m = r * rate_v(&e).v.max(1e-8);
        let g = support_geometry(&e, m).unwrap();
        let scale = m * e.width();
        let (l_val, l_slope) = phi_left(&e, m, g.y_prime);
        let (r_val, r_slope) = phi_right(&e, m, g.y);
        prop_assert!(close(g.pi(g.y_prime), l_val, 1e-8));
        prop_assert!(close(g.pi(g.y), r_val, 1e-8));
        prop_assert!((g.pi_slope(g.y_prime) - l_slope).abs() <= 1e-8 * scale.max(1.0));
        prop_assert!((g.pi_slope(g.y) - r_slope).abs() <= 1e-8 * scale.max(1.0));
        prop_assert!(g.pi_slope(g.x_bar).abs() <= 1e-9 * scale.max(1.0));
        let (phi1_value, phi1_slope) = phi_right(&e, m, g.y);
        prop_assert!(close(g.x_bar, g.y - phi1_slope / m, 1e-9));
        prop_assert!(close(g.pi(g.x_bar), phi1_value - phi1_slope * phi1_slope / (2.0 * m), 1e-8));
    }

    #[test]
    fn smooth_characteristic_is_the_support_minimum(e in smooth_ends(), r in 1.01..3.0f64) {
        let m = r * rate_v(&e).v.max(1e-8);
        let g = support_geometry(&e, m).unwrap();
        let (c, case) = classify_and_characterize(&e, &g);
        let x = place_trial_smooth(case, &g);
        prop_assert!(x > e.x0 && x < e.x1);
        prop_assert!(c <= e.z0.min(e.z1));
        let mut lowest = f64::INFINITY;
        for i in 0..=400 {
            let t = e.x0 + e.width() * i as f64 / 400.0;
            lowest = lowest.min(eval_support(&e, &g, t.min(e.x1)).unwrap().0);
        }
        prop_assert!(c <= lowest + 1e-9 * lowest.abs().max(1.0));
        if case == CaseTag::Interior {
            prop_assert!(close(c, g.pi(g.x_bar).min(e.z0).min(e.z1), 1e-12));
        }
    }

    #[test]
    fn insertion_keeps_the_table_sorted(points in prop::collection::vec(0.001..0.999f64, 1..40)) {
        let mut t = IntervalTable::from_sorted(vec![0.0, 1.0], vec![0.0, 0.0], None);
        for &x in &points {
            if t.xs().contains(&x) {
                prop_assert!(t.insert(x, 0.0, None).is_err());
            } else {
                let pos = t.insert(x, x, None).unwrap();
                prop_assert_eq!(t.xs()[pos], x);
            }
        }
        prop_assert!(t.xs().windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(t.interval_count(), t.len() - 1);
    }
}
