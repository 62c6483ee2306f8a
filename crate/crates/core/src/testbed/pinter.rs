//! Randomized test class on `[-5, 5]`:
//!
//! `f(x) = 0.025 d² + sin²(d + d²) + sin²(d)`, `d = x - x*`,
//!
//! with global minimum `f(x*) = 0`.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use thiserror::Error;

use crate::problem::Problem;

pub const LOWER: f64 = -5.0;
pub const UPPER: f64 = 5.0;

/// Minimizer of instance 38 of the reference suite.
pub const INSTANCE_38_MINIMIZER: f64 = 3.3611804993;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("minimizer {0} lies outside [-5, 5]")]
pub struct OutOfRange(pub f64);

pub fn pinter_value(x_star: f64, x: f64) -> f64 {
    let d = x - x_star;
    let s1 = (d + d * d).sin();
    let s2 = d.sin();
    0.025 * d * d + s1 * s1 + s2 * s2
}

pub fn pinter_derivative(x_star: f64, x: f64) -> f64 {
    let d = x - x_star;
    let u = d + d * d;
    0.05 * d + (2.0 * u).sin() * (1.0 + 2.0 * d) + (2.0 * d).sin()
}

/// The same objective written in the fixture expression grammar.
pub fn pinter_expression(x_star: f64) -> String {
    let d = format!("(x-({x_star:?}))");
    format!("0.025*{d}^2 + sin({d}+{d}^2)^2 + sin({d})^2")
}

pub fn pinter_problem(x_star: f64) -> Result<Problem, OutOfRange> {
    pinter_named(format!("pinter({x_star})"), x_star)
}

fn pinter_named(name: String, x_star: f64) -> Result<Problem, OutOfRange> {
    if !(LOWER..=UPPER).contains(&x_star) {
        return Err(OutOfRange(x_star));
    }
    Ok(
        Problem::new(name, LOWER, UPPER, move |x| pinter_value(x_star, x))
            .expect("fixed interval")
            .with_derivative(move |x| pinter_derivative(x_star, x))
            .with_known_minimum(Some(x_star), Some(0.0)),
    )
}

/// One member of a generated suite.
#[derive(Debug, Clone)]
pub struct PinterInstance {
    /// One-based position in the suite.
    pub index: usize,
    pub x_star: f64,
    pub problem: Problem,
}

/// Maps a 64-bit output onto the closed interval `[lo, hi]` using its top
/// 53 bits.
pub fn unit_closed(bits: u64) -> f64 {
    (bits >> 11) as f64 / ((1u64 << 53) - 1) as f64
}

/// Draws `count` minimizers uniformly from `[-5, 5]`.
///
/// The generator is SplitMix64 seeded with `seed`: the state advances by
/// `0x9E3779B97F4A7C15` (wrapping) and each output is
/// `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
/// z *= 0x94D049BB133111EB; z ^= z >> 31` on the new state. The minimizer
/// is `-5 + 10 * (out >> 11) / (2^53 - 1)`.
pub fn pinter_minimizers(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    (0..count)
        .map(|_| LOWER + (UPPER - LOWER) * unit_closed(rng.next_u64()))
        .collect()
}

pub fn pinter_suite(seed: u64, count: usize) -> Vec<PinterInstance> {
    pinter_minimizers(seed, count)
        .into_iter()
        .enumerate()
        .map(|(i, x_star)| PinterInstance {
            index: i + 1,
            x_star,
            problem: pinter_named(format!("pinter_{:03}", i + 1), x_star).expect("drawn in range"),
        })
        .collect()
}
