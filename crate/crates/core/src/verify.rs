//! Rebuilding the circuit response from an angle sequence and checking it
//! against a target.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{primitive_factor, xrotation, AngleSequence, LowElement};
use crate::decomposition::Mode;
use crate::laurent::LaurentPoly;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Max sampled `|A_reconstructed - F_target|`.
    pub max_error: f64,
    pub unitarity: f64,
    /// Min sampled `|F_target|^2`.
    pub min_success_prob: f64,
    pub degree: usize,
    pub mode: Option<Mode>,
    pub wall_times: BTreeMap<String, f64>,
    pub eps: f64,
    pub samples: usize,
    pub achievable: bool,
}

/// `E(a_d) ... E(a_1) Rx(a0)`, multiplied as a balanced tree.
pub fn reconstruct(angles: &AngleSequence) -> LowElement {
    fn tree(factors: &[f64]) -> LowElement {
        match factors.len() {
            0 => LowElement::identity(),
            1 => primitive_factor(factors[0]),
            n => {
                let (l, r) = factors.split_at(n / 2);
                tree(l).mul(&tree(r))
            }
        }
    }
    tree(&angles.angles).mul(&xrotation(angles.alpha0))
}

pub fn default_samples(degree: usize) -> usize {
    8 * (degree + 1)
}

/// Compares `reconstruct(angles).A` with a polynomial target.
pub fn measure(
    angles: &AngleSequence,
    target: &LaurentPoly,
    samples: usize,
    eps: f64,
) -> RunReport {
    let target_vals = target.sample_circle(samples);
    measure_samples(angles, &target_vals, eps)
}

/// Compares with an arbitrary target function of `theta`.
pub fn measure_fn(
    angles: &AngleSequence,
    target: impl Fn(f64) -> Complex64,
    samples: usize,
    eps: f64,
) -> RunReport {
    let vals: Vec<Complex64> = (0..samples)
        .map(|j| target(2.0 * PI * j as f64 / samples as f64))
        .collect();
    measure_samples(angles, &vals, eps)
}

/// `target[j]` is the target at `theta_j = 2 pi j / target.len()`.
pub fn measure_samples(angles: &AngleSequence, target: &[Complex64], eps: f64) -> RunReport {
    let samples = target.len();
    let u = reconstruct(angles);
    let got = u.a.sample_circle(samples);
    let max_error = got
        .iter()
        .zip(target)
        .map(|(g, t)| (g - t).norm())
        .fold(0.0, f64::max);
    let min_success_prob = target
        .iter()
        .map(|t| t.norm_sqr())
        .fold(f64::INFINITY, f64::min);
    RunReport {
        max_error,
        unitarity: u.unitarity_residual(samples),
        min_success_prob,
        degree: angles.degree(),
        mode: None,
        wall_times: BTreeMap::new(),
        eps,
        samples,
        achievable: max_error <= eps,
    }
}
