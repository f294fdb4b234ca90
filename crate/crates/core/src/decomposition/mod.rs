//! Splitting a unitary Low element into degree-one primitive factors.
//!
//! [`decompose`] halves the degree at every level with a least-squares solve.
//! [`carve`] peels one factor at a time and is kept as a baseline.

mod halving;
mod lstsq;

use serde::{Deserialize, Serialize};

use crate::algebra::{primitive_angle, primitive_factor, xrotation, AngleSequence, LowElement};
use crate::laurent::Parity;

pub use halving::{
    build_halving_system, build_halving_system_for_degree, HalfSolution, HalvingSystem,
};
pub use lstsq::{solve_min_norm, LstsqSolution};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecompositionError {
    #[error("split size {l} must satisfy 1 <= l < d = {d}")]
    DegreeMismatch { l: usize, d: usize },
    #[error("input is not unitary enough: residual {residual:.3e} exceeds gate {gate:.1e}")]
    NotUnitary { residual: f64, gate: f64 },
    #[error("input has no definite parity matching its degree")]
    NotParity,
    #[error("condition estimate {condition:.3e} at recursion path '{path}'")]
    IllConditioned { condition: f64, path: String },
    #[error("factor {index} deviates from primitive shape by {deviation:.3e}")]
    NotPrimitive { index: usize, deviation: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Halving,
    Carving,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Halving => "halving",
            Mode::Carving => "carving",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DecomposeOptions {
    pub unitarity_gate: f64,
    pub condition_limit: f64,
    /// Turn an exceeded `condition_limit` into an error instead of a warning.
    pub strict: bool,
    pub rank_tol: f64,
    pub parallel: bool,
    /// If some midpoint solve exceeded `resplit_condition` and the factors
    /// reproduce `U` worse than this (max coefficient difference), the
    /// recursion is rerun with a split-point search.
    pub resplit_defect: f64,
    /// During that rerun, splits whose condition estimate exceeds this are
    /// replaced by the best-conditioned split within `resplit_radius`.
    pub resplit_condition: f64,
    pub resplit_radius: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            unitarity_gate: 1e-4,
            condition_limit: 1e12,
            strict: false,
            rank_tol: 1e-14,
            parallel: true,
            resplit_defect: 1e-11,
            resplit_condition: 1e4,
            resplit_radius: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IllConditionedSolve {
    pub path: String,
    pub condition: f64,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Left-to-right factors of `U · Rx(-alpha0)`.
    pub factors: Vec<LowElement>,
    pub alpha0: f64,
    pub max_condition: f64,
    pub ill_conditioned: Vec<IllConditionedSolve>,
}

/// Solves for the left factor `V` of degree `l` with `U = V W`.
pub fn solve_half(u: &LowElement, l: usize) -> Result<LowElement, DecompositionError> {
    let d = u.degree().finite().unwrap_or(0);
    let sys = build_halving_system_for_degree(u, l, d)?;
    let sol = halving::solve_system(&sys, DecomposeOptions::default().rank_tol);
    if sol.condition > DecomposeOptions::default().condition_limit {
        return Err(DecompositionError::IllConditioned {
            condition: sol.condition,
            path: String::new(),
        });
    }
    Ok(sol.v)
}

/// Like [`solve_half`] with the degree supplied and the solver diagnostics returned.
pub fn solve_half_with(
    u: &LowElement,
    l: usize,
    d: usize,
    rank_tol: f64,
) -> Result<HalfSolution, DecompositionError> {
    let sys = build_halving_system_for_degree(u, l, d)?;
    Ok(halving::solve_system(&sys, rank_tol))
}

fn checked_degree(u: &LowElement, opts: &DecomposeOptions) -> Result<usize, DecompositionError> {
    let d = u.degree().finite().unwrap_or(0);
    match u.parity() {
        Parity::Mixed => return Err(DecompositionError::NotParity),
        p if d > 0 && p != Parity::of_exponent(d as i64) => {
            return Err(DecompositionError::NotParity)
        }
        _ => {}
    }
    let residual = u.unitarity_residual(64);
    if !(residual <= opts.unitarity_gate) {
        return Err(DecompositionError::NotUnitary {
            residual,
            gate: opts.unitarity_gate,
        });
    }
    Ok(d)
}

/// `U · Rx(-alpha0)` with `alpha0` read from `U(1)`, so the result is `I` at `w = 1`.
fn normalize(u: &LowElement) -> (LowElement, f64) {
    let (a1, b1) = u.value_at_one();
    let alpha0 = b1.atan2(a1);
    (u.mul(&xrotation(-alpha0)), alpha0)
}

struct Partial {
    factors: Vec<LowElement>,
    max_condition: f64,
    ill: Vec<IllConditionedSolve>,
}

fn note_condition(
    part: &mut Partial,
    condition: f64,
    path: &str,
    opts: &DecomposeOptions,
) -> Result<(), DecompositionError> {
    part.max_condition = part.max_condition.max(condition);
    if !(condition <= opts.condition_limit) {
        if opts.strict {
            return Err(DecompositionError::IllConditioned {
                condition,
                path: path.to_string(),
            });
        }
        part.ill.push(IllConditionedSolve {
            path: path.to_string(),
            condition,
        });
    }
    Ok(())
}

fn best_split(
    u: &LowElement,
    d: usize,
    search: bool,
    opts: &DecomposeOptions,
) -> Result<(usize, HalfSolution), DecompositionError> {
    let mid = d.div_ceil(2);
    let mut best = (mid, solve_half_with(u, mid, d, opts.rank_tol)?);
    for k in 1..=if search { opts.resplit_radius } else { 0 } {
        if best.1.condition <= opts.resplit_condition {
            break;
        }
        for l in [mid.checked_sub(k), Some(mid + k)]
            .into_iter()
            .flatten()
            .filter(|&l| l >= 1 && l < d)
        {
            let sol = solve_half_with(u, l, d, opts.rank_tol)?;
            if sol.condition < best.1.condition {
                best = (l, sol);
            }
        }
    }
    Ok(best)
}

fn halve(
    u: LowElement,
    d: usize,
    path: String,
    search: bool,
    opts: &DecomposeOptions,
) -> Result<Partial, DecompositionError> {
    if d <= 1 {
        let factors = if d == 1 {
            vec![u.truncate(1)]
        } else {
            Vec::new()
        };
        return Ok(Partial {
            factors,
            max_condition: 1.0,
            ill: Vec::new(),
        });
    }
    let (l, sol) = best_split(&u, d, search, opts)?;
    let rest = sol.v.star().mul(&u).truncate(d - l);
    let v = sol.v;
    let (left_path, right_path) = (format!("{path}L"), format!("{path}R"));
    let (left, right) = if opts.parallel {
        rayon::join(
            || halve(v, l, left_path, search, opts),
            || halve(rest, d - l, right_path, search, opts),
        )
    } else {
        (
            halve(v, l, left_path, search, opts),
            halve(rest, d - l, right_path, search, opts),
        )
    };
    let (mut left, right) = (left?, right?);
    left.factors.extend(right.factors);
    left.max_condition = left.max_condition.max(right.max_condition);
    left.ill.extend(right.ill);
    note_condition(&mut left, sol.condition, &path, opts)?;
    Ok(left)
}

fn product(factors: &[LowElement]) -> LowElement {
    match factors.len() {
        0 => LowElement::identity(),
        1 => factors[0].clone(),
        n => {
            let (l, r) = factors.split_at(n / 2);
            product(l).mul(&product(r))
        }
    }
}

/// Recursive halving. Factors multiply left to right to `U · Rx(-alpha0)`.
pub fn decompose(u: &LowElement) -> Result<Vec<LowElement>, DecompositionError> {
    Ok(decompose_with(u, &DecomposeOptions::default())?.factors)
}

pub fn decompose_with(
    u: &LowElement,
    opts: &DecomposeOptions,
) -> Result<Decomposition, DecompositionError> {
    let d = checked_degree(u, opts)?;
    let (un, alpha0) = normalize(u);
    let un = un.truncate(d);
    let mut part = halve(un.clone(), d, String::new(), false, opts)?;
    if part.max_condition > opts.resplit_condition {
        let defect = product(&part.factors).max_diff(&un);
        if defect > opts.resplit_defect {
            let alt = halve(un.clone(), d, String::new(), true, opts)?;
            if product(&alt.factors).max_diff(&un) < defect {
                part = alt;
            }
        }
    }
    Ok(Decomposition {
        factors: part.factors,
        alpha0,
        max_condition: part.max_condition,
        ill_conditioned: part.ill,
    })
}

/// One factor at a time from the left, each from a system with `l = 1`.
pub fn carve(u: &LowElement) -> Result<Vec<LowElement>, DecompositionError> {
    Ok(carve_with(u, &DecomposeOptions::default())?.factors)
}

pub fn carve_with(
    u: &LowElement,
    opts: &DecomposeOptions,
) -> Result<Decomposition, DecompositionError> {
    let d = checked_degree(u, opts)?;
    let (un, alpha0) = normalize(u);
    let mut rest = un.truncate(d);
    let mut part = Partial {
        factors: Vec::with_capacity(d),
        max_condition: 1.0,
        ill: Vec::new(),
    };
    for k in (2..=d).rev() {
        let sol = solve_half_with(&rest, 1, k, opts.rank_tol)?;
        note_condition(&mut part, sol.condition, &format!("step {}", d - k), opts)?;
        rest = sol.v.star().mul(&rest).truncate(k - 1);
        part.factors.push(sol.v);
    }
    if d >= 1 {
        part.factors.push(rest.truncate(1));
    }
    Ok(Decomposition {
        factors: part.factors,
        alpha0,
        max_condition: part.max_condition,
        ill_conditioned: part.ill,
    })
}

pub const DEFAULT_PRIMITIVE_TOL: f64 = 1e-6;

/// Angles of the primitive factors, plus `alpha0` from `U(1)` after dividing
/// out the factors' values at `w = 1`.
pub fn extract_angles(
    factors: &[LowElement],
    u: &LowElement,
) -> Result<AngleSequence, DecompositionError> {
    extract_angles_with(factors, u, DEFAULT_PRIMITIVE_TOL)
}

pub fn extract_angles_with(
    factors: &[LowElement],
    u: &LowElement,
    tol: f64,
) -> Result<AngleSequence, DecompositionError> {
    let mut angles = Vec::with_capacity(factors.len());
    let mut phase = 0.0;
    for (index, f) in factors.iter().enumerate() {
        let alpha = primitive_angle(f);
        let deviation = f.max_diff(&primitive_factor(alpha));
        if !(deviation <= tol) {
            return Err(DecompositionError::NotPrimitive { index, deviation });
        }
        let (a1, b1) = f.value_at_one();
        phase += b1.atan2(a1);
        angles.push(alpha);
    }
    let (a1, b1) = u.value_at_one();
    let alpha0 = wrap_angle(b1.atan2(a1) - phase);
    Ok(AngleSequence::new(angles, alpha0))
}

fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::PI;
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::primitive_factor;
    use crate::laurent::LaurentPoly;

    fn chain(angles: &[f64]) -> LowElement {
        angles.iter().fold(LowElement::identity(), |acc, &a| {
            acc.mul(&primitive_factor(a))
        })
    }

    #[test]
    fn two_factor_split() {
        let u = chain(&[0.3, 0.7]);
        let v = solve_half(&u, 1).unwrap();
        assert!(v.max_diff(&primitive_factor(0.3)) < 1e-12);
    }

    #[test]
    fn w_tilde_squared() {
        let u = LowElement::w_tilde().mul(&LowElement::w_tilde());
        let v = solve_half(&u, 1).unwrap();
        assert!(v.max_diff(&primitive_factor(0.0)) < 1e-15);
    }

    #[test]
    fn base_case_and_worked_example() {
        let f = decompose(&LowElement::w_tilde()).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].max_diff(&LowElement::w_tilde()), 0.0);
        let e = primitive_factor(std::f64::consts::FRAC_PI_4);
        let f = decompose(&e).unwrap();
        let seq = extract_angles(&f, &e).unwrap();
        assert!((seq.angles[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(seq.alpha0, 0.0);
    }

    #[test]
    fn round_trip_with_constant() {
        let angles = [0.4, -0.2, 0.5, 0.3, -0.3, 0.05, 0.25, -0.5, 0.1];
        let u = chain(&angles).mul(&xrotation(0.6));
        let f = decompose(&u).unwrap();
        assert_eq!(f.len(), angles.len());
        let seq = extract_angles(&f, &u).unwrap();
        for (got, want) in seq.angles.iter().zip(angles) {
            let diff = wrap_angle(2.0 * (got - want)) / 2.0;
            assert!(diff.abs() < 1e-10, "{got} vs {want}");
        }
        assert!((seq.alpha0 - 0.6).abs() < 1e-10);
    }

    #[test]
    fn carving_agrees_on_small_degree() {
        let angles = [0.4, -1.2, 0.9, 1.5, -0.3, 0.05, 2.5, -0.9];
        let u = chain(&angles);
        let a = decompose(&u).unwrap();
        let b = carve(&u).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(x.max_diff(y) < 1e-9);
        }
    }

    #[test]
    fn rejects_non_unitary() {
        let u = LowElement::new(
            LaurentPoly::from_real(-1, &[1.0, 0.0, 1.0]),
            LaurentPoly::zero(),
        );
        assert!(matches!(
            decompose(&u),
            Err(DecompositionError::NotUnitary { .. })
        ));
    }

    #[test]
    fn not_primitive_detected() {
        let bad = LowElement::new(
            LaurentPoly::from_real(-1, &[0.5, 0.0, 0.1]),
            LaurentPoly::zero(),
        );
        let r = extract_angles(&[bad], &LowElement::identity());
        assert!(matches!(
            r,
            Err(DecompositionError::NotPrimitive { index: 0, .. })
        ));
    }
}
