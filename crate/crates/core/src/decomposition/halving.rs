//! The linear system whose solution is the conjugate of the left half of a
//! unitary Low element.

use faer::Mat;

use super::lstsq::{solve_min_norm, LstsqSolution};
use super::DecompositionError;
use crate::algebra::LowElement;
use crate::laurent::LaurentPoly;

/// Rows constrain the coefficients of `V* U` above degree `d - l` to vanish,
/// plus `V*(1) = I`. Unknowns are `x_n` then `y_n` for `n = -l, -l+2, ..., l`.
#[derive(Debug, Clone)]
pub struct HalvingSystem {
    pub matrix: Mat<f64>,
    pub rhs: Vec<f64>,
    pub d: usize,
    pub l: usize,
}

impl HalvingSystem {
    pub fn unknowns(&self) -> usize {
        2 * (self.l + 1)
    }
}

pub fn build_halving_system(u: &LowElement, l: usize) -> Result<HalvingSystem, DecompositionError> {
    let d = u.degree().finite().unwrap_or(0);
    build_halving_system_for_degree(u, l, d)
}

/// As [`build_halving_system`], with the degree of `u` given explicitly rather
/// than read off its (possibly noisy) coefficients.
pub fn build_halving_system_for_degree(
    u: &LowElement,
    l: usize,
    d: usize,
) -> Result<HalvingSystem, DecompositionError> {
    if l == 0 || l >= d {
        return Err(DecompositionError::DegreeMismatch { l, d });
    }
    let a = |k: i64| u.a.re(k);
    let b = |k: i64| u.b.re(k);
    let li = l as i64;
    let di = d as i64;
    let cols = l + 1;
    let n1s: Vec<i64> = (0..cols as i64).map(|j| -li + 2 * j).collect();

    let mut targets: Vec<i64> = Vec::with_capacity(2 * l);
    let mut n = di - li + 2;
    while n <= di + li {
        targets.push(-n);
        targets.push(n);
        n += 2;
    }
    let rows = 2 * targets.len() + 2;
    let mut m = Mat::<f64>::zeros(rows, 2 * cols);
    for (t, &n) in targets.iter().enumerate() {
        let (ra, rb) = (2 * t, 2 * t + 1);
        for (j, &n1) in n1s.iter().enumerate() {
            m[(ra, j)] = a(n - n1);
            m[(ra, cols + j)] = -b(n1 - n);
            m[(rb, j)] = b(n - n1);
            m[(rb, cols + j)] = a(n1 - n);
        }
    }
    let mut rhs = vec![0.0; rows];
    for j in 0..cols {
        m[(rows - 2, j)] = 1.0;
        m[(rows - 1, cols + j)] = 1.0;
    }
    rhs[rows - 2] = 1.0;
    Ok(HalvingSystem {
        matrix: m,
        rhs,
        d,
        l,
    })
}

/// Solution of a halving system: the left factor `V` (not its conjugate).
#[derive(Debug, Clone)]
pub struct HalfSolution {
    pub v: LowElement,
    pub condition: f64,
    pub rank: usize,
    pub residual: f64,
}

pub(crate) fn solve_system(sys: &HalvingSystem, rank_tol: f64) -> HalfSolution {
    let LstsqSolution {
        x,
        rank,
        condition,
        residual,
    } = solve_min_norm(sys.matrix.as_ref(), &sys.rhs, rank_tol);
    let l = sys.l;
    let cols = l + 1;
    let mut xs = vec![0.0; 2 * l + 1];
    let mut ys = vec![0.0; 2 * l + 1];
    for j in 0..cols {
        xs[2 * j] = x[j];
        ys[2 * j] = x[cols + j];
    }
    // V* = X + Y iX, so V = (X*, -Y).
    let xstar = LaurentPoly::from_real(-(l as i64), &xs).star();
    let y = LaurentPoly::from_real(-(l as i64), &ys);
    HalfSolution {
        v: LowElement::new(xstar, -&y),
        condition,
        rank,
        residual,
    }
}
