//! Dense least squares by QR with column pivoting.

use faer::linalg::solvers::SolveLstsq;
use faer::{Mat, MatRef};

#[derive(Debug, Clone)]
pub struct LstsqSolution {
    pub x: Vec<f64>,
    /// Numerical rank from the pivoted `R` diagonal.
    pub rank: usize,
    /// `|r_00| / |r_kk|` over the retained pivots.
    pub condition: f64,
    /// `||A x - b||_2`.
    pub residual: f64,
}

/// Minimum-norm least-squares solution of `A x = b`.
///
/// Full column rank goes straight through the pivoted QR. Otherwise the
/// retained rows of `R` are factored once more (complete orthogonal
/// decomposition) so the null-space component is zero.
pub fn solve_min_norm(a: MatRef<'_, f64>, b: &[f64], rank_tol: f64) -> LstsqSolution {
    let (m, n) = (a.nrows(), a.ncols());
    assert_eq!(b.len(), m);
    let qr = a.col_piv_qr();
    let r = qr.thin_R();
    let k = m.min(n);
    let r00 = if k > 0 { r[(0, 0)].abs() } else { 0.0 };
    let rank = (0..k)
        .take_while(|&i| r[(i, i)].abs() > rank_tol * r00)
        .count();
    let condition = if rank == 0 {
        f64::INFINITY
    } else {
        r00 / r[(rank - 1, rank - 1)].abs()
    };

    let rhs = Mat::from_fn(m, 1, |i, _| b[i]);
    let x: Vec<f64> = if rank == n {
        let sol = qr.solve_lstsq(&rhs);
        (0..n).map(|i| sol[(i, 0)]).collect()
    } else if rank == 0 {
        vec![0.0; n]
    } else {
        let q = qr.compute_thin_Q();
        let c: Vec<f64> = (0..rank)
            .map(|j| (0..m).map(|i| q[(i, j)] * b[i]).sum())
            .collect();
        // R_top^T = Z T, so R_top = T^T Z^T and z = Z T^{-T} c.
        let rt = Mat::from_fn(n, rank, |i, j| r[(j, i)]);
        let qr2 = rt.as_ref().qr();
        let z_basis = qr2.compute_thin_Q();
        let t = qr2.thin_R();
        let mut y = vec![0.0; rank];
        for i in 0..rank {
            let mut s = c[i];
            for (j, yj) in y.iter().enumerate().take(i) {
                s -= t[(j, i)] * yj;
            }
            y[i] = s / t[(i, i)];
        }
        let z: Vec<f64> = (0..n)
            .map(|i| (0..rank).map(|j| z_basis[(i, j)] * y[j]).sum())
            .collect();
        let (fwd, _) = qr.P().arrays();
        let mut x = vec![0.0; n];
        for (j, &p) in fwd.iter().enumerate() {
            x[p] = z[j];
        }
        x
    };

    let residual = (0..m)
        .map(|i| {
            let ax: f64 = (0..n).map(|j| a[(i, j)] * x[j]).sum();
            (ax - b[i]).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    LstsqSolution {
        x,
        rank,
        condition,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overdetermined_consistent() {
        let a = Mat::from_fn(5, 3, |i, j| ((i + 1) as f64).powi(j as i32));
        let x_true = [1.0, -2.0, 0.5];
        let b: Vec<f64> = (0..5)
            .map(|i| (0..3).map(|j| a[(i, j)] * x_true[j]).sum())
            .collect();
        let sol = solve_min_norm(a.as_ref(), &b, 1e-13);
        assert_eq!(sol.rank, 3);
        for (x, e) in sol.x.iter().zip(x_true) {
            assert!((x - e).abs() < 1e-12);
        }
        assert!(sol.residual < 1e-12);
    }

    #[test]
    fn rank_deficient_gives_min_norm() {
        // Columns 0 and 2 identical: x0 + x2 = 1 has min-norm solution (0.5, ., 0.5).
        let a = Mat::from_fn(4, 3, |i, j| match j {
            0 | 2 => 1.0,
            _ => i as f64,
        });
        let b = vec![1.0, 3.0, 5.0, 7.0];
        let sol = solve_min_norm(a.as_ref(), &b, 1e-13);
        assert_eq!(sol.rank, 2);
        assert!(
            (sol.x[0] - 0.5).abs() < 1e-12 && (sol.x[2] - 0.5).abs() < 1e-12,
            "{:?}",
            sol.x
        );
        assert!((sol.x[1] - 2.0).abs() < 1e-12);
        assert!(sol.residual < 1e-12);
    }
}
