//! Simultaneous root finding for real-coefficient polynomials (Aberth–Ehrlich).

use std::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy)]
pub struct RootFinderOptions {
    pub max_iterations: usize,
    /// Newton steps applied to every root after the simultaneous iteration.
    pub polish_steps: usize,
    /// Largest acceptable relative backward error `|p(z)| / sum |a_k| |z|^k`.
    pub residual_tol: f64,
}

impl Default for RootFinderOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            polish_steps: 3,
            residual_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub iterations: usize,
    /// Largest relative backward error over the returned roots.
    pub max_backward_error: f64,
}

/// Newton correction `p(z)/p'(z)` and the relative backward error at `z`.
///
/// Outside the unit disk the reversed polynomial is evaluated at `1/z`, so no
/// intermediate power of `z` is ever formed.
fn newton_step(a: &[f64], z: Complex64) -> (Complex64, f64) {
    let n = a.len() - 1;
    if z.norm_sqr() <= 1.0 {
        let r = z.norm();
        let mut p = Complex64::new(a[n], 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        let mut s = a[n].abs();
        for &c in a[..n].iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
            s = s * r + c.abs();
        }
        (safe_div(p, dp), backward(p.norm(), s))
    } else {
        let y = z.inv();
        let r = y.norm();
        // q(y) = sum_k a_{n-k} y^k = y^n p(1/y)
        let mut q = Complex64::new(a[0], 0.0);
        let mut dq = Complex64::new(0.0, 0.0);
        let mut s = a[0].abs();
        for &c in a[1..].iter() {
            dq = dq * y + q;
            q = q * y + c;
            s = s * r + c.abs();
        }
        // p(z) = z^n q(y)  =>  p/p' = z q / (n q - y q')
        let denom = q * n as f64 - y * dq;
        (safe_div(z * q, denom), backward(q.norm(), s))
    }
}

fn safe_div(num: Complex64, den: Complex64) -> Complex64 {
    if den.norm_sqr() == 0.0 {
        // Stationary point: nudge off it.
        Complex64::new(1e-8, 1e-8) * (1.0 + num.norm())
    } else {
        num / den
    }
}

fn backward(abs_p: f64, s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        abs_p / s
    }
}

/// Starting points on circles whose radii come from the upper convex hull of
/// `(k, log|a_k|)` (the Newton polygon).
fn initial_guesses(a: &[f64]) -> Vec<Complex64> {
    let n = a.len() - 1;
    let pts: Vec<(usize, f64)> = a
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(k, c)| (k, c.abs().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (o, q) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross =
                (q.0 as f64 - o.0 as f64) * (p.1 - o.1) - (q.1 - o.1) * (p.0 as f64 - o.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(n);
    const SIGMA: f64 = 0.7;
    for seg in hull.windows(2) {
        let ((i, li), (j, lj)) = (seg[0], seg[1]);
        let m = j - i;
        let radius = ((li - lj) / m as f64).exp();
        for t in 0..m {
            let angle = 2.0 * PI * t as f64 / m as f64 + 2.0 * PI * i as f64 / n as f64 + SIGMA;
            out.push(Complex64::from_polar(radius, angle));
        }
    }
    out
}

/// All roots of `sum_k a[k] x^k` with `a[0] != 0` and `a[last] != 0`.
pub fn aberth_roots(a: &[f64], opts: &RootFinderOptions) -> RootSet {
    let n = a.len().saturating_sub(1);
    if n == 0 {
        return RootSet {
            roots: Vec::new(),
            iterations: 0,
            max_backward_error: 0.0,
        };
    }
    debug_assert!(a[0] != 0.0 && a[n] != 0.0);
    if n == 1 {
        let r = Complex64::new(-a[0] / a[1], 0.0);
        return RootSet {
            roots: vec![r],
            iterations: 0,
            max_backward_error: newton_step(a, r).1,
        };
    }

    let mut z = initial_guesses(a);
    let mut done = vec![false; n];
    let mut lingering = vec![0u8; n];
    let stall_level = 2.0 * n as f64 * f64::EPSILON;
    let mut iterations = 0;
    while iterations < opts.max_iterations && done.iter().any(|d| !d) {
        iterations += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let (ratio, berr) = newton_step(a, zi);
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    let d = zi - zj;
                    let inv = 1.0 / d.norm_sqr();
                    sum += Complex64::new(d.re * inv, -d.im * inv);
                }
            }
            let corr = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if corr.re.is_finite() && corr.im.is_finite() {
                z[i] = zi - corr;
            }
            if berr <= 4.0 * f64::EPSILON || corr.norm() <= 4.0 * f64::EPSILON * zi.norm() {
                done[i] = true;
            } else if berr <= stall_level {
                lingering[i] += 1;
                if lingering[i] >= 3 {
                    done[i] = true;
                }
            }
        }
    }

    for _ in 0..opts.polish_steps {
        for zi in z.iter_mut() {
            let (ratio, berr) = newton_step(a, *zi);
            let cand = *zi - ratio;
            if cand.re.is_finite() && cand.im.is_finite() && newton_step(a, cand).1 < berr {
                *zi = cand;
            }
        }
    }

    let max_backward_error = z.iter().map(|&zi| newton_step(a, zi).1).fold(0.0, f64::max);
    RootSet {
        roots: z,
        iterations,
        max_backward_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (k, &v) in c.iter().enumerate() {
                next[k + 1] += v;
                next[k] -= r * v;
            }
            c = next;
        }
        c
    }

    fn matches(found: &[Complex64], expect: &[Complex64], tol: f64) -> bool {
        let mut used = vec![false; found.len()];
        expect.iter().all(|e| {
            let best = found
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .min_by(|x, y| (x.1 - e).norm().total_cmp(&(y.1 - e).norm()));
            match best {
                Some((i, f)) if (f - e).norm() <= tol => {
                    used[i] = true;
                    true
                }
                _ => false,
            }
        })
    }

    #[test]
    fn real_roots() {
        let r = [0.5, -2.0, 3.0, 0.25];
        let set = aberth_roots(&poly_from_roots(&r), &RootFinderOptions::default());
        let expect: Vec<_> = r.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        assert!(matches(&set.roots, &expect, 1e-12), "{:?}", set.roots);
    }

    #[test]
    fn roots_of_unity() {
        // x^8 - 1
        let mut a = vec![0.0; 9];
        a[0] = -1.0;
        a[8] = 1.0;
        let set = aberth_roots(&a, &RootFinderOptions::default());
        let expect: Vec<_> = (0..8)
            .map(|k| Complex64::from_polar(1.0, PI * k as f64 / 4.0))
            .collect();
        assert!(matches(&set.roots, &expect, 1e-13));
        assert!(set.max_backward_error < 1e-15);
    }

    #[test]
    fn double_root_is_resolved_to_sqrt_eps() {
        // -(x-1)^2 / 4
        let set = aberth_roots(&[-0.25, 0.5, -0.25], &RootFinderOptions::default());
        for r in &set.roots {
            assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-7);
        }
    }

    #[test]
    fn wide_dynamic_range() {
        let r = [1e-3, 1e3, 0.9, 1.1];
        let set = aberth_roots(&poly_from_roots(&r), &RootFinderOptions::default());
        let expect: Vec<_> = r.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let rel = set
            .roots
            .iter()
            .all(|f| expect.iter().any(|e| (f - e).norm() <= 1e-10 * e.norm()));
        assert!(rel, "{:?}", set.roots);
    }
}
