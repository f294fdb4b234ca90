//! Completion of a real parity target `F` to a unitary Low element `F + G·iX`.
//!
//! `P = 1 - F F*` is nonnegative on the unit circle, so its roots come in
//! reciprocal pairs and `G` is assembled from one member of each pair.

mod pairing;
mod roots;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::algebra::LowElement;
use crate::laurent::{LaurentPoly, Parity};

pub use pairing::{pair_roots, RootPairing, DEFAULT_PAIR_TOL};
pub use roots::{aberth_roots, RootFinderOptions, RootSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompletionError {
    #[error("target has complex coefficients")]
    NotReal,
    #[error("target must have definite parity, got {0:?}")]
    NotParity(Parity),
    #[error("sampled sup-norm {supnorm} of the target exceeds 1")]
    NormTooLarge { supnorm: f64 },
    #[error("root finder did not converge (relative backward error {residual:.3e})")]
    RootFindingDiverged { residual: f64 },
    #[error("no partner for root {re}{im:+}i")]
    PairingFailed { re: f64, im: f64 },
    #[error("no shift of the root product has the parity of the target")]
    ParityMismatch,
    #[error("fitted proportionality constant {value} is not positive")]
    NegativeConstant { value: f64 },
    #[error("completion residual {residual:.3e} exceeds {gate:.1e}")]
    ResidualTooLarge { residual: f64, gate: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionReport {
    pub prop_constant: f64,
    /// Natural log of `prop_constant`, kept because the constant itself can leave the `f64` range.
    /// Absent when `G = 0`.
    pub ln_prop_constant: Option<f64>,
    /// Max sampled `|F F* + G G* - 1|`.
    pub residual: f64,
    pub root_count: usize,
    pub rng_seed: u64,
    /// Largest relative imaginary part dropped from the coefficients of `G`.
    pub dropped_imag: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct CompletionOptions {
    pub pair_tol: f64,
    pub residual_gate: f64,
    /// `F` is rejected when its sampled sup-norm exceeds `1 + norm_slack`.
    pub norm_slack: f64,
    pub roots: RootFinderOptions,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        Self {
            pair_tol: DEFAULT_PAIR_TOL,
            residual_gate: 1e-4,
            norm_slack: 1e-12,
            roots: RootFinderOptions::default(),
        }
    }
}

fn sample_count(deg: usize) -> usize {
    (8 * (deg + 1)).max(64)
}

/// `P = 1 - F F*`.
pub fn build_target_poly(f: &LaurentPoly) -> Result<LaurentPoly, CompletionError> {
    build_target_poly_with(f, CompletionOptions::default().norm_slack)
}

fn build_target_poly_with(f: &LaurentPoly, slack: f64) -> Result<LaurentPoly, CompletionError> {
    if !f.is_real() {
        return Err(CompletionError::NotReal);
    }
    let deg = f.degree().finite().unwrap_or(0);
    let supnorm = f.supnorm(sample_count(deg));
    if supnorm > 1.0 + slack {
        return Err(CompletionError::NormTooLarge { supnorm });
    }
    Ok(&LaurentPoly::constant(1.0) - &(f * &f.star()))
}

/// `P` in the variable `u = w^s`, with `s` the exponent stride of `P`, as
/// ascending coefficients of the ordinary polynomial `u^{n} P(u)`.
fn reduced_ordinary(p: &LaurentPoly) -> (Vec<f64>, usize) {
    let p = p.prune(1e-15);
    let stride = p.exponent_stride().max(1);
    let pu = p
        .compress(stride)
        .expect("stride divides every exponent")
        .trim();
    (pu.real_window(), stride)
}

fn roots_in_u(
    p: &LaurentPoly,
    opts: &RootFinderOptions,
) -> Result<(Vec<Complex64>, usize), CompletionError> {
    let (a, stride) = reduced_ordinary(p);
    if a.len() <= 1 {
        return Ok((Vec::new(), stride));
    }
    let set = aberth_roots(&a, opts);
    if set.max_backward_error > opts.residual_tol {
        return Err(CompletionError::RootFindingDiverged {
            residual: set.max_backward_error,
        });
    }
    Ok((set.roots, stride))
}

/// Roots (with multiplicity) of the ordinary polynomial `w^{n_P} P(w)`.
pub fn find_roots(p: &LaurentPoly) -> Result<Vec<Complex64>, CompletionError> {
    let (u_roots, stride) = roots_in_u(p, &RootFinderOptions::default())?;
    let mut out = Vec::with_capacity(u_roots.len() * stride);
    for rho in u_roots {
        let base = rho.powf(1.0 / stride as f64);
        for k in 0..stride {
            out.push(
                base * Complex64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * k as f64 / stride as f64,
                ),
            );
        }
    }
    Ok(out)
}

/// Builds `G` with `G G* = P` and `deg G <= target_degree`, of parity `target_degree mod 2`.
pub fn build_g(
    pairing: &RootPairing,
    p: &LaurentPoly,
    target_degree: usize,
    rng_seed: u64,
) -> Result<(LaurentPoly, CompletionReport), CompletionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut chosen: Vec<Complex64> = Vec::with_capacity(pairing.root_count() / 2);
    for &(inner, outer) in &pairing.real_pairs {
        chosen.push(Complex64::new(
            if rng.random_bool(0.5) { inner } else { outer },
            0.0,
        ));
    }
    for q in &pairing.quads {
        if rng.random_bool(0.5) {
            chosen.extend([q[0], q[1]]);
        } else {
            chosen.extend([q[2], q[3]]);
        }
    }
    for &(z1, z2) in &pairing.unit_pairs {
        let mid = (z1 + z2) * 0.5;
        chosen.push(mid / mid.norm());
    }

    let s = pairing.stride.max(1);
    let m = chosen.len();
    let span = s * m;
    let n = target_degree;
    if span > 2 * n || (s % 2 == 1 && m > 0) {
        return Err(CompletionError::ParityMismatch);
    }
    // Lowest exponent of G: same parity as n, as close to centered as possible.
    let lo = -(n as i64);
    let hi = n as i64 - span as i64;
    let centre = -(span as f64) / 2.0;
    let e0 = (lo..=hi)
        .filter(|e| (e - n as i64).rem_euclid(2) == 0)
        .min_by(|a, b| {
            (*a as f64 - centre)
                .abs()
                .total_cmp(&(*b as f64 - centre).abs())
        })
        .ok_or(CompletionError::ParityMismatch)?;

    // Sample H(u) = prod (u - rho) on N-th roots of unity with running rescaling.
    let samples = (2 * (m + 1)).next_power_of_two().max(64);
    let pu = p.prune(1e-15).compress(s).unwrap_or_else(|| p.clone());
    let p_vals = pu.sample_circle(samples);
    let mut h_vals = vec![Complex64::new(0.0, 0.0); samples];
    let mut ln_scale = vec![0.0f64; samples];
    for j in 0..samples {
        let u = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / samples as f64);
        let mut v = Complex64::new(1.0, 0.0);
        let mut ls = 0.0;
        for (i, rho) in chosen.iter().enumerate() {
            v *= u - rho;
            if i % 16 == 15 {
                let r = v.norm();
                if r > 0.0 {
                    v /= r;
                    ls += r.ln();
                }
            }
        }
        h_vals[j] = v;
        ln_scale[j] = ls;
    }
    let l_max = h_vals
        .iter()
        .zip(&ln_scale)
        .filter(|(v, _)| v.norm() > 0.0)
        .map(|(v, ls)| ls + v.norm().ln())
        .fold(f64::NEG_INFINITY, f64::max);
    let l_max = if l_max.is_finite() { l_max } else { 0.0 };
    for (v, ls) in h_vals.iter_mut().zip(&ln_scale) {
        *v *= (ls - l_max).exp();
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (h, pv) in h_vals.iter().zip(&p_vals) {
        let h2 = h.norm_sqr();
        num += pv.re * h2;
        den += h2 * h2;
    }
    let alpha_scaled = num / den;
    if !(alpha_scaled > 0.0) {
        return Err(CompletionError::NegativeConstant {
            value: alpha_scaled,
        });
    }
    let ln_alpha = alpha_scaled.ln() - 2.0 * l_max;

    let root_alpha = alpha_scaled.sqrt();
    let mut buf: Vec<Complex64> = h_vals.iter().map(|h| h * root_alpha).collect();
    FftPlanner::new()
        .plan_fft_forward(samples)
        .process(&mut buf);
    let inv = 1.0 / samples as f64;
    let scale = buf.iter().take(m + 1).map(|c| c.norm()).fold(0.0, f64::max) * inv;
    let mut dropped_imag = 0.0f64;
    let terms: Vec<(i64, f64)> = (0..=m)
        .map(|k| {
            let c = buf[k] * inv;
            if scale > 0.0 {
                dropped_imag = dropped_imag.max(c.im.abs() / scale);
            }
            (e0 + (s * k) as i64, c.re)
        })
        .collect();
    let mut window = vec![0.0; 2 * n + 1];
    for (e, c) in terms {
        window[(e + n as i64) as usize] = c;
    }
    let g = LaurentPoly::from_real(-(n as i64), &window);

    let check = sample_count(n);
    let (g_vals, p_full) = (g.sample_circle(check), p.sample_circle(check));
    let residual = g_vals
        .iter()
        .zip(&p_full)
        .map(|(gv, pv)| (gv.norm_sqr() - pv.re).abs())
        .fold(0.0, f64::max);
    let report = CompletionReport {
        prop_constant: ln_alpha.exp(),
        ln_prop_constant: Some(ln_alpha),
        residual,
        root_count: pairing.root_count(),
        rng_seed,
        dropped_imag,
    };
    Ok((g, report))
}

/// Max sampled `| |F|^2 + |G|^2 - 1 |` on the unit circle.
pub fn completion_residual(f: &LaurentPoly, g: &LaurentPoly) -> f64 {
    let deg = f.half_width().max(g.half_width());
    let n = sample_count(deg);
    let (fs, gs) = (f.sample_circle(n), g.sample_circle(n));
    fs.iter()
        .zip(&gs)
        .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max)
}

pub fn complete(
    f: &LaurentPoly,
    rng_seed: u64,
) -> Result<(LowElement, CompletionReport), CompletionError> {
    complete_with(f, rng_seed, &CompletionOptions::default())
}

pub fn complete_with(
    f: &LaurentPoly,
    rng_seed: u64,
    opts: &CompletionOptions,
) -> Result<(LowElement, CompletionReport), CompletionError> {
    let parity = f.parity();
    if parity == Parity::Mixed {
        return Err(CompletionError::NotParity(parity));
    }
    let f = f.trim();
    let p = build_target_poly_with(&f, opts.norm_slack)?;
    let n = f.degree().finite().unwrap_or(0);

    let (g, mut report) = if p.max_abs_coeff() <= 1e-14 {
        let report = CompletionReport {
            prop_constant: 0.0,
            ln_prop_constant: None,
            residual: 0.0,
            root_count: 0,
            rng_seed,
            dropped_imag: 0.0,
        };
        (LaurentPoly::zero(), report)
    } else {
        let (u_roots, stride) = roots_in_u(&p, &opts.roots)?;
        let mut pairing = pair_roots(&u_roots, opts.pair_tol)?;
        pairing.stride = stride;
        build_g(&pairing, &p, n, rng_seed)?
    };
    let g_parity = g.parity();
    if !g.is_zero() && g_parity != Parity::of_exponent(n as i64) {
        return Err(CompletionError::ParityMismatch);
    }
    report.residual = completion_residual(&f, &g);
    if !(report.residual <= opts.residual_gate) {
        return Err(CompletionError::ResidualTooLarge {
            residual: report.residual,
            gate: opts.residual_gate,
        });
    }
    Ok((LowElement::new(f, g), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::primitive_factor;

    fn half_cos() -> LaurentPoly {
        LaurentPoly::from_real(-1, &[0.5, 0.0, 0.5])
    }

    #[test]
    fn target_poly_examples() {
        let p = build_target_poly(&half_cos()).unwrap();
        let expect = LaurentPoly::from_real(-2, &[-0.25, 0.0, 0.5, 0.0, -0.25]);
        assert!(p.max_diff(&expect) < 1e-16);
        assert!(build_target_poly(&LaurentPoly::monomial(1, 1.0))
            .unwrap()
            .is_zero());
        assert_eq!(
            build_target_poly(&LaurentPoly::zero()).unwrap(),
            LaurentPoly::constant(1.0)
        );
        assert!(matches!(
            build_target_poly(&LaurentPoly::constant(1.5)),
            Err(CompletionError::NormTooLarge { .. })
        ));
    }

    #[test]
    fn roots_of_worked_example() {
        let p = build_target_poly(&half_cos()).unwrap();
        let mut r = find_roots(&p).unwrap();
        assert_eq!(r.len(), 4);
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (z, e) in r.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((z - Complex64::new(e, 0.0)).norm() < 1e-7, "{z}");
        }
    }

    #[test]
    fn worked_example_completion() {
        let (u, rep) = complete(&half_cos(), 0).unwrap();
        let g = &u.b;
        let plus = LaurentPoly::from_real(-1, &[-0.5, 0.0, 0.5]);
        assert!(
            g.max_diff(&plus) < 1e-12 || g.max_diff(&-&plus) < 1e-12,
            "{g:?}"
        );
        assert!(rep.residual < 1e-12);
        assert!((rep.prop_constant - 0.25).abs() < 1e-12);
    }

    #[test]
    fn unimodular_target() {
        let (u, rep) = complete(&LaurentPoly::monomial(1, 1.0), 3).unwrap();
        assert!(u.max_diff(&LowElement::w_tilde()) < 1e-15);
        assert!(rep.residual < 1e-15);
    }

    #[test]
    fn constant_and_monomial_targets() {
        let (u, rep) = complete(&LaurentPoly::zero(), 0).unwrap();
        assert!((u.b.max_abs_coeff() - 1.0).abs() < 1e-15);
        assert!(rep.residual < 1e-15);
        let (u, rep) = complete(&LaurentPoly::monomial(1, 0.5), 0).unwrap();
        assert!(rep.residual < 1e-15);
        assert_eq!(u.b.parity(), Parity::Odd);
    }

    #[test]
    fn completes_product_of_factors() {
        let mut u = LowElement::identity();
        for a in [0.3, -1.1, 0.7, 2.0, 0.1, -0.4] {
            u = u.mul(&primitive_factor(a));
        }
        let (v, rep) = complete(&u.a, 11).unwrap();
        assert!(rep.residual < 1e-10, "{}", rep.residual);
        assert!(v.unitarity_residual(64) < 1e-9);
        assert_eq!(v.b.parity(), Parity::Even);
    }

    #[test]
    fn seed_determinism() {
        let f = LaurentPoly::from_real(-3, &[0.1, 0.0, 0.3, 0.0, 0.2, 0.0, -0.25]);
        let (a, _) = complete(&f, 42).unwrap();
        let (b, _) = complete(&f, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mixed_parity_rejected() {
        let f = LaurentPoly::from_real(0, &[0.2, 0.2]);
        assert!(matches!(
            complete(&f, 0),
            Err(CompletionError::NotParity(Parity::Mixed))
        ));
    }

    #[test]
    fn pairing_examples() {
        let c = Complex64::new;
        let p = pair_roots(
            &[
                c(2.0, 0.0),
                c(0.5, 0.0),
                c(0.0, 3.0),
                c(0.0, -3.0),
                c(0.0, 1.0 / 3.0),
                c(0.0, -1.0 / 3.0),
            ],
            1e-7,
        )
        .unwrap();
        assert_eq!(p.real_pairs.len(), 1);
        assert_eq!(p.quads.len(), 1);
        let p = pair_roots(
            &[c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)],
            1e-7,
        )
        .unwrap();
        assert_eq!(p.unit_pairs.len(), 2);
    }
}
