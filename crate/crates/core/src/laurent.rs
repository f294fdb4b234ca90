//! Laurent polynomials in a single variable `w`, evaluated on the unit circle.
//!
//! Coefficients are stored densely over the symmetric exponent window `[-n, n]`.
//! A polynomial whose coefficients all have an exactly-zero imaginary part is
//! flagged as real; arithmetic between real polynomials stays real.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Default relative threshold used by [`LaurentPoly::prune`] and parity checks.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-14;

/// Degree of a Laurent polynomial: the largest `|k|` with a nonzero coefficient.
///
/// The zero polynomial has degree [`Degree::NegInfinity`]. `Degree` deliberately
/// does not implement `Ord`; use [`Degree::try_cmp`] or [`Degree::finite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("degree of the zero polynomial cannot be used in ordered comparisons")]
pub struct ZeroDegreeError;

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }

    pub fn try_value(self) -> Result<usize, ZeroDegreeError> {
        self.finite().ok_or(ZeroDegreeError)
    }

    pub fn try_cmp(self, other: Degree) -> Result<Ordering, ZeroDegreeError> {
        Ok(self.try_value()?.cmp(&other.try_value()?))
    }

    /// Larger of two degrees, treating the zero sentinel as the identity.
    pub fn max(self, other: Degree) -> Degree {
        match (self, other) {
            (Degree::NegInfinity, d) | (d, Degree::NegInfinity) => d,
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a.max(b)),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    /// Parity class of a single exponent.
    pub fn of_exponent(k: i64) -> Parity {
        if k.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Parity of a product of two polynomials with these parities.
    pub fn product(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::Mixed, _) | (_, Parity::Mixed) => Parity::Mixed,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct LaurentPoly {
    /// `coeffs[k + half]` holds the coefficient of `w^k`.
    coeffs: Vec<Complex64>,
    half: usize,
    real: bool,
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (k, c) in self.iter_nonzero() {
            if self.real {
                m.entry(&k, &c.re);
            } else {
                m.entry(&k, &c);
            }
        }
        m.finish()
    }
}

impl Default for LaurentPoly {
    fn default() -> Self {
        Self::zero()
    }
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0)],
            half: 0,
            real: true,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(0, c)
    }

    /// `c * w^k` with a real coefficient.
    pub fn monomial(k: i64, c: f64) -> Self {
        let half = k.unsigned_abs() as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * half + 1];
        coeffs[(k + half as i64) as usize] = Complex64::new(c, 0.0);
        Self {
            coeffs,
            half,
            real: true,
        }
    }

    pub fn complex_monomial(k: i64, c: Complex64) -> Self {
        Self::from_terms([(k, c)])
    }

    /// Real polynomial with `coeffs[i]` the coefficient of `w^(lo + i)`.
    pub fn from_real(lo: i64, coeffs: &[f64]) -> Self {
        let hi = lo + coeffs.len() as i64 - 1;
        let half = lo.unsigned_abs().max(hi.unsigned_abs()) as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * half + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            out[(lo + i as i64 + half as i64) as usize] = Complex64::new(c, 0.0);
        }
        Self {
            coeffs: out,
            half,
            real: true,
        }
    }

    /// Polynomial with `coeffs[i]` the coefficient of `w^(lo + i)`.
    pub fn from_complex(lo: i64, coeffs: &[Complex64]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(i, &c)| (lo + i as i64, c)))
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let terms: Vec<(i64, Complex64)> = terms.into_iter().collect();
        let half = terms
            .iter()
            .map(|(k, _)| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * half + 1];
        for (k, c) in terms {
            coeffs[(k + half as i64) as usize] += c;
        }
        Self::from_symmetric(coeffs)
    }

    /// Wraps a symmetric coefficient window of odd length `2n + 1`.
    pub fn from_symmetric(coeffs: Vec<Complex64>) -> Self {
        assert!(
            coeffs.len() % 2 == 1,
            "symmetric window must have odd length"
        );
        let half = coeffs.len() / 2;
        let real = coeffs.iter().all(|c| c.im == 0.0);
        Self { coeffs, half, real }
    }

    fn from_symmetric_real(coeffs: Vec<f64>) -> Self {
        debug_assert!(coeffs.len() % 2 == 1);
        let half = coeffs.len() / 2;
        let coeffs = coeffs.into_iter().map(|c| Complex64::new(c, 0.0)).collect();
        Self {
            coeffs,
            half,
            real: true,
        }
    }

    /// Half-width `n` of the storage window `[-n, n]` (an upper bound on the degree).
    pub fn half_width(&self) -> usize {
        self.half
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.half {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.half as i64) as usize]
        }
    }

    /// Real part of the coefficient of `w^k`.
    pub fn re(&self, k: i64) -> f64 {
        self.coeff(k).re
    }

    /// The symmetric coefficient window, index `k + n` for exponent `k`.
    pub fn window(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Real parts over the window `[-n, n]`.
    pub fn real_window(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }

    pub fn iter_nonzero(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let half = self.half as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(move |(i, &c)| (i as i64 - half, c))
    }

    pub fn is_zero(&self) -> bool {
        self.iter_nonzero().next().is_none()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn degree(&self) -> Degree {
        let n = self.half;
        for d in (0..=n).rev() {
            let lo = self.coeffs[n - d];
            let hi = self.coeffs[n + d];
            if lo != Complex64::new(0.0, 0.0) || hi != Complex64::new(0.0, 0.0) {
                return Degree::Finite(d);
            }
        }
        Degree::NegInfinity
    }

    /// Degree ignoring coefficients with magnitude at most `rel_tol * max|c_k|`.
    pub fn degree_with_tol(&self, rel_tol: f64) -> Degree {
        let cut = rel_tol * self.max_abs_coeff();
        let n = self.half;
        for d in (0..=n).rev() {
            if self.coeffs[n - d].norm() > cut || self.coeffs[n + d].norm() > cut {
                return Degree::Finite(d);
            }
        }
        Degree::NegInfinity
    }

    /// Re-windows to `[-n, n]`, dropping any coefficient outside.
    pub fn truncate(&self, n: usize) -> Self {
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
        let m = n.min(self.half) as i64;
        for k in -m..=m {
            out[(k + n as i64) as usize] = self.coeff(k);
        }
        Self {
            coeffs: out,
            half: n,
            real: self.real,
        }
    }

    /// Shrinks the storage window to the actual degree.
    pub fn trim(&self) -> Self {
        match self.degree() {
            Degree::NegInfinity => Self::zero(),
            Degree::Finite(d) => self.truncate(d),
        }
    }

    /// Zeroes every coefficient with `|c_k| <= rel_tol * max|c_k|`, then trims.
    pub fn prune(&self, rel_tol: f64) -> Self {
        let cut = rel_tol * self.max_abs_coeff();
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                if c.norm() <= cut {
                    Complex64::new(0.0, 0.0)
                } else {
                    c
                }
            })
            .collect();
        Self::from_symmetric(coeffs).trim()
    }

    /// Drops imaginary parts.
    pub fn real_part(&self) -> Self {
        Self::from_symmetric_real(self.real_window())
    }

    pub fn scale(&self, s: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * s).collect();
        Self {
            coeffs,
            half: self.half,
            real: self.real,
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self::from_symmetric(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(w) -> p(w^{-1})`, coefficients unchanged.
    pub fn reflect(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self {
            coeffs,
            half: self.half,
            real: self.real,
        }
    }

    /// Conjugate-reciprocal: `c_k -> conj(c_{-k})`. On the unit circle this is
    /// pointwise complex conjugation.
    pub fn star(&self) -> Self {
        let coeffs = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        Self {
            coeffs,
            half: self.half,
            real: self.real,
        }
    }

    /// `p(w) -> p(w^s)`.
    pub fn expand(&self, stride: usize) -> Self {
        assert!(stride >= 1);
        Self::from_terms(self.iter_nonzero().map(|(k, c)| (k * stride as i64, c)))
            .with_real_flag(self.real)
    }

    /// Inverse of [`expand`](Self::expand). Returns `None` if some exponent is not a multiple of `stride`.
    pub fn compress(&self, stride: usize) -> Option<Self> {
        assert!(stride >= 1);
        let s = stride as i64;
        if self.iter_nonzero().any(|(k, _)| k % s != 0) {
            return None;
        }
        Some(
            Self::from_terms(self.iter_nonzero().map(|(k, c)| (k / s, c)))
                .with_real_flag(self.real),
        )
    }

    /// Largest `s` such that every nonzero exponent is a multiple of `s` (0 for constants).
    pub fn exponent_stride(&self) -> usize {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        self.iter_nonzero()
            .fold(0u64, |g, (k, _)| gcd(g, k.unsigned_abs())) as usize
    }

    fn with_real_flag(mut self, real: bool) -> Self {
        self.real = real || self.coeffs.iter().all(|c| c.im == 0.0);
        self
    }

    /// `sum_k c_k e^{ik theta}`, summed from small to large `|k|`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let n = self.half as i64;
        let mut acc = self.coeff(0);
        for k in 1..=n {
            let (s, c) = (k as f64 * theta).sin_cos();
            let e = Complex64::new(c, s);
            acc += self.coeff(k) * e + self.coeff(-k) * e.conj();
        }
        acc
    }

    /// Evaluation at an arbitrary complex `w` (not necessarily unimodular).
    pub fn eval_at(&self, w: Complex64) -> Complex64 {
        let n = self.half as i32;
        let mut acc = self.coeff(0);
        let (mut pos, mut neg) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let winv = w.inv();
        for k in 1..=n {
            pos *= w;
            neg *= winv;
            acc += self.coeff(k as i64) * pos + self.coeff(-(k as i64)) * neg;
        }
        acc
    }

    /// Values at the `samples` equispaced points `theta_j = 2 pi j / samples`.
    ///
    /// Exact up to FFT rounding: coefficients are folded modulo `samples` first.
    pub fn sample_circle(&self, samples: usize) -> Vec<Complex64> {
        assert!(samples > 0);
        let mut buf = vec![Complex64::new(0.0, 0.0); samples];
        let n = self.half as i64;
        for k in -n..=n {
            let c = self.coeff(k);
            if c.re != 0.0 || c.im != 0.0 {
                buf[k.rem_euclid(samples as i64) as usize] += c;
            }
        }
        inverse_fft(samples).process(&mut buf);
        buf
    }

    /// Sampled sup-norm over `samples` equispaced points of the unit circle.
    ///
    /// This is a lower bound on the true norm. With at least four samples per
    /// unit of degree the gap is a small fraction of the norm.
    pub fn supnorm(&self, samples: usize) -> f64 {
        self.sample_circle(samples)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Parity after ignoring coefficients below `DEFAULT_PRUNE_TOL * max|c_k|`.
    pub fn parity(&self) -> Parity {
        self.parity_with_tol(DEFAULT_PRUNE_TOL)
    }

    pub fn parity_with_tol(&self, rel_tol: f64) -> Parity {
        let cut = rel_tol * self.max_abs_coeff();
        let (mut even, mut odd) = (false, false);
        let n = self.half as i64;
        for k in -n..=n {
            if self.coeff(k).norm() > cut {
                match Parity::of_exponent(k) {
                    Parity::Even => even = true,
                    _ => odd = true,
                }
            }
        }
        match (even, odd) {
            (true, true) => Parity::Mixed,
            (false, true) => Parity::Odd,
            _ => Parity::Even,
        }
    }

    /// Maximum coefficientwise distance between two polynomials.
    pub fn max_diff(&self, other: &LaurentPoly) -> f64 {
        let n = self.half.max(other.half) as i64;
        (-n..=n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let half = self.half.max(other.half);
        let n = half as i64;
        let coeffs = (-n..=n).map(|k| f(self.coeff(k), other.coeff(k))).collect();
        Self {
            coeffs,
            half,
            real: self.real && other.real,
        }
    }
}

/// Full linear convolution of two real sequences.
pub(crate) fn convolve_real(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

fn convolve_complex(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.re == 0.0 && x.im == 0.0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

fn inverse_fft(len: usize) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft_inverse(len)
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(-1.0)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        // Windows [-n, n] and [-m, m] convolve onto [-(n+m), n+m].
        if self.real && rhs.real {
            LaurentPoly::from_symmetric_real(convolve_real(&self.real_window(), &rhs.real_window()))
        } else {
            LaurentPoly::from_symmetric(convolve_complex(&self.coeffs, &rhs.coeffs))
        }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $f(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
