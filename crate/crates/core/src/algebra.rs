//! The Low algebra `A(w~) + B(w~)·iX` and the Haah algebra
//! `A(w~) + B(w~)·iX + C(w~)·iY + D(w~)·iZ` over real Laurent polynomials,
//! where `w~ = diag(w, w^{-1})`.
//!
//! At a unit `w` a Haah element is the 2×2 matrix
//!
//! ```text
//! [ A(w) + iD(w)         C(w) + iB(w)       ]
//! [ iB(1/w) - C(1/w)     A(1/w) - iD(1/w)   ]
//! ```
//!
//! and a Low element is the special case `C = D = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::laurent::{Degree, LaurentPoly, Parity};

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tag recorded in angle files; the circuit is read left to right.
pub const ANGLE_CONVENTION: &str = "left-to-right: E(a_d)...E(a_1).Rx(a0)";

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat_adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

/// Frobenius norm of `a a^† - I`.
pub fn unitarity_defect(a: &Mat2) -> f64 {
    let p = mat_mul(a, &mat_adjoint(a));
    let mut s = 0.0;
    for (i, row) in p.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            s += (v - target).norm_sqr();
        }
    }
    s.sqrt()
}

/// Element of the Haah algebra with real Laurent components.
#[derive(Debug, Clone, PartialEq)]
pub struct HaahElement {
    pub a: LaurentPoly,
    pub b: LaurentPoly,
    pub c: LaurentPoly,
    pub d: LaurentPoly,
}

/// 2×2 matrix over complex Laurent polynomials.
#[derive(Debug, Clone)]
pub struct LaurentMatrix(pub [[LaurentPoly; 2]; 2]);

impl LaurentMatrix {
    pub fn mul(&self, rhs: &LaurentMatrix) -> LaurentMatrix {
        let (m, n) = (&self.0, &rhs.0);
        let entry = |i: usize, j: usize| &(&m[i][0] * &n[0][j]) + &(&m[i][1] * &n[1][j]);
        LaurentMatrix([[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]])
    }

    pub fn eval(&self, theta: f64) -> Mat2 {
        let e = |i: usize, j: usize| self.0[i][j].eval(theta);
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    }
}

fn i_times(p: &LaurentPoly) -> LaurentPoly {
    p.scale_complex(I)
}

fn imag_part(p: &LaurentPoly) -> LaurentPoly {
    p.scale_complex(-I).real_part()
}

impl HaahElement {
    pub fn new(a: LaurentPoly, b: LaurentPoly, c: LaurentPoly, d: LaurentPoly) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        LowElement::identity().into()
    }

    pub fn components(&self) -> [&LaurentPoly; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn to_matrix(&self) -> LaurentMatrix {
        let m00 = &self.a + &i_times(&self.d);
        let m01 = &self.c + &i_times(&self.b);
        let m10 = (&i_times(&self.b) - &self.c).reflect();
        let m11 = (&self.a - &i_times(&self.d)).reflect();
        LaurentMatrix([[m00, m01], [m10, m11]])
    }

    /// Reads the components back from the top row of a matrix representation.
    pub fn from_matrix(m: &LaurentMatrix) -> Self {
        let [top, _] = &m.0;
        Self {
            a: top[0].real_part(),
            d: imag_part(&top[0]),
            c: top[1].real_part(),
            b: imag_part(&top[1]),
        }
    }

    pub fn mul(&self, rhs: &HaahElement) -> HaahElement {
        let (m, n) = (self.to_matrix().0, rhs.to_matrix().0);
        let p00 = &(&m[0][0] * &n[0][0]) + &(&m[0][1] * &n[1][0]);
        let p01 = &(&m[0][0] * &n[0][1]) + &(&m[0][1] * &n[1][1]);
        Self {
            a: p00.real_part(),
            d: imag_part(&p00),
            c: p01.real_part(),
            b: imag_part(&p01),
        }
    }

    /// Conjugate-transpose at every unit `w`: `(A, B, C, D) -> (A*, -B, -C, -D*)`.
    pub fn star(&self) -> HaahElement {
        Self {
            a: self.a.star(),
            b: -&self.b,
            c: -&self.c,
            d: -&self.d.star(),
        }
    }

    pub fn degree(&self) -> Degree {
        self.components()
            .iter()
            .fold(Degree::NegInfinity, |acc, p| acc.max(p.degree()))
    }

    /// Degree after dropping coefficients below `rel_tol` times the largest one.
    pub fn degree_with_tol(&self, rel_tol: f64) -> Degree {
        let scale = self.max_abs_coeff();
        let cut = |p: &LaurentPoly| {
            if scale == 0.0 {
                Degree::NegInfinity
            } else {
                // rescale the per-component tolerance to the element-wide maximum
                let m = p.max_abs_coeff();
                if m == 0.0 {
                    Degree::NegInfinity
                } else {
                    p.degree_with_tol(rel_tol * scale / m)
                }
            }
        };
        self.components()
            .iter()
            .fold(Degree::NegInfinity, |acc, p| acc.max(cut(p)))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.components()
            .iter()
            .map(|p| p.max_abs_coeff())
            .fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &HaahElement) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(p, q)| p.max_diff(q))
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, theta: f64) -> Mat2 {
        let (w, wbar) = (self.eval_components(theta), self.eval_components(-theta));
        entries(w, wbar)
    }

    fn eval_components(&self, theta: f64) -> [Complex64; 4] {
        [
            self.a.eval(theta),
            self.b.eval(theta),
            self.c.eval(theta),
            self.d.eval(theta),
        ]
    }

    /// `max_j ||M(theta_j) M(theta_j)^† - I||_F` over equispaced samples.
    ///
    /// The sample count is raised to `4·(degree+1)` if smaller.
    pub fn unitarity_residual(&self, samples: usize) -> f64 {
        let d = self.degree().finite().unwrap_or(0);
        let n = samples.max(4 * (d + 1));
        let s: Vec<Vec<Complex64>> = self
            .components()
            .iter()
            .map(|p| p.sample_circle(n))
            .collect();
        (0..n)
            .map(|j| {
                let r = (n - j) % n;
                let at = |idx: usize| [s[0][idx], s[1][idx], s[2][idx], s[3][idx]];
                unitarity_defect(&entries(at(j), at(r)))
            })
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_diff(&self.star()) <= tol
    }

    pub fn parity(&self) -> Parity {
        combine_parities(self.components().iter().map(|p| (p.is_zero(), p.parity())))
    }

    /// Projects onto the Low algebra, dropping `C` and `D`.
    pub fn to_low(&self) -> LowElement {
        LowElement {
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }
}

fn entries(w: [Complex64; 4], wbar: [Complex64; 4]) -> Mat2 {
    let [a, b, c, d] = w;
    let [ar, br, cr, dr] = wbar;
    [[a + I * d, c + I * b], [I * br - cr, ar - I * dr]]
}

fn combine_parities(it: impl Iterator<Item = (bool, Parity)>) -> Parity {
    let mut out: Option<Parity> = None;
    for (zero, p) in it {
        if zero {
            continue;
        }
        out = match out {
            None => Some(p),
            Some(q) if q == p => Some(q),
            Some(_) => return Parity::Mixed,
        };
    }
    out.unwrap_or(Parity::Even)
}

/// Element `A(w~) + B(w~)·iX` of the Low algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct LowElement {
    pub a: LaurentPoly,
    pub b: LaurentPoly,
}

impl From<LowElement> for HaahElement {
    fn from(m: LowElement) -> Self {
        HaahElement {
            a: m.a,
            b: m.b,
            c: LaurentPoly::zero(),
            d: LaurentPoly::zero(),
        }
    }
}

impl LowElement {
    pub fn new(a: LaurentPoly, b: LaurentPoly) -> Self {
        Self { a, b }
    }

    pub fn identity() -> Self {
        Self {
            a: LaurentPoly::constant(1.0),
            b: LaurentPoly::zero(),
        }
    }

    /// `w~ = diag(w, 1/w)`.
    pub fn w_tilde() -> Self {
        Self {
            a: LaurentPoly::monomial(1, 1.0),
            b: LaurentPoly::zero(),
        }
    }

    /// Product in the Low algebra:
    /// `(A1 + B1 iX)(A2 + B2 iX) = (A1 A2 - B1 B2^R) + (A1 B2 + B1 A2^R) iX`
    /// where `p^R(w) = p(1/w)`.
    pub fn mul(&self, rhs: &LowElement) -> LowElement {
        let a = &(&self.a * &rhs.a) - &(&self.b * &rhs.b.reflect());
        let b = &(&self.a * &rhs.b) + &(&self.b * &rhs.a.reflect());
        LowElement { a, b }
    }

    /// `(A, B) -> (A*, -B)`.
    pub fn star(&self) -> LowElement {
        LowElement {
            a: self.a.star(),
            b: -&self.b,
        }
    }

    pub fn degree(&self) -> Degree {
        self.a.degree().max(self.b.degree())
    }

    /// Storage half-width of the larger component.
    pub fn half_width(&self) -> usize {
        self.a.half_width().max(self.b.half_width())
    }

    pub fn truncate(&self, n: usize) -> LowElement {
        LowElement {
            a: self.a.truncate(n),
            b: self.b.truncate(n),
        }
    }

    pub fn max_diff(&self, other: &LowElement) -> f64 {
        self.a.max_diff(&other.a).max(self.b.max_diff(&other.b))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.a.max_abs_coeff().max(self.b.max_abs_coeff())
    }

    pub fn eval(&self, theta: f64) -> Mat2 {
        let (a, b) = (self.a.eval(theta), self.b.eval(theta));
        let (ar, br) = (self.a.eval(-theta), self.b.eval(-theta));
        [[a, I * b], [I * br, ar]]
    }

    /// `(A(1), B(1))`: the element at `w = 1` is `A(1) I + B(1) iX`.
    pub fn value_at_one(&self) -> (f64, f64) {
        let sum = |p: &LaurentPoly| p.window().iter().map(|c| c.re).sum::<f64>();
        (sum(&self.a), sum(&self.b))
    }

    pub fn unitarity_residual(&self, samples: usize) -> f64 {
        let d = self.degree().finite().unwrap_or(0);
        let n = samples.max(4 * (d + 1));
        let sa = self.a.sample_circle(n);
        let sb = self.b.sample_circle(n);
        (0..n)
            .map(|j| {
                let r = (n - j) % n;
                unitarity_defect(&[[sa[j], I * sb[j]], [I * sb[r], sa[r]]])
            })
            .fold(0.0, f64::max)
    }

    pub fn parity(&self) -> Parity {
        combine_parities([&self.a, &self.b].iter().map(|p| (p.is_zero(), p.parity())))
    }
}

/// `cos(alpha) I + sin(alpha) iX`.
pub fn xrotation(alpha: f64) -> LowElement {
    let (s, c) = alpha.sin_cos();
    LowElement {
        a: LaurentPoly::constant(c),
        b: LaurentPoly::constant(s),
    }
}

/// Degree-one primitive factor
/// `E(alpha) = (cos²α w + sin²α w⁻¹) + sinα cosα (w - w⁻¹)·iX`,
/// which equals `xrotation(-alpha) · w~ · xrotation(alpha)`. `E(alpha)` is
/// `pi`-periodic in `alpha` and `E(alpha)(w = 1) = I`.
pub fn primitive_factor(alpha: f64) -> LowElement {
    let (s, c) = alpha.sin_cos();
    LowElement {
        a: LaurentPoly::from_real(-1, &[s * s, 0.0, c * c]),
        b: LaurentPoly::from_real(-1, &[-s * c, 0.0, s * c]),
    }
}

/// Angle of a degree-one factor of `E` shape, in `(-pi/2, pi/2]`.
///
/// Uses `a_1 - a_{-1} = cos 2α` and `b_1 - b_{-1} = sin 2α`, which stays
/// well-defined at `alpha = pi/2` where `a_1 = b_1 = 0`.
pub fn primitive_angle(factor: &LowElement) -> f64 {
    let (a, b) = (&factor.a, &factor.b);
    let two_alpha = (b.re(1) - b.re(-1)).atan2(a.re(1) - a.re(-1));
    let alpha = 0.5 * two_alpha;
    if alpha <= -PI / 2.0 {
        alpha + PI
    } else {
        alpha
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSequence {
    pub convention: String,
    /// `alpha_d, ..., alpha_1`, in circuit order.
    pub angles: Vec<f64>,
    pub alpha0: f64,
}

impl AngleSequence {
    pub fn new(angles: Vec<f64>, alpha0: f64) -> Self {
        Self {
            convention: ANGLE_CONVENTION.to_string(),
            angles,
            alpha0,
        }
    }

    pub fn degree(&self) -> usize {
        self.angles.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() <= tol))
    }

    fn w() -> LaurentPoly {
        LaurentPoly::monomial(1, 1.0)
    }
    fn winv() -> LaurentPoly {
        LaurentPoly::monomial(-1, 1.0)
    }

    #[test]
    fn w_tilde_squared_is_diagonal() {
        let wt: HaahElement = LowElement::w_tilde().into();
        let sq = wt.mul(&wt);
        assert_eq!(sq.a.trim(), LaurentPoly::monomial(2, 1.0));
        assert!(sq.b.is_zero() && sq.c.is_zero() && sq.d.is_zero());
        let t = 0.37;
        let m = sq.eval(t);
        let e2 = Complex64::from_polar(1.0, 2.0 * t);
        assert!(close(&m, &[[e2, ZERO], [ZERO, e2.conj()]], 1e-15));
    }

    #[test]
    fn identity_is_neutral() {
        let m = HaahElement::new(
            LaurentPoly::from_real(-1, &[0.1, 0.2, 0.3]),
            LaurentPoly::from_real(-2, &[0.5, 0.0, -0.4, 0.0, 0.1]),
            LaurentPoly::constant(0.7),
            LaurentPoly::from_real(0, &[0.0, -0.2]),
        );
        assert!(HaahElement::identity().mul(&m).max_diff(&m) < 1e-16);
        assert!(m.mul(&HaahElement::identity()).max_diff(&m) < 1e-16);
    }

    #[test]
    fn product_matches_numeric_matrix_product() {
        let e: HaahElement = primitive_factor(FRAC_PI_4).into();
        let p = e.mul(&e);
        for &t in &[0.0, 0.4, 2.1, -1.3] {
            let expect = mat_mul(&e.eval(t), &e.eval(t));
            assert!(close(&p.eval(t), &expect, 1e-13));
        }
    }

    #[test]
    fn low_product_agrees_with_matrix_route() {
        let x = LowElement::new(
            LaurentPoly::from_real(-3, &[0.1, 0.0, -0.3, 0.0, 0.2, 0.0, 0.5]),
            LaurentPoly::from_real(-3, &[0.4, 0.0, 0.1, 0.0, -0.6, 0.0, 0.2]),
        );
        let y = LowElement::new(
            LaurentPoly::from_real(-2, &[0.3, 0.0, 0.9, 0.0, -0.2]),
            LaurentPoly::from_real(-2, &[-0.1, 0.0, 0.2, 0.0, 0.7]),
        );
        let direct: HaahElement = x.mul(&y).into();
        let via = HaahElement::from(x).mul(&y.into());
        assert!(direct.max_diff(&via) < 1e-15);
        assert!(via.c.max_abs_coeff() < 1e-13 && via.d.max_abs_coeff() < 1e-13);
    }

    #[test]
    fn star_examples() {
        let wt: HaahElement = LowElement::w_tilde().into();
        assert_eq!(wt.star().a, winv().truncate(1));
        let ix: HaahElement = xrotation(std::f64::consts::FRAC_PI_2).into();
        let s = ix.star();
        assert!((s.b.re(0) + 1.0).abs() < 1e-15);
        assert!(s.a.re(0).abs() < 1e-15);
    }

    #[test]
    fn star_is_conjugate_transpose() {
        let m = HaahElement::new(
            LaurentPoly::from_real(-2, &[0.3, -0.1, 0.2, 0.5, 0.05]),
            LaurentPoly::from_real(-1, &[0.7, 0.2, -0.4]),
            LaurentPoly::from_real(0, &[0.1, 0.9]),
            LaurentPoly::from_real(-2, &[0.6, 0.0, 0.0, -0.3, 0.2]),
        );
        for &t in &[0.0, 0.5, 1.9, -2.7] {
            assert!(close(&m.star().eval(t), &mat_adjoint(&m.eval(t)), 1e-14));
        }
    }

    #[test]
    fn degree_examples() {
        let wt: HaahElement = LowElement::w_tilde().into();
        assert_eq!(wt.degree(), Degree::Finite(1));
        for &a in &[0.0, 0.3, 1.2, -2.0] {
            assert_eq!(primitive_factor(a).degree(), Degree::Finite(1));
        }
        assert_eq!(
            HaahElement::new(
                LaurentPoly::zero(),
                LaurentPoly::zero(),
                LaurentPoly::zero(),
                LaurentPoly::zero()
            )
            .degree(),
            Degree::NegInfinity
        );
    }

    #[test]
    fn eval_examples() {
        let t = 0.81;
        let m = LowElement::w_tilde().eval(t);
        let e = Complex64::from_polar(1.0, t);
        assert!(close(&m, &[[e, ZERO], [ZERO, e.conj()]], 1e-15));

        let a = 0.6;
        let r = xrotation(a).eval(1.3);
        let (s, c) = a.sin_cos();
        assert!(close(&r, &[[c.into(), I * s], [I * s, c.into()]], 1e-15));

        let rot = LowElement::new((&w() + &winv()).scale(0.5), (&w() - &winv()).scale(0.5));
        let (s, c) = t.sin_cos();
        let expect = [[c.into(), (-s).into()], [s.into(), c.into()]];
        assert!(close(&rot.eval(t), &expect, 1e-15));
    }

    #[test]
    fn unitarity_residual_examples() {
        assert!(LowElement::w_tilde().unitarity_residual(16) <= 1e-15);
        let p = primitive_factor(0.3).mul(&primitive_factor(1.1));
        assert!(p.unitarity_residual(64) <= 1e-13);
        // A = 2: M M^† - I = 3 I, whose Frobenius norm is 3·sqrt(2).
        let m = LowElement::new(LaurentPoly::constant(2.0), LaurentPoly::zero());
        assert!((m.unitarity_residual(8) - 3.0 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn xrotation_examples() {
        assert_eq!(xrotation(0.0), LowElement::identity());
        let ix = xrotation(std::f64::consts::FRAC_PI_2);
        assert!(ix.a.re(0).abs() < 1e-16 && ix.b.re(0) == 1.0);
        let (a, b) = (0.4, -1.3);
        assert!(xrotation(a).mul(&xrotation(b)).max_diff(&xrotation(a + b)) < 1e-15);
    }

    #[test]
    fn primitive_factor_examples() {
        assert!(primitive_factor(0.0).max_diff(&LowElement::w_tilde()) < 1e-16);
        let e = primitive_factor(FRAC_PI_4);
        assert!((e.a.re(1) - 0.5).abs() < 1e-15 && (e.a.re(-1) - 0.5).abs() < 1e-15);
        assert!((e.b.re(1) - 0.5).abs() < 1e-15 && (e.b.re(-1) + 0.5).abs() < 1e-15);
        for &a in &[0.2, -1.4, 2.9] {
            let id = [[ONE, ZERO], [ZERO, ONE]];
            assert!(close(&primitive_factor(a).eval(0.0), &id, 1e-15));
            let conj = xrotation(-a).mul(&LowElement::w_tilde()).mul(&xrotation(a));
            assert!(conj.max_diff(&primitive_factor(a)) < 1e-15);
        }
    }

    #[test]
    fn primitive_angle_round_trip() {
        for &a in &[0.0, 0.3, -1.2, FRAC_PI_4, std::f64::consts::FRAC_PI_2, 1.57] {
            let got = primitive_angle(&primitive_factor(a));
            assert!((got - a).abs() < 1e-12, "{a} -> {got}");
        }
        // pi-periodicity
        assert!((primitive_angle(&primitive_factor(2.5)) - (2.5 - PI)).abs() < 1e-12);
    }

    #[test]
    fn hermitian_examples() {
        let herm: HaahElement = LowElement::new(&w() + &winv(), LaurentPoly::zero()).into();
        assert!(herm.is_hermitian(1e-15));
        let z = HaahElement::new(
            LaurentPoly::zero(),
            LaurentPoly::zero(),
            LaurentPoly::zero(),
            &w() - &winv(),
        );
        assert!(z.is_hermitian(1e-15));
        let wt: HaahElement = LowElement::w_tilde().into();
        assert!(!wt.is_hermitian(1e-15));
    }

    #[test]
    fn parity_of_primitive_products() {
        let mut acc = LowElement::identity();
        for (i, &a) in [0.1, 0.7, -0.4, 1.9].iter().enumerate() {
            acc = acc.mul(&primitive_factor(a));
            let expect = if i % 2 == 0 {
                Parity::Odd
            } else {
                Parity::Even
            };
            assert_eq!(acc.parity(), expect);
        }
    }
}
