use num_complex::Complex64;
use proptest::prelude::*;
use qsp_core::algebra::{mat_adjoint, mat_mul, primitive_factor, LaurentMatrix, LowElement};
use qsp_core::{Degree, HaahElement, LaurentPoly, Parity};

fn coeffs(max_deg: usize) -> impl Strategy<Value = Vec<f64>> {
    (0..=max_deg).prop_flat_map(|n| prop::collection::vec(-1.0..1.0f64, 2 * n + 1))
}

fn poly(c: &[f64]) -> LaurentPoly {
    let n = (c.len() / 2) as i64;
    LaurentPoly::from_real(-n, c)
}

fn haah(max_deg: usize) -> impl Strategy<Value = HaahElement> {
    (
        coeffs(max_deg),
        coeffs(max_deg),
        coeffs(max_deg),
        coeffs(max_deg),
    )
        .prop_map(|(a, b, c, d)| HaahElement::new(poly(&a), poly(&b), poly(&c), poly(&d)))
}

/// `sum lambda_j (w~^j + w~^-j) + mu_j (w~^j - w~^-j) iZ` with a nonzero top term.
fn hermitian(max_deg: usize) -> impl Strategy<Value = HaahElement> {
    (0..=max_deg)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(-1.0..1.0f64, n + 1),
                prop::collection::vec(-1.0..1.0f64, n + 1),
            )
        })
        .prop_map(|(lam, mu)| {
            let n = lam.len() - 1;
            let mut a = LaurentPoly::constant(2.0 * lam[0]);
            let mut d = LaurentPoly::zero();
            for j in 1..=n {
                let l = if j == n && lam[j].abs() < 0.1 {
                    0.5
                } else {
                    lam[j]
                };
                a = &a + &LaurentPoly::from_terms([(j as i64, l.into()), (-(j as i64), l.into())]);
                d = &d
                    + &LaurentPoly::from_terms([
                        (j as i64, mu[j].into()),
                        (-(j as i64), (-mu[j]).into()),
                    ]);
            }
            HaahElement::new(a, LaurentPoly::zero(), LaurentPoly::zero(), d)
        })
}

fn complex_matrix(max_deg: usize) -> impl Strategy<Value = LaurentMatrix> {
    let entry = (0..=max_deg)
        .prop_flat_map(|n| prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2 * n + 1));
    prop::array::uniform4(entry).prop_map(|es| {
        let p = |v: &Vec<(f64, f64)>| {
            let n = (v.len() / 2) as i64;
            let c: Vec<Complex64> = v.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
            LaurentPoly::from_complex(-n, &c)
        };
        LaurentMatrix([[p(&es[0]), p(&es[1])], [p(&es[2]), p(&es[3])]])
    })
}

fn matrix_degree(m: &LaurentMatrix) -> Degree {
    m.0.iter()
        .flatten()
        .fold(Degree::NegInfinity, |acc, p| acc.max(p.degree()))
}

fn deg(d: Degree) -> i64 {
    d.finite().map_or(-1, |v| v as i64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn star_is_an_involution(m in haah(8)) {
        prop_assert!(m.star().star().max_diff(&m) <= 1e-15);
    }

    #[test]
    fn star_reverses_products(m in haah(8), n in haah(8)) {
        let lhs = m.mul(&n).star();
        let rhs = n.star().mul(&m.star());
        prop_assert!(lhs.max_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn star_matches_pointwise_adjoint(m in haah(6), theta in -3.2..3.2f64) {
        let (s, a) = (m.star().eval(theta), mat_adjoint(&m.eval(theta)));
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((s[i][j] - a[i][j]).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn product_agrees_with_pointwise_product(m in haah(6), n in haah(6), theta in -3.2..3.2f64) {
        let p = m.mul(&n).eval(theta);
        let q = mat_mul(&m.eval(theta), &n.eval(theta));
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((p[i][j] - q[i][j]).norm() <= 1e-11);
            }
        }
    }

    #[test]
    fn hermitian_spanning_set_is_hermitian(h in hermitian(8)) {
        prop_assert!(h.is_hermitian(1e-15));
    }

    #[test]
    fn hermitian_degrees_add(h in hermitian(8), m in complex_matrix(8)) {
        let prod = h.to_matrix().mul(&m);
        prop_assert_eq!(deg(matrix_degree(&prod)), deg(h.degree()) + deg(matrix_degree(&m)));
    }

    #[test]
    fn main_lemma_inequality(m in haah(8), mp in haah(8)) {
        let lhs = deg(m.mul(&mp).degree_with_tol(1e-10));
        let rhs = deg(mp.degree()) - deg(m.degree()) + deg(m.star().mul(&m).degree_with_tol(1e-10));
        prop_assert!(lhs >= rhs, "{lhs} < {rhs}");
    }

    #[test]
    fn main_lemma_with_unitary_left_factor(
        angles in prop::collection::vec(-1.5..1.5f64, 1..6),
        h in hermitian(3),
        mp in haah(8),
    ) {
        let u: HaahElement = angles.iter().fold(LowElement::identity(), |acc, &a| acc.mul(&primitive_factor(a))).into();
        let m = u.mul(&h);
        let lhs = deg(m.mul(&mp).degree_with_tol(1e-10));
        let rhs = deg(mp.degree()) - deg(m.degree_with_tol(1e-10)) + deg(m.star().mul(&m).degree_with_tol(1e-10));
        prop_assert!(lhs >= rhs, "{lhs} < {rhs}");
    }

    #[test]
    fn primitive_products_are_unitary_with_alternating_parity(angles in prop::collection::vec(-3.2..3.2f64, 1..40)) {
        let u = angles.iter().fold(LowElement::identity(), |acc, &a| acc.mul(&primitive_factor(a)));
        let d = angles.len();
        prop_assert_eq!(u.degree(), Degree::Finite(d));
        prop_assert!(u.unitarity_residual(8 * (d + 1)) <= 1e-12 * d as f64);
        let expect = if d % 2 == 0 { Parity::Even } else { Parity::Odd };
        prop_assert_eq!(u.parity(), expect);
    }

    #[test]
    fn laurent_degrees_add_for_real_polys(a in coeffs(12), b in coeffs(12)) {
        let (p, q) = (poly(&a), poly(&b));
        prop_assume!(!p.is_zero() && !q.is_zero());
        let (dp, dq) = (p.degree().finite().unwrap(), q.degree().finite().unwrap());
        prop_assert!((&p * &q).degree().finite().unwrap() <= dp + dq);
        prop_assert!((&p * &q).star().max_diff(&(&p.star() * &q.star())) <= 1e-14);
    }
}
