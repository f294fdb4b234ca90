use std::f64::consts::PI;

use proptest::prelude::*;
use qsp_core::algebra::xrotation;
use qsp_core::decomposition::{carve, decompose, extract_angles};
use qsp_core::verify::reconstruct;
use qsp_core::{primitive_factor, AngleSequence, LowElement};

fn chain(angles: &[f64], alpha0: f64) -> LowElement {
    angles
        .iter()
        .fold(LowElement::identity(), |acc, &a| {
            acc.mul(&primitive_factor(a))
        })
        .mul(&xrotation(alpha0))
}

/// Distance between angles as elements of R / pi Z.
fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn halving_recovers_angles(angles in prop::collection::vec(-0.25..0.25f64, 2..=64), alpha0 in -1.0..1.0f64) {
        let u = chain(&angles, alpha0);
        let factors = decompose(&u).unwrap();
        let seq = extract_angles(&factors, &u).unwrap();
        let gap = seq.angles.iter().zip(&angles).map(|(a, b)| angle_gap(*a, *b)).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-8, "gap {gap}");
        prop_assert!(reconstruct(&seq).max_diff(&u) <= 1e-9);
    }

    #[test]
    fn carving_recovers_short_sequences(angles in prop::collection::vec(-0.3..0.3f64, 2..=16)) {
        let u = chain(&angles, 0.0);
        let seq = extract_angles(&carve(&u).unwrap(), &u).unwrap();
        let gap = seq.angles.iter().zip(&angles).map(|(a, b)| angle_gap(*a, *b)).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-8, "gap {gap}");
    }

    #[test]
    fn reconstruction_matches_chain(angles in prop::collection::vec(-3.2..3.2f64, 1..=40), alpha0 in -3.2..3.2f64) {
        let seq = AngleSequence::new(angles.clone(), alpha0);
        prop_assert!(reconstruct(&seq).max_diff(&chain(&angles, alpha0)) <= 1e-12);
    }
}

#[test]
fn near_degenerate_midpoint_split() {
    // the product has a phase difference close to pi/2, so the l = 3 split is nearly singular
    for angles in [
        vec![0.0, 0.0, -1.2087096884362885, 0.3611091630512329, 0.0, 0.0],
        vec![
            0.0,
            0.0,
            0.0,
            0.0,
            -0.7231120083241688,
            0.8009544149583769,
            -0.819095382456263,
            0.0,
        ],
    ] {
        let u = chain(&angles, 0.0);
        let seq = extract_angles(&decompose(&u).unwrap(), &u).unwrap();
        assert!(reconstruct(&seq).max_diff(&u) <= 1e-12);
        let gap = seq
            .angles
            .iter()
            .zip(&angles)
            .map(|(a, b)| angle_gap(*a, *b))
            .fold(0.0, f64::max);
        assert!(gap <= 1e-8, "gap {gap}");
    }
}
