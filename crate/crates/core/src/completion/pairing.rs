//! Grouping the roots of a real, star-symmetric Laurent polynomial into
//! reciprocal pairs and conjugate-reciprocal quadruples.

use num_complex::Complex64;

use super::CompletionError;

pub const DEFAULT_PAIR_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Default)]
pub struct RootPairing {
    /// `(r, 1/r)` with `|r| < 1`, real.
    pub real_pairs: Vec<(f64, f64)>,
    /// `[z, conj z, 1/z, 1/conj z]` with `|z| < 1` and `Im z > 0`.
    pub quads: Vec<[Complex64; 4]>,
    /// Roots on the unit circle, each paired with its reflection `1/conj z`.
    pub unit_pairs: Vec<(Complex64, Complex64)>,
    /// Roots are stated in the variable `u = w^stride`.
    pub stride: usize,
    /// Largest distance between a root and the partner it was matched to.
    pub max_mismatch: f64,
}

impl RootPairing {
    pub fn root_count(&self) -> usize {
        2 * self.real_pairs.len() + 4 * self.quads.len() + 2 * self.unit_pairs.len()
    }
}

fn take_nearest(pool: &mut Vec<Complex64>, target: Complex64) -> Option<(Complex64, f64)> {
    let (idx, dist) = pool
        .iter()
        .enumerate()
        .map(|(i, z)| (i, (z - target).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    Some((pool.swap_remove(idx), dist))
}

/// Pairs roots, assuming the multiset is closed under `z -> 1/conj z` and `z -> conj z`.
///
/// `tol` is the distance from the unit circle below which a root counts as
/// unimodular, and the relative distance allowed between a root and its partner.
pub fn pair_roots(roots: &[Complex64], tol: f64) -> Result<RootPairing, CompletionError> {
    let match_tol = |target: Complex64| tol.sqrt().max(1e-4) * target.norm().max(1.0);
    let mut out = RootPairing {
        stride: 1,
        ..Default::default()
    };

    let mut unit = Vec::new();
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for &z in roots {
        let r = z.norm();
        if !r.is_finite() || r == 0.0 {
            return Err(CompletionError::PairingFailed { re: z.re, im: z.im });
        }
        if (r - 1.0).abs() <= tol * r.max(1.0) {
            unit.push(z);
        } else if r < 1.0 {
            inside.push(z);
        } else {
            outside.push(z);
        }
    }

    // Unit roots: sort by angle so pairs are found deterministically.
    unit.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    while let Some(z) = unit.first().copied() {
        unit.remove(0);
        let target = z / z.norm_sqr();
        match take_nearest(&mut unit, target) {
            Some((p, d)) if d <= match_tol(target) => {
                out.max_mismatch = out.max_mismatch.max(d);
                out.unit_pairs.push((z, p));
            }
            _ => return Err(CompletionError::PairingFailed { re: z.re, im: z.im }),
        }
    }

    inside.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then(a.arg().total_cmp(&b.arg()))
    });
    let real_tol = |z: Complex64| tol * z.norm().max(1.0);
    let mut lower: Vec<Complex64> = Vec::new();
    let mut upper: Vec<Complex64> = Vec::new();
    for z in inside {
        if z.im.abs() <= real_tol(z) {
            let target = Complex64::new(1.0 / z.re, 0.0);
            match take_nearest(&mut outside, target) {
                Some((p, d)) if d <= match_tol(target) => {
                    out.max_mismatch = out.max_mismatch.max(d);
                    out.real_pairs.push((z.re, p.re));
                }
                _ => return Err(CompletionError::PairingFailed { re: z.re, im: z.im }),
            }
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }
    for z in upper {
        let mut quad = [
            z,
            Complex64::default(),
            Complex64::default(),
            Complex64::default(),
        ];
        let targets = [z.conj(), z.inv(), z.conj().inv()];
        for (slot, target) in targets.into_iter().enumerate() {
            let pool = if slot == 0 { &mut lower } else { &mut outside };
            match take_nearest(pool, target) {
                Some((p, d)) if d <= match_tol(target) => {
                    out.max_mismatch = out.max_mismatch.max(d);
                    quad[slot + 1] = p;
                }
                _ => return Err(CompletionError::PairingFailed { re: z.re, im: z.im }),
            }
        }
        out.quads.push(quad);
    }
    if let Some(z) = lower.first().or(outside.first()) {
        return Err(CompletionError::PairingFailed { re: z.re, im: z.im });
    }
    Ok(out)
}
