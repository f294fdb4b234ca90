//! Target polynomials for Hamiltonian simulation,
//! `e^{tau (w^2 - w^{-2}) / 2} = sum_k J_k(tau) w^{2k}`.

use serde::{Deserialize, Serialize};

use crate::laurent::{Degree, LaurentPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationRule {
    /// Smallest degree whose Bessel tail is within the truncation budget.
    #[default]
    TailSum,
    /// `2 ceil(e tau / 2 + ln(1/eps))`.
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamsimSpec {
    pub tau: f64,
    pub eps: f64,
    pub eta: f64,
    pub cap_coeff: f64,
    pub seed: u64,
    /// Allowed truncation error as a fraction of `eps`.
    pub truncation_budget: f64,
    pub truncation: TruncationRule,
}

impl HamsimSpec {
    /// `eta = 1 - eps`, `cap = 0.45 eps`, truncation budget `eps / 10`.
    pub fn new(tau: f64, eps: f64) -> Self {
        Self {
            tau,
            eps,
            eta: 1.0 - eps,
            cap_coeff: 0.45 * eps,
            seed: 0,
            truncation_budget: 0.1,
            truncation: TruncationRule::TailSum,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(format!(
                "tau must be a finite nonnegative number, got {}",
                self.tau
            ));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(format!("eps must lie in (0, 1), got {}", self.eps));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(format!("eta must lie in (0, 1), got {}", self.eta));
        }
        if !(self.cap_coeff >= 0.0) {
            return Err(format!(
                "cap coefficient must be nonnegative, got {}",
                self.cap_coeff
            ));
        }
        Ok(())
    }
}

const RESCALE_ABOVE: f64 = 1e250;

/// `J_0(tau), ..., J_kmax(tau)` by downward recurrence, normalized with
/// `J_0 + 2 sum_j J_{2j} = 1`.
pub fn bessel_coeffs(tau: f64, kmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if tau == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let m = kmax.max(tau.ceil() as usize);
    let start = m + ((160 * m) as f64).sqrt().ceil() as usize + 40;
    let start = start + start % 2;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        let next = (2.0 * k as f64 / tau) * vals[k] - vals[k + 1];
        vals[k - 1] = next;
        if next.abs() > RESCALE_ABOVE {
            for v in vals[k - 1..].iter_mut() {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    for (o, v) in out.iter_mut().zip(&vals) {
        *o = v / norm;
    }
    out
}

/// `2 ceil(e tau / 2 + ln(1/eps))`.
pub fn closed_form_degree(tau: f64, eps: f64) -> usize {
    2 * (std::f64::consts::E / 2.0 * tau + (1.0 / eps).ln())
        .ceil()
        .max(0.0) as usize
}

/// Smallest even `n` with `2 sum_{k > n/2} |J_k(tau)| <= 0.1 eps`, capped by [`closed_form_degree`].
pub fn truncation_degree(tau: f64, eps: f64) -> usize {
    truncation_degree_with_budget(tau, eps, 0.1)
}

pub fn truncation_degree_with_budget(tau: f64, eps: f64, budget: f64) -> usize {
    let cap = closed_form_degree(tau, eps);
    let kmax = cap / 2 + 1;
    let j = bessel_coeffs(tau, kmax);
    let allowed = budget * eps;
    // tail[h] = 2 sum_{k > h} |J_k|
    let mut tail = 0.0;
    let mut best = kmax;
    for h in (0..kmax).rev() {
        tail += 2.0 * j[h + 1].abs();
        if tail <= allowed {
            best = h;
        } else {
            break;
        }
    }
    (2 * best).min(cap)
}

#[derive(Debug, Clone)]
pub struct HamsimTarget {
    pub f: LaurentPoly,
    /// Degree in `w` (twice the largest retained Bessel index).
    pub degree: usize,
    /// Smallest retained coefficient magnitude.
    pub delta: f64,
}

/// `eta * sum_{|k| <= n/2} J_k(tau) w^{2k}` with `J_{-k} = (-1)^k J_k`.
pub fn build_f(spec: &HamsimSpec) -> HamsimTarget {
    let n = match spec.truncation {
        TruncationRule::TailSum => {
            truncation_degree_with_budget(spec.tau, spec.eps, spec.truncation_budget)
        }
        TruncationRule::ClosedForm => closed_form_degree(spec.tau, spec.eps),
    };
    let h = n / 2;
    let j = bessel_coeffs(spec.tau, h);
    let mut window = vec![0.0; 2 * n + 1];
    for k in 0..=h {
        let v = spec.eta * j[k];
        window[n + 2 * k] = v;
        window[n - 2 * k] = if k % 2 == 0 { v } else { -v };
    }
    let delta = j
        .iter()
        .map(|v| (spec.eta * v).abs())
        .fold(f64::INFINITY, f64::min);
    HamsimTarget {
        f: LaurentPoly::from_real(-(n as i64), &window),
        degree: n,
        delta,
    }
}

/// Adds `cap (w^m + w^{-m})` with `m = deg F + 2`.
pub fn capitalize(f: &LaurentPoly, cap_coeff: f64) -> LaurentPoly {
    if cap_coeff == 0.0 {
        return f.clone();
    }
    let m = match f.degree() {
        Degree::Finite(d) => d + 2,
        Degree::NegInfinity => 2,
    } as i64;
    &(f + &LaurentPoly::monomial(m, cap_coeff)) + &LaurentPoly::monomial(-m, cap_coeff)
}

/// `eta e^{i tau sin 2 theta}`, the downscaled ideal response.
pub fn ideal_response(tau: f64, eta: f64, theta: f64) -> num_complex::Complex64 {
    num_complex::Complex64::from_polar(eta, tau * (2.0 * theta).sin())
}
