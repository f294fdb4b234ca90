//! JSON file formats for polynomials, completed unitaries and angle sequences.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::LowElement;
use crate::completion::CompletionReport;
use crate::laurent::{LaurentPoly, Parity};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("exponents must be strictly increasing (saw {prev} then {next})")]
    Unordered { prev: i64, next: i64 },
    #[error("declared parity {declared:?} does not match coefficients ({actual:?})")]
    ParityMismatch { declared: Parity, actual: Parity },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffJson {
    pub k: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentJson {
    pub parity: Parity,
    pub coeffs: Vec<CoeffJson>,
}

impl From<&LaurentPoly> for LaurentJson {
    fn from(p: &LaurentPoly) -> Self {
        let coeffs = p
            .iter_nonzero()
            .map(|(k, c)| CoeffJson {
                k,
                re: c.re,
                im: c.im,
            })
            .collect();
        LaurentJson {
            parity: p.parity_with_tol(0.0),
            coeffs,
        }
    }
}

impl TryFrom<&LaurentJson> for LaurentPoly {
    type Error = IoError;

    fn try_from(j: &LaurentJson) -> Result<Self, IoError> {
        for w in j.coeffs.windows(2) {
            if w[1].k <= w[0].k {
                return Err(IoError::Unordered {
                    prev: w[0].k,
                    next: w[1].k,
                });
            }
        }
        let p = LaurentPoly::from_terms(j.coeffs.iter().map(|c| (c.k, Complex64::new(c.re, c.im))));
        let actual = p.parity_with_tol(0.0);
        if actual != j.parity && !(p.is_zero() && j.parity != Parity::Mixed) {
            return Err(IoError::ParityMismatch {
                declared: j.parity,
                actual,
            });
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryJson {
    #[serde(rename = "A")]
    pub a: LaurentJson,
    #[serde(rename = "B")]
    pub b: LaurentJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<CompletionReport>,
}

impl UnitaryJson {
    pub fn new(u: &LowElement, report: Option<CompletionReport>) -> Self {
        Self {
            a: (&u.a).into(),
            b: (&u.b).into(),
            report,
        }
    }

    pub fn element(&self) -> Result<LowElement, IoError> {
        Ok(LowElement::new(
            (&self.a).try_into()?,
            (&self.b).try_into()?,
        ))
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_poly(path: &Path) -> Result<LaurentPoly, IoError> {
    let j: LaurentJson = read_json(path)?;
    (&j).try_into()
}
