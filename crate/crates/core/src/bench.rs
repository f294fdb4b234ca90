//! Benchmark grids over Hamiltonian-simulation instances.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::decomposition::Mode;
use crate::hamsim::{build_f, capitalize, HamsimSpec};
use crate::pipeline::{run_hamsim, PipelineOptions};

/// One benchmark cell. Column order is part of the CSV format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub tau: f64,
    pub eps: f64,
    pub eta: f64,
    pub degree: usize,
    pub mode: Mode,
    pub wall_time_s: f64,
    pub max_error: f64,
    pub achievable: bool,
    pub seed: u64,
    pub completion_s: f64,
    pub decomposition_s: f64,
    pub verification_s: f64,
    /// Empty unless the pipeline failed before verification.
    pub error: String,
}

pub const CSV_HEADER: &str =
    "tau,eps,eta,degree,mode,wall_time_s,max_error,achievable,seed,completion_s,decomposition_s,verification_s,error";

fn run_cell(spec: &HamsimSpec, opts: &PipelineOptions) -> BenchRecord {
    let mut rec = BenchRecord {
        tau: spec.tau,
        eps: spec.eps,
        eta: spec.eta,
        degree: 0,
        mode: opts.mode,
        wall_time_s: 0.0,
        max_error: f64::INFINITY,
        achievable: false,
        seed: spec.seed,
        completion_s: 0.0,
        decomposition_s: 0.0,
        verification_s: 0.0,
        error: String::new(),
    };
    let start = std::time::Instant::now();
    match run_hamsim(spec, opts) {
        Ok(out) => {
            let t = |k: &str| out.report.wall_times.get(k).copied().unwrap_or(0.0);
            rec.degree = out.report.degree;
            rec.max_error = out.report.max_error;
            rec.achievable = out.report.achievable;
            rec.seed = out.seed;
            rec.completion_s = t("completion");
            rec.decomposition_s = t("decomposition");
            rec.verification_s = t("verification");
        }
        Err(e) => {
            rec.degree = capitalize(&build_f(spec).f, spec.cap_coeff)
                .degree()
                .finite()
                .unwrap_or(0);
            rec.error = e.to_string();
        }
    }
    rec.wall_time_s = start.elapsed().as_secs_f64();
    rec
}

/// Halving runs over `taus` with `cap = 0.45 eps`.
pub fn bench_runtime(
    taus: &[f64],
    eps: f64,
    eta: f64,
    seed: u64,
    opts: &PipelineOptions,
) -> Vec<BenchRecord> {
    let opts = PipelineOptions {
        mode: Mode::Halving,
        ..*opts
    };
    taus.iter()
        .map(|&tau| {
            let spec = HamsimSpec {
                eta,
                seed,
                ..HamsimSpec::new(tau, eps)
            };
            run_cell(&spec, &opts)
        })
        .collect()
}

/// Achievability grid with `eta = 1 - eps`, `cap = eps / 3` and truncation budget `eps / 10`.
pub fn bench_region(
    taus: &[f64],
    epss: &[f64],
    mode: Mode,
    seed: u64,
    opts: &PipelineOptions,
) -> Vec<BenchRecord> {
    let opts = PipelineOptions {
        mode,
        primitive_tol: f64::INFINITY,
        ..*opts
    };
    let mut out = Vec::with_capacity(taus.len() * epss.len());
    for &eps in epss {
        for &tau in taus {
            let spec = HamsimSpec {
                cap_coeff: eps / 3.0,
                seed,
                ..HamsimSpec::new(tau, eps)
            };
            out.push(run_cell(&spec, &opts));
        }
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Slope of completion plus decomposition time against degree.
pub fn runtime_slope(records: &[BenchRecord]) -> Option<f64> {
    let ok: Vec<&BenchRecord> = records.iter().filter(|r| r.error.is_empty()).collect();
    let xs: Vec<f64> = ok.iter().map(|r| r.degree as f64).collect();
    let ys: Vec<f64> = ok
        .iter()
        .map(|r| r.completion_s + r.decomposition_s)
        .collect();
    loglog_slope(&xs, &ys)
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl<W: Write>(records: &[BenchRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
