//! End-to-end runs: target, completion, decomposition, angle extraction, verification.

use std::time::Instant;

use crate::algebra::{AngleSequence, LowElement};
use crate::completion::{complete_with, CompletionError, CompletionOptions, CompletionReport};
use crate::decomposition::{
    carve_with, decompose_with, extract_angles_with, DecomposeOptions, Decomposition,
    DecompositionError, Mode, DEFAULT_PRIMITIVE_TOL,
};
use crate::hamsim::{build_f, capitalize, ideal_response, HamsimSpec};
use crate::laurent::LaurentPoly;
use crate::verify::{default_samples, measure, measure_fn, RunReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid parameters: {0}")]
    InvalidSpec(String),
    #[error("completion failed: {0}")]
    Completion(CompletionError),
    #[error("decomposition failed: {0}")]
    Decomposition(DecompositionError),
}

impl From<CompletionError> for PipelineError {
    fn from(e: CompletionError) -> Self {
        PipelineError::Completion(e)
    }
}

impl From<DecompositionError> for PipelineError {
    fn from(e: DecompositionError) -> Self {
        PipelineError::Decomposition(e)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub mode: Mode,
    pub completion: CompletionOptions,
    pub decompose: DecomposeOptions,
    /// Verification samples; `None` means `8 (d + 1)`.
    pub samples: Option<usize>,
    pub primitive_tol: f64,
    /// Extra attempts with seeds `seed + 1, seed + 2, ...` after a failed stage.
    pub retries: u32,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Halving,
            completion: CompletionOptions::default(),
            decompose: DecomposeOptions::default(),
            samples: None,
            primitive_tol: DEFAULT_PRIMITIVE_TOL,
            retries: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub angles: AngleSequence,
    pub report: RunReport,
    pub completion: CompletionReport,
    pub max_condition: f64,
    pub ill_conditioned: usize,
    /// Seed of the attempt that produced this output.
    pub seed: u64,
}

struct Solved {
    angles: AngleSequence,
    completion: CompletionReport,
    decomposition: Decomposition,
    t_completion: f64,
    t_decomposition: f64,
}

fn solve_once(f: &LaurentPoly, seed: u64, opts: &PipelineOptions) -> Result<Solved, PipelineError> {
    let t = Instant::now();
    let (u, completion) = complete_with(f, seed, &opts.completion)?;
    let t_completion = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let decomposition = decompose_unitary(&u, opts)?;
    let angles = extract_angles_with(&decomposition.factors, &u, opts.primitive_tol)?;
    let t_decomposition = t.elapsed().as_secs_f64();
    Ok(Solved {
        angles,
        completion,
        decomposition,
        t_completion,
        t_decomposition,
    })
}

/// Factors `u` with the configured algorithm.
pub fn decompose_unitary(
    u: &LowElement,
    opts: &PipelineOptions,
) -> Result<Decomposition, DecompositionError> {
    match opts.mode {
        Mode::Halving => decompose_with(u, &opts.decompose),
        Mode::Carving => carve_with(u, &opts.decompose),
    }
}

fn solve_with_retries(
    f: &LaurentPoly,
    seed: u64,
    opts: &PipelineOptions,
) -> Result<(Solved, u64), PipelineError> {
    let mut attempt = 0;
    loop {
        let s = seed.wrapping_add(attempt as u64);
        match solve_once(f, s, opts) {
            Ok(out) => return Ok((out, s)),
            Err(e) if attempt >= opts.retries => return Err(e),
            Err(_) => attempt += 1,
        }
    }
}

fn finish(
    solved: Solved,
    seed: u64,
    mut report: RunReport,
    opts: &PipelineOptions,
    t_verify: f64,
) -> PipelineOutput {
    report.mode = Some(opts.mode);
    report
        .wall_times
        .insert("completion".into(), solved.t_completion);
    report
        .wall_times
        .insert("decomposition".into(), solved.t_decomposition);
    report.wall_times.insert("verification".into(), t_verify);
    PipelineOutput {
        angles: solved.angles,
        report,
        completion: solved.completion,
        max_condition: solved.decomposition.max_condition,
        ill_conditioned: solved.decomposition.ill_conditioned.len(),
        seed,
    }
}

/// Angles for an arbitrary real parity target, verified against the target itself.
pub fn solve_target(
    f: &LaurentPoly,
    seed: u64,
    eps: f64,
    opts: &PipelineOptions,
) -> Result<PipelineOutput, PipelineError> {
    let (solved, used) = solve_with_retries(f, seed, opts)?;
    let samples = opts
        .samples
        .unwrap_or_else(|| default_samples(solved.angles.degree()));
    let t = Instant::now();
    let report = measure(&solved.angles, f, samples, eps);
    let t_verify = t.elapsed().as_secs_f64();
    Ok(finish(solved, used, report, opts, t_verify))
}

/// Hamiltonian simulation: the capitalized Bessel target is completed and
/// decomposed, and the angles are checked against `eta e^{i tau sin 2 theta}`.
pub fn run_hamsim(
    spec: &HamsimSpec,
    opts: &PipelineOptions,
) -> Result<PipelineOutput, PipelineError> {
    spec.validate().map_err(PipelineError::InvalidSpec)?;
    let t = Instant::now();
    let target = build_f(spec);
    let f = capitalize(&target.f, spec.cap_coeff);
    let t_build = t.elapsed().as_secs_f64();
    let (solved, used) = solve_with_retries(&f, spec.seed, opts)?;
    let samples = opts
        .samples
        .unwrap_or_else(|| default_samples(solved.angles.degree()));
    let t = Instant::now();
    let report = measure_fn(
        &solved.angles,
        |theta| ideal_response(spec.tau, spec.eta, theta),
        samples,
        spec.eps,
    );
    let t_verify = t.elapsed().as_secs_f64();
    let mut out = finish(solved, used, report, opts, t_verify);
    out.report.wall_times.insert("build".into(), t_build);
    Ok(out)
}
