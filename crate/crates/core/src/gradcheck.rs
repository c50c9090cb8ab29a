//! Finite-difference verification of the analytic CRF gradients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::crf::{crf_nll, crf_nll_gradients, CrfParams};
use crate::error::{Error, Result};
use crate::lattice::EmissionLattice;
use crate::synth::{random_lattice, random_transitions};

/// Gradients smaller than this are compared absolutely.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-8;

/// `|a − b| / max(|a|, |b|, RELATIVE_ERROR_FLOOR)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let scale = analytic.abs().max(numeric.abs()).max(RELATIVE_ERROR_FLOOR);
    (analytic - numeric).abs() / scale
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckConfig {
    pub instances: usize,
    pub seed: u64,
    pub max_len: usize,
    pub max_tags: usize,
    pub step: f64,
    pub tolerance: f64,
    /// Negates the analytic transition gradient; a negative control.
    pub flip_sign: bool,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        GradCheckConfig {
            instances: 100,
            seed: 0,
            max_len: 5,
            max_tags: 4,
            step: 1e-5,
            tolerance: 1e-5,
            flip_sign: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstanceCheck {
    pub instance: usize,
    pub len: usize,
    pub num_tags: usize,
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    pub passed: bool,
}

/// Largest relative and absolute deviation between the analytic gradient
/// and central differences of the NLL, over every emission and every
/// transition entry.
pub fn check_instance(
    lattice: &EmissionLattice<f64>,
    params: &CrfParams<f64>,
    gold: &[usize],
    step: f64,
    flip_sign: bool,
) -> Result<(f64, f64)> {
    let grads = crf_nll_gradients(lattice, params, gold)?;
    let (mut max_rel, mut max_abs) = (0.0f64, 0.0f64);
    let mut record = |analytic: f64, numeric: f64| {
        max_rel = max_rel.max(relative_error(analytic, numeric));
        max_abs = max_abs.max((analytic - numeric).abs());
    };

    for i in 0..lattice.len() {
        for y in 0..lattice.num_tags() {
            let nll_at = |delta: f64| {
                let mut l = lattice.clone();
                l.set(i, y, l.get(i, y) + delta);
                crf_nll(&l, params, gold)
            };
            let numeric = (nll_at(step)? - nll_at(-step)?) / (2.0 * step);
            record(grads.d_emissions[i][y], numeric);
        }
    }

    let base = params.transitions();
    for f in 0..base.size() {
        for t in 0..base.size() {
            let nll_at = |delta: f64| {
                let mut m = base.clone();
                m.set(f, t, m.get(f, t) + delta);
                crf_nll(lattice, &CrfParams::new(m)?, gold)
            };
            let numeric = (nll_at(step)? - nll_at(-step)?) / (2.0 * step);
            let analytic = grads.d_transitions[f][t];
            record(if flip_sign { -analytic } else { analytic }, numeric);
        }
    }
    Ok((max_rel, max_abs))
}

/// Runs the check on `config.instances` seeded random instances.
pub fn run_grad_check(config: &GradCheckConfig) -> Result<Vec<InstanceCheck>> {
    if config.max_len == 0 || config.max_tags == 0 || config.step.is_nan() || config.step <= 0.0 {
        return Err(Error::Config(
            "grad-check needs positive sizes and step".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.instances)
        .map(|instance| {
            let len = rng.gen_range(1..=config.max_len);
            let num_tags = rng.gen_range(1..=config.max_tags);
            let lattice = random_lattice(&mut rng, len, num_tags, 2.0);
            let params = CrfParams::new(random_transitions(&mut rng, num_tags, 1.0))?;
            let gold: Vec<usize> = (0..len).map(|_| rng.gen_range(0..num_tags)).collect();
            let (max_rel_error, max_abs_error) =
                check_instance(&lattice, &params, &gold, config.step, config.flip_sign)?;
            Ok(InstanceCheck {
                instance,
                len,
                num_tags,
                max_rel_error,
                max_abs_error,
                passed: max_rel_error <= config.tolerance,
            })
        })
        .collect()
}
