use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::bounds::epsilon_prime;
use super::extension::{ChannelKind, Extender, ExtensionChannel};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{normalized_trace_distance, MultipartyState, SubsetMask};

/// Search budget for the squashed-entanglement upper bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EsqBudget {
    /// Extension dimensions `d_E` to try.
    pub d_e_sweep: Vec<usize>,
    /// Random restarts per `d_E`.
    pub restarts: usize,
    /// Coordinate-descent steps per restart.
    pub iterations: usize,
    pub seed: u64,
}

impl Default for EsqBudget {
    fn default() -> Self {
        EsqBudget { d_e_sweep: vec![1, 2, 3, 4], restarts: 4, iterations: 200, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct EsqEstimate {
    /// Upper bound on the squashed entanglement, bits.
    pub value: f64,
    /// `½ I(parts)` from the trivial extension.
    pub baseline: f64,
    pub best_channel: ExtensionChannel,
    pub budget: EsqBudget,
}

/// A candidate replaces the current best only when it improves on it by more than this.
const IMPROVEMENT_TOL: f64 = 1e-12;

struct Candidate {
    info: f64,
    channel: ExtensionChannel,
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `d_G = d_E` unless that cannot host an isometry from the purifier.
fn discarded_dim(d_e: usize, r: usize) -> usize {
    d_e.max(r.div_ceil(d_e))
}

/// One restart of derivative-free coordinate descent over isometries `R₀ → E ⊗ G`.
fn optimize_restart(ext: &Extender, d_e: usize, restart: usize, budget: &EsqBudget) -> Candidate {
    let r = ext.purifier_dim();
    let d_g = discarded_dim(d_e, r);
    let rows = d_e * d_g;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    rng.set_stream(((d_e as u64) << 32) | restart as u64);

    let mut v = if restart == 0 && d_e >= r {
        // measure the purifier in its eigenbasis and keep the outcome in E
        CMatrix::from_fn(rows, r, |row, k| {
            if row == k * d_g + k { linalg::one() } else { linalg::zero() }
        })
    } else {
        linalg::polar_isometry(&CMatrix::from_fn(rows, r, |_, _| complex_gaussian(&mut rng)))
    };
    let mut best = ext.evaluate_unchecked(&v, d_e, d_g);
    let mut step = 0.5;
    for _ in 0..budget.iterations {
        let (i, j) = (rng.random_range(0..rows), rng.random_range(0..r));
        let mut trial = v.clone();
        trial[(i, j)] += complex_gaussian(&mut rng) * step;
        let trial = linalg::polar_isometry(&trial);
        let value = ext.evaluate_unchecked(&trial, d_e, d_g);
        if value < best {
            best = value;
            v = trial;
            step = (step * 1.5).min(2.0);
        } else {
            step = (step * 0.9).max(1e-4);
        }
    }
    Candidate {
        info: best,
        channel: ExtensionChannel {
            source: ext.source().to_string(),
            d_e,
            d_g,
            isometry: v,
            kind: ChannelKind::Parameterized,
        },
    }
}

/// Upper bound on `E_sq(X_1; …; X_k) = ½ inf_E I(X_1; …; X_k | E)`.
///
/// Candidates are the trivial extension, the classical flag when the state carries a separable
/// decomposition, and optimized isometries over the `d_E` sweep. Restarts are seeded by
/// `(seed, d_E, restart)` so enlarging the budget never raises the result.
pub fn esq_upper_bound(state: &MultipartyState, parts: &[SubsetMask], budget: &EsqBudget) -> Result<EsqEstimate> {
    let ext = Extender::new(state, parts)?;
    let r = ext.purifier_dim();
    if let Some(&d) = budget.d_e_sweep.iter().find(|&&d| d == 0) {
        return Err(Error::InvalidArgument(format!("extension dimension {d} is not allowed")));
    }
    for &d_e in &budget.d_e_sweep {
        ext.check_cap(d_e, discarded_dim(d_e, r))?;
    }

    let trivial = ExtensionChannel::trivial(ext.source(), r);
    let baseline_info = ext.baseline();
    let mut best = Candidate { info: baseline_info, channel: trivial };

    if let Some(flag) = ext.classical_flag_channel() {
        match flag {
            Ok(ch) => {
                let info = ext.evaluate(&ch)?;
                if info < best.info - IMPROVEMENT_TOL {
                    best = Candidate { info, channel: ch };
                }
            }
            Err(Error::DimensionCap { .. }) => {
                log::warn!("classical flag extension exceeds the dimension cap; skipped");
            }
            Err(e) => return Err(e),
        }
    }

    let tasks: Vec<(usize, usize)> = budget
        .d_e_sweep
        .iter()
        .flat_map(|&d| (0..budget.restarts).map(move |k| (d, k)))
        .collect();
    let results: Vec<Candidate> = tasks
        .par_iter()
        .map(|&(d_e, k)| optimize_restart(&ext, d_e, k, budget))
        .collect();
    for c in results {
        if c.info < best.info - IMPROVEMENT_TOL {
            best = c;
        }
    }

    let baseline = 0.5 * baseline_info.max(0.0);
    Ok(EsqEstimate {
        value: (0.5 * best.info).clamp(0.0, baseline),
        baseline,
        best_channel: best.channel,
        budget: budget.clone(),
    })
}

/// Continuity diagnostic for two states on the same systems.
#[derive(Clone, Debug, Serialize)]
pub struct PerturbationReport {
    /// `½ Tr|ρ − σ|`
    pub distance: f64,
    pub estimate_a: f64,
    pub estimate_b: f64,
    /// `|Ê(ρ) − Ê(σ)|`
    pub difference: f64,
    /// Continuity bound evaluated at `distance`; `None` where it is undefined.
    pub bound: Option<f64>,
}

pub fn perturbation_diagnostic(
    a: &MultipartyState,
    b: &MultipartyState,
    parts: &[SubsetMask],
    budget: &EsqBudget,
) -> Result<PerturbationReport> {
    let distance = normalized_trace_distance(a, b)?;
    let estimate_a = esq_upper_bound(a, parts, budget)?.value;
    let estimate_b = esq_upper_bound(b, parts, budget)?.value;
    let dims: Vec<usize> = parts.iter().map(|&p| a.mask_dim(p)).collect();
    Ok(PerturbationReport {
        distance,
        estimate_a,
        estimate_b,
        difference: (estimate_a - estimate_b).abs(),
        bound: epsilon_prime(distance, &dims).ok(),
    })
}
