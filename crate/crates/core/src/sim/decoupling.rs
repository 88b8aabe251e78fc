use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::haar::haar_unitary_with;
use super::typical::typical_projection;
use crate::cli::format::sig;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{fidelity_of_operators, MultipartyState, SubsetMask};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecouplingConfig {
    pub sender: String,
    pub reference: String,
    pub copies: usize,
    /// Rates `Q` in qubits per copy.
    pub grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Typicality window; `None` skips Schumacher projection.
    pub typical_delta: Option<f64>,
}

impl DecouplingConfig {
    /// Typical projection is off for `copies ≤ 3`, where it is vacuous.
    pub fn new(sender: &str, reference: &str, copies: usize, grid: Vec<f64>, trials: usize, seed: u64) -> Self {
        DecouplingConfig {
            sender: sender.to_string(),
            reference: reference.to_string(),
            copies,
            grid,
            trials,
            seed,
            typical_delta: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    /// Requested rate.
    pub requested_q: f64,
    /// Rate actually simulated, `qubits_sent / copies`.
    pub q: f64,
    pub qubits_sent: usize,
    pub trials: usize,
    /// Mean of `½ Tr|σ^{A₂R} − σ^{A₂} ⊗ σ^R|`.
    pub mean_dist: f64,
    pub stderr_dist: f64,
    /// Mean of `F(σ^{A₂R}, σ^{A₂} ⊗ σ^R)`.
    pub mean_fid: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecouplingCurve {
    pub config: DecouplingConfig,
    pub points: Vec<CurvePoint>,
    /// `½ I(A;R)` of one copy: the rate above which decoupling succeeds asymptotically.
    pub threshold: f64,
    pub retained_probability: Option<f64>,
    pub notes: Vec<String>,
}

impl DecouplingCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("Q,trials,mean_dist,stderr_dist,mean_fid\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                sig(p.q),
                p.trials,
                sig(p.mean_dist),
                sig(p.stderr_dist),
                sig(p.mean_fid)
            ));
        }
        out
    }
}

struct Split {
    requested: f64,
    qubits: usize,
    kept_dim: usize,
}

fn plan_splits(grid: &[f64], copies: usize, d_sender: usize, block: usize, notes: &mut Vec<String>) -> Result<Vec<Split>> {
    let max_q = (d_sender as f64).log2();
    grid.iter()
        .map(|&q| {
            if !(q.is_finite() && q >= 0.0 && q <= max_q + 1e-12) {
                return Err(Error::InvalidArgument(format!("rate {q} outside [0, {max_q}]")));
            }
            let total = q * copies as f64;
            let qubits = (total + 1e-9).floor() as usize;
            if total - qubits as f64 > 1e-9 {
                notes.push(format!("Q = {q}: {total} qubits rounded down to {qubits}"));
            }
            let sent = 1usize << qubits;
            if !block.is_multiple_of(sent) {
                return Err(Error::InvalidArgument(format!(
                    "non-integer qubit split: {qubits} qubits do not divide a {block}-dimensional block"
                )));
            }
            Ok(Split { requested: q, qubits, kept_dim: block / sent })
        })
        .collect()
}

/// Distance and fidelity between `σ^{A₂R}` and `σ^{A₂} ⊗ σ^R` after sending the first
/// `block / kept` dimensions of the sender block.
fn decoupling_at(sigma: &CMatrix, block: usize, kept: usize, d_ref: usize) -> (f64, f64) {
    let sent = block / kept;
    let a2r = linalg::partial_trace(sigma, &[sent, kept, d_ref], &[1, 2]);
    let a2 = linalg::partial_trace(&a2r, &[kept, d_ref], &[0]);
    let r = linalg::partial_trace(&a2r, &[kept, d_ref], &[1]);
    let product = linalg::kron(&a2, &r);
    let dist = (0.5 * linalg::hermitian_trace_norm(&(&a2r - &product))).clamp(0.0, 1.0);
    let fid = fidelity_of_operators(&a2r, &product);
    (dist, fid)
}

/// Monte Carlo decoupling of `sender` from `reference` under random unitary encoding.
///
/// Every trial draws one Haar unitary on the `n`-copy sender block (seeded by the master seed
/// and the trial index) and evaluates all grid points with it.
pub fn decoupling_curve(state: &MultipartyState, cfg: &DecouplingConfig) -> Result<DecouplingCurve> {
    if cfg.copies == 0 || cfg.trials == 0 {
        return Err(Error::InvalidArgument("copies and trials must be ≥ 1".into()));
    }
    let s = state.index_of(&cfg.sender)?;
    let r = state.index_of(&cfg.reference)?;
    if s == r {
        return Err(Error::InvalidArgument("sender and reference must differ".into()));
    }
    let pair = state.reduced_state(SubsetMask::from_indices([s, r]))?;
    let pair = if s < r {
        pair
    } else {
        let op = linalg::permute_subsystems(pair.op(), pair.dims(), &[1, 0]);
        MultipartyState::from_parts_unchecked(
            vec![cfg.sender.clone(), cfg.reference.clone()],
            vec![state.dims()[s], state.dims()[r]],
            op,
            None,
        )
    };
    let threshold = 0.5 * pair.mutual_info(SubsetMask::from_indices([0]), SubsetMask::from_indices([1]))?;

    let mut notes = Vec::new();
    let (copies, retained) = match cfg.typical_delta {
        Some(delta) => {
            let t = typical_projection(&pair, &cfg.sender, cfg.copies, delta)?;
            (t.state, Some(t.retained))
        }
        None => (pair.tensor_power(cfg.copies)?, None),
    };
    let block = copies.dims()[0];
    let d_ref = copies.dims()[1];
    let splits = plan_splits(&cfg.grid, cfg.copies, state.dims()[s], block, &mut notes)?;

    let per_trial: Vec<Vec<(f64, f64)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(t as u64);
            let u = haar_unitary_with(block, &mut rng)?;
            let full = linalg::kron(&u, &CMatrix::identity(d_ref, d_ref));
            let sigma = &full * copies.op() * full.adjoint();
            Ok(splits.iter().map(|sp| decoupling_at(&sigma, block, sp.kept_dim, d_ref)).collect())
        })
        .collect::<Result<_>>()?;

    let n = cfg.trials as f64;
    let points = splits
        .iter()
        .enumerate()
        .map(|(g, sp)| {
            let dists: Vec<f64> = per_trial.iter().map(|row| row[g].0).collect();
            let fids: Vec<f64> = per_trial.iter().map(|row| row[g].1).collect();
            let mean = linalg::pairwise_sum(&dists) / n;
            let var = if cfg.trials > 1 {
                let sq: Vec<f64> = dists.iter().map(|d| (d - mean).powi(2)).collect();
                linalg::pairwise_sum(&sq) / (n - 1.0)
            } else {
                0.0
            };
            CurvePoint {
                requested_q: sp.requested,
                q: sp.qubits as f64 / cfg.copies as f64,
                qubits_sent: sp.qubits,
                trials: cfg.trials,
                mean_dist: mean,
                stderr_dist: (var / n).sqrt(),
                mean_fid: linalg::pairwise_sum(&fids) / n,
            }
        })
        .collect();
    Ok(DecouplingCurve { config: cfg.clone(), points, threshold, retained_probability: retained, notes })
}
