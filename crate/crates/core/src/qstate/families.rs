//! Named state families.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{MixtureBranch, MultipartyState};
use crate::cli::StateSpec;
use crate::error::{Error, Result};
use crate::linalg::CVector;

#[derive(Clone, Debug)]
pub enum Family {
    /// Computational basis product state, one index per label.
    Product { basis: Vec<usize> },
    /// `Σ_k |k…k⟩ / √d`; all dims equal.
    Ghz,
    /// Single excitation spread uniformly: `Σ_i |0…1_i…0⟩ / √m`.
    W,
    /// Maximally entangled pairs on the listed labels, `|0⟩` elsewhere.
    Bell { pairs: Vec<(String, String)> },
    /// Normalized complex Gaussian amplitudes.
    RandomPure { seed: u64 },
    /// Separable mixture; per branch a weight and one pure factor per label in label order.
    Mixture { branches: Vec<(f64, Vec<CVector>)> },
}

fn flat_digits(mut f: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = f % dims[i];
        f /= dims[i];
    }
    out
}

/// Normalized complex Gaussian vector; Haar-distributed on the unit sphere.
pub fn haar_random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let n = v.norm();
    v.unscale(n)
}

pub fn build_family(labels: &[String], dims: &[usize], family: &Family) -> Result<MultipartyState> {
    let total = super::check_layout(labels, dims)?;
    let labels_v = labels.to_vec();
    let dims_v = dims.to_vec();
    let amp = |x: f64| Complex64::new(x, 0.0);
    match family {
        Family::Product { basis } => {
            if basis.len() != dims.len() {
                return Err(Error::DimensionMismatch(format!(
                    "basis has {} entries for {} labels",
                    basis.len(),
                    dims.len()
                )));
            }
            let mut flat = 0;
            for (i, (&b, &d)) in basis.iter().zip(dims).enumerate() {
                if b >= d {
                    return Err(Error::DimensionMismatch(format!(
                        "basis index {b} for `{}` exceeds dimension {d}",
                        labels[i]
                    )));
                }
                flat = flat * d + b;
            }
            let mut psi = CVector::zeros(total);
            psi[flat] = amp(1.0);
            MultipartyState::from_pure(labels_v, dims_v, &psi)
        }
        Family::Ghz => {
            let d = dims[0];
            if dims.iter().any(|&x| x != d) {
                return Err(Error::DimensionMismatch("ghz requires equal dimensions".into()));
            }
            let mut psi = CVector::zeros(total);
            for k in 0..d {
                let flat = dims.iter().fold(0, |acc, &dd| acc * dd + k);
                psi[flat] = amp(1.0);
            }
            MultipartyState::from_pure(labels_v, dims_v, &psi)
        }
        Family::W => {
            if dims.iter().any(|&d| d < 2) {
                return Err(Error::DimensionMismatch("w requires every dimension ≥ 2".into()));
            }
            let mut psi = CVector::zeros(total);
            for i in 0..dims.len() {
                let flat = dims
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (j, &dd)| acc * dd + usize::from(i == j));
                psi[flat] = amp(1.0);
            }
            MultipartyState::from_pure(labels_v, dims_v, &psi)
        }
        Family::Bell { pairs } => {
            let mut partner: Vec<Option<usize>> = vec![None; labels.len()];
            for (a, b) in pairs {
                let ia = position(labels, a)?;
                let ib = position(labels, b)?;
                if ia == ib || partner[ia].is_some() || partner[ib].is_some() {
                    return Err(Error::InvalidArgument(format!(
                        "bell pair ({a}, {b}) reuses a subsystem"
                    )));
                }
                if dims[ia] != dims[ib] {
                    return Err(Error::DimensionMismatch(format!(
                        "bell pair ({a}, {b}) has dimensions {} and {}",
                        dims[ia], dims[ib]
                    )));
                }
                partner[ia] = Some(ib);
                partner[ib] = Some(ia);
            }
            let psi = CVector::from_fn(total, |f, _| {
                let dg = flat_digits(f, dims);
                let ok = dg.iter().enumerate().all(|(i, &x)| match partner[i] {
                    Some(j) => dg[j] == x,
                    None => x == 0,
                });
                amp(if ok { 1.0 } else { 0.0 })
            });
            MultipartyState::from_pure(labels_v, dims_v, &psi)
        }
        Family::RandomPure { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let psi = haar_random_vector(total, &mut rng);
            MultipartyState::from_pure(labels_v, dims_v, &psi)
        }
        Family::Mixture { branches } => {
            let branches = branches
                .iter()
                .map(|(w, factors)| MixtureBranch { weight: *w, factors: factors.clone() })
                .collect();
            MultipartyState::from_mixture(labels_v, dims_v, branches)
        }
    }
}

fn position(labels: &[String], l: &str) -> Result<usize> {
    labels
        .iter()
        .position(|x| x == l)
        .ok_or_else(|| Error::UnknownLabel(l.to_string()))
}

/// Builds the state described by a parsed state file.
pub fn build_state(spec: &StateSpec) -> Result<MultipartyState> {
    let family = spec.family()?;
    build_family(&spec.labels, &spec.dims, &family)
}
