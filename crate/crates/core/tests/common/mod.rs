//! Independent reference computations for integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qdistcomp::linalg::CVector;
use qdistcomp::MultipartyState;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn labels(ls: &[&str]) -> Vec<String> {
    ls.iter().map(|s| s.to_string()).collect()
}

pub fn gaussian_vector<R: Rng>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(dim, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    v.unscale(n)
}

pub fn shannon_bits(ps: impl IntoIterator<Item = f64>) -> f64 {
    ps.into_iter().filter(|&p| p > 1e-14).map(|p| -p * p.log2()).sum()
}

/// Entropy of the subsystems `subset` of a pure state, from the Schmidt coefficients of the
/// amplitude array reshaped as `subset × rest`.
pub fn schmidt_entropy(psi: &CVector, dims: &[usize], subset: &[usize]) -> f64 {
    let rest: Vec<usize> = (0..dims.len()).filter(|i| !subset.contains(i)).collect();
    if subset.is_empty() || rest.is_empty() {
        return 0.0;
    }
    let rows: usize = subset.iter().map(|&i| dims[i]).product();
    let cols: usize = rest.iter().map(|&i| dims[i]).product();
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    let total: usize = dims.iter().product();
    for f in 0..total {
        let mut digits = vec![0; dims.len()];
        let mut x = f;
        for i in (0..dims.len()).rev() {
            digits[i] = x % dims[i];
            x /= dims[i];
        }
        let r = subset.iter().fold(0, |acc, &i| acc * dims[i] + digits[i]);
        let c = rest.iter().fold(0, |acc, &i| acc * dims[i] + digits[i]);
        m[(r, c)] = psi[f];
    }
    let s = m.singular_values();
    shannon_bits(s.iter().map(|x| x * x))
}

/// Random pure state on `dims` together with its amplitude vector.
pub fn random_pure<R: Rng>(names: &[&str], dims: &[usize], rng: &mut R) -> (MultipartyState, CVector) {
    let psi = gaussian_vector(dims.iter().product(), rng);
    let state = MultipartyState::from_pure(labels(names), dims.to_vec(), &psi).unwrap();
    (state, psi)
}

/// Random mixed state: the marginal of a random pure state with an ancilla of dimension `env`.
pub fn random_mixed<R: Rng>(names: &[&str], dims: &[usize], env: usize, rng: &mut R) -> MultipartyState {
    let mut all_names = names.to_vec();
    all_names.push("__env");
    let mut all_dims = dims.to_vec();
    all_dims.push(env);
    let (s, _) = random_pure(&all_names, &all_dims, rng);
    s.reduced_state(qdistcomp::SubsetMask::from_indices(0..names.len())).unwrap()
}

/// Minimum of `c·v` over the given points.
pub fn min_cost(points: &[&qdistcomp::RatePoint], costs: &[f64]) -> f64 {
    points
        .iter()
        .map(|p| p.rates().iter().zip(costs).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}
