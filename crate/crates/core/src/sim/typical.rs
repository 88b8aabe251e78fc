use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, EIGEN_CUTOFF};
use crate::qstate::{MultipartyState, SubsetMask};

#[derive(Clone, Debug)]
pub struct TypicalProjection {
    /// Renormalized projected `n`-copy state, labels `"<label>^n"` (plain labels when `n = 1`).
    pub state: MultipartyState,
    /// `Tr(P ρ^{⊗n})` before renormalization.
    pub retained: f64,
    /// Dimension of the typical subspace.
    pub typical_dim: usize,
}

/// Eigenbasis strings `x ∈ [d]^n` with `|−(1/n) log₂ p(x) − H| ≤ δ`, as flat indices, and their
/// total probability.
pub(crate) fn typical_strings(spectrum: &[f64], n: usize, delta: f64) -> (Vec<usize>, f64) {
    let d = spectrum.len();
    let h = linalg::spectrum_entropy(spectrum);
    let total = d.pow(n as u32);
    let mut strings = Vec::new();
    let mut prob = 0.0;
    for f in 0..total {
        let mut rest = f;
        let mut log_p = 0.0;
        let mut p = 1.0;
        let mut possible = true;
        for _ in 0..n {
            let l = spectrum[rest % d];
            rest /= d;
            if l <= EIGEN_CUTOFF {
                possible = false;
                break;
            }
            log_p += l.log2();
            p *= l;
        }
        if possible && (-log_p / n as f64 - h).abs() <= delta {
            strings.push(f);
            prob += p;
        }
    }
    (strings, prob)
}

/// Projects the `n`-copy sender block onto the δ-typical subspace of the sender's marginal
/// spectrum and renormalizes.
pub fn typical_projection(
    state: &MultipartyState,
    sender: &str,
    n: usize,
    delta: f64,
) -> Result<TypicalProjection> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("typicality δ must be ≥ 0, got {delta}")));
    }
    let s = state.index_of(sender)?;
    let copies = state.tensor_power(n)?;
    let marginal = state.reduced_state(SubsetMask::from_indices([s]))?;
    let (spectrum, basis) = linalg::hermitian_eigen(marginal.op());
    let (strings, _) = typical_strings(&spectrum, n, delta);

    let mut basis_n = basis.clone();
    for _ in 1..n {
        basis_n = linalg::kron(&basis_n, &basis);
    }
    let block = basis_n.nrows();
    let mut cols = CMatrix::zeros(block, strings.len());
    for (c, &f) in strings.iter().enumerate() {
        cols.set_column(c, &basis_n.column(f));
    }
    let projector = &cols * cols.adjoint();
    let left: usize = copies.dims()[..s].iter().product();
    let right: usize = copies.dims()[s + 1..].iter().product();
    let full = linalg::kron(
        &linalg::kron(&CMatrix::identity(left, left), &projector),
        &CMatrix::identity(right, right),
    );
    let projected = &full * copies.op() * &full;
    let retained = linalg::trace(&projected).re;
    if retained <= EIGEN_CUTOFF {
        return Err(Error::InvalidArgument(format!(
            "typical subspace at δ = {delta}, n = {n} carries no probability"
        )));
    }
    if retained < 0.5 {
        log::warn!("typical projection keeps only {retained:.4} of the probability; δ is too tight for n = {n}");
    }
    let op = linalg::symmetrize(&projected.unscale(retained));
    Ok(TypicalProjection {
        state: MultipartyState::from_parts_unchecked(copies.labels().to_vec(), copies.dims().to_vec(), op, None),
        retained,
        typical_dim: strings.len(),
    })
}
