//! Dense multipartite quantum states.
//!
//! A [`MultipartyState`] is a density operator on an ordered tensor product of labelled
//! subsystems. Subsystems are addressed through [`SubsetMask`]s, which are bit sets over the
//! state's label positions.

mod families;
mod measures;

pub use families::{build_family, build_state, haar_random_vector, Family};
pub use measures::{
    fidelity, normalized_trace_distance, trace_norm_distance, MultipartyInfoForms,
};
pub(crate) use measures::{fidelity_of_operators, info_from_operator, purification_matrix};

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

/// Largest total Hilbert-space dimension a state may have.
pub const MAX_TOTAL_DIM: usize = 4096;

/// Tolerance used for trace, Hermiticity and positivity checks.
pub const STATE_TOL: f64 = 1e-9;

/// A set of subsystems, stored as a bit per label position.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SubsetMask(u64);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn from_bits(bits: u64) -> Self {
        SubsetMask(bits)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        SubsetMask(indices.into_iter().fold(0, |acc, i| acc | (1u64 << i)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, index: usize) -> bool {
        index < 64 && self.0 & (1u64 << index) != 0
    }

    pub fn union(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersection(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & other.0)
    }

    pub fn is_disjoint(self, other: SubsetMask) -> bool {
        self.0 & other.0 == 0
    }

    /// Label positions in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..64).filter(|&i| self.contains(i)).collect()
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubsetMask{:?}", self.indices())
    }
}

/// One term `weight · |f_1⟩⟨f_1| ⊗ … ⊗ |f_k⟩⟨f_k|` of a separable decomposition.
#[derive(Clone, Debug)]
pub struct MixtureBranch {
    pub weight: f64,
    /// One normalized pure factor per label, in label order.
    pub factors: Vec<CVector>,
}

impl MixtureBranch {
    pub fn product_vector(&self) -> CVector {
        self.factors
            .iter()
            .skip(1)
            .fold(self.factors[0].clone(), |acc, f| linalg::kron_vec(&acc, f))
    }
}

#[derive(Clone, Debug)]
pub struct MultipartyState {
    labels: Vec<String>,
    dims: Vec<usize>,
    op: CMatrix,
    provenance: Option<Vec<MixtureBranch>>,
}

fn check_layout(labels: &[String], dims: &[usize]) -> Result<usize> {
    if labels.is_empty() {
        return Err(Error::InvalidState("a state needs at least one subsystem".into()));
    }
    if labels.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels but {} dimensions",
            labels.len(),
            dims.len()
        )));
    }
    if labels.len() > 64 {
        return Err(Error::InvalidState("at most 64 subsystems are supported".into()));
    }
    for (i, l) in labels.iter().enumerate() {
        if l.is_empty() {
            return Err(Error::InvalidState("labels must be non-empty".into()));
        }
        if labels[..i].contains(l) {
            return Err(Error::LabelCollision(l.clone()));
        }
    }
    if let Some(i) = dims.iter().position(|&d| d == 0) {
        return Err(Error::InvalidState(format!(
            "dimension of `{}` must be ≥ 1",
            labels[i]
        )));
    }
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .unwrap_or(usize::MAX);
    if total > MAX_TOTAL_DIM {
        return Err(Error::DimensionCap { size: total, cap: MAX_TOTAL_DIM });
    }
    Ok(total)
}

impl MultipartyState {
    /// Builds a state from an explicit density operator, validating every invariant.
    pub fn new(labels: Vec<String>, dims: Vec<usize>, op: CMatrix) -> Result<Self> {
        let total = check_layout(&labels, &dims)?;
        if op.nrows() != total || op.ncols() != total {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, product of dims is {total}",
                op.nrows(),
                op.ncols()
            )));
        }
        let tr = linalg::trace(&op);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let herm = linalg::hermiticity_defect(&op);
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("operator is not Hermitian (defect {herm:e})")));
        }
        let min_eig = linalg::hermitian_eigenvalues(&op)[0];
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(MultipartyState { labels, dims, op, provenance: None })
    }

    /// Builds `|ψ⟩⟨ψ|` from an amplitude vector (normalized here).
    pub fn from_pure(labels: Vec<String>, dims: Vec<usize>, psi: &CVector) -> Result<Self> {
        let total = check_layout(&labels, &dims)?;
        if psi.len() != total {
            return Err(Error::DimensionMismatch(format!(
                "vector has {} amplitudes, product of dims is {total}",
                psi.len()
            )));
        }
        let norm = psi.norm();
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("state vector has zero or non-finite norm".into()));
        }
        let psi = psi.unscale(norm);
        let op = &psi * psi.adjoint();
        Ok(MultipartyState { labels, dims, op, provenance: None })
    }

    /// Builds `Σ_j w_j ⊗_i |f_{j,i}⟩⟨f_{j,i}|` and records the decomposition as provenance.
    pub fn from_mixture(
        labels: Vec<String>,
        dims: Vec<usize>,
        branches: Vec<MixtureBranch>,
    ) -> Result<Self> {
        let total = check_layout(&labels, &dims)?;
        if branches.is_empty() {
            return Err(Error::InvalidState("a mixture needs at least one branch".into()));
        }
        let weight_sum: f64 = branches.iter().map(|b| b.weight).sum();
        if (weight_sum - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("weights sum {weight_sum} ≠ 1")));
        }
        let mut normalized = Vec::with_capacity(branches.len());
        for (j, b) in branches.into_iter().enumerate() {
            if b.weight < 0.0 || !b.weight.is_finite() {
                return Err(Error::InvalidState(format!("branch {j} has weight {}", b.weight)));
            }
            if b.factors.len() != labels.len() {
                return Err(Error::DimensionMismatch(format!(
                    "branch {j} has {} factors for {} labels",
                    b.factors.len(),
                    labels.len()
                )));
            }
            let mut factors = Vec::with_capacity(b.factors.len());
            for (i, f) in b.factors.into_iter().enumerate() {
                if f.len() != dims[i] {
                    return Err(Error::DimensionMismatch(format!(
                        "branch {j}: factor for `{}` has length {}, dimension is {}",
                        labels[i],
                        f.len(),
                        dims[i]
                    )));
                }
                let n = f.norm();
                if n.is_nan() || n <= 0.0 {
                    return Err(Error::InvalidState(format!(
                        "branch {j}: factor for `{}` is zero",
                        labels[i]
                    )));
                }
                factors.push(f.unscale(n));
            }
            normalized.push(MixtureBranch { weight: b.weight, factors });
        }
        let mut op = CMatrix::zeros(total, total);
        for b in &normalized {
            let v = b.product_vector();
            op += (&v * v.adjoint()).scale(b.weight);
        }
        Ok(MultipartyState { labels, dims, op, provenance: Some(normalized) })
    }

    /// Skips validation; for operators produced by trusted internal routines.
    pub(crate) fn from_parts_unchecked(
        labels: Vec<String>,
        dims: Vec<usize>,
        op: CMatrix,
        provenance: Option<Vec<MixtureBranch>>,
    ) -> Self {
        MultipartyState { labels, dims, op, provenance }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn op(&self) -> &CMatrix {
        &self.op
    }

    pub fn provenance(&self) -> Option<&[MixtureBranch]> {
        self.provenance.as_deref()
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.op.nrows()
    }

    pub fn num_parties(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn mask<S: AsRef<str>>(&self, labels: &[S]) -> Result<SubsetMask> {
        let mut m = SubsetMask::EMPTY;
        for l in labels {
            m = m.union(SubsetMask::from_indices([self.index_of(l.as_ref())?]));
        }
        Ok(m)
    }

    pub fn full_mask(&self) -> SubsetMask {
        SubsetMask::from_indices(0..self.labels.len())
    }

    pub(crate) fn check_mask(&self, mask: SubsetMask) -> Result<()> {
        if mask.is_empty() {
            return Err(Error::EmptyMask);
        }
        if mask.bits() & !self.full_mask().bits() != 0 {
            return Err(Error::UnknownLabel(format!(
                "mask bit {} beyond {} subsystems",
                63 - mask.bits().leading_zeros(),
                self.labels.len()
            )));
        }
        Ok(())
    }

    pub fn mask_labels(&self, mask: SubsetMask) -> Vec<&str> {
        mask.indices().into_iter().map(|i| self.labels[i].as_str()).collect()
    }

    pub fn mask_dim(&self, mask: SubsetMask) -> usize {
        mask.indices().iter().map(|&i| self.dims[i]).product()
    }

    /// Reconstructs the operator from the recorded mixture, if any.
    pub fn provenance_operator(&self) -> Option<CMatrix> {
        self.provenance.as_ref().map(|branches| {
            let mut op = CMatrix::zeros(self.dim(), self.dim());
            for b in branches {
                let v = b.product_vector();
                op += (&v * v.adjoint()).scale(b.weight);
            }
            op
        })
    }

    /// Marginal on the subsystems in `keep`; provenance is restricted accordingly.
    pub fn reduced_state(&self, keep: SubsetMask) -> Result<MultipartyState> {
        self.check_mask(keep)?;
        let idx = keep.indices();
        let op = linalg::partial_trace(&self.op, &self.dims, &idx);
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let dims = idx.iter().map(|&i| self.dims[i]).collect();
        let provenance = self.provenance.as_ref().map(|branches| {
            branches
                .iter()
                .map(|b| MixtureBranch {
                    weight: b.weight,
                    factors: idx.iter().map(|&i| b.factors[i].clone()).collect(),
                })
                .collect()
        });
        Ok(MultipartyState { labels, dims, op, provenance })
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.op * &self.op).diagonal().iter().map(|z| z.re).sum()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (1.0 - self.purity()).abs() <= tol
    }

    /// `self ⊗ other`; labels must be disjoint.
    pub fn tensor(&self, other: &MultipartyState) -> Result<MultipartyState> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let mut dims = self.dims.clone();
        dims.extend(other.dims.iter().copied());
        check_layout(&labels, &dims)?;
        let op = linalg::kron(&self.op, &other.op);
        let provenance = match (&self.provenance, &other.provenance) {
            (Some(a), Some(b)) => Some(
                a.iter()
                    .flat_map(|x| {
                        b.iter().map(move |y| MixtureBranch {
                            weight: x.weight * y.weight,
                            factors: x.factors.iter().chain(&y.factors).cloned().collect(),
                        })
                    })
                    .collect(),
            ),
            _ => None,
        };
        Ok(MultipartyState { labels, dims, op, provenance })
    }

    /// `ρ^{⊗n}` with the copies of each subsystem grouped into one label `"<label>^n"`.
    pub fn tensor_power(&self, n: usize) -> Result<MultipartyState> {
        if n == 0 {
            return Err(Error::InvalidArgument("number of copies must be ≥ 1".into()));
        }
        let k = self.labels.len();
        let dims: Vec<usize> = self.dims.iter().map(|&d| d.pow(n as u32)).collect();
        check_layout(&self.labels, &dims)?;
        let mut op = self.op.clone();
        for _ in 1..n {
            op = linalg::kron(&op, &self.op);
        }
        let copy_dims: Vec<usize> = (0..n).flat_map(|_| self.dims.iter().copied()).collect();
        // copy c, label i sits at position c*k + i; group by label
        let order: Vec<usize> = (0..k).flat_map(|i| (0..n).map(move |c| c * k + i)).collect();
        let op = linalg::permute_subsystems(&op, &copy_dims, &order);
        let labels = self
            .labels
            .iter()
            .map(|l| if n == 1 { l.clone() } else { format!("{l}^{n}") })
            .collect();
        Ok(MultipartyState { labels, dims, op, provenance: None })
    }

    /// Conjugates by a unitary acting on one subsystem.
    pub fn apply_local_unitary(&self, label: &str, u: &CMatrix) -> Result<MultipartyState> {
        let i = self.index_of(label)?;
        if u.nrows() != self.dims[i] || u.ncols() != self.dims[i] {
            return Err(Error::DimensionMismatch(format!(
                "unitary is {}x{}, `{label}` has dimension {}",
                u.nrows(),
                u.ncols(),
                self.dims[i]
            )));
        }
        let left: usize = self.dims[..i].iter().product();
        let right: usize = self.dims[i + 1..].iter().product();
        let full = linalg::kron(
            &linalg::kron(&CMatrix::identity(left, left), u),
            &CMatrix::identity(right, right),
        );
        let op = &full * &self.op * full.adjoint();
        Ok(MultipartyState { labels: self.labels.clone(), dims: self.dims.clone(), op, provenance: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn labels(ls: &[&str]) -> Vec<String> {
        ls.iter().map(|s| s.to_string()).collect()
    }

    fn basis(d: usize, k: usize) -> CVector {
        let mut v = CVector::zeros(d);
        v[k] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn rejects_bad_layouts() {
        let op = CMatrix::identity(4, 4).scale(0.25);
        assert!(matches!(
            MultipartyState::new(labels(&["A", "A"]), vec![2, 2], op.clone()),
            Err(Error::LabelCollision(_))
        ));
        assert!(matches!(
            MultipartyState::new(labels(&["A", "B"]), vec![2, 3], op.clone()),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            MultipartyState::new(labels(&["A", "B"]), vec![2, 2], op.scale(2.0)),
            Err(Error::InvalidState(_))
        ));
        assert!(matches!(
            MultipartyState::new(labels(&["A", "B"]), vec![64, 128], CMatrix::zeros(1, 1)),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let mut op = CMatrix::zeros(2, 2);
        op[(0, 0)] = Complex64::new(1.5, 0.0);
        op[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(MultipartyState::new(labels(&["A"]), vec![2], op).is_err());
    }

    #[test]
    fn keep_all_is_identity() {
        let s = build_family(&labels(&["A", "B", "C"]), &[2, 3, 2], &Family::RandomPure { seed: 4 }).unwrap();
        let r = s.reduced_state(s.full_mask()).unwrap();
        assert!(linalg::max_abs_diff(r.op(), s.op()) < 1e-12);
    }

    #[test]
    fn bell_with_spectator_marginal() {
        let s = build_family(
            &labels(&["A1", "A2", "R"]),
            &[2, 2, 2],
            &Family::Bell { pairs: vec![("A1".into(), "R".into())] },
        )
        .unwrap();
        let m = s.reduced_state(s.mask(&["A1", "A2"]).unwrap()).unwrap();
        let zero = {
            let v = basis(2, 0);
            &v * v.adjoint()
        };
        let expected = linalg::kron(&CMatrix::identity(2, 2).scale(0.5), &zero);
        assert!(linalg::max_abs_diff(m.op(), &expected) < 1e-12);
    }

    #[test]
    fn reduced_state_rejects_empty_and_unknown() {
        let s = build_family(&labels(&["A", "B"]), &[2, 2], &Family::Ghz).unwrap();
        assert!(matches!(s.reduced_state(SubsetMask::EMPTY), Err(Error::EmptyMask)));
        assert!(s.reduced_state(SubsetMask::from_indices([5])).is_err());
        assert!(matches!(s.mask(&["Z"]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn mixture_provenance_reconstructs() {
        let s = MultipartyState::from_mixture(
            labels(&["X1", "X2"]),
            vec![2, 2],
            vec![
                MixtureBranch { weight: 0.5, factors: vec![basis(2, 0), basis(2, 0)] },
                MixtureBranch { weight: 0.5, factors: vec![basis(2, 1), basis(2, 1)] },
            ],
        )
        .unwrap();
        assert_eq!(s.provenance().unwrap().len(), 2);
        let diag: Vec<f64> = s.op().diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![0.5, 0.0, 0.0, 0.5]);
        assert!(linalg::max_abs_diff(&s.provenance_operator().unwrap(), s.op()) < 1e-12);
    }

    #[test]
    fn mixture_weight_sum_checked() {
        let r = MultipartyState::from_mixture(
            labels(&["X1"]),
            vec![2],
            vec![
                MixtureBranch { weight: 0.5, factors: vec![basis(2, 0)] },
                MixtureBranch { weight: 0.4, factors: vec![basis(2, 1)] },
            ],
        );
        assert!(matches!(r, Err(Error::InvalidState(msg)) if msg.contains("weights sum")));
    }

    #[test]
    fn tensor_power_groups_copies() {
        let s = build_family(
            &labels(&["A", "R"]),
            &[2, 2],
            &Family::Bell { pairs: vec![("A".into(), "R".into())] },
        )
        .unwrap();
        let s2 = s.tensor_power(2).unwrap();
        assert_eq!(s2.labels(), &["A^2".to_string(), "R^2".to_string()]);
        assert_eq!(s2.dims(), &[4, 4]);
        // Φ⊗Φ regrouped is maximally entangled between A^2 and R^2
        assert!((s2.entropy(s2.mask(&["A^2"]).unwrap()).unwrap() - 2.0).abs() < 1e-10);
        assert!(s2.is_pure(1e-10));
    }
}
