use super::{MultipartyState, SubsetMask, STATE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, EIGEN_CUTOFF};

/// The three algebraic forms of conditional multiparty information.
#[derive(Clone, Copy, Debug)]
pub struct MultipartyInfoForms {
    /// `Σ_i H(X_i|E) − H(X_1…X_m|E)`
    pub conditional_entropies: f64,
    /// `Σ_i H(X_i E) − H(X_1…X_m E) − (m−1) H(E)`
    pub joint_entropies: f64,
    /// `Σ_{k≥2} I(X_1…X_{k−1}; X_k | E)`
    pub mutual_info_chain: f64,
}

/// Entropy in bits of the marginal on `idx` (empty `idx` gives 0), together with its
/// smallest eigenvalue.
fn marginal_entropy(op: &CMatrix, dims: &[usize], idx: &[usize]) -> (f64, f64) {
    if idx.is_empty() {
        return (0.0, 0.0);
    }
    let marginal = linalg::partial_trace(op, dims, idx);
    let eig = linalg::hermitian_eigenvalues(&marginal);
    (linalg::spectrum_entropy(&eig), eig[0])
}

fn merged(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v
}

/// `Σ_i H(X_i|E) − H(X_1…X_m|E)` directly on an operator, without validation.
pub(crate) fn info_from_operator(
    op: &CMatrix,
    dims: &[usize],
    parts: &[Vec<usize>],
    cond: &[usize],
) -> f64 {
    let h_e = marginal_entropy(op, dims, cond).0;
    let mut all: Vec<usize> = cond.to_vec();
    let mut total = 0.0;
    for p in parts {
        total += marginal_entropy(op, dims, &merged(p, cond)).0 - h_e;
        all.extend_from_slice(p);
    }
    all.sort_unstable();
    total - (marginal_entropy(op, dims, &all).0 - h_e)
}

/// Columns `√λ_k v_k` for the eigenpairs with `λ_k > EIGEN_CUTOFF`, largest first.
/// The purification is `Σ_{x,k} M[x,k] |x⟩|k⟩`.
pub(crate) fn purification_matrix(op: &CMatrix) -> CMatrix {
    let (values, vectors) = linalg::hermitian_eigen(op);
    let keep: Vec<usize> = (0..values.len()).rev().filter(|&i| values[i] > EIGEN_CUTOFF).collect();
    let mut m = CMatrix::zeros(op.nrows(), keep.len().max(1));
    for (col, &i) in keep.iter().enumerate() {
        m.set_column(col, &vectors.column(i).scale(values[i].sqrt()));
    }
    m
}

impl MultipartyState {
    fn checked_entropy(&self, idx: &[usize]) -> Result<f64> {
        let (h, min_eig) = marginal_entropy(self.op(), self.dims(), idx);
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "marginal has eigenvalue {min_eig:e}; state is corrupted"
            )));
        }
        Ok(h)
    }

    /// Von Neumann entropy (bits) of the marginal on `mask`.
    pub fn entropy(&self, mask: SubsetMask) -> Result<f64> {
        self.check_mask(mask)?;
        self.checked_entropy(&mask.indices())
    }

    /// `H(A|B) = H(AB) − H(B)`; an empty `given` reduces to `H(A)`.
    pub fn conditional_entropy(&self, a: SubsetMask, given: SubsetMask) -> Result<f64> {
        self.check_mask(a)?;
        if !a.is_disjoint(given) {
            return Err(Error::OverlappingMasks);
        }
        let h_b = if given.is_empty() { 0.0 } else { self.entropy(given)? };
        Ok(self.entropy(a.union(given))? - h_b)
    }

    pub fn mutual_info(&self, a: SubsetMask, b: SubsetMask) -> Result<f64> {
        self.multiparty_info(&[a, b], None)
    }

    pub fn conditional_mutual_info(&self, a: SubsetMask, b: SubsetMask, e: SubsetMask) -> Result<f64> {
        self.multiparty_info(&[a, b], Some(e))
    }

    fn check_parts(&self, parts: &[SubsetMask], cond: Option<SubsetMask>) -> Result<()> {
        if parts.is_empty() {
            return Err(Error::EmptyMask);
        }
        let mut seen = SubsetMask::EMPTY;
        for &p in parts {
            self.check_mask(p)?;
            if !seen.is_disjoint(p) {
                return Err(Error::OverlappingMasks);
            }
            seen = seen.union(p);
        }
        if let Some(e) = cond.filter(|e| !e.is_empty()) {
            self.check_mask(e)?;
            if !seen.is_disjoint(e) {
                return Err(Error::OverlappingMasks);
            }
        }
        Ok(())
    }

    /// Multiparty information `Σ_i H(X_i) − H(X_1…X_m)`, or its conditional version
    /// `Σ_i H(X_i|E) − H(X_1…X_m|E)` when `cond` is given.
    pub fn multiparty_info(&self, parts: &[SubsetMask], cond: Option<SubsetMask>) -> Result<f64> {
        Ok(self.multiparty_info_forms(parts, cond)?.conditional_entropies)
    }

    pub fn multiparty_info_forms(
        &self,
        parts: &[SubsetMask],
        cond: Option<SubsetMask>,
    ) -> Result<MultipartyInfoForms> {
        self.check_parts(parts, cond)?;
        let e = cond.unwrap_or(SubsetMask::EMPTY);
        let h = |m: SubsetMask| -> Result<f64> {
            if m.is_empty() {
                Ok(0.0)
            } else {
                self.checked_entropy(&m.indices())
            }
        };
        let h_e = h(e)?;
        let all = parts.iter().fold(SubsetMask::EMPTY, |acc, &p| acc.union(p));
        let h_all_e = h(all.union(e))?;
        let part_joint: Vec<f64> = parts.iter().map(|&p| h(p.union(e))).collect::<Result<_>>()?;

        let conditional_entropies =
            part_joint.iter().map(|x| x - h_e).sum::<f64>() - (h_all_e - h_e);
        let m = parts.len() as f64;
        let joint_entropies = part_joint.iter().sum::<f64>() - h_all_e - (m - 1.0) * h_e;

        let mut mutual_info_chain = 0.0;
        let mut prefix = parts[0];
        for &p in &parts[1..] {
            mutual_info_chain +=
                h(prefix.union(e))? + h(p.union(e))? - h(prefix.union(p).union(e))? - h_e;
            prefix = prefix.union(p);
        }
        Ok(MultipartyInfoForms { conditional_entropies, joint_entropies, mutual_info_chain })
    }

    /// Minimal purification: the new subsystem `new_label` has dimension `rank(ρ)`.
    pub fn purify(&self, new_label: &str) -> Result<MultipartyState> {
        if self.labels().iter().any(|l| l == new_label) {
            return Err(Error::LabelCollision(new_label.to_string()));
        }
        let m = purification_matrix(self.op());
        let r = m.ncols();
        let psi = CVector::from_fn(self.dim() * r, |f, _| m[(f / r, f % r)]);
        let mut labels = self.labels().to_vec();
        labels.push(new_label.to_string());
        let mut dims = self.dims().to_vec();
        dims.push(r);
        MultipartyState::from_pure(labels, dims, &psi)
    }
}

fn check_same_shape(a: &MultipartyState, b: &MultipartyState) -> Result<()> {
    if a.labels() != b.labels() || a.dims() != b.dims() {
        return Err(Error::DimensionMismatch(format!(
            "states on {:?}{:?} and {:?}{:?}",
            a.labels(),
            a.dims(),
            b.labels(),
            b.dims()
        )));
    }
    Ok(())
}

/// Squared fidelity `(Tr √(√b a √b))²`, clamped to `[0, 1]`.
pub fn fidelity(a: &MultipartyState, b: &MultipartyState) -> Result<f64> {
    check_same_shape(a, b)?;
    Ok(fidelity_of_operators(a.op(), b.op()))
}

/// `√F = ‖√a √b‖₁`, evaluated from singular values so no square root of a round-off
/// eigenvalue enters the result.
pub(crate) fn fidelity_of_operators(a: &CMatrix, b: &CMatrix) -> f64 {
    let product = linalg::sqrt_psd(a) * linalg::sqrt_psd(b);
    let root: f64 = product.singular_values().iter().sum();
    (root * root).clamp(0.0, 1.0)
}

/// Unnormalized trace distance `Tr|a − b|`, in `[0, 2]`.
pub fn trace_norm_distance(a: &MultipartyState, b: &MultipartyState) -> Result<f64> {
    check_same_shape(a, b)?;
    Ok(linalg::hermitian_trace_norm(&(a.op() - b.op())))
}

/// `½ Tr|a − b|`, in `[0, 1]`.
pub fn normalized_trace_distance(a: &MultipartyState, b: &MultipartyState) -> Result<f64> {
    Ok(0.5 * trace_norm_distance(a, b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{build_family, Family};
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn labels(ls: &[&str]) -> Vec<String> {
        ls.iter().map(|s| s.to_string()).collect()
    }

    fn ghz() -> MultipartyState {
        build_family(&labels(&["A1", "A2", "R"]), &[2, 2, 2], &Family::Ghz).unwrap()
    }

    fn bell() -> MultipartyState {
        build_family(&labels(&["A", "B"]), &[2, 2], &Family::Bell { pairs: vec![("A".into(), "B".into())] })
            .unwrap()
    }

    fn qubit(op: [f64; 4]) -> MultipartyState {
        MultipartyState::new(labels(&["A"]), vec![2], CMatrix::from_row_slice(2, 2, &op.map(c))).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let g = ghz();
        assert!((g.entropy(g.mask(&["A1"]).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert!(g.entropy(g.full_mask()).unwrap().abs() < 1e-12);
        assert!((qubit([0.5, 0.0, 0.0, 0.5]).entropy(SubsetMask::from_indices([0])).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn multiparty_info_examples() {
        let g = ghz();
        let parts: Vec<SubsetMask> = (0..3).map(|i| SubsetMask::from_indices([i])).collect();
        assert!((g.multiparty_info(&parts, None).unwrap() - 3.0).abs() < 1e-12);
        let b = bell();
        let ab = [SubsetMask::from_indices([0]), SubsetMask::from_indices([1])];
        assert!((b.multiparty_info(&ab, None).unwrap() - 2.0).abs() < 1e-12);
        let p = build_family(&labels(&["A", "B"]), &[2, 2], &Family::Product { basis: vec![1, 0] }).unwrap();
        assert!(p.multiparty_info(&ab, None).unwrap().abs() < 1e-12);
    }

    #[test]
    fn overlapping_parts_rejected() {
        let g = ghz();
        let a = g.mask(&["A1", "A2"]).unwrap();
        let b = g.mask(&["A2"]).unwrap();
        assert!(matches!(g.multiparty_info(&[a, b], None), Err(Error::OverlappingMasks)));
        let r = g.mask(&["R"]).unwrap();
        assert!(matches!(g.multiparty_info(&[b, r], Some(r)), Err(Error::OverlappingMasks)));
    }

    #[test]
    fn fidelity_examples() {
        let b = bell();
        assert!((fidelity(&b, &b).unwrap() - 1.0).abs() < 1e-10);
        let mixed = MultipartyState::new(labels(&["A", "B"]), vec![2, 2], CMatrix::identity(4, 4).scale(0.25)).unwrap();
        assert!((fidelity(&b, &mixed).unwrap() - 0.25).abs() < 1e-10);
        assert!((fidelity(&mixed, &b).unwrap() - 0.25).abs() < 1e-8);
        let zero = qubit([1.0, 0.0, 0.0, 0.0]);
        let one = qubit([0.0, 0.0, 0.0, 1.0]);
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-12);
    }

    #[test]
    fn trace_distance_examples() {
        let b = bell();
        assert!(trace_norm_distance(&b, &b).unwrap().abs() < 1e-12);
        let zero = qubit([1.0, 0.0, 0.0, 0.0]);
        let one = qubit([0.0, 0.0, 0.0, 1.0]);
        assert!((trace_norm_distance(&zero, &one).unwrap() - 2.0).abs() < 1e-12);
        let mixed = MultipartyState::new(labels(&["A", "B"]), vec![2, 2], CMatrix::identity(4, 4).scale(0.25)).unwrap();
        assert!((trace_norm_distance(&b, &mixed).unwrap() - 1.5).abs() < 1e-12);
        assert!((normalized_trace_distance(&b, &mixed).unwrap() - 0.75).abs() < 1e-12);
        assert!(trace_norm_distance(&b, &zero).is_err());
    }

    #[test]
    fn purify_examples() {
        let mixed = qubit([0.5, 0.0, 0.0, 0.5]);
        let p = mixed.purify("P").unwrap();
        assert!(p.is_pure(1e-12));
        assert_eq!(p.dims(), &[2, 2]);
        let back = p.reduced_state(p.mask(&["A"]).unwrap()).unwrap();
        assert!(linalg::max_abs_diff(back.op(), mixed.op()) < 1e-12);

        let pure = qubit([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(pure.purify("P").unwrap().dims(), &[2, 1]);

        let g = ghz();
        let m = g.reduced_state(g.mask(&["A1", "A2"]).unwrap()).unwrap();
        let p = m.purify("P").unwrap();
        assert_eq!(p.num_parties(), 3);
        let back = p.reduced_state(p.mask(&["A1", "A2"]).unwrap()).unwrap();
        assert!(linalg::max_abs_diff(back.op(), m.op()) < 1e-9);

        assert!(matches!(mixed.purify("A"), Err(Error::LabelCollision(_))));
    }
}
