//! Extensions of a state realized as isometries on its minimal purifier.
//!
//! For a state `ρ^X` with purification `|ψ⟩^{X R₀}`, every extension `ρ̃^{XE}` arises as
//! `Tr_G[(I ⊗ V)|ψ⟩⟨ψ|(I ⊗ V†)]` for an isometry `V : R₀ → E ⊗ G`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{info_from_operator, purification_matrix, MixtureBranch, MultipartyState, SubsetMask};

/// Bound on `dim(X) · d_E · d_G` for extension evaluations.
pub const MAX_EXTENSION_DIM: usize = 1024;

const ISOMETRY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Trivial,
    ClassicalFlag,
    Parameterized,
}

#[derive(Clone, Debug)]
pub struct ExtensionChannel {
    pub source: String,
    pub d_e: usize,
    pub d_g: usize,
    /// `(d_E · d_G) × d_{R₀}`, row index `e · d_G + g`.
    pub isometry: CMatrix,
    pub kind: ChannelKind,
}

impl ExtensionChannel {
    pub fn new(
        source: impl Into<String>,
        d_e: usize,
        d_g: usize,
        isometry: CMatrix,
        kind: ChannelKind,
    ) -> Result<Self> {
        if d_e == 0 || d_g == 0 {
            return Err(Error::InvalidArgument("extension dimensions must be ≥ 1".into()));
        }
        if isometry.nrows() != d_e * d_g {
            return Err(Error::DimensionMismatch(format!(
                "isometry has {} rows, d_E · d_G = {}",
                isometry.nrows(),
                d_e * d_g
            )));
        }
        let defect = linalg::isometry_defect(&isometry);
        if defect > ISOMETRY_TOL {
            return Err(Error::InvalidArgument(format!(
                "channel matrix is not an isometry (defect {defect:e})"
            )));
        }
        Ok(ExtensionChannel { source: source.into(), d_e, d_g, isometry, kind })
    }

    /// `E` one-dimensional; everything is discarded into `G`.
    pub fn trivial(source: impl Into<String>, purifier_dim: usize) -> Self {
        ExtensionChannel {
            source: source.into(),
            d_e: 1,
            d_g: purifier_dim,
            isometry: CMatrix::identity(purifier_dim, purifier_dim),
            kind: ChannelKind::Trivial,
        }
    }

    pub fn purifier_dim(&self) -> usize {
        self.isometry.ncols()
    }
}

/// A state restricted to the union of some parts and purified, ready for extension queries.
#[derive(Clone, Debug)]
pub struct Extender {
    source: String,
    x_dims: Vec<usize>,
    parts: Vec<Vec<usize>>,
    /// `d_X × r`; the purification is `Σ M[x,k] |x⟩|k⟩`.
    purifier: CMatrix,
    provenance: Option<Vec<MixtureBranch>>,
}

impl Extender {
    pub fn new(state: &MultipartyState, parts: &[SubsetMask]) -> Result<Self> {
        Self::with_source(state, parts, "R0")
    }

    pub fn with_source(state: &MultipartyState, parts: &[SubsetMask], source: &str) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptyMask);
        }
        let mut union = SubsetMask::EMPTY;
        for &p in parts {
            if p.is_empty() {
                return Err(Error::EmptyMask);
            }
            if !union.is_disjoint(p) {
                return Err(Error::OverlappingMasks);
            }
            union = union.union(p);
        }
        let marginal = state.reduced_state(union)?;
        let positions = union.indices();
        let parts = parts
            .iter()
            .map(|p| {
                p.indices()
                    .iter()
                    .map(|i| positions.iter().position(|j| j == i).expect("part lies in union"))
                    .collect()
            })
            .collect();
        Ok(Extender {
            source: source.to_string(),
            x_dims: marginal.dims().to_vec(),
            parts,
            purifier: purification_matrix(marginal.op()),
            provenance: marginal.provenance().map(<[MixtureBranch]>::to_vec),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn x_dim(&self) -> usize {
        self.purifier.nrows()
    }

    pub fn purifier_dim(&self) -> usize {
        self.purifier.ncols()
    }

    pub fn has_provenance(&self) -> bool {
        self.provenance.is_some()
    }

    pub(crate) fn check_cap(&self, d_e: usize, d_g: usize) -> Result<()> {
        let size = self.x_dim().saturating_mul(d_e).saturating_mul(d_g);
        if size > MAX_EXTENSION_DIM {
            return Err(Error::DimensionCap { size, cap: MAX_EXTENSION_DIM });
        }
        Ok(())
    }

    /// Raw `I(X_1; …; X_k | E)` in bits for the extension produced by `ch`.
    pub fn evaluate(&self, ch: &ExtensionChannel) -> Result<f64> {
        if ch.source != self.source {
            return Err(Error::UnknownLabel(ch.source.clone()));
        }
        if ch.purifier_dim() != self.purifier_dim() {
            return Err(Error::DimensionMismatch(format!(
                "channel acts on a {}-dimensional purifier, state needs {}",
                ch.purifier_dim(),
                self.purifier_dim()
            )));
        }
        if ch.isometry.nrows() != ch.d_e * ch.d_g {
            return Err(Error::DimensionMismatch("isometry shape does not match d_E · d_G".into()));
        }
        let defect = linalg::isometry_defect(&ch.isometry);
        if defect > ISOMETRY_TOL {
            return Err(Error::InvalidArgument(format!(
                "channel matrix is not an isometry (defect {defect:e})"
            )));
        }
        self.check_cap(ch.d_e, ch.d_g)?;
        Ok(self.evaluate_unchecked(&ch.isometry, ch.d_e, ch.d_g))
    }

    pub(crate) fn evaluate_unchecked(&self, v: &CMatrix, d_e: usize, d_g: usize) -> f64 {
        let dx = self.x_dim();
        // columns e·d_G + g of M Vᵀ hold the amplitudes ⟨x, e, g|ψ'⟩
        let n = &self.purifier * v.transpose();
        let a = CMatrix::from_fn(dx * d_e, d_g, |row, g| n[(row / d_e, (row % d_e) * d_g + g)]);
        let rho_xe = &a * a.adjoint();
        let mut dims = self.x_dims.clone();
        dims.push(d_e);
        let e = dims.len() - 1;
        info_from_operator(&rho_xe, &dims, &self.parts, &[e])
    }

    /// Unconditioned multiparty information of the parts.
    pub fn baseline(&self) -> f64 {
        self.evaluate_unchecked(&CMatrix::identity(self.purifier_dim(), self.purifier_dim()), 1, self.purifier_dim())
    }

    /// Extension that records the branch index of the separable decomposition in `E`
    /// (with a copy in `G`), expressed on the minimal purifier.
    pub fn classical_flag_channel(&self) -> Option<Result<ExtensionChannel>> {
        let branches = self.provenance.as_ref()?;
        let b = branches.len();
        Some(self.check_cap(b, b).and_then(|_| {
            let dx = self.x_dim();
            let mut big = CMatrix::zeros(dx, b * b);
            for (j, br) in branches.iter().enumerate() {
                let v = br.product_vector().scale(br.weight.sqrt());
                big.set_column(j * b + j, &v);
            }
            // Vᵀ = diag(1/λ) M† M_big maps the minimal purification onto the flagged one
            let mut vt = self.purifier.adjoint() * big;
            for k in 0..vt.nrows() {
                let lambda: f64 = self.purifier.column(k).norm_squared();
                let mut row = vt.row_mut(k);
                row.unscale_mut(lambda);
            }
            let mut v = vt.transpose();
            if linalg::isometry_defect(&v) > ISOMETRY_TOL {
                v = linalg::polar_isometry(&v);
            }
            ExtensionChannel::new(self.source.clone(), b, b, v, ChannelKind::ClassicalFlag)
        }))
    }
}

/// Raw conditional multiparty information `I(parts | E)` (not halved) for the extension of
/// `state` produced by `ch` acting on its minimal purifier.
pub fn conditional_info_with_extension(
    state: &MultipartyState,
    parts: &[SubsetMask],
    ch: &ExtensionChannel,
) -> Result<f64> {
    Extender::with_source(state, parts, &ch.source)?.evaluate(ch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{build_family, Family};
    use crate::linalg::CVector;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn labels(ls: &[&str]) -> Vec<String> {
        ls.iter().map(|s| s.to_string()).collect()
    }

    fn basis(d: usize, k: usize) -> CVector {
        let mut v = CVector::zeros(d);
        v[k] = Complex64::new(1.0, 0.0);
        v
    }

    fn singletons(s: &MultipartyState) -> Vec<SubsetMask> {
        (0..s.num_parties()).map(|i| SubsetMask::from_indices([i])).collect()
    }

    #[test]
    fn trivial_channel_reproduces_unconditioned_info() {
        let s = build_family(&labels(&["A", "B", "C"]), &[2, 2, 2], &Family::RandomPure { seed: 3 }).unwrap();
        let ab = s.reduced_state(s.mask(&["A", "B"]).unwrap()).unwrap();
        let parts = [SubsetMask::from_indices([0]), SubsetMask::from_indices([1])];
        let ext = Extender::new(&ab, &parts).unwrap();
        let ch = ExtensionChannel::trivial("R0", ext.purifier_dim());
        let got = conditional_info_with_extension(&ab, &parts, &ch).unwrap();
        let want = ab.multiparty_info(&parts, None).unwrap();
        assert!((got - want).abs() < 1e-9);
    }

    #[test]
    fn classical_flag_zeroes_separable_mixture() {
        let s = MultipartyState::from_mixture(
            labels(&["X1", "X2"]),
            vec![2, 2],
            vec![
                MixtureBranch { weight: 0.5, factors: vec![basis(2, 0), basis(2, 0)] },
                MixtureBranch { weight: 0.5, factors: vec![basis(2, 1), basis(2, 1)] },
            ],
        )
        .unwrap();
        let parts = singletons(&s);
        let ext = Extender::new(&s, &parts).unwrap();
        let ch = ext.classical_flag_channel().unwrap().unwrap();
        assert_eq!(ch.kind, ChannelKind::ClassicalFlag);
        assert!(ext.evaluate(&ch).unwrap().abs() < 1e-9);
        assert!((ext.baseline() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn random_channels_never_beat_trivial_on_bell_pair() {
        let s = build_family(&labels(&["A", "B"]), &[2, 2], &Family::Bell { pairs: vec![("A".into(), "B".into())] })
            .unwrap();
        let parts = singletons(&s);
        let ext = Extender::new(&s, &parts).unwrap();
        assert_eq!(ext.purifier_dim(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for t in 0..50 {
            let d_e = 1 + t % 4;
            let d_g = 1 + (t / 4) % 4;
            let v = crate::qstate::haar_random_vector(d_e * d_g, &mut rng);
            let ch = ExtensionChannel::new("R0", d_e, d_g, CMatrix::from_column_slice(d_e * d_g, 1, v.as_slice()), ChannelKind::Parameterized)
                .unwrap();
            assert!(ext.evaluate(&ch).unwrap() >= 2.0 - 1e-6);
        }
    }

    #[test]
    fn rejects_non_isometry_and_wrong_source() {
        let bad = CMatrix::identity(2, 2).scale(2.0);
        assert!(ExtensionChannel::new("R0", 2, 1, bad, ChannelKind::Parameterized).is_err());
        let s = build_family(&labels(&["A", "B"]), &[2, 2], &Family::Ghz).unwrap();
        let parts = singletons(&s);
        let ch = ExtensionChannel::trivial("P", 1);
        let ext = Extender::new(&s, &parts).unwrap();
        assert!(matches!(ext.evaluate(&ch), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn dimension_cap_enforced() {
        let s = build_family(&labels(&["A", "B", "C"]), &[4, 4, 4], &Family::RandomPure { seed: 1 }).unwrap();
        let parts = [s.mask(&["A"]).unwrap(), s.mask(&["B"]).unwrap()];
        let ext = Extender::new(&s, &parts).unwrap();
        let d = 40;
        let v = linalg::polar_isometry(&CMatrix::from_fn(d * d, ext.purifier_dim(), |r, c| {
            Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0)
        }));
        let ch = ExtensionChannel::new("R0", d, d, v, ChannelKind::Parameterized).unwrap();
        assert!(matches!(ext.evaluate(&ch), Err(Error::DimensionCap { .. })));
    }
}
