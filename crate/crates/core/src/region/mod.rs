//! The inner-bound rate region `{Q ∈ ℝ^m : Σ_{k∈K} Q_k ≥ C_K for every K}`.
//!
//! `C_K = ½[Σ_{k∈K} H(A_k) + H(R) − H(R A_K)]` is supermodular in `K` (a consequence of strong
//! subadditivity), so the region is a contra-polymatroid: its vertices are exactly the corner
//! points produced by sequential transmission in some sender order, and linear costs are
//! minimized greedily.
//!
//! Sender subsets are [`SubsetKey`] bit masks over sender positions.

mod corners;
mod vertices;

pub use corners::{corner_point, corner_set, greedy_minimize, GreedySolution};
pub use vertices::{
    enumerate_vertices, indicator_rank, reconstruct_chain, tight_system, ChainFamily,
    SaturatedSystem, MAX_ENUMERATION_SENDERS,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::qstate::{MultipartyState, SubsetMask};

/// Bit mask over sender positions.
pub type SubsetKey = usize;

/// Constraint feasibility tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// L∞ distance under which two vertices are the same point.
pub const DEDUP_TOL: f64 = 1e-6;
/// Pivot threshold for elimination on indicator rows.
pub const PIVOT_TOL: f64 = 1e-9;

const MAX_SENDERS: usize = 16;

/// Sender indices of a subset, increasing.
pub fn subset_members(k: SubsetKey) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|&i| k >> i & 1 == 1).collect()
}

/// All nonempty subsets of `m` senders ordered by size, then lexicographically by members.
pub fn sorted_subsets(m: usize) -> Vec<SubsetKey> {
    let mut keys: Vec<SubsetKey> = (1..1usize << m).collect();
    keys.sort_by_key(|&k| (k.count_ones(), subset_members(k)));
    keys
}

/// `C_K` for every subset `K` of the senders, with `C_∅ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionConstants {
    senders: Vec<String>,
    reference: String,
    c: Vec<f64>,
}

impl RegionConstants {
    /// `values` is indexed by subset key and must have length `2^m` with `values[0] = 0`.
    pub fn new(senders: Vec<String>, reference: String, values: Vec<f64>) -> Result<Self> {
        let m = senders.len();
        if m == 0 {
            return Err(Error::InvalidArgument("at least one sender is required".into()));
        }
        if m > MAX_SENDERS {
            return Err(Error::InvalidArgument(format!("at most {MAX_SENDERS} senders are supported")));
        }
        if values.len() != 1 << m {
            return Err(Error::DimensionMismatch(format!(
                "{} constants for {m} senders (expected {})",
                values.len(),
                1 << m
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidArgument("the empty-set constant must be 0".into()));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("constant for subset {k} is not finite")));
        }
        Ok(RegionConstants { senders, reference, c: values })
    }

    /// Builds constants from a function of the subset key; `C_∅` is forced to 0.
    pub fn from_fn<F: FnMut(SubsetKey) -> f64>(
        senders: Vec<String>,
        reference: String,
        mut f: F,
    ) -> Result<Self> {
        let m = senders.len();
        let values = (0..1usize << m.min(MAX_SENDERS + 1)).map(|k| if k == 0 { 0.0 } else { f(k) }).collect();
        Self::new(senders, reference, values)
    }

    pub fn senders(&self) -> &[String] {
        &self.senders
    }

    pub fn reference(&self) -> &str {
        &self.reference
    }

    pub fn num_senders(&self) -> usize {
        self.senders.len()
    }

    pub fn full_set(&self) -> SubsetKey {
        (1 << self.senders.len()) - 1
    }

    pub fn get(&self, k: SubsetKey) -> f64 {
        self.c[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.c
    }

    pub fn sender_index(&self, label: &str) -> Result<usize> {
        self.senders
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn key_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<SubsetKey> {
        labels
            .iter()
            .try_fold(0, |acc, l| Ok(acc | 1 << self.sender_index(l.as_ref())?))
    }

    /// Subset rendered as its sender labels joined by `+`.
    pub fn key_label(&self, k: SubsetKey) -> String {
        subset_members(k)
            .into_iter()
            .map(|i| self.senders[i].as_str())
            .collect::<Vec<_>>()
            .join("+")
    }

    /// Parses a `+`-joined label list back into a subset key.
    pub fn parse_key_label(&self, s: &str) -> Result<SubsetKey> {
        let labels: Vec<&str> = s.split('+').map(str::trim).collect();
        let k = self.key_of(&labels)?;
        if k == 0 {
            return Err(Error::EmptyMask);
        }
        Ok(k)
    }

    /// `(subset, C_K)` over nonempty subsets in (size, lexicographic) order.
    pub fn entries(&self) -> Vec<(SubsetKey, f64)> {
        sorted_subsets(self.num_senders()).into_iter().map(|k| (k, self.c[k])).collect()
    }

    fn check_point(&self, q: &RatePoint) -> Result<()> {
        if q.len() != self.num_senders() {
            return Err(Error::DimensionMismatch(format!(
                "rate point has {} coordinates for {} senders",
                q.len(),
                self.num_senders()
            )));
        }
        Ok(())
    }

    /// Classifies `q` against every constraint `Σ_{k∈K} Q_k ≥ C_K`.
    pub fn membership(&self, q: &RatePoint, tol: f64) -> Result<Membership> {
        self.check_point(q)?;
        let mut violated = Vec::new();
        let mut tight = Vec::new();
        for k in sorted_subsets(self.num_senders()) {
            let slack = q.subset_sum(k) - self.c[k];
            if slack < -tol {
                violated.push(k);
            } else if slack <= tol {
                tight.push(k);
            }
        }
        let verdict = if !violated.is_empty() {
            Verdict::Outside
        } else if !tight.is_empty() {
            Verdict::Boundary
        } else {
            Verdict::Inside
        };
        Ok(Membership { verdict, violated, tight })
    }

    /// Every pair with `C_{K∪L} + C_{K∩L} < C_K + C_L − tol`.
    pub fn check_supermodular(&self, tol: f64) -> SupermodularReport {
        let n = 1usize << self.num_senders();
        let mut violations = Vec::new();
        for k in 0..n {
            for l in k + 1..n {
                let deficit = self.c[k] + self.c[l] - self.c[k | l] - self.c[k & l];
                if deficit > tol {
                    violations.push(SupermodularViolation { k, l, deficit });
                }
            }
        }
        SupermodularReport { violations }
    }

    /// Pairs `K ⊂ L` (differing in one sender) with `C_L < C_K − tol`.
    pub fn check_monotone(&self, tol: f64) -> Vec<(SubsetKey, SubsetKey)> {
        let n = 1usize << self.num_senders();
        let mut bad = Vec::new();
        for k in 0..n {
            for i in 0..self.num_senders() {
                let l = k | 1 << i;
                if l != k && self.c[l] < self.c[k] - tol {
                    bad.push((k, l));
                }
            }
        }
        bad
    }
}

/// Inner-bound constants `C_K = ½[Σ_{k∈K} H(A_k) + H(R) − H(R A_K)]` of a pure state; every
/// label other than `reference` is a sender, in state order.
pub fn region_constants(state: &MultipartyState, reference: &str) -> Result<RegionConstants> {
    let r = state.index_of(reference)?;
    let senders: Vec<usize> = (0..state.num_parties()).filter(|&i| i != r).collect();
    if senders.is_empty() {
        return Err(Error::InvalidArgument("the state has no sender besides the reference".into()));
    }
    if senders.len() > MAX_SENDERS {
        return Err(Error::InvalidArgument(format!("at most {MAX_SENDERS} senders are supported")));
    }
    if !state.is_pure(FEASIBILITY_TOL) {
        log::warn!(
            "input state is not pure (purity {:.9}); the inner bound assumes a pure state",
            state.purity()
        );
    }
    let r_mask = SubsetMask::from_indices([r]);
    let h_r = state.entropy(r_mask)?;
    let h_single: Vec<f64> = senders
        .iter()
        .map(|&i| state.entropy(SubsetMask::from_indices([i])))
        .collect::<Result<_>>()?;
    let m = senders.len();
    let mut values = vec![0.0; 1 << m];
    for (k, value) in values.iter_mut().enumerate().skip(1) {
        let members = subset_members(k);
        let mask = SubsetMask::from_indices(members.iter().map(|&j| senders[j])).union(r_mask);
        let sum_single: f64 = members.iter().map(|&j| h_single[j]).sum();
        *value = 0.5 * (sum_single + h_r - state.entropy(mask)?);
    }
    let labels = senders.iter().map(|&i| state.labels()[i].clone()).collect();
    RegionConstants::new(labels, reference.to_string(), values)
}

/// A rate tuple, qubits per source copy, in sender order.
#[derive(Clone, Debug, PartialEq)]
pub struct RatePoint(pub Vec<f64>);

impl RatePoint {
    pub fn zeros(m: usize) -> Self {
        RatePoint(vec![0.0; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rates(&self) -> &[f64] {
        &self.0
    }

    pub fn subset_sum(&self, k: SubsetKey) -> f64 {
        subset_members(k).into_iter().map(|i| self.0[i]).sum()
    }

    pub fn linf_distance(&self, other: &RatePoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn dot(&self, costs: &[f64]) -> f64 {
        self.0.iter().zip(costs).map(|(a, b)| a * b).sum()
    }
}

/// An ordering `π(1), …, π(m)` of sender positions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SenderPermutation(Vec<usize>);

impl SenderPermutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let m = order.len();
        let mut seen = vec![false; m];
        for &i in &order {
            if i >= m || seen[i] {
                return Err(Error::InvalidArgument(format!("{order:?} is not a permutation of 0..{m}")));
            }
            seen[i] = true;
        }
        Ok(SenderPermutation(order))
    }

    pub fn identity(m: usize) -> Self {
        SenderPermutation((0..m).collect())
    }

    pub fn from_labels<S: AsRef<str>>(senders: &[String], order: &[S]) -> Result<Self> {
        if order.len() != senders.len() {
            return Err(Error::InvalidArgument(format!(
                "permutation names {} senders, expected {}",
                order.len(),
                senders.len()
            )));
        }
        let idx = order
            .iter()
            .map(|l| {
                senders
                    .iter()
                    .position(|s| s == l.as_ref())
                    .ok_or_else(|| Error::UnknownLabel(l.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(idx)
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Senders at positions `i..m` of the ordering.
    pub fn suffix(&self, i: usize) -> SubsetKey {
        self.0[i..].iter().fold(0, |acc, &s| acc | 1 << s)
    }

    pub fn labels<'a>(&self, senders: &'a [String]) -> Vec<&'a str> {
        self.0.iter().map(|&i| senders[i].as_str()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Inside,
    Boundary,
    Outside,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Inside => "inside",
            Verdict::Boundary => "boundary",
            Verdict::Outside => "outside",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub verdict: Verdict,
    pub violated: Vec<SubsetKey>,
    pub tight: Vec<SubsetKey>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupermodularViolation {
    pub k: SubsetKey,
    pub l: SubsetKey,
    /// `C_K + C_L − C_{K∪L} − C_{K∩L}`
    pub deficit: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupermodularReport {
    pub violations: Vec<SupermodularViolation>,
}

impl SupermodularReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// One vertex of a V-description.
#[derive(Clone, Debug)]
pub struct Vertex {
    pub point: RatePoint,
    /// Lexicographically smallest permutation whose corner point is this vertex.
    pub witness: Option<SenderPermutation>,
    /// Independent tight systems that produced this vertex during brute-force enumeration.
    pub systems: Vec<SaturatedSystem>,
}

/// `conv(vertices) + cone(e_1, …, e_m)`; the cone is implicit.
#[derive(Clone, Debug, Default)]
pub struct VRegion {
    pub vertices: Vec<Vertex>,
}

impl VRegion {
    pub fn points(&self) -> Vec<&RatePoint> {
        self.vertices.iter().map(|v| &v.point).collect()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Both vertex lists match point-for-point at L∞ tolerance `tol`.
    pub fn same_points(&self, other: &VRegion, tol: f64) -> bool {
        let covered = |a: &VRegion, b: &VRegion| {
            a.vertices
                .iter()
                .all(|v| b.vertices.iter().any(|w| v.point.linf_distance(&w.point) <= tol))
        };
        covered(self, other) && covered(other, self)
    }
}
