use std::cmp::Reverse;
use std::collections::BinaryHeap;

use itertools::Itertools;

use super::{
    sorted_subsets, subset_members, RatePoint, RegionConstants, SenderPermutation, SubsetKey,
    VRegion, Vertex, DEDUP_TOL, FEASIBILITY_TOL, PIVOT_TOL,
};
use crate::error::{Error, Result};

/// Brute-force enumeration is refused above this many senders.
pub const MAX_ENUMERATION_SENDERS: usize = 5;

/// `m` sender subsets whose constraints hold with equality at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturatedSystem {
    pub sets: Vec<SubsetKey>,
    pub num_senders: usize,
}

impl SaturatedSystem {
    pub fn new(sets: Vec<SubsetKey>, num_senders: usize) -> Result<Self> {
        if sets.len() != num_senders {
            return Err(Error::InvalidArgument(format!(
                "{} sets for {num_senders} senders",
                sets.len()
            )));
        }
        let full = (1usize << num_senders) - 1;
        if let Some(&k) = sets.iter().find(|&&k| k == 0 || k & !full != 0) {
            return Err(Error::InvalidArgument(format!("set {k:#b} is not a nonempty sender subset")));
        }
        Ok(SaturatedSystem { sets, num_senders })
    }
}

/// Nested sets `K_1 ⊂ … ⊂ K_m` with `|K_l| = l`, and the ordering whose suffixes they are.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainFamily {
    pub sets: Vec<SubsetKey>,
    pub permutation: SenderPermutation,
}

fn indicator_rows(sets: &[SubsetKey], m: usize) -> Vec<Vec<f64>> {
    sets.iter()
        .map(|&k| (0..m).map(|i| if k >> i & 1 == 1 { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Rank of the indicator rows, by elimination with partial pivoting.
pub fn indicator_rank(sets: &[SubsetKey], m: usize) -> usize {
    let mut a = indicator_rows(sets, m);
    let mut rank = 0;
    for col in 0..m {
        let Some(p) = (rank..a.len()).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())) else {
            break;
        };
        if a[p][col].abs() < PIVOT_TOL {
            continue;
        }
        a.swap(rank, p);
        for r in 0..a.len() {
            if r != rank {
                let f = a[r][col] / a[rank][col];
                if f != 0.0 {
                    let pivot = a[rank].clone();
                    for (x, y) in a[r][col..m].iter_mut().zip(&pivot[col..m]) {
                        *x -= f * y;
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Solves `Σ_{k∈L_i} x_k = rhs_i`; `None` when the rows are dependent.
fn solve_indicator_system(sets: &[SubsetKey], rhs: &[f64], m: usize) -> Option<Vec<f64>> {
    let mut a = indicator_rows(sets, m);
    let mut b = rhs.to_vec();
    for col in 0..m {
        let p = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[p][col].abs() < PIVOT_TOL {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..m {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                let pivot = a[col].clone();
                for (x, y) in a[r][col..m].iter_mut().zip(&pivot[col..m]) {
                    *x -= f * y;
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let s: f64 = (r + 1..m).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Vertices of the H-description by brute force over every `m`-subset of the `2^m − 1`
/// constraints: independent systems are solved and kept when feasible.
pub fn enumerate_vertices(rc: &RegionConstants) -> Result<VRegion> {
    let m = rc.num_senders();
    if m > MAX_ENUMERATION_SENDERS {
        return Err(Error::InvalidArgument(format!(
            "vertex enumeration supports at most {MAX_ENUMERATION_SENDERS} senders, got {m}"
        )));
    }
    let constraints = sorted_subsets(m);
    let mut vertices: Vec<Vertex> = Vec::new();
    for combo in constraints.iter().copied().combinations(m) {
        let rhs: Vec<f64> = combo.iter().map(|&k| rc.get(k)).collect();
        let Some(x) = solve_indicator_system(&combo, &rhs, m) else {
            continue;
        };
        let q = RatePoint(x);
        if constraints.iter().any(|&k| q.subset_sum(k) < rc.get(k) - FEASIBILITY_TOL) {
            continue;
        }
        let system = SaturatedSystem { sets: combo, num_senders: m };
        match vertices.iter_mut().find(|v| v.point.linf_distance(&q) <= DEDUP_TOL) {
            Some(v) => v.systems.push(system),
            None => vertices.push(Vertex { point: q, witness: None, systems: vec![system] }),
        }
    }
    Ok(VRegion { vertices })
}

/// Picks `m` independent constraints tight at `q` (within `tol`), scanning subsets in
/// (size, lexicographic) order.
pub fn tight_system(rc: &RegionConstants, q: &RatePoint, tol: f64) -> Result<SaturatedSystem> {
    let m = rc.num_senders();
    let mut chosen: Vec<SubsetKey> = Vec::with_capacity(m);
    for k in sorted_subsets(m) {
        if (q.subset_sum(k) - rc.get(k)).abs() <= tol {
            chosen.push(k);
            if indicator_rank(&chosen, m) < chosen.len() {
                chosen.pop();
            }
            if chosen.len() == m {
                break;
            }
        }
    }
    if chosen.len() < m {
        return Err(Error::LinearDependence { rank: chosen.len(), expected: m });
    }
    Ok(SaturatedSystem { sets: chosen, num_senders: m })
}

/// Turns an independent tight system into the maximal chain it determines.
///
/// Sender `j` points to `k` when every set containing `j` also contains `k`. Independence
/// forbids two senders pointing at each other, so the relation is a partial order; its
/// topological order (smallest position first among available senders) is the permutation,
/// and its suffixes are the chain.
pub fn reconstruct_chain(sys: &SaturatedSystem) -> Result<ChainFamily> {
    let m = sys.num_senders;
    let rank = indicator_rank(&sys.sets, m);
    if rank < m || sys.sets.len() != m {
        return Err(Error::LinearDependence { rank, expected: m });
    }
    let full = (1usize << m) - 1;
    // closure[j] = intersection of all sets containing j
    let closure: Vec<SubsetKey> = (0..m)
        .map(|j| sys.sets.iter().filter(|&&l| l >> j & 1 == 1).fold(full, |acc, &l| acc & l))
        .collect();

    let mut indegree = vec![0usize; m];
    for j in 0..m {
        for k in subset_members(closure[j]) {
            if k != j {
                if closure[k] >> j & 1 == 1 {
                    return Err(Error::Internal(format!(
                        "senders {j} and {k} have identical indicator columns"
                    )));
                }
                indegree[k] += 1;
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..m).filter(|&j| indegree[j] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(Reverse(j)) = ready.pop() {
        order.push(j);
        for k in subset_members(closure[j]) {
            if k != j {
                indegree[k] -= 1;
                if indegree[k] == 0 {
                    ready.push(Reverse(k));
                }
            }
        }
    }
    if order.len() != m {
        return Err(Error::Internal("containment relation has a cycle".into()));
    }

    let permutation = SenderPermutation::new(order)?;
    let sets: Vec<SubsetKey> = (1..=m).map(|l| permutation.suffix(m - l)).collect();
    for &k in &sets {
        let rebuilt = subset_members(k).into_iter().fold(0, |acc, j| acc | closure[j]);
        if rebuilt != k {
            return Err(Error::Internal(format!(
                "chain set {k:#b} is not a union of intersections of the system"
            )));
        }
    }
    Ok(ChainFamily { sets, permutation })
}
