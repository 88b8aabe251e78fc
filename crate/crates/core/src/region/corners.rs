use itertools::Itertools;

use super::{RatePoint, RegionConstants, SenderPermutation, VRegion, Vertex};
use crate::error::{Error, Result};

/// Corner point of the sequential order `π`: the sender at position `i` pays the increment
/// `C_{π[i,m]} − C_{π[i+1,m]}`, so the last sender pays `C_{π(m)}`.
pub fn corner_point(rc: &RegionConstants, pi: &SenderPermutation) -> Result<RatePoint> {
    let m = rc.num_senders();
    if pi.len() != m {
        return Err(Error::InvalidArgument(format!(
            "permutation has {} entries for {m} senders",
            pi.len()
        )));
    }
    let mut q = vec![0.0; m];
    for i in 0..m {
        let tail = if i + 1 < m { rc.get(pi.suffix(i + 1)) } else { 0.0 };
        q[pi.order()[i]] = rc.get(pi.suffix(i)) - tail;
    }
    Ok(RatePoint(q))
}

/// Corner points over all `m!` orders, deduplicated at L∞ distance `tol`. Permutations are
/// visited in lexicographic order so each vertex keeps its smallest witness.
pub fn corner_set(rc: &RegionConstants, tol: f64) -> VRegion {
    let m = rc.num_senders();
    let mut vertices: Vec<Vertex> = Vec::new();
    for order in (0..m).permutations(m) {
        let pi = SenderPermutation(order);
        let q = corner_point(rc, &pi).expect("permutation length matches");
        if vertices.iter().all(|v| v.point.linf_distance(&q) > tol) {
            vertices.push(Vertex { point: q, witness: Some(pi), systems: Vec::new() });
        }
    }
    VRegion { vertices }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedySolution {
    pub point: RatePoint,
    pub value: f64,
    pub permutation: SenderPermutation,
}

/// Minimizes `Σ c_i Q_i` over the region for strictly positive costs.
///
/// Senders are ordered by increasing cost (ties by sender position) and the corner point of
/// that order is returned; the most expensive sender comes last and pays only its singleton
/// constant.
pub fn greedy_minimize(rc: &RegionConstants, costs: &[f64]) -> Result<GreedySolution> {
    let m = rc.num_senders();
    if costs.len() != m {
        return Err(Error::InvalidArgument(format!("{} costs for {m} senders", costs.len())));
    }
    if let Some(c) = costs.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
        return Err(Error::InvalidArgument(format!("costs must be positive, got {c}")));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
    let permutation = SenderPermutation(order);
    let point = corner_point(rc, &permutation)?;
    let value = point.dot(costs);
    Ok(GreedySolution { point, value, permutation })
}
