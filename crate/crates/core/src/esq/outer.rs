use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::estimate::{esq_upper_bound, EsqBudget, EsqEstimate};
use crate::error::{Error, Result};
use crate::qstate::{MultipartyState, SubsetMask};
use crate::region::{sorted_subsets, subset_members, RatePoint, RegionConstants, SubsetKey, Verdict};

/// Right-hand sides `C_K − Ê_sq(A_K)` of the necessary conditions, indexed by subset key.
#[derive(Clone, Debug, PartialEq)]
pub struct OuterConstants {
    senders: Vec<String>,
    values: Vec<f64>,
}

impl OuterConstants {
    pub fn get(&self, k: SubsetKey) -> f64 {
        self.values[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn senders(&self) -> &[String] {
        &self.senders
    }
}

/// `C_K − Ê_sq(K)` for every `K`; singletons keep `C_K` since one-part multiparty information
/// vanishes. Since `Ê_sq` over-estimates the squashed entanglement the constraints stay valid.
pub fn outer_bound_constants(
    inner: &RegionConstants,
    esq: &BTreeMap<SubsetKey, EsqEstimate>,
) -> Result<OuterConstants> {
    let m = inner.num_senders();
    let mut values = vec![0.0; 1 << m];
    for k in sorted_subsets(m) {
        values[k] = if k.count_ones() == 1 {
            inner.get(k)
        } else {
            let e = esq.get(&k).ok_or_else(|| {
                Error::InvalidArgument(format!("missing squashed-entanglement estimate for {}", inner.key_label(k)))
            })?;
            inner.get(k) - e.value.max(0.0)
        };
    }
    Ok(OuterConstants { senders: inner.senders().to_vec(), values })
}

/// Estimates `Ê_sq(A_K)` on the marginal of every multi-sender subset and returns the outer
/// constants together with the estimates.
pub fn estimate_outer_bound(
    state: &MultipartyState,
    inner: &RegionConstants,
    budget: &EsqBudget,
) -> Result<(OuterConstants, BTreeMap<SubsetKey, EsqEstimate>)> {
    let sender_pos: Vec<usize> = inner
        .senders()
        .iter()
        .map(|s| state.index_of(s))
        .collect::<Result<_>>()?;
    let mut estimates = BTreeMap::new();
    for k in sorted_subsets(inner.num_senders()).into_iter().filter(|k| k.count_ones() >= 2) {
        let parts: Vec<SubsetMask> = subset_members(k)
            .into_iter()
            .map(|i| SubsetMask::from_indices([sender_pos[i]]))
            .collect();
        estimates.insert(k, esq_upper_bound(state, &parts, budget)?);
    }
    let outer = outer_bound_constants(inner, &estimates)?;
    Ok((outer, estimates))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Satisfies every inner-bound constraint.
    Achievable,
    /// Between the bounds; may still be infeasible since the outer bound is estimated.
    Gap,
    /// Violates a necessary condition.
    NotAchievable,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Achievable => "achievable",
            Classification::Gap => "gap",
            Classification::NotAchievable => "not_achievable",
        })
    }
}

pub fn classify_rate_point(
    q: &RatePoint,
    inner: &RegionConstants,
    outer: &OuterConstants,
    tol: f64,
) -> Result<Classification> {
    if outer.senders() != inner.senders() {
        return Err(Error::InvalidArgument("inner and outer constants use different senders".into()));
    }
    if inner.membership(q, tol)?.verdict != Verdict::Outside {
        return Ok(Classification::Achievable);
    }
    let violated = sorted_subsets(inner.num_senders())
        .into_iter()
        .any(|k| q.subset_sum(k) < outer.get(k) - tol);
    Ok(if violated { Classification::NotAchievable } else { Classification::Gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{build_family, Family};
    use crate::region::region_constants;

    fn labels(ls: &[&str]) -> Vec<String> {
        ls.iter().map(|s| s.to_string()).collect()
    }

    fn budget() -> EsqBudget {
        EsqBudget { d_e_sweep: vec![1, 2], restarts: 2, iterations: 60, seed: 3 }
    }

    #[test]
    fn ghz_outer_matches_inner() {
        let s = build_family(&labels(&["A1", "A2", "R"]), &[2, 2, 2], &Family::Ghz).unwrap();
        let inner = region_constants(&s, "R").unwrap();
        let (outer, est) = estimate_outer_bound(&s, &inner, &budget()).unwrap();
        assert_eq!(est.len(), 1);
        for k in 1..4 {
            assert!((outer.get(k) - inner.get(k)).abs() < 1e-6, "K = {k}");
        }
        assert_eq!(
            classify_rate_point(&RatePoint(vec![1.0, 0.5]), &inner, &outer, 1e-9).unwrap(),
            Classification::Achievable
        );
        assert_eq!(
            classify_rate_point(&RatePoint(vec![0.4, 0.4]), &inner, &outer, 1e-9).unwrap(),
            Classification::NotAchievable
        );
    }

    #[test]
    fn sender_bell_pair_has_a_gap() {
        let s = build_family(
            &labels(&["A1", "A2", "R"]),
            &[2, 2, 1],
            &Family::Bell { pairs: vec![("A1".into(), "A2".into())] },
        )
        .unwrap();
        let inner = region_constants(&s, "R").unwrap();
        assert!((inner.get(0b11) - 1.0).abs() < 1e-12);
        let (outer, _) = estimate_outer_bound(&s, &inner, &budget()).unwrap();
        assert!(outer.get(0b11).abs() < 1e-6);
        assert_eq!(
            classify_rate_point(&RatePoint(vec![0.2, 0.2]), &inner, &outer, 1e-9).unwrap(),
            Classification::Gap
        );
    }

    #[test]
    fn missing_estimate_is_an_error() {
        let rc = RegionConstants::new(labels(&["A1", "A2"]), "R".into(), vec![0.0, 0.5, 0.5, 1.5]).unwrap();
        assert!(outer_bound_constants(&rc, &BTreeMap::new()).is_err());
    }
}
