//! JSON reports. Field order follows struct declaration order and every float is rounded to
//! 12 significant digits, so reports from the same inputs diff cleanly.

use std::collections::BTreeMap;

use serde::Serialize;

use super::format::round_json;
use crate::error::{Error, Result};
use crate::esq::{
    classify_rate_point, esq_upper_bound, estimate_outer_bound, ChannelKind, Classification, EsqBudget,
    EsqEstimate, OuterConstants,
};
use crate::qstate::{MultipartyState, SubsetMask};
use crate::region::{
    corner_point, corner_set, enumerate_vertices, greedy_minimize, sorted_subsets, RatePoint,
    RegionConstants, SenderPermutation, SubsetKey, Verdict, DEDUP_TOL, FEASIBILITY_TOL,
    MAX_ENUMERATION_SENDERS,
};
use crate::sim::multiparty_schedule;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Corner sets are only listed up to this many senders (`m!` orders).
pub const MAX_CORNER_SENDERS: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub args: Vec<String>,
    pub spec_sha256: String,
    pub seed: u64,
    pub timestamp_unix: u64,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn to_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self).map_err(|e| Error::Internal(e.to_string()))?;
        round_json(&mut v);
        let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Internal(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantEntry {
    pub subset: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexEntry {
    pub rates: Vec<f64>,
    pub witness: Vec<String>,
    pub membership: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EsqEntry {
    pub subset: String,
    pub inner: f64,
    pub esq: f64,
    pub esq_baseline: f64,
    pub extension: ChannelKind,
    pub d_e: usize,
    pub outer: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OuterSection {
    pub budget: EsqBudget,
    pub entries: Vec<EsqEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionReport {
    pub senders: Vec<String>,
    pub reference: String,
    pub constants: Vec<ConstantEntry>,
    pub supermodular: bool,
    /// Whether brute-force vertex enumeration was run and agreed with the corner set.
    pub vertices_cross_checked: bool,
    pub vertices: Vec<VertexEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer: Option<OuterSection>,
}

fn constant_entries(rc: &RegionConstants) -> Vec<ConstantEntry> {
    sorted_subsets(rc.num_senders())
        .into_iter()
        .map(|k| ConstantEntry { subset: rc.key_label(k), value: rc.get(k) })
        .collect()
}

fn labels_of(pi: &SenderPermutation, senders: &[String]) -> Vec<String> {
    pi.labels(senders).into_iter().map(str::to_string).collect()
}

fn esq_entries(
    rc: &RegionConstants,
    outer: &OuterConstants,
    estimates: &BTreeMap<SubsetKey, EsqEstimate>,
) -> Vec<EsqEntry> {
    estimates
        .iter()
        .map(|(&k, e)| EsqEntry {
            subset: rc.key_label(k),
            inner: rc.get(k),
            esq: e.value,
            esq_baseline: e.baseline,
            extension: e.best_channel.kind,
            d_e: e.best_channel.d_e,
            outer: outer.get(k),
        })
        .collect()
}

/// Constants, vertices with witnesses and, when a budget is given, outer-bound estimates.
///
/// Vertices come from the corner set; up to [`MAX_ENUMERATION_SENDERS`] they are also
/// enumerated by brute force and any disagreement is reported as an internal error, as is a
/// vertex failing membership.
pub fn region_report(
    state: &MultipartyState,
    rc: &RegionConstants,
    budget: Option<&EsqBudget>,
) -> Result<RegionReport> {
    let m = rc.num_senders();
    if m > MAX_CORNER_SENDERS {
        return Err(Error::InvalidArgument(format!(
            "vertex listing supports at most {MAX_CORNER_SENDERS} senders, got {m}"
        )));
    }
    let corners = corner_set(rc, DEDUP_TOL);
    let cross_checked = m <= MAX_ENUMERATION_SENDERS;
    if cross_checked {
        let brute = enumerate_vertices(rc)?;
        if !brute.same_points(&corners, FEASIBILITY_TOL) {
            return Err(Error::Internal(format!(
                "vertex enumeration found {} vertices, corner set has {}",
                brute.len(),
                corners.len()
            )));
        }
    }
    let mut vertices = Vec::with_capacity(corners.len());
    for v in &corners.vertices {
        let membership = rc.membership(&v.point, FEASIBILITY_TOL)?;
        if membership.verdict == Verdict::Outside {
            return Err(Error::Internal(format!("vertex {:?} lies outside the region", v.point.rates())));
        }
        let witness = v.witness.as_ref().expect("corner vertices carry witnesses");
        vertices.push(VertexEntry {
            rates: v.point.rates().to_vec(),
            witness: labels_of(witness, rc.senders()),
            membership: membership.verdict.to_string(),
        });
    }
    let outer = match budget {
        Some(b) => {
            let (outer, estimates) = estimate_outer_bound(state, rc, b)?;
            Some(OuterSection { budget: b.clone(), entries: esq_entries(rc, &outer, &estimates) })
        }
        None => None,
    };
    Ok(RegionReport {
        senders: rc.senders().to_vec(),
        reference: rc.reference().to_string(),
        constants: constant_entries(rc),
        supermodular: rc.check_supermodular(FEASIBILITY_TOL).passed(),
        vertices_cross_checked: cross_checked,
        vertices,
        outer,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CornerEntry {
    pub order: Vec<String>,
    pub rates: Vec<f64>,
    /// Per-sender thresholds of the sequential protocol in the same order, in sender order.
    pub schedule_rates: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CornersReport {
    pub senders: Vec<String>,
    pub distinct_vertices: usize,
    pub corners: Vec<CornerEntry>,
}

/// Corner point and protocol schedule for every sender order.
pub fn corners_report(state: &MultipartyState, rc: &RegionConstants) -> Result<CornersReport> {
    use itertools::Itertools;
    let m = rc.num_senders();
    if m > MAX_CORNER_SENDERS {
        return Err(Error::InvalidArgument(format!(
            "corner listing supports at most {MAX_CORNER_SENDERS} senders, got {m}"
        )));
    }
    let mut corners = Vec::new();
    for order in (0..m).permutations(m) {
        let pi = SenderPermutation::new(order)?;
        let q = corner_point(rc, &pi)?;
        let schedule = multiparty_schedule(state, rc.reference(), &pi)?.rates();
        if q.linf_distance(&schedule) > FEASIBILITY_TOL {
            return Err(Error::Internal(format!(
                "schedule {:?} differs from corner point {:?}",
                schedule.rates(),
                q.rates()
            )));
        }
        corners.push(CornerEntry {
            order: labels_of(&pi, rc.senders()),
            rates: q.rates().to_vec(),
            schedule_rates: schedule.rates().to_vec(),
        });
    }
    Ok(CornersReport {
        senders: rc.senders().to_vec(),
        distinct_vertices: corner_set(rc, DEDUP_TOL).len(),
        corners,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GreedyReport {
    pub senders: Vec<String>,
    pub costs: Vec<f64>,
    pub order: Vec<String>,
    pub rates: Vec<f64>,
    pub value: f64,
}

pub fn greedy_report(rc: &RegionConstants, costs: &[f64]) -> Result<GreedyReport> {
    let g = greedy_minimize(rc, costs)?;
    Ok(GreedyReport {
        senders: rc.senders().to_vec(),
        costs: costs.to_vec(),
        order: labels_of(&g.permutation, rc.senders()),
        rates: g.point.rates().to_vec(),
        value: g.value,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EsqReport {
    pub parts: Vec<String>,
    pub value: f64,
    pub baseline: f64,
    pub extension: ChannelKind,
    pub d_e: usize,
    pub d_g: usize,
    pub budget: EsqBudget,
}

pub fn esq_report(state: &MultipartyState, parts: &[String], budget: &EsqBudget) -> Result<EsqReport> {
    let masks: Vec<SubsetMask> = parts
        .iter()
        .map(|p| state.mask(&p.split('+').collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let e = esq_upper_bound(state, &masks, budget)?;
    Ok(EsqReport {
        parts: parts.to_vec(),
        value: e.value,
        baseline: e.baseline,
        extension: e.best_channel.kind,
        d_e: e.best_channel.d_e,
        d_g: e.best_channel.d_g,
        budget: e.budget,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub senders: Vec<String>,
    pub point: Vec<f64>,
    pub verdict: Classification,
    pub inner_membership: String,
    pub violated_inner: Vec<String>,
    pub violated_outer: Vec<String>,
    pub outer: OuterSection,
}

pub fn classify_report(
    state: &MultipartyState,
    rc: &RegionConstants,
    point: &[f64],
    budget: &EsqBudget,
) -> Result<ClassifyReport> {
    let q = RatePoint(point.to_vec());
    let membership = rc.membership(&q, FEASIBILITY_TOL)?;
    let (outer, estimates) = estimate_outer_bound(state, rc, budget)?;
    let verdict = classify_rate_point(&q, rc, &outer, FEASIBILITY_TOL)?;
    let violated_outer = sorted_subsets(rc.num_senders())
        .into_iter()
        .filter(|&k| q.subset_sum(k) < outer.get(k) - FEASIBILITY_TOL)
        .map(|k| rc.key_label(k))
        .collect();
    Ok(ClassifyReport {
        senders: rc.senders().to_vec(),
        point: point.to_vec(),
        verdict,
        inner_membership: membership.verdict.to_string(),
        violated_inner: membership.violated.iter().map(|&k| rc.key_label(k)).collect(),
        violated_outer,
        outer: OuterSection { budget: budget.clone(), entries: esq_entries(rc, &outer, &estimates) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{build_family, Family};
    use crate::region::region_constants;

    fn ghz() -> (MultipartyState, RegionConstants) {
        let labels: Vec<String> = ["A1", "A2", "R"].iter().map(|s| s.to_string()).collect();
        let s = build_family(&labels, &[2, 2, 2], &Family::Ghz).unwrap();
        let rc = region_constants(&s, "R").unwrap();
        (s, rc)
    }

    #[test]
    fn region_report_lists_ghz_vertices() {
        let (s, rc) = ghz();
        let r = region_report(&s, &rc, None).unwrap();
        assert!(r.supermodular && r.vertices_cross_checked);
        assert_eq!(r.vertices.len(), 2);
        assert_eq!(r.constants[2].subset, "A1+A2");
        assert_eq!(r.vertices[1].witness, vec!["A2", "A1"]);
    }

    #[test]
    fn corners_match_schedule() {
        let (s, rc) = ghz();
        let r = corners_report(&s, &rc).unwrap();
        assert_eq!(r.corners.len(), 2);
        assert_eq!(r.distinct_vertices, 2);
    }

    #[test]
    fn json_is_rounded_and_ordered() {
        let report = Report {
            tool: TOOL,
            version: VERSION,
            command: "greedy".into(),
            args: vec![],
            spec_sha256: String::new(),
            seed: 0,
            timestamp_unix: 0,
            result: greedy_report(&ghz().1, &[1.0, 2.0]).unwrap(),
        };
        let json = report.to_json().unwrap();
        assert!(json.find("\"tool\"").unwrap() < json.find("\"result\"").unwrap());
        assert!(json.contains("\"value\": 2.0"));
    }
}
