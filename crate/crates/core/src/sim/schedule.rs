use crate::error::{Error, Result};
use crate::qstate::{MultipartyState, SubsetMask};
use crate::region::{RatePoint, SenderPermutation};

/// Per-sender thresholds of the sequential protocol for one ordering of the senders.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSchedule {
    pub senders: Vec<String>,
    pub permutation: SenderPermutation,
    /// `½ I(A_{π(i)}; A_{π(i+1)} … A_{π(m)} R)` for position `i` of the ordering.
    pub thresholds: Vec<f64>,
}

impl ProtocolSchedule {
    /// Thresholds rearranged into sender order.
    pub fn rates(&self) -> RatePoint {
        let mut q = vec![0.0; self.thresholds.len()];
        for (pos, &s) in self.permutation.order().iter().enumerate() {
            q[s] = self.thresholds[pos];
        }
        RatePoint(q)
    }

    pub fn total(&self) -> f64 {
        self.thresholds.iter().sum()
    }
}

/// Each sender, in the order `π`, transmits at half its mutual information with everything
/// still held by later senders and the reference.
pub fn multiparty_schedule(
    state: &MultipartyState,
    reference: &str,
    pi: &SenderPermutation,
) -> Result<ProtocolSchedule> {
    let r = state.index_of(reference)?;
    let senders: Vec<usize> = (0..state.num_parties()).filter(|&i| i != r).collect();
    if pi.len() != senders.len() {
        return Err(Error::InvalidArgument(format!(
            "ordering names {} senders, state has {}",
            pi.len(),
            senders.len()
        )));
    }
    let order = pi.order();
    let thresholds = (0..order.len())
        .map(|i| {
            let me = SubsetMask::from_indices([senders[order[i]]]);
            let rest = SubsetMask::from_indices(order[i + 1..].iter().map(|&j| senders[j]).chain([r]));
            Ok(0.5 * state.mutual_info(me, rest)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ProtocolSchedule {
        senders: senders.iter().map(|&i| state.labels()[i].clone()).collect(),
        permutation: pi.clone(),
        thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{build_family, Family};

    fn labels(ls: &[&str]) -> Vec<String> {
        ls.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn ghz_thresholds() {
        let s = build_family(&labels(&["A1", "A2", "R"]), &[2, 2, 2], &Family::Ghz).unwrap();
        let sch = multiparty_schedule(&s, "R", &SenderPermutation::identity(2)).unwrap();
        assert!((sch.thresholds[0] - 1.0).abs() < 1e-12);
        assert!((sch.thresholds[1] - 0.5).abs() < 1e-12);
        let rev = multiparty_schedule(&s, "R", &SenderPermutation::new(vec![1, 0]).unwrap()).unwrap();
        assert!(rev.rates().linf_distance(&RatePoint(vec![0.5, 1.0])) < 1e-12);
    }

    #[test]
    fn product_thresholds_vanish() {
        let s = build_family(&labels(&["A1", "A2", "R"]), &[2, 2, 2], &Family::Product { basis: vec![0, 0, 0] })
            .unwrap();
        let sch = multiparty_schedule(&s, "R", &SenderPermutation::identity(2)).unwrap();
        assert!(sch.thresholds.iter().all(|t| t.abs() < 1e-12));
    }

    #[test]
    fn wrong_length_rejected() {
        let s = build_family(&labels(&["A1", "A2", "R"]), &[2, 2, 2], &Family::Ghz).unwrap();
        assert!(multiparty_schedule(&s, "R", &SenderPermutation::identity(3)).is_err());
        assert!(multiparty_schedule(&s, "X", &SenderPermutation::identity(2)).is_err());
    }
}
