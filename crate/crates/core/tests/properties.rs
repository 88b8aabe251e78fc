mod common;

use common::{random_mixed, random_pure, schmidt_entropy};
use proptest::prelude::*;
use qdistcomp::cli::{export_h_representation, parse_h_representation};
use qdistcomp::esq::{esq_upper_bound, EsqBudget};
use qdistcomp::linalg;
use qdistcomp::qstate::{fidelity, normalized_trace_distance};
use qdistcomp::region::{
    corner_point, corner_set, greedy_minimize, region_constants, sorted_subsets, RatePoint,
    RegionConstants, SenderPermutation, Verdict, DEDUP_TOL,
};
use qdistcomp::sim::multiparty_schedule;
use qdistcomp::SubsetMask;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sender_names(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("A{i}")).chain(["R".to_string()]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn entropy_within_bounds(seed: u64, env in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_mixed(&["A", "B", "C"], &[2, 3, 2], env, &mut rng);
        for bits in 1u64..8 {
            let mask = SubsetMask::from_bits(bits);
            let h = s.entropy(mask).unwrap();
            prop_assert!(h >= 0.0);
            prop_assert!(h <= (s.mask_dim(mask) as f64).log2() + 1e-9);
        }
    }

    #[test]
    fn pure_state_complements_match(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = [2, 3, 2, 2];
        let (s, psi) = random_pure(&["A", "B", "C", "D"], &dims, &mut rng);
        for bits in 1u64..15 {
            let mask = SubsetMask::from_bits(bits);
            let comp = SubsetMask::from_bits(15 & !bits);
            let h = s.entropy(mask).unwrap();
            prop_assert!((h - s.entropy(comp).unwrap()).abs() <= 1e-9);
            prop_assert!((h - schmidt_entropy(&psi, &dims, &mask.indices())).abs() <= 1e-9);
        }
    }

    #[test]
    fn strong_subadditivity(seed: u64, env in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_mixed(&["A", "B", "E"], &[2, 2, 2], env, &mut rng);
        let m = |bits: u64| SubsetMask::from_bits(bits);
        let h = |bits: u64| s.entropy(m(bits)).unwrap();
        prop_assert!(h(0b101) + h(0b110) - h(0b111) - h(0b100) >= -1e-7);
        prop_assert!(s.conditional_mutual_info(m(1), m(2), m(4)).unwrap() >= -1e-7);
    }

    #[test]
    fn fidelity_trace_distance_sandwich(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_mixed(&["A", "B"], &[2, 2], 3, &mut rng);
        let b = random_mixed(&["A", "B"], &[2, 2], 2, &mut rng);
        let f = fidelity(&a, &b).unwrap();
        let d = normalized_trace_distance(&a, &b).unwrap();
        prop_assert!((f - fidelity(&b, &a).unwrap()).abs() <= 1e-8);
        prop_assert!(1.0 - f.sqrt() <= d + 1e-7);
        prop_assert!(d <= (1.0 - f).max(0.0).sqrt() + 1e-7);
    }

    #[test]
    fn purification_is_minimal(seed: u64, env in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_mixed(&["A", "B"], &[2, 2], env, &mut rng);
        let p = s.purify("P").unwrap();
        prop_assert!(p.is_pure(1e-9));
        let rank = linalg::hermitian_eigenvalues(s.op()).iter().filter(|&&l| l > 1e-10).count();
        prop_assert_eq!(p.dims()[2], rank);
        prop_assert!(p.dims()[2] <= env);
        let back = p.reduced_state(SubsetMask::from_indices([0, 1])).unwrap();
        prop_assert!(linalg::max_abs_diff(back.op(), s.op()) <= 1e-9);
    }

    #[test]
    fn region_structure(seed: u64, m in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let names = sender_names(m);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let s = random_mixed(&refs, &vec![2; m + 1], 2, &mut rng);
        let rc = region_constants(&s, "R").unwrap();
        prop_assert!(rc.check_supermodular(1e-7).passed());
        prop_assert!(rc.check_monotone(1e-7).is_empty());
        for v in &corner_set(&rc, DEDUP_TOL).vertices {
            let verdict = rc.membership(&v.point, 1e-7).unwrap().verdict;
            prop_assert!(verdict != Verdict::Outside);
            let pi = v.witness.as_ref().unwrap();
            let schedule = multiparty_schedule(&s, "R", pi).unwrap();
            prop_assert!(schedule.rates().linf_distance(&v.point) <= 1e-9);
            prop_assert!((schedule.total() - rc.get(rc.full_set())).abs() <= 1e-9);
        }
    }

    #[test]
    fn greedy_beats_every_corner(seed: u64, costs in prop::collection::vec(0.01f64..10.0, 3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, _) = random_pure(&["A1", "A2", "A3", "R"], &[2, 2, 2, 3], &mut rng);
        let rc = region_constants(&s, "R").unwrap();
        let g = greedy_minimize(&rc, &costs).unwrap();
        for order in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let q = corner_point(&rc, &SenderPermutation::new(order.to_vec()).unwrap()).unwrap();
            prop_assert!(g.value <= q.dot(&costs) + 1e-9);
        }
    }

    #[test]
    fn points_above_a_vertex_stay_inside(seed: u64, bump in prop::collection::vec(0.0f64..1.0, 3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, _) = random_pure(&["A1", "A2", "A3", "R"], &[2, 2, 2, 2], &mut rng);
        let rc = region_constants(&s, "R").unwrap();
        let q = corner_point(&rc, &SenderPermutation::identity(3)).unwrap();
        let up = RatePoint(q.rates().iter().zip(&bump).map(|(a, b)| a + b).collect());
        prop_assert!(rc.membership(&up, 1e-9).unwrap().violated.is_empty());
    }

    #[test]
    fn h_representation_round_trip(values in prop::collection::vec(-20.0f64..20.0, 7)) {
        let mut all = vec![0.0];
        all.extend(values);
        let senders: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        let rc = RegionConstants::new(senders.clone(), "R".into(), all).unwrap();
        let text = export_h_representation(&rc);
        let back = parse_h_representation(&text, senders, "R".into()).unwrap();
        for k in sorted_subsets(3) {
            prop_assert!((back.get(k) - rc.get(k)).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn esq_budget_growth_never_raises_estimate(seed: u64, budget_seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_mixed(&["A", "B"], &[2, 2], 2, &mut rng);
        let parts = [SubsetMask::from_indices([0]), SubsetMask::from_indices([1])];
        let small = EsqBudget { d_e_sweep: vec![1, 2], restarts: 1, iterations: 30, seed: budget_seed };
        let large = EsqBudget { d_e_sweep: vec![1, 2, 3], restarts: 3, iterations: 30, seed: budget_seed };
        let a = esq_upper_bound(&s, &parts, &small).unwrap();
        let b = esq_upper_bound(&s, &parts, &large).unwrap();
        prop_assert!(b.value <= a.value + 1e-12);
        prop_assert!(a.value <= a.baseline + 1e-12);
        prop_assert!(b.value >= 0.0);
    }
}
