mod common;

use proptest::prelude::*;
use seshadri_core::interpolation::{
    basis_split, evaluation_surjective, form_count, h0_linear_system, select_subbasis_for_blowup, PointConfiguration,
};

fn expected_h0(n: usize, d: u32, reqs: &[u32]) -> usize {
    let conditions: usize = reqs.iter().map(|&m| form_count(n, m - 1)).sum();
    form_count(n, d).saturating_sub(conditions)
}

#[test]
fn simple_points_impose_independent_conditions() {
    for seed in 0..4 {
        for k in 0..=6 {
            let pts = PointConfiguration::random(2, k, seed).unwrap();
            for d in 0..=4 {
                let sys = h0_linear_system(&pts, d, &vec![1; k]).unwrap();
                assert_eq!(sys.h0(), expected_h0(2, d, &vec![1; k]), "seed {seed}, k {k}, d {d}");
            }
        }
    }
}

#[test]
fn two_double_points_are_special() {
    let pts = PointConfiguration::random(2, 2, 3).unwrap();
    assert_eq!(expected_h0(2, 2, &[2, 2]), 0);
    assert_eq!(h0_linear_system(&pts, 2, &[2, 2]).unwrap().h0(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn kernel_dimension_matches_derivative_oracle(
        seed in any::<u64>(),
        d in 0u32..=10,
        reqs in proptest::collection::vec(1u32..=3, 0..=6),
    ) {
        let pts = PointConfiguration::random(2, reqs.len(), seed).unwrap();
        let sys = h0_linear_system(&pts, d, &reqs).unwrap();
        let rows: usize = reqs.iter().map(|&m| form_count(2, m - 1)).sum();
        prop_assert_eq!(sys.matrix.rows(), rows);
        prop_assert_eq!(sys.matrix.cols(), form_count(2, d));
        let oracle = form_count(2, d) - common::derivative_rank_mod_p(&pts, d, &reqs);
        prop_assert_eq!(sys.h0(), oracle);
        prop_assert!(sys.h0() >= expected_h0(2, d, &reqs));
    }

    #[test]
    fn split_cardinalities_and_blowup_subbases(
        seed in any::<u64>(),
        mults in proptest::collection::vec(0u32..=2, 0..=3),
        extra in 0u32..=2,
    ) {
        let d = mults.iter().map(|m| m + 1).sum::<u32>().saturating_sub(1) + extra;
        let pts = PointConfiguration::random(2, mults.len(), seed).unwrap();
        let split = basis_split(&pts, d, &mults).unwrap();
        for (i, &m) in mults.iter().enumerate() {
            prop_assert_eq!(split.b[i].len(), form_count(2, m));
            prop_assert_eq!(split.btilde_len(i), m as usize + 1);
        }
        let all = split.all_forms();
        prop_assert_eq!(all.len(), form_count(2, d));
        prop_assert_eq!(common::rational_rank_mod_p(&all), form_count(2, d));
        for i in 0..=mults.len() {
            let sub = select_subbasis_for_blowup(&split, i).unwrap();
            let (kept, reqs): (Vec<usize>, Vec<u32>) =
                (0..i).filter(|&j| mults[j] > 0).map(|j| (j, mults[j])).unzip();
            let prefix = PointConfiguration::new(2, kept.iter().map(|&j| pts.point(j).to_vec()).collect()).unwrap();
            prop_assert_eq!(sub.len(), h0_linear_system(&prefix, d, &reqs).unwrap().h0());
            prop_assert_eq!(common::rational_rank_mod_p(&sub), sub.len());
        }
    }
}

#[test]
fn surjectivity_is_monotone_in_degree() {
    for seed in 0..5 {
        let pts = PointConfiguration::random(2, 3, 100 + seed).unwrap();
        let mults = [2, 1, 2];
        let verdicts: Vec<bool> = (0..=10)
            .map(|d| evaluation_surjective(&pts, d, &mults).unwrap().is_surjective())
            .collect();
        let first = verdicts.iter().position(|&s| s).expect("surjective for large degree");
        assert!(verdicts[first..].iter().all(|&s| s), "seed {seed}: {verdicts:?}");
        assert!(first <= 8);
    }
}

#[test]
fn three_dimensional_space() {
    let pts = PointConfiguration::random(3, 2, 4).unwrap();
    assert_eq!(h0_linear_system(&pts, 2, &[2, 1]).unwrap().h0(), 10 - 4 - 1);
    let split = basis_split(&pts, 3, &[1, 1]).unwrap();
    assert_eq!(split.b[0].len(), 4);
    assert_eq!(split.btilde_len(0), 3);
    assert_eq!(split.b0.len(), 20 - 8);
}
