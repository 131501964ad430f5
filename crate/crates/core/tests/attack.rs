mod common;

use l0lab::attack::{
    brute_force_attack, coupling_attack, realize_in_x_space, realize_worst_case, worst_case_sum,
    worst_case_tsum, Direction,
};
use l0lab::classify::{classify_ml, classify_truncated, loglik_transform, tsum};
use l0lab::model::{generate, Label, LabelChoice, ProblemInstance};
use l0lab::numerics::derive_stream;
use l0lab::Error;
use proptest::prelude::*;

fn direction_against(label: Label) -> Direction {
    match label {
        Label::Pos => Direction::Minimize,
        Label::Neg => Direction::Maximize,
    }
}

#[test]
fn closed_form_matches_brute_force() {
    let mut s = derive_stream(30, 0);
    for case in 0..1000 {
        let d = 4 + (s.next_u64() % 7) as usize;
        let k = ((s.next_u64() % 3) as usize).min((d - 1) / 2);
        // Multiples of 1/8 make every partial sum exact.
        let scores: Vec<f64> = (0..d).map(|_| ((s.next_u64() % 161) as f64 - 80.0) / 8.0).collect();
        for dir in [Direction::Minimize, Direction::Maximize] {
            let (closed, _) = worst_case_tsum(&scores, k, dir).unwrap();
            let brute = brute_force_attack(&scores, k, dir).unwrap();
            assert_eq!(closed, brute, "case {case}: {scores:?}, k = {k}, {dir:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn worst_case_is_feasible_and_bounding(
        (scores, k) in (3usize..30).prop_flat_map(|d| (prop::collection::vec(-10.0f64..10.0, d), 0..=(d - 1) / 2)),
        minimize in any::<bool>(),
    ) {
        let dir = if minimize { Direction::Minimize } else { Direction::Maximize };
        let (value, out) = worst_case_tsum(&scores, k, dir).unwrap();
        prop_assert!(out.l0_distance(&scores) <= k);
        prop_assert_eq!(tsum(&out.perturbed, k).unwrap(), value);
        let base = tsum(&scores, k).unwrap();
        match dir {
            Direction::Minimize => prop_assert!(value <= base),
            Direction::Maximize => prop_assert!(value >= base),
        }
    }
}

#[test]
fn brute_force_refuses_large_instances() {
    let scores = vec![0.0; 20];
    assert!(matches!(
        brute_force_attack(&scores, 1, Direction::Minimize),
        Err(Error::InstanceTooLarge { .. })
    ));
}

#[test]
fn plain_sum_is_flipped_by_one_coordinate() {
    for noise in [common::gaussian(), common::quartic()] {
        let inst = ProblemInstance::new(64, 1.0, noise).unwrap();
        for t in 0..1000 {
            let ds = generate(&inst, LabelChoice::Uniform, &mut derive_stream(31, t));
            let dir = direction_against(ds.label);
            let x = realize_in_x_space(&inst, &ds.samples, &[(0, dir)]).unwrap();
            assert_eq!(x.iter().zip(&ds.samples).filter(|(a, b)| a != b).count(), 1);
            assert_ne!(classify_ml(&inst, &x).unwrap(), ds.label, "trial {t}");
            let scores = loglik_transform(&inst, &ds.samples).unwrap().scores;
            assert!(worst_case_sum(&scores, 1, dir).is_infinite());
        }
    }
}

#[test]
fn realized_attack_stays_in_ball_and_matches_closed_form() {
    let inst = ProblemInstance::new(256, 1.0, common::quartic()).unwrap();
    for t in 0..200 {
        let ds = generate(&inst, LabelChoice::Uniform, &mut derive_stream(32, t));
        let k = 1 + (t as usize % 8);
        let dir = direction_against(ds.label);
        let out = realize_worst_case(&inst, &ds.samples, k, dir).unwrap();
        assert!(out.l0_distance(&ds.samples) <= k);
        let achieved = tsum(&loglik_transform(&inst, &out.perturbed).unwrap().scores, k).unwrap();
        let expected = out.worst_statistic.unwrap();
        assert!((achieved - expected).abs() <= 1e-9 * expected.abs().max(1.0));
        // The attacked point is classified no better than the clean one.
        if classify_truncated(&inst, &ds.samples, k).unwrap() != ds.label {
            assert_ne!(classify_truncated(&inst, &out.perturbed, k).unwrap(), ds.label);
        }
    }
}

#[test]
fn coupling_respects_budget_and_revert_bound() {
    let noise = common::gaussian();
    let d = 1024;
    let inst = ProblemInstance::new(d, 1.0, noise.clone()).unwrap();
    let tv = noise.tv_shifted(inst.mu_d()).unwrap();
    let k = 30;
    let trials = 4000;
    let mut reverts = 0;
    for t in 0..trials {
        let mut s = derive_stream(33, t);
        let ds = generate(&inst, LabelChoice::Uniform, &mut s);
        let out = coupling_attack(&inst, &ds, k, &mut s);
        assert!(out.l0_distance(&ds.samples) <= k);
        if out.reverted {
            assert_eq!(out.perturbed, ds.samples);
            reverts += 1;
        }
    }
    let rate = reverts as f64 / trials as f64;
    let markov = d as f64 * tv / k as f64;
    let sigma = (markov.min(1.0) * (1.0 - markov.min(1.0)) / trials as f64).sqrt();
    assert!(rate <= markov + 4.0 * sigma, "revert rate {rate} > {markov}");
}

#[test]
fn coupled_data_does_not_reveal_label() {
    let inst = ProblemInstance::new(1024, 1.0, common::quartic()).unwrap();
    let k = 1024;
    let mut sums = [Vec::new(), Vec::new()];
    for t in 0..6000u64 {
        let mut s = derive_stream(34, t);
        let ds = generate(&inst, LabelChoice::Uniform, &mut s);
        let out = coupling_attack(&inst, &ds, k, &mut s);
        assert!(!out.reverted);
        sums[(ds.label == Label::Pos) as usize].push(out.perturbed.iter().sum::<f64>());
    }
    let [mut neg, mut pos] = sums;
    neg.sort_by(f64::total_cmp);
    pos.sort_by(f64::total_cmp);
    let (n, m) = (neg.len() as f64, pos.len() as f64);
    let (mut i, mut j, mut ks) = (0, 0, 0.0f64);
    while i < neg.len() && j < pos.len() {
        if neg[i] <= pos[j] {
            i += 1;
        } else {
            j += 1;
        }
        ks = ks.max((i as f64 / n - j as f64 / m).abs());
    }
    let critical = 1.949 * ((n + m) / (n * m)).sqrt();
    assert!(ks < critical, "two-sample KS = {ks}, critical {critical}");
}
