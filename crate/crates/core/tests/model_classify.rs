mod common;

use std::sync::Arc;

use common::{ks_critical, ks_statistic};
use l0lab::classify::{classify_ml, classify_truncated, decide, score, tsum};
use l0lab::model::{generate, Label, LabelChoice, ProblemInstance};
use l0lab::numerics::{derive_stream, normal_upper_tail};
use proptest::prelude::*;

fn vec_and_k() -> impl Strategy<Value = (Vec<f64>, usize)> {
    (3usize..40).prop_flat_map(|d| {
        (prop::collection::vec(-50.0f64..50.0, d), 0..=(d - 1) / 2)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn tsum_stable_under_sparse_edits(
        (x, k) in vec_and_k(),
        edits in prop::collection::vec((any::<prop::sample::Index>(), -1e9f64..1e9), 0..20),
    ) {
        let mut xp = x.clone();
        for (idx, v) in edits.iter().take(k) {
            xp[idx.index(x.len())] = *v;
        }
        let sup = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let dev = (tsum(&xp, k).unwrap() - x.iter().sum::<f64>()).abs();
        prop_assert!(dev <= 8.0 * k as f64 * sup + 1e-9 * sup.max(1.0));
    }

    #[test]
    fn tsum_is_permutation_invariant((x, k) in vec_and_k(), seed in any::<u64>()) {
        let mut y = x.clone();
        let mut s = derive_stream(seed, 0);
        for i in (1..y.len()).rev() {
            y.swap(i, (s.next_u64() % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(tsum(&x, k).unwrap(), tsum(&y, k).unwrap());
    }

    #[test]
    fn tsum_is_monotone((x, k) in vec_and_k(), idx in any::<prop::sample::Index>(), bump in 0.0f64..100.0) {
        let mut y = x.clone();
        y[idx.index(x.len())] += bump;
        prop_assert!(tsum(&y, k).unwrap() >= tsum(&x, k).unwrap() - 1e-9);
    }

    #[test]
    fn score_is_odd_for_symmetric_noise(x in -6.0f64..6.0, mu in -1.0f64..1.0) {
        for n in [common::gaussian(), common::quartic()] {
            let a = score(&n, mu, x);
            let b = score(&n, mu, -x);
            prop_assert!((a + b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }
}

#[test]
fn zero_budget_truncated_matches_ml() {
    let inst = ProblemInstance::new(33, 1.0, common::quartic()).unwrap();
    let mut s = derive_stream(20, 0);
    for t in 0..10_000 {
        let x: Vec<f64> = (0..33).map(|_| 3.0 * (s.uniform() - 0.5)).collect();
        assert_eq!(
            classify_ml(&inst, &x).unwrap(),
            classify_truncated(&inst, &x, 0).unwrap(),
            "input {t}"
        );
    }
}

#[test]
fn ties_go_to_negative() {
    assert_eq!(decide(0.0), Label::Neg);
    assert_eq!(decide(-0.0), Label::Neg);
    assert_eq!(decide(1e-300), Label::Pos);
}

#[test]
fn conditional_samples_follow_shifted_noise() {
    let inst = ProblemInstance::new(4096, 2.0, common::gaussian()).unwrap();
    let mu = inst.mu_d();
    for (seed, label) in [(21, Label::Pos), (22, Label::Neg)] {
        let mut s = derive_stream(seed, 0);
        let mut xs: Vec<f64> = (0..25)
            .flat_map(|_| generate(&inst, LabelChoice::Fixed(label), &mut s).samples)
            .map(|x| x - label.sign() * mu)
            .collect();
        let d = ks_statistic(&mut xs, |z| 1.0 - normal_upper_tail(z));
        assert!(d < ks_critical(xs.len()), "label {label}: KS = {d}");
    }
}

#[test]
fn uniform_labels_are_balanced() {
    let inst = ProblemInstance::new(4, 1.0, Arc::clone(&common::gaussian())).unwrap();
    let pos = (0..20_000u64)
        .filter(|&t| generate(&inst, LabelChoice::Uniform, &mut derive_stream(23, t)).label == Label::Pos)
        .count();
    let z = (pos as f64 - 10_000.0) / (20_000.0f64 * 0.25).sqrt();
    assert!(z.abs() < 4.0, "z = {z}");
}
