mod common;

use common::{first_certified, hand_series, s_levels};
use dees::analysis::abs_tail_bound;
use dees::fixtures;
use dees::normalize::NormalizedSeries;
use dees::weight::{Rational, Weight};
use dees::word::Word;
use num_traits::{One, Zero};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normalization_invariants(seed in any::<u64>(), n in 1usize..=3, sigma in 1usize..=2) {
        let a = first_certified(seed, n, sigma);
        let ns = NormalizedSeries::new(a.clone()).unwrap();
        let levels = s_levels(&ns, 7);
        let sigma = a.alphabet().len();
        for u in levels.iter().flatten() {
            // Mass recursion, exactly.
            let children = (0..sigma)
                .map(|x| u.child(x))
                .filter(|c| ns.in_s(c).unwrap())
                .fold(Rational::zero(), |acc, c| acc + ns.pr_prefix_mass(&c).unwrap());
            prop_assert_eq!(ns.pr_prefix_mass(u).unwrap(), ns.pr_eval(u).unwrap() + children);
            // λ bounds and telescoping.
            let l = ns.lambda_at(u).unwrap();
            prop_assert!(l > Rational::zero() && l <= Rational::one());
            if let Some((v, _)) = u.split_last() {
                let prefix = ns.prefix_mass(u).unwrap();
                let want = prefix.clone() / (prefix - ns.node_neg_mass(u).unwrap());
                prop_assert_eq!(l / ns.lambda_at(&v).unwrap(), want);
            }
            // Dominance.
            let (p, r) = (ns.pr_eval(u).unwrap(), a.word_weight(u).unwrap());
            prop_assert!(p >= Rational::zero() && p <= Rational::one());
            if r > Rational::zero() {
                prop_assert!(p <= r);
            }
        }
    }

    #[test]
    fn truncated_mass_deficit_is_bounded(seed in any::<u64>(), n in 1usize..=3, sigma in 1usize..=2) {
        // Exact arithmetic: the float positivity threshold would drop
        // sub-1e-12 prefixes from S and blur the comparison.
        let a = first_certified(seed, n, sigma);
        let ns = NormalizedSeries::new(a.clone()).unwrap();
        let k = 8;
        let levels = s_levels(&ns, k + 1);
        let mass = levels[..=k].iter().flatten().fold(Rational::zero(), |acc, u| acc + ns.pr_eval(u).unwrap());
        let deficit = Rational::one() - mass;
        let frontier = levels[k + 1].iter().fold(Rational::zero(), |acc, u| acc + ns.prefix_mass(u).unwrap());
        prop_assert!(deficit >= Rational::zero());
        prop_assert!(deficit <= frontier);
        prop_assert!(frontier.to_f64() <= abs_tail_bound(&a, k + 1).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn stochastic_languages_are_fixed_points(seed in any::<u64>(), n in 1usize..=3, sigma in 1usize..=2) {
        let a = fixtures::random_pa(seed, n, sigma);
        let ns = NormalizedSeries::new(a.clone()).unwrap();
        for u in a.alphabet().ball(if sigma == 1 { 8 } else { 6 }) {
            prop_assert_eq!(ns.pr_eval(&u).unwrap(), a.word_weight(&u).unwrap());
        }
        let summary = ns.neg_total_and_abs_mass(6).unwrap();
        prop_assert_eq!(summary.neg_total, 0.0);
        prop_assert!(summary.abs_mass_lower <= 1.0 + 1e-12 && summary.abs_mass_upper >= 1.0 - 1e-12);
    }

    #[test]
    fn sampling_ignores_memo_sharing(seed in any::<u64>()) {
        let a = first_certified(seed, 2, 2).to_float();
        let shared = NormalizedSeries::new(a.clone()).unwrap();
        let draws: Vec<_> = std::thread::scope(|s| {
            let hs: Vec<_> = (0..4u64).map(|t| {
                let shared = &shared;
                s.spawn(move || shared.pr_draw_sample(200, seed ^ t).unwrap())
            }).collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for (t, d) in draws.iter().enumerate() {
            let fresh = NormalizedSeries::new(a.clone()).unwrap();
            prop_assert_eq!(d, &fresh.pr_draw_sample(200, seed ^ t as u64).unwrap());
        }
    }
}

#[test]
fn hand_series_reproduces_the_worked_example() {
    let ns = NormalizedSeries::new(hand_series()).unwrap();
    let r = Rational::from_ratio;
    let w = |k: usize| Word(vec![0; k]);
    assert_eq!(ns.lambda_at(&w(1)).unwrap(), r(4, 5));
    let pr: Vec<Rational> = (0..3).map(|k| ns.pr_eval(&w(k)).unwrap()).collect();
    assert_eq!(pr, vec![r(3, 5), r(0, 1), r(2, 5)]);
    let s = ns.neg_total_and_abs_mass(4).unwrap();
    assert!((s.neg_total + 0.1).abs() < 1e-15 && (s.abs_mass_lower - 1.2).abs() < 1e-15);
}
