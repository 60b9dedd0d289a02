mod common;

use common::{path_weight, path_weight_exact, small_float_ma, words_up_to};
use dees::analysis::{absolute_convergence_certificate, letter_sum_radius, power_norm_decay, tail_sum};
use dees::automaton::MultiplicityAutomaton;
use dees::fixtures;
use dees::linalg::{vec_norm2, Matrix};
use dees::weight::{Rational, Weight};
use proptest::prelude::*;

fn scaled(a: &MultiplicityAutomaton<f64>, factor: f64) -> MultiplicityAutomaton<f64> {
    let letters = a.letters().iter().map(|m| m.map(|w| w * factor)).collect();
    MultiplicityAutomaton::new(a.alphabet().clone(), a.iota().to_vec(), a.tau().to_vec(), letters).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn word_weight_matches_path_enumeration(seed in any::<u64>(), n in 1usize..=4, sigma in 1usize..=2) {
        let a = fixtures::random_ma(seed, n, sigma);
        let f = small_float_ma(seed, n, sigma);
        for w in words_up_to(sigma, 6) {
            prop_assert_eq!(a.word_weight(&w).unwrap(), path_weight_exact(&a, &w));
            let (x, y) = (f.word_weight(&w).unwrap(), path_weight(&f, &w));
            prop_assert!((x - y).abs() <= 1e-10, "{:?}: {} vs {}", w, x, y);
        }
    }

    #[test]
    fn tail_sum_matches_truncations(seed in any::<u64>(), n in 1usize..=4, sigma in 1usize..=2) {
        let base = fixtures::random_ma(seed, n, sigma).to_float();
        let rho = letter_sum_radius(&base);
        prop_assume!(rho > 1e-6);
        let a = scaled(&base, 0.5 / rho);
        let m = a.letter_sum();
        let total = tail_sum(&a, 0).unwrap();
        let mut i_minus_m = nalgebra::DMatrix::<f64>::identity(n, n);
        i_minus_m -= m.to_nalgebra();
        let resolvent_norm = i_minus_m.try_inverse().unwrap().singular_values().max();
        let mut bounds = Vec::new();
        for k in [4usize, 8, 16] {
            let partial: f64 = (0..=k)
                .map(|j| {
                    let row = (0..j).fold(a.iota().to_vec(), |v, _| m.left_mul(&v));
                    row.iter().zip(a.tau()).map(|(x, y)| x * y).sum::<f64>()
                })
                .sum();
            let bound = vec_norm2(a.iota()) * power_norm_decay(&m, k + 1) * resolvent_norm * vec_norm2(a.tau());
            prop_assert!((total - partial).abs() <= bound + 1e-12, "K={}: error {} > bound {}", k, (total - partial).abs(), bound);
            bounds.push(bound);
        }
        // ρ = 1/2: the bound must shrink at least geometrically between checkpoints.
        prop_assert!(bounds[1] <= bounds[0] && bounds[2] <= bounds[1] * 0.5f64.powi(4));
    }

    #[test]
    fn pa_has_unit_mass(seed in any::<u64>(), n in 1usize..=4, sigma in 1usize..=3) {
        let a = fixtures::random_pa(seed, n, sigma);
        prop_assert!(a.is_pa());
        prop_assert_eq!(tail_sum(&a, 0).unwrap(), Rational::from_ratio(1, 1));
        prop_assert!((tail_sum(&a.to_float(), 0).unwrap() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn trim_preserves_the_series(seed in any::<u64>(), n in 1usize..=3, sigma in 1usize..=2) {
        // Pad with an inaccessible state (index n) and a dead state (n + 1).
        let a = fixtures::random_ma(seed, n, sigma);
        let r = Rational::from_ratio;
        let big = n + 2;
        let mut iota = a.iota().to_vec();
        iota.extend([r(0, 1), r(0, 1)]);
        let mut tau = a.tau().to_vec();
        tau.extend([r(2, 1), r(0, 1)]);
        let letters = a
            .letters()
            .iter()
            .map(|m| {
                let mut p = Matrix::zeros(big, big);
                for i in 0..n {
                    for j in 0..n {
                        p.set(i, j, m.get(i, j).clone());
                    }
                    p.set(i, n + 1, r(1, 1));
                    p.set(n, i, r(1, 1));
                }
                p
            })
            .collect();
        let padded = MultiplicityAutomaton::new(a.alphabet().clone(), iota, tau, letters).unwrap();
        let t = padded.trim();
        prop_assert!(t.removed.contains(&n) && t.removed.contains(&(n + 1)));
        for w in words_up_to(sigma, 6) {
            prop_assert_eq!(t.automaton.word_weight(&w).unwrap(), padded.word_weight(&w).unwrap());
        }
    }

    #[test]
    fn certificate_bounds_absolute_mass(seed in any::<u64>(), n in 1usize..=3, sigma in 1usize..=2, shrink in 1.01f64..3.0) {
        let base = fixtures::random_ma(seed, n, sigma).to_float();
        let rho_abs = absolute_convergence_certificate(&base).rho_abs;
        prop_assume!(rho_abs > 1e-6);
        let a = scaled(&base, 1.0 / (rho_abs * shrink));
        let cert = absolute_convergence_certificate(&a);
        prop_assert!(cert.certified);
        let lower: f64 = words_up_to(sigma, 12).iter().map(|w| a.word_weight(w).unwrap().abs()).sum();
        prop_assert!(lower <= cert.abs_mass_bound * (1.0 + 1e-9), "{} > {}", lower, cert.abs_mass_bound);
    }
}

#[test]
fn gelfand_sandwich_on_rotation() {
    let a = fixtures::a_alpha(std::f64::consts::FRAC_PI_6, [0.0, 0.0, 1.0]);
    let m = a.letter_sum();
    // M is 1/2 times an orthogonal matrix, so C = 1 and ‖M^k‖ = 2^-k.
    let c = 1.0f64;
    let mut prev_gap = f64::INFINITY;
    for k in [8usize, 32, 128] {
        let root = power_norm_decay(&m, k).powf(1.0 / k as f64);
        assert!(root >= 0.5 - 1e-12 && root <= 0.5 * (2.0 * c).powf(1.0 / k as f64), "k={k}: {root}");
        let gap = (root - 0.5).abs();
        assert!(gap <= prev_gap + 1e-12);
        prev_gap = gap;
    }
}

#[test]
fn rotation_constants() {
    for alpha in [0.0, std::f64::consts::FRAC_PI_6, 1.0] {
        let sum = |lambda: [f64; 3]| -> f64 {
            let a = fixtures::a_alpha(alpha, lambda);
            (0..=200).map(|k| a.word_weight(&dees::word::Word(vec![0; k])).unwrap()).sum()
        };
        assert!((sum([1.0, 0.0, 0.0]) - fixtures::a_alpha_sigma0(alpha)).abs() < 1e-9);
        assert!((sum([0.0, 1.0, 0.0]) - fixtures::a_alpha_sigma1(alpha)).abs() < 1e-9);
        let a2 = fixtures::a_alpha(alpha, [0.0, 0.0, 1.0]);
        assert!((tail_sum(&a2, 0).unwrap() - 2.0).abs() < 1e-9);
        // r_{q2}(aⁿ) = 2⁻ⁿ.
        for k in 0..10 {
            assert_eq!(a2.word_weight(&dees::word::Word(vec![0; k])).unwrap(), 0.5f64.powi(k as i32));
        }
    }
}
