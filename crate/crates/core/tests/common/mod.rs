//! Oracles and generators shared by the integration tests and the
//! acceptance harness. The oracles never call the library code they check;
//! generators and tree walkers may.
#![allow(dead_code)]

use dees::analysis::{absolute_convergence_certificate, tail_sum};
use dees::automaton::MultiplicityAutomaton;
use dees::exact::{decimal_rational, COMPARISON_SLACK};
use dees::fixtures;
use dees::linalg::Matrix;
use dees::normalize::NormalizedSeries;
use dees::sampling::seeded_rng;
use dees::weight::{Rational, Weight};
use dees::word::{Alphabet, Word};
use num_traits::{One, Signed};
use rand::Rng;

/// `r(w)` as the sum over all state paths of the product of their weights.
pub fn path_weight<W: Weight>(a: &MultiplicityAutomaton<W>, w: &Word) -> W {
    let n = a.n();
    let k = w.len();
    let mut total = W::zero();
    let mut path = vec![0usize; k + 1];
    loop {
        let mut prod = a.iota()[path[0]].clone();
        for (i, &x) in w.symbols().iter().enumerate() {
            prod = prod * a.transition(path[i], x, path[i + 1]).clone();
        }
        total = total + prod * a.tau()[path[k]].clone();
        // Next path in base-n counting order.
        let mut i = 0;
        while i <= k {
            path[i] += 1;
            if path[i] < n {
                break;
            }
            path[i] = 0;
            i += 1;
        }
        if i > k {
            return total;
        }
    }
}

/// Exact `r(w)` for a rational MA by path enumeration in scaled integers:
/// with `L` the lcm of all denominators, every path contributes an integer
/// multiple of `L^{-(|w|+2)}`. Panics on `i128` overflow.
pub fn path_weight_exact(a: &MultiplicityAutomaton<Rational>, w: &Word) -> Rational {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let all = a.iota().iter().chain(a.tau()).chain(a.letters().iter().flat_map(|m| m.entries()));
    let l = all.fold(num_bigint::BigInt::from(1), |acc, r| acc.lcm(r.denom()));
    let scale = |r: &Rational| (r * Rational::from_integer(l.clone())).to_integer().to_i128().expect("scaled entry fits i128");
    let iota: Vec<i128> = a.iota().iter().map(scale).collect();
    let tau: Vec<i128> = a.tau().iter().map(scale).collect();
    let letters: Vec<Vec<Vec<i128>>> =
        a.letters().iter().map(|m| m.to_rows().iter().map(|r| r.iter().map(scale).collect()).collect()).collect();
    let (n, k) = (a.n(), w.len());
    let mut total: i128 = 0;
    let mut path = vec![0usize; k + 1];
    loop {
        let mut prod = iota[path[0]];
        for (i, &x) in w.symbols().iter().enumerate() {
            prod = prod.checked_mul(letters[x][path[i]][path[i + 1]]).expect("path product overflow");
        }
        total = total.checked_add(prod.checked_mul(tau[path[k]]).expect("overflow")).expect("overflow");
        let mut i = 0;
        while i <= k {
            path[i] += 1;
            if path[i] < n {
                break;
            }
            path[i] = 0;
            i += 1;
        }
        if i > k {
            break;
        }
    }
    let denom = num_traits::pow(l, k + 2);
    Rational::new(total.into(), denom)
}

/// Float MA with entries `random_ma / (3n)`, so every row of `|M|` sums to at
/// most `|Σ|/3` and word weights stay below 1 in magnitude.
pub fn small_float_ma(seed: u64, n: usize, sigma: usize) -> MultiplicityAutomaton<f64> {
    let scale = 3.0 * n as f64;
    fixtures::random_ma(seed, n, sigma).map_weights(|w| w.to_f64() / scale)
}

/// All words of length `<= depth`, built independently of `Alphabet::ball`.
pub fn words_up_to(sigma: usize, depth: usize) -> Vec<Word> {
    let mut out = vec![Word(vec![])];
    let mut level = vec![Word(vec![])];
    for _ in 0..depth {
        level = level
            .iter()
            .flat_map(|w| (0..sigma).map(move |x| {
                let mut s = w.0.clone();
                s.push(x);
                Word(s)
            }))
            .collect();
        out.extend(level.iter().cloned());
    }
    out
}

/// A random PA with `φ` and `τ` each moved by at most 0.05 (multiples of
/// 1/400), then `ι` rescaled so the total mass is exactly 1. `None` if the
/// result is not certified or its mass is not positive.
pub fn perturbed_pa(seed: u64, n: usize, sigma: usize) -> Option<MultiplicityAutomaton<Rational>> {
    let base = fixtures::random_pa(seed, n, sigma);
    let mut rng = seeded_rng(seed, 1);
    let mut nudge = |w: &Rational| w.clone() + Rational::from_ratio(rng.gen_range(-20..=20), 400);
    let tau: Vec<Rational> = base.tau().iter().map(&mut nudge).collect();
    let letters: Vec<Matrix<Rational>> = base
        .letters()
        .iter()
        .map(|m| Matrix::from_rows(m.to_rows().iter().map(|r| r.iter().map(&mut nudge).collect()).collect()))
        .collect();
    let raw = MultiplicityAutomaton::new(base.alphabet().clone(), base.iota().to_vec(), tau, letters).ok()?;
    if !absolute_convergence_certificate(&raw).certified {
        return None;
    }
    let total = tail_sum(&raw, 0).ok()?;
    if !total.is_positive() {
        return None;
    }
    let iota = raw.iota().iter().map(|w| w.clone() / total.clone()).collect();
    raw.with_iota(iota).ok()
}

/// Members of `S` of length `<= depth`, level by level.
pub fn s_levels<W: Weight>(ns: &NormalizedSeries<W>, depth: usize) -> Vec<Vec<Word>> {
    let sigma = ns.base().alphabet().len();
    let mut levels = vec![vec![Word::empty()]];
    for _ in 0..depth {
        let next = levels
            .last()
            .unwrap()
            .iter()
            .flat_map(|u| (0..sigma).map(move |x| u.child(x)))
            .filter(|u| ns.in_s(u).unwrap())
            .collect();
        levels.push(next);
    }
    levels
}

/// The first certified perturbation at or after `seed`.
pub fn first_certified(seed: u64, n: usize, sigma: usize) -> MultiplicityAutomaton<Rational> {
    (0..).find_map(|k| perturbed_pa(seed.wrapping_add(k), n, sigma)).unwrap()
}

/// Unary chain with `r(ε) = 3/5`, `r(a) = −1/10`, `r(aa) = 1/2`.
pub fn hand_series() -> MultiplicityAutomaton<Rational> {
    let r = Rational::from_ratio;
    let z = || r(0, 1);
    MultiplicityAutomaton::new(
        Alphabet::unary(),
        vec![r(1, 1), z(), z()],
        vec![r(3, 5), r(-1, 10), r(1, 2)],
        vec![Matrix::from_rows(vec![vec![z(), r(1, 1), z()], vec![z(), z(), r(1, 1)], vec![z(), z(), z()]])],
    )
    .unwrap()
}

/// Every `p/q` with `q <= ceil(1/sqrt(eps))`, `eps·q² <= 1` and
/// `|y − p/q| <= eps + slack`, by exhaustive search over denominators.
pub fn admissible_rationals(y: f64, eps: f64) -> Vec<Rational> {
    let x = decimal_rational(y).unwrap();
    let e = decimal_rational(eps).unwrap();
    let slack = decimal_rational(COMPARISON_SLACK).unwrap();
    let q_max = (1.0 / eps.sqrt()).ceil() as i64;
    let mut out = Vec::new();
    for q in 1..=q_max {
        // Exact test only where the float value is too close to call.
        let scaled = eps * (q * q) as f64;
        if scaled > 1.0 + 1e-9 {
            continue;
        }
        let qr = Rational::from_integer(q.into());
        if scaled > 1.0 - 1e-9 && &e * &qr * &qr > Rational::one() {
            continue;
        }
        // Only numerators within one step of y·q can be within eps <= 1/q² <= 1/q.
        let centre = (y * q as f64).round() as i64;
        for p in centre - 2..=centre + 2 {
            // Float prefilter; its margin dwarfs any rounding in `y − p/q`.
            if (y - p as f64 / q as f64).abs() > 2.0 * eps + 1e-9 {
                continue;
            }
            let c = Rational::new(p.into(), q.into());
            if c.denom() == &num_bigint::BigInt::from(q) && Signed::abs(&(&x - &c)) <= &e + &slack {
                out.push(c);
            }
        }
    }
    out
}
