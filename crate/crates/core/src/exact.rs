//! Continued-fraction recovery of rational parameters.
//!
//! Floats are read as the exact decimal they print as (shortest round-trip
//! form), so `0.1` is `1/10` rather than its binary expansion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::automaton::{AnyAutomaton, MultiplicityAutomaton};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::weight::{Rational, Weight};

/// Slack added to `eps` in `|y − p/q| <= eps`, absorbing decimal
/// representation error of `y`.
pub const COMPARISON_SLACK: f64 = 1e-12;

/// Denominators above this are never searched.
pub const MAX_DENOMINATOR: u64 = 1_000_000_000_000;

/// Exact value of the shortest decimal that round-trips to `y`.
pub fn decimal_rational(y: f64) -> Option<Rational> {
    if !y.is_finite() {
        return None;
    }
    let text = format!("{y:e}");
    let (mantissa, exp) = text.split_once('e')?;
    let exp: i32 = exp.parse().ok()?;
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if shift >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, shift as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-shift) as usize))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

/// Continued-fraction convergents `p_k/q_k` of `y` (as an exact decimal).
///
/// Stops after `max_terms` convergents, when the expansion terminates, or at
/// the first convergent that rounds back to `y`.
pub fn convergents(y: f64, max_terms: usize) -> Vec<Rational> {
    let Some(mut x) = decimal_rational(y) else {
        return Vec::new();
    };
    let (mut p_prev, mut p) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::new();
    while out.len() < max_terms {
        let a = x.floor().to_integer();
        (p_prev, p) = (p.clone(), &a * &p + &p_prev);
        (q_prev, q) = (q.clone(), &a * &q + &q_prev);
        let c = Rational::new(p.clone(), q.clone());
        let hit = c.to_f64() == y;
        out.push(c);
        let frac = x - Rational::from_integer(a);
        if hit || frac.is_zero() {
            break;
        }
        x = frac.recip();
    }
    out
}

/// The smallest-denominator rational in the closed interval `[lo, hi]`
/// (Stern–Brocot descent, i.e. the continued-fraction walk over
/// convergents and semiconvergents of the endpoints).
fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    if !lo.is_positive() && !hi.is_negative() {
        return Rational::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi.clone(), &-lo.clone());
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = fl.clone() + Rational::one();
    if &next <= hi {
        return next;
    }
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Largest `q` with `eps <= 1/q²`, capped at [`MAX_DENOMINATOR`].
fn max_admissible_denominator(eps: &Rational) -> BigInt {
    let bound = eps.recip().floor().to_integer().sqrt();
    bound.min(BigInt::from(MAX_DENOMINATOR))
}

/// Farey neighbours of `p/q` in the Farey sequence of order `big_q >= q`.
fn farey_neighbours(r: &Rational, big_q: &BigInt) -> (Rational, Rational) {
    let (p, q) = (r.numer(), r.denom());
    if q.is_one() {
        let left = Rational::new(p * big_q - BigInt::one(), big_q.clone());
        let right = Rational::new(p * big_q + BigInt::one(), big_q.clone());
        return (left, right);
    }
    // Left a/b: p·b − q·a = 1, so b ≡ p⁻¹ (mod q). Right c/d: q·c − p·d = 1.
    let inv = p.extended_gcd(q).x.mod_floor(q);
    let largest = |residue: BigInt| -> BigInt { &residue + q * ((big_q - &residue).div_floor(q)) };
    let b = largest(inv.clone());
    let a = (p * &b - BigInt::one()).div_floor(q);
    let d = largest((q - &inv).mod_floor(q));
    let c = (p * &d + BigInt::one()).div_floor(q);
    (Rational::new(a, b), Rational::new(c, d))
}

/// The unique `p/q` with `|y − p/q| <= eps` and `eps <= 1/q²`.
///
/// Returns `None` when no such rational exists, and also when two or more
/// rationals are admissible (which happens when `eps` is large, e.g.
/// `y = 1/4, eps = 1/4` admits both 0 and 1/2).
pub fn best_rational_within(y: f64, eps: f64) -> Option<Rational> {
    if !(eps > 0.0) {
        return None;
    }
    let x = decimal_rational(y)?;
    let e = decimal_rational(eps)?;
    let slack = decimal_rational(COMPARISON_SLACK)?;
    let lo = &x - &e - &slack;
    let hi = &x + &e + &slack;
    let big_q = max_admissible_denominator(&e);
    if big_q.is_zero() {
        return None;
    }
    let cand = simplest_between(&lo, &hi);
    if cand.denom() > &big_q {
        return None;
    }
    let (left, right) = farey_neighbours(&cand, &big_q);
    let inside = |r: &Rational| r >= &lo && r <= &hi;
    if inside(&left) || inside(&right) {
        return None;
    }
    Some(cand)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterReport {
    pub name: String,
    pub value: f64,
    /// `p/q`, or `None` if no admissible rational was found.
    pub rational: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactifyReport {
    pub n: usize,
    pub eps: f64,
    pub complete: bool,
    pub parameters: Vec<ParameterReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exactification {
    /// Rational when every parameter was recovered, floating otherwise (with
    /// recovered parameters replaced by their rationals' values).
    pub automaton: AnyAutomaton,
    pub report: ExactifyReport,
}

/// `n^{-1/4}`.
pub fn exactify_tolerance(n: usize) -> f64 {
    1.0 / (n as f64).sqrt().sqrt()
}

/// Rounds every parameter of `a` to `best_rational_within(α, n^{-1/4})`.
pub fn exactify_ma(a: &MultiplicityAutomaton<f64>, n: usize) -> Result<Exactification> {
    if n == 0 {
        return Err(Error::InvalidArgument("exactification needs n >= 1".into()));
    }
    let eps = exactify_tolerance(n);
    let mut parameters = Vec::new();
    let mut round = |name: String, value: f64| -> Option<Rational> {
        let r = best_rational_within(value, eps);
        parameters.push(ParameterReport { name, value, rational: r.as_ref().map(|r| format!("{}/{}", r.numer(), r.denom())) });
        r
    };
    let iota: Vec<Option<Rational>> = a.iota().iter().enumerate().map(|(q, &v)| round(format!("iota[{q}]"), v)).collect();
    let tau: Vec<Option<Rational>> = a.tau().iter().enumerate().map(|(q, &v)| round(format!("tau[{q}]"), v)).collect();
    let letters: Vec<Vec<Vec<Option<Rational>>>> = (0..a.alphabet().len())
        .map(|x| {
            let name = a.alphabet().name(x).to_string();
            (0..a.n())
                .map(|i| (0..a.n()).map(|j| round(format!("phi[{name}][{i}][{j}]"), *a.transition(i, x, j))).collect())
                .collect()
        })
        .collect();
    let complete = parameters.iter().all(|p| p.rational.is_some());
    let report = ExactifyReport { n, eps, complete, parameters };

    let automaton = if complete {
        let un = |v: Vec<Option<Rational>>| v.into_iter().map(|r| r.expect("complete")).collect::<Vec<_>>();
        let mats = letters.into_iter().map(|m| Matrix::from_rows(m.into_iter().map(un).collect())).collect();
        let mut exact = MultiplicityAutomaton::new(a.alphabet().clone(), un(iota), un(tau), mats)?;
        if let Some(l) = a.labels() {
            exact = exact.with_labels(l.to_vec())?;
        }
        AnyAutomaton::Rational(exact)
    } else {
        let pick = |r: &Option<Rational>, v: f64| r.as_ref().map_or(v, |r| r.to_f64());
        let iota_f = iota.iter().zip(a.iota()).map(|(r, &v)| pick(r, v)).collect();
        let tau_f = tau.iter().zip(a.tau()).map(|(r, &v)| pick(r, v)).collect();
        let mats = letters
            .iter()
            .enumerate()
            .map(|(x, m)| {
                Matrix::from_rows(
                    m.iter()
                        .enumerate()
                        .map(|(i, row)| row.iter().enumerate().map(|(j, r)| pick(r, *a.transition(i, x, j))).collect())
                        .collect(),
                )
            })
            .collect();
        let mut partial = MultiplicityAutomaton::new(a.alphabet().clone(), iota_f, tau_f, mats)?;
        if let Some(l) = a.labels() {
            partial = partial.with_labels(l.to_vec())?;
        }
        AnyAutomaton::Float(partial)
    };
    Ok(Exactification { automaton, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::from_ratio(p, q)
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(decimal_rational(0.1), Some(r(1, 10)));
        assert_eq!(decimal_rational(-2.5), Some(r(-5, 2)));
        assert_eq!(decimal_rational(1e-5), Some(r(1, 100_000)));
        assert_eq!(decimal_rational(1.5e3), Some(r(1500, 1)));
        assert_eq!(decimal_rational(0.0), Some(r(0, 1)));
        assert_eq!(decimal_rational(f64::NAN), None);
    }

    #[test]
    fn convergent_sequences() {
        assert_eq!(convergents(0.5, 10), vec![r(0, 1), r(1, 2)]);
        let pi = convergents(std::f64::consts::PI, 10);
        assert_eq!(&pi[..4], &[r(3, 1), r(22, 7), r(333, 106), r(355, 113)]);
        let two_sevenths = convergents(2.0 / 7.0, 20);
        assert!(two_sevenths.contains(&r(2, 7)));
        assert_eq!(convergents(std::f64::consts::PI, 2).len(), 2);
        // Denominators increase strictly after q0 = q1 = 1 (e = [2; 1, 2, ...])
        // and convergents alternate around y.
        let y = std::f64::consts::E;
        let cs = convergents(y, 12);
        assert_eq!(&cs[..2], &[r(2, 1), r(3, 1)]);
        for w in cs[1..].windows(2) {
            assert!(w[0].denom() < w[1].denom());
        }
        for w in cs.windows(2) {
            assert!((w[0].to_f64() - y) * (w[1].to_f64() - y) <= 0.0);
        }
    }

    #[test]
    fn known_recoveries() {
        assert_eq!(best_rational_within(0.5, 0.25), Some(r(1, 2)));
        assert_eq!(best_rational_within(0.3332, 0.001), Some(r(1, 3)));
        assert_eq!(best_rational_within(0.285714, 1e-5), Some(r(2, 7)));
        assert_eq!(best_rational_within(0.337, 0.1), Some(r(1, 3)));
        assert_eq!(best_rational_within(3.14159292, 1e-5), Some(r(355, 113)));
        assert_eq!(best_rational_within(-0.5, 0.25), Some(r(-1, 2)));
        assert_eq!(best_rational_within(0.0, 0.01), Some(r(0, 1)));
    }

    #[test]
    fn absent_and_ambiguous() {
        // 1/10 needs eps <= 1/100.
        assert_eq!(best_rational_within(0.1, 0.0178), None);
        // 0 and 1/2 are both admissible.
        assert_eq!(best_rational_within(0.25, 0.25), None);
        assert_eq!(best_rational_within(0.5, 2.0), None);
        assert_eq!(best_rational_within(0.5, 0.0), None);
    }

    #[test]
    fn farey_neighbours_are_adjacent() {
        let q5 = BigInt::from(5);
        assert_eq!(farey_neighbours(&r(1, 3), &q5), (r(1, 4), r(2, 5)));
        assert_eq!(farey_neighbours(&r(1, 1), &q5), (r(4, 5), r(6, 5)));
        assert_eq!(farey_neighbours(&r(2, 5), &q5), (r(1, 3), r(1, 2)));
    }

    #[test]
    fn exactify_half_loop_estimate() {
        let mut a = fixtures::half_loop::<f64>();
        a = MultiplicityAutomaton::new(
            a.alphabet().clone(),
            vec![1.0],
            vec![0.4982],
            vec![Matrix::from_rows(vec![vec![0.5018]])],
        )
        .unwrap()
        .with_labels(a.labels().unwrap().to_vec())
        .unwrap();
        let e = exactify_ma(&a, 100_000).unwrap();
        assert!(e.report.complete);
        assert_eq!(e.automaton, AnyAutomaton::Rational(fixtures::half_loop::<Rational>()));
    }

    #[test]
    fn exactify_zero_one_parameters_unchanged() {
        let d = fixtures::dirac::<f64>();
        let e = exactify_ma(&d, 7).unwrap();
        assert!(e.report.complete);
        assert_eq!(e.automaton, AnyAutomaton::Rational(fixtures::dirac::<Rational>()));
    }

    #[test]
    fn exactify_reports_failures() {
        let p = fixtures::two_state_pda::<f64>();
        let e = exactify_ma(&p, 100_000).unwrap();
        assert!(!e.report.complete);
        let failed: Vec<&str> = e
            .report
            .parameters
            .iter()
            .filter(|p| p.rational.is_none())
            .map(|p| p.name.as_str())
            .collect();
        assert_eq!(failed, vec!["tau[1]", "phi[a][1][1]"]);
        let AnyAutomaton::Float(f) = e.automaton else { panic!("partial result stays floating") };
        assert_eq!(f.tau()[1], 0.9);
        assert!(exactify_ma(&p, 0).is_err());
    }

    fn oracle_admissible(y: f64, eps: f64) -> Vec<Rational> {
        let x = decimal_rational(y).unwrap();
        let e = decimal_rational(eps).unwrap();
        let slack = decimal_rational(COMPARISON_SLACK).unwrap();
        let q_max = (1.0 / eps.sqrt()).ceil() as i64;
        let mut out = Vec::new();
        for q in 1..=q_max {
            let qr = r(q, 1);
            if &e * &qr * &qr > r(1, 1) {
                continue;
            }
            let centre = (y * q as f64).round() as i64;
            for p in centre - 2..=centre + 2 {
                let c = r(p, q);
                if c.denom() == &BigInt::from(q) && Signed::abs(&(&x - &c)) <= &e + &slack {
                    out.push(c);
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn returned_rational_is_unique(y in -2.0f64..2.0, exp in -6.0f64..-0.5) {
            let eps = 10f64.powf(exp);
            let oracle = oracle_admissible(y, eps);
            match best_rational_within(y, eps) {
                Some(c) => prop_assert_eq!(oracle, vec![c]),
                None => prop_assert!(oracle.len() != 1, "missed unique {:?}", oracle),
            }
        }
    }
}
