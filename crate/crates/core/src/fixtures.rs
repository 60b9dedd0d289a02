//! Named reference automata.

use rand::Rng;

use crate::automaton::{AnyAutomaton, MultiplicityAutomaton};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::sampling::seeded_rng;
use crate::weight::{Rational, Weight};
use crate::word::{Alphabet, Word};

fn unary<W: Weight>(iota: Vec<W>, tau: Vec<W>, m: Vec<Vec<W>>, labels: Vec<Word>) -> MultiplicityAutomaton<W> {
    MultiplicityAutomaton::new(Alphabet::unary(), iota, tau, vec![Matrix::from_rows(m)])
        .and_then(|a| a.with_labels(labels))
        .expect("fixture dimensions are consistent")
}

/// The Dirac language on ε: one state, `τ = 1`, no transitions.
pub fn dirac<W: Weight>() -> MultiplicityAutomaton<W> {
    unary(vec![W::one()], vec![W::one()], vec![vec![W::zero()]], vec![Word::empty()])
}

/// One state with `τ = 1/2` and an `a`-loop of weight `1/2`: `r(aⁿ) = 2^-(n+1)`.
pub fn half_loop<W: Weight>() -> MultiplicityAutomaton<W> {
    let h = W::from_ratio(1, 2);
    unary(vec![W::one()], vec![h.clone()], vec![vec![h]], vec![Word::empty()])
}

/// Two-state deterministic PA over `{a}`: stop with 0.2 or read `a` (0.8)
/// into a state that stops with 0.9 or loops on `a` with 0.1.
pub fn two_state_pda<W: Weight>() -> MultiplicityAutomaton<W> {
    let f = W::from_ratio;
    unary(
        vec![W::one(), W::zero()],
        vec![f(1, 5), f(9, 10)],
        vec![vec![W::zero(), f(4, 5)], vec![W::zero(), f(1, 10)]],
        vec![Word::empty(), Word(vec![0])],
    )
}

/// The three-state unary automaton `A_α`: a rotation by `α` scaled by 1/2 on
/// states `q0, q1`, a 1/2 self-loop on `q2`, all terminal weights 1 and
/// initial weights `λ`.
///
/// Its state series are `r_q0(aⁿ) = (cos nα − sin nα)/2ⁿ`,
/// `r_q1(aⁿ) = (cos nα + sin nα)/2ⁿ` and `r_q2(aⁿ) = 2⁻ⁿ`.
pub fn a_alpha(alpha: f64, lambda: [f64; 3]) -> MultiplicityAutomaton<f64> {
    let (s, c) = alpha.sin_cos();
    MultiplicityAutomaton::new(
        Alphabet::unary(),
        lambda.to_vec(),
        vec![1.0; 3],
        vec![Matrix::from_rows(vec![
            vec![0.5 * c, -0.5 * s, 0.0],
            vec![0.5 * s, 0.5 * c, 0.0],
            vec![0.0, 0.0, 0.5],
        ])],
    )
    .expect("fixture dimensions are consistent")
}

/// Closed form of `Σₙ r_q0(aⁿ)` for `A_α`.
pub fn a_alpha_sigma0(alpha: f64) -> f64 {
    (4.0 - 2.0 * alpha.cos() - 2.0 * alpha.sin()) / (5.0 - 4.0 * alpha.cos())
}

/// Closed form of `Σₙ r_q1(aⁿ)` for `A_α`.
pub fn a_alpha_sigma1(alpha: f64) -> f64 {
    (4.0 - 2.0 * alpha.cos() + 2.0 * alpha.sin()) / (5.0 - 4.0 * alpha.cos())
}

fn alphabet_of_size(sigma: usize) -> Alphabet {
    Alphabet::new((0..sigma).map(|i| ((b'a' + i as u8) as char).to_string())).expect("distinct letters")
}

/// A seeded random PA with `n` states over the first `sigma` letters of
/// `a, b, c, …`. Every state stops with positive probability, so the
/// letter-summed matrix has row sums below 1 and `ρ(M) < 1`.
pub fn random_pa(seed: u64, n: usize, sigma: usize) -> MultiplicityAutomaton<Rational> {
    assert!(n >= 1 && (1..=26).contains(&sigma));
    let mut rng = seeded_rng(seed, 0);
    let mut iota: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
    iota[0] += 1;
    let iota_sum: i64 = iota.iter().sum();
    let mut tau = Vec::with_capacity(n);
    let mut letters = vec![Matrix::<Rational>::zeros(n, n); sigma];
    for q in 0..n {
        let stop: i64 = rng.gen_range(1..=4);
        let out: Vec<i64> = (0..sigma * n).map(|_| rng.gen_range(0..=3)).collect();
        let total = stop + out.iter().sum::<i64>();
        tau.push(Rational::from_ratio(stop, total));
        for (k, &w) in out.iter().enumerate() {
            letters[k / n].set(q, k % n, Rational::from_ratio(w, total));
        }
    }
    let iota = iota.into_iter().map(|w| Rational::from_ratio(w, iota_sum)).collect();
    MultiplicityAutomaton::new(alphabet_of_size(sigma), iota, tau, letters).expect("dimensions are consistent")
}

/// A seeded random signed MA with entries `p/q`, `|p| <= 3`, `1 <= q <= 4`.
pub fn random_ma(seed: u64, n: usize, sigma: usize) -> MultiplicityAutomaton<Rational> {
    assert!(n >= 1 && (1..=26).contains(&sigma));
    let mut rng = seeded_rng(seed, 0);
    let mut entry = || Rational::from_ratio(rng.gen_range(-3..=3), rng.gen_range(1..=4));
    let iota = (0..n).map(|_| entry()).collect();
    let tau = (0..n).map(|_| entry()).collect();
    let letters = (0..sigma)
        .map(|_| Matrix::from_rows((0..n).map(|_| (0..n).map(|_| entry()).collect()).collect()))
        .collect();
    MultiplicityAutomaton::new(alphabet_of_size(sigma), iota, tau, letters).expect("dimensions are consistent")
}

/// Looks up a fixture by name: `dirac`, `half_loop`, `two_state_pda` (exact)
/// or `a_alpha(α;λ0,λ1,λ2)` (floating), where `α` may be written with `pi`,
/// e.g. `a_alpha(pi/6;1,0,1)`.
pub fn fixture(name: &str) -> Result<AnyAutomaton> {
    let name = name.trim();
    match name {
        "dirac" => return Ok(AnyAutomaton::Rational(dirac::<Rational>())),
        "half_loop" => return Ok(AnyAutomaton::Rational(half_loop::<Rational>())),
        "two_state_pda" => return Ok(AnyAutomaton::Rational(two_state_pda::<Rational>())),
        _ => {}
    }
    let unknown = || Error::UnknownFixture(name.to_string());
    let args = name
        .strip_prefix("a_alpha(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(unknown)?;
    let (alpha, lambdas) = args.split_once(';').ok_or_else(unknown)?;
    let alpha = parse_angle(alpha).ok_or_else(unknown)?;
    let lambdas: Vec<f64> = lambdas
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| unknown())?;
    let lambda: [f64; 3] = lambdas.try_into().map_err(|_| unknown())?;
    Ok(AnyAutomaton::Float(a_alpha(alpha, lambda)))
}

/// Parses `1.5`, `pi`, `pi/6`, `2pi/3`, `2*pi/3`.
fn parse_angle(text: &str) -> Option<f64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(pos) = t.find("pi") else {
        return t.parse().ok();
    };
    let coef = t[..pos].trim_end_matches('*');
    let coef: f64 = if coef.is_empty() { 1.0 } else if coef == "-" { -1.0 } else { coef.parse().ok()? };
    let rest = &t[pos + 2..];
    let div: f64 = if rest.is_empty() { 1.0 } else { rest.strip_prefix('/')?.parse().ok()? };
    Some(coef * std::f64::consts::PI / div)
}
