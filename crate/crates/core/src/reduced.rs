//! Prefixial reduced representation of the stochastic language computed by
//! an automaton.
//!
//! States are the length-lex-first words whose residual languages are
//! linearly independent. Residual independence is decided on the vectors
//! `(u⁻¹P(wΣ*))_{w ∈ Σ^{≤d}}`; for an `n`-state automaton `d = n − 1`
//! already separates residuals, and `d` is never taken below 4.
//!
//! A residual is formed wherever `r(uΣ*) ≠ 0`. For a stochastic language
//! that is exactly the set of words with positive prefix mass; for a signed
//! series of total mass 1 it still yields an automaton computing the series.

use std::collections::BTreeSet;

use crate::analysis::{suffix_masses, tail_sum};
use crate::automaton::MultiplicityAutomaton;
use crate::error::{Error, Result};
use crate::linalg::{dot, solve_combination, Matrix};
use crate::weight::{Weight, WeightMode, RANK_THRESHOLD};
use crate::word::Word;

/// Total-mass tolerance for floating-point inputs.
pub const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedRepresentation<W> {
    pub automaton: MultiplicityAutomaton<W>,
    /// `σ_max / σ_min` of the residual matrix of the chosen states.
    pub condition: f64,
    pub test_depth: usize,
}

pub fn test_depth(n: usize) -> usize {
    n.saturating_sub(1).max(4)
}

struct State<W> {
    forward: Vec<W>,
    mass: W,
    residual: Vec<W>,
}

pub fn prefixial_reduced_representation<W: Weight>(a: &MultiplicityAutomaton<W>) -> Result<ReducedRepresentation<W>> {
    let total = tail_sum(a, 0)?;
    let unit = match W::MODE {
        WeightMode::Rational => total == W::one(),
        WeightMode::Float => (total.to_f64() - 1.0).abs() <= MASS_TOLERANCE,
    };
    if !unit {
        return Err(Error::InvalidArgument(format!(
            "series total mass is {}, not 1",
            total.to_f64()
        )));
    }
    let s = suffix_masses(a)?;
    let depth = test_depth(a.n());
    let tests = a.alphabet().ball(depth);
    let sigma = a.alphabet().len();

    let state = |forward: Vec<W>| -> Option<State<W>> {
        let mass = dot(&forward, &s);
        if mass.is_negligible() {
            return None;
        }
        let residual = tests
            .iter()
            .map(|w| dot(&a.transport(forward.clone(), w), &s) / mass.clone())
            .collect();
        Some(State { forward, mass, residual })
    };

    let mut labels = vec![Word::empty()];
    let mut states = vec![state(a.iota().to_vec()).expect("total mass is 1")];
    let mut edges: Vec<(usize, usize, usize, W)> = Vec::new();
    let mut frontier: BTreeSet<(Word, usize)> = (0..sigma).map(|x| (Word(vec![x]), 0)).collect();

    while let Some((v, from)) = frontier.pop_first() {
        let x = *v.symbols().last().expect("frontier words are nonempty");
        let Some(cand) = state(a.transport(states[from].forward.clone(), &Word(vec![x]))) else {
            continue;
        };
        let ratio = cand.mass.clone() / states[from].mass.clone();
        let mut rows: Vec<Vec<W>> = states.iter().map(|q| q.residual.clone()).collect();
        rows.push(cand.residual.clone());
        if W::rank(&rows) > states.len() {
            let id = states.len();
            for y in 0..sigma {
                frontier.insert((v.child(y), id));
            }
            labels.push(v);
            states.push(cand);
            edges.push((from, x, id, ratio));
        } else {
            rows.pop();
            let Some((alpha, _)) = solve_combination(&rows, &cand.residual) else {
                return Err(Error::Numerical(format!(
                    "residual space is rank deficient (condition number {:.3e})",
                    condition(&rows)
                )));
            };
            for (w, coef) in alpha.into_iter().enumerate() {
                if !coef.is_zero() {
                    edges.push((from, x, w, coef * ratio.clone()));
                }
            }
        }
    }

    let rows: Vec<Vec<W>> = states.iter().map(|q| q.residual.clone()).collect();
    let cond = condition(&rows);
    if W::MODE == WeightMode::Float && cond > 1.0 / RANK_THRESHOLD {
        return Err(Error::Numerical(format!("residual basis is ill-conditioned (condition number {cond:.3e})")));
    }
    let n = states.len();
    let mut letters = vec![Matrix::<W>::zeros(n, n); sigma];
    for (i, x, j, w) in edges {
        letters[x].set(i, j, w);
    }
    let mut iota = vec![W::zero(); n];
    iota[0] = W::one();
    let tau = states
        .iter()
        .map(|q| dot(&q.forward, a.tau()) / q.mass.clone())
        .collect();
    let automaton = MultiplicityAutomaton::new(a.alphabet().clone(), iota, tau, letters)?.with_labels(labels)?;
    Ok(ReducedRepresentation { automaton, condition: cond, test_depth: depth })
}

fn condition<W: Weight>(rows: &[Vec<W>]) -> f64 {
    if rows.is_empty() || rows[0].is_empty() {
        return 1.0;
    }
    let m = nalgebra::DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j].to_f64());
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
