//! The DEES learner.
//!
//! States are prefixes of the sample, discovered in length-lexicographic
//! order. A frontier word `v = ux` either becomes a new state, when its
//! empirical residual is not within `ε` of any affine combination of the
//! residuals of the current states, or is wired as that combination.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::automaton::MultiplicityAutomaton;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lp::{self, LpStatus, LP_TOLERANCE};
use crate::sampling::Sample;
use crate::trie::EmpiricalTrie;
use crate::weight::{Weight, WeightMode};
use crate::word::Word;

/// Support threshold for floating-point transition weights.
pub const SUPPORT_TOLERANCE: f64 = 1e-6;

/// One inequation `|target − Σ_u coeffs[u]·x_u| <= ε`, indexed by a factor `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityRow {
    pub w: Word,
    /// `v⁻¹P_S(wΣ*)`.
    pub target: f64,
    /// `u⁻¹P_S(wΣ*)` for each variable `u`, in variable order.
    pub coeffs: Vec<f64>,
}

/// The inequation system over variables `{x_u : u ∈ Q}`, plus `Σ x_u = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilitySystem {
    pub variables: Vec<Word>,
    pub rows: Vec<FeasibilityRow>,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityOutcome {
    pub feasible: bool,
    /// Present iff `feasible`.
    pub solution: Option<Vec<f64>>,
    /// Smallest L∞ violation found over all rows.
    pub achieved_eps: f64,
    pub diagnostic: Option<String>,
}

/// Builds the system for frontier word `v` against states `q`, one row per
/// factor in the given (length-lex) order.
pub fn build_system(
    trie: &EmpiricalTrie,
    factors: &[Word],
    q: &[Word],
    v: &Word,
    eps: f64,
) -> Result<FeasibilitySystem> {
    let target = trie.residual_row(v, factors)?;
    let columns = q.iter().map(|u| trie.residual_row(u, factors)).collect::<Result<Vec<_>>>()?;
    Ok(assemble(q.to_vec(), factors, &target, &columns, eps))
}

fn assemble(variables: Vec<Word>, factors: &[Word], target: &[f64], columns: &[Vec<f64>], eps: f64) -> FeasibilitySystem {
    let rows = factors
        .iter()
        .enumerate()
        .map(|(i, w)| FeasibilityRow {
            w: w.clone(),
            target: target[i],
            coeffs: columns.iter().map(|c| c[i]).collect(),
        })
        .collect();
    FeasibilitySystem { variables, rows, eps }
}

fn violation(row: &FeasibilityRow, x: &[f64]) -> f64 {
    let fit: f64 = row.coeffs.iter().zip(x).map(|(c, x)| c * x).sum();
    (row.target - fit).abs()
}

/// Solves `min t s.t. |target_w − c_w·x| <= t, Σx = 1` and compares the
/// optimum with `ε`.
///
/// The LP is written around the start point `x0 = e_0` with `t0` its
/// violation, in variables `x = x0 + d⁺ − d⁻` and `t = t0 − z`, so every
/// inequality row has a nonnegative right-hand side and a slack basis. Rows
/// are added to the working set by violation until the relaxed optimum
/// satisfies every row (the relaxed optimum is then the full optimum).
pub fn solve_feasibility(sys: &FeasibilitySystem) -> FeasibilityOutcome {
    let k = sys.variables.len();
    if k == 0 {
        return FeasibilityOutcome {
            feasible: false,
            solution: None,
            achieved_eps: f64::INFINITY,
            diagnostic: Some("no variables: Σx = 1 is unsatisfiable".into()),
        };
    }
    // All-zero rows are satisfied by every x; identical rows are redundant.
    let mut seen = BTreeSet::new();
    let rows: Vec<&FeasibilityRow> = sys
        .rows
        .iter()
        .filter(|r| r.target != 0.0 || r.coeffs.iter().any(|&c| c != 0.0))
        .filter(|r| {
            let key: Vec<u64> = std::iter::once(r.target).chain(r.coeffs.iter().copied()).map(f64::to_bits).collect();
            seen.insert(key)
        })
        .collect();

    let mut x0 = vec![0.0; k];
    x0[0] = 1.0;
    let outcome = |x: Vec<f64>, diagnostic: Option<String>| {
        let achieved = rows.iter().map(|r| violation(r, &x)).fold(0.0, f64::max);
        let feasible = diagnostic.is_none() && achieved <= sys.eps + LP_TOLERANCE;
        FeasibilityOutcome { feasible, solution: feasible.then_some(x), achieved_eps: achieved, diagnostic }
    };
    if rows.is_empty() {
        return outcome(x0, None);
    }

    let residual: Vec<f64> = rows.iter().map(|r| r.target - r.coeffs[0]).collect();
    let t0 = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));

    let by_violation = |viol: &dyn Fn(usize) -> f64, exclude: &BTreeSet<usize>, limit: usize| {
        let mut idx: Vec<usize> = (0..rows.len()).filter(|i| !exclude.contains(i)).collect();
        idx.sort_by(|&a, &b| viol(b).total_cmp(&viol(a)).then(a.cmp(&b)));
        idx.truncate(limit);
        idx
    };
    let mut working: BTreeSet<usize> =
        by_violation(&|i| residual[i].abs(), &BTreeSet::new(), 2 * k + 2).into_iter().collect();

    loop {
        let (x, t) = match solve_working_set(&rows, &working, &residual, t0, k) {
            Ok(sol) => sol,
            Err(status) => {
                return outcome(x0, Some(format!("LP numerically degenerate ({status:?})")));
            }
        };
        let viol = |i: usize| violation(rows[i], &x);
        let worst = by_violation(&viol, &working, 16);
        let added: Vec<usize> = worst.into_iter().filter(|&i| viol(i) > t + LP_TOLERANCE).collect();
        if added.is_empty() {
            return outcome(x, None);
        }
        working.extend(added);
    }
}

fn solve_working_set(
    rows: &[&FeasibilityRow],
    working: &BTreeSet<usize>,
    residual: &[f64],
    t0: f64,
    k: usize,
) -> std::result::Result<(Vec<f64>, f64), LpStatus> {
    // Columns: d⁺ (k), d⁻ (k), z, then two slacks per working row.
    let m = working.len();
    let z = 2 * k;
    let width = 2 * k + 1 + 2 * m;
    let mut cost = vec![0.0; width];
    cost[z] = -1.0;
    let mut a = Vec::with_capacity(2 * m + 1);
    let mut b = Vec::with_capacity(2 * m + 1);
    for (slot, &i) in working.iter().enumerate() {
        let c = &rows[i].coeffs;
        // r − c·d <= t0 − z
        let mut lo = vec![0.0; width];
        // c·d − r <= t0 − z
        let mut hi = vec![0.0; width];
        for u in 0..k {
            lo[u] = -c[u];
            lo[k + u] = c[u];
            hi[u] = c[u];
            hi[k + u] = -c[u];
        }
        lo[z] = 1.0;
        hi[z] = 1.0;
        lo[z + 1 + 2 * slot] = 1.0;
        hi[z + 2 + 2 * slot] = 1.0;
        a.push(lo);
        b.push(t0 - residual[i]);
        a.push(hi);
        b.push(t0 + residual[i]);
    }
    let mut sum = vec![0.0; width];
    for u in 0..k {
        sum[u] = 1.0;
        sum[k + u] = -1.0;
    }
    a.push(sum);
    b.push(0.0);

    let res = lp::minimize(&cost, &a, &b);
    if res.status != LpStatus::Optimal {
        return Err(res.status);
    }
    let mut x: Vec<f64> = (0..k).map(|u| res.x[u] - res.x[k + u]).collect();
    x[0] += 1.0;
    Ok((x, t0 - res.x[z]))
}

/// `n^{-1/3}`, the default tolerance for a sample of size `n`.
pub fn epsilon_schedule(n: usize) -> f64 {
    1.0 / (n as f64).cbrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeesConfig {
    /// The tolerance is `|S|^eps_exponent`.
    pub eps_exponent: f64,
    /// Optional cap on factor length; `None` uses all of `fact(S)`.
    pub max_factor_len: Option<usize>,
}

impl Default for DeesConfig {
    fn default() -> Self {
        DeesConfig { eps_exponent: -1.0 / 3.0, max_factor_len: None }
    }
}

impl DeesConfig {
    pub fn epsilon(&self, n: usize) -> f64 {
        if self.eps_exponent == -1.0 / 3.0 {
            epsilon_schedule(n)
        } else {
            (n as f64).powf(self.eps_exponent)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    NewState,
    Combination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub state: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeesStep {
    pub step: usize,
    pub v: String,
    pub decision: Decision,
    pub achieved_eps: f64,
    /// The solution `α` for combinations; empty for new states.
    pub coefficients: Vec<Coefficient>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeesTrace {
    pub steps: Vec<DeesStep>,
}

impl DeesTrace {
    /// One JSON record per line.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s)?);
            out.push('\n');
        }
        Ok(out)
    }
}

/// Runs DEES on `sample`; the output is labeled by its states `Q`, with
/// `ι = e_ε`.
pub fn dees(sample: &Sample, config: &DeesConfig) -> Result<(MultiplicityAutomaton<f64>, DeesTrace)> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let trie = EmpiricalTrie::build(sample);
    let factors = trie.factors(config.max_factor_len);
    let eps = config.epsilon(sample.len());
    let alphabet = sample.alphabet();
    let pc = |u: &Word| trie.prefix_count(u) as f64;

    let mut states = vec![Word::empty()];
    let mut tau = vec![trie.end_count(&Word::empty()) as f64 / pc(&Word::empty())];
    let mut edges: Vec<(usize, usize, usize, f64)> = Vec::new();
    let mut index: HashMap<Word, usize> = HashMap::from([(Word::empty(), 0)]);
    let mut columns: Vec<Vec<f64>> = vec![trie.residual_row(&Word::empty(), &factors)?];
    let mut trace = DeesTrace::default();

    let extend = |frontier: &mut BTreeSet<Word>, v: &Word| {
        for x in 0..alphabet.len() {
            let vx = v.child(x);
            if trie.prefix_count(&vx) > 0 {
                frontier.insert(vx);
            }
        }
    };
    let mut frontier = BTreeSet::new();
    extend(&mut frontier, &Word::empty());

    while let Some(v) = frontier.pop_first() {
        let (u, x) = v.split_last().expect("frontier words are nonempty");
        let from = index[&u];
        let target = trie.residual_row(&v, &factors)?;
        let sys = assemble(states.clone(), &factors, &target, &columns, eps);
        let outcome = solve_feasibility(&sys);
        let step = trace.steps.len();
        let ratio = pc(&v) / pc(&u);
        match outcome.solution {
            None => {
                let id = states.len();
                states.push(v.clone());
                index.insert(v.clone(), id);
                tau.push(trie.end_count(&v) as f64 / pc(&v));
                edges.push((from, x, id, ratio));
                columns.push(target);
                extend(&mut frontier, &v);
                trace.steps.push(DeesStep {
                    step,
                    v: alphabet.format_word(&v),
                    decision: Decision::NewState,
                    achieved_eps: outcome.achieved_eps,
                    coefficients: Vec::new(),
                });
            }
            Some(alpha) => {
                for (w, &a) in alpha.iter().enumerate() {
                    if a != 0.0 {
                        edges.push((from, x, w, a * ratio));
                    }
                }
                trace.steps.push(DeesStep {
                    step,
                    v: alphabet.format_word(&v),
                    decision: Decision::Combination,
                    achieved_eps: outcome.achieved_eps,
                    coefficients: states
                        .iter()
                        .zip(&alpha)
                        .map(|(s, &value)| Coefficient { state: alphabet.format_word(s), value })
                        .collect(),
                });
            }
        }
    }

    let n = states.len();
    let mut letters = vec![Matrix::<f64>::zeros(n, n); alphabet.len()];
    for (i, x, j, w) in edges {
        letters[x].set(i, j, w);
    }
    let mut iota = vec![0.0; n];
    iota[0] = 1.0;
    let a = MultiplicityAutomaton::new(alphabet.clone(), iota, tau, letters)?.with_labels(states)?;
    Ok((a, trace))
}

fn in_support<W: Weight>(w: &W) -> bool {
    match W::MODE {
        WeightMode::Rational => !w.is_zero(),
        WeightMode::Float => w.to_f64().abs() > SUPPORT_TOLERANCE,
    }
}

/// True iff both automata have the same state labels and the same transition
/// support. Zero is exact in rational mode and `|φ| <= 1e-6` in float mode.
pub fn structure_agrees<W: Weight, V: Weight>(a: &MultiplicityAutomaton<W>, b: &MultiplicityAutomaton<V>) -> Result<bool> {
    let (Some(la), Some(lb)) = (a.labels(), b.labels()) else {
        return Err(Error::InvalidArgument("structure comparison needs state labels on both automata".into()));
    };
    if a.alphabet() != b.alphabet() {
        return Err(Error::InvalidArgument("structure comparison needs a shared alphabet".into()));
    }
    if la.len() != lb.len() {
        return Ok(false);
    }
    let pos: HashMap<&Word, usize> = lb.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let Some(perm) = la.iter().map(|w| pos.get(w).copied()).collect::<Option<Vec<_>>>() else {
        return Ok(false);
    };
    for x in 0..a.alphabet().len() {
        for i in 0..a.n() {
            for j in 0..a.n() {
                if in_support(a.transition(i, x, j)) != in_support(b.transition(perm[i], x, perm[j])) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
