//! Multiplicity automata: representation, evaluation, trimming and the
//! probabilistic-automaton check.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::weight::{Rational, Weight, WeightMode};
use crate::word::{Alphabet, Symbol, Word};

/// Tolerance on the per-state mass identity for floating automata.
pub const PA_TOLERANCE: f64 = 1e-9;

/// A multiplicity automaton `⟨Σ, Q, φ, ι, τ⟩` with dense letter matrices.
///
/// `letter(x)[i][j]` is the weight of the transition `q_i --x--> q_j`.
/// States may carry word labels (the prefixial set of a learned or reduced
/// representation).
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityAutomaton<W> {
    alphabet: Alphabet,
    iota: Vec<W>,
    tau: Vec<W>,
    letters: Vec<Matrix<W>>,
    labels: Option<Vec<Word>>,
}

/// Outcome of [`MultiplicityAutomaton::pa_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct PaReport {
    pub is_pa: bool,
    pub violations: Vec<String>,
}

/// Outcome of [`MultiplicityAutomaton::trim`].
#[derive(Debug, Clone)]
pub struct Trimmed<W> {
    pub automaton: MultiplicityAutomaton<W>,
    /// Indices (in the input automaton) of removed states.
    pub removed: Vec<usize>,
}

impl<W> Trimmed<W> {
    /// True when every state was removed and the result computes the zero series.
    pub fn is_zero_series(&self) -> bool {
        self.automaton.iota.is_empty()
    }
}

impl<W: Weight> MultiplicityAutomaton<W> {
    pub fn new(
        alphabet: Alphabet,
        iota: Vec<W>,
        tau: Vec<W>,
        letters: Vec<Matrix<W>>,
    ) -> Result<Self> {
        let n = iota.len();
        if tau.len() != n {
            return Err(Error::InvalidArgument(format!(
                "iota has {n} entries but tau has {}",
                tau.len()
            )));
        }
        if letters.len() != alphabet.len() {
            return Err(Error::InvalidArgument(format!(
                "{} letter matrices for an alphabet of {} symbols",
                letters.len(),
                alphabet.len()
            )));
        }
        for (x, m) in letters.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(Error::InvalidArgument(format!(
                    "matrix for `{}` is {}x{}, expected {n}x{n}",
                    alphabet.name(x),
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(MultiplicityAutomaton { alphabet, iota, tau, letters, labels: None })
    }

    /// Attaches state labels; one word per state.
    pub fn with_labels(mut self, labels: Vec<Word>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} states",
                labels.len(),
                self.n()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_iota(mut self, iota: Vec<W>) -> Result<Self> {
        if iota.len() != self.n() {
            return Err(Error::InvalidArgument("iota length mismatch".into()));
        }
        self.iota = iota;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.iota.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn iota(&self) -> &[W] {
        &self.iota
    }

    pub fn tau(&self) -> &[W] {
        &self.tau
    }

    pub fn letter(&self, x: Symbol) -> &Matrix<W> {
        &self.letters[x]
    }

    pub fn letters(&self) -> &[Matrix<W>] {
        &self.letters
    }

    pub fn labels(&self) -> Option<&[Word]> {
        self.labels.as_deref()
    }

    pub fn mode(&self) -> WeightMode {
        W::MODE
    }

    /// `φ(q_i, x, q_j)`.
    pub fn transition(&self, i: usize, x: Symbol, j: usize) -> &W {
        self.letters[x].get(i, j)
    }

    /// `M = Σ_x M_x`, the letter-summed transition matrix.
    pub fn letter_sum(&self) -> Matrix<W> {
        let n = self.n();
        self.letters.iter().fold(Matrix::zeros(n, n), |acc, m| acc.add(m))
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        match w.symbols().iter().find(|&&x| x >= self.alphabet.len()) {
            Some(&x) => Err(Error::UnknownSymbol(format!("#{x}"))),
            None => Ok(()),
        }
    }

    /// `ι · M_{x1} ⋯ M_{xk}` for `w = x1⋯xk`.
    pub fn forward(&self, w: &Word) -> Result<Vec<W>> {
        self.check_word(w)?;
        Ok(self.transport(self.iota.clone(), w))
    }

    /// Row vector `v · M_w`, without validation.
    pub(crate) fn transport(&self, v: Vec<W>, w: &Word) -> Vec<W> {
        w.symbols().iter().fold(v, |acc, &x| self.letters[x].left_mul(&acc))
    }

    /// `r_A(w) = ι · M_w · τ`.
    pub fn word_weight(&self, w: &Word) -> Result<W> {
        Ok(dot(&self.forward(w)?, &self.tau))
    }

    /// `r_{A,q}(w)`: the weight of `w` read from state `q`.
    pub fn state_word_weight(&self, q: usize, w: &Word) -> Result<W> {
        if q >= self.n() {
            return Err(Error::StateOutOfRange { index: q, n: self.n() });
        }
        self.check_word(w)?;
        Ok(dot(&self.transport(basis(self.n(), q), w), &self.tau))
    }

    /// Converts every weight with `f`, keeping structure and labels.
    pub fn map_weights<V: Weight>(&self, f: impl Fn(&W) -> V) -> MultiplicityAutomaton<V> {
        MultiplicityAutomaton {
            alphabet: self.alphabet.clone(),
            iota: self.iota.iter().map(&f).collect(),
            tau: self.tau.iter().map(&f).collect(),
            letters: self.letters.iter().map(|m| m.map(&f)).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn to_float(&self) -> MultiplicityAutomaton<f64> {
        self.map_weights(|w| w.to_f64())
    }

    /// Checks the probabilistic-automaton conditions: weights in `[0,1]`,
    /// `Σ ι = 1`, and `τ(q) + φ(q,Σ,Q) = 1` for every state. Exact in
    /// rational mode, within [`PA_TOLERANCE`] in floating mode.
    pub fn pa_check(&self) -> PaReport {
        let tol = match W::MODE {
            WeightMode::Rational => 0.0,
            WeightMode::Float => PA_TOLERANCE,
        };
        let in_unit = |w: &W| {
            let v = w.to_f64();
            match W::MODE {
                WeightMode::Rational => *w >= W::zero() && *w <= W::one(),
                WeightMode::Float => v >= -tol && v <= 1.0 + tol,
            }
        };
        let is_one = |w: &W| match W::MODE {
            WeightMode::Rational => w.is_one(),
            WeightMode::Float => (w.to_f64() - 1.0).abs() <= tol,
        };
        let mut violations = Vec::new();
        let name = |q: usize| match &self.labels {
            Some(l) => format!("q{q} ({})", self.alphabet.format_word(&l[q])),
            None => format!("q{q}"),
        };
        let iota_sum = self.iota.iter().fold(W::zero(), |a, b| a + b.clone());
        if !is_one(&iota_sum) {
            violations.push(format!("initial weights sum to {}", iota_sum.to_f64()));
        }
        for q in 0..self.n() {
            let mut bad_range = !in_unit(&self.iota[q]) || !in_unit(&self.tau[q]);
            let mut out = self.tau[q].clone();
            for m in &self.letters {
                for w in m.row(q) {
                    bad_range |= !in_unit(w);
                    out = out + w.clone();
                }
            }
            if bad_range {
                violations.push(format!("{}: weight outside [0,1]", name(q)));
            }
            if !is_one(&out) {
                violations.push(format!("{}: out-mass τ+φ(q,Σ,Q) = {}", name(q), out.to_f64()));
            }
        }
        PaReport { is_pa: violations.is_empty(), violations }
    }

    pub fn is_pa(&self) -> bool {
        self.pa_check().is_pa
    }

    /// Removes states that are not both accessible and co-accessible in the
    /// support NFA. The series is unchanged.
    pub fn trim(&self) -> Trimmed<W> {
        let n = self.n();
        let edge = |i: usize, j: usize| self.letters.iter().any(|m| !m.get(i, j).is_zero());
        let reach = |start: Vec<usize>, forward: bool| {
            let mut seen = vec![false; n];
            let mut queue: VecDeque<usize> = start.into_iter().collect();
            for &q in &queue {
                seen[q] = true;
            }
            while let Some(q) = queue.pop_front() {
                for r in 0..n {
                    let linked = if forward { edge(q, r) } else { edge(r, q) };
                    if linked && !seen[r] {
                        seen[r] = true;
                        queue.push_back(r);
                    }
                }
            }
            seen
        };
        let initial: Vec<usize> = (0..n).filter(|&q| !self.iota[q].is_zero()).collect();
        let terminal: Vec<usize> = (0..n).filter(|&q| !self.tau[q].is_zero()).collect();
        let acc = reach(initial, true);
        let coacc = reach(terminal, false);
        let keep: Vec<usize> = (0..n).filter(|&q| acc[q] && coacc[q]).collect();
        let removed: Vec<usize> = (0..n).filter(|&q| !(acc[q] && coacc[q])).collect();
        let sub = |v: &[W]| keep.iter().map(|&q| v[q].clone()).collect::<Vec<_>>();
        let letters = self
            .letters
            .iter()
            .map(|m| {
                Matrix::from_rows(
                    keep.iter()
                        .map(|&i| keep.iter().map(|&j| m.get(i, j).clone()).collect())
                        .collect(),
                )
            })
            .collect();
        let automaton = MultiplicityAutomaton {
            alphabet: self.alphabet.clone(),
            iota: sub(&self.iota),
            tau: sub(&self.tau),
            letters,
            labels: self
                .labels
                .as_ref()
                .map(|l| keep.iter().map(|&q| l[q].clone()).collect()),
        };
        Trimmed { automaton, removed }
    }

    /// Number of transitions with a nonzero weight.
    pub fn transition_count(&self) -> usize {
        self.letters
            .iter()
            .map(|m| m.entries().filter(|w| !w.is_zero()).count())
            .sum()
    }
}

pub(crate) fn basis<W: Weight>(n: usize, q: usize) -> Vec<W> {
    (0..n).map(|i| if i == q { W::one() } else { W::zero() }).collect()
}

/// An automaton in either weight mode, as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyAutomaton {
    Rational(MultiplicityAutomaton<Rational>),
    Float(MultiplicityAutomaton<f64>),
}

impl AnyAutomaton {
    pub fn to_float(&self) -> MultiplicityAutomaton<f64> {
        match self {
            AnyAutomaton::Rational(a) => a.to_float(),
            AnyAutomaton::Float(a) => a.clone(),
        }
    }

    pub fn mode(&self) -> WeightMode {
        match self {
            AnyAutomaton::Rational(_) => WeightMode::Rational,
            AnyAutomaton::Float(_) => WeightMode::Float,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnyAutomaton::Rational(a) => a.n(),
            AnyAutomaton::Float(a) => a.n(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            AnyAutomaton::Rational(a) => a.alphabet(),
            AnyAutomaton::Float(a) => a.alphabet(),
        }
    }

    /// Converts to the requested mode; floating automata cannot become exact.
    pub fn into_mode(self, mode: WeightMode) -> Result<AnyAutomaton> {
        match (self, mode) {
            (a @ AnyAutomaton::Rational(_), WeightMode::Rational) => Ok(a),
            (a @ AnyAutomaton::Float(_), WeightMode::Float) => Ok(a),
            (AnyAutomaton::Rational(a), WeightMode::Float) => Ok(AnyAutomaton::Float(a.to_float())),
            (AnyAutomaton::Float(_), WeightMode::Rational) => Err(Error::InvalidArgument(
                "a floating automaton cannot be converted to rational mode; use exactify".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::from_ratio(p, q)
    }

    fn half_loop() -> MultiplicityAutomaton<Rational> {
        MultiplicityAutomaton::new(
            Alphabet::unary(),
            vec![r(1, 1)],
            vec![r(1, 2)],
            vec![Matrix::from_rows(vec![vec![r(1, 2)]])],
        )
        .unwrap()
    }

    #[test]
    fn geometric_word_weight() {
        let h = half_loop();
        assert_eq!(h.word_weight(&Word(vec![0, 0])).unwrap(), r(1, 8));
        assert_eq!(h.state_word_weight(0, &Word::empty()).unwrap(), r(1, 2));
        assert!(matches!(h.state_word_weight(1, &Word::empty()), Err(Error::StateOutOfRange { .. })));
        assert!(matches!(h.word_weight(&Word(vec![1])), Err(Error::UnknownSymbol(_))));
    }

    #[test]
    fn pa_check_names_bad_state() {
        let h = half_loop();
        assert!(h.is_pa());
        let bad = MultiplicityAutomaton::new(
            Alphabet::unary(),
            vec![r(1, 1)],
            vec![r(3, 5)],
            vec![Matrix::from_rows(vec![vec![r(1, 2)]])],
        )
        .unwrap();
        let report = bad.pa_check();
        assert!(!report.is_pa);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].starts_with("q0"));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let err = MultiplicityAutomaton::new(
            Alphabet::unary(),
            vec![1.0, 0.0],
            vec![1.0],
            vec![Matrix::zeros(2, 2)],
        );
        assert!(err.is_err());
    }

    #[test]
    fn trim_drops_unreachable_and_dead_states() {
        // q0 -a-> q0 (1/2), q0 terminal; q1 unreachable; q2 reachable dead end.
        let m = Matrix::from_rows(vec![
            vec![0.5, 0.0, 0.25],
            vec![0.3, 0.2, 0.0],
            vec![0.0, 0.0, 0.1],
        ]);
        let a = MultiplicityAutomaton::new(
            Alphabet::unary(),
            vec![1.0, 0.0, 0.0],
            vec![0.5, 0.4, 0.0],
            vec![m],
        )
        .unwrap();
        let t = a.trim();
        assert_eq!(t.removed, vec![1, 2]);
        assert_eq!(t.automaton.n(), 1);
        for w in Alphabet::unary().ball(6) {
            assert_eq!(t.automaton.word_weight(&w).unwrap(), a.word_weight(&w).unwrap());
        }
        let again = t.automaton.trim();
        assert!(again.removed.is_empty());
        assert_eq!(again.automaton, t.automaton);
    }

    #[test]
    fn trim_everything_gives_zero_series() {
        let a = MultiplicityAutomaton::new(
            Alphabet::unary(),
            vec![1.0],
            vec![0.0],
            vec![Matrix::from_rows(vec![vec![0.5]])],
        )
        .unwrap();
        let t = a.trim();
        assert!(t.is_zero_series());
        assert_eq!(t.automaton.n(), 0);
        assert_eq!(t.automaton.word_weight(&Word(vec![0])).unwrap(), 0.0);
    }
}
