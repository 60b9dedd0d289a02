//! Turning a signed series that converges absolutely to 1 into a stochastic
//! language `p_r`.
//!
//! `S` is the prefixial set grown from ε through children with
//! `r(uxΣ*) > 0`. At each `u ∈ S` the negative part
//! `r(N(u)) = Σ_{x: r(uxΣ*) <= 0} r(uxΣ*) + min(r(u), 0)` is cut away and the
//! rest is rescaled: `λ_ε = 1/(1 − r(N(ε)))` and
//! `λ_ux = λ_u · r(uxΣ*) / (r(uxΣ*) − r(N(ux)))`. Then `p_r(u) = λ_u r(u)`
//! for `u ∈ S` with `r(u) > 0`, and 0 elsewhere.
//!
//! In float mode a value counts as positive only above [`SIGN_TOLERANCE`]
//! times the absolute mass it is a signed sum of, so rounding noise never
//! flips a sign, and genuinely small masses deep in the tree are kept.
//!
//! Nodes are materialized lazily and memoized; the memo is the only mutable
//! state and sits behind a read-write lock.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rand::Rng;

use crate::analysis::{abs_suffix_masses, abs_tail_bound, absolute_convergence_certificate, suffix_masses, tail_sum, Certificate};
use crate::automaton::MultiplicityAutomaton;
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::sampling::{seeded_rng, Sample, MAX_WORD_LEN};
use crate::weight::{Weight, WeightMode};
use crate::word::Word;

/// Construction requires `|r(Σ*) − 1|` below this.
pub const TOTAL_MASS_TOLERANCE: f64 = 1e-6;

/// Relative noise floor for float signs.
pub const SIGN_TOLERANCE: f64 = 1e-12;

/// `v > 0`; for floats, `v > SIGN_TOLERANCE · scale` where `scale` bounds
/// the absolute values of the terms summed into `v`.
fn positive<W: Weight>(v: &W, scale: f64) -> bool {
    match W::MODE {
        WeightMode::Rational => v.is_strictly_positive(),
        WeightMode::Float => v.to_f64() > SIGN_TOLERANCE * scale,
    }
}

#[derive(Debug)]
struct Node<W> {
    forward: Vec<W>,
    /// Forward vector of the absolute automaton.
    abs_forward: Vec<f64>,
    /// `r(u)`.
    word: W,
    /// `r(uΣ*)`.
    prefix: W,
    /// `r(uxΣ*)` per letter.
    child_prefix: Vec<W>,
    word_positive: bool,
    child_positive: Vec<bool>,
    in_s: bool,
    /// `r(N(u))`; zero outside `S`.
    neg_mass: W,
    /// `λ_u`; zero outside `S`.
    lambda: W,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassSummary {
    /// `Σ_{u ∈ S, |u| <= depth} r(N(u))`, a truncation of `r(N)`.
    pub neg_total: f64,
    /// `Σ_{|u| <= depth} |r(u)|`.
    pub abs_mass_lower: f64,
    /// `abs_mass_lower` plus the certificate's tail bound beyond `depth`.
    pub abs_mass_upper: f64,
}

#[derive(Debug)]
pub struct NormalizedSeries<W> {
    base: MultiplicityAutomaton<W>,
    suffix: Vec<W>,
    abs_letters: Vec<Matrix<f64>>,
    abs_tau: Vec<f64>,
    abs_suffix: Vec<f64>,
    certificate: Certificate,
    memo: RwLock<HashMap<Word, Arc<Node<W>>>>,
}

impl<W: Weight> NormalizedSeries<W> {
    /// Refuses (with [`Error::Uncertified`]) automata without an
    /// absolute-convergence certificate or whose total mass is not 1.
    pub fn new(base: MultiplicityAutomaton<W>) -> Result<Self> {
        let certificate = absolute_convergence_certificate(&base);
        if !certificate.certified {
            return Err(Error::Uncertified(format!(
                "no absolute-convergence certificate (ρ(M_abs) = {:.6})",
                certificate.rho_abs
            )));
        }
        let total = tail_sum(&base, 0)?.to_f64();
        if !((total - 1.0).abs() <= TOTAL_MASS_TOLERANCE) {
            return Err(Error::Uncertified(format!("total mass {total} is not 1")));
        }
        let suffix = suffix_masses(&base)?;
        let abs_suffix = abs_suffix_masses(&base)
            .ok_or_else(|| Error::Numerical("singular absolute resolvent".into()))?;
        let abs_letters = base.letters().iter().map(|m| m.map(|w| w.to_f64().abs())).collect();
        let abs_tau = base.tau().iter().map(|w| w.to_f64().abs()).collect();
        let abs_iota = base.iota().iter().map(|w| w.to_f64().abs()).collect();
        let ns = NormalizedSeries {
            base,
            suffix,
            abs_letters,
            abs_tau,
            abs_suffix,
            certificate,
            memo: RwLock::new(HashMap::new()),
        };
        let root = ns.make_node(ns.base.iota().to_vec(), abs_iota, None);
        ns.memo.write().expect("memo lock").insert(Word::empty(), Arc::new(root));
        Ok(ns)
    }

    pub fn base(&self) -> &MultiplicityAutomaton<W> {
        &self.base
    }

    pub fn certificate(&self) -> Certificate {
        self.certificate
    }

    /// Builds a node from its forward vector. `parent` is `(λ_u, r(uxΣ*) > 0
    /// and u ∈ S)` for a child `ux`, or `None` for ε.
    fn make_node(&self, forward: Vec<W>, abs_forward: Vec<f64>, parent: Option<(W, bool)>) -> Node<W> {
        let word = dot(&forward, self.base.tau());
        let prefix = dot(&forward, &self.suffix);
        let child_prefix: Vec<W> = self
            .base
            .letters()
            .iter()
            .map(|m| dot(&m.left_mul(&forward), &self.suffix))
            .collect();
        let word_positive = positive(&word, dot(&abs_forward, &self.abs_tau));
        let child_positive: Vec<bool> = child_prefix
            .iter()
            .zip(&self.abs_letters)
            .map(|(c, m)| positive(c, dot(&m.left_mul(&abs_forward), &self.abs_suffix)))
            .collect();
        // Only negative values are cut. A float within noise of zero leaves S
        // without entering r(N(u)), which keeps r(N(u)) <= 0 and λ_u <= 1.
        let mut neg_mass = child_prefix
            .iter()
            .filter(|c| **c < W::zero())
            .fold(W::zero(), |acc, c| acc + c.clone());
        if word < W::zero() {
            neg_mass = neg_mass + word.clone();
        }
        let (in_s, lambda) = match parent {
            None => (true, W::one() / (W::one() - neg_mass.clone())),
            Some((_, false)) => (false, W::zero()),
            Some((parent_lambda, true)) => {
                let l = parent_lambda * prefix.clone() / (prefix.clone() - neg_mass.clone());
                (true, l)
            }
        };
        if !in_s {
            neg_mass = W::zero();
        }
        Node { forward, abs_forward, word, prefix, child_prefix, word_positive, child_positive, in_s, neg_mass, lambda }
    }

    fn child(&self, parent: &Node<W>, word: &Word, x: usize) -> Arc<Node<W>> {
        if let Some(n) = self.memo.read().expect("memo lock").get(word) {
            return n.clone();
        }
        let forward = self.base.letter(x).left_mul(&parent.forward);
        let abs_forward = self.abs_letters[x].left_mul(&parent.abs_forward);
        let in_s = parent.in_s && parent.child_positive[x];
        let node = Arc::new(self.make_node(forward, abs_forward, Some((parent.lambda.clone(), in_s))));
        self.memo
            .write()
            .expect("memo lock")
            .entry(word.clone())
            .or_insert(node)
            .clone()
    }

    fn node(&self, u: &Word) -> Result<Arc<Node<W>>> {
        let k = self.base.alphabet().len();
        if let Some(&x) = u.symbols().iter().find(|&&x| x >= k) {
            return Err(Error::UnknownSymbol(format!("symbol index {x}")));
        }
        if let Some(n) = self.memo.read().expect("memo lock").get(u) {
            return Ok(n.clone());
        }
        let mut cur = self.memo.read().expect("memo lock")[&Word::empty()].clone();
        for i in 1..=u.len() {
            cur = self.child(&cur, &Word(u.symbols()[..i].to_vec()), u.symbols()[i - 1]);
        }
        Ok(cur)
    }

    fn node_in_s(&self, u: &Word) -> Result<Arc<Node<W>>> {
        let n = self.node(u)?;
        if !n.in_s {
            return Err(Error::InvalidArgument(format!("prefix {u} is outside S")));
        }
        Ok(n)
    }

    /// Whether `u ∈ S`.
    pub fn in_s(&self, u: &Word) -> Result<bool> {
        Ok(self.node(u)?.in_s)
    }

    /// `r(uΣ*)`.
    pub fn prefix_mass(&self, u: &Word) -> Result<W> {
        Ok(self.node(u)?.prefix.clone())
    }

    /// `r(N(u))`, always `<= 0`.
    pub fn node_neg_mass(&self, u: &Word) -> Result<W> {
        Ok(self.node_in_s(u)?.neg_mass.clone())
    }

    /// `λ_u ∈ (0, 1]`.
    pub fn lambda_at(&self, u: &Word) -> Result<W> {
        Ok(self.node_in_s(u)?.lambda.clone())
    }

    /// `p_r(u)`.
    pub fn pr_eval(&self, u: &Word) -> Result<W> {
        let n = self.node(u)?;
        Ok(if n.in_s && n.word_positive {
            n.lambda.clone() * n.word.clone()
        } else {
            W::zero()
        })
    }

    /// `p_r(uΣ*)`: 1 at ε, `λ_v r(uΣ*)` for `u = vx ∈ S`, 0 outside `S`.
    /// Equals `pr_eval(u)` plus the masses of the children of `u` in `S`.
    pub fn pr_prefix_mass(&self, u: &Word) -> Result<W> {
        let Some((v, _)) = u.split_last() else {
            self.node(u)?;
            return Ok(W::one());
        };
        let n = self.node(u)?;
        if !n.in_s {
            return Ok(W::zero());
        }
        Ok(self.node(&v)?.lambda.clone() * n.prefix.clone())
    }

    /// One word drawn from `p_r`, descending from ε: stop with probability
    /// `p_r(u)/m(u)` or move to child `ux ∈ S` with probability
    /// `λ_u r(uxΣ*)/m(u)`.
    pub fn pr_sample(&self, rng: &mut impl Rng) -> Result<Word> {
        let mut word = Word::empty();
        let mut cur = self.node(&word)?;
        loop {
            let stop = if cur.word_positive { cur.lambda.to_f64() * cur.word.to_f64() } else { 0.0 };
            let moves: Vec<f64> = cur
                .child_prefix
                .iter()
                .zip(&cur.child_positive)
                .map(|(c, &pos)| if pos { cur.lambda.to_f64() * c.to_f64() } else { 0.0 })
                .collect();
            let total = stop + moves.iter().sum::<f64>();
            let mut u = rng.gen::<f64>() * total;
            if u < stop || total <= 0.0 {
                return Ok(word);
            }
            u -= stop;
            let last = moves.iter().rposition(|&m| m > 0.0).expect("positive move mass");
            let x = moves.iter().position(|&m| {
                let hit = u < m;
                u -= m;
                hit
            });
            let x = x.unwrap_or(last);
            if word.len() >= MAX_WORD_LEN {
                return Err(Error::WordTooLong(MAX_WORD_LEN));
            }
            word = word.child(x);
            cur = self.child(&cur, &word, x);
        }
    }

    /// `n` words from `p_r`, stream 0 of `seed`.
    pub fn pr_draw_sample(&self, n: usize, seed: u64) -> Result<Sample> {
        let mut rng = seeded_rng(seed, 0);
        let words = (0..n).map(|_| self.pr_sample(&mut rng)).collect::<Result<Vec<_>>>()?;
        Sample::new(self.base.alphabet().clone(), words)
    }

    /// Truncated negative mass and absolute-mass bracket over `Σ^{<=depth}`.
    pub fn neg_total_and_abs_mass(&self, depth: usize) -> Result<MassSummary> {
        let mut neg_total = 0.0;
        let mut abs_lower = 0.0;
        let mut level = vec![(Word::empty(), self.node(&Word::empty())?)];
        for d in 0..=depth {
            let mut next = Vec::new();
            for (w, n) in &level {
                abs_lower += n.word.to_f64().abs();
                if n.in_s {
                    neg_total += n.neg_mass.to_f64();
                }
                if d < depth {
                    for x in 0..self.base.alphabet().len() {
                        let c = w.child(x);
                        let node = self.child(n, &c, x);
                        next.push((c, node));
                    }
                }
            }
            level = next;
        }
        let tail = abs_tail_bound(&self.base, depth + 1).unwrap_or(f64::INFINITY);
        Ok(MassSummary { neg_total, abs_mass_lower: abs_lower, abs_mass_upper: abs_lower + tail })
    }
}
