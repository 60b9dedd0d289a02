//! Samples and i.i.d. word generation from probabilistic automata.
//!
//! All randomness comes from ChaCha8 (`rand_chacha`), seeded with a 64-bit
//! seed and an explicit stream number, which makes draws reproducible across
//! platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::MultiplicityAutomaton;
use crate::error::{Error, Result};
use crate::weight::Weight;
use crate::word::{Alphabet, Symbol, Word};

/// Words longer than this abort sampling with [`Error::WordTooLong`].
pub const MAX_WORD_LEN: usize = 1_000_000;

/// Seeded generator on an explicit stream.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A finite sequence of words over one alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    alphabet: Alphabet,
    words: Vec<Word>,
}

impl Sample {
    pub fn new(alphabet: Alphabet, words: Vec<Word>) -> Result<Self> {
        let k = alphabet.len();
        if let Some(w) = words.iter().find(|w| w.symbols().iter().any(|&x| x >= k)) {
            return Err(Error::UnknownSymbol(format!("{w}")));
        }
        Ok(Sample { alphabet, words })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The first `n` words (the prefix `S_n` of a presentation).
    pub fn prefix(&self, n: usize) -> Sample {
        Sample { alphabet: self.alphabet.clone(), words: self.words[..n.min(self.len())].to_vec() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Move {
    Stop,
    Step(Symbol, usize),
}

/// Generative view of a probabilistic automaton: pick a start state by `ι`,
/// then at each state stop with probability `τ(q)` or emit `x` and move to
/// `q'` with probability `φ(q,x,q')`.
#[derive(Debug, Clone)]
pub struct PaSampler {
    initial: Vec<(f64, usize)>,
    moves: Vec<Vec<(f64, Move)>>,
}

impl PaSampler {
    pub fn new<W: Weight>(a: &MultiplicityAutomaton<W>) -> Result<Self> {
        let report = a.pa_check();
        if !report.is_pa {
            return Err(Error::NotProbabilistic(report.violations));
        }
        let initial = (0..a.n())
            .map(|q| (a.iota()[q].to_f64(), q))
            .filter(|(p, _)| *p > 0.0)
            .collect();
        let moves = (0..a.n())
            .map(|q| {
                let mut v = vec![(a.tau()[q].to_f64(), Move::Stop)];
                for x in 0..a.alphabet().len() {
                    for r in 0..a.n() {
                        v.push((a.transition(q, x, r).to_f64(), Move::Step(x, r)));
                    }
                }
                v.retain(|(p, _)| *p > 0.0);
                v
            })
            .collect();
        Ok(PaSampler { initial, moves })
    }

    fn pick<T: Copy>(options: &[(f64, T)], rng: &mut impl Rng) -> Option<T> {
        let total: f64 = options.iter().map(|(p, _)| p).sum();
        let mut u = rng.gen::<f64>() * total;
        for &(p, t) in options {
            if u < p {
                return Some(t);
            }
            u -= p;
        }
        options.last().map(|&(_, t)| t)
    }

    pub fn sample_word(&self, rng: &mut impl Rng) -> Result<Word> {
        let Some(mut q) = Self::pick(&self.initial, rng) else {
            return Err(Error::InvalidArgument("no state has positive initial weight".into()));
        };
        let mut word = Vec::new();
        loop {
            match Self::pick(&self.moves[q], rng) {
                None | Some(Move::Stop) => return Ok(Word(word)),
                Some(Move::Step(x, r)) => {
                    if word.len() >= MAX_WORD_LEN {
                        return Err(Error::WordTooLong(MAX_WORD_LEN));
                    }
                    word.push(x);
                    q = r;
                }
            }
        }
    }
}

/// One word drawn from the PA `a`.
pub fn sample_word<W: Weight>(a: &MultiplicityAutomaton<W>, rng: &mut impl Rng) -> Result<Word> {
    PaSampler::new(a)?.sample_word(rng)
}

/// `n` i.i.d. words from `a`, drawn from stream 0 of `seed`. Samples of
/// different sizes under one seed are prefixes of the same presentation.
pub fn draw_sample<W: Weight>(a: &MultiplicityAutomaton<W>, n: usize, seed: u64) -> Result<Sample> {
    let sampler = PaSampler::new(a)?;
    let mut rng = seeded_rng(seed, 0);
    let words = (0..n).map(|_| sampler.sample_word(&mut rng)).collect::<Result<Vec<_>>>()?;
    Sample::new(a.alphabet().clone(), words)
}

/// Sample-size bound `Ψ(ε,δ) = c²(2 − ln(δ/4))/ε²` for uniform deviation of
/// prefix-event frequencies (VC dimension at most 2). Natural logarithm.
pub fn psi_bound(eps: f64, delta: f64, c: f64) -> Result<f64> {
    if !(eps > 0.0) || !(delta > 0.0 && delta < 1.0) || !(c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "psi bound needs eps > 0, 0 < delta < 1, c > 0 (got {eps}, {delta}, {c})"
        )));
    }
    Ok(c * c * (2.0 - (delta / 4.0).ln()) / (eps * eps))
}
