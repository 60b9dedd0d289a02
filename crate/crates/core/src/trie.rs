//! Prefix-count tree over a sample, answering empirical prefix and residual
//! queries.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::sampling::Sample;
use crate::word::{Alphabet, Symbol, Word};

#[derive(Debug, Clone)]
struct Node {
    prefix: u64,
    end: u64,
    children: Vec<Option<usize>>,
}

impl Node {
    fn new(arity: usize) -> Self {
        Node { prefix: 0, end: 0, children: vec![None; arity] }
    }
}

/// Counts `prefix_count(u) = #{w ∈ S : u ≤_prefix w}` and
/// `end_count(u) = #{w ∈ S : w = u}` for every prefix of the sample.
#[derive(Debug, Clone)]
pub struct EmpiricalTrie {
    alphabet: Alphabet,
    nodes: Vec<Node>,
}

const ROOT: usize = 0;

impl EmpiricalTrie {
    pub fn build(sample: &Sample) -> Self {
        let arity = sample.alphabet().len();
        let mut nodes = vec![Node::new(arity)];
        for w in sample.words() {
            let mut cur = ROOT;
            nodes[cur].prefix += 1;
            for &x in w.symbols() {
                cur = match nodes[cur].children[x] {
                    Some(c) => c,
                    None => {
                        nodes.push(Node::new(arity));
                        let id = nodes.len() - 1;
                        nodes[cur].children[x] = Some(id);
                        id
                    }
                };
                nodes[cur].prefix += 1;
            }
            nodes[cur].end += 1;
        }
        EmpiricalTrie { alphabet: sample.alphabet().clone(), nodes }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// `|S|`.
    pub fn total(&self) -> u64 {
        self.nodes[ROOT].prefix
    }

    /// Number of distinct prefixes `|pref(S)|` (including ε).
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn walk(&self, from: usize, w: &[Symbol]) -> Option<usize> {
        w.iter().try_fold(from, |cur, &x| self.nodes[cur].children.get(x).copied().flatten())
    }

    pub fn prefix_count(&self, u: &Word) -> u64 {
        self.walk(ROOT, u.symbols()).map_or(0, |n| self.nodes[n].prefix)
    }

    pub fn end_count(&self, u: &Word) -> u64 {
        self.walk(ROOT, u.symbols()).map_or(0, |n| self.nodes[n].end)
    }

    /// `P_S(uΣ*)`.
    pub fn prefix_probability(&self, u: &Word) -> f64 {
        ratio(self.prefix_count(u), self.total())
    }

    /// `P_S(u)`.
    pub fn word_probability(&self, u: &Word) -> f64 {
        ratio(self.end_count(u), self.total())
    }

    /// `u⁻¹P_S(wΣ*) = prefix_count(uw) / prefix_count(u)`.
    pub fn residual_prefix(&self, u: &Word, w: &Word) -> Result<f64> {
        let node = self
            .walk(ROOT, u.symbols())
            .filter(|&n| self.nodes[n].prefix > 0)
            .ok_or_else(|| Error::UndefinedResidual(self.alphabet.format_word(u)))?;
        let below = self.walk(node, w.symbols()).map_or(0, |n| self.nodes[n].prefix);
        Ok(ratio(below, self.nodes[node].prefix))
    }

    /// Residual prefix values of `u` on every word of `tests`, sharing one walk to `u`.
    pub(crate) fn residual_row(&self, u: &Word, tests: &[Word]) -> Result<Vec<f64>> {
        let node = self
            .walk(ROOT, u.symbols())
            .filter(|&n| self.nodes[n].prefix > 0)
            .ok_or_else(|| Error::UndefinedResidual(self.alphabet.format_word(u)))?;
        let base = self.nodes[node].prefix;
        Ok(tests
            .iter()
            .map(|w| ratio(self.walk(node, w.symbols()).map_or(0, |n| self.nodes[n].prefix), base))
            .collect())
    }

    /// Every prefix in the trie with its `(prefix_count, end_count)`, in
    /// length-lexicographic order.
    pub fn prefixes(&self) -> Vec<(Word, u64, u64)> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut queue = VecDeque::from([(ROOT, Word::empty())]);
        while let Some((id, w)) = queue.pop_front() {
            let node = &self.nodes[id];
            for (x, c) in node.children.iter().enumerate() {
                if let Some(c) = c {
                    queue.push_back((*c, w.child(x)));
                }
            }
            out.push((w, node.prefix, node.end));
        }
        out
    }

    /// Distinct sample words.
    pub fn distinct_words(&self) -> Vec<Word> {
        self.prefixes()
            .into_iter()
            .filter(|(_, _, end)| *end > 0)
            .map(|(w, _, _)| w)
            .collect()
    }

    /// `fact(S)`: all distinct factors of sample words in length-lex order,
    /// optionally capped at `max_len`. Contains ε whenever `S` is nonempty.
    pub fn factors(&self, max_len: Option<usize>) -> Vec<Word> {
        if self.total() == 0 {
            return Vec::new();
        }
        let arity = self.alphabet.len();
        // Suffix trie of the distinct words: its nodes are exactly the factors.
        let mut children: Vec<Vec<Option<usize>>> = vec![vec![None; arity]];
        for w in self.distinct_words() {
            let s = w.symbols();
            for start in 0..s.len() {
                let end = max_len.map_or(s.len(), |m| s.len().min(start + m));
                let mut cur = 0;
                for &x in &s[start..end] {
                    cur = match children[cur][x] {
                        Some(c) => c,
                        None => {
                            children.push(vec![None; arity]);
                            let id = children.len() - 1;
                            children[cur][x] = Some(id);
                            id
                        }
                    };
                }
            }
        }
        let mut out = Vec::with_capacity(children.len());
        let mut queue = VecDeque::from([(0usize, Word::empty())]);
        while let Some((id, w)) = queue.pop_front() {
            for (x, c) in children[id].iter().enumerate() {
                if let Some(c) = c {
                    queue.push_back((*c, w.child(x)));
                }
            }
            out.push(w);
        }
        out
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}
