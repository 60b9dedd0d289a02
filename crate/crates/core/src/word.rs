//! Alphabets and words.
//!
//! Symbols are stored as indices into an [`Alphabet`]; the alphabet order
//! fixes the length-lexicographic order used everywhere words are sorted.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Index of a symbol inside its alphabet.
pub type Symbol = usize;

/// A finite, ordered set of distinct symbol tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidArgument("alphabet must not be empty".into()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::InvalidArgument(format!(
                    "symbol `{s}` must be a non-empty token without whitespace"
                )));
            }
            if symbols[..i].contains(s) {
                return Err(Error::InvalidArgument(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// Single-letter alphabet `{a}`.
    pub fn unary() -> Self {
        Alphabet { symbols: vec!["a".to_string()] }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn name(&self, symbol: Symbol) -> &str {
        &self.symbols[symbol]
    }

    pub fn index_of(&self, token: &str) -> Result<Symbol> {
        self.symbols
            .iter()
            .position(|s| s == token)
            .ok_or_else(|| Error::UnknownSymbol(token.to_string()))
    }

    /// Parses a whitespace-separated word; the empty string is ε.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.split_whitespace()
            .map(|t| self.index_of(t))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn format_word(&self, word: &Word) -> String {
        word.0
            .iter()
            .map(|&s| self.name(s))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// All words of length at most `depth`, in length-lexicographic order.
    pub fn ball(&self, depth: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(layer.len() * self.len());
            for w in &layer {
                for x in 0..self.len() {
                    next.push(w.child(x));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

/// A word over an alphabet, ordered length-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// The word `self·x`.
    pub fn child(&self, x: Symbol) -> Word {
        let mut v = self.0.clone();
        v.push(x);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Splits `ux` into `(u, x)`; `None` for ε.
    pub fn split_last(&self) -> Option<(Word, Symbol)> {
        let (&x, rest) = self.0.split_last()?;
        Some((Word(rest.to_vec()), x))
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}
