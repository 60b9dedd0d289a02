//! File formats.
//!
//! Automata are JSON documents:
//!
//! ```json
//! {"alphabet": ["a"], "mode": "rational", "n": 1,
//!  "iota": ["1/1"], "tau": ["1/2"], "matrices": {"a": [["1/2"]]},
//!  "labels": [""]}
//! ```
//!
//! Rational weights are `"p/q"` strings, floats are JSON numbers printed at
//! full round-trip precision. Labels are words with space-separated symbols.
//!
//! Samples are plain text: a `#alphabet: a b` header, then one word per line
//! with space-separated symbols; an empty line is ε.

use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::automaton::{AnyAutomaton, MultiplicityAutomaton};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::sampling::Sample;
use crate::weight::{Rational, Weight, WeightMode};
use crate::word::{Alphabet, Word};

const ALPHABET_HEADER: &str = "#alphabet:";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    alphabet: Vec<String>,
    mode: WeightMode,
    n: usize,
    iota: Vec<Value>,
    tau: Vec<Value>,
    matrices: IndexMap<String, Vec<Vec<Value>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

fn document<W: Weight>(a: &MultiplicityAutomaton<W>) -> Document {
    let sigma = a.alphabet();
    Document {
        alphabet: sigma.symbols().to_vec(),
        mode: W::MODE,
        n: a.n(),
        iota: a.iota().iter().map(Weight::encode).collect(),
        tau: a.tau().iter().map(Weight::encode).collect(),
        matrices: (0..sigma.len())
            .map(|x| {
                let rows = a.letter(x).to_rows().iter().map(|r| r.iter().map(Weight::encode).collect()).collect();
                (sigma.name(x).to_string(), rows)
            })
            .collect(),
        labels: a.labels().map(|ls| ls.iter().map(|w| sigma.format_word(w)).collect()),
    }
}

pub fn automaton_to_json<W: Weight>(a: &MultiplicityAutomaton<W>) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&document(a))?;
    text.push('\n');
    Ok(text)
}

pub fn any_to_json(a: &AnyAutomaton) -> Result<String> {
    match a {
        AnyAutomaton::Rational(a) => automaton_to_json(a),
        AnyAutomaton::Float(a) => automaton_to_json(a),
    }
}

fn decode_vec<W: Weight>(values: &[Value], what: &str, n: usize) -> Result<Vec<W>> {
    if values.len() != n {
        return Err(Error::Parse(format!("{what} has {} entries, expected {n}", values.len())));
    }
    values.iter().map(W::decode).collect()
}

fn build<W: Weight>(doc: &Document, alphabet: Alphabet) -> Result<MultiplicityAutomaton<W>> {
    let n = doc.n;
    let iota = decode_vec(&doc.iota, "iota", n)?;
    let tau = decode_vec(&doc.tau, "tau", n)?;
    if doc.matrices.len() != alphabet.len() {
        return Err(Error::Parse(format!(
            "matrices has {} letters, the alphabet has {}",
            doc.matrices.len(),
            alphabet.len()
        )));
    }
    let letters = alphabet
        .symbols()
        .iter()
        .map(|s| {
            let rows = doc
                .matrices
                .get(s)
                .ok_or_else(|| Error::Parse(format!("no matrix for symbol `{s}`")))?;
            if rows.len() != n {
                return Err(Error::Parse(format!("matrix `{s}` has {} rows, expected {n}", rows.len())));
            }
            let rows = rows
                .iter()
                .map(|r| decode_vec(r, &format!("a row of matrix `{s}`"), n))
                .collect::<Result<Vec<_>>>()?;
            Ok(Matrix::from_rows(rows))
        })
        .collect::<Result<Vec<_>>>()?;
    let a = MultiplicityAutomaton::new(alphabet.clone(), iota, tau, letters)?;
    match &doc.labels {
        None => Ok(a),
        Some(ls) => {
            let words = ls.iter().map(|l| alphabet.parse_word(l)).collect::<Result<Vec<_>>>()?;
            a.with_labels(words)
        }
    }
}

pub fn automaton_from_json(text: &str) -> Result<AnyAutomaton> {
    let doc: Document = serde_json::from_str(text)?;
    let alphabet = Alphabet::new(doc.alphabet.iter().cloned())?;
    Ok(match doc.mode {
        WeightMode::Rational => AnyAutomaton::Rational(build::<Rational>(&doc, alphabet)?),
        WeightMode::Float => AnyAutomaton::Float(build::<f64>(&doc, alphabet)?),
    })
}

pub fn read_automaton(path: &Path) -> Result<AnyAutomaton> {
    automaton_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_automaton(path: &Path, a: &AnyAutomaton) -> Result<()> {
    std::fs::write(path, any_to_json(a)?)?;
    Ok(())
}

pub fn sample_to_text(sample: &Sample) -> String {
    let sigma = sample.alphabet();
    let mut out = format!("{ALPHABET_HEADER} {}\n", sigma.symbols().join(" "));
    for w in sample.words() {
        out.push_str(&sigma.format_word(w));
        out.push('\n');
    }
    out
}

fn split_header(text: &str) -> Option<(&str, &str)> {
    let rest = text.strip_prefix(ALPHABET_HEADER)?;
    Some(rest.split_once('\n').unwrap_or((rest, "")))
}

pub fn sample_from_text(text: &str) -> Result<Sample> {
    let (header, body) = split_header(text)
        .ok_or_else(|| Error::Parse(format!("sample must start with `{ALPHABET_HEADER} ...`")))?;
    let alphabet = Alphabet::new(header.split_whitespace())?;
    let words = parse_lines(&alphabet, body)?;
    Sample::new(alphabet, words)
}

fn parse_lines(alphabet: &Alphabet, body: &str) -> Result<Vec<Word>> {
    // A lone "\n" body is one ε word; strip only the final terminator.
    let lines: Vec<&str> = if body.is_empty() {
        Vec::new()
    } else {
        let trimmed = body.strip_suffix('\n').unwrap_or(body);
        trimmed.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect()
    };
    lines.iter().map(|l| alphabet.parse_word(l)).collect()
}

/// Words for evaluation, in sample format; the header is optional and, when
/// present, must name `alphabet`.
pub fn words_from_text(text: &str, alphabet: &Alphabet) -> Result<Vec<Word>> {
    match split_header(text) {
        Some((header, body)) => {
            let named = Alphabet::new(header.split_whitespace())?;
            if &named != alphabet {
                return Err(Error::Parse("word file alphabet differs from the automaton's".into()));
            }
            parse_lines(alphabet, body)
        }
        None => parse_lines(alphabet, text),
    }
}

pub fn read_sample(path: &Path) -> Result<Sample> {
    sample_from_text(&std::fs::read_to_string(path)?)
}

pub fn write_sample(path: &Path, sample: &Sample) -> Result<()> {
    std::fs::write(path, sample_to_text(sample))?;
    Ok(())
}
