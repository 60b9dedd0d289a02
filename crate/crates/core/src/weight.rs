//! Weight semirings: exact rationals and 64-bit floats.
//!
//! An automaton is instantiated in exactly one mode; nothing here converts
//! implicitly between the two.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Exact rational in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Threshold below which a floating weight counts as zero when testing
/// membership of positive-mass prefixes and pivots.
pub const FLOAT_ZERO: f64 = 1e-12;

/// Singular values at or below this are treated as zero in floating rank tests.
pub const RANK_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    Rational,
    Float,
}

impl std::str::FromStr for WeightMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(WeightMode::Rational),
            "float" => Ok(WeightMode::Float),
            other => Err(Error::InvalidArgument(format!("unknown weight mode `{other}`"))),
        }
    }
}

pub trait Weight:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: WeightMode;

    fn from_ratio(p: i64, q: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    /// `x > 0`, with floats required to clear [`FLOAT_ZERO`].
    fn is_strictly_positive(&self) -> bool;

    /// Zero for pivoting purposes: exact for rationals, `|x| <= FLOAT_ZERO` for floats.
    fn is_negligible(&self) -> bool;

    fn encode(&self) -> Value;
    fn decode(v: &Value) -> Result<Self>;

    /// Rank of the row set: exact for rationals, SVD-thresholded for floats.
    fn rank(rows: &[Vec<Self>]) -> usize;
}

impl Weight for f64 {
    const MODE: WeightMode = WeightMode::Float;

    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn is_strictly_positive(&self) -> bool {
        *self > FLOAT_ZERO
    }

    fn is_negligible(&self) -> bool {
        f64::abs(*self) <= FLOAT_ZERO
    }

    fn encode(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn decode(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("weight {n} is not a float"))),
            Value::String(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("weight `{s}` is not a float"))),
            other => Err(Error::Parse(format!("weight {other} is not a number"))),
        }
    }

    fn rank(rows: &[Vec<Self>]) -> usize {
        let Some(cols) = rows.first().map(Vec::len) else {
            return 0;
        };
        if cols == 0 {
            return 0;
        }
        let m = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
        m.singular_values().iter().filter(|&&s| s > RANK_THRESHOLD).count()
    }
}

impl Weight for Rational {
    const MODE: WeightMode = WeightMode::Rational;

    fn from_ratio(p: i64, q: i64) -> Self {
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn is_strictly_positive(&self) -> bool {
        self.is_positive()
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn encode(&self) -> Value {
        Value::String(format!("{}/{}", self.numer(), self.denom()))
    }

    fn decode(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(BigInt::from(
                n.as_i64().unwrap_or_default(),
            ))),
            other => Err(Error::Parse(format!("rational weight {other} must be a \"p/q\" string"))),
        }
    }

    fn rank(rows: &[Vec<Self>]) -> usize {
        let mut m: Vec<Vec<Rational>> = rows.to_vec();
        let cols = m.first().map(Vec::len).unwrap_or(0);
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let pivot = m[rank][c].clone();
            for r in 0..m.len() {
                if r != rank && !m[r][c].is_zero() {
                    let f = &m[r][c] / &pivot;
                    for k in c..cols {
                        let delta = &f * &m[rank][k];
                        m[r][k] -= delta;
                    }
                }
            }
            rank += 1;
            if rank == m.len() {
                break;
            }
        }
        rank
    }
}

/// Parses `p/q` or a bare integer `p` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not a rational of the form p/q"));
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = num.parse().map_err(|_| bad())?;
    let q: BigInt = den.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::Parse(format!("`{s}` has a zero denominator")));
    }
    Ok(Rational::new(p, q))
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}
