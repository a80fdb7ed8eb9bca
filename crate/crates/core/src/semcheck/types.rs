//! Semantic types and the interval arithmetic used to type integer expressions.

use std::fmt;
use std::sync::Arc;

/// The type of a checked expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    Bool,
    /// An enumeration, identified by its ordered value list.
    Enum(Arc<[String]>),
    /// A bounded integer interval `lo..=hi`.
    Int { lo: i64, hi: i64 },
}

impl Ty {
    pub fn int(lo: i64, hi: i64) -> Ty {
        Ty::Int { lo, hi }
    }

    pub fn enumeration<S: Into<String>>(values: impl IntoIterator<Item = S>) -> Ty {
        Ty::Enum(values.into_iter().map(Into::into).collect())
    }

    pub fn is_bool(&self) -> bool {
        matches!(self, Ty::Bool)
    }

    pub fn as_int(&self) -> Option<(i64, i64)> {
        match self {
            Ty::Int { lo, hi } => Some((*lo, *hi)),
            _ => None,
        }
    }

    /// Whether values of the two types may be compared with `=`. Integers of
    /// any ranges are comparable; enums only with the same enum.
    pub fn comparable(&self, other: &Ty) -> bool {
        match (self, other) {
            (Ty::Bool, Ty::Bool) => true,
            (Ty::Int { .. }, Ty::Int { .. }) => true,
            (Ty::Enum(a), Ty::Enum(b)) => a == b,
            _ => false,
        }
    }

    /// Number of values of a variable of this type.
    pub fn cardinality(&self) -> u64 {
        match self {
            Ty::Bool => 2,
            Ty::Enum(vals) => vals.len() as u64,
            Ty::Int { lo, hi } => (*hi as i128 - *lo as i128 + 1) as u64,
        }
    }

    /// Number of Boolean variables needed to encode a variable of this type.
    pub fn bit_width(&self) -> u32 {
        match self {
            Ty::Bool => 1,
            _ => ceil_log2(self.cardinality()),
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Bool => f.write_str("boolean"),
            Ty::Enum(vals) => write!(f, "{{{}}}", vals.join(", ")),
            Ty::Int { lo, hi } => write!(f, "Int({lo}..{hi})"),
        }
    }
}

/// `⌈log₂ n⌉`, with `ceil_log2(1) = 0`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Largest magnitude allowed for integer bounds. Keeps every bit-vector
/// width comfortably inside 64 bits.
pub const INT_LIMIT: i64 = 1 << 40;

fn bounded(lo: i64, hi: i64) -> Option<(i64, i64)> {
    (lo >= -INT_LIMIT && hi <= INT_LIMIT).then_some((lo, hi))
}

pub fn range_neg((lo, hi): (i64, i64)) -> Option<(i64, i64)> {
    bounded(hi.checked_neg()?, lo.checked_neg()?)
}

pub fn range_add(a: (i64, i64), b: (i64, i64)) -> Option<(i64, i64)> {
    bounded(a.0.checked_add(b.0)?, a.1.checked_add(b.1)?)
}

pub fn range_sub(a: (i64, i64), b: (i64, i64)) -> Option<(i64, i64)> {
    bounded(a.0.checked_sub(b.1)?, a.1.checked_sub(b.0)?)
}

pub fn range_mul(a: (i64, i64), b: (i64, i64)) -> Option<(i64, i64)> {
    let products = [
        a.0.checked_mul(b.0)?,
        a.0.checked_mul(b.1)?,
        a.1.checked_mul(b.0)?,
        a.1.checked_mul(b.1)?,
    ];
    bounded(*products.iter().min()?, *products.iter().max()?)
}

/// Range of Euclidean division by the nonzero constant `c`.
pub fn range_div(a: (i64, i64), c: i64) -> Option<(i64, i64)> {
    if c == 0 {
        return None;
    }
    let x = a.0.div_euclid(c);
    let y = a.1.div_euclid(c);
    bounded(x.min(y), x.max(y))
}

/// Range of the Euclidean remainder by the nonzero constant `c`.
pub fn range_mod(a: (i64, i64), c: i64) -> Option<(i64, i64)> {
    if c == 0 {
        return None;
    }
    let m = c.unsigned_abs() as i64;
    if a.0.div_euclid(m) == a.1.div_euclid(m) {
        Some((a.0.rem_euclid(m), a.1.rem_euclid(m)))
    } else {
        Some((0, m - 1))
    }
}
