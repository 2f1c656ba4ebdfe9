//! The paired-integer universe and its canonical order.
//!
//! Every string of the universe is a pair `(column, index)` of nonnegative
//! integers. The Cantor pairing function assigns each pair a unique id, and
//! ids define the canonical total order used for enumeration and for every
//! smallest-element tie-break in the engine.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A point of the universe: column `c`, index `k` within the column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Element {
    column: u32,
    index: u32,
}

impl Element {
    pub fn new(column: u32, index: u32) -> Element {
        Element { column, index }
    }

    pub fn column(self) -> u32 {
        self.column
    }

    pub fn index(self) -> u32 {
        self.index
    }

    /// Cantor id of the pair: with `s = column + index`, the id is
    /// `s(s+1)/2 + index`.
    pub fn id(self) -> u64 {
        let s = self.column as u64 + self.index as u64;
        s * (s + 1) / 2 + self.index as u64
    }

    /// Inverse of [`Element::id`].
    pub fn from_id(id: u64) -> Element {
        let s = diagonal_of(id);
        let index = id - s * (s + 1) / 2;
        Element {
            column: (s - index) as u32,
            index: index as u32,
        }
    }
}

/// Largest `s` with `s(s+1)/2 <= id`.
fn diagonal_of(id: u64) -> u64 {
    let mut s = (((8.0 * id as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while (s + 1) * (s + 2) / 2 <= id {
        s += 1;
    }
    while s * (s + 1) / 2 > id {
        s -= 1;
    }
    s
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.id().cmp(&other.id())
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.column, self.index)
    }
}

impl FromStr for Element {
    type Err = Error;

    /// Parses the `(c,k)` token form used across file formats and flags.
    fn from_str(s: &str) -> Result<Element, Error> {
        let bad = || Error::BadElement(s.to_string());
        let inner = s
            .strip_prefix('(')
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (c, k) = inner.split_once(',').ok_or_else(bad)?;
        let column: u32 = c.trim().parse().map_err(|_| bad())?;
        let index: u32 = k.trim().parse().map_err(|_| bad())?;
        Ok(Element::new(column, index))
    }
}
