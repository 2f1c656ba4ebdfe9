//! Consistent languages, noisy closures, and saturation.
//!
//! A language is consistent with an observed set `S` at noise level `i` when
//! it misses at most `i` strings of `S`. The noisy closure is the
//! intersection of all consistent languages, or the empty set when nothing
//! is consistent; it is exactly the set a generator can emit from safely.

use std::collections::{BTreeMap, BTreeSet};

use crate::collection::{Collection, NamedLanguage};
use crate::error::Error;
use crate::lang::SetDescriptor;
use crate::universe::Element;

/// A finite observed set of strings.
pub type SampleSet = BTreeSet<Element>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureResult {
    /// No language of the collection is consistent; the closure is empty by
    /// definition.
    EmptyConsistent,
    Value(SetDescriptor),
}

impl ClosureResult {
    /// The closure as a plain descriptor; the empty-consistent case denotes
    /// the empty set.
    pub fn descriptor(&self) -> SetDescriptor {
        match self {
            ClosureResult::EmptyConsistent => SetDescriptor::empty(),
            ClosureResult::Value(d) => d.clone(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            ClosureResult::EmptyConsistent => true,
            ClosureResult::Value(d) => d.is_finite(),
        }
    }

    pub fn contains(&self, e: Element) -> bool {
        match self {
            ClosureResult::EmptyConsistent => false,
            ClosureResult::Value(d) => d.contains(e),
        }
    }
}

/// The consistent languages for a sample. Explicit collections list them;
/// for the column family the answer is the rule "a union `x` is consistent
/// iff the sample hits outside `x` at most `noise` times", packaged with the
/// per-column hit counts.
#[derive(Debug, Clone)]
pub enum ConsistentFamily<'a> {
    Explicit(Vec<&'a NamedLanguage>),
    Columns(ColumnConsistency),
}

impl ConsistentFamily<'_> {
    /// Explicit families can be empty; the column family never is, since the
    /// all-columns union misses nothing.
    pub fn is_empty(&self) -> bool {
        match self {
            ConsistentFamily::Explicit(v) => v.is_empty(),
            ConsistentFamily::Columns(_) => false,
        }
    }

    pub fn names(&self) -> Vec<String> {
        match self {
            ConsistentFamily::Explicit(v) => v.iter().map(|nl| nl.name.clone()).collect(),
            ConsistentFamily::Columns(_) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnConsistency {
    hits: BTreeMap<u32, usize>,
    noise: usize,
}

impl ColumnConsistency {
    pub fn new(sample: &SampleSet, noise: usize) -> ColumnConsistency {
        let mut hits = BTreeMap::new();
        for e in sample {
            *hits.entry(e.column()).or_insert(0) += 1;
        }
        ColumnConsistency { hits, noise }
    }

    pub fn hits(&self) -> &BTreeMap<u32, usize> {
        &self.hits
    }

    pub fn noise(&self) -> usize {
        self.noise
    }

    pub fn is_consistent_union(&self, columns: &BTreeSet<u32>) -> bool {
        let missed: usize = self
            .hits
            .iter()
            .filter(|(c, _)| !columns.contains(c))
            .map(|(_, h)| h)
            .sum();
        missed <= self.noise
    }

    /// Columns forced into every consistent union: those the sample hits more
    /// than `noise` times.
    pub fn forced_columns(&self) -> BTreeSet<u32> {
        self.hits
            .iter()
            .filter(|(_, &h)| h > self.noise)
            .map(|(&c, _)| c)
            .collect()
    }
}

/// Number of sample strings a language misses.
pub fn misses(language: &crate::lang::SymbolicLanguage, sample: &SampleSet) -> usize {
    sample.iter().filter(|e| !language.contains(**e)).count()
}

pub fn consistent_set<'a>(
    collection: &'a Collection,
    sample: &SampleSet,
    noise: usize,
) -> ConsistentFamily<'a> {
    match collection {
        Collection::Explicit { languages, .. } => ConsistentFamily::Explicit(
            languages
                .iter()
                .filter(|nl| misses(&nl.language, sample) <= noise)
                .collect(),
        ),
        Collection::ColumnFamily { .. } => {
            ConsistentFamily::Columns(ColumnConsistency::new(sample, noise))
        }
    }
}

pub fn noisy_closure(collection: &Collection, sample: &SampleSet, noise: usize) -> ClosureResult {
    match consistent_set(collection, sample, noise) {
        ConsistentFamily::Explicit(consistent) => {
            let mut iter = consistent.into_iter();
            let Some(first) = iter.next() else {
                return ClosureResult::EmptyConsistent;
            };
            let mut acc = first.language.descriptor();
            for nl in iter {
                acc = acc.intersect(&nl.language.descriptor());
            }
            ClosureResult::Value(acc)
        }
        ConsistentFamily::Columns(_) => column_closure(sample, noise),
    }
}

/// Closed form of the column-family closure: the union of exactly the
/// columns the sample hits more than `noise` times. Every other column can
/// be dropped by some consistent union, and a forced column is whole in
/// every consistent union.
pub fn column_closure(sample: &SampleSet, noise: usize) -> ClosureResult {
    let forced = ColumnConsistency::new(sample, noise).forced_columns();
    ClosureResult::Value(SetDescriptor::symbolic(forced, [], []))
}

/// Extends the sample with its own finite closure. The consistent set is
/// unchanged: every consistent language already contains the closure.
pub fn saturate(
    collection: &Collection,
    sample: &SampleSet,
    noise: usize,
) -> Result<SampleSet, Error> {
    match noisy_closure(collection, sample, noise) {
        ClosureResult::EmptyConsistent => Ok(sample.clone()),
        ClosureResult::Value(SetDescriptor::Finite(closure)) => {
            Ok(sample.union(&closure).copied().collect())
        }
        ClosureResult::Value(_) => Err(Error::SaturationNeedsFiniteClosure),
    }
}
