//! The noisy closure dimension: the size of the largest observed set with a
//! nonempty consistent family and a finite closure, searched over a finite
//! candidate pool, plus the square-root witness shrinking construction.

use std::collections::BTreeSet;

use crate::closure::{consistent_set, noisy_closure, ClosureResult, ConsistentFamily, SampleSet};
use crate::collection::Collection;
use crate::error::Error;
use crate::universe::Element;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DimensionVerdict {
    /// A qualifying witness of this size exists and no qualifying set one
    /// larger exists within the pool.
    Exact(usize),
    /// A qualifying witness of this size exists and the size budget ran out.
    AtLeast(usize),
    /// No qualifying set exists within the pool, not even the empty set.
    NoWitness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionReport {
    pub verdict: DimensionVerdict,
    /// Lexicographically smallest qualifying set of the winning size; empty
    /// for `NoWitness`.
    pub witness: SampleSet,
    pub searched_pool: Vec<Element>,
    pub max_size_searched: usize,
}

/// Candidate pool: every add and remove of every language, the `depth`
/// smallest untouched representatives of every block column, and `depth`
/// untouched elements outside all languages. Block elements beyond the
/// representatives are exchangeable with them, so the pool search stands in
/// for the unbounded one; the pool is surfaced in the report.
pub(crate) fn candidate_pool(collection: &Collection, depth: usize) -> Vec<Element> {
    let languages = collection
        .explicit_languages()
        .expect("pool search needs an explicit collection");
    let mut exceptions: BTreeSet<Element> = BTreeSet::new();
    let mut block_columns: BTreeSet<u32> = BTreeSet::new();
    for nl in languages {
        exceptions.extend(nl.language.adds().iter().copied());
        exceptions.extend(nl.language.removes().iter().copied());
        block_columns.extend(nl.language.blocks().iter().copied());
    }

    let mut pool: BTreeSet<Element> = exceptions.clone();
    for &c in &block_columns {
        let mut taken = 0;
        let mut k = 0;
        while taken < depth {
            let e = Element::new(c, k);
            if !exceptions.contains(&e) {
                pool.insert(e);
                taken += 1;
            }
            k += 1;
        }
    }

    let mut outside = 0;
    let mut id = 0u64;
    while outside < depth {
        let e = Element::from_id(id);
        if !exceptions.contains(&e)
            && languages.iter().all(|nl| !nl.language.contains(e))
        {
            pool.insert(e);
            outside += 1;
        }
        id += 1;
    }

    pool.into_iter().collect()
}

fn qualifies(collection: &Collection, sample: &SampleSet, noise: usize) -> bool {
    if consistent_set(collection, sample, noise).is_empty() {
        return false;
    }
    noisy_closure(collection, sample, noise).is_finite()
}

/// Searches subsets of the candidate pool for the largest qualifying set.
/// Qualification is downward closed (any subset of a qualifying set
/// qualifies), so the levelwise search is exhaustive: a size with no
/// qualifying set rules out every larger size.
pub fn closure_dimension(
    collection: &Collection,
    noise: usize,
    max_size: usize,
    pool_depth: usize,
) -> DimensionReport {
    if collection.is_column_family() {
        return column_family_dimension(noise, max_size);
    }
    let pool = candidate_pool(collection, pool_depth.max(1));
    let cap = max_size.min(pool.len());

    if !qualifies(collection, &SampleSet::new(), noise) {
        return DimensionReport {
            verdict: DimensionVerdict::NoWitness,
            witness: SampleSet::new(),
            searched_pool: pool,
            max_size_searched: cap,
        };
    }

    // Each level keeps every qualifying set of that size as sorted pool
    // indices, in lexicographic order.
    let mut level: Vec<Vec<usize>> = vec![vec![]];
    for size in 1..=cap {
        let mut next: Vec<Vec<usize>> = Vec::new();
        for base in &level {
            let from = base.last().map_or(0, |&last| last + 1);
            for extra in from..pool.len() {
                let mut candidate = base.clone();
                candidate.push(extra);
                let sample: SampleSet = candidate.iter().map(|&i| pool[i]).collect();
                if qualifies(collection, &sample, noise) {
                    next.push(candidate);
                }
            }
        }
        if next.is_empty() {
            let witness: SampleSet = level[0].iter().map(|&i| pool[i]).collect();
            return DimensionReport {
                verdict: DimensionVerdict::Exact(size - 1),
                witness,
                searched_pool: pool,
                max_size_searched: cap,
            };
        }
        level = next;
    }

    let witness: SampleSet = level[0].iter().map(|&i| pool[i]).collect();
    let verdict = if cap == pool.len() {
        // The whole pool was searched; nothing larger exists within it.
        DimensionVerdict::Exact(cap)
    } else {
        DimensionVerdict::AtLeast(cap)
    };
    DimensionReport {
        verdict,
        witness,
        searched_pool: pool,
        max_size_searched: cap,
    }
}

/// Dimension of the column family. Without noise only the empty set has a
/// finite closure. With noise, spreading at most `noise` strings per column
/// keeps the closure empty at any size, so the dimension is unbounded and
/// the honest verdict is `AtLeast(max_size)`.
pub fn column_family_dimension(noise: usize, max_size: usize) -> DimensionReport {
    if noise == 0 {
        return DimensionReport {
            verdict: DimensionVerdict::Exact(0),
            witness: SampleSet::new(),
            searched_pool: Vec::new(),
            max_size_searched: max_size,
        };
    }
    let mut witness = SampleSet::new();
    let mut column = 0;
    while witness.len() < max_size {
        for k in 0..noise {
            if witness.len() == max_size {
                break;
            }
            witness.insert(Element::new(column, k as u32));
        }
        column += 1;
    }
    DimensionReport {
        verdict: DimensionVerdict::AtLeast(max_size),
        searched_pool: witness.iter().copied().collect(),
        witness,
        max_size_searched: max_size,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShrinkBranch {
    /// One part of the partition already had a finite lower-level closure
    /// and kept the consistent-set containment.
    Direct,
    /// Built from one fresh element of each part's lower-level closure.
    Constructed,
}

/// Does every language consistent with `big` at level `noise` stay
/// consistent with `small` at level 1?
fn consistency_contained(
    collection: &Collection,
    big: &SampleSet,
    noise: usize,
    small: &SampleSet,
) -> bool {
    match (
        consistent_set(collection, big, noise),
        consistent_set(collection, small, 1),
    ) {
        (ConsistentFamily::Explicit(outer), ConsistentFamily::Explicit(inner)) => {
            let inner_names: BTreeSet<&str> = inner.iter().map(|nl| nl.name.as_str()).collect();
            outer.iter().all(|nl| inner_names.contains(nl.name.as_str()))
        }
        (ConsistentFamily::Columns(outer), ConsistentFamily::Columns(inner)) => {
            // Enumerate exclusions of touched columns: a union consistent
            // with `big` must not miss `small` twice.
            let touched: Vec<u32> = outer
                .hits()
                .keys()
                .chain(inner.hits().keys())
                .copied()
                .collect::<std::collections::BTreeSet<u32>>()
                .into_iter()
                .collect();
            for mask in 0u64..(1 << touched.len()) {
                let excluded: BTreeSet<u32> = touched
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| mask & (1 << bit) != 0)
                    .map(|(_, &c)| c)
                    .collect();
                let big_missed: usize = excluded
                    .iter()
                    .map(|c| outer.hits().get(c).copied().unwrap_or(0))
                    .sum();
                if big_missed > noise {
                    continue;
                }
                let small_missed: usize = excluded
                    .iter()
                    .map(|c| inner.hits().get(c).copied().unwrap_or(0))
                    .sum();
                if small_missed > 1 {
                    return false;
                }
            }
            true
        }
        _ => unreachable!("one collection, one family shape"),
    }
}

/// Shrinks a square witness: a set of size `k*k` qualifying at level
/// `noise >= 2` becomes a set of size at most `k` whose level-`noise - 1`
/// closure is finite and whose level-1 consistent set still covers every
/// language consistent with the input.
///
/// The input is split by canonical order into `k` parts of size `k`. A part
/// whose lower-level closure is finite is returned directly when it keeps
/// the containment. Otherwise the result takes one fresh element from each
/// part's lower-level closure, skipping parts with nothing left to give:
/// a language missing two picked elements would miss their two disjoint
/// parts `noise` times each, which the original witness cannot afford, so
/// at most one pick escapes any consistent language no matter how many
/// parts contributed.
pub fn shrink_witness(
    collection: &Collection,
    noise: usize,
    sample: &SampleSet,
) -> Result<(ShrinkBranch, SampleSet), Error> {
    if noise < 2 {
        return Err(Error::ShrinkNoiseTooSmall(noise));
    }
    let n = sample.len();
    let k = (n as f64).sqrt() as usize;
    let k = if (k + 1) * (k + 1) <= n { k + 1 } else { k };
    if n == 0 || k * k != n {
        return Err(Error::NotPerfectSquare(n));
    }
    if consistent_set(collection, sample, noise).is_empty()
        || !noisy_closure(collection, sample, noise).is_finite()
    {
        return Err(Error::ShrinkPrecondition);
    }

    let ordered: Vec<Element> = sample.iter().copied().collect();
    let parts: Vec<SampleSet> = ordered.chunks(k).map(|c| c.iter().copied().collect()).collect();

    for part in &parts {
        if noisy_closure(collection, part, noise - 1).is_finite()
            && consistency_contained(collection, sample, noise, part)
        {
            return Ok((ShrinkBranch::Direct, part.clone()));
        }
    }

    let mut picked: Vec<Element> = Vec::with_capacity(k);
    for part in &parts {
        let closure = match noisy_closure(collection, part, noise - 1) {
            ClosureResult::EmptyConsistent => continue,
            ClosureResult::Value(d) => d,
        };
        if let Some(fresh) = closure
            .enumerate(picked.len() + 1)
            .into_iter()
            .find(|e| !picked.contains(e))
        {
            picked.push(fresh);
        }
    }
    Ok((ShrinkBranch::Constructed, picked.into_iter().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::NamedLanguage;
    use crate::fixtures;
    use crate::lang::SymbolicLanguage;

    fn sample(pairs: &[(u32, u32)]) -> SampleSet {
        pairs.iter().map(|&(c, k)| Element::new(c, k)).collect()
    }

    #[test]
    fn crossing_pair_dimensions() {
        let c = fixtures::c_ex();

        let at0 = closure_dimension(&c, 0, 10, 3);
        assert_eq!(at0.verdict, DimensionVerdict::Exact(4));
        assert_eq!(at0.witness, sample(&[(0, 0), (0, 1), (1, 0), (1, 1)]));

        let at1 = closure_dimension(&c, 1, 10, 3);
        assert_eq!(at1.verdict, DimensionVerdict::Exact(6));
        assert_eq!(
            at1.witness,
            sample(&[(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)])
        );
    }

    #[test]
    fn shared_exception_pair_dimension() {
        let at2 = closure_dimension(&fixtures::c_sh(), 2, 12, 4);
        assert_eq!(at2.verdict, DimensionVerdict::Exact(8));
    }

    #[test]
    fn single_language_has_no_witness() {
        let single = Collection::explicit(
            "single",
            vec![NamedLanguage {
                name: "L1".into(),
                language: SymbolicLanguage::new(
                    [0],
                    [Element::new(1, 0), Element::new(1, 1)],
                    [],
                )
                .unwrap(),
            }],
        )
        .unwrap();
        let report = closure_dimension(&single, 0, 10, 3);
        assert_eq!(report.verdict, DimensionVerdict::NoWitness);
        assert!(report.witness.is_empty());
    }

    #[test]
    fn witness_qualifies_and_is_lex_smallest() {
        let c = fixtures::c_ex();
        let report = closure_dimension(&c, 1, 10, 3);
        assert!(!consistent_set(&c, &report.witness, 1).is_empty());
        assert!(noisy_closure(&c, &report.witness, 1).is_finite());
        // Any qualifying set of the same size drawn from the pool is
        // lexicographically at or after the witness.
        let ids: Vec<u64> = report.witness.iter().map(|e| e.id()).collect();
        assert!(ids.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn column_family_dimensions() {
        let at0 = column_family_dimension(0, 20);
        assert_eq!(at0.verdict, DimensionVerdict::Exact(0));
        assert!(at0.witness.is_empty());

        let at1 = column_family_dimension(1, 20);
        assert_eq!(at1.verdict, DimensionVerdict::AtLeast(20));
        let want: SampleSet = (0..20).map(|c| Element::new(c, 0)).collect();
        assert_eq!(at1.witness, want);

        let at2 = column_family_dimension(2, 6);
        assert_eq!(at2.verdict, DimensionVerdict::AtLeast(6));
        assert_eq!(
            at2.witness,
            sample(&[(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)])
        );
    }

    #[test]
    fn column_family_witness_closure_stays_empty() {
        for (noise, max_size) in [(1usize, 7usize), (2, 7), (3, 10)] {
            let report = column_family_dimension(noise, max_size);
            assert_eq!(report.witness.len(), max_size);
            let closure = crate::closure::column_closure(&report.witness, noise);
            assert!(closure.is_finite());
            assert_eq!(closure.descriptor(), crate::lang::SetDescriptor::empty());
        }
    }

    #[test]
    fn shrink_direct_branch_on_shared_exceptions() {
        let c = fixtures::c_sh();
        let s = sample(&[(0, 0), (1, 0), (2, 0), (2, 1)]);
        let (branch, result) = shrink_witness(&c, 2, &s).unwrap();
        assert_eq!(branch, ShrinkBranch::Direct);
        assert_eq!(result, sample(&[(0, 0), (1, 0)]));
    }

    #[test]
    fn budget_limited_search_reports_at_least() {
        let report = closure_dimension(&fixtures::c_sh(), 2, 5, 4);
        assert_eq!(report.verdict, DimensionVerdict::AtLeast(5));
        assert_eq!(report.witness.len(), 5);
        assert!(noisy_closure(&fixtures::c_sh(), &report.witness, 2).is_finite());
    }

    #[test]
    fn shrink_column_family_square_with_interleaved_ids() {
        // Ids interleave the two columns, so each part of the id-order
        // partition straddles both; the part closures are empty and the
        // direct branch fires with the first part, whose level-1 consistent
        // unions coincide with the witness's level-2 ones.
        let cf = fixtures::column_family();
        let s = sample(&[(0, 0), (0, 1), (1, 0), (1, 1)]);
        let (branch, result) = shrink_witness(&cf, 2, &s).unwrap();
        assert_eq!(branch, ShrinkBranch::Direct);
        assert_eq!(result, sample(&[(0, 0), (1, 0)]));
    }

    #[test]
    fn shrink_constructed_branch_on_column_family() {
        // Parts by canonical order are whole columns here, so both part
        // closures are infinite and the construction picks fresh elements.
        let cf = fixtures::column_family();
        let s = sample(&[(0, 0), (0, 1), (1, 1), (1, 2)]);
        let (branch, result) = shrink_witness(&cf, 2, &s).unwrap();
        assert_eq!(branch, ShrinkBranch::Constructed);
        assert_eq!(result, sample(&[(0, 0), (1, 0)]));
    }

    #[test]
    fn shrink_postconditions_hold() {
        let cf = fixtures::column_family();
        let s = sample(&[(0, 0), (0, 1), (1, 1), (1, 2)]);
        let (_, result) = shrink_witness(&cf, 2, &s).unwrap();
        assert!(result.len() <= 2);
        assert!(noisy_closure(&cf, &result, 1).is_finite());
        assert!(consistency_contained(&cf, &s, 2, &result));
    }

    #[test]
    fn shrink_rejects_non_squares_and_bad_noise() {
        let c = fixtures::c_sh();
        assert_eq!(
            shrink_witness(&c, 2, &sample(&[(0, 0), (1, 0), (2, 0)])),
            Err(Error::NotPerfectSquare(3))
        );
        assert_eq!(
            shrink_witness(&c, 1, &sample(&[(2, 0)])),
            Err(Error::ShrinkNoiseTooSmall(1))
        );
        // Closure of four strings nobody contains is the empty-consistent
        // case, which fails the preconditions.
        assert_eq!(
            shrink_witness(&c, 2, &sample(&[(7, 0), (7, 1), (8, 0), (8, 1)])),
            Err(Error::ShrinkPrecondition)
        );
    }

    #[test]
    fn size_one_witness_shrinks_to_itself() {
        let c = fixtures::c_sh();
        let s = sample(&[(2, 0)]);
        let (branch, result) = shrink_witness(&c, 2, &s).unwrap();
        assert_eq!(branch, ShrinkBranch::Direct);
        assert_eq!(result, s);
    }
}
