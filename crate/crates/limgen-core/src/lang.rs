//! Symbolic representation of infinite languages and of the finite or
//! infinite sets produced by intersecting them.
//!
//! A language is a nonempty finite union of whole columns `B_c`, adjusted by
//! a finite add set and a finite remove set. The canonical form keeps adds
//! outside the blocks, removes inside them, and never both on one element,
//! so structural equality coincides with set equality.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use crate::error::Error;
use crate::universe::Element;

/// An infinite language: `(union of blocks ∪ adds) \ removes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicLanguage {
    blocks: BTreeSet<u32>,
    adds: BTreeSet<Element>,
    removes: BTreeSet<Element>,
}

/// Drops adds covered by a block or cancelled by a remove, and removes that
/// fall outside every block. The denoted set is unchanged.
fn canonical_parts(
    blocks: &BTreeSet<u32>,
    adds: BTreeSet<Element>,
    removes: BTreeSet<Element>,
) -> (BTreeSet<Element>, BTreeSet<Element>) {
    let kept_adds: BTreeSet<Element> = adds
        .iter()
        .filter(|e| !blocks.contains(&e.column()) && !removes.contains(e))
        .copied()
        .collect();
    let kept_removes: BTreeSet<Element> = removes
        .into_iter()
        .filter(|e| blocks.contains(&e.column()))
        .collect();
    (kept_adds, kept_removes)
}

impl SymbolicLanguage {
    /// Builds the canonical form; errors when the block set is empty, since
    /// a language must be infinite.
    pub fn new(
        blocks: impl IntoIterator<Item = u32>,
        adds: impl IntoIterator<Item = Element>,
        removes: impl IntoIterator<Item = Element>,
    ) -> Result<SymbolicLanguage, Error> {
        let blocks: BTreeSet<u32> = blocks.into_iter().collect();
        if blocks.is_empty() {
            return Err(Error::FiniteLanguage);
        }
        let adds: BTreeSet<Element> = adds.into_iter().collect();
        let removes: BTreeSet<Element> = removes.into_iter().collect();
        let (adds, removes) = canonical_parts(&blocks, adds, removes);
        Ok(SymbolicLanguage {
            blocks,
            adds,
            removes,
        })
    }

    pub fn from_blocks(blocks: impl IntoIterator<Item = u32>) -> Result<SymbolicLanguage, Error> {
        SymbolicLanguage::new(blocks, [], [])
    }

    pub fn blocks(&self) -> &BTreeSet<u32> {
        &self.blocks
    }

    pub fn adds(&self) -> &BTreeSet<Element> {
        &self.adds
    }

    pub fn removes(&self) -> &BTreeSet<Element> {
        &self.removes
    }

    pub fn contains(&self, e: Element) -> bool {
        if self.removes.contains(&e) {
            return false;
        }
        self.blocks.contains(&e.column()) || self.adds.contains(&e)
    }

    pub fn descriptor(&self) -> SetDescriptor {
        SetDescriptor::Symbolic {
            blocks: self.blocks.clone(),
            adds: self.adds.clone(),
            removes: self.removes.clone(),
        }
    }

    /// The `n` smallest members in canonical (id) order.
    pub fn enumerate(&self, n: usize) -> Vec<Element> {
        self.stream().take(n).collect()
    }

    pub fn stream(&self) -> ElementStream<'_> {
        ElementStream::symbolic(&self.blocks, &self.adds, &self.removes)
    }
}

/// A finite or infinite subset of the universe, such as an intersection of
/// languages or a noisy closure. Infinite exactly when it has a block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetDescriptor {
    Finite(BTreeSet<Element>),
    Symbolic {
        blocks: BTreeSet<u32>,
        adds: BTreeSet<Element>,
        removes: BTreeSet<Element>,
    },
}

impl SetDescriptor {
    pub fn finite(elements: impl IntoIterator<Item = Element>) -> SetDescriptor {
        SetDescriptor::Finite(elements.into_iter().collect())
    }

    /// Canonicalizes; an empty block set degenerates to a finite set.
    pub fn symbolic(
        blocks: impl IntoIterator<Item = u32>,
        adds: impl IntoIterator<Item = Element>,
        removes: impl IntoIterator<Item = Element>,
    ) -> SetDescriptor {
        let blocks: BTreeSet<u32> = blocks.into_iter().collect();
        let adds: BTreeSet<Element> = adds.into_iter().collect();
        let removes: BTreeSet<Element> = removes.into_iter().collect();
        let (adds, removes) = canonical_parts(&blocks, adds, removes);
        if blocks.is_empty() {
            SetDescriptor::Finite(adds)
        } else {
            SetDescriptor::Symbolic {
                blocks,
                adds,
                removes,
            }
        }
    }

    pub fn empty() -> SetDescriptor {
        SetDescriptor::Finite(BTreeSet::new())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, SetDescriptor::Finite(_))
    }

    /// Number of elements for finite descriptors.
    pub fn finite_len(&self) -> Option<usize> {
        match self {
            SetDescriptor::Finite(set) => Some(set.len()),
            SetDescriptor::Symbolic { .. } => None,
        }
    }

    pub fn finite_elements(&self) -> Option<&BTreeSet<Element>> {
        match self {
            SetDescriptor::Finite(set) => Some(set),
            SetDescriptor::Symbolic { .. } => None,
        }
    }

    pub fn contains(&self, e: Element) -> bool {
        match self {
            SetDescriptor::Finite(set) => set.contains(&e),
            SetDescriptor::Symbolic {
                blocks,
                adds,
                removes,
            } => {
                if removes.contains(&e) {
                    return false;
                }
                blocks.contains(&e.column()) || adds.contains(&e)
            }
        }
    }

    /// Exact intersection. Blocks intersect; extra elements can only come
    /// from the add sets; removes merge over the surviving blocks. The result
    /// is finite exactly when the block intersection is empty.
    pub fn intersect(&self, other: &SetDescriptor) -> SetDescriptor {
        match (self, other) {
            (SetDescriptor::Finite(a), _) => {
                SetDescriptor::finite(a.iter().copied().filter(|e| other.contains(*e)))
            }
            (_, SetDescriptor::Finite(b)) => {
                SetDescriptor::finite(b.iter().copied().filter(|e| self.contains(*e)))
            }
            (
                SetDescriptor::Symbolic {
                    blocks: ba,
                    adds: aa,
                    removes: ra,
                },
                SetDescriptor::Symbolic {
                    blocks: bb,
                    adds: ab,
                    removes: rb,
                },
            ) => {
                let blocks: BTreeSet<u32> = ba.intersection(bb).copied().collect();
                let adds = aa
                    .union(ab)
                    .copied()
                    .filter(|e| self.contains(*e) && other.contains(*e));
                let removes = ra.union(rb).copied();
                SetDescriptor::symbolic(blocks, adds, removes)
            }
        }
    }

    /// The `n` smallest members in canonical (id) order. Finite descriptors
    /// smaller than `n` yield all their members.
    pub fn enumerate(&self, n: usize) -> Vec<Element> {
        self.stream().take(n).collect()
    }

    pub fn stream(&self) -> ElementStream<'_> {
        match self {
            SetDescriptor::Finite(set) => ElementStream::finite(set),
            SetDescriptor::Symbolic {
                blocks,
                adds,
                removes,
            } => ElementStream::symbolic(blocks, adds, removes),
        }
    }
}

impl From<&SymbolicLanguage> for SetDescriptor {
    fn from(lang: &SymbolicLanguage) -> SetDescriptor {
        lang.descriptor()
    }
}

/// Ascending-id iterator over a descriptor's members: a heap merge of the
/// per-block streams and the add list, skipping removes.
pub struct ElementStream<'a>(StreamInner<'a>);

enum StreamInner<'a> {
    Finite(std::collections::btree_set::Iter<'a, Element>),
    Symbolic {
        removes: &'a BTreeSet<Element>,
        heap: BinaryHeap<Reverse<(u64, Head)>>,
        adds: std::collections::btree_set::Iter<'a, Element>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Head {
    Block { column: u32, index: u32 },
    Add(Element),
}

fn push_block_head(
    heap: &mut BinaryHeap<Reverse<(u64, Head)>>,
    removes: &BTreeSet<Element>,
    column: u32,
    from_index: u32,
) {
    let mut k = from_index;
    while removes.contains(&Element::new(column, k)) {
        k += 1;
    }
    let e = Element::new(column, k);
    heap.push(Reverse((e.id(), Head::Block { column, index: k })));
}

impl<'a> ElementStream<'a> {
    fn finite(set: &'a BTreeSet<Element>) -> ElementStream<'a> {
        ElementStream(StreamInner::Finite(set.iter()))
    }

    fn symbolic(
        blocks: &'a BTreeSet<u32>,
        adds: &'a BTreeSet<Element>,
        removes: &'a BTreeSet<Element>,
    ) -> ElementStream<'a> {
        let mut heap = BinaryHeap::new();
        for &column in blocks {
            push_block_head(&mut heap, removes, column, 0);
        }
        let mut adds = adds.iter();
        if let Some(&first) = adds.next() {
            heap.push(Reverse((first.id(), Head::Add(first))));
        }
        ElementStream(StreamInner::Symbolic {
            removes,
            heap,
            adds,
        })
    }
}

impl Iterator for ElementStream<'_> {
    type Item = Element;

    fn next(&mut self) -> Option<Element> {
        match &mut self.0 {
            StreamInner::Finite(iter) => iter.next().copied(),
            StreamInner::Symbolic {
                removes,
                heap,
                adds,
            } => {
                let Reverse((_, head)) = heap.pop()?;
                match head {
                    Head::Block { column, index } => {
                        push_block_head(heap, removes, column, index + 1);
                        Some(Element::new(column, index))
                    }
                    Head::Add(e) => {
                        if let Some(&next) = adds.next() {
                            heap.push(Reverse((next.id(), Head::Add(next))));
                        }
                        Some(e)
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elems(pairs: &[(u32, u32)]) -> Vec<Element> {
        pairs.iter().map(|&(c, k)| Element::new(c, k)).collect()
    }

    fn l1() -> SymbolicLanguage {
        SymbolicLanguage::new([0], elems(&[(1, 0), (1, 1)]), []).unwrap()
    }

    fn l2() -> SymbolicLanguage {
        SymbolicLanguage::new([1], elems(&[(0, 0), (0, 1)]), []).unwrap()
    }

    #[test]
    fn membership_block_add_remove() {
        let lang = l1();
        assert!(lang.contains(Element::new(0, 7)));
        assert!(lang.contains(Element::new(1, 0)));
        assert!(!lang.contains(Element::new(1, 2)));

        let with_remove =
            SymbolicLanguage::new([0], [], elems(&[(0, 3)])).unwrap();
        assert!(!with_remove.contains(Element::new(0, 3)));
        assert!(with_remove.contains(Element::new(0, 4)));
    }

    #[test]
    fn canonicalize_drops_covered_adds_and_stray_removes() {
        let lang = SymbolicLanguage::new([0], elems(&[(0, 5)]), []).unwrap();
        assert!(lang.adds().is_empty());

        let lang = SymbolicLanguage::new([0], [], elems(&[(1, 0)])).unwrap();
        assert!(lang.removes().is_empty());
    }

    #[test]
    fn empty_blocks_rejected() {
        assert_eq!(
            SymbolicLanguage::new([], elems(&[(0, 0)]), []),
            Err(Error::FiniteLanguage)
        );
    }

    #[test]
    fn add_remove_collision_stays_out() {
        // Same element added and removed: not a member either way.
        let outside = SymbolicLanguage::new([0], elems(&[(1, 1)]), elems(&[(1, 1)])).unwrap();
        assert!(!outside.contains(Element::new(1, 1)));
        assert!(outside.adds().is_empty() && outside.removes().is_empty());

        let covered = SymbolicLanguage::new([0], elems(&[(0, 2)]), elems(&[(0, 2)])).unwrap();
        assert!(!covered.contains(Element::new(0, 2)));
        assert!(covered.adds().is_empty());
        assert_eq!(covered.removes().len(), 1);
    }

    #[test]
    fn intersect_two_cross_languages_is_finite() {
        let got = l1().descriptor().intersect(&l2().descriptor());
        let want = SetDescriptor::finite(elems(&[(0, 0), (0, 1), (1, 0), (1, 1)]));
        assert_eq!(got, want);
        // Window brute force over ids 0..=100 against plain membership.
        for id in 0..=100 {
            let e = Element::from_id(id);
            assert_eq!(got.contains(e), l1().contains(e) && l2().contains(e));
        }
    }

    #[test]
    fn intersect_idempotent_and_block_wise() {
        let a = l1().descriptor();
        assert_eq!(a.intersect(&a), a);

        let wide = SymbolicLanguage::from_blocks([0, 1]).unwrap().descriptor();
        let tall = SymbolicLanguage::from_blocks([1, 2]).unwrap().descriptor();
        assert_eq!(
            wide.intersect(&tall),
            SetDescriptor::symbolic([1], [], [])
        );
    }

    #[test]
    fn enumerate_canonical_order() {
        assert_eq!(
            l1().enumerate(5),
            elems(&[(0, 0), (1, 0), (0, 1), (1, 1), (0, 2)])
        );
        let single = SetDescriptor::finite(elems(&[(0, 0)]));
        assert_eq!(single.enumerate(3), elems(&[(0, 0)]));
        assert_eq!(l1().enumerate(0), vec![]);
    }

    #[test]
    fn enumerate_skips_removes() {
        let lang = SymbolicLanguage::new([0], [], elems(&[(0, 0), (0, 2)])).unwrap();
        assert_eq!(lang.enumerate(3), elems(&[(0, 1), (0, 3), (0, 4)]));
    }

    #[test]
    fn stream_is_ascending_and_members_only() {
        let lang =
            SymbolicLanguage::new([0, 3], elems(&[(2, 1), (5, 0)]), elems(&[(0, 1), (3, 2)]))
                .unwrap();
        let out = lang.enumerate(40);
        for pair in out.windows(2) {
            assert!(pair[0] < pair[1]);
        }
        for e in &out {
            assert!(lang.contains(*e));
        }
    }
}
