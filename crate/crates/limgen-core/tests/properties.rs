//! Property tests over the universe encoding and the symbolic set algebra.

use std::collections::BTreeSet;

use proptest::prelude::*;

use limgen_core::{Element, SetDescriptor, SymbolicLanguage};

fn arb_element() -> impl Strategy<Value = Element> {
    (0u32..12, 0u32..8).prop_map(|(c, k)| Element::new(c, k))
}

fn arb_language() -> impl Strategy<Value = SymbolicLanguage> {
    (
        proptest::collection::btree_set(0u32..8, 1..4),
        proptest::collection::vec(arb_element(), 0..6),
        proptest::collection::vec(arb_element(), 0..6),
    )
        .prop_map(|(blocks, adds, removes)| {
            SymbolicLanguage::new(blocks, adds, removes).expect("nonempty blocks")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_round_trips(id in 0u64..2_000_000) {
        prop_assert_eq!(Element::from_id(id).id(), id);
    }

    #[test]
    fn pairing_is_injective(a in arb_element(), b in arb_element()) {
        prop_assert_eq!(a.id() == b.id(), a == b);
    }

    #[test]
    fn intersection_agrees_with_membership(a in arb_language(), b in arb_language()) {
        let both = a.descriptor().intersect(&b.descriptor());
        for id in 0..=500u64 {
            let e = Element::from_id(id);
            prop_assert_eq!(both.contains(e), a.contains(e) && b.contains(e));
        }
    }

    #[test]
    fn intersection_commutes_and_associates(
        a in arb_language(),
        b in arb_language(),
        c in arb_language(),
    ) {
        let (a, b, c) = (a.descriptor(), b.descriptor(), c.descriptor());
        prop_assert_eq!(a.intersect(&b), b.intersect(&a));
        prop_assert_eq!(a.intersect(&b).intersect(&c), a.intersect(&b.intersect(&c)));
    }

    #[test]
    fn canonical_form_preserves_denotation(
        blocks in proptest::collection::btree_set(0u32..8, 1..4),
        adds in proptest::collection::btree_set(arb_element(), 0..6),
        removes in proptest::collection::btree_set(arb_element(), 0..6),
    ) {
        let lang = SymbolicLanguage::new(
            blocks.clone(),
            adds.clone(),
            removes.clone(),
        ).expect("nonempty blocks");
        let mut window: BTreeSet<Element> = (0..=500).map(Element::from_id).collect();
        window.extend(adds.iter().copied());
        window.extend(removes.iter().copied());
        for e in window {
            let raw = !removes.contains(&e) && (blocks.contains(&e.column()) || adds.contains(&e));
            prop_assert_eq!(lang.contains(e), raw, "at {}", e);
        }
    }

    #[test]
    fn enumeration_is_ascending_members(lang in arb_language(), n in 0usize..80) {
        let out = lang.enumerate(n);
        prop_assert_eq!(out.len(), n);
        for pair in out.windows(2) {
            prop_assert!(pair[0] < pair[1]);
        }
        for e in out {
            prop_assert!(lang.contains(e));
        }
    }

    #[test]
    fn finite_descriptors_enumerate_everything(
        elements in proptest::collection::btree_set(arb_element(), 0..10),
        extra in 0usize..5,
    ) {
        let d = SetDescriptor::finite(elements.clone());
        let out = d.enumerate(elements.len() + extra);
        prop_assert_eq!(out.len(), elements.len());
        let back: BTreeSet<Element> = out.into_iter().collect();
        prop_assert_eq!(back, elements);
    }

    #[test]
    fn intersection_finite_iff_no_shared_block(a in arb_language(), b in arb_language()) {
        let both = a.descriptor().intersect(&b.descriptor());
        let shared: BTreeSet<u32> = a.blocks().intersection(b.blocks()).copied().collect();
        prop_assert_eq!(both.is_finite(), shared.is_empty());
    }
}
