//! Small fixed collections used across tests, the check suites, and the
//! command-line walkthroughs.

use crate::collection::{Collection, NamedLanguage};
use crate::lang::SymbolicLanguage;
use crate::universe::Element;

fn elems(pairs: &[(u32, u32)]) -> Vec<Element> {
    pairs.iter().map(|&(c, k)| Element::new(c, k)).collect()
}

fn named(name: &str, blocks: &[u32], adds: &[(u32, u32)]) -> NamedLanguage {
    NamedLanguage {
        name: name.to_string(),
        language: SymbolicLanguage::new(blocks.iter().copied(), elems(adds), []).unwrap(),
    }
}

/// Two crossing languages: column 0 plus two strings of column 1, and
/// column 1 plus two strings of column 0. They intersect in four strings.
pub fn c_ex() -> Collection {
    Collection::explicit(
        "c_ex",
        vec![
            named("L1", &[0], &[(1, 0), (1, 1)]),
            named("L2", &[1], &[(0, 0), (0, 1)]),
        ],
    )
    .unwrap()
}

/// Two languages sharing a four-string exception set in column 2.
pub fn c_sh() -> Collection {
    let shared = [(2, 0), (2, 1), (2, 2), (2, 3)];
    Collection::explicit(
        "c_sh",
        vec![named("M1", &[0], &shared), named("M2", &[1], &shared)],
    )
    .unwrap()
}

/// The column family, all nonempty unions of columns.
pub fn column_family() -> Collection {
    Collection::column_family("columns")
}

/// Three nested collections of shared-exception pairs. Each level adds a
/// pair overlapping in one more string of column 2, so the level-1 closure
/// dimensions increase strictly: 3, 4, 5.
pub fn chain_collections() -> Vec<Collection> {
    let f1 = [(2, 0)];
    let f2 = [(2, 0), (2, 1)];
    let f3 = [(2, 0), (2, 1), (2, 2)];
    let level0 = vec![named("A", &[0], &f1), named("B", &[1], &f1)];
    let mut level1 = level0.clone();
    level1.extend([named("C", &[3], &f2), named("D", &[4], &f2)]);
    let mut level2 = level1.clone();
    level2.extend([named("E", &[5], &f3), named("G", &[6], &f3)]);
    vec![
        Collection::explicit("d0", level0).unwrap(),
        Collection::explicit("d1", level1).unwrap(),
        Collection::explicit("d2", level2).unwrap(),
    ]
}
