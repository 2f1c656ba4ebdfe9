//! Generator algorithms.
//!
//! The closure generator emits the smallest unseen element of the noisy
//! closure of what it has observed; once the observed set outgrows the
//! closure dimension the closure is infinite and every output is a correct
//! unseen string of any consistent target. The chain generator walks an
//! increasing sequence of collections and plays the closure generator of the
//! highest level whose settle time has passed.

use crate::closure::{noisy_closure, ClosureResult, SampleSet};
use crate::collection::Collection;
use crate::dimension::{closure_dimension, DimensionVerdict};
use crate::error::Error;
use crate::lang::SymbolicLanguage;
use crate::universe::Element;

/// One emitted output plus chain bookkeeping when a chain is in play.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorStep {
    pub output: Element,
    pub chain_index: Option<usize>,
    /// Set when the step index ran past the stored chain prefix.
    pub truncated: bool,
}

/// A generator maps the history observed so far to an output string.
/// `reset` returns it to the empty history; the refutation adversary relies
/// on that to query prefixes independently.
pub trait Generator {
    fn observe(&mut self, x: Element);
    fn emit(&mut self) -> Result<GeneratorStep, Error>;
    fn reset(&mut self) -> Result<(), Error>;
}

/// Runs a generator on a whole prefix from a fresh state.
pub fn query_fresh(g: &mut dyn Generator, prefix: &[Element]) -> Result<Element, Error> {
    g.reset()?;
    for &x in prefix {
        g.observe(x);
    }
    Ok(g.emit()?.output)
}

#[derive(Debug, Clone, Default)]
struct History {
    order: Vec<Element>,
    sample: SampleSet,
}

impl History {
    fn push(&mut self, x: Element) {
        self.order.push(x);
        self.sample.insert(x);
    }

    fn clear(&mut self) {
        self.order.clear();
        self.sample.clear();
    }

    fn len(&self) -> usize {
        self.order.len()
    }
}

fn smallest_unseen_universe(sample: &SampleSet) -> Element {
    (0u64..)
        .map(Element::from_id)
        .find(|e| !sample.contains(e))
        .expect("finite sample cannot cover the universe")
}

fn closure_output(collection: &Collection, noise: usize, sample: &SampleSet) -> Element {
    if let ClosureResult::Value(closure) = noisy_closure(collection, sample, noise) {
        // The closure has at most `sample` many members seen, so one extra
        // candidate suffices when it is infinite.
        if let Some(fresh) = closure
            .stream()
            .take(sample.len() + 1)
            .find(|e| !sample.contains(e))
        {
            return fresh;
        }
    }
    smallest_unseen_universe(sample)
}

/// Emits the smallest unseen closure element, or the smallest unseen
/// universe element when the closure is used up or empty.
#[derive(Debug, Clone)]
pub struct ClosureGenerator {
    collection: Collection,
    noise: usize,
    history: History,
}

impl ClosureGenerator {
    pub fn new(collection: Collection, noise: usize) -> ClosureGenerator {
        ClosureGenerator {
            collection,
            noise,
            history: History::default(),
        }
    }

    pub fn noise(&self) -> usize {
        self.noise
    }

    pub fn collection(&self) -> &Collection {
        &self.collection
    }
}

impl Generator for ClosureGenerator {
    fn observe(&mut self, x: Element) {
        self.history.push(x);
    }

    fn emit(&mut self) -> Result<GeneratorStep, Error> {
        if self.history.len() == 0 {
            return Err(Error::EmptyHistory);
        }
        Ok(GeneratorStep {
            output: closure_output(&self.collection, self.noise, &self.history.sample),
            chain_index: None,
            truncated: false,
        })
    }

    fn reset(&mut self) -> Result<(), Error> {
        self.history.clear();
        Ok(())
    }
}

/// A stored prefix of an increasing sequence of collections, each with a
/// certified settle time at the chain's noise level.
#[derive(Debug, Clone)]
pub struct Chain {
    collections: Vec<Collection>,
    settle_times: Vec<usize>,
    noise: usize,
}

impl Chain {
    /// Verifies structural containment and certifies every level's settle
    /// time from its closure dimension: an exact dimension is the settle
    /// time, no witness means zero, and a budget-limited answer is refused.
    pub fn new(
        collections: Vec<Collection>,
        noise: usize,
        max_size: usize,
        pool_depth: usize,
    ) -> Result<Chain, Error> {
        if collections.is_empty() {
            return Err(Error::NotAChain);
        }
        for pair in collections.windows(2) {
            let smaller = pair[0].explicit_languages().ok_or(Error::NotExplicit)?;
            let larger = pair[1].explicit_languages().ok_or(Error::NotExplicit)?;
            let all_in = smaller.iter().all(|nl| {
                larger
                    .iter()
                    .any(|other| other.language == nl.language)
            });
            if !all_in {
                return Err(Error::NotAChain);
            }
        }
        let mut settle_times = Vec::with_capacity(collections.len());
        for c in &collections {
            let settle = match closure_dimension(c, noise, max_size, pool_depth).verdict {
                DimensionVerdict::Exact(n) => n,
                DimensionVerdict::NoWitness => 0,
                DimensionVerdict::AtLeast(_) => return Err(Error::SettleNotCertifiable),
            };
            settle_times.push(settle);
        }
        Ok(Chain {
            collections,
            settle_times,
            noise,
        })
    }

    pub fn len(&self) -> usize {
        self.collections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.collections.is_empty()
    }

    pub fn noise(&self) -> usize {
        self.noise
    }

    pub fn settle_times(&self) -> &[usize] {
        &self.settle_times
    }

    pub fn collections(&self) -> &[Collection] {
        &self.collections
    }

    /// Level the generator plays at time `t`: the largest stored `j <= t`
    /// whose settle time has passed, or level 0.
    pub fn level_at(&self, t: usize) -> (usize, bool) {
        let truncated = t >= self.len();
        let level = (0..self.len())
            .filter(|&j| j <= t && self.settle_times[j] <= t)
            .max()
            .unwrap_or(0);
        (level, truncated)
    }
}

#[derive(Debug, Clone)]
pub struct ChainGenerator {
    chain: Chain,
    history: History,
}

impl ChainGenerator {
    pub fn new(chain: Chain) -> ChainGenerator {
        ChainGenerator {
            chain,
            history: History::default(),
        }
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }
}

impl Generator for ChainGenerator {
    fn observe(&mut self, x: Element) {
        self.history.push(x);
    }

    fn emit(&mut self) -> Result<GeneratorStep, Error> {
        if self.history.len() == 0 {
            return Err(Error::EmptyHistory);
        }
        let t = self.history.len() - 1;
        let (level, truncated) = self.chain.level_at(t);
        Ok(GeneratorStep {
            output: closure_output(
                &self.chain.collections[level],
                self.chain.noise,
                &self.history.sample,
            ),
            chain_index: Some(level),
            truncated,
        })
    }

    fn reset(&mut self) -> Result<(), Error> {
        self.history.clear();
        Ok(())
    }
}

/// The closure generator with its certified settle time: correct for every
/// consistent target and every enumeration with at most `noise` noise
/// strings at all times past the dimension.
pub fn uniform_noise_dependent(
    collection: &Collection,
    noise: usize,
    max_size: usize,
    pool_depth: usize,
) -> Result<(ClosureGenerator, usize), Error> {
    let settle = match closure_dimension(collection, noise, max_size, pool_depth).verdict {
        DimensionVerdict::Exact(n) => n,
        DimensionVerdict::NoWitness => 0,
        DimensionVerdict::AtLeast(_) => return Err(Error::SettleNotCertifiable),
    };
    Ok((ClosureGenerator::new(collection.clone(), noise), settle))
}

/// The chain generator with the settle time promised for a target living at
/// the given level: the larger of the level index and that level's settle
/// time.
pub fn nonuniform_noise_dependent(
    chain: &Chain,
    target: &SymbolicLanguage,
    level: usize,
) -> Result<(ChainGenerator, usize), Error> {
    if level >= chain.len() {
        return Err(Error::LevelOutOfRange {
            level,
            len: chain.len(),
        });
    }
    let present = chain.collections[level]
        .explicit_languages()
        .ok_or(Error::NotExplicit)?
        .iter()
        .any(|nl| nl.language == *target);
    if !present {
        return Err(Error::TargetNotInLevel);
    }
    let promised = level.max(chain.settle_times[level]);
    Ok((ChainGenerator::new(chain.clone()), promised))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::NamedLanguage;
    use crate::fixtures;

    fn feed(g: &mut dyn Generator, pairs: &[(u32, u32)]) -> Element {
        for &(c, k) in pairs {
            g.observe(Element::new(c, k));
        }
        g.emit().unwrap().output
    }

    #[test]
    fn closure_generator_emits_from_the_closure() {
        let mut g = ClosureGenerator::new(fixtures::c_ex(), 1);
        assert_eq!(feed(&mut g, &[(0, 2)]), Element::new(0, 0));
    }

    #[test]
    fn closure_generator_falls_back_when_closure_is_spent() {
        let mut g = ClosureGenerator::new(fixtures::c_ex(), 1);
        let out = feed(&mut g, &[(0, 2), (0, 0), (0, 1), (1, 0), (1, 1)]);
        // Closure minus the sample is empty; ids 0, 1, 2 are taken.
        assert_eq!(out, Element::new(2, 0));
    }

    #[test]
    fn singleton_collection_enumerates_its_language() {
        let single = Collection::explicit(
            "single",
            vec![NamedLanguage {
                name: "L1".into(),
                language: fixtures::c_ex().language("L1").unwrap().language.clone(),
            }],
        )
        .unwrap();
        let mut g = ClosureGenerator::new(single, 1);
        assert_eq!(feed(&mut g, &[(0, 0)]), Element::new(1, 0));
    }

    #[test]
    fn emit_before_observe_is_an_error() {
        let mut g = ClosureGenerator::new(fixtures::c_ex(), 1);
        assert_eq!(g.emit().unwrap_err(), Error::EmptyHistory);
    }

    #[test]
    fn deterministic_on_identical_histories() {
        let mut a = ClosureGenerator::new(fixtures::c_ex(), 1);
        let mut b = ClosureGenerator::new(fixtures::c_ex(), 1);
        let history = [(0, 2), (2, 0), (0, 0)];
        assert_eq!(feed(&mut a, &history), feed(&mut b, &history));
    }

    #[test]
    fn reset_restores_fresh_answers() {
        let mut g = ClosureGenerator::new(fixtures::c_ex(), 1);
        let first = feed(&mut g, &[(0, 2)]);
        g.reset().unwrap();
        assert_eq!(feed(&mut g, &[(0, 2)]), first);
    }

    fn test_chain() -> Chain {
        Chain::new(fixtures::chain_collections(), 1, 10, 3).unwrap()
    }

    #[test]
    fn chain_certifies_increasing_settle_times() {
        assert_eq!(test_chain().settle_times(), &[3, 4, 5]);
    }

    #[test]
    fn chain_level_formula() {
        // Two stored levels with settle times 6 and 9.
        let chain = Chain {
            collections: fixtures::chain_collections()[..2].to_vec(),
            settle_times: vec![6, 9],
            noise: 1,
        };
        // Times past the stored prefix still clamp to stored levels but are
        // flagged truncated.
        assert_eq!(chain.level_at(7), (0, true));
        assert_eq!(chain.level_at(9), (1, true));
        assert_eq!(chain.level_at(0), (0, false));
        assert_eq!(chain.level_at(1), (0, false));
    }

    #[test]
    fn chain_level_is_monotone_in_time() {
        let chain = test_chain();
        let mut last = 0;
        for t in 0..20 {
            let (level, _) = chain.level_at(t);
            assert!(level >= last);
            last = level;
        }
    }

    #[test]
    fn chain_rejects_non_nested_lists() {
        let mut collections = fixtures::chain_collections();
        collections.reverse();
        assert_eq!(
            Chain::new(collections, 1, 10, 3).unwrap_err(),
            Error::NotAChain
        );
    }

    #[test]
    fn uniform_wrapper_promises_the_dimension() {
        let c = fixtures::c_ex();
        let (_, settle1) = uniform_noise_dependent(&c, 1, 10, 3).unwrap();
        assert_eq!(settle1, 6);
        let (_, settle0) = uniform_noise_dependent(&c, 0, 10, 3).unwrap();
        assert_eq!(settle0, 4);
        assert_eq!(
            uniform_noise_dependent(&fixtures::column_family(), 1, 10, 3).unwrap_err(),
            Error::SettleNotCertifiable
        );
    }

    #[test]
    fn nonuniform_wrapper_promises_level_or_settle() {
        let chain = test_chain();
        let in_level_2 = fixtures::chain_collections()[2]
            .language("E")
            .unwrap()
            .language
            .clone();
        let (_, promised) = nonuniform_noise_dependent(&chain, &in_level_2, 2).unwrap();
        assert_eq!(promised, 5);

        let in_level_0 = fixtures::chain_collections()[0]
            .language("A")
            .unwrap()
            .language
            .clone();
        let (_, promised) = nonuniform_noise_dependent(&chain, &in_level_0, 0).unwrap();
        assert_eq!(promised, 3);

        assert_eq!(
            nonuniform_noise_dependent(&chain, &in_level_2, 0).unwrap_err(),
            Error::TargetNotInLevel
        );
        assert!(matches!(
            nonuniform_noise_dependent(&chain, &in_level_2, 9),
            Err(Error::LevelOutOfRange { .. })
        ));
    }
}
