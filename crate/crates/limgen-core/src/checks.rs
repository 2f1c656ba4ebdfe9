//! Seeded random instances, independent window oracles, and the named
//! property suites behind the `check` command.
//!
//! The oracles deliberately avoid the production descriptor algebra: closure
//! membership is recomputed pointwise from language membership, finiteness
//! from shared block columns, and the dimension from an exhaustive levelwise
//! search over a fixed id window. A failing trial always records a
//! counterexample that reproduces it.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::closure::{
    consistent_set, noisy_closure, saturate, ClosureResult, ColumnConsistency, ConsistentFamily,
    SampleSet,
};
use crate::collection::{Collection, NamedLanguage};
use crate::dimension::{
    candidate_pool, closure_dimension, column_family_dimension, shrink_witness, DimensionVerdict,
};
use crate::enumeration::{Enumeration, Schedule};
use crate::error::Error;
use crate::game::{play, render_trace, replay_trace, settle_time, SettleTime, TraceHeader};
use crate::generator::{
    nonuniform_noise_dependent, query_fresh, uniform_noise_dependent, Chain, ChainGenerator,
    ClosureGenerator, Generator, GeneratorStep,
};
use crate::lang::{SetDescriptor, SymbolicLanguage};
use crate::refute::{
    run_refutation, run_scattered_construction, verify_refutation, Classification,
    RefutationOutcome, RefutationPlan,
};
use crate::universe::Element;

// ── Random instances ─────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy)]
pub struct InstanceParams {
    pub max_languages: usize,
    pub max_blocks: usize,
    pub max_exceptions: usize,
    pub column_pool: u32,
    pub index_pool: u32,
}

impl InstanceParams {
    /// The documented ceiling for suite instances.
    pub fn standard() -> InstanceParams {
        InstanceParams {
            max_languages: 4,
            max_blocks: 3,
            max_exceptions: 6,
            column_pool: 6,
            index_pool: 5,
        }
    }

    /// Small enough for exhaustive window comparison.
    pub fn tiny() -> InstanceParams {
        InstanceParams {
            max_languages: 2,
            max_blocks: 2,
            max_exceptions: 3,
            column_pool: 4,
            index_pool: 3,
        }
    }

    /// Keeps dimension searches quick across several noise levels.
    pub fn dimension() -> InstanceParams {
        InstanceParams {
            max_languages: 3,
            max_blocks: 2,
            max_exceptions: 4,
            column_pool: 5,
            index_pool: 4,
        }
    }
}

fn random_language(rng: &mut ChaCha8Rng, params: &InstanceParams) -> SymbolicLanguage {
    let block_count = rng.random_range(1..=params.max_blocks);
    let mut blocks = BTreeSet::new();
    while blocks.len() < block_count {
        blocks.insert(rng.random_range(0..params.column_pool));
    }
    let mut adds = Vec::new();
    let mut removes = Vec::new();
    let exceptions = rng.random_range(0..=params.max_exceptions);
    for _ in 0..exceptions {
        if rng.random_bool(0.5) {
            // Adds live outside the blocks.
            let column = loop {
                let c = rng.random_range(0..params.column_pool + 2);
                if !blocks.contains(&c) {
                    break c;
                }
            };
            adds.push(Element::new(column, rng.random_range(0..params.index_pool)));
        } else {
            let column = *blocks
                .iter()
                .nth(rng.random_range(0..blocks.len()))
                .unwrap();
            removes.push(Element::new(column, rng.random_range(0..params.index_pool)));
        }
    }
    SymbolicLanguage::new(blocks, adds, removes).expect("blocks nonempty")
}

pub fn random_collection(rng: &mut ChaCha8Rng, params: &InstanceParams) -> Collection {
    let want = rng.random_range(1..=params.max_languages);
    let mut languages: Vec<NamedLanguage> = Vec::new();
    let mut attempts = 0;
    while languages.len() < want && attempts < 60 {
        attempts += 1;
        let language = random_language(rng, params);
        if languages.iter().any(|nl| nl.language == language) {
            continue;
        }
        languages.push(NamedLanguage {
            name: format!("R{}", languages.len()),
            language,
        });
    }
    Collection::explicit("random", languages).expect("at least one language")
}

/// A sample drawn near the collection: mostly members of one language with a
/// few strays, sometimes purely random window elements.
pub fn random_sample(rng: &mut ChaCha8Rng, collection: &Collection, max_len: usize) -> SampleSet {
    let len = rng.random_range(0..=max_len);
    let mut sample = SampleSet::new();
    let languages = collection.explicit_languages().unwrap_or(&[]);
    let anchored = !languages.is_empty() && rng.random_bool(0.6);
    let anchor = anchored.then(|| {
        let pick = rng.random_range(0..languages.len());
        languages[pick].language.enumerate(10)
    });
    while sample.len() < len {
        let e = match &anchor {
            Some(members) if rng.random_bool(0.75) => {
                members[rng.random_range(0..members.len())]
            }
            _ => Element::from_id(rng.random_range(0..60)),
        };
        sample.insert(e);
    }
    sample
}

/// A generator driven by a pure function of the observed prefix.
pub struct FnGenerator<F: Fn(&[Element]) -> Element> {
    f: F,
    history: Vec<Element>,
}

impl<F: Fn(&[Element]) -> Element> FnGenerator<F> {
    pub fn new(f: F) -> FnGenerator<F> {
        FnGenerator {
            f,
            history: Vec::new(),
        }
    }
}

impl<F: Fn(&[Element]) -> Element> Generator for FnGenerator<F> {
    fn observe(&mut self, x: Element) {
        self.history.push(x);
    }

    fn emit(&mut self) -> Result<GeneratorStep, Error> {
        Ok(GeneratorStep {
            output: (self.f)(&self.history),
            chain_index: None,
            truncated: false,
        })
    }

    fn reset(&mut self) -> Result<(), Error> {
        self.history.clear();
        Ok(())
    }
}

// ── Independent window oracles ───────────────────────────────────────────────

fn consistent_indices(languages: &[NamedLanguage], sample: &SampleSet, noise: usize) -> Vec<usize> {
    (0..languages.len())
        .filter(|&i| {
            sample
                .iter()
                .filter(|e| !languages[i].language.contains(**e))
                .count()
                <= noise
        })
        .collect()
}

/// Closure membership over a window, straight from the definition: the
/// element is in every consistent language, and some language is consistent.
pub fn oracle_closure_member(
    languages: &[NamedLanguage],
    sample: &SampleSet,
    noise: usize,
    e: Element,
) -> bool {
    let consistent = consistent_indices(languages, sample, noise);
    !consistent.is_empty()
        && consistent
            .iter()
            .all(|&i| languages[i].language.contains(e))
}

/// The closure is infinite exactly when the consistent languages share a
/// block column.
pub fn oracle_closure_infinite(
    languages: &[NamedLanguage],
    sample: &SampleSet,
    noise: usize,
) -> bool {
    let consistent = consistent_indices(languages, sample, noise);
    let Some((&first, rest)) = consistent.split_first() else {
        return false;
    };
    let mut shared: BTreeSet<u32> = languages[first].language.blocks().clone();
    for &i in rest {
        shared = shared
            .intersection(languages[i].language.blocks())
            .copied()
            .collect();
    }
    !shared.is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleDimension {
    Exact(usize, SampleSet),
    AtLeast(usize, SampleSet),
    NoWitness,
}

/// Exhaustive dimension search over the window of ids `0..=window_max_id`,
/// levelwise with the downward-closure cut. Qualification uses membership
/// counts and shared-block finiteness only.
pub fn oracle_dimension_window(
    collection: &Collection,
    noise: usize,
    window_max_id: u64,
    max_size: usize,
) -> OracleDimension {
    let languages = collection
        .explicit_languages()
        .expect("window oracle needs an explicit collection");
    let pool: Vec<Element> = (0..=window_max_id).map(Element::from_id).collect();
    let member: Vec<Vec<bool>> = languages
        .iter()
        .map(|nl| pool.iter().map(|&e| nl.language.contains(e)).collect())
        .collect();

    let qualifies = |indices: &[usize]| -> bool {
        let consistent: Vec<usize> = (0..languages.len())
            .filter(|&li| indices.iter().filter(|&&ei| !member[li][ei]).count() <= noise)
            .collect();
        let Some((&first, rest)) = consistent.split_first() else {
            return false;
        };
        let mut shared: BTreeSet<u32> = languages[first].language.blocks().clone();
        for &li in rest {
            shared = shared
                .intersection(languages[li].language.blocks())
                .copied()
                .collect();
        }
        shared.is_empty()
    };

    if !qualifies(&[]) {
        return OracleDimension::NoWitness;
    }
    let cap = max_size.min(pool.len());
    let mut level: Vec<Vec<usize>> = vec![vec![]];
    for size in 1..=cap {
        let mut next = Vec::new();
        for base in &level {
            let from = base.last().map_or(0, |&last| last + 1);
            for extra in from..pool.len() {
                let mut candidate = base.clone();
                candidate.push(extra);
                if qualifies(&candidate) {
                    next.push(candidate);
                }
            }
        }
        if next.is_empty() {
            let witness = level[0].iter().map(|&i| pool[i]).collect();
            return OracleDimension::Exact(size - 1, witness);
        }
        level = next;
    }
    let witness: SampleSet = level[0].iter().map(|&i| pool[i]).collect();
    if cap == pool.len() {
        OracleDimension::Exact(cap, witness)
    } else {
        OracleDimension::AtLeast(cap, witness)
    }
}

/// Forced columns of the column-family closure by brute force over every
/// nonempty union of the columns `0..m`.
pub fn oracle_forced_columns(sample: &SampleSet, noise: usize, m: u32) -> BTreeSet<u32> {
    let cc = ColumnConsistency::new(sample, noise);
    let mut shared: Option<BTreeSet<u32>> = None;
    for mask in 1u64..(1 << m) {
        let union: BTreeSet<u32> = (0..m).filter(|c| mask & (1 << c) != 0).collect();
        if cc.is_consistent_union(&union) {
            shared = Some(match shared {
                None => union,
                Some(acc) => acc.intersection(&union).copied().collect(),
            });
        }
    }
    shared.unwrap_or_default()
}

// ── Suite machinery ──────────────────────────────────────────────────────────

#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: &'static str,
    pub pass: u64,
    pub fail: u64,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: u64,
    pub seed: u64,
    pub properties: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.fail == 0)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite {}: trials={} seed={}",
            self.suite, self.trials, self.seed
        );
        for p in &self.properties {
            let _ = writeln!(out, "  {}: pass={} fail={}", p.name, p.pass, p.fail);
        }
        for p in &self.properties {
            if let Some(ce) = &p.counterexample {
                let _ = writeln!(out, "counterexample ({}):", p.name);
                for line in ce.lines() {
                    let _ = writeln!(out, "  {line}");
                }
            }
        }
        let _ = writeln!(
            out,
            "result: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        );
        out
    }
}

type TrialFn = Box<dyn Fn(&mut ChaCha8Rng) -> Result<(), String>>;

struct Property {
    name: &'static str,
    /// Deterministic properties run once instead of per trial.
    deterministic: bool,
    run: TrialFn,
}

fn prop(
    name: &'static str,
    run: impl Fn(&mut ChaCha8Rng) -> Result<(), String> + 'static,
) -> Property {
    Property {
        name,
        deterministic: false,
        run: Box::new(run),
    }
}

fn prop_once(
    name: &'static str,
    run: impl Fn(&mut ChaCha8Rng) -> Result<(), String> + 'static,
) -> Property {
    Property {
        name,
        deterministic: true,
        run: Box::new(run),
    }
}

fn run_properties(suite: &str, properties: Vec<Property>, trials: u64, seed: u64) -> SuiteReport {
    let mut results = Vec::with_capacity(properties.len());
    for (index, property) in properties.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(7919 * index as u64));
        let runs = if property.deterministic { 1 } else { trials };
        let mut pass = 0;
        let mut fail = 0;
        let mut counterexample = None;
        for _ in 0..runs {
            match (property.run)(&mut rng) {
                Ok(()) => pass += 1,
                Err(ce) => {
                    fail += 1;
                    counterexample.get_or_insert(ce);
                }
            }
        }
        results.push(PropertyResult {
            name: property.name,
            pass,
            fail,
            counterexample,
        });
    }
    SuiteReport {
        suite: suite.to_string(),
        trials,
        seed,
        properties: results,
    }
}

fn describe(collection: &Collection, sample: &SampleSet, noise: usize, detail: &str) -> String {
    let elements: Vec<String> = sample.iter().map(|e| e.to_string()).collect();
    format!(
        "{}\nsample: {}\nnoise: {}\n{}",
        collection.serialize().trim_end(),
        elements.join(" "),
        noise,
        detail
    )
}

pub fn run_suite(name: &str, trials: u64, seed: u64) -> Result<SuiteReport, Error> {
    match name {
        "closure" => Ok(run_properties(
            "closure",
            closure_properties(),
            trials,
            seed,
        )),
        "dimension" => Ok(run_properties(
            "dimension",
            dimension_properties(),
            trials,
            seed,
        )),
        "generators" => Ok(run_properties(
            "generators",
            generator_properties(),
            trials,
            seed,
        )),
        "refutation" => Ok(run_properties(
            "refutation",
            refutation_properties(),
            trials,
            seed,
        )),
        "all" => {
            let mut properties = closure_properties();
            properties.extend(dimension_properties());
            properties.extend(generator_properties());
            properties.extend(refutation_properties());
            Ok(run_properties("all", properties, trials, seed))
        }
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

// ── Closure suite ────────────────────────────────────────────────────────────

fn closure_properties() -> Vec<Property> {
    vec![
        prop("pairing-bijection", |rng| {
            let id = rng.random_range(0..1_000_000u64);
            let e = Element::from_id(id);
            if e.id() != id {
                return Err(format!("id {id} decoded to {e} which encodes to {}", e.id()));
            }
            let c = rng.random_range(0..1000);
            let k = rng.random_range(0..1000);
            let e = Element::new(c, k);
            if Element::from_id(e.id()) != e {
                return Err(format!("{e} does not round-trip through id {}", e.id()));
            }
            Ok(())
        }),
        prop("intersect-member-window", |rng| {
            let params = InstanceParams::standard();
            let a = random_language(rng, &params).descriptor();
            let b = random_language(rng, &params).descriptor();
            let both = a.intersect(&b);
            for id in 0..=500 {
                let e = Element::from_id(id);
                if both.contains(e) != (a.contains(e) && b.contains(e)) {
                    return Err(format!("intersection disagrees at {e}\n{a:?}\n{b:?}"));
                }
            }
            Ok(())
        }),
        prop("intersect-commutative-associative", |rng| {
            let params = InstanceParams::standard();
            let a = random_language(rng, &params).descriptor();
            let b = random_language(rng, &params).descriptor();
            let c = random_language(rng, &params).descriptor();
            if a.intersect(&b) != b.intersect(&a) {
                return Err(format!("commutativity broke\n{a:?}\n{b:?}"));
            }
            if a.intersect(&b).intersect(&c) != a.intersect(&b.intersect(&c)) {
                return Err(format!("associativity broke\n{a:?}\n{b:?}\n{c:?}"));
            }
            Ok(())
        }),
        prop("canonicalize-denotation", |rng| {
            // Raw parts, including covered adds and stray removes.
            let params = InstanceParams::standard();
            let mut blocks = BTreeSet::new();
            for _ in 0..rng.random_range(1..=3u32) {
                blocks.insert(rng.random_range(0..params.column_pool));
            }
            let mut adds = BTreeSet::new();
            let mut removes = BTreeSet::new();
            for _ in 0..rng.random_range(0..=6u32) {
                let e = Element::from_id(rng.random_range(0..40));
                if rng.random_bool(0.5) {
                    adds.insert(e);
                } else {
                    removes.insert(e);
                }
            }
            let lang =
                SymbolicLanguage::new(blocks.clone(), adds.clone(), removes.clone()).unwrap();
            let mut window: BTreeSet<Element> = (0..=500).map(Element::from_id).collect();
            window.extend(adds.iter().copied());
            window.extend(removes.iter().copied());
            for e in window {
                let raw = !removes.contains(&e)
                    && (blocks.contains(&e.column()) || adds.contains(&e));
                if lang.contains(e) != raw {
                    return Err(format!(
                        "canonical form changed membership of {e}: raw {raw}"
                    ));
                }
            }
            Ok(())
        }),
        prop("enumerate-ascending-members", |rng| {
            let params = InstanceParams::standard();
            let lang = random_language(rng, &params);
            let out = lang.enumerate(60);
            for pair in out.windows(2) {
                if pair[0] >= pair[1] {
                    return Err(format!("enumeration not ascending at {}", pair[1]));
                }
            }
            for e in &out {
                if !lang.contains(*e) {
                    return Err(format!("enumerated non-member {e}"));
                }
            }
            Ok(())
        }),
        prop("closure-containment", |rng| {
            let params = InstanceParams::standard();
            let collection = random_collection(rng, &params);
            let sample = random_sample(rng, &collection, 6);
            let noise = rng.random_range(0..=3);
            let closure = noisy_closure(&collection, &sample, noise);
            let languages = collection.explicit_languages().unwrap();
            let mut window: Vec<Element> = (0..=500).map(Element::from_id).collect();
            for nl in languages {
                window.extend(nl.language.adds().iter().copied());
                window.extend(nl.language.removes().iter().copied());
            }
            for nl in languages {
                if crate::closure::misses(&nl.language, &sample) > noise {
                    continue;
                }
                for &e in &window {
                    if closure.contains(e) && !nl.language.contains(e) {
                        return Err(describe(
                            &collection,
                            &sample,
                            noise,
                            &format!("closure member {e} escapes consistent {}", nl.name),
                        ));
                    }
                }
            }
            Ok(())
        }),
        prop("closure-window-definition", |rng| {
            let params = InstanceParams::standard();
            let collection = random_collection(rng, &params);
            let sample = random_sample(rng, &collection, 6);
            let noise = rng.random_range(0..=3);
            let closure = noisy_closure(&collection, &sample, noise);
            let languages = collection.explicit_languages().unwrap();
            if closure.is_finite() == oracle_closure_infinite(languages, &sample, noise) {
                return Err(describe(
                    &collection,
                    &sample,
                    noise,
                    "finiteness disagrees with the shared-block oracle",
                ));
            }
            for id in 0..=500 {
                let e = Element::from_id(id);
                if closure.contains(e) != oracle_closure_member(languages, &sample, noise, e) {
                    return Err(describe(
                        &collection,
                        &sample,
                        noise,
                        &format!("closure membership disagrees at {e}"),
                    ));
                }
            }
            Ok(())
        }),
        prop("closure-monotone-noise", |rng| {
            let params = InstanceParams::standard();
            let collection = random_collection(rng, &params);
            let sample = random_sample(rng, &collection, 6);
            let low = rng.random_range(0..=2);
            let high = rng.random_range(low..=3);
            let consistent_low: BTreeSet<String> = consistent_set(&collection, &sample, low)
                .names()
                .into_iter()
                .collect();
            let consistent_high: BTreeSet<String> = consistent_set(&collection, &sample, high)
                .names()
                .into_iter()
                .collect();
            if !consistent_low.is_subset(&consistent_high) {
                return Err(describe(
                    &collection,
                    &sample,
                    low,
                    "consistent set shrank as noise grew",
                ));
            }
            if consistent_low.is_empty() {
                // The low-level closure is empty by convention, not as an
                // intersection, so the containment below has no content.
                return Ok(());
            }
            let closure_low = noisy_closure(&collection, &sample, low);
            let closure_high = noisy_closure(&collection, &sample, high);
            for id in 0..=500 {
                let e = Element::from_id(id);
                if closure_high.contains(e) && !closure_low.contains(e) {
                    return Err(describe(
                        &collection,
                        &sample,
                        low,
                        &format!("higher-noise closure gained {e}"),
                    ));
                }
            }
            Ok(())
        }),
        prop("consistent-antimonotone-sample", |rng| {
            let params = InstanceParams::standard();
            let collection = random_collection(rng, &params);
            let big = random_sample(rng, &collection, 6);
            let small: SampleSet = big
                .iter()
                .copied()
                .filter(|_| rng.random_bool(0.6))
                .collect();
            let noise = rng.random_range(0..=3);
            let of_big: BTreeSet<String> = consistent_set(&collection, &big, noise)
                .names()
                .into_iter()
                .collect();
            let of_small: BTreeSet<String> = consistent_set(&collection, &small, noise)
                .names()
                .into_iter()
                .collect();
            if !of_big.is_subset(&of_small) {
                return Err(describe(
                    &collection,
                    &big,
                    noise,
                    "larger sample kept a language its subset lost",
                ));
            }
            Ok(())
        }),
        prop("saturation-stability", |rng| {
            let params = InstanceParams::standard();
            let collection = random_collection(rng, &params);
            let noise = rng.random_range(0..=3);
            let sample = random_sample(rng, &collection, 5);
            let closure = noisy_closure(&collection, &sample, noise);
            let ClosureResult::Value(SetDescriptor::Finite(members)) = &closure else {
                return Ok(());
            };
            let before = consistent_set(&collection, &sample, noise).names();
            // Any finite piece of the closure, not only all of it.
            let piece: SampleSet = members
                .iter()
                .copied()
                .filter(|_| rng.random_bool(0.7))
                .collect();
            let extended: SampleSet = sample.union(&piece).copied().collect();
            if consistent_set(&collection, &extended, noise).names() != before {
                return Err(describe(
                    &collection,
                    &sample,
                    noise,
                    "adding closure elements changed the consistent set",
                ));
            }
            let saturated = saturate(&collection, &sample, noise).expect("finite closure");
            if consistent_set(&collection, &saturated, noise).names() != before {
                return Err(describe(
                    &collection,
                    &sample,
                    noise,
                    "saturation changed the consistent set",
                ));
            }
            Ok(())
        }),
        prop("column-closed-form", |rng| {
            let m = rng.random_range(2..=6u32);
            let noise = rng.random_range(0..=2usize);
            let mut sample = SampleSet::new();
            for _ in 0..rng.random_range(0..=4u32) {
                sample.insert(Element::new(
                    rng.random_range(0..m),
                    rng.random_range(0..4),
                ));
            }
            let want = oracle_forced_columns(&sample, noise, m);
            let got = match crate::closure::column_closure(&sample, noise) {
                ClosureResult::Value(SetDescriptor::Symbolic { blocks, .. }) => blocks,
                ClosureResult::Value(SetDescriptor::Finite(f)) if f.is_empty() => BTreeSet::new(),
                other => return Err(format!("unexpected closure {other:?}")),
            };
            if got != want {
                let elements: Vec<String> = sample.iter().map(|e| e.to_string()).collect();
                return Err(format!(
                    "column closure {got:?} but union oracle {want:?} for sample {} noise {noise} m {m}",
                    elements.join(" ")
                ));
            }
            Ok(())
        }),
    ]
}

// ── Dimension suite ──────────────────────────────────────────────────────────

fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    while r * r > n {
        r -= 1;
    }
    r
}

/// Qualifying square subsets of the candidate pool, a few per square size.
pub fn square_witnesses(collection: &Collection, noise: usize, per_size: usize) -> Vec<SampleSet> {
    let pool = candidate_pool(collection, noise + 2);
    let mut found = Vec::new();
    for k in 1..=3usize {
        let size = k * k;
        if size > pool.len() {
            break;
        }
        let mut level: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..size {
            let mut next = Vec::new();
            'level: for base in &level {
                let from = base.last().map_or(0, |&last| last + 1);
                for extra in from..pool.len() {
                    let mut candidate = base.clone();
                    candidate.push(extra);
                    let sample: SampleSet = candidate.iter().map(|&i| pool[i]).collect();
                    if !consistent_set(collection, &sample, noise).is_empty()
                        && noisy_closure(collection, &sample, noise).is_finite()
                    {
                        next.push(candidate);
                        if next.len() > 4000 {
                            break 'level;
                        }
                    }
                }
            }
            level = next;
            if level.is_empty() {
                break;
            }
        }
        for indices in level.iter().take(per_size) {
            found.push(indices.iter().map(|&i| pool[i]).collect());
        }
    }
    found
}

/// Asserts the shrink postconditions on one witness: result size at most
/// the square root, finite lower-level closure, and level-1 consistency
/// covering everything consistent with the witness.
pub fn check_shrink_instance(
    collection: &Collection,
    noise: usize,
    witness: &SampleSet,
) -> Result<(), String> {
    let k = isqrt(witness.len());
    let (_, result) = match shrink_witness(collection, noise, witness) {
        Ok(out) => out,
        Err(e) => {
            return Err(describe(
                collection,
                witness,
                noise,
                &format!("shrink failed: {e}"),
            ))
        }
    };
    if result.len() > k {
        return Err(describe(
            collection,
            witness,
            noise,
            &format!("shrink returned {} elements for k {k}", result.len()),
        ));
    }
    if !noisy_closure(collection, &result, noise - 1).is_finite() {
        return Err(describe(
            collection,
            witness,
            noise,
            "shrunk set has an infinite lower-level closure",
        ));
    }
    // Containment into the level-1 consistent set.
    match (
        consistent_set(collection, witness, noise),
        consistent_set(collection, &result, 1),
    ) {
        (ConsistentFamily::Explicit(outer), ConsistentFamily::Explicit(inner)) => {
            let inner: BTreeSet<&str> = inner.iter().map(|nl| nl.name.as_str()).collect();
            for nl in outer {
                if !inner.contains(nl.name.as_str()) {
                    return Err(describe(
                        collection,
                        witness,
                        noise,
                        &format!("{} lost consistency after shrinking", nl.name),
                    ));
                }
            }
        }
        (ConsistentFamily::Columns(outer), ConsistentFamily::Columns(inner)) => {
            let touched: Vec<u32> = outer
                .hits()
                .keys()
                .chain(inner.hits().keys())
                .copied()
                .collect::<BTreeSet<u32>>()
                .into_iter()
                .collect();
            for mask in 0u64..(1 << touched.len()) {
                let excluded: BTreeSet<u32> = touched
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| mask & (1 << bit) != 0)
                    .map(|(_, &c)| c)
                    .collect();
                let outer_missed: usize = excluded
                    .iter()
                    .map(|c| outer.hits().get(c).copied().unwrap_or(0))
                    .sum();
                let inner_missed: usize = excluded
                    .iter()
                    .map(|c| inner.hits().get(c).copied().unwrap_or(0))
                    .sum();
                if outer_missed <= noise && inner_missed > 1 {
                    return Err(describe(
                        collection,
                        witness,
                        noise,
                        "a union consistent with the witness misses the shrunk set twice",
                    ));
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

fn dimension_properties() -> Vec<Property> {
    vec![
        prop("floor-sqrt-bound", |rng| {
            let params = InstanceParams::dimension();
            let collection = random_collection(rng, &params);
            let mut exact = [None, None, None, None];
            for (noise, slot) in exact.iter_mut().enumerate() {
                if let DimensionVerdict::Exact(n) =
                    closure_dimension(&collection, noise, 10, noise + 2).verdict
                {
                    *slot = Some(n);
                }
            }
            for noise in 2..=3usize {
                if let (Some(lower), Some(upper)) = (exact[noise - 1], exact[noise]) {
                    if lower < isqrt(upper) {
                        return Err(describe(
                            &collection,
                            &SampleSet::new(),
                            noise,
                            &format!(
                                "dimension {lower} at level {} under floor sqrt of {upper}",
                                noise - 1
                            ),
                        ));
                    }
                }
            }
            Ok(())
        }),
        prop("shrink-postconditions", |rng| {
            let params = InstanceParams::dimension();
            let collection = random_collection(rng, &params);
            let noise = rng.random_range(2..=3);
            for witness in square_witnesses(&collection, noise, 2) {
                check_shrink_instance(&collection, noise, &witness)?;
            }
            // Column-family witnesses: spread samples with no column hit
            // more than `noise` times qualify at any size.
            let family = Collection::column_family("columns");
            let k = rng.random_range(1..=3usize);
            let mut witness = SampleSet::new();
            let mut column = 0;
            while witness.len() < k * k {
                for slot in 0..rng.random_range(1..=noise) {
                    if witness.len() < k * k {
                        witness.insert(Element::new(column, slot as u32));
                    }
                }
                column += 1;
            }
            check_shrink_instance(&family, noise, &witness)?;
            Ok(())
        }),
        prop("pool-sufficiency", |rng| {
            let params = InstanceParams::tiny();
            let collection = random_collection(rng, &params);
            let noise = rng.random_range(0..=2);
            let report = closure_dimension(&collection, noise, 8, noise + 2);
            let oracle = oracle_dimension_window(&collection, noise, 60, 8);
            let agree = matches!(
                (&report.verdict, &oracle),
                (DimensionVerdict::NoWitness, OracleDimension::NoWitness)
            ) || matches!(
                (&report.verdict, &oracle),
                (DimensionVerdict::Exact(a), OracleDimension::Exact(b, _)) if a == b
            ) || matches!(
                (&report.verdict, &oracle),
                (DimensionVerdict::AtLeast(a), OracleDimension::AtLeast(b, _)) if a == b
            );
            if !agree {
                return Err(describe(
                    &collection,
                    &SampleSet::new(),
                    noise,
                    &format!(
                        "pool verdict {:?} vs window oracle {oracle:?}",
                        report.verdict
                    ),
                ));
            }
            Ok(())
        }),
        prop("column-dimension-closed-form", |rng| {
            let report = column_family_dimension(0, 20);
            if report.verdict != DimensionVerdict::Exact(0) {
                return Err(format!("noiseless column dimension {:?}", report.verdict));
            }
            let noise = rng.random_range(1..=3usize);
            let max_size = rng.random_range(2..=12usize);
            let report = column_family_dimension(noise, max_size);
            if report.verdict != DimensionVerdict::AtLeast(max_size) {
                return Err(format!(
                    "column dimension verdict {:?} at noise {noise} budget {max_size}",
                    report.verdict
                ));
            }
            if report.witness.len() != max_size {
                return Err(format!(
                    "witness size {} for budget {max_size}",
                    report.witness.len()
                ));
            }
            let closure = crate::closure::column_closure(&report.witness, noise);
            if closure.descriptor() != SetDescriptor::empty() {
                return Err(format!(
                    "witness closure not empty at noise {noise}: {closure:?}"
                ));
            }
            Ok(())
        }),
    ]
}

// ── Generators suite ─────────────────────────────────────────────────────────

fn random_noise_for(
    rng: &mut ChaCha8Rng,
    target: &SymbolicLanguage,
    at_most: usize,
) -> Vec<Element> {
    let count = rng.random_range(0..=at_most);
    let mut noise = Vec::new();
    let mut id = rng.random_range(0..30u64);
    while noise.len() < count {
        let e = Element::from_id(id);
        if !target.contains(e) && !noise.contains(&e) {
            noise.push(e);
        }
        id += 1 + rng.random_range(0..5u64);
    }
    noise
}

fn random_schedule(rng: &mut ChaCha8Rng, noise_len: usize) -> Schedule {
    match rng.random_range(0..3u8) {
        0 => Schedule::Prefix,
        1 => {
            let mut positions = BTreeSet::new();
            while positions.len() < noise_len {
                positions.insert(rng.random_range(0..(4 * noise_len.max(1))));
            }
            Schedule::Interleave(positions.into_iter().collect())
        }
        _ => Schedule::Random(rng.random::<u64>()),
    }
}

fn chain_fixture() -> Chain {
    Chain::new(crate::fixtures::chain_collections(), 1, 10, 3).expect("fixture chain certifies")
}

fn generator_properties() -> Vec<Property> {
    vec![
        prop("closure-step-safety", |rng| {
            let params = InstanceParams::standard();
            let collection = random_collection(rng, &params);
            let languages = collection.explicit_languages().unwrap();
            let target = languages[rng.random_range(0..languages.len())]
                .language
                .clone();
            let noise_level = rng.random_range(0..=2);
            let noise = random_noise_for(rng, &target, noise_level);
            let schedule = random_schedule(rng, noise.len());
            let mut enumeration =
                Enumeration::new(target.clone(), noise, schedule).expect("valid noise");
            let mut generator = ClosureGenerator::new(collection.clone(), noise_level);
            let mut sample = SampleSet::new();
            for _ in 0..10 {
                let shown = enumeration.next().unwrap();
                generator.observe(shown);
                sample.insert(shown);
                let output = generator.emit().expect("history nonempty").output;
                let closure = noisy_closure(&collection, &sample, noise_level);
                let has_fresh = match &closure {
                    ClosureResult::EmptyConsistent => false,
                    ClosureResult::Value(SetDescriptor::Finite(set)) => {
                        set.difference(&sample).next().is_some()
                    }
                    ClosureResult::Value(_) => true,
                };
                if has_fresh {
                    if !closure.contains(output) || sample.contains(&output) {
                        return Err(describe(
                            &collection,
                            &sample,
                            noise_level,
                            &format!("output {output} not a fresh closure element"),
                        ));
                    }
                    // Safe for every consistent target.
                    if crate::closure::misses(&target, &sample) <= noise_level
                        && !target.contains(output)
                    {
                        return Err(describe(
                            &collection,
                            &sample,
                            noise_level,
                            &format!("output {output} escapes the consistent target"),
                        ));
                    }
                }
            }
            Ok(())
        }),
        prop("uniform-settle", |rng| {
            let collection = crate::fixtures::c_ex();
            let languages = collection.explicit_languages().unwrap();
            let target = languages[rng.random_range(0..2)].language.clone();
            let noise = random_noise_for(rng, &target, 1);
            let schedule = random_schedule(rng, noise.len());
            let mut enumeration = Enumeration::new(target.clone(), noise, schedule).unwrap();
            let mut generator = ClosureGenerator::new(collection.clone(), 1);
            let mut sample = SampleSet::new();
            for t in 0..12 {
                let shown = enumeration.next().unwrap();
                generator.observe(shown);
                sample.insert(shown);
                let output = generator.emit().unwrap().output;
                if t > 6 && (!target.contains(output) || sample.contains(&output)) {
                    return Err(describe(
                        &collection,
                        &sample,
                        1,
                        &format!("incorrect output {output} at time {t}"),
                    ));
                }
            }
            Ok(())
        }),
        prop("chain-settle", |rng| {
            let chain = chain_fixture();
            let level = rng.random_range(0..chain.len());
            let languages = chain.collections()[level].explicit_languages().unwrap();
            let target = languages[rng.random_range(0..languages.len())]
                .language
                .clone();
            let (mut generator, promised) =
                nonuniform_noise_dependent(&chain, &target, level).expect("target in level");
            let noise = random_noise_for(rng, &target, 1);
            let schedule = random_schedule(rng, noise.len());
            let mut enumeration = Enumeration::new(target.clone(), noise, schedule).unwrap();
            let mut sample = SampleSet::new();
            for t in 0..12 {
                let shown = enumeration.next().unwrap();
                generator.observe(shown);
                sample.insert(shown);
                let output = generator.emit().unwrap().output;
                if t >= promised && (!target.contains(output) || sample.contains(&output)) {
                    return Err(format!(
                        "chain output {output} incorrect at time {t}, promised {promised}, level {level}"
                    ));
                }
            }
            Ok(())
        }),
        prop("generator-determinism", |rng| {
            let params = InstanceParams::standard();
            let collection = random_collection(rng, &params);
            let noise_level = rng.random_range(0..=2);
            let history: Vec<Element> = (0..rng.random_range(1..=8))
                .map(|_| Element::from_id(rng.random_range(0..50)))
                .collect();
            let mut a = ClosureGenerator::new(collection.clone(), noise_level);
            let mut b = ClosureGenerator::new(collection.clone(), noise_level);
            let out_a = query_fresh(&mut a, &history).unwrap();
            let out_b = query_fresh(&mut b, &history).unwrap();
            if out_a != out_b {
                return Err(format!("fresh generators disagree: {out_a} vs {out_b}"));
            }
            let again = query_fresh(&mut a, &history).unwrap();
            if again != out_a {
                return Err(format!("reset replay disagrees: {again} vs {out_a}"));
            }
            Ok(())
        }),
        prop("chain-index-monotone", |rng| {
            let chain = chain_fixture();
            let level = rng.random_range(0..chain.len());
            let languages = chain.collections()[level].explicit_languages().unwrap();
            let target = languages[rng.random_range(0..languages.len())]
                .language
                .clone();
            let mut generator = ChainGenerator::new(chain);
            let mut enumeration = Enumeration::pure(target);
            let mut last = 0;
            for _ in 0..10 {
                generator.observe(enumeration.next().unwrap());
                let step = generator.emit().unwrap();
                let index = step.chain_index.expect("chain generators report a level");
                if index < last {
                    return Err(format!("chain level fell from {last} to {index}"));
                }
                last = index;
            }
            Ok(())
        }),
        prop("judgment-soundness", |rng| {
            let collection = crate::fixtures::c_ex();
            let languages = collection.explicit_languages().unwrap();
            let pick = rng.random_range(0..2);
            let target = languages[pick].language.clone();
            let target_name = languages[pick].name.clone();
            let noise = random_noise_for(rng, &target, 1);
            let seed = rng.random::<u64>();
            let schedule = Schedule::Random(seed);
            let mut enumeration =
                Enumeration::new(target.clone(), noise.clone(), schedule).unwrap();
            let mut generator = ClosureGenerator::new(collection.clone(), 1);
            let header = TraceHeader {
                collection: collection.name().to_string(),
                target: target_name,
                noise: 1,
                noise_strings: noise,
                schedule: format!("random:{seed}"),
                seed,
                promised_tstar: Some(6),
                noise_mismatch: false,
            };
            let trace = play(&collection, &mut generator, &mut enumeration, 10, header)
                .expect("game runs");
            let mut sample = SampleSet::new();
            for step in &trace.steps {
                sample.insert(step.shown);
                let want = target.contains(step.output) && !sample.contains(&step.output);
                if step.correct != want {
                    return Err(format!(
                        "judgment at t={} recorded {}",
                        step.t, step.correct
                    ));
                }
            }
            Ok(())
        }),
        prop("trace-replay", |rng| {
            let collection = crate::fixtures::c_ex();
            let languages = collection.explicit_languages().unwrap();
            let pick = rng.random_range(0..2);
            let target = languages[pick].language.clone();
            let noise = random_noise_for(rng, &target, 1);
            let seed = rng.random::<u64>();
            let mut enumeration =
                Enumeration::new(target.clone(), noise.clone(), Schedule::Random(seed)).unwrap();
            let mut generator = ClosureGenerator::new(collection.clone(), 1);
            let header = TraceHeader {
                collection: collection.name().to_string(),
                target: languages[pick].name.clone(),
                noise: 1,
                noise_strings: noise,
                schedule: format!("random:{seed}"),
                seed,
                promised_tstar: None,
                noise_mismatch: false,
            };
            let trace = play(&collection, &mut generator, &mut enumeration, 8, header).unwrap();
            let text = render_trace(&trace);
            let replayed = replay_trace(&text, &collection).map_err(|e| e.to_string())?;
            if replayed != text {
                return Err(format!(
                    "replay differs\n--- first\n{text}\n--- second\n{replayed}"
                ));
            }
            Ok(())
        }),
        prop("settle-within-promise", |rng| {
            let collection = crate::fixtures::c_ex();
            let noise_level = rng.random_range(0..=1);
            let (mut generator, promised) =
                uniform_noise_dependent(&collection, noise_level, 10, 3).unwrap();
            let languages = collection.explicit_languages().unwrap();
            let pick = rng.random_range(0..2);
            let target = languages[pick].language.clone();
            let noise = random_noise_for(rng, &target, noise_level);
            let schedule = random_schedule(rng, noise.len());
            let mut enumeration =
                Enumeration::new(target.clone(), noise.clone(), schedule).unwrap();
            let header = TraceHeader {
                collection: collection.name().to_string(),
                target: languages[pick].name.clone(),
                noise: noise_level,
                noise_strings: noise,
                schedule: "varied".into(),
                seed: 0,
                promised_tstar: Some(promised),
                noise_mismatch: false,
            };
            let trace = play(
                &collection,
                &mut generator,
                &mut enumeration,
                promised + 6,
                header,
            )
            .unwrap();
            match settle_time(&trace) {
                SettleTime::At(t) if t <= promised + 1 => Ok(()),
                other => Err(format!(
                    "observed settle {other:?} beyond promised {promised}"
                )),
            }
        }),
    ]
}

// ── Refutation suite ─────────────────────────────────────────────────────────

fn refutation_properties() -> Vec<Property> {
    vec![
        prop("enumeration-validity", |rng| {
            let params = InstanceParams::standard();
            let collection = random_collection(rng, &params);
            let languages = collection.explicit_languages().unwrap();
            let target = languages[rng.random_range(0..languages.len())]
                .language
                .clone();
            let noise = random_noise_for(rng, &target, 3);
            let schedule = random_schedule(rng, noise.len());
            let window: Vec<Element> = Enumeration::new(target.clone(), noise.clone(), schedule)
                .expect("valid noise")
                .take(500)
                .collect();
            let mut seen = BTreeSet::new();
            let mut outside = BTreeSet::new();
            for e in &window {
                if !seen.insert(*e) {
                    return Err(format!("enumeration repeated {e}"));
                }
                if !target.contains(*e) {
                    outside.insert(*e);
                }
            }
            let declared: BTreeSet<Element> = noise.iter().copied().collect();
            if outside != declared {
                return Err(format!(
                    "outside strings {outside:?} differ from declared noise {declared:?}"
                ));
            }
            let canonical = target.enumerate(100);
            for (n, want) in canonical.iter().enumerate() {
                let horizon = n + noise.len();
                if !window[..=horizon].contains(want) {
                    return Err(format!("member {want} missing within {horizon} emissions"));
                }
            }
            Ok(())
        }),
        prop_once("builtin-refutation", |_| {
            let mut generator = ClosureGenerator::new(crate::fixtures::column_family(), 1);
            let run = match run_refutation(&mut generator, 6, 8, None) {
                Ok(RefutationOutcome::Refuted(run)) => run,
                other => return Err(format!("expected a refutation, got {other:?}")),
            };
            if !matches!(
                run.report.classification,
                Classification::Concentrated { .. }
            ) {
                return Err(format!(
                    "expected concentration: {:?}",
                    run.report.classification
                ));
            }
            if run.verify.refuted.len() < 5 {
                return Err(format!(
                    "only {} refuted prefixes",
                    run.verify.refuted.len()
                ));
            }
            if !run.verify.invalid_prefixes.is_empty() {
                return Err(format!(
                    "invalid prefixes {:?}",
                    run.verify.invalid_prefixes
                ));
            }
            Ok(())
        }),
        prop("case-prefix-validity", |rng| {
            let horizon = rng.random_range(4..=8usize);
            let plan = RefutationPlan::new(horizon).unwrap();
            // An inside-answering generator with a random column choice.
            let picks: Vec<u32> = (1..=horizon)
                .map(|i| {
                    let set: Vec<u32> = plan.set(i).iter().copied().collect();
                    set[rng.random_range(0..set.len())]
                })
                .collect();
            let plan_for_gen = plan.clone();
            let mut inside_gen = FnGenerator::new(move |history: &[Element]| {
                let i = (1..=plan_for_gen.len())
                    .find(|&i| plan_for_gen.prefix(i) == history)
                    .expect("ladder prefix");
                Element::new(picks[i - 1], 1)
            });
            let run = match run_refutation(&mut inside_gen, horizon, horizon, None) {
                Ok(RefutationOutcome::Refuted(run)) => run,
                other => return Err(format!("inside case expected, got {other:?}")),
            };
            if !matches!(run.report.classification, Classification::Inside { .. }) {
                return Err(format!("expected inside: {:?}", run.report.classification));
            }
            if !run.verify.invalid_prefixes.is_empty() {
                return Err(format!(
                    "inside prefixes not noise-1: {:?}",
                    run.verify.invalid_prefixes
                ));
            }
            if run.verify.refuted != run.accepted {
                return Err(format!(
                    "refuted {:?} differs from accepted {:?}",
                    run.verify.refuted, run.accepted
                ));
            }
            // A scattering generator: fresh columns far outside the ladder.
            let base = 100 + rng.random_range(0..50u32);
            let plan_for_gen = plan.clone();
            let mut scattered_gen = FnGenerator::new(move |history: &[Element]| {
                let i = (1..=plan_for_gen.len())
                    .find(|&i| plan_for_gen.prefix(i) == history)
                    .expect("ladder prefix");
                Element::new(base + i as u32, 0)
            });
            let run = match run_refutation(&mut scattered_gen, horizon, horizon, None) {
                Ok(RefutationOutcome::Refuted(run)) => run,
                other => return Err(format!("scattered case expected, got {other:?}")),
            };
            if !matches!(run.report.classification, Classification::Scattered { .. }) {
                return Err(format!(
                    "expected scattered: {:?}",
                    run.report.classification
                ));
            }
            if !run.verify.invalid_prefixes.is_empty() {
                return Err(format!(
                    "scattered prefixes not noise-0: {:?}",
                    run.verify.invalid_prefixes
                ));
            }
            Ok(())
        }),
        prop("scattered-invariants", |rng| {
            let horizon = rng.random_range(4..=8usize);
            let plan = RefutationPlan::new(horizon).unwrap();
            let scattered: Vec<usize> = (1..=horizon).collect();
            let base = 60 + rng.random_range(0..40u32);
            let jump = rng.random_range(1..=3u32);
            let plan_for_gen = plan.clone();
            let mut generator = FnGenerator::new(move |history: &[Element]| {
                let i = (1..=plan_for_gen.len())
                    .find(|&i| plan_for_gen.prefix(i) == history)
                    .expect("ladder prefix");
                Element::new(base + jump * i as u32, 0)
            });
            let outcome = run_scattered_construction(&mut generator, &plan, &scattered, horizon)
                .expect("construction runs");
            for record in &outcome.log {
                let union: BTreeSet<u32> = record
                    .accepted_after
                    .iter()
                    .flat_map(|&it| plan.set(scattered[it]).iter().copied())
                    .collect();
                if record.columns_after != union {
                    return Err(format!(
                        "columns after iteration {} are not the accepted union",
                        record.iteration
                    ));
                }
                if record.forbidden_after.len() != record.accepted_after.len() {
                    return Err(format!(
                        "forbidden count diverged at iteration {}",
                        record.iteration
                    ));
                }
                if record
                    .forbidden_after
                    .iter()
                    .any(|c| record.columns_after.contains(c))
                {
                    return Err(format!(
                        "a forbidden column entered the language at iteration {}",
                        record.iteration
                    ));
                }
            }
            Ok(())
        }),
        prop("pipeline-soundness", |rng| {
            // Mix of shapes; whatever case fires, verified errors must be
            // exactly the replayed outputs outside the language.
            let horizon = rng.random_range(4..=7usize);
            let style = rng.random_range(0..3u8);
            let plan = RefutationPlan::new(horizon).unwrap();
            let plan_for_gen = plan.clone();
            let mut generator: Box<dyn Generator> = match style {
                0 => Box::new(ClosureGenerator::new(crate::fixtures::column_family(), 1)),
                1 => Box::new(FnGenerator::new(move |history: &[Element]| {
                    let i = (1..=plan_for_gen.len())
                        .find(|&i| plan_for_gen.prefix(i) == history)
                        .expect("ladder prefix");
                    Element::new(120 + i as u32, 0)
                })),
                _ => Box::new(FnGenerator::new(move |history: &[Element]| {
                    let i = (1..=plan_for_gen.len())
                        .find(|&i| plan_for_gen.prefix(i) == history)
                        .expect("ladder prefix");
                    Element::new(*plan_for_gen.set(i).iter().next().unwrap(), 2)
                })),
            };
            let run = match run_refutation(generator.as_mut(), horizon, horizon, None) {
                Ok(RefutationOutcome::Refuted(run)) => run,
                Ok(RefutationOutcome::Inconclusive(_)) => return Ok(()),
                Err(e) => return Err(format!("pipeline error: {e}")),
            };
            for &index in &run.verify.refuted {
                if !run.accepted.contains(&index) {
                    return Err(format!("refuted index {index} was never accepted"));
                }
            }
            // Replay independently.
            let queries: Vec<(usize, Vec<Element>)> = match &run.report.classification {
                Classification::Inside { indices }
                | Classification::Concentrated { indices, .. } => {
                    indices.iter().map(|&i| (i, plan.prefix(i))).collect()
                }
                Classification::Scattered { indices } => run
                    .accepted
                    .iter()
                    .map(|&it| (it, plan.prefix(indices[it])))
                    .collect(),
                Classification::Inconclusive => unreachable!(),
            };
            let expected = match &run.report.classification {
                Classification::Inside { .. } => 1,
                _ => 0,
            };
            let again = verify_refutation(generator.as_mut(), &run.language, &queries, expected)
                .map_err(|e| e.to_string())?;
            if again.refuted != run.verify.refuted {
                return Err(format!(
                    "verification not reproducible: {:?} vs {:?}",
                    again.refuted, run.verify.refuted
                ));
            }
            Ok(())
        }),
    ]
}
