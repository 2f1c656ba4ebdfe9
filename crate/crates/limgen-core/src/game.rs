//! The adversary-versus-generator game loop, correctness judging, observed
//! settle times, and the line-oriented trace format.
//!
//! A step is correct when the output is an unseen member of the target,
//! judged against everything shown up to and including that step. Traces
//! render bit-exactly: header lines `#!key=value`, then one line per step
//! `t=<t> x=(<c>,<k>) z=(<c>,<k>) correct=<0|1>
//! closure=<empty|finite:<n>|infinite>`.

use std::fmt::Write as _;

use crate::closure::{noisy_closure, ClosureResult, SampleSet};
use crate::collection::Collection;
use crate::enumeration::{Enumeration, Schedule};
use crate::error::Error;
use crate::generator::Generator;
use crate::lang::SetDescriptor;
use crate::universe::Element;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureStatus {
    /// The closure denotes the empty set, including the no-consistent-language case.
    Empty,
    Finite(usize),
    Infinite,
}

impl ClosureStatus {
    fn of(result: &ClosureResult) -> ClosureStatus {
        match result {
            ClosureResult::EmptyConsistent => ClosureStatus::Empty,
            ClosureResult::Value(SetDescriptor::Finite(set)) if set.is_empty() => {
                ClosureStatus::Empty
            }
            ClosureResult::Value(SetDescriptor::Finite(set)) => ClosureStatus::Finite(set.len()),
            ClosureResult::Value(_) => ClosureStatus::Infinite,
        }
    }

    fn render(self) -> String {
        match self {
            ClosureStatus::Empty => "empty".to_string(),
            ClosureStatus::Finite(n) => format!("finite:{n}"),
            ClosureStatus::Infinite => "infinite".to_string(),
        }
    }

    fn parse(text: &str) -> Result<ClosureStatus, Error> {
        match text {
            "empty" => Ok(ClosureStatus::Empty),
            "infinite" => Ok(ClosureStatus::Infinite),
            other => {
                let n = other
                    .strip_prefix("finite:")
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| Error::BadTrace(format!("bad closure status: {other}")))?;
                Ok(ClosureStatus::Finite(n))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub t: usize,
    pub shown: Element,
    pub output: Element,
    pub correct: bool,
    pub closure: ClosureStatus,
    pub chain_index: Option<usize>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceHeader {
    pub collection: String,
    pub target: String,
    pub noise: usize,
    pub noise_strings: Vec<Element>,
    pub schedule: String,
    pub seed: u64,
    pub promised_tstar: Option<usize>,
    /// The enumeration declared more noise than the generator's level.
    pub noise_mismatch: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameTrace {
    pub header: TraceHeader,
    pub steps: Vec<StepRecord>,
}

/// Runs the game for `steps` rounds: pull a string, show it to the
/// generator, record its output and the judgment. The closure status is
/// recomputed by the judge from the collection, so it is meaningful for
/// external generators too.
pub fn play(
    collection: &Collection,
    generator: &mut dyn Generator,
    enumeration: &mut Enumeration,
    steps: usize,
    mut header: TraceHeader,
) -> Result<GameTrace, Error> {
    if steps == 0 {
        return Err(Error::NoSteps);
    }
    header.noise_mismatch = enumeration.noise().len() > header.noise;
    let mut records = Vec::with_capacity(steps);
    let mut sample = SampleSet::new();
    for t in 0..steps {
        let shown = enumeration.next().expect("enumerations are infinite");
        generator.observe(shown);
        sample.insert(shown);
        let step = generator.emit()?;
        let closure = ClosureStatus::of(&noisy_closure(collection, &sample, header.noise));
        let correct =
            enumeration.target().contains(step.output) && !sample.contains(&step.output);
        records.push(StepRecord {
            t,
            shown,
            output: step.output,
            correct,
            closure,
            chain_index: step.chain_index,
            truncated: step.truncated,
        });
    }
    Ok(GameTrace {
        header,
        steps: records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SettleTime {
    At(usize),
    NeverWithinHorizon,
}

impl std::fmt::Display for SettleTime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SettleTime::At(t) => write!(f, "{t}"),
            SettleTime::NeverWithinHorizon => write!(f, "never-within-horizon"),
        }
    }
}

/// Smallest time from which every later step in the trace is correct.
pub fn settle_time(trace: &GameTrace) -> SettleTime {
    let mut settle = None;
    for record in trace.steps.iter().rev() {
        if !record.correct {
            break;
        }
        settle = Some(record.t);
    }
    match settle {
        Some(t) => SettleTime::At(t),
        None => SettleTime::NeverWithinHorizon,
    }
}

pub fn render_trace(trace: &GameTrace) -> String {
    let mut out = String::new();
    let h = &trace.header;
    let _ = writeln!(out, "#!collection={}", h.collection);
    let _ = writeln!(out, "#!target={}", h.target);
    let _ = writeln!(out, "#!noise={}", h.noise);
    let strings: Vec<String> = h.noise_strings.iter().map(|e| e.to_string()).collect();
    let _ = writeln!(out, "#!noise_strings={}", strings.join(" "));
    let _ = writeln!(out, "#!schedule={}", h.schedule);
    let _ = writeln!(out, "#!seed={}", h.seed);
    match h.promised_tstar {
        Some(t) => {
            let _ = writeln!(out, "#!promised_tstar={t}");
        }
        None => {
            let _ = writeln!(out, "#!promised_tstar=none");
        }
    }
    if h.noise_mismatch {
        let _ = writeln!(out, "#!noise_mismatch=1");
    }
    for s in &trace.steps {
        let _ = writeln!(
            out,
            "t={} x={} z={} correct={} closure={}",
            s.t,
            s.shown,
            s.output,
            if s.correct { 1 } else { 0 },
            s.closure.render()
        );
    }
    out
}

/// Parses a rendered trace back; chain bookkeeping is not part of the file
/// format and comes back empty.
pub fn parse_trace(text: &str) -> Result<GameTrace, Error> {
    let bad = |msg: &str| Error::BadTrace(msg.to_string());
    let mut header = TraceHeader {
        collection: String::new(),
        target: String::new(),
        noise: 0,
        noise_strings: Vec::new(),
        schedule: String::new(),
        seed: 0,
        promised_tstar: None,
        noise_mismatch: false,
    };
    let mut steps = Vec::new();
    for line in text.lines() {
        if let Some(kv) = line.strip_prefix("#!") {
            let (key, value) = kv.split_once('=').ok_or_else(|| bad("header without ="))?;
            match key {
                "collection" => header.collection = value.to_string(),
                "target" => header.target = value.to_string(),
                "noise" => header.noise = value.parse().map_err(|_| bad("bad noise"))?,
                "noise_strings" => {
                    header.noise_strings = crate::collection::parse_element_list(value)
                        .map_err(|_| bad("bad noise_strings"))?
                }
                "schedule" => header.schedule = value.to_string(),
                "seed" => header.seed = value.parse().map_err(|_| bad("bad seed"))?,
                "promised_tstar" => {
                    header.promised_tstar = match value {
                        "none" => None,
                        n => Some(n.parse().map_err(|_| bad("bad promised_tstar"))?),
                    }
                }
                "noise_mismatch" => header.noise_mismatch = value == "1",
                other => return Err(bad(&format!("unknown header key: {other}"))),
            }
            continue;
        }
        let mut t = None;
        let mut shown = None;
        let mut output = None;
        let mut correct = None;
        let mut closure = None;
        for tok in line.split_whitespace() {
            let (key, value) = tok.split_once('=').ok_or_else(|| bad("step without ="))?;
            match key {
                "t" => t = Some(value.parse().map_err(|_| bad("bad t"))?),
                "x" => shown = Some(value.parse().map_err(|_| bad("bad x"))?),
                "z" => output = Some(value.parse().map_err(|_| bad("bad z"))?),
                "correct" => correct = Some(value == "1"),
                "closure" => closure = Some(ClosureStatus::parse(value)?),
                other => return Err(bad(&format!("unknown step key: {other}"))),
            }
        }
        steps.push(StepRecord {
            t: t.ok_or_else(|| bad("missing t"))?,
            shown: shown.ok_or_else(|| bad("missing x"))?,
            output: output.ok_or_else(|| bad("missing z"))?,
            correct: correct.ok_or_else(|| bad("missing correct"))?,
            closure: closure.ok_or_else(|| bad("missing closure"))?,
            chain_index: None,
            truncated: false,
        });
    }
    Ok(GameTrace { header, steps })
}

/// Replays a rendered trace from its own header, using the built-in closure
/// generator, and returns the regenerated bytes.
pub fn replay_trace(text: &str, collection: &Collection) -> Result<String, Error> {
    let parsed = parse_trace(text)?;
    if parsed.steps.is_empty() {
        return Err(Error::BadTrace("no steps to replay".to_string()));
    }
    let target = resolve_target(collection, &parsed.header.target)?;
    let schedule = Schedule::parse(&parsed.header.schedule, parsed.header.seed)?;
    let mut enumeration = Enumeration::new(
        target,
        parsed.header.noise_strings.clone(),
        schedule,
    )?;
    let mut generator =
        crate::generator::ClosureGenerator::new(collection.clone(), parsed.header.noise);
    let trace = play(
        collection,
        &mut generator,
        &mut enumeration,
        parsed.steps.len(),
        parsed.header.clone(),
    )?;
    Ok(render_trace(&trace))
}

/// Resolves a target label: a language name for explicit collections, or
/// `columns:<c>,<c>,...` for the column family.
pub fn resolve_target(
    collection: &Collection,
    label: &str,
) -> Result<crate::lang::SymbolicLanguage, Error> {
    if let Some(named) = collection.language(label) {
        return Ok(named.language.clone());
    }
    if collection.is_column_family() {
        if let Some(rest) = label.strip_prefix("columns:") {
            let mut columns = Vec::new();
            for tok in rest.split(',').filter(|t| !t.is_empty()) {
                let c: u32 = tok
                    .parse()
                    .map_err(|_| Error::UnknownLanguage(label.to_string()))?;
                columns.push(c);
            }
            return crate::lang::SymbolicLanguage::from_blocks(columns)
                .map_err(|_| Error::UnknownLanguage(label.to_string()));
        }
    }
    Err(Error::UnknownLanguage(label.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::Schedule;
    use crate::fixtures;
    use crate::generator::ClosureGenerator;

    fn header(noise: usize, promised: Option<usize>) -> TraceHeader {
        TraceHeader {
            collection: "c_ex".into(),
            target: "L1".into(),
            noise,
            noise_strings: vec![Element::new(2, 0)],
            schedule: "prefix".into(),
            seed: 0,
            promised_tstar: promised,
            noise_mismatch: false,
        }
    }

    fn run_l1(steps: usize) -> GameTrace {
        let c = fixtures::c_ex();
        let target = c.language("L1").unwrap().language.clone();
        let mut e =
            Enumeration::new(target, vec![Element::new(2, 0)], Schedule::Prefix).unwrap();
        let mut g = ClosureGenerator::new(c.clone(), 1);
        play(&c, &mut g, &mut e, steps, header(1, Some(6))).unwrap()
    }

    #[test]
    fn settles_after_the_promised_time() {
        let trace = run_l1(10);
        for s in &trace.steps {
            if s.t > 6 {
                assert!(s.correct, "step {} incorrect", s.t);
            }
        }
        match settle_time(&trace) {
            SettleTime::At(t) => assert!(t <= 7, "settled at {t}"),
            SettleTime::NeverWithinHorizon => panic!("never settled"),
        }
    }

    #[test]
    fn singleton_collection_is_correct_from_the_start() {
        let single = crate::collection::Collection::explicit(
            "single",
            vec![crate::collection::NamedLanguage {
                name: "L1".into(),
                language: fixtures::c_ex().language("L1").unwrap().language.clone(),
            }],
        )
        .unwrap();
        let target = single.language("L1").unwrap().language.clone();
        let mut e = Enumeration::pure(target);
        let mut g = ClosureGenerator::new(single.clone(), 0);
        let mut h = header(0, Some(0));
        h.collection = "single".into();
        h.noise_strings = vec![];
        let trace = play(&single, &mut g, &mut e, 5, h).unwrap();
        assert!(trace.steps.iter().all(|s| s.correct));
        assert_eq!(settle_time(&trace), SettleTime::At(0));
    }

    #[test]
    fn single_step_trace() {
        let trace = run_l1(1);
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].t, 0);
    }

    #[test]
    fn judgment_matches_recomputation() {
        let trace = run_l1(10);
        let c = fixtures::c_ex();
        let target = c.language("L1").unwrap().language.clone();
        let mut sample = SampleSet::new();
        for s in &trace.steps {
            sample.insert(s.shown);
            assert_eq!(
                s.correct,
                target.contains(s.output) && !sample.contains(&s.output)
            );
        }
    }

    #[test]
    fn settle_edge_cases() {
        let mut trace = run_l1(10);
        for s in &mut trace.steps {
            s.correct = true;
        }
        assert_eq!(settle_time(&trace), SettleTime::At(0));
        trace.steps.last_mut().unwrap().correct = false;
        assert_eq!(settle_time(&trace), SettleTime::NeverWithinHorizon);
    }

    #[test]
    fn trace_renders_exactly() {
        let trace = run_l1(2);
        let text = render_trace(&trace);
        let want = "\
#!collection=c_ex
#!target=L1
#!noise=1
#!noise_strings=(2,0)
#!schedule=prefix
#!seed=0
#!promised_tstar=6
t=0 x=(2,0) z=(0,0) correct=1 closure=finite:4
t=1 x=(0,0) z=(1,0) correct=1 closure=finite:4
";
        assert_eq!(text, want);
    }

    #[test]
    fn parse_render_round_trip() {
        let trace = run_l1(6);
        let text = render_trace(&trace);
        let parsed = parse_trace(&text).unwrap();
        assert_eq!(render_trace(&parsed), text);
    }

    #[test]
    fn replay_reproduces_bytes() {
        let trace = run_l1(10);
        let text = render_trace(&trace);
        let again = replay_trace(&text, &fixtures::c_ex()).unwrap();
        assert_eq!(again, text);
    }

    #[test]
    fn noise_mismatch_is_flagged() {
        let c = fixtures::c_ex();
        let target = c.language("L1").unwrap().language.clone();
        let mut e = Enumeration::new(
            target,
            vec![Element::new(2, 0), Element::new(2, 1)],
            Schedule::Prefix,
        )
        .unwrap();
        let mut g = ClosureGenerator::new(c.clone(), 1);
        let mut h = header(1, None);
        h.noise_strings = vec![Element::new(2, 0), Element::new(2, 1)];
        let trace = play(&c, &mut g, &mut e, 3, h).unwrap();
        assert!(trace.header.noise_mismatch);
        assert!(render_trace(&trace).contains("#!noise_mismatch=1"));
    }

    #[test]
    fn resolve_column_family_targets() {
        let cf = fixtures::column_family();
        let lang = resolve_target(&cf, "columns:0,3").unwrap();
        assert_eq!(
            lang,
            crate::lang::SymbolicLanguage::from_blocks([0, 3]).unwrap()
        );
        assert!(resolve_target(&cf, "columns:").is_err());
        assert!(resolve_target(&fixtures::c_ex(), "nope").is_err());
    }
}
