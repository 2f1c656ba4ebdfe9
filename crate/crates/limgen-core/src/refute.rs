//! The refutation adversary for the column family.
//!
//! The ladder assigns each index `i` a set `s_i` of `i` fresh columns and
//! the prefix of their first elements. Probing a generator on every ladder
//! prefix splits its behavior three ways: outputs that land inside their
//! own ladder set, outputs concentrating on one ladder set, or outputs
//! scattering. Each case yields a union-of-columns language that the probed
//! prefixes enumerate with at most one noisy string, while the generator's
//! recorded outputs all fall outside it.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::generator::{query_fresh, Generator};
use crate::universe::Element;

/// Ladder of pairwise disjoint column sets: set `i` holds the `i` columns
/// `i(i-1)/2 .. i(i+1)/2 - 1`, so the sets partition a prefix of the
/// column indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefutationPlan {
    sets: Vec<BTreeSet<u32>>,
}

impl RefutationPlan {
    pub fn new(horizon: usize) -> Result<RefutationPlan, Error> {
        if horizon == 0 {
            return Err(Error::EmptyPlan);
        }
        let sets = (1..=horizon as u32)
            .map(|i| (i * (i - 1) / 2..i * (i + 1) / 2).collect())
            .collect();
        Ok(RefutationPlan { sets })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Ladder set `i`, 1-based.
    pub fn set(&self, i: usize) -> &BTreeSet<u32> {
        &self.sets[i - 1]
    }

    /// The query prefix for ladder index `i`: the first element of each of
    /// its columns, ascending.
    pub fn prefix(&self, i: usize) -> Vec<Element> {
        self.set(i).iter().map(|&c| Element::new(c, 0)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifyThresholds {
    /// Indices whose output column lands in their own ladder set.
    pub inside: usize,
    /// Outside indices attracted by one single ladder set.
    pub concentrated: usize,
    /// Outside indices needed to run the scattered construction.
    pub scattered: usize,
}

impl ClassifyThresholds {
    /// Defaults derived from the horizon; the floor of two keeps one-index
    /// horizons inconclusive instead of pretending a trend.
    pub fn for_horizon(horizon: usize) -> ClassifyThresholds {
        ClassifyThresholds {
            inside: horizon.div_ceil(2).max(2),
            concentrated: horizon.div_ceil(3).max(2),
            scattered: horizon.div_ceil(3).max(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// Plan indices whose output column fell inside their own ladder set.
    Inside { indices: Vec<usize> },
    /// One ladder set attracted the outside outputs.
    Concentrated { attractor: usize, indices: Vec<usize> },
    /// Outside outputs with no concentration.
    Scattered { indices: Vec<usize> },
    /// No case reached its threshold at this horizon.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseReport {
    /// Output for each plan index, 1-based: `outputs[i-1]` answers prefix `i`.
    pub outputs: Vec<Element>,
    pub classification: Classification,
    pub thresholds: ClassifyThresholds,
}

impl CaseReport {
    pub fn output_column(&self, i: usize) -> u32 {
        self.outputs[i - 1].column()
    }
}

/// Queries the generator on every ladder prefix from a fresh state and
/// classifies the outputs.
pub fn classify_generator(
    g: &mut dyn Generator,
    plan: &RefutationPlan,
    thresholds: ClassifyThresholds,
) -> Result<CaseReport, Error> {
    let mut outputs = Vec::with_capacity(plan.len());
    for i in 1..=plan.len() {
        outputs.push(query_fresh(g, &plan.prefix(i))?);
    }

    let inside: Vec<usize> = (1..=plan.len())
        .filter(|&i| plan.set(i).contains(&outputs[i - 1].column()))
        .collect();
    if inside.len() >= thresholds.inside {
        return Ok(CaseReport {
            outputs,
            classification: Classification::Inside { indices: inside },
            thresholds,
        });
    }

    let outside: Vec<usize> = (1..=plan.len())
        .filter(|&i| !plan.set(i).contains(&outputs[i - 1].column()))
        .collect();

    let mut best: Option<(usize, Vec<usize>)> = None;
    for attractor in 1..=plan.len() {
        let attracted: Vec<usize> = outside
            .iter()
            .copied()
            .filter(|&j| j != attractor && plan.set(attractor).contains(&outputs[j - 1].column()))
            .collect();
        let better = match &best {
            Some((_, current)) => attracted.len() > current.len(),
            None => true,
        };
        if better {
            best = Some((attractor, attracted));
        }
    }
    if let Some((attractor, attracted)) = best {
        if attracted.len() >= thresholds.concentrated {
            return Ok(CaseReport {
                outputs,
                classification: Classification::Concentrated {
                    attractor,
                    indices: attracted,
                },
                thresholds,
            });
        }
    }

    if outside.len() >= thresholds.scattered {
        return Ok(CaseReport {
            outputs,
            classification: Classification::Scattered { indices: outside },
            thresholds,
        });
    }

    Ok(CaseReport {
        outputs,
        classification: Classification::Inconclusive,
        thresholds,
    })
}

/// The counterexample language for the inside and concentrated cases, as a
/// set of columns.
///
/// Inside: each flagged ladder set minus the column the generator chose, so
/// every flagged prefix carries exactly one noisy string and the recorded
/// output sits outside. Concentrated: the union of the attracted ladder
/// sets, which excludes the attractor entirely.
pub fn build_case_language(
    report: &CaseReport,
    plan: &RefutationPlan,
) -> Result<BTreeSet<u32>, Error> {
    let columns: BTreeSet<u32> = match &report.classification {
        Classification::Inside { indices } => indices
            .iter()
            .flat_map(|&i| {
                let hit = report.output_column(i);
                plan.set(i).iter().copied().filter(move |&c| c != hit)
            })
            .collect(),
        Classification::Concentrated { indices, .. } => indices
            .iter()
            .flat_map(|&j| plan.set(j).iter().copied())
            .collect(),
        Classification::Scattered { .. } => return Err(Error::ScatteredCase),
        Classification::Inconclusive => return Err(Error::Inconclusive),
    };
    if columns.is_empty() {
        return Err(Error::EmptyLanguage);
    }
    Ok(columns)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScatteredIteration {
    /// Iteration number, 0-based over the scattered index list.
    pub iteration: usize,
    /// Ladder index queried at this iteration.
    pub plan_index: usize,
    pub output: Element,
    pub accepted: bool,
    pub columns_after: BTreeSet<u32>,
    pub accepted_after: BTreeSet<usize>,
    pub forbidden_after: BTreeSet<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScatteredOutcome {
    /// Columns of the language built so far.
    pub columns: BTreeSet<u32>,
    /// Accepted iteration numbers.
    pub accepted: BTreeSet<usize>,
    /// Output columns of accepted iterations; never added to the language.
    pub forbidden: BTreeSet<u32>,
    pub log: Vec<ScatteredIteration>,
}

/// The greedy loop for the scattered case: walk the scattered ladder sets in
/// order and absorb a set when it avoids every forbidden column and the
/// generator's answer on its prefix is not already inside the language. The
/// answer's column becomes forbidden, so accepted answers stay outside the
/// language forever.
pub fn run_scattered_construction(
    g: &mut dyn Generator,
    plan: &RefutationPlan,
    scattered: &[usize],
    iterations: usize,
) -> Result<ScatteredOutcome, Error> {
    let mut outcome = ScatteredOutcome {
        columns: BTreeSet::new(),
        accepted: BTreeSet::new(),
        forbidden: BTreeSet::new(),
        log: Vec::new(),
    };
    for (iteration, &plan_index) in scattered.iter().enumerate().take(iterations) {
        let set = plan.set(plan_index);
        let output = query_fresh(g, &plan.prefix(plan_index))?;
        let in_language = outcome.columns.contains(&output.column());
        let blocked = set.iter().any(|c| outcome.forbidden.contains(c));
        let accepted = !blocked && !in_language;
        if accepted {
            outcome.columns.extend(set.iter().copied());
            outcome.accepted.insert(iteration);
            outcome.forbidden.insert(output.column());
        }
        outcome.log.push(ScatteredIteration {
            iteration,
            plan_index,
            output,
            accepted,
            columns_after: outcome.columns.clone(),
            accepted_after: outcome.accepted.clone(),
            forbidden_after: outcome.forbidden.clone(),
        });
    }
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    /// Indices whose replayed output falls outside the language.
    pub refuted: Vec<usize>,
    /// Indices whose prefix does not carry the expected number of strings
    /// outside the language.
    pub invalid_prefixes: Vec<usize>,
}

/// Replays the generator on each accepted prefix and checks the
/// construction: outputs must fall outside the language and each prefix
/// must be a valid enumeration prefix with exactly `expected_outside`
/// noisy strings.
pub fn verify_refutation(
    g: &mut dyn Generator,
    language_columns: &BTreeSet<u32>,
    queries: &[(usize, Vec<Element>)],
    expected_outside: usize,
) -> Result<VerifyReport, Error> {
    if language_columns.is_empty() {
        return Err(Error::EmptyLanguage);
    }
    let mut refuted = Vec::new();
    let mut invalid_prefixes = Vec::new();
    for (index, prefix) in queries {
        let outside = prefix
            .iter()
            .filter(|e| !language_columns.contains(&e.column()))
            .count();
        if outside != expected_outside {
            invalid_prefixes.push(*index);
        }
        let output = query_fresh(g, prefix)?;
        if !language_columns.contains(&output.column()) {
            refuted.push(*index);
        }
    }
    Ok(VerifyReport {
        refuted,
        invalid_prefixes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefutationOutcome {
    Refuted(RefutationRun),
    Inconclusive(CaseReport),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefutationRun {
    pub report: CaseReport,
    /// Columns of the counterexample language.
    pub language: BTreeSet<u32>,
    /// Indices the construction committed to; plan indices for the inside
    /// and concentrated cases, iteration numbers for the scattered case.
    pub accepted: Vec<usize>,
    pub verify: VerifyReport,
}

/// The whole pipeline: ladder, classification, counterexample language, and
/// replay verification.
pub fn run_refutation(
    g: &mut dyn Generator,
    horizon: usize,
    iterations: usize,
    thresholds: Option<ClassifyThresholds>,
) -> Result<RefutationOutcome, Error> {
    let plan = RefutationPlan::new(horizon)?;
    let thresholds = thresholds.unwrap_or_else(|| ClassifyThresholds::for_horizon(horizon));
    let report = classify_generator(g, &plan, thresholds)?;
    match &report.classification {
        Classification::Inconclusive => Ok(RefutationOutcome::Inconclusive(report)),
        Classification::Inside { indices } => {
            let language = build_case_language(&report, &plan)?;
            let queries: Vec<(usize, Vec<Element>)> =
                indices.iter().map(|&i| (i, plan.prefix(i))).collect();
            let verify = verify_refutation(g, &language, &queries, 1)?;
            Ok(RefutationOutcome::Refuted(RefutationRun {
                accepted: indices.clone(),
                report,
                language,
                verify,
            }))
        }
        Classification::Concentrated { indices, .. } => {
            let language = build_case_language(&report, &plan)?;
            let queries: Vec<(usize, Vec<Element>)> =
                indices.iter().map(|&i| (i, plan.prefix(i))).collect();
            let verify = verify_refutation(g, &language, &queries, 0)?;
            Ok(RefutationOutcome::Refuted(RefutationRun {
                accepted: indices.clone(),
                report,
                language,
                verify,
            }))
        }
        Classification::Scattered { indices } => {
            let outcome = run_scattered_construction(g, &plan, indices, iterations)?;
            if outcome.columns.is_empty() {
                return Err(Error::EmptyLanguage);
            }
            let queries: Vec<(usize, Vec<Element>)> = outcome
                .accepted
                .iter()
                .map(|&iteration| (iteration, plan.prefix(indices[iteration])))
                .collect();
            let verify = verify_refutation(g, &outcome.columns, &queries, 0)?;
            Ok(RefutationOutcome::Refuted(RefutationRun {
                accepted: outcome.accepted.iter().copied().collect(),
                report,
                language: outcome.columns,
                verify,
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generator::{ClosureGenerator, GeneratorStep};

    /// Answers each known prefix with a scripted element; the prefix is the
    /// whole observed history.
    struct Scripted {
        answers: Vec<(Vec<Element>, Element)>,
        history: Vec<Element>,
    }

    impl Scripted {
        fn new(answers: Vec<(Vec<Element>, Element)>) -> Scripted {
            Scripted {
                answers,
                history: Vec::new(),
            }
        }
    }

    impl Generator for Scripted {
        fn observe(&mut self, x: Element) {
            self.history.push(x);
        }

        fn emit(&mut self) -> Result<GeneratorStep, Error> {
            let output = self
                .answers
                .iter()
                .find(|(prefix, _)| *prefix == self.history)
                .map(|(_, out)| *out)
                .unwrap_or_else(|| Element::new(999, 0));
            Ok(GeneratorStep {
                output,
                chain_index: None,
                truncated: false,
            })
        }

        fn reset(&mut self) -> Result<(), Error> {
            self.history.clear();
            Ok(())
        }
    }

    fn ladder_answers(
        plan: &RefutationPlan,
        f: impl Fn(usize) -> Element,
    ) -> Vec<(Vec<Element>, Element)> {
        (1..=plan.len()).map(|i| (plan.prefix(i), f(i))).collect()
    }

    #[test]
    fn ladder_sets_are_triangular() {
        let plan = RefutationPlan::new(4).unwrap();
        assert_eq!(plan.set(1).iter().copied().collect::<Vec<_>>(), vec![0]);
        assert_eq!(plan.set(2).iter().copied().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(
            plan.set(3).iter().copied().collect::<Vec<_>>(),
            vec![3, 4, 5]
        );
        assert_eq!(
            plan.set(4).iter().copied().collect::<Vec<_>>(),
            vec![6, 7, 8, 9]
        );
        assert_eq!(
            plan.prefix(3),
            vec![Element::new(3, 0), Element::new(4, 0), Element::new(5, 0)]
        );
        assert!(RefutationPlan::new(0).is_err());
    }

    #[test]
    fn ladder_sets_partition_a_prefix() {
        let plan = RefutationPlan::new(7).unwrap();
        let mut all = BTreeSet::new();
        for i in 1..=plan.len() {
            assert_eq!(plan.set(i).len(), i);
            for c in plan.set(i) {
                assert!(all.insert(*c), "column {c} repeated");
            }
        }
        let expect: BTreeSet<u32> = (0..28).collect();
        assert_eq!(all, expect);
    }

    #[test]
    fn closure_generator_concentrates_on_the_first_set() {
        // Level-1 closure of every ladder prefix is empty, so the fallback
        // emits the smallest unseen element, whose column is 0 for every
        // prefix except the first.
        let mut g = ClosureGenerator::new(fixtures::column_family(), 1);
        let plan = RefutationPlan::new(6).unwrap();
        let report =
            classify_generator(&mut g, &plan, ClassifyThresholds::for_horizon(6)).unwrap();
        let columns: Vec<u32> = (1..=6).map(|i| report.output_column(i)).collect();
        assert_eq!(columns, vec![1, 0, 0, 0, 0, 0]);
        assert_eq!(
            report.classification,
            Classification::Concentrated {
                attractor: 1,
                indices: vec![2, 3, 4, 5, 6]
            }
        );
    }

    #[test]
    fn inside_case_classification_and_language() {
        let plan = RefutationPlan::new(6).unwrap();
        let answers = ladder_answers(&plan, |i| {
            Element::new(*plan.set(i).iter().next().unwrap(), 1)
        });
        let mut g = Scripted::new(answers);
        let report =
            classify_generator(&mut g, &plan, ClassifyThresholds::for_horizon(6)).unwrap();
        assert_eq!(
            report.classification,
            Classification::Inside {
                indices: vec![1, 2, 3, 4, 5, 6]
            }
        );
        let language = build_case_language(&report, &plan).unwrap();
        // Every ladder set minus its smallest column.
        let want: BTreeSet<u32> = (1..=6u32)
            .flat_map(|i| {
                let lo = i * (i - 1) / 2;
                (lo + 1)..(i * (i + 1) / 2)
            })
            .collect();
        assert_eq!(language, want);
    }

    #[test]
    fn scattered_classification() {
        let plan = RefutationPlan::new(6).unwrap();
        let answers = ladder_answers(&plan, |i| Element::new(100 + i as u32, 0));
        let mut g = Scripted::new(answers);
        let report =
            classify_generator(&mut g, &plan, ClassifyThresholds::for_horizon(6)).unwrap();
        assert_eq!(
            report.classification,
            Classification::Scattered {
                indices: vec![1, 2, 3, 4, 5, 6]
            }
        );
        assert!(matches!(
            build_case_language(&report, &plan),
            Err(Error::ScatteredCase)
        ));
    }

    #[test]
    fn concentrated_language_is_the_attracted_union() {
        let mut g = ClosureGenerator::new(fixtures::column_family(), 1);
        let plan = RefutationPlan::new(6).unwrap();
        let report =
            classify_generator(&mut g, &plan, ClassifyThresholds::for_horizon(6)).unwrap();
        let language = build_case_language(&report, &plan).unwrap();
        let want: BTreeSet<u32> = (1..=20).collect();
        assert_eq!(language, want);
    }

    #[test]
    fn scattered_construction_accepts_fresh_columns() {
        let plan = RefutationPlan::new(6).unwrap();
        let scattered: Vec<usize> = (1..=6).collect();
        let answers = ladder_answers(&plan, |i| Element::new(100 + i as u32, 0));
        let mut g = Scripted::new(answers);
        let outcome = run_scattered_construction(&mut g, &plan, &scattered, 5).unwrap();
        assert_eq!(
            outcome.accepted.iter().copied().collect::<Vec<_>>(),
            vec![0, 1, 2, 3, 4]
        );
        assert_eq!(
            outcome.forbidden.iter().copied().collect::<Vec<_>>(),
            vec![101, 102, 103, 104, 105]
        );
        let want_columns: BTreeSet<u32> = (0..15).collect();
        assert_eq!(outcome.columns, want_columns);
    }

    #[test]
    fn scattered_construction_skips_forbidden_sets() {
        // The answer to the first prefix lands in the second ladder set, so
        // the second iteration is blocked by the forbidden column.
        let plan = RefutationPlan::new(3).unwrap();
        let scattered: Vec<usize> = vec![1, 2, 3];
        let second_set_column = *plan.set(2).iter().next().unwrap();
        let answers = vec![
            (plan.prefix(1), Element::new(second_set_column, 5)),
            (plan.prefix(2), Element::new(200, 0)),
            (plan.prefix(3), Element::new(201, 0)),
        ];
        let mut g = Scripted::new(answers);
        let outcome = run_scattered_construction(&mut g, &plan, &scattered, 3).unwrap();
        assert!(!outcome.log[1].accepted);
        assert_eq!(
            outcome.accepted.iter().copied().collect::<Vec<_>>(),
            vec![0, 2]
        );
    }

    #[test]
    fn scattered_construction_zero_iterations() {
        let plan = RefutationPlan::new(3).unwrap();
        let mut g = Scripted::new(vec![]);
        let outcome = run_scattered_construction(&mut g, &plan, &[1, 2, 3], 0).unwrap();
        assert!(outcome.columns.is_empty());
        assert!(outcome.accepted.is_empty());
        assert!(outcome.log.is_empty());
    }

    #[test]
    fn scattered_invariants_hold_per_iteration() {
        let plan = RefutationPlan::new(6).unwrap();
        let scattered: Vec<usize> = (1..=6).collect();
        let answers = ladder_answers(&plan, |i| Element::new(100 + i as u32, 0));
        let mut g = Scripted::new(answers);
        let outcome = run_scattered_construction(&mut g, &plan, &scattered, 6).unwrap();
        for record in &outcome.log {
            let union: BTreeSet<u32> = record
                .accepted_after
                .iter()
                .flat_map(|&it| plan.set(scattered[it]).iter().copied())
                .collect();
            assert_eq!(record.columns_after, union);
            assert_eq!(record.forbidden_after.len(), record.accepted_after.len());
            assert!(record
                .forbidden_after
                .iter()
                .all(|c| !record.columns_after.contains(c)));
        }
    }

    #[test]
    fn verify_flags_outputs_outside_the_language() {
        let mut g = ClosureGenerator::new(fixtures::column_family(), 1);
        let plan = RefutationPlan::new(6).unwrap();
        let language: BTreeSet<u32> = (1..=20).collect();
        let queries: Vec<(usize, Vec<Element>)> =
            (2..=6).map(|i| (i, plan.prefix(i))).collect();
        let report = verify_refutation(&mut g, &language, &queries, 0).unwrap();
        assert_eq!(report.refuted, vec![2, 3, 4, 5, 6]);
        assert!(report.invalid_prefixes.is_empty());
    }

    #[test]
    fn verify_negative_control() {
        // A generator answering inside the language refutes nothing.
        let plan = RefutationPlan::new(3).unwrap();
        let language: BTreeSet<u32> = plan.set(2).iter().copied().collect();
        let answers = vec![(plan.prefix(2), Element::new(*plan.set(2).iter().next().unwrap(), 7))];
        let mut g = Scripted::new(answers);
        let report =
            verify_refutation(&mut g, &language, &[(2, plan.prefix(2))], 0).unwrap();
        assert!(report.refuted.is_empty());
    }

    #[test]
    fn verify_rejects_empty_language() {
        let mut g = Scripted::new(vec![]);
        assert_eq!(
            verify_refutation(&mut g, &BTreeSet::new(), &[], 0).unwrap_err(),
            Error::EmptyLanguage
        );
    }

    #[test]
    fn pipeline_refutes_the_builtin_generator() {
        let mut g = ClosureGenerator::new(fixtures::column_family(), 1);
        let run = match run_refutation(&mut g, 6, 8, None).unwrap() {
            RefutationOutcome::Refuted(run) => run,
            other => panic!("expected refutation, got {other:?}"),
        };
        assert_eq!(run.verify.refuted.len(), 5);
        assert!(run.verify.invalid_prefixes.is_empty());
    }

    #[test]
    fn tiny_horizon_is_inconclusive() {
        let mut g = ClosureGenerator::new(fixtures::column_family(), 1);
        match run_refutation(&mut g, 1, 3, None).unwrap() {
            RefutationOutcome::Inconclusive(_) => {}
            other => panic!("expected inconclusive, got {other:?}"),
        }
    }

    #[test]
    fn inside_prefixes_carry_exactly_one_noisy_string() {
        let plan = RefutationPlan::new(6).unwrap();
        let answers = ladder_answers(&plan, |i| {
            Element::new(*plan.set(i).iter().next().unwrap(), 1)
        });
        let mut g = Scripted::new(answers);
        let run = match run_refutation(&mut g, 6, 8, None).unwrap() {
            RefutationOutcome::Refuted(run) => run,
            other => panic!("expected refutation, got {other:?}"),
        };
        assert!(matches!(
            run.report.classification,
            Classification::Inside { .. }
        ));
        assert!(run.verify.invalid_prefixes.is_empty());
        assert_eq!(run.verify.refuted, run.accepted);
    }
}
