//! Adversarial enumerations of a target language with bounded noise.
//!
//! An enumeration is an infinite repetition-free sequence that covers the
//! target and inserts at most the declared noise strings, all from outside
//! the target. Target strings always appear in canonical order; the schedule
//! only decides where the noise lands, so the first `n` members of the
//! target show up within the first `n + noise` emissions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::lang::SymbolicLanguage;
use crate::universe::Element;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    /// All noise first, then the target in canonical order.
    Prefix,
    /// Noise at the given emission positions, one per noise string.
    Interleave(Vec<usize>),
    /// Noise positions drawn from a seeded generator.
    Random(u64),
}

impl Schedule {
    pub fn label(&self) -> String {
        match self {
            Schedule::Prefix => "prefix".to_string(),
            Schedule::Interleave(positions) => {
                let toks: Vec<String> = positions.iter().map(|p| p.to_string()).collect();
                format!("interleave:{}", toks.join(","))
            }
            Schedule::Random(seed) => format!("random:{seed}"),
        }
    }

    pub fn parse(text: &str, seed: u64) -> Result<Schedule, Error> {
        if text == "prefix" {
            return Ok(Schedule::Prefix);
        }
        if text == "random" {
            return Ok(Schedule::Random(seed));
        }
        if let Some(rest) = text.strip_prefix("random:") {
            let s: u64 = rest
                .parse()
                .map_err(|_| Error::BadSchedule(text.to_string()))?;
            return Ok(Schedule::Random(s));
        }
        if let Some(rest) = text.strip_prefix("interleave:") {
            let mut positions = Vec::new();
            for tok in rest.split(',').filter(|t| !t.is_empty()) {
                let p: usize = tok
                    .parse()
                    .map_err(|_| Error::BadSchedule(text.to_string()))?;
                positions.push(p);
            }
            return Ok(Schedule::Interleave(positions));
        }
        Err(Error::BadSchedule(text.to_string()))
    }
}

#[derive(Debug)]
pub struct Enumeration {
    target: SymbolicLanguage,
    noise: Vec<Element>,
    /// (emission position, noise list index), ascending by position.
    placements: Vec<(usize, usize)>,
    emitted: usize,
    target_emitted: usize,
    next_placement: usize,
    /// Prefix of the target's canonical enumeration, grown by doubling.
    cache: Vec<Element>,
}

impl Enumeration {
    pub fn new(
        target: SymbolicLanguage,
        noise: Vec<Element>,
        schedule: Schedule,
    ) -> Result<Enumeration, Error> {
        for (i, e) in noise.iter().enumerate() {
            if target.contains(*e) {
                return Err(Error::NoiseInsideTarget);
            }
            if noise[..i].contains(e) {
                return Err(Error::DuplicateNoise);
            }
        }
        let placements = match schedule {
            Schedule::Prefix => (0..noise.len()).map(|i| (i, i)).collect(),
            Schedule::Interleave(positions) => {
                if positions.len() != noise.len() {
                    return Err(Error::BadSchedule(format!(
                        "{} positions for {} noise strings",
                        positions.len(),
                        noise.len()
                    )));
                }
                let mut pairs: Vec<(usize, usize)> =
                    positions.into_iter().zip(0..noise.len()).collect();
                pairs.sort();
                if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
                    return Err(Error::BadSchedule("repeated position".to_string()));
                }
                pairs
            }
            Schedule::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let window = 4 * noise.len() + 4;
                let mut positions: Vec<usize> = Vec::with_capacity(noise.len());
                for _ in 0..noise.len() {
                    loop {
                        let p = rng.random_range(0..window);
                        if !positions.contains(&p) {
                            positions.push(p);
                            break;
                        }
                    }
                }
                let mut pairs: Vec<(usize, usize)> =
                    positions.into_iter().zip(0..noise.len()).collect();
                pairs.sort();
                pairs
            }
        };
        Ok(Enumeration {
            target,
            noise,
            placements,
            emitted: 0,
            target_emitted: 0,
            next_placement: 0,
            cache: Vec::new(),
        })
    }

    pub fn pure(target: SymbolicLanguage) -> Enumeration {
        Enumeration::new(target, Vec::new(), Schedule::Prefix).expect("no noise to reject")
    }

    pub fn target(&self) -> &SymbolicLanguage {
        &self.target
    }

    pub fn noise(&self) -> &[Element] {
        &self.noise
    }
}

impl Iterator for Enumeration {
    type Item = Element;

    /// Infinite: targets are infinite languages.
    fn next(&mut self) -> Option<Element> {
        let e = if self
            .placements
            .get(self.next_placement)
            .is_some_and(|&(pos, _)| pos == self.emitted)
        {
            let (_, noise_index) = self.placements[self.next_placement];
            self.next_placement += 1;
            self.noise[noise_index]
        } else {
            if self.target_emitted >= self.cache.len() {
                let want = (self.cache.len() * 2).max(16);
                self.cache = self.target.enumerate(want);
            }
            let next = self.cache[self.target_emitted];
            self.target_emitted += 1;
            next
        };
        self.emitted += 1;
        Some(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn l1() -> SymbolicLanguage {
        fixtures::c_ex().language("L1").unwrap().language.clone()
    }

    fn take(e: &mut Enumeration, n: usize) -> Vec<Element> {
        e.by_ref().take(n).collect()
    }

    #[test]
    fn prefix_schedule_emits_noise_first() {
        let mut e = Enumeration::new(l1(), vec![Element::new(2, 0)], Schedule::Prefix).unwrap();
        let got = take(&mut e, 4);
        assert_eq!(
            got,
            vec![
                Element::new(2, 0),
                Element::new(0, 0),
                Element::new(1, 0),
                Element::new(0, 1)
            ]
        );
    }

    #[test]
    fn no_noise_is_the_canonical_enumeration() {
        let mut e = Enumeration::pure(l1());
        assert_eq!(take(&mut e, 5), l1().enumerate(5));
    }

    #[test]
    fn noise_inside_target_rejected() {
        assert_eq!(
            Enumeration::new(l1(), vec![Element::new(0, 0)], Schedule::Prefix).unwrap_err(),
            Error::NoiseInsideTarget
        );
        assert_eq!(
            Enumeration::new(
                l1(),
                vec![Element::new(2, 0), Element::new(2, 0)],
                Schedule::Prefix
            )
            .unwrap_err(),
            Error::DuplicateNoise
        );
    }

    #[test]
    fn interleave_places_noise_exactly() {
        let noise = vec![Element::new(2, 0), Element::new(3, 0)];
        let mut e =
            Enumeration::new(l1(), noise, Schedule::Interleave(vec![3, 1])).unwrap();
        let got = take(&mut e, 5);
        // Position 1 gets the second noise string, position 3 the first.
        assert_eq!(got[1], Element::new(3, 0));
        assert_eq!(got[3], Element::new(2, 0));
        assert_eq!(got[0], Element::new(0, 0));
    }

    #[test]
    fn interleave_validates_positions() {
        let noise = vec![Element::new(2, 0), Element::new(3, 0)];
        assert!(matches!(
            Enumeration::new(l1(), noise.clone(), Schedule::Interleave(vec![1])),
            Err(Error::BadSchedule(_))
        ));
        assert!(matches!(
            Enumeration::new(l1(), noise, Schedule::Interleave(vec![2, 2])),
            Err(Error::BadSchedule(_))
        ));
    }

    #[test]
    fn random_schedule_is_reproducible_and_valid() {
        let noise = vec![Element::new(2, 0), Element::new(3, 1)];
        let a: Vec<Element> = Enumeration::new(l1(), noise.clone(), Schedule::Random(7))
            .unwrap()
            .take(50)
            .collect();
        let b: Vec<Element> = Enumeration::new(l1(), noise.clone(), Schedule::Random(7))
            .unwrap()
            .take(50)
            .collect();
        assert_eq!(a, b);

        // Repetition-free window, exactly the declared non-members.
        let mut seen = std::collections::BTreeSet::new();
        let mut outside = Vec::new();
        for e in &a {
            assert!(seen.insert(*e), "repeat {e}");
            if !l1().contains(*e) {
                outside.push(*e);
            }
        }
        outside.sort();
        let mut declared = noise.clone();
        declared.sort();
        assert_eq!(outside, declared);
    }

    #[test]
    fn coverage_within_noise_slack() {
        let noise = vec![Element::new(2, 0), Element::new(3, 1)];
        for schedule in [
            Schedule::Prefix,
            Schedule::Interleave(vec![0, 5]),
            Schedule::Random(3),
        ] {
            let got: Vec<Element> = Enumeration::new(l1(), noise.clone(), schedule)
                .unwrap()
                .take(40)
                .collect();
            let canonical = l1().enumerate(30);
            for (n, want) in canonical.iter().enumerate() {
                let within = &got[..=(n + noise.len()).min(got.len() - 1)];
                assert!(within.contains(want), "member {want} late");
            }
        }
    }

    #[test]
    fn schedule_labels_parse_back() {
        for (text, seed) in [("prefix", 0u64), ("interleave:1,4", 0), ("random", 9)] {
            let s = Schedule::parse(text, seed).unwrap();
            let relabeled = Schedule::parse(&s.label(), 0).unwrap();
            assert_eq!(relabeled, s);
        }
        assert!(Schedule::parse("nope", 0).is_err());
    }
}
