//! Command-line harness: closure and dimension queries, game runs with
//! trace files, the refutation pipeline, the property suites, and the pipe
//! adapter that lets a child process stand in for a built-in generator.
//!
//! Exit codes: 0 success, 1 property failure, 2 usage or parse error,
//! 3 inconclusive classification.

mod external;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use limgen_core::checks;
use limgen_core::collection::parse_element_list;
use limgen_core::game::{render_trace, resolve_target};
use limgen_core::generator::{query_fresh, Generator};
use limgen_core::{
    closure_dimension, consistent_set, noisy_closure, play, run_refutation, settle_time,
    Classification, ClosureResult, Collection, ConsistentFamily, DimensionVerdict, Element,
    Enumeration, Error, RefutationOutcome, SampleSet, Schedule, SetDescriptor, TraceHeader,
};

use external::ExternalGenerator;

#[derive(Parser)]
#[command(name = "limgen", version)]
#[command(about = "Noisy generation-in-the-limit: closures, dimensions, games, refutations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Noisy closure of a set of strings under a collection
    Closure {
        /// Collection file
        #[arg(long)]
        collection: PathBuf,
        /// Noise level
        #[arg(long)]
        noise: usize,
        /// Observed strings, e.g. "(0,2) (1,0)"
        #[arg(long, default_value = "")]
        set: String,
        /// Preview length for infinite closures
        #[arg(long, default_value_t = 10)]
        window: usize,
    },
    /// Noisy closure dimension with witness search
    Dim {
        #[arg(long)]
        collection: PathBuf,
        #[arg(long)]
        noise: usize,
        /// Size budget for the witness search
        #[arg(long, default_value_t = 12)]
        max_size: usize,
        /// Fresh representatives per block column; defaults to noise + 2
        #[arg(long)]
        pool_depth: Option<usize>,
    },
    /// Run the adversary-versus-generator game and write a trace
    Play {
        #[arg(long)]
        collection: PathBuf,
        /// Language name, or columns:<c>,<c> for the column family
        #[arg(long)]
        target: String,
        #[arg(long)]
        noise: usize,
        #[arg(long)]
        steps: usize,
        /// prefix | interleave:<p>,<p>,... | random
        #[arg(long, default_value = "prefix")]
        schedule: String,
        /// Noise strings, e.g. "(2,0) (3,1)"
        #[arg(long, default_value = "")]
        noise_strings: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trace output file
        #[arg(long)]
        trace: PathBuf,
        /// external:<command> to play a child process instead
        #[arg(long)]
        generator: Option<String>,
    },
    /// Probe a generator with the ladder adversary and verify the refutation
    Refute {
        /// Ladder length
        #[arg(long)]
        horizon: usize,
        /// Iterations for the scattered construction
        #[arg(long, default_value_t = 8)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// external:<command>; default is the built-in closure generator at
        /// noise level 1 on the column family
        #[arg(long)]
        generator: Option<String>,
    },
    /// Run a property suite with seeded random instances
    Check {
        /// all | closure | dimension | generators | refutation
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Speak the pipe protocol: read `history (c,k) ...` lines, answer with
    /// the built-in closure generator
    Serve {
        #[arg(long)]
        collection: PathBuf,
        #[arg(long)]
        noise: usize,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

enum CliError {
    Core(Error),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Core(e)
    }
}

fn load_collection(path: &PathBuf) -> Result<Collection, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(Collection::parse(&text)?)
}

fn elements_arg(text: &str) -> Result<Vec<Element>, CliError> {
    Ok(parse_element_list(text)?)
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    let strings: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    if strings.is_empty() {
        "(none)".to_string()
    } else {
        strings.join(" ")
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Closure {
            collection,
            noise,
            set,
            window,
        } => {
            let collection = load_collection(&collection)?;
            let sample: SampleSet = elements_arg(&set)?.into_iter().collect();
            print!("{}", render_closure(&collection, &sample, noise, window));
            Ok(ExitCode::SUCCESS)
        }
        Command::Dim {
            collection,
            noise,
            max_size,
            pool_depth,
        } => {
            let collection = load_collection(&collection)?;
            let depth = pool_depth.unwrap_or(noise + 2);
            let report = closure_dimension(&collection, noise, max_size, depth);
            let verdict = match report.verdict {
                DimensionVerdict::Exact(n) => format!("Exact {n}"),
                DimensionVerdict::AtLeast(n) => format!("AtLeast {n}"),
                DimensionVerdict::NoWitness => "NoWitness".to_string(),
            };
            println!("dimension: {verdict}");
            println!("witness: {}", join(&report.witness));
            println!("pool: {}", report.searched_pool.len());
            println!("max_size_searched: {}", report.max_size_searched);
            Ok(ExitCode::SUCCESS)
        }
        Command::Play {
            collection,
            target,
            noise,
            steps,
            schedule,
            noise_strings,
            seed,
            trace,
            generator,
        } => {
            let collection = load_collection(&collection)?;
            let target_language = resolve_target(&collection, &target)?;
            let noise_elements = elements_arg(&noise_strings)?;
            let parsed_schedule = Schedule::parse(&schedule, seed)?;
            let schedule_label = parsed_schedule.label();
            let mut enumeration =
                Enumeration::new(target_language, noise_elements.clone(), parsed_schedule)?;
            let promised = match closure_dimension(&collection, noise, 12, noise + 2).verdict {
                DimensionVerdict::Exact(n) => Some(n),
                DimensionVerdict::NoWitness => Some(0),
                DimensionVerdict::AtLeast(_) => None,
            };
            let header = TraceHeader {
                collection: collection.name().to_string(),
                target,
                noise,
                noise_strings: noise_elements,
                schedule: schedule_label,
                seed,
                promised_tstar: promised,
                noise_mismatch: false,
            };
            let mut generator = build_generator(&collection, noise, generator.as_deref())?;
            let game = play(
                &collection,
                generator.as_mut(),
                &mut enumeration,
                steps,
                header,
            )?;
            fs::write(&trace, render_trace(&game))
                .map_err(|e| CliError::Io(format!("{}: {e}", trace.display())))?;
            let promised_text = promised
                .map(|t| t.to_string())
                .unwrap_or_else(|| "none".to_string());
            println!(
                "play: steps={steps} settle={} promised_tstar={promised_text}",
                settle_time(&game)
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Refute {
            horizon,
            iterations,
            seed: _,
            generator,
        } => {
            let mut generator = build_generator(
                &Collection::column_family("columns"),
                1,
                generator.as_deref(),
            )?;
            match run_refutation(generator.as_mut(), horizon, iterations, None)? {
                RefutationOutcome::Refuted(run) => {
                    let case = match run.report.classification {
                        Classification::Inside { .. } => "inside",
                        Classification::Concentrated { .. } => "concentrated",
                        Classification::Scattered { .. } => "scattered",
                        Classification::Inconclusive => unreachable!(),
                    };
                    println!("refute: horizon={horizon} case={case}");
                    println!("language: {}", join(&run.language));
                    println!("refuted: {}", join(&run.verify.refuted));
                    println!("invalid_prefixes: {}", join(&run.verify.invalid_prefixes));
                    Ok(ExitCode::SUCCESS)
                }
                RefutationOutcome::Inconclusive(_) => {
                    println!("refute: horizon={horizon} case=inconclusive");
                    println!("increase the horizon for a classification");
                    Ok(ExitCode::from(3))
                }
            }
        }
        Command::Check {
            suite,
            trials,
            seed,
        } => {
            let report = checks::run_suite(&suite, trials, seed)?;
            print!("{}", report.render());
            if report.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Serve { collection, noise } => {
            let collection = load_collection(&collection)?;
            serve(&collection, noise)
        }
    }
}

fn build_generator(
    collection: &Collection,
    noise: usize,
    spec: Option<&str>,
) -> Result<Box<dyn Generator>, CliError> {
    match spec {
        None | Some("builtin") => Ok(Box::new(limgen_core::ClosureGenerator::new(
            collection.clone(),
            noise,
        ))),
        Some(text) => {
            let cmd = text.strip_prefix("external:").ok_or_else(|| {
                CliError::Io(format!(
                    "bad generator spec: {text} (use external:<command>)"
                ))
            })?;
            Ok(Box::new(ExternalGenerator::from_spec(cmd)?))
        }
    }
}

fn render_closure(
    collection: &Collection,
    sample: &SampleSet,
    noise: usize,
    window: usize,
) -> String {
    let mut out = String::new();
    match consistent_set(collection, sample, noise) {
        ConsistentFamily::Explicit(v) => {
            let _ = writeln!(out, "consistent: {}", join(v.iter().map(|nl| &nl.name)));
        }
        ConsistentFamily::Columns(cc) => {
            let hits: Vec<String> = cc.hits().iter().map(|(c, h)| format!("{c}:{h}")).collect();
            let _ = writeln!(
                out,
                "consistent: column unions missing at most {noise}; hits {}",
                if hits.is_empty() {
                    "(none)".to_string()
                } else {
                    hits.join(" ")
                }
            );
        }
    }
    match noisy_closure(collection, sample, noise) {
        ClosureResult::EmptyConsistent => {
            let _ = writeln!(out, "closure: empty-consistent");
        }
        ClosureResult::Value(SetDescriptor::Finite(set)) => {
            let _ = writeln!(out, "closure: finite:{}", set.len());
            let _ = writeln!(out, "elements: {}", join(&set));
        }
        ClosureResult::Value(d) => {
            let _ = writeln!(out, "closure: infinite");
            if let SetDescriptor::Symbolic {
                blocks,
                adds,
                removes,
            } = &d
            {
                let _ = writeln!(out, "blocks: {}", join(blocks));
                if !adds.is_empty() {
                    let _ = writeln!(out, "adds: {}", join(adds));
                }
                if !removes.is_empty() {
                    let _ = writeln!(out, "removes: {}", join(removes));
                }
            }
            let _ = writeln!(out, "preview: {}", join(d.enumerate(window)));
        }
    }
    out
}

fn serve(collection: &Collection, noise: usize) -> Result<ExitCode, CliError> {
    let stdin = io::stdin();
    let mut stdout = io::stdout();
    for line in stdin.lock().lines() {
        let line = line.map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let Some(history_text) = trimmed.strip_prefix("history") else {
            return Err(CliError::Io(format!("bad protocol line: {trimmed}")));
        };
        let history = parse_element_list(history_text)?;
        // Stateless per line: every query rebuilds the generator from the
        // full prefix, so restarts cannot change answers.
        let mut generator = limgen_core::ClosureGenerator::new(collection.clone(), noise);
        let output = query_fresh(&mut generator, &history)?;
        writeln!(stdout, "{output}").map_err(|e| CliError::Io(format!("stdout: {e}")))?;
        stdout
            .flush()
            .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
    }
    Ok(ExitCode::SUCCESS)
}
