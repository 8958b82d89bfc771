//! The `men` command-line front end.
//!
//! [`run`] parses arguments and returns the exit code with the text that
//! would go to stdout and stderr, so it can be tested without a process.
//! Exit code 2 means a usage error, 1 a domain error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::classify::{classify, topology_census, DEFAULT_CENSUS_SAMPLES, DEFAULT_CENSUS_SEED};
use crate::format::{load_any, load_model, load_state, save_model, save_state, Loaded};
use crate::inference::{
    bench_chains, chain_marginal_ratio, conditional_probability, conditional_probability_brute,
    marginal_probability, marginal_ratio, measure_and_update, mle_brute_force, mle_chain,
    MleResult, QueryResult,
};
use crate::men::model::reconstruct_state;
use crate::men::perfect_map::PERFECT_MAP_MAX_QUBITS;
use crate::men::{
    build_graph, check_graphoid_axioms, export_dot, extract_men, verify_perfect_map, MenGraph,
};
use crate::separability::ZeroAmplitudeWarning;
use crate::{fidelity_up_to_phase, Assignment, MenError, MenModel, Result, ToleranceConfig};

#[derive(Parser, Debug)]
#[command(name = "men", about = "Markovian entanglement networks for pure qubit states")]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct TolArgs {
    /// Relative tolerance for 2x2 minors.
    #[arg(long = "tolerance", global = true, default_value_t = 1e-9)]
    rel_eps: f64,
    /// Absolute tolerance for 2x2 minors.
    #[arg(long = "abs-tolerance", global = true, default_value_t = 1e-12)]
    abs_eps: f64,
    /// Amplitude moduli at or below this count as zero.
    #[arg(long = "zero-threshold", global = true, default_value_t = 1e-6)]
    zero_amp_threshold: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the network graph of a state.
    Graph {
        state: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Extract the network model of a state.
    Extract {
        state: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Rebuild a state from a model.
    Reconstruct {
        model: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Original state to compare against; prints the fidelity.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Marginal probability of a partial assignment.
    Marginal {
        file: PathBuf,
        #[arg(long)]
        assign: Assignment,
        /// Print p(x_M) / p(x0) instead of p(x_M).
        #[arg(long)]
        ratio: bool,
    },
    /// Conditional probability of a query given evidence.
    Conditional {
        file: PathBuf,
        #[arg(long)]
        query: Assignment,
        #[arg(long, default_value = "")]
        evidence: Assignment,
    },
    /// Most likely full assignment.
    Mle { file: PathBuf },
    /// Measure one qubit and rebuild the graph.
    Measure {
        state: PathBuf,
        #[arg(long)]
        qubit: usize,
        #[arg(long)]
        outcome: u8,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Classify a three-qubit state.
    Classify {
        state: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CENSUS_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_CENSUS_SEED)]
        seed: u64,
    },
    /// Perfect-map and graphoid-axiom report.
    Verify { state: PathBuf },
    /// Timing and operation counts on random chains.
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        /// Print `-` for wall-clock times.
        #[arg(long)]
        mask_timing: bool,
    },
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn usage(message: String) -> Self {
        CliOutput {
            code: 2,
            stdout: String::new(),
            stderr: message,
        }
    }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput::usage(text)
            } else {
                CliOutput {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let tol = match ToleranceConfig::new(cli.tol.rel_eps, cli.tol.abs_eps, cli.tol.zero_amp_threshold)
    {
        Ok(t) => t,
        Err(e) => return CliOutput::usage(format!("error: {e}\n")),
    };
    let mut out = Report::default();
    match dispatch(cli.command, &tol, &mut out) {
        Ok(()) => CliOutput {
            code: 0,
            stdout: out.stdout,
            stderr: out.stderr,
        },
        Err(e) => {
            let _ = writeln!(out.stderr, "error: {e}");
            CliOutput {
                code: 1,
                stdout: out.stdout,
                stderr: out.stderr,
            }
        }
    }
}

#[derive(Default)]
struct Report {
    stdout: String,
    stderr: String,
}

impl Report {
    fn line(&mut self, s: impl AsRef<str>) {
        self.stdout.push_str(s.as_ref());
        self.stdout.push('\n');
    }

    fn warn(&mut self, w: Option<ZeroAmplitudeWarning>, tol: &ToleranceConfig) {
        if let Some(w) = w {
            let _ = writeln!(
                self.stderr,
                "warning: {} amplitudes at or below {} (min modulus {}); verdicts are slice-wise",
                w.zero_count,
                fmt_real(tol.zero_amp_threshold),
                fmt_real(w.min_modulus)
            );
        }
    }
}

/// Twelve significant digits, trailing zeros removed; scientific notation
/// outside `[1e-4, 1e12)`.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..12).contains(&exp) {
        format!("{}e{exp}", trim(mantissa))
    } else {
        trim(&format!("{x:.*}", (11 - exp) as usize))
    }
}

fn fmt_prob(p: f64) -> String {
    fmt_real(p.clamp(0.0, 1.0))
}

fn edge_lines(g: &MenGraph, out: &mut Report) {
    out.line(format!("edges: {}", g.num_edges()));
    for (i, j) in g.edges() {
        out.line(format!("{i} -- {j}"));
    }
}

fn model_ratio(model: &MenModel, x: &Assignment) -> Result<QueryResult> {
    if model.graph().is_chain() {
        chain_marginal_ratio(model, x)
    } else {
        marginal_ratio(model, x)
    }
}

fn print_mle(r: &MleResult, n: usize, out: &mut Report) {
    out.line(format!("assignment: {}", r.assignment.to_bit_string(n)));
    out.line(format!("probability: {}", fmt_prob(r.probability)));
}

fn dispatch(cmd: Command, tol: &ToleranceConfig, out: &mut Report) -> Result<()> {
    match cmd {
        Command::Graph { state, dot } => {
            let psi = load_state(&state)?;
            let built = build_graph(&psi, tol);
            out.warn(built.zero_amplitude_warning, tol);
            if dot {
                out.stdout.push_str(&export_dot(&built.graph));
            } else {
                edge_lines(&built.graph, out);
            }
        }
        Command::Extract { state, output } => {
            let psi = load_state(&state)?;
            let model = extract_men(&psi, tol)?;
            save_model(&output, &model)?;
            out.line(format!("qubits: {}", model.num_qubits()));
            edge_lines(model.graph(), out);
            out.line(format!("reference_modulus: {}", fmt_real(model.reference_modulus())));
        }
        Command::Reconstruct {
            model,
            output,
            check,
        } => {
            let model = load_model(&model)?;
            let psi = reconstruct_state(&model)?;
            save_state(&output, &psi)?;
            out.line(format!("qubits: {}", psi.num_qubits()));
            if let Some(path) = check {
                let original = load_state(&path)?;
                if original.num_qubits() != psi.num_qubits() {
                    return Err(MenError::WrongArity {
                        expected: original.num_qubits(),
                        found: psi.num_qubits(),
                    });
                }
                out.line(format!("fidelity: {}", fmt_real(fidelity_up_to_phase(&original, &psi))));
            }
        }
        Command::Marginal {
            file,
            assign,
            ratio,
        } => match load_any(&file)? {
            Loaded::State(psi) => {
                let p = marginal_probability(&psi, &assign)?;
                if ratio {
                    let p0 = psi.probability(0);
                    if tol.is_zero_amplitude(psi.amplitude(0)) {
                        return Err(MenError::ZeroReferenceAmplitude {
                            modulus: p0.sqrt(),
                        });
                    }
                    out.line(fmt_real(p / p0));
                } else {
                    out.line(fmt_prob(p));
                }
            }
            Loaded::Model(model) => {
                let r = model_ratio(&model, &assign)?;
                if ratio {
                    out.line(fmt_real(r.value));
                } else {
                    out.line(fmt_prob((r.ln_value + 2.0 * model.ln_reference_modulus()).exp()));
                }
            }
        },
        Command::Conditional {
            file,
            query,
            evidence,
        } => {
            let p = match load_any(&file)? {
                Loaded::State(psi) => conditional_probability_brute(&psi, &query, &evidence)?,
                Loaded::Model(model) => conditional_probability(&model, &query, &evidence)?,
            };
            out.line(fmt_prob(p));
        }
        Command::Mle { file } => match load_any(&file)? {
            Loaded::State(psi) => print_mle(&mle_brute_force(&psi), psi.num_qubits(), out),
            Loaded::Model(model) => {
                let r = if model.graph().is_chain() {
                    mle_chain(&model)?
                } else {
                    mle_brute_force(&reconstruct_state(&model)?)
                };
                print_mle(&r, model.num_qubits(), out);
            }
        },
        Command::Measure {
            state,
            qubit,
            outcome,
            output,
        } => {
            let psi = load_state(&state)?;
            let prior = build_graph(&psi, tol);
            out.warn(prior.zero_amplitude_warning, tol);
            let up = measure_and_update(&psi, &prior.graph, qubit, outcome, tol)?;
            if let Some(path) = output {
                save_state(&path, &up.state)?;
            }
            out.line(format!("probability: {}", fmt_prob(up.probability)));
            edge_lines(&up.graph, out);
            for (i, j) in &up.unexpected_edges {
                let _ = writeln!(out.stderr, "warning: edge {i} -- {j} appeared after measurement");
            }
        }
        Command::Classify {
            state,
            samples,
            seed,
        } => {
            let psi = load_state(&state)?;
            let class = classify(&psi, samples, seed, tol)?;
            let census = topology_census(&psi, samples, seed, tol)?;
            out.line(format!("class: {class}"));
            out.line(census.to_string());
        }
        Command::Verify { state } => verify(&state, tol, out)?,
        Command::Bench {
            sizes,
            seed,
            repetitions,
            mask_timing,
        } => {
            let report = bench_chains(&sizes, seed, repetitions)?;
            out.stdout.push_str(&report.to_text(mask_timing));
        }
    }
    Ok(())
}

fn verify(path: &Path, tol: &ToleranceConfig, out: &mut Report) -> Result<()> {
    let psi = load_state(path)?;
    let n = psi.num_qubits();
    if n > PERFECT_MAP_MAX_QUBITS {
        return Err(MenError::EnumerationBoundExceeded {
            n,
            limit: PERFECT_MAP_MAX_QUBITS,
        });
    }
    let built = build_graph(&psi, tol);
    out.warn(built.zero_amplitude_warning, tol);
    edge_lines(&built.graph, out);
    let pm = verify_perfect_map(&psi, &built.graph, tol)?;
    out.line(format!(
        "perfect-map: {} ({} partitions, {} disagreements)",
        if pm.passes() { "pass" } else { "fail" },
        pm.partitions_checked,
        pm.disagreements.len()
    ));
    for d in &pm.disagreements {
        out.line(format!(
            "  A={} B={} C={} conditionally-separable={} separated={}",
            d.a, d.b, d.c, d.conditionally_separable, d.separated
        ));
    }
    let report = check_graphoid_axioms(&psi, tol, PERFECT_MAP_MAX_QUBITS);
    for (axiom, tally) in report.tallies.iter().flatten() {
        out.line(format!(
            "{axiom}: {} ({} instances, {} violations)",
            if tally.violations == 0 { "pass" } else { "fail" },
            tally.instances,
            tally.violations
        ));
        for ex in &tally.examples {
            out.line(format!("  {ex}"));
        }
    }
    Ok(())
}
