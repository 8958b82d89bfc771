//! Timing and operation-count harness for the chain algorithms.

use std::fmt::Write as _;
use std::time::Instant;

use crate::assignment::Assignment;
use crate::inference::brute::{marginal_ratio, mle_brute_force};
use crate::inference::chain::{
    chain_marginal_ratio, chain_prefix_marginal_ratio, mle_chain, random_chain_model,
};
use crate::men::model::reconstruct_state;
use crate::Result;

/// Brute-force rows are produced up to this size.
pub const BRUTE_FORCE_MAX_QUBITS: usize = 14;
/// Chain rows are cross-checked against enumeration up to this size.
pub const ORACLE_MAX_QUBITS: usize = 12;
const ORACLE_REL_TOL: f64 = 1e-10;
const ZERO_AMP_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub size: usize,
    pub task: &'static str,
    pub wall_ns_median: u128,
    pub op_count: u64,
    pub oracle_agreement: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub seed: u64,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, size: usize, task: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.size == size && r.task == task)
    }

    /// Comma-separated table. With `mask_timing` the wall-clock column is
    /// written as `-`, making the output byte-identical across runs.
    pub fn to_text(&self, mask_timing: bool) -> String {
        let mut out = String::from("size,task,wall_ns_median,op_count,oracle_agreement\n");
        for r in &self.rows {
            let wall = if mask_timing {
                "-".to_string()
            } else {
                r.wall_ns_median.to_string()
            };
            let agree = match r.oracle_agreement {
                Some(true) => "yes",
                Some(false) => "no",
                None => "",
            };
            let _ = writeln!(out, "{},{},{},{},{}", r.size, r.task, wall, r.op_count, agree);
        }
        for r in self.rows.iter().filter(|r| r.task == "chain_prefix_marginal") {
            let (n, m) = (r.size, prefix_len(r.size));
            let _ = writeln!(
                out,
                "# chain_prefix_marginal n={n} m={m}: op_count={} reference 6(n-m)+2m-1={}",
                r.op_count,
                6 * (n - m) + 2 * m - 1
            );
        }
        out
    }
}

fn prefix_len(n: usize) -> usize {
    (n / 2).max(1).min(n)
}

/// Alternating bits on `1..=m`.
fn prefix_query(m: usize) -> Assignment {
    Assignment::from_pairs((1..=m).map(|q| (q, (q % 2) as u8))).expect("distinct qubits")
}

fn median_ns<T, F: FnMut() -> T>(repetitions: usize, mut f: F) -> (u128, T) {
    let mut times = Vec::with_capacity(repetitions.max(1));
    let mut last = None;
    for _ in 0..repetitions.max(1) {
        let t = Instant::now();
        let v = f();
        times.push(t.elapsed().as_nanos());
        last = Some(v);
    }
    times.sort_unstable();
    (times[times.len() / 2], last.expect("at least one run"))
}

fn agree(a: f64, b: f64) -> bool {
    (a - b).abs() <= ORACLE_REL_TOL * a.abs().max(b.abs())
}

/// Runs each task `repetitions` times per size on `random_chain_model(n, seed)`
/// and reports the median wall-clock time and the operation count.
pub fn bench_chains(sizes: &[usize], seed: u64, repetitions: usize) -> Result<BenchReport> {
    let mut rows = Vec::new();
    for &n in sizes {
        let model = random_chain_model(n, seed, ZERO_AMP_THRESHOLD)?;
        let query = prefix_query(prefix_len(n));
        let oracle = if n <= ORACLE_MAX_QUBITS {
            Some((marginal_ratio(&model, &query)?, reconstruct_state(&model)?))
        } else {
            None
        };

        let (wall, r) = median_ns(repetitions, || chain_marginal_ratio(&model, &query));
        let r = r?;
        rows.push(BenchRow {
            size: n,
            task: "chain_marginal",
            wall_ns_median: wall,
            op_count: r.op_count,
            oracle_agreement: oracle.as_ref().map(|(o, _)| agree(r.value, o.value)),
        });

        let (wall, r) = median_ns(repetitions, || chain_prefix_marginal_ratio(&model, &query));
        let r = r?;
        rows.push(BenchRow {
            size: n,
            task: "chain_prefix_marginal",
            wall_ns_median: wall,
            op_count: r.op_count,
            oracle_agreement: oracle.as_ref().map(|(o, _)| agree(r.value, o.value)),
        });

        let (wall, r) = median_ns(repetitions, || mle_chain(&model));
        let r = r?;
        rows.push(BenchRow {
            size: n,
            task: "mle_chain",
            wall_ns_median: wall,
            op_count: r.op_count,
            oracle_agreement: oracle.as_ref().map(|(_, psi)| {
                let b = mle_brute_force(psi);
                b.assignment == r.assignment && (b.probability - r.probability).abs() <= 1e-12
            }),
        });

        if n <= BRUTE_FORCE_MAX_QUBITS {
            let (wall, r) = median_ns(repetitions, || marginal_ratio(&model, &query));
            rows.push(BenchRow {
                size: n,
                task: "brute_marginal",
                wall_ns_median: wall,
                op_count: r?.op_count,
                oracle_agreement: None,
            });
            let psi = reconstruct_state(&model)?;
            let (wall, r) = median_ns(repetitions, || mle_brute_force(&psi));
            rows.push(BenchRow {
                size: n,
                task: "brute_mle",
                wall_ns_median: wall,
                op_count: r.op_count,
                oracle_agreement: None,
            });
        }
    }
    Ok(BenchReport { seed, rows })
}
