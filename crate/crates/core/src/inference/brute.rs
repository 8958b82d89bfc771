//! Enumeration oracles. These sum or maximize over explicit assignments and
//! are the reference every structured algorithm is checked against.

use crate::assignment::{assignment_of, bits_of, Assignment, QubitSet};
use crate::inference::{chain, MleResult, QueryResult, MIN_EVIDENCE_PROBABILITY};
use crate::men::model::MAX_ENUMERATION_QUBITS;
use crate::men::MenModel;
use crate::state::PureState;
use crate::{MenError, Result};

/// `p(x_M) = sum over completions of |a|^2`.
pub fn marginal_probability(psi: &PureState, x_m: &Assignment) -> Result<f64> {
    let n = psi.num_qubits();
    x_m.check_range(n)?;
    let (mask, value) = x_m.index_pattern(n);
    let p: f64 = psi
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(k, _)| k & mask == value)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    Ok(p.clamp(0.0, 1.0))
}

/// `p(query | evidence)` straight from amplitudes.
pub fn conditional_probability_brute(
    psi: &PureState,
    query: &Assignment,
    evidence: &Assignment,
) -> Result<f64> {
    let joint = query.merged(evidence)?;
    let pe = marginal_probability(psi, evidence)?;
    if pe < MIN_EVIDENCE_PROBABILITY {
        return Err(MenError::ZeroEvidenceProbability);
    }
    Ok((marginal_probability(psi, &joint)? / pe).clamp(0.0, 1.0))
}

/// `p(x_M) / p(x0) = sum_{x_{N-M}} |prod_i q(x_i | x_{U-(i)}, x0_{U+(i)})|^2`,
/// by enumerating the unbound qubits. Works on any graph.
pub fn marginal_ratio(model: &MenModel, x_m: &Assignment) -> Result<QueryResult> {
    let n = model.num_qubits();
    x_m.check_range(n).map_err(|e| MenError::InvalidQuery(e.to_string()))?;
    let free: Vec<usize> = x_m.domain().complement(n).iter().collect();
    if free.len() > MAX_ENUMERATION_QUBITS {
        return Err(MenError::EnumerationBoundExceeded {
            n: free.len(),
            limit: MAX_ENUMERATION_QUBITS,
        });
    }
    let mut bits = vec![0u8; n];
    for (q, b) in x_m.iter() {
        bits[q - 1] = b;
    }
    let mut total = 0.0;
    let mut ops = 0u64;
    for code in 0..1usize << free.len() {
        for (p, &q) in free.iter().enumerate() {
            bits[q - 1] = ((code >> (free.len() - 1 - p)) & 1) as u8;
        }
        total += model.relative_amplitude(&bits).norm_sqr();
        // n - 1 products, one modulus-square, one accumulation
        ops += n as u64 + 1;
    }
    Ok(QueryResult::from_scaled(total, 0.0, ops))
}

/// Ratio through the chain path when the graph is a chain, else enumeration.
fn ratio_auto(model: &MenModel, x: &Assignment) -> Result<QueryResult> {
    if model.graph().is_chain() {
        chain::chain_marginal_ratio(model, x)
    } else {
        marginal_ratio(model, x)
    }
}

/// `p(query | evidence)` as a ratio of marginal ratios; the reference
/// probability cancels.
pub fn conditional_probability(
    model: &MenModel,
    query: &Assignment,
    evidence: &Assignment,
) -> Result<f64> {
    let n = model.num_qubits();
    query.check_range(n)?;
    evidence.check_range(n)?;
    if !query.domain().is_disjoint(&evidence.domain()) {
        return Err(MenError::InvalidQuery(
            "query and evidence bind the same qubit".into(),
        ));
    }
    let ev = ratio_auto(model, evidence)?;
    if ev.ln_value + 2.0 * model.ln_reference_modulus() < MIN_EVIDENCE_PROBABILITY.ln()
        || ev.value == 0.0
    {
        return Err(MenError::ZeroEvidenceProbability);
    }
    if query.is_empty() {
        return Ok(1.0);
    }
    let joint = ratio_auto(model, &query.merged(evidence)?)?;
    Ok((joint.ln_value - ev.ln_value).exp().clamp(0.0, 1.0))
}

/// Exhaustive `argmax_x |a(x)|^2`; ties go to the lexicographically smallest
/// assignment.
pub fn mle_brute_force(psi: &PureState) -> MleResult {
    let best = psi.argmax_modulus();
    MleResult {
        assignment: assignment_of(best, psi.num_qubits()),
        probability: psi.probability(best),
        op_count: 2 * psi.dim() as u64,
    }
}

/// Bits of the brute-force maximizer, for comparisons against chain output.
pub fn mle_bits(psi: &PureState) -> Vec<u8> {
    bits_of(psi.argmax_modulus(), psi.num_qubits())
}

/// Enumeration oracle for the conditional independence statement
/// `p(x_A | x_B, x_C) = p(x_A | x0_B, x_C)`; returns the largest deviation
/// over all `x_A, x_B, x_C` with nonzero conditioning probability.
pub fn conditional_independence_gap(
    psi: &PureState,
    a: &QubitSet,
    b: &QubitSet,
    c: &QubitSet,
    x0: &Assignment,
) -> Result<f64> {
    let n = psi.num_qubits();
    let x0_b = x0.restricted(b);
    let mut worst: f64 = 0.0;
    let configs = |s: &QubitSet| -> Vec<Assignment> {
        (0..1usize << s.len())
            .map(|code| {
                Assignment::from_pairs(s.iter().enumerate().map(|(p, q)| {
                    (q, ((code >> (s.len() - 1 - p)) & 1) as u8)
                }))
                .expect("distinct qubits")
            })
            .collect()
    };
    let _ = n;
    for xc in configs(c) {
        for xb in configs(b) {
            let given = xb.merged(&xc)?;
            let given0 = x0_b.merged(&xc)?;
            for xa in configs(a) {
                let p1 = conditional_probability_brute(psi, &xa, &given);
                let p0 = conditional_probability_brute(psi, &xa, &given0);
                match (p1, p0) {
                    (Ok(p1), Ok(p0)) => worst = worst.max((p1 - p0).abs()),
                    (Err(MenError::ZeroEvidenceProbability), _)
                    | (_, Err(MenError::ZeroEvidenceProbability)) => {}
                    (Err(e), _) | (_, Err(e)) => return Err(e),
                }
            }
        }
    }
    Ok(worst)
}
