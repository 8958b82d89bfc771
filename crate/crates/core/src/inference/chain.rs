//! Linear-time queries on chain models.
//!
//! On the path `1 - 2 - ... - n` the telescoping factor of qubit `j` is
//! `f_j(x_j | x_{j-1}) = q(x_j | x_{j-1}, x0_{j+1})`, so
//! `p(x) / p(x0) = prod_j |f_j(x_j | x_{j-1})|^2` and sums over unbound qubits
//! factor into 2-entry messages. Messages are rescaled whenever they leave
//! `[1e-100, 1e100]`; the accumulated scale is carried in log form.

use num_complex::Complex64;

use crate::assignment::Assignment;
use crate::inference::{MleResult, QueryResult};
use crate::men::model::random_potential;
use crate::men::{MenGraph, MenModel};
use crate::random::rng_for;
use crate::{MenError, Result};

const RESCALE_HIGH: f64 = 1e100;
const RESCALE_LOW: f64 = 1e-100;

fn require_chain(model: &MenModel) -> Result<()> {
    if model.graph().is_chain() {
        Ok(())
    } else {
        Err(MenError::NotAChain)
    }
}

/// `f_j(x_j | x_{j-1})`; `x_prev` is ignored for `j = 1`.
fn chain_factor(model: &MenModel, j: usize, x_prev: u8, x_j: u8) -> Complex64 {
    let table = model.potential(j);
    let reference = model.reference_bits();
    let mut nb = [0u8; 2];
    for (p, &k) in table.neighbors().iter().enumerate() {
        nb[p] = if k < j { x_prev } else { reference[k - 1] };
    }
    table.value(x_j, &nb[..table.neighbors().len()])
}

fn rescale(values: &mut [f64; 2], ln_scale: &mut f64) {
    let m = values[0].max(values[1]);
    if m > RESCALE_HIGH || (m > 0.0 && m < RESCALE_LOW) {
        values[0] /= m;
        values[1] /= m;
        *ln_scale += m.ln();
    }
}

fn bound_values(x: &Assignment, q: usize) -> &'static [u8] {
    match x.get(q) {
        Some(0) => &[0],
        Some(_) => &[1],
        None => &[0, 1],
    }
}

/// `p(x_M) / p(x0)` for any `M`, eliminating qubits left to right.
pub fn chain_marginal_ratio(model: &MenModel, x_m: &Assignment) -> Result<QueryResult> {
    require_chain(model)?;
    let n = model.num_qubits();
    x_m.check_range(n).map_err(|e| MenError::InvalidQuery(e.to_string()))?;
    let mut ops = 0u64;
    let mut ln_scale = 0.0;
    let mut msg = [0.0f64; 2];
    for &x1 in bound_values(x_m, 1) {
        msg[usize::from(x1)] = chain_factor(model, 1, 0, x1).norm_sqr();
        ops += 1;
    }
    for j in 2..=n {
        let mut next = [0.0f64; 2];
        for &xj in bound_values(x_m, j) {
            let mut acc = 0.0;
            for &xp in bound_values(x_m, j - 1) {
                acc += msg[usize::from(xp)] * chain_factor(model, j, xp, xj).norm_sqr();
                ops += 2;
            }
            ops += bound_values(x_m, j - 1).len() as u64 - 1;
            next[usize::from(xj)] = acc;
        }
        msg = next;
        rescale(&mut msg, &mut ln_scale);
    }
    let total = msg[0] + msg[1];
    ops += (bound_values(x_m, n).len() - 1) as u64;
    Ok(QueryResult::from_scaled(total, ln_scale, ops.max(1)))
}

/// `p(x_1..x_m) / p(x0)` for a prefix assignment: the product of the first
/// `m` factors times a right-to-left suffix sweep.
///
/// `op_count = 2m + 10(n - m) - 4` for `1 <= m < n` and `2n - 1` for `m = n`.
pub fn chain_prefix_marginal_ratio(model: &MenModel, x_m: &Assignment) -> Result<QueryResult> {
    require_chain(model)?;
    let n = model.num_qubits();
    x_m.check_range(n).map_err(|e| MenError::InvalidQuery(e.to_string()))?;
    let m = x_m.len();
    if x_m.domain().as_slice() != (1..=m).collect::<Vec<_>>().as_slice() {
        return Err(MenError::NotAPrefix);
    }
    let bits: Vec<u8> = (1..=m).map(|q| x_m.get(q).expect("prefix bound")).collect();
    let mut ops = 0u64;
    let mut ln_scale = 0.0;

    let mut prefix = 1.0f64;
    for j in 1..=m {
        let prev = if j > 1 { bits[j - 2] } else { 0 };
        let w = chain_factor(model, j, prev, bits[j - 1]).norm_sqr();
        if j == 1 {
            prefix = w;
            ops += 1;
        } else {
            prefix *= w;
            ops += 2;
        }
        if prefix > RESCALE_HIGH || (prefix > 0.0 && prefix < RESCALE_LOW) {
            ln_scale += prefix.ln();
            prefix = 1.0;
        }
    }
    if m == n {
        return Ok(QueryResult::from_scaled(prefix, ln_scale, ops));
    }

    // s[x_{j-1}] = sum_{x_j} |f_j(x_j | x_{j-1})|^2 s_{j+1}[x_j]
    let mut suffix = [1.0f64; 2];
    for j in (m + 1..=n).rev() {
        let mut next = [0.0f64; 2];
        for xp in 0..2u8 {
            let mut acc = 0.0;
            for xj in 0..2u8 {
                let w = chain_factor(model, j, xp, xj).norm_sqr();
                ops += 1;
                if j == n {
                    acc += w;
                } else {
                    acc += w * suffix[usize::from(xj)];
                    ops += 1;
                }
            }
            ops += 1;
            next[usize::from(xp)] = acc;
        }
        suffix = next;
        rescale(&mut suffix, &mut ln_scale);
    }
    let tail = if m == 0 {
        // qubit 1 has no left neighbor; both entries coincide
        suffix[0]
    } else {
        ops += 1;
        suffix[usize::from(bits[m - 1])]
    };
    Ok(QueryResult::from_scaled(prefix * tail, ln_scale, ops))
}

/// `argmax_x p(x)` by max-product in the log domain: a backward pass storing
/// the best continuation for each value of the left neighbor, then a forward
/// decode. Ties resolve to the lexicographically smallest assignment.
///
/// Each log-domain sum counts as one multiplication and each comparison as
/// one addition.
pub fn mle_chain(model: &MenModel) -> Result<MleResult> {
    require_chain(model)?;
    let n = model.num_qubits();
    let mut ops = 0u64;
    // choice[j - 1][x_{j-1}] is the best x_j
    let mut choice = vec![[0u8; 2]; n];
    let mut best_next = [0.0f64; 2];
    for j in (1..=n).rev() {
        let mut best = [f64::NEG_INFINITY; 2];
        let contexts: &[u8] = if j == 1 { &[0] } else { &[0, 1] };
        for &xp in contexts {
            for xj in 0..2u8 {
                let score = chain_factor(model, j, xp, xj).norm_sqr().ln()
                    + best_next[usize::from(xj)];
                ops += 3;
                if score > best[usize::from(xp)] {
                    best[usize::from(xp)] = score;
                    choice[j - 1][usize::from(xp)] = xj;
                }
            }
        }
        best_next = best;
    }
    let mut bits = Vec::with_capacity(n);
    let mut prev = 0u8;
    for j in 1..=n {
        let x = choice[j - 1][usize::from(prev)];
        bits.push(x);
        prev = x;
    }
    let ln_p = 2.0 * model.ln_reference_modulus() + best_next[0];
    Ok(MleResult {
        assignment: Assignment::from_bits(&bits),
        probability: ln_p.exp().clamp(0.0, 1.0),
        op_count: ops,
    })
}

/// Random chain model on `n` qubits; every `q` modulus lies in `[0.2, 5]`
/// up to products of two draws, and all exceed `threshold`.
///
/// Qubit `j` draws `f_j(1 | 0)` and `f_j(1 | 1)` independently; the coupling
/// is their ratio.
pub fn random_chain_model(n: usize, seed: u64, threshold: f64) -> Result<MenModel> {
    let mut rng = rng_for(seed, 0x00c4_a1b5);
    let mut fields = Vec::with_capacity(n);
    let mut couplings = std::collections::BTreeMap::new();
    for j in 1..=n {
        let g = random_potential(&mut rng);
        fields.push(g);
        if j > 1 {
            let f11 = random_potential(&mut rng);
            couplings.insert((j - 1, j), f11 / g);
        }
    }
    let model = MenModel::from_pairwise(MenGraph::chain(n), &fields, &couplings)?;
    let min = model
        .potentials()
        .iter()
        .flat_map(|t| t.values().iter().map(|v| v.norm()))
        .fold(f64::INFINITY, f64::min);
    if min <= threshold {
        return Err(MenError::InvalidModel(format!(
            "q-value modulus {min} is below the threshold {threshold}"
        )));
    }
    Ok(model)
}
