//! Amplitude-potential tables and the network model built from them.
//!
//! Node `i` carries `q(x_i | x_U(i))`, the amplitude ratio obtained by moving
//! qubit `i` away from the reference while its neighbors sit at `x_U(i)` and
//! every other qubit sits at the reference. Relative amplitudes telescope in
//! ascending node order:
//!
//! `a(x) / a(x0) = prod_i q(x_i | x_{U-(i)}, x0_{U+(i)})`
//!
//! where `U-(i)` and `U+(i)` are the neighbors below and above `i`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::assignment::{bits_of, index_of_bits, Assignment, QubitSet};
use crate::men::graph::{build_graph, MenGraph};
use crate::random::rng_for;
use crate::state::PureState;
use crate::{inference, MenError, Result, ToleranceConfig};

/// Enumerating all `2^n` assignments is refused above this size.
pub const MAX_ENUMERATION_QUBITS: usize = 26;

/// Contexts are audited exhaustively up to this many qubits, sampled above.
const EXHAUSTIVE_AUDIT_QUBITS: usize = 10;
const SAMPLED_AUDIT_CONTEXTS: usize = 64;

/// `q(x_i | x_U(i))` for one node, keyed by the bits of the node followed by
/// its neighbors in ascending order (node bit most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct QFunctionTable {
    node: usize,
    neighbors: Vec<usize>,
    values: Vec<Complex64>,
}

impl QFunctionTable {
    pub fn new(node: usize, neighbors: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        let expected = 1usize << (neighbors.len() + 1);
        if values.len() != expected {
            return Err(MenError::InvalidModel(format!(
                "table for qubit {node} has {} entries, expected {expected}",
                values.len()
            )));
        }
        if neighbors.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MenError::InvalidModel(format!(
                "neighbors of qubit {node} must be strictly ascending"
            )));
        }
        Ok(QFunctionTable {
            node,
            neighbors,
            values,
        })
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn neighbors(&self) -> &[usize] {
        &self.neighbors
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Entry for node bit `x_i` and neighbor bits in ascending neighbor order.
    pub fn value(&self, x_i: u8, neighbor_bits: &[u8]) -> Complex64 {
        let k = self.neighbors.len();
        let key = neighbor_bits
            .iter()
            .fold(usize::from(x_i & 1), |acc, &b| (acc << 1) | usize::from(b & 1));
        debug_assert_eq!(neighbor_bits.len(), k);
        self.values[key]
    }

    /// Entry selected by a full assignment (`bits[q - 1]` is qubit `q`).
    pub fn value_in(&self, bits: &[u8]) -> Complex64 {
        let key = self
            .neighbors
            .iter()
            .fold(usize::from(bits[self.node - 1] & 1), |acc, &j| {
                (acc << 1) | usize::from(bits[j - 1] & 1)
            });
        self.values[key]
    }

    /// Bit-string key of entry `index`, e.g. `"101"`.
    pub fn key_string(&self, index: usize) -> String {
        let width = self.neighbors.len() + 1;
        (0..width)
            .map(|p| if index >> (width - 1 - p) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (String, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| (self.key_string(k), *v))
    }
}

/// Graph, potentials and reference point; determines a state up to the
/// phase of the reference amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct MenModel {
    graph: MenGraph,
    potentials: Vec<QFunctionTable>,
    reference: Vec<u8>,
    ln_reference_modulus: f64,
}

impl MenModel {
    /// Validates the tables and derives `|a(x0)|` from the normalization
    /// condition `|a(x0)|^-2 = sum_x |prod_i q(...)|^2`.
    pub fn from_tables(
        graph: MenGraph,
        potentials: Vec<QFunctionTable>,
        reference: Vec<u8>,
    ) -> Result<Self> {
        let mut model = MenModel {
            graph,
            potentials,
            reference,
            ln_reference_modulus: 0.0,
        };
        model.validate_tables()?;
        model.ln_reference_modulus = -0.5 * model.ln_normalization_sum()?;
        Ok(model)
    }

    /// Like [`MenModel::from_tables`], additionally requiring the stated
    /// reference modulus to match the normalization formula (relative 1e-9).
    pub fn with_reference_modulus(
        graph: MenGraph,
        potentials: Vec<QFunctionTable>,
        reference: Vec<u8>,
        reference_modulus: f64,
    ) -> Result<Self> {
        let model = Self::from_tables(graph, potentials, reference)?;
        let expected = model.reference_modulus();
        let ok = if expected > 0.0 {
            ((reference_modulus / expected) - 1.0).abs() <= 1e-9
        } else {
            reference_modulus.abs() <= f64::MIN_POSITIVE
        };
        if !ok {
            return Err(MenError::InvalidModel(format!(
                "reference_modulus {reference_modulus} disagrees with the normalization formula {expected}"
            )));
        }
        Ok(model)
    }

    /// Model with reference all-zeros and pairwise log-linear potentials:
    /// `q_i(1 | x_U) = field_i * prod_{j in U, x_j = 1} coupling_ij`.
    pub fn from_pairwise(
        graph: MenGraph,
        fields: &[Complex64],
        couplings: &BTreeMap<(usize, usize), Complex64>,
    ) -> Result<Self> {
        let n = graph.num_nodes();
        if fields.len() != n {
            return Err(MenError::InvalidModel(format!(
                "{} fields for {n} qubits",
                fields.len()
            )));
        }
        let coupling = |i: usize, j: usize| -> Result<Complex64> {
            couplings
                .get(&(i.min(j), i.max(j)))
                .copied()
                .ok_or_else(|| MenError::InvalidModel(format!("missing coupling {{{i},{j}}}")))
        };
        let mut potentials = Vec::with_capacity(n);
        for i in 1..=n {
            let nb = graph.neighbors(i);
            let k = nb.len();
            let mut values = vec![Complex64::new(1.0, 0.0); 1 << (k + 1)];
            for ctx in 0..1usize << k {
                let mut v = fields[i - 1];
                for (p, &j) in nb.iter().enumerate() {
                    if ctx >> (k - 1 - p) & 1 == 1 {
                        v *= coupling(i, j)?;
                    }
                }
                values[(1 << k) | ctx] = v;
            }
            potentials.push(QFunctionTable::new(i, nb, values)?);
        }
        Self::from_tables(graph, potentials, vec![0; n])
    }

    pub fn num_qubits(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn graph(&self) -> &MenGraph {
        &self.graph
    }

    pub fn potentials(&self) -> &[QFunctionTable] {
        &self.potentials
    }

    pub fn potential(&self, i: usize) -> &QFunctionTable {
        &self.potentials[i - 1]
    }

    pub fn reference_bits(&self) -> &[u8] {
        &self.reference
    }

    pub fn reference(&self) -> Assignment {
        Assignment::from_bits(&self.reference)
    }

    /// `|a(x0)|`; underflows to zero for very long chains, see
    /// [`MenModel::ln_reference_modulus`].
    pub fn reference_modulus(&self) -> f64 {
        self.ln_reference_modulus.exp()
    }

    pub fn ln_reference_modulus(&self) -> f64 {
        self.ln_reference_modulus
    }

    /// Telescoping factor `q(x_i | x_{U-(i)}, x0_{U+(i)})` at full
    /// assignment `bits`.
    pub fn factor(&self, i: usize, bits: &[u8]) -> Complex64 {
        let table = &self.potentials[i - 1];
        let key = table.neighbors.iter().fold(usize::from(bits[i - 1]), |acc, &j| {
            let b = if j < i { bits[j - 1] } else { self.reference[j - 1] };
            (acc << 1) | usize::from(b)
        });
        table.values[key]
    }

    /// `a(x) / a(x0)`.
    pub fn relative_amplitude(&self, bits: &[u8]) -> Complex64 {
        (1..=self.num_qubits()).map(|i| self.factor(i, bits)).product()
    }

    /// Natural log of `sum_x |prod_i q|^2`.
    fn ln_normalization_sum(&self) -> Result<f64> {
        if self.graph.is_chain() {
            return Ok(inference::chain::chain_marginal_ratio(self, &Assignment::new())?.ln_value);
        }
        let n = self.num_qubits();
        if n > MAX_ENUMERATION_QUBITS {
            return Err(MenError::EnumerationBoundExceeded {
                n,
                limit: MAX_ENUMERATION_QUBITS,
            });
        }
        let total: f64 = (0..1usize << n)
            .map(|idx| self.relative_amplitude(&bits_of(idx, n)).norm_sqr())
            .sum();
        Ok(total.ln())
    }

    fn validate_tables(&self) -> Result<()> {
        let n = self.num_qubits();
        let tol = ToleranceConfig::default();
        if self.reference.len() != n || self.reference.iter().any(|&b| b > 1) {
            return Err(MenError::InvalidModel(format!(
                "reference must be {n} bits"
            )));
        }
        if self.potentials.len() != n {
            return Err(MenError::InvalidModel(format!(
                "{} potential tables for {n} qubits",
                self.potentials.len()
            )));
        }
        for (k, t) in self.potentials.iter().enumerate() {
            let i = k + 1;
            if t.node != i {
                return Err(MenError::InvalidModel(format!(
                    "table {i} is labelled as qubit {}",
                    t.node
                )));
            }
            if t.neighbors != self.graph.neighbors(i) {
                return Err(MenError::InvalidModel(format!(
                    "table neighbors of qubit {i} differ from the graph adjacency"
                )));
            }
            let width = t.neighbors.len();
            let ref_block = usize::from(self.reference[k]) << width;
            for (key, v) in t.values.iter().enumerate() {
                if !(v.re.is_finite() && v.im.is_finite()) || v.norm() <= tol.zero_amp_threshold {
                    return Err(MenError::InvalidModel(format!(
                        "q-value {} of qubit {i} is zero or not finite",
                        t.key_string(key)
                    )));
                }
                if key >> width << width == ref_block && *v != Complex64::new(1.0, 0.0) {
                    return Err(MenError::InvalidModel(format!(
                        "q-value {} of qubit {i} is at the reference and must be exactly 1",
                        t.key_string(key)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks that every stored table entry equals the full-context ratio of
    /// the amplitudes this model defines, i.e. that `q(x_i | x_{N-i})`
    /// depends only on the neighbors of `i`.
    pub fn audit(&self, tol: &ToleranceConfig) -> Result<()> {
        audit_well_defined(
            &self.potentials,
            &self.reference,
            |bits| self.relative_amplitude(bits),
            tol,
        )
    }
}

fn audit_well_defined<F>(
    tables: &[QFunctionTable],
    reference: &[u8],
    amplitude: F,
    tol: &ToleranceConfig,
) -> Result<()>
where
    F: Fn(&[u8]) -> Complex64,
{
    let n = reference.len();
    // ratios of near-degenerate minors amplify the minor tolerance
    let threshold = tol.rel_eps.sqrt();
    for table in tables {
        let i = table.node;
        let contexts: Vec<Vec<u8>> = if n <= EXHAUSTIVE_AUDIT_QUBITS {
            (0..1usize << n)
                .map(|idx| bits_of(idx, n))
                .filter(|bits| bits[i - 1] == reference[i - 1])
                .collect()
        } else {
            let mut rng = rng_for(0x5eed_a0d1, i as u64);
            (0..SAMPLED_AUDIT_CONTEXTS)
                .map(|_| {
                    let mut bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
                    bits[i - 1] = reference[i - 1];
                    bits
                })
                .collect()
        };
        for mut bits in contexts {
            let denominator = amplitude(&bits);
            bits[i - 1] ^= 1;
            let q_full = amplitude(&bits) / denominator;
            let q_table = table.value_in(&bits);
            let scale = q_full.norm().max(q_table.norm());
            let deviation = (q_full - q_table).norm() / scale;
            if !(deviation <= threshold) {
                return Err(MenError::InconsistentGraph { node: i, deviation });
            }
        }
    }
    Ok(())
}

/// `q(x_M | x_M') = a(x_M, x_M') / a(x0_M, x_M')`, exactly 1 at the reference.
pub fn q_value(
    psi: &PureState,
    m: &QubitSet,
    x_m: &Assignment,
    ctx: &Assignment,
    x0: &Assignment,
    tol: &ToleranceConfig,
) -> Result<Complex64> {
    let n = psi.num_qubits();
    m.check_range(n)?;
    if x_m.domain() != *m || ctx.domain() != m.complement(n) {
        return Err(MenError::InvalidQuery(format!(
            "x_M must bind exactly {m} and the context its complement"
        )));
    }
    let x0_m = x0.restricted(m);
    if x0_m.domain() != *m {
        return Err(MenError::InvalidQuery(
            "reference must bind every qubit of M".into(),
        ));
    }
    let denominator = psi.amplitude_at(&x0_m.merged(ctx)?)?;
    if tol.is_zero_amplitude(denominator) {
        return Err(MenError::ZeroReferenceAmplitude {
            modulus: denominator.norm(),
        });
    }
    if *x_m == x0_m {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(psi.amplitude_at(&x_m.merged(ctx)?)? / denominator)
}

/// Builds the network model of a state with no near-zero amplitudes.
///
/// The graph comes from [`build_graph`]; tables are read with non-neighbors
/// at the all-zeros reference and then audited for well-definedness
/// (exhaustively up to 10 qubits, on 64 sampled contexts above).
pub fn extract_men(psi: &PureState, tol: &ToleranceConfig) -> Result<MenModel> {
    let n = psi.num_qubits();
    if !psi.all_nonzero(tol) {
        return Err(MenError::ZeroAmplitude {
            min_modulus: psi.min_modulus(),
        });
    }
    let graph = build_graph(psi, tol).graph;
    let reference = vec![0u8; n];
    let amp = |bits: &[u8]| psi.amplitude(index_of_bits(bits));
    let mut potentials = Vec::with_capacity(n);
    for i in 1..=n {
        let nb = graph.neighbors(i);
        let k = nb.len();
        let mut values = vec![Complex64::new(1.0, 0.0); 1 << (k + 1)];
        for ctx in 0..1usize << k {
            let mut bits = reference.clone();
            for (p, &j) in nb.iter().enumerate() {
                bits[j - 1] = (ctx >> (k - 1 - p) & 1) as u8;
            }
            let denominator = amp(&bits);
            bits[i - 1] = 1;
            values[(1 << k) | ctx] = amp(&bits) / denominator;
        }
        potentials.push(QFunctionTable::new(i, nb, values)?);
    }
    audit_well_defined(&potentials, &reference, amp, tol)?;
    MenModel::from_tables(graph, potentials, reference)
}

/// Rebuilds the state with the reference amplitude real and positive.
pub fn reconstruct_state(model: &MenModel) -> Result<PureState> {
    let n = model.num_qubits();
    if n > MAX_ENUMERATION_QUBITS {
        return Err(MenError::EnumerationBoundExceeded {
            n,
            limit: MAX_ENUMERATION_QUBITS,
        });
    }
    let r = model.reference_modulus();
    let amps = (0..1usize << n)
        .map(|idx| model.relative_amplitude(&bits_of(idx, n)) * r)
        .collect();
    PureState::normalized(n, amps)
}

/// Random pairwise model on `graph`: fields and couplings with log-uniform
/// moduli in `[0.2, 5]` and uniform phases, reference all-zeros.
pub fn random_graph_model(graph: &MenGraph, seed: u64) -> Result<MenModel> {
    let mut rng = rng_for(seed, 0);
    let fields: Vec<Complex64> = (0..graph.num_nodes())
        .map(|_| random_potential(&mut rng))
        .collect();
    let couplings = graph
        .edges()
        .into_iter()
        .map(|e| (e, random_potential(&mut rng)))
        .collect();
    MenModel::from_pairwise(graph.clone(), &fields, &couplings)
}

/// Nonzero complex value with log-uniform modulus in `[0.2, 5]` and uniform
/// phase.
pub fn random_potential<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let (lo, hi) = (0.2f64.ln(), 5.0f64.ln());
    let modulus = rng.gen_range(lo..=hi).exp();
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(modulus, phase)
}
