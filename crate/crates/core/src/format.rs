//! JSON state and model files.
//!
//! State file: `{"n": 2, "amplitudes": [[re, im], ...]}` with `2^n` pairs in
//! MSB-first index order.
//!
//! Model file:
//! ```text
//! {"n": 3, "edges": [[1, 2], [2, 3]],
//!  "q": [{"node": 1, "neighbors": [2], "values": {"00": [1, 0], ...}}, ...],
//!  "reference": "000", "reference_modulus": 0.35}
//! ```
//! Table keys are bit-strings, node bit first, then neighbors ascending.
//!
//! Reals are written as `{:.16e}`, i.e. 17 significant digits.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::men::{MenGraph, MenModel, QFunctionTable};
use crate::state::PureState;
use crate::{MenError, Result};

/// States whose norm is off by less than this are renormalized on read.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-6;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    n: usize,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    node: usize,
    neighbors: Vec<usize>,
    values: BTreeMap<String, [f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    n: usize,
    edges: Vec<[usize; 2]>,
    q: Vec<TableFile>,
    reference: String,
    reference_modulus: f64,
}

struct Scientific;

impl Formatter for Scientific {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Scientific);
    value.serialize(&mut ser).expect("in-memory serialization");
    let mut text = String::from_utf8(buf).expect("serde_json emits UTF-8");
    text.push('\n');
    text
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn write_state(psi: &PureState) -> String {
    to_json(&StateFile {
        n: psi.num_qubits(),
        amplitudes: psi.amplitudes().iter().map(|&z| pair(z)).collect(),
    })
}

fn state_from_file(f: StateFile) -> Result<PureState> {
    let amps: Vec<Complex64> = f
        .amplitudes
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    if f.n == 0 || f.n > crate::state::MAX_DENSE_QUBITS || amps.len() != 1usize << f.n {
        return Err(MenError::Format(format!(
            "{} amplitudes do not match n = {}",
            amps.len(),
            f.n
        )));
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() < RENORMALIZE_TOLERANCE) {
        return Err(MenError::InvalidState(format!(
            "norm {norm} deviates from 1 by more than {RENORMALIZE_TOLERANCE:e}"
        )));
    }
    if (norm - 1.0).abs() <= 1e-9 {
        PureState::new(f.n, amps)
    } else {
        PureState::normalized(f.n, amps)
    }
}

pub fn read_state(text: &str) -> Result<PureState> {
    state_from_file(serde_json::from_str(text)?)
}

pub fn write_model(model: &MenModel) -> String {
    let n = model.num_qubits();
    to_json(&ModelFile {
        n,
        edges: model.graph().edges().into_iter().map(|(i, j)| [i, j]).collect(),
        q: model
            .potentials()
            .iter()
            .map(|t| TableFile {
                node: t.node(),
                neighbors: t.neighbors().to_vec(),
                values: t.entries().map(|(k, v)| (k, pair(v))).collect(),
            })
            .collect(),
        reference: model.reference().to_bit_string(n),
        reference_modulus: model.reference_modulus(),
    })
}

fn parse_bits(s: &str, width: usize, what: &str) -> Result<Vec<u8>> {
    if s.len() != width || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(MenError::Format(format!(
            "{what} `{s}` is not a {width}-bit string"
        )));
    }
    Ok(s.bytes().map(|b| b - b'0').collect())
}

fn model_from_file(f: ModelFile) -> Result<MenModel> {
    let n = f.n;
    let graph = MenGraph::with_edges(n, f.edges.iter().map(|e| (e[0], e[1])))?;
    let reference = parse_bits(&f.reference, n, "reference")?;
    if f.q.len() != n {
        return Err(MenError::Format(format!("{} q tables for n = {n}", f.q.len())));
    }
    let mut tables = Vec::with_capacity(n);
    for t in f.q {
        let width = t.neighbors.len() + 1;
        if t.values.len() != 1 << width {
            return Err(MenError::Format(format!(
                "q table of qubit {} has {} entries, expected {}",
                t.node,
                t.values.len(),
                1 << width
            )));
        }
        let mut values = vec![Complex64::new(0.0, 0.0); 1 << width];
        for (key, [re, im]) in &t.values {
            let bits = parse_bits(key, width, "q key")?;
            let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
            values[idx] = Complex64::new(*re, *im);
        }
        tables.push(QFunctionTable::new(t.node, t.neighbors, values)?);
    }
    tables.sort_by_key(QFunctionTable::node);
    MenModel::with_reference_modulus(graph, tables, reference, f.reference_modulus)
}

pub fn read_model(text: &str) -> Result<MenModel> {
    model_from_file(serde_json::from_str(text)?)
}

/// Contents of a file that may hold either a state or a model.
#[derive(Debug, Clone, PartialEq)]
pub enum Loaded {
    State(PureState),
    Model(MenModel),
}

/// Dispatches on the top-level keys: `amplitudes` means state, `q` model.
pub fn read_any(text: &str) -> Result<Loaded> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| MenError::Format("top level must be an object".into()))?;
    if obj.contains_key("amplitudes") {
        Ok(Loaded::State(state_from_file(serde_json::from_value(value)?)?))
    } else if obj.contains_key("q") {
        Ok(Loaded::Model(model_from_file(serde_json::from_value(value)?)?))
    } else {
        Err(MenError::Format(
            "file is neither a state (amplitudes) nor a model (q)".into(),
        ))
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| MenError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| MenError::Io(format!("{}: {e}", path.display())))
}

pub fn load_state(path: &Path) -> Result<PureState> {
    read_state(&read_file(path)?)
}

pub fn load_model(path: &Path) -> Result<MenModel> {
    read_model(&read_file(path)?)
}

pub fn load_any(path: &Path) -> Result<Loaded> {
    read_any(&read_file(path)?)
}

pub fn save_state(path: &Path, psi: &PureState) -> Result<()> {
    write_file(path, &write_state(psi))
}

pub fn save_model(path: &Path, model: &MenModel) -> Result<()> {
    write_file(path, &write_model(model))
}
