use thiserror::Error;

pub type Result<T> = std::result::Result<T, MenError>;

/// Every failure the library can report.
///
/// Each variant has a stable one-line message; the CLI prints it verbatim and
/// the FFI layer maps each variant to a fixed error code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MenError {
    #[error("missing binding: qubit {qubit} is not assigned")]
    MissingBinding { qubit: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid unitary for qubit {qubit}: deviation {deviation:e} from identity")]
    InvalidUnitary { qubit: usize, deviation: f64 },
    #[error("zero probability outcome: qubit {qubit} = {outcome} has probability {probability:e}")]
    ZeroProbabilityOutcome {
        qubit: usize,
        outcome: u8,
        probability: f64,
    },
    #[error("not separable: the amplitude matrix has rank greater than one")]
    NotSeparable,
    #[error("degenerate state: every amplitude is below the zero threshold")]
    DegenerateState,
    #[error("zero reference amplitude: denominator modulus {modulus:e} is below the zero threshold")]
    ZeroReferenceAmplitude { modulus: f64 },
    #[error("zero amplitude: minimum modulus {min_modulus:e} is below the zero threshold")]
    ZeroAmplitude { min_modulus: f64 },
    #[error("inconsistent graph: q-function of qubit {node} depends on non-neighbor coordinates (deviation {deviation:e})")]
    InconsistentGraph { node: usize, deviation: f64 },
    #[error("enumeration bound exceeded: n = {n} exceeds the limit {limit}")]
    EnumerationBoundExceeded { n: usize, limit: usize },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("zero evidence probability")]
    ZeroEvidenceProbability,
    #[error("model graph is not the chain 1-2-...-n")]
    NotAChain,
    #[error("query is not a prefix assignment of qubits 1..m")]
    NotAPrefix,
    #[error("wrong arity: expected {expected} qubits, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("all sampled bases were rejected for near-zero amplitudes")]
    AllBasesRejected,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MenError {
    fn from(e: std::io::Error) -> Self {
        MenError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for MenError {
    fn from(e: serde_json::Error) -> Self {
        MenError::Format(e.to_string())
    }
}
