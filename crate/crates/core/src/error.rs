use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("value {value} out of range [{min}, {max}] for {what}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("incomplete lattice assignment: {0}")]
    IncompleteAssignment(String),

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("register `{name}` has width {existing}, cannot merge width {requested}")]
    RegisterConflict {
        name: String,
        existing: usize,
        requested: usize,
    },

    #[error("qubit {register}[{index}] outside register of width {width}")]
    QubitOutOfRange {
        register: String,
        index: usize,
        width: usize,
    },

    #[error("gate {gate} touches wire {wire} more than once")]
    RepeatedOperand { gate: String, wire: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("circuit contains a measurement and cannot be inverted")]
    NotInvertible,

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("gate {0} is not a classical permutation with phase; use the statevector backend")]
    NonClassicalGate(String),

    #[error("{wires} wires exceed the statevector limit of {limit}")]
    TooManyWires { wires: usize, limit: usize },

    #[error("register tables differ between circuit and state")]
    RegisterMismatch,

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("requested measurement branch has zero probability")]
    ZeroProbability,

    #[error("path-sum simulation exceeded {0} branches")]
    TooManyBranches(usize),

    #[error("ancilla wire {0} was not returned to |0>")]
    DirtyAncilla(usize),
}
