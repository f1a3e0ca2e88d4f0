use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("variable index {index} out of range for {n} variables")]
    VariableOutOfRange { index: usize, n: usize },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{n} variables exceeds the limit of {max}")]
    TooManyVariables { n: usize, max: usize },
    #[error("{r} generators exceeds the limit of {max}")]
    TooManyGenerators { r: usize, max: usize },
    #[error("d o d is nonzero starting at degree {0}")]
    NotAComplex(usize),
    #[error("chain map does not commute with the differentials at degree {0}")]
    NotAChainMap(usize),
    #[error("map sends a torsion generator (index {0}) to an element of larger order")]
    IllDefinedMap(usize),
    #[error("vector is not a cocycle")]
    NotACocycle,
    #[error("vector is not in the lattice")]
    NotInLattice,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("variable x{0} is not in the degree class")]
    VariableNotInClass(usize),
    #[error("the quotient ring is zero (unit ideal)")]
    UnitIdeal,
    #[error("coefficient mismatch: {0}")]
    CoefficientMismatch(String),
    #[error("truncation at {p}^{n} is unstable: {detail}")]
    TruncationUnstable { p: u64, n: u32, detail: String },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
