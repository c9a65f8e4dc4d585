use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("degenerate q: {0}")]
    DegenerateQ(String),
    #[error("degenerate representation: {0}")]
    DegenerateRepresentation(String),
    #[error("singular Cartan matrix: diagonal entry {0} vanishes")]
    SingularCartan(usize),
    #[error("operation requires the {expected} basis")]
    WrongBasis { expected: &'static str },
    #[error("formula mismatch in {what}: residual {residual:e}")]
    FormulaMismatch { what: String, residual: f64 },
    #[error("scalar Casimir value vanishes at p = {0}")]
    ScalarCasimirZero(i32),
    #[error("unknown token `{0}`")]
    UnknownToken(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("site {site} out of range for L = {sites}")]
    SiteOutOfRange { site: usize, sites: usize },
    #[error("x = (λ−λ⁻¹)(qλ−q⁻¹λ⁻¹) vanishes")]
    DegenerateX,
    #[error("K-matrix parameter C = {0} sits on a pole")]
    PoleAtC(String),
    #[error("operation requires λ = q^(-1/2)")]
    NotTLMode,
    #[error("eigensolver did not converge")]
    ConvergenceFailure,
    #[error("no fermion sign convention reproduces the braid Hamiltonian")]
    ConventionUnresolvable,
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
