use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("constant term {re}{im:+}i is not 1")]
    NonUnitConstantTerm { re: f64, im: f64 },
    #[error("function is not normalized: need a0 = 0 and a1 = 1")]
    NotNormalized,
    #[error("invalid Herglotz atoms: {0}")]
    InvalidAtoms(String),
    #[error("function is not certified starlike")]
    NotCertified,
    #[error("insufficient truncation order: need {needed}, have {available}")]
    InsufficientOrder { needed: usize, available: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("argument outside domain: {0}")]
    DomainError(String),
    #[error("bad parametrization: {0}")]
    BadParametrization(String),
    #[error("odd-parity Grunsky entry ({r},{s}) has modulus {modulus:e}")]
    ParityDefect { r: usize, s: usize, modulus: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_order(needed: usize, available: usize) -> Result<()> {
    if available < needed {
        Err(Error::InsufficientOrder { needed, available })
    } else {
        Ok(())
    }
}
