use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not a valid discriminant for this operation")]
    InvalidDiscriminant(i64),
    #[error("the zero form has no sign")]
    ZeroForm,
    #[error("point lies on the net of geodesics (|Q_tau| = {0:e} for form {1})")]
    OnNet(f64, String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("{0} is not a fundamental discriminant dividing {1} with discriminant cofactor")]
    InvalidCharacter(i64, i64),
    #[error("witness search for the genus character exceeded its budget")]
    WitnessBudget,
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("series outside its convergence region: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
