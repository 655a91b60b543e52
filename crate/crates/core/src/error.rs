use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoxError {
    WrongLength { expected: usize, got: usize },
    NegativeEntry(usize),
    NotNormalized,
    Signaling,
    ParameterOutOfRange,
    MissingParameter,
    LengthMismatch,
    NegativeWeight,
    WeightsDoNotSumToOne,
    BadLabel(String),
}

impl fmt::Display for BoxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoxError::WrongLength { expected, got } => {
                write!(f, "expected {expected} entries, got {got}")
            }
            BoxError::NegativeEntry(i) => write!(f, "entry {i} is negative"),
            BoxError::NotNormalized => f.write_str("box is not normalized"),
            BoxError::Signaling => f.write_str("box is signaling"),
            BoxError::ParameterOutOfRange => f.write_str("family parameter outside (0, 1]"),
            BoxError::MissingParameter => f.write_str("family requires a parameter"),
            BoxError::LengthMismatch => f.write_str("boxes and weights differ in length"),
            BoxError::NegativeWeight => f.write_str("mixture weight is negative"),
            BoxError::WeightsDoNotSumToOne => f.write_str("mixture weights do not sum to one"),
            BoxError::BadLabel(s) => write!(f, "malformed vertex label {s:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrengthError {
    NotInR,
    Invalid(BoxError),
    NonCanonical,
}

impl fmt::Display for StrengthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrengthError::NotInR => f.write_str("not in Svetlichny-box polytope"),
            StrengthError::Invalid(e) => write!(f, "invalid box: {e}"),
            StrengthError::NonCanonical => {
                f.write_str("no decomposition with a balanced residual exists for this box")
            }
        }
    }
}

impl From<BoxError> for StrengthError {
    fn from(e: BoxError) -> Self {
        StrengthError::Invalid(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionError {
    ParameterOutOfRange,
    UnsupportedFamily,
}

impl fmt::Display for DecompositionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionError::ParameterOutOfRange => {
                f.write_str("parameter outside the decomposition's validity range")
            }
            DecompositionError::UnsupportedFamily => {
                f.write_str("no explicit decomposition for this family")
            }
        }
    }
}
