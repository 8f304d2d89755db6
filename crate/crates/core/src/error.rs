use thiserror::Error;

use crate::clifford::Signature;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid signature ({p},{q}): {reason}")]
    InvalidSignature { p: usize, q: usize, reason: &'static str },

    #[error("signature mismatch: {left} vs {right}")]
    SignatureMismatch { left: Signature, right: Signature },

    #[error("element is not in the Clifford group: {0}")]
    NotInCliffordGroup(String),

    #[error("real structure is not admissible: c(b) is not a phase multiple of b")]
    NotAdmissible,

    #[error("vector is isotropic (Q(v) = {0:e})")]
    IsotropicVector(f64),

    #[error("expected a real grade-1 element")]
    NotAVector,

    #[error("expected real coefficients (imaginary residual {0:e})")]
    NotReal(f64),

    #[error("matrix is not hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("no Krein form intertwines the generators")]
    NoKreinForm,

    #[error("null space has dimension {found}, expected {expected}")]
    NullSpaceDimension { expected: usize, found: usize },

    #[error("operator is not a scalar multiple of the identity with sign ±1 ({0})")]
    NotASign(String),

    #[error("signature {sig} does not belong to the {case} case")]
    CaseMismatch { sig: Signature, case: String },

    #[error("invalid rotation element: {0}")]
    InvalidRotationElement(String),

    #[error("zero vector has no causal character")]
    NullVector,

    #[error("signature {0} is neither Lorentzian nor anti-Lorentzian")]
    WrongSignatureClass(Signature),

    #[error("vector has {found} components, signature needs {expected}")]
    VectorLength { expected: usize, found: usize },

    #[error("element has no odd part")]
    EvenInput,

    #[error("element is not self-adjoint (residual {0:e})")]
    NotSelfAdjoint(f64),

    #[error("dimension n = 2 is excluded for this operation")]
    ExcludedDimension,

    #[error("vector is not spacelike")]
    NotSpacelike,

    #[error("lattice needs at least 3 sites per direction, got {0}")]
    LatticeTooSmall(usize),

    #[error("lattice spacing must be positive, got {0}")]
    InvalidSpacing(f64),

    #[error("B^2 is not ±1 (residual {0:e})")]
    NotInvolutive(f64),

    #[error("element is not real and normalized: {0}")]
    NotNormalized(String),

    #[error("operators live on different lattices or signatures")]
    OperatorMismatch,

    #[error("real structure is not Euclidean")]
    NotEuclidean,

    #[error("idempotent is degenerate for this real structure (e e^x = 0)")]
    DegenerateIdempotent,

    #[error("not a primitive idempotent: {0}")]
    NotPrimitive(String),

    #[error("operator dimension {dim} exceeds cap {cap}")]
    DimensionOverCap { dim: usize, cap: usize },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("matrix is singular")]
    Singular,

    #[error("construction check failed: {0}")]
    ConstructionFailed(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
