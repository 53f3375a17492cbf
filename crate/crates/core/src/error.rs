use thiserror::Error;

/// Errors raised by the geometric pipeline and its front ends.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-invertible scalar")]
    NonInvertible,
    #[error("unbound indeterminate: {0}")]
    UnboundIndeterminate(String),
    #[error("reality violation: {0}")]
    RealityViolation(String),
    #[error("negative radicand")]
    NegativeRadicand,
    #[error("degree exceeds dimension ({0} > 4)")]
    DegreeOverflow(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("singular metric")]
    SingularMetric,
    #[error("structure constants are not antisymmetric at ({0},{1})")]
    NotAntisymmetric(usize, usize),
    #[error("structure not integrable")]
    NotIntegrable,
    #[error("not unitary")]
    NotUnitary,
    #[error("not in the same orbit: source (x, y) = ({0}, {1}), target (x, y) = ({2}, {3})")]
    NotSameOrbit(f64, f64, f64, f64),
    #[error("target outside {0}")]
    OutsideSubspace(&'static str),
    #[error("orbit invariants are not a complete invariant in para signature")]
    ParaOrbitInvariants,
    #[error("model mismatch: expected {0}")]
    ModelMismatch(&'static str),
    #[error("not representable in the exact backend: {0}")]
    NotRepresentable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
