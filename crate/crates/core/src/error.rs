use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("order |n| is undefined for n = 0")]
    ZeroOrder,
    #[error("resolution {resolution} is too small for Walsh index {index}")]
    ResolutionTooSmall { index: u128, resolution: u32 },
    #[error("resolution mismatch: {left} vs {right}")]
    ResolutionMismatch { left: u32, right: u32 },
    #[error("resolution {resolution} exceeds the cap {cap}")]
    ResolutionCap { resolution: u32, cap: u32 },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("region is not aligned to grid resolution {0}")]
    MisalignedRegion(u32),
    #[error("overlapping region pieces")]
    OverlappingRegion,
    #[error("invalid parameter {name}: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
