use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A step function or sampled profile failed validation.
    InvalidFunction(String),
    /// Exponent outside the admissible range for the operation.
    InvalidExponent { p: f64, requirement: &'static str },
    InvalidArgument(String),
    /// At p = 2 the objective F_2 = 2t is a multiple of the first constraint map.
    LinearDependence { p: f64 },
    /// A precondition on the inputs' moments does not hold.
    MomentPrecondition { first: f64, second: f64 },
    Shooting(String),
    Design(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidFunction(msg) => write!(f, "invalid function: {msg}"),
            Error::InvalidExponent { p, requirement } => write!(f, "exponent p = {p} not allowed: {requirement}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::LinearDependence { p } => write!(
                f,
                "p = {p}: F_2(t) = 2t is linearly dependent on the constraint maps t and |t|^(p-2)t, \
                 so no sequence can separate them (the Hilbert-space identity makes the defect vanish); choose p in (1,2) or (2,3)"
            ),
            Error::MomentPrecondition { first, second } => write!(
                f,
                "moment preconditions violated: measured moments {first:e} and {second:e} must vanish"
            ),
            Error::Shooting(msg) => write!(f, "shooting failed: {msg}"),
            Error::Design(msg) => write!(f, "density design failed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn require_p_above_one(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent { p, requirement: "p must be a finite number greater than 1" })
    }
}
