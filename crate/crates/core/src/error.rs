use thiserror::Error;

/// Failure modes shared by every solver stage.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the admissible set of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The pressure law has vanishing sound speed at the requested density.
    #[error("degenerate pressure law: {0}")]
    DegenerateLaw(String),

    /// Sampled curve is not parametrized by arc length.
    #[error("curve is not unit-speed: {0}")]
    Reparametrization(String),

    /// Invalid geometry or coefficient configuration.
    #[error("invalid geometry: {0}")]
    Geometry(String),

    /// Wave curves do not intersect inside the admissible density range.
    #[error("riemann solver out of range: {0}")]
    SolverRange(String),

    /// No subsonic trace satisfies a junction or stationary jump condition.
    #[error("no subsonic solution: {0}")]
    NoSubsonicSolution(String),

    /// The data are too far from a subsonic stationary solution.
    #[error("outside solver domain: {0}")]
    OutsideDomain(String),

    /// A stationary integration approached the sonic line.
    #[error("sonic approach at x = {x}: margin {margin:e}")]
    SonicApproach { x: f64, margin: f64 },

    /// A kink is not representable on the dyadic grid of the requested level.
    #[error("kink at x = {position} is not a multiple of 2^-{level}")]
    Refinement { position: f64, level: u32 },

    /// Front count, event count or total variation guard was exceeded.
    #[error("instability guard: {0}")]
    Instability(String),

    /// Explicit finite-volume run violated positivity or the CFL bound.
    #[error("finite-volume stability: {0}")]
    Stability(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Prefixes the message with a location, keeping the variant.
    pub fn at(self, location: &str) -> Self {
        match self {
            Error::Domain(m) => Error::Domain(format!("{location}: {m}")),
            Error::DegenerateLaw(m) => Error::DegenerateLaw(format!("{location}: {m}")),
            Error::Reparametrization(m) => Error::Reparametrization(format!("{location}: {m}")),
            Error::Geometry(m) => Error::Geometry(format!("{location}: {m}")),
            Error::SolverRange(m) => Error::SolverRange(format!("{location}: {m}")),
            Error::NoSubsonicSolution(m) => Error::NoSubsonicSolution(format!("{location}: {m}")),
            Error::OutsideDomain(m) => Error::OutsideDomain(format!("{location}: {m}")),
            Error::Instability(m) => Error::Instability(format!("{location}: {m}")),
            Error::Stability(m) => Error::Stability(format!("{location}: {m}")),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
