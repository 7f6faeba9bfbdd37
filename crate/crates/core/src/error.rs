use core::fmt;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    Domain(&'static str),
    /// Gamma function evaluated at a nonpositive integer.
    Pole(f64),
    /// Evaluation requested on a branch cut.
    Branch(&'static str),
    /// An iteration failed to converge within its sweep budget.
    NonConvergence { what: &'static str, sweeps: usize },
    /// The potential does not satisfy the integrability class required by the route.
    Integrability(&'static str),
    /// Neither construction route for the non-principal solution applies.
    Condition(&'static str),
    /// The tail budget of a truncated integral cannot be met.
    Truncation { radius: f64, tail: f64 },
    /// Evaluation at a singular point (k = 0).
    Singular(&'static str),
    /// A function that must stay positive changed sign.
    Positivity { x: f64 },
    /// Estimates disagree beyond the allowed spread.
    Inconclusive { spread: f64 },
    /// Eigenvalue brackets collided.
    WindowTooCoarse,
    /// Quadrature breakdown (tail or principal-value integral).
    Quadrature(&'static str),
    /// The requested m-function route is unavailable for this potential.
    RouteUnavailable(&'static str),
    /// Phase unwrapping failed between consecutive nodes.
    Unwrap { k: f64 },
    /// Two independent routes disagree beyond tolerance.
    RouteDisagreement { what: &'static str, a: f64, b: f64 },
    /// Malformed input data.
    InvalidInput(&'static str),
}

impl Error {
    /// True for errors that signal numerical breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::Domain(_) | Error::InvalidInput(_) | Error::Branch(_) | Error::Pole(_))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Pole(x) => write!(f, "gamma pole at {x}"),
            Error::Branch(msg) => write!(f, "branch error: {msg}"),
            Error::NonConvergence { what, sweeps } => {
                write!(f, "{what} did not converge in {sweeps} sweeps")
            }
            Error::Integrability(msg) => write!(f, "integrability error: {msg}"),
            Error::Condition(msg) => write!(f, "condition error: {msg}"),
            Error::Truncation { radius, tail } => {
                write!(f, "tail bound {tail:e} not met at truncation radius {radius}")
            }
            Error::Singular(msg) => write!(f, "singular point: {msg}"),
            Error::Positivity { x } => write!(f, "positivity lost at x = {x}"),
            Error::Inconclusive { spread } => write!(f, "inconclusive estimate (spread {spread:e})"),
            Error::WindowTooCoarse => write!(f, "eigenvalue window too coarse: brackets collided"),
            Error::Quadrature(msg) => write!(f, "quadrature error: {msg}"),
            Error::RouteUnavailable(msg) => write!(f, "route unavailable: {msg}"),
            Error::Unwrap { k } => write!(f, "phase unwrap failed near k = {k}"),
            Error::RouteDisagreement { what, a, b } => {
                write!(f, "routes disagree on {what}: {a} vs {b}")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
