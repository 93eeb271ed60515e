use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A probability vector is empty, has a negative or non-finite entry,
    /// or does not sum to one.
    InvalidPmf(&'static str),
    /// A cost vector is too short or has a negative or non-finite entry.
    InvalidCosts(&'static str),
    /// `p_i > 0` where `q_i = 0` in a divergence.
    SupportMismatch { index: usize },
    /// Two objects that must agree in size do not.
    DimensionMismatch { expected: usize, found: usize },
    /// The smallest channel cost is zero, so no finite total-cost optimum exists.
    ZeroMinCost,
    /// The requested symbol entropy cannot be reached by any shaped distribution.
    InfeasibleRate { entropy: f64, lower: f64, upper: f64 },
    /// An average-cost budget below the cheapest achievable average cost.
    InfeasibleBudget { budget: f64, minimum: f64 },
    /// A probability that must be strictly positive is zero.
    ZeroProbability { index: usize },
    /// A code book entry set is not prefix-free or has an empty entry.
    NotPrefixFree,
    /// A leaf count differs from the number of source blocks to index.
    LeafCountMismatch { expected: usize, found: usize },
    /// An output symbol outside `0..v`.
    InvalidSymbol { symbol: u8, alphabet: usize },
    /// A malformed or truncated encoded stream.
    CorruptStream(&'static str),
    /// A stream too short for the requested pattern order.
    StreamTooShort { len: usize, order: usize },
    /// Any other out-of-range argument.
    InvalidArgument(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidPmf(why) => write!(f, "invalid pmf: {why}"),
            Error::InvalidCosts(why) => write!(f, "invalid cost vector: {why}"),
            Error::SupportMismatch { index } => {
                write!(f, "support mismatch at index {index}: p > 0 where q = 0")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::ZeroMinCost => write!(
                f,
                "minimum cost is zero: total cost decreases without bound in f, no optimum exists"
            ),
            Error::InfeasibleRate { entropy, lower, upper } => write!(
                f,
                "infeasible rate: symbol entropy {entropy} outside ({lower}, {upper}]"
            ),
            Error::InfeasibleBudget { budget, minimum } => write!(
                f,
                "infeasible budget {budget}: average cost must exceed {minimum}"
            ),
            Error::ZeroProbability { index } => write!(f, "zero probability at index {index}"),
            Error::NotPrefixFree => write!(f, "code book entries are not prefix-free"),
            Error::LeafCountMismatch { expected, found } => {
                write!(f, "tree has {found} leaves, expected {expected}")
            }
            Error::InvalidSymbol { symbol, alphabet } => {
                write!(f, "symbol {symbol} outside alphabet of size {alphabet}")
            }
            Error::CorruptStream(why) => write!(f, "corrupt stream: {why}"),
            Error::StreamTooShort { len, order } => {
                write!(f, "stream of length {len} too short for order {order}")
            }
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
        }
    }
}

impl core::error::Error for Error {}
