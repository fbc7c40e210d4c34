use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "symbol {symbol} at position {position} is outside an alphabet of size {alphabet_size}"
    )]
    SymbolOutOfRange {
        symbol: usize,
        position: usize,
        alphabet_size: usize,
    },

    /// A formula was evaluated at a size where its denominator vanishes.
    #[error("{quantity} requires n >= {min_n}, got n = {n}")]
    Domain {
        quantity: &'static str,
        min_n: u64,
        n: u64,
    },

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("capacity exceeded: {what} (limit {limit})")]
    Capacity { what: String, limit: String },

    #[error("inconsistent pair tables: {0}")]
    InconsistentTables(String),
}
