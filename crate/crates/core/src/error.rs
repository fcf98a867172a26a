use thiserror::Error;

/// Errors raised across latinlab.
///
/// Row, column and symbol numbers carried by variants are 1-based, matching
/// the `.plr` format and all displayed output.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid dimensions {k}x{n}: need 1 <= k <= n <= {max}")]
    InvalidDimensions { k: usize, n: usize, max: usize },
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow { row: usize, found: usize, expected: usize },
    #[error("symbol {symbol} at row {row}, column {col} is outside 1..={n}")]
    OutOfRangeSymbol { row: usize, col: usize, symbol: usize, n: usize },
    #[error("row {0} is not a permutation of the symbols")]
    RowNotPermutation(usize),
    #[error("symbol {1} repeats in row {0}")]
    RowRepeat(usize, usize),
    #[error("symbol {1} repeats in column {0}")]
    ColumnRepeat(usize, usize),
    #[error("dimension mismatch: {left_k}x{left_n} vs {right_k}x{right_n}")]
    DimensionMismatch { left_k: usize, left_n: usize, right_k: usize, right_n: usize },
    #[error("row selection is empty")]
    EmptySelection,
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("matching {matching} is not injective: symbol {symbol} used twice")]
    NotInjective { matching: usize, symbol: usize },
    #[error("matching tuple is incomplete: matching {0} is not perfect")]
    IncompleteTuple(usize),
    #[error("edge (column {col}, symbol {symbol}) lies in matchings {first} and {second}")]
    DisjointnessViolated { col: usize, symbol: usize, first: usize, second: usize },
    #[error("{k}x{n} exceeds the enumeration size guard (pass an explicit override)")]
    SizeGuardExceeded { k: usize, n: usize },
    #[error("pattern is not a one-entry extension of the conditioning pattern")]
    NotAnExtension,
    #[error("conditioning pattern has no completion")]
    ConditioningOnEmptyEvent,
    #[error("edge (column {col}, symbol {symbol}) is already used by matching {matching}")]
    EdgeAlreadyUsed { col: usize, symbol: usize, matching: usize },
    #[error("edge meets matching {0}; the switching ratio is undefined there")]
    EdgeMeetsMatching(usize),
    #[error("class B is empty; the switching ratio is undefined")]
    DegenerateB,
    #[error("partial rectangle has no completion")]
    Unsatisfiable,
    #[error("switch chain has no moves when k = n")]
    EmptyMoveSet,
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error("order {order} out of range 1..={max}")]
    OrderOutOfRange { order: usize, max: usize },
    #[error("symbol cap {cap} is below order {order}")]
    CapBelowOrder { cap: usize, order: usize },
    #[error("|L_{0}| is not tabulated")]
    UnknownSquareCount(usize),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("edges are not a sub-matching of row {0}")]
    NotASubMatching(usize),
    #[error("{vertices} vertices is too large for exact subset checking (limit {limit})")]
    TooLargeForExact { vertices: usize, limit: usize },
    #[error("path search on {vertices} vertices at length {length} exceeds the guard (|V| <= 16 or length <= 7)")]
    PathGuardExceeded { vertices: usize, length: usize },
    #[error("vertex {0} has no out-arcs")]
    SinkVertex(usize),
    #[error("invalid digraph: {0}")]
    InvalidDigraph(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
