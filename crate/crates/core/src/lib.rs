//! Exact and Monte Carlo tools for random Latin rectangles.
//!
//! Rows and columns are 0-based positions in the Rust API and 1-based in
//! everything displayed (errors, `.plr` files, JSON, CSV). Symbols are always
//! the values `1..=n`.

mod bits;
pub mod census;
pub mod error;
pub mod expander;
pub mod lab;
pub mod plr;
pub mod rectangle;
pub mod sampler;
pub mod subsquares;

pub use census::Guard;
pub use error::{Error, Result};
pub use rectangle::{Edge, LatinRectangle, MatchingTuple, PartialLatinRectangle, SparsityProfile};
