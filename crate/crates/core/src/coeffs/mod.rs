//! Exact coefficient functions on chart domains.

mod coeff;
mod flat;
mod poly;
mod region;
pub mod text;

pub use coeff::CoeffFn;
pub use flat::{FlatFn, FlatSeries};
pub use poly::{Monomial, Poly};
pub use region::{Chart, Interval, Region};
