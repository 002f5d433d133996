pub mod adjoint;
pub mod cli;
pub mod coeffs;
pub mod conv;
pub mod dist;
pub mod dual;
pub mod error;
pub mod groupoid;
pub mod lie_rinehart;
pub mod model;
pub mod number;
pub mod parse;
pub mod phi;
pub mod random;
pub mod report;
pub mod suites;
pub mod uea;

pub use error::{Error, Result};
