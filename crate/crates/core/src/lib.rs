pub mod error;
pub mod factorizer;
pub mod hensel;
pub mod parse;
pub mod puiseux;
pub mod residue;
pub mod scalar;
pub mod skew_poly;
pub mod skew_series;
pub mod structure_maps;

pub use error::{Error, Result};
