//! Exact dimer-monomer (matching) enumeration on generalized Tower of Hanoi
//! graphs TH_d(n), with mechanically generated boundary-class recursions and
//! rigorous entropy bounds.

pub mod appendix_check;
pub mod cache;
pub mod cli;
pub mod decimal;
pub mod entropy;
pub mod error;
pub mod evolve;
pub mod fixtures;
pub mod hanoi_graph;
pub mod matching_oracle;
pub mod multipoly;
pub mod recursion_gen;
pub mod reproduce;

pub use error::{Error, Result};
