//! Hitori solving and step-by-step explanation.

pub mod cnf;
pub mod connectivity;
pub mod generate;
pub mod grid;
pub mod proof;
pub mod sat;
pub mod staging;
