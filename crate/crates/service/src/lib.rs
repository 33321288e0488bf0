//! Explanations and serving for staged Hitori plans.

pub mod api;
pub mod cli;
pub mod explain;
pub mod llm;
pub mod session;
