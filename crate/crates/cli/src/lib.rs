//! Input parsing, the staged verification pipeline and its report.

pub mod input;
pub mod pipeline;
