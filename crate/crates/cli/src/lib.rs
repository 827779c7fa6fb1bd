//! Input parsing and report rendering for the `polyk` command.

pub mod input;
pub mod report;
