//! Text syntax, table files and the verification driver.

pub mod driver;
pub mod parse;
pub mod suite;

pub use driver::{
    depth_from_env, parse_family, parse_map, run_verification, validate_depth, ExitStatus,
    OutputFormat, RunOutcome, Selection, VerifyConfig, DEFAULT_DEPTH, DEPTH_VAR,
};
pub use parse::{parse_expr, parse_op, parse_value, Parser, Value};
pub use suite::{run_criterion, verify_known_table, CriterionOutcome, CRITERIA};
