//! Scenario files: parsing, execution and reports.
//!
//! ```text
//! field p = 5
//! ring A = [x, y] / (x^2, y^2)
//! module k = k A
//! task betti k maxdeg=12
//! ```

mod parse;
mod run;

pub use parse::{parse_scenario, Item, Loc, Matrix, ModuleDef, Param, ParamValue, ParseError, Scenario, TaskKind};
pub use run::{run, Report, RunOptions, Status, TaskReport, ENGINE, SCHEMA_VERSION};
