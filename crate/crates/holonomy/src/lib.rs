//! Files, parallel execution, the verify suite, reports and the command
//! line for `holonomy-core`.

pub mod cli;
pub mod io;
pub mod par;
pub mod report;
pub mod verify;

pub use par::RayonExecutor;
