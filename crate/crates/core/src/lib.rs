//! Primal-dual auction solver for budgeted transportation problems.

pub mod basic;
pub mod bench;
pub mod bts;
pub mod certify;
pub mod graph;
pub mod instance;
pub mod monitor;
pub mod numeric;
pub mod oracle;
pub mod reductions;
pub mod solution;
pub mod state;
