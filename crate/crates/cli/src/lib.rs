//! Library half of the command-line harness: the reproduction case table and
//! the sweep families, shared between the binary and the integration tests.

pub mod cases;
pub mod sweeps;
