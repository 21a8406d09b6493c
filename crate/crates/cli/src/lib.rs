//! Library side of the `bsseries` command-line tool: golden-table builders,
//! the price sweep, and output formatting. The binary in `main.rs` is a thin
//! flag-parsing layer over these.

pub mod output;
pub mod sweep;
pub mod tables;
