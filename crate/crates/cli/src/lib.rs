//! Command-line front end for `degwave-core`: configuration, the four
//! subcommands, and CSV/JSON/SVG output.
//!
//! All numbers are written with the shortest decimal that parses back to the
//! same `f64`. `--json` writes a `name.json` array of records next to every
//! `name.csv`.
//!
//! With `--export-coo`, `spectrum` also writes the assembled stiffness, mass
//! and damping matrices as `stiffness.coo`, `mass.coo` and `damping.coo`: a
//! `# rows cols nnz` comment line, then one `row col value` triple per line,
//! 0-based, over the free nodes (the Dirichlet node at `x = 1` eliminated).

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

pub use commands::{cmd_resolvent, cmd_simulate, cmd_spectrum, cmd_transfer, Report};
pub use config::{RawConfig, RunConfig};
