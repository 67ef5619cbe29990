//! Batch front end for the `edgemorph` library: PBM/PGM ingestion, the
//! text formats for edge sets and skeletons, and the `edgemorph` command.

mod app;
pub mod formats;
pub mod pnm;

pub use app::run;
