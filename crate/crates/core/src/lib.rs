//! Cancer-development simulation on symbolic scores.
//!
//! A part of a partwise score is picked as the founder; a few of its measures
//! become a leitmotif that repeats instead of the part moving on. Each pass of
//! the leitmotif may spawn a copy as a new part, and every living copy may
//! mutate through five operators (insertion, deletion, inversion,
//! translocation, transposition). Therapy can silence parts from a given
//! measure, sparing a random fraction of them.
//!
//! The crate is organised bottom-up:
//!
//! * [`score`]: parts, measures, notes and exact durations
//! * [`musicxml`]: reading and writing uncompressed partwise MusicXML
//! * [`ops`]: the mutation operators and their registry
//! * [`engine`]: founder selection, cycles, reproduction, therapy, rendering
//! * [`report`]: the JSON lineage report
//!
//! Runs are deterministic in `(score, params)`; see [`rng`] for the draw contract.

pub mod engine;
pub mod musicxml;
pub mod ops;
pub mod report;
pub mod rng;
pub mod score;

pub use engine::{run, EngineParams, LineageTree, MutantPart};
pub use musicxml::{parse_score, write_score, ParseDiagnostics};
pub use score::Score;

/// Version of this library, as recorded in the manifest.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
