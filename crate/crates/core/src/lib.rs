//! The LOVES game: an iterated rule on digit strings.
//!
//! Each step replaces a string by the decimal concatenation of its adjacent
//! pair sums. A game ends when fewer than three digits remain; the last two
//! digits read as a percentage. Some starting strings instead loop forever
//! or grow without bound.
//!
//! * [`engine`] holds the rule, outcome classification and one-step statistics.
//! * [`analysis`] runs exhaustive sweeps and `(w, m)` phase-space averages.
//! * [`names`] counts keyword letters in names and scores name rosters.
//! * [`backtrack`] reconstructs length-5 starting strings for a target result.

pub mod analysis;
pub mod backtrack;
pub mod combinatorics;
pub mod engine;
pub mod names;
pub mod ratio;

pub use engine::{
    classify, iterate, play, step_stats, ChainTrace, ClassifyLimits, DigitString, EngineError,
    Outcome, OutcomeKind, StepStats,
};
