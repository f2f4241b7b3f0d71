//! SELD evaluation: location-aware detection (ER, F) and class-aware
//! localization (LE, LR).

pub mod assignment;
pub mod seld;

pub use assignment::{assign_min_cost, assignment_cost};
pub use seld::{evaluate, Average, ClassScores, EvalConfig, SeldScores, SeldStats};
