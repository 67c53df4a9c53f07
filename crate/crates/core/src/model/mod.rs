//! Distribution models for `(A, B)`.

pub mod blaw;
pub mod catalog;
pub mod check;
pub mod kappa;
pub mod tail;
pub mod tilted;

pub use blaw::{BKind, BLaw};
pub use catalog::{assemble, Model};
pub use check::{check_case, moments, BMomentFlags, CaseReport, MomentValue};
pub use kappa::{solve_kappa, BaseFamily, KAPPA_BRACKET};
pub use tail::{Df, LeftKind, RightKind, TailSpec};
pub use tilted::{base_from_tilted, tune_case_i, tune_theta, ALaw, CaseTag, Measure, TiltedLaw};
