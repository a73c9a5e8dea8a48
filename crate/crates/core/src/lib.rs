//! Decide absolute norm attainment for positive operators given by exact
//! finite descriptions.
//!
//! A positive operator is absolutely norm attaining exactly when its essential
//! spectrum is a single point `alpha` and only finitely many spectrum points
//! lie below `alpha`. This crate evaluates that test exactly on diagonal
//! models ([`seqmodel`]), produces the `alpha I + K+ + F` split or a subspace
//! on which the norm is not attained ([`classify`]), applies the test to
//! weighted shifts ([`shiftapp`]) and checks all of it numerically on finite
//! sections ([`numlab`]).

pub mod classify;
pub mod cli;
pub mod numlab;
pub mod rational;
pub mod seqmodel;
pub mod shiftapp;

pub use rational::Rational;
pub use classify::{classify_an, decompose, AnVerdict, Decomposition, NotAnReason, Witness};
pub use seqmodel::{Approach, BelowThreshold, ModelError, SequenceSpec, Strand};
pub use shiftapp::{classify_shift, WeightedShift};
