//! Quadratic forms on free modules over small finite rings with involution,
//! odd form parameters, elementary unitary groups and their level subgroups.
//!
//! Everything is finite and enumerable, so most statements about these
//! objects can be checked exhaustively rather than sampled.

pub mod endo;
pub mod error;
pub mod forms;
pub mod groups;
pub mod harness;
pub mod howell;
pub mod levels;
pub mod matrix;
pub mod quad;
pub mod report;
pub mod ring;

pub use error::{Error, Result};
pub use matrix::{GroupKey, KeyCodec, Mat};
pub use ring::{Elem, Ring, RingKind, RingSpec};
