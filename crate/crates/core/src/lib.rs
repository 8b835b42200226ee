//! Single-shot distinguishability and antidistinguishability of quantum
//! measurements.
//!
//! A referee hands the experimenter one measurement device drawn from a known
//! set `{M_x}` with prior probabilities `{p_x}`. The experimenter feeds the
//! device a probe state, reads the classical outcome, optionally keeps the
//! post-measurement state, and must then either name the device
//! (distinguishability) or name one device it is not (antidistinguishability).
//! Eight figures of merit arise from three binary choices: single vs.
//! entangled probe, discarding vs. keeping the post-measurement state, and
//! distinguish vs. antidistinguish.
//!
//! Module layout:
//!
//! * [`linalg`]: dense complex matrices, kets, Hermitian eigensolver, tensor
//!   products and partial traces sized for few-qubit problems.
//! * [`ensembles`]: weighted state ensembles and their optimal discrimination
//!   and exclusion values, with primal-dual certificates.
//! * [`measurements`]: Kraus-operator measurements, validation, post-state
//!   maps, the asymmetric-trine family, and a JSON interchange format.
//! * [`scenarios`]: the eight scenario quantities, closed forms where known,
//!   probe optimization with warm-start nesting, and perfection certificates.
//! * [`optimize`]: deterministic multi-start searches over kets, bipartite
//!   kets, and POVMs.
//! * [`sampling`]: seeded random states, unitaries, and measurements used by
//!   reproduction cases and tests.
//! * [`tol`]: the single table of numeric tolerances.

pub mod ensembles;
pub mod error;
pub mod linalg;
pub mod measurements;
pub mod optimize;
pub mod sampling;
pub mod scenarios;
pub mod tol;

pub use error::{Error, Result};
