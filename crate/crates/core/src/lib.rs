//! Gibbs states, transfer operators and zero-temperature limits on shift
//! spaces.
//!
//! The crate computes finite-temperature Gibbs objects (pressure,
//! eigenfunction, eigenmeasure, equilibrium measure) for locally constant
//! and Walters-class potentials, the corresponding zero-temperature
//! objects (maximizing value, calibrated subactions, Mather states, the
//! nonnegative cocycle and the large-deviation rate function) by exact
//! tropical methods and closed-form series, and cross-checks the three
//! routes against each other.
//!
//! Modules:
//! - [`shift_space`]: alphabet, subshifts, words, eventually periodic
//!   points, the theta metric.
//! - [`potential`]: Walters-class and locally constant potentials.
//! - [`transfer`]: log-domain transfer matrices and Perron data at
//!   finite inverse temperature.
//! - [`ergodic_opt`]: max-plus cycle means, calibrated subactions,
//!   Mather components and min-plus deviation tables.
//! - [`walters`]: exact series engine for Walters-class potentials
//!   (pressure, eigenfunction, cylinder masses, zero-temperature limits
//!   and the explicit deviation function).
//! - [`asymptotics`]: beta sweeps, slope fits and the large-deviation
//!   consistency checks.

pub mod asymptotics;
pub mod ergodic_opt;
pub mod fixtures;
pub mod numerics;
pub mod potential;
pub mod shift_space;
pub mod transfer;
pub mod walters;
