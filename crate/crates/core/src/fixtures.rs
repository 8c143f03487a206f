//! Shared fixtures for the validation suite and tests.
//!
//! `w1` has two ergodic maximizing measures with asymmetric tails
//! (`sum a < b + d + sum c`, pressure slope -0.7); `w2` is the symmetric
//! case (pressure slope -1.5, zero deviation at both fixed points). The
//! toy tables are small locally constant potentials with hand-checkable
//! spectra and subactions.

use crate::potential::{GeometricTailSequence, LocallyConstantPotential, WaltersPotential};
use crate::shift_space::ShiftSpace;

/// `b = d = -0.1`, `a_n = -2 * 2^-n`, `c_n = -2^-n`, theta = 1/2.
pub fn w1() -> WaltersPotential {
    WaltersPotential::new(
        -0.1,
        -0.1,
        GeometricTailSequence::pure(-2.0, 0.5).unwrap(),
        GeometricTailSequence::pure(-1.0, 0.5).unwrap(),
        0.5,
    )
    .unwrap()
}

/// `b = d = -1`, `a_n = c_n = -2^-n`, theta = 1/2.
pub fn w2() -> WaltersPotential {
    WaltersPotential::new(
        -1.0,
        -1.0,
        GeometricTailSequence::pure(-1.0, 0.5).unwrap(),
        GeometricTailSequence::pure(-1.0, 0.5).unwrap(),
        0.5,
    )
    .unwrap()
}

/// `w1` with the roles of the two symbols swapped.
pub fn w1_mirror() -> WaltersPotential {
    WaltersPotential::new(
        -0.1,
        -0.1,
        GeometricTailSequence::pure(-1.0, 0.5).unwrap(),
        GeometricTailSequence::pure(-2.0, 0.5).unwrap(),
        0.5,
    )
    .unwrap()
}

pub fn binary_space() -> ShiftSpace {
    ShiftSpace::full(2, 0.5).unwrap()
}

/// Depth-2 table `f(00) = f(11) = 0`, `f(01) = f(10) = -1`; the 2x2
/// transfer matrix at `beta = 1` has pressure `log(1 + e^-1)`.
pub fn toy_symmetric() -> LocallyConstantPotential {
    LocallyConstantPotential::new(&binary_space(), 2, vec![0.0, -1.0, -1.0, 0.0]).unwrap()
}

/// Depth-2 table `f(00) = 0`, `f(01) = f(10) = -1`, `f(11) = -0.5`: a
/// unique maximizing measure at the all-zeros fixed point, subaction
/// `V(0) = 0`, `V(1) = -1`.
pub fn toy_unique_max() -> LocallyConstantPotential {
    LocallyConstantPotential::new(&binary_space(), 2, vec![0.0, -1.0, -1.0, -0.5]).unwrap()
}
