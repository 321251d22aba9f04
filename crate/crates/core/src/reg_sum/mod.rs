//! Regularized sums over Z^d: Euler–MacLaurin in one dimension, finite
//! parts of sums over expanding cubes, and C(sigma).

mod em;
mod fit;
mod lattice;

pub use em::{cutoff_sum_1d, em_identity_check, EMParams, EmCheck, SmoothFn};
pub(crate) use em::power_tail_fp;
pub use fit::{finite_part_extract, AsymptoticModel, FinitePartResult, MAX_CONDITION, MERGE_TOL};
pub use lattice::{
    c_constant, c_constant_translated, cutoff_sum_lattice, cutoff_sum_translated, default_ladder,
    kp_hypercube_polynomial_sum, lattice_sum_supball, lattice_sum_supball_translated, sweep_ladder,
    translated_ladder, CConstant, LatticeOptions, LatticeSweep, SweepPoint, MIN_EXPONENT, NEAR_ZERO,
};
