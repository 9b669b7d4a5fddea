//! Holonomy of the line at infinity by path lifting, and the resulting
//! pseudo-groups of germs on a transverse disk.

mod density;
mod fixed;
mod germ;
pub mod io;
mod lift;
mod loops;

pub use density::{orbit_density_probe, reference_pair, translated_linear_pair, Coverage, ProbeOptions, DEFAULT_BUDGET};
pub use fixed::{
    find_hyperbolic_fixed_points, newton_fixed_point, FixedPointDiagnostics, FixedPointOptions, FixedPointRecord,
    FixedPointSearch,
};
pub use germ::{invert_by_newton, Germ, GermError, Letter, ParseWordError, PolyGerm, PseudoGroup, Word, WordError};
pub use lift::{
    holonomy_generators, lift_path, DiskError, HolonomyError, HolonomyGroup, HolonomyMap, HolonomyOptions, LiftError,
    LiftField, LiftOptions, Lifted, TransverseDisk,
};
pub use loops::{
    canonical_loop, canonical_radii, choose_base_point, counterclockwise_order, LoopError, LoopPath, Piece,
};
