//! Finite-resolution models of Clifford, even Clifford and free flows.
//!
//! The crate discretizes time into cells of width `delta`. One-particle
//! vectors are piecewise constant with values in an `n`-dimensional internal
//! space, Fock spaces are built over the resulting `cells * n` modes, and all
//! algebraic objects (commutants, intertwiners, fibers, addits, units) are
//! computed as finite-dimensional subspaces.

pub mod algebra;
pub mod error;
pub mod flows;
pub mod fock;
pub mod freebasis;
pub mod ito;
pub mod linalg;
pub mod onepart;
pub mod sparse;
pub mod sps;

pub use algebra::{OperatorSpace, Subspace};
pub use error::{Error, Result};
pub use flows::{FiberReport, FlowKind, FlowModel};

pub use fock::{AntiLinear, FockSpace, StateVec};
pub use onepart::{Grid, GridFn, ShiftMap};
pub use sparse::SparseOp;
pub use sps::{AdditFamily, Fiber, SuperProductSystem, UnitFamily};


/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Default relative cut for numerical ranks.
pub const RANK_TOL: f64 = 1e-6;
