//! Concrete causal spaces: cone-scaled Minkowski spaces, linear subspaces
//! with the induced structure, polygonal causal curves and measurable
//! regions.

mod boost;
mod curve;
mod minkowski;
mod region;
mod subspace;

pub use boost::{lorentz_boost, LorentzBoost};
pub use curve::{CurveClass, PiecewiseLinearCurve};
pub use minkowski::{MinkowskiSpace, NULL_TOLERANCE};
pub use region::{Region, SubspaceCube};
pub use subspace::{classify_subspace, restrict_to_subspace, LinearSubspace, SignatureClass, SubspaceSpace, GRAM_TOLERANCE};
