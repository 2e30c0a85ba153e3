//! Lorentzian measures from coverings by causal diamonds.
//!
//! The crate builds verified diamond covers of regions in Minkowski space,
//! turns them into upper bounds on `V^N_delta`, pairs them with
//! mass-distribution lower bounds, and estimates the geometric dimension
//! from the scaling of cover costs. It also measures `tau`-length of causal
//! polylines, time separation and volumes for continuous chart metrics, and
//! the doubling and Bishop-Gromov bounds that control dimension.

pub mod causal;
pub mod chart;
pub mod curvature;
pub mod error;
pub mod length;
pub mod measure;
pub mod qmc;
pub mod quadrature;
pub mod spaces;
mod special;

pub use causal::{make_diamond, omega, rho, unit_ball_volume, CausalDiamond, CausalSpace, Point};
pub use error::{Error, Result};
