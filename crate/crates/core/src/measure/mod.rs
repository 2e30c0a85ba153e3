//! Upper bounds on `V^N_delta` from verified covers, Frostman lower bounds,
//! and the dimension estimator built on both.

mod cover;
mod dimension;
mod frostman;
mod generators;

pub use cover::{Cover, CoverPiece, Coverage, DiamondLattice, NullLattice, COVERAGE_THRESHOLD};
pub use dimension::{
    dyadic_scales, estimate_dimension, CoverBank, DimensionEstimate, EstimateOptions, ScalingEntry,
    ScalingSeries,
};
pub use frostman::{frostman_constant, lower_measure, FrostmanOptions, LowerBound, MassDistribution, UniformMass};
pub use generators::{
    box_cover, curve_chain_cover, grid_cover, grid_cover_cells, null_cover, point_cover, tiling_cover,
    timelike_cube_cover, Generator, NULL_FAMILY_EPS,
};

use crate::error::{Error, Result};
use crate::spaces::{MinkowskiSpace, Region};

/// Sampling budget for coverage checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 4096,
            seed: 0x5eed,
        }
    }
}

/// Seed for the `i`-th independent stream derived from `seed`.
pub(crate) fn stream_seed(seed: u64, i: u64) -> u64 {
    let mut z = seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Best verified cover cost at one scale.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperBound {
    pub value: f64,
    pub generator: String,
}

/// Build and verify every applicable cover, return the cheapest at `N`.
pub fn upper_measure(
    space: &MinkowskiSpace,
    region: &Region,
    n: f64,
    delta: f64,
    generators: &[Generator],
    opts: VerifyOptions,
) -> Result<UpperBound> {
    if !(n >= 0.0) {
        return Err(Error::Domain(format!("N must be nonnegative, got {n}")));
    }
    let bank = CoverBank::build(space, region, generators, &[delta], opts)?;
    let covers = &bank.covers()[0];
    if covers.is_empty() {
        return Err(Error::UnverifiedCover {
            fraction: bank.best_fraction(0),
        });
    }
    let mut best: Option<UpperBound> = None;
    for c in covers {
        let value = c.cost(n)?;
        if best.as_ref().map_or(true, |b| value < b.value) {
            best = Some(UpperBound {
                value,
                generator: c.generator.clone(),
            });
        }
    }
    Ok(best.expect("nonempty"))
}
