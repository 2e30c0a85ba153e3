//! Continuous chart metrics: cone sandwiches, a longest-path surrogate for
//! the time separation, volumes of local diamonds and doubling constants.

mod doubling;
mod graph;
mod metric;

pub use doubling::{
    dimension_bound_from_doubling, doubling_constant, enlarge_diamond, lambda_for, measure_ratio_check,
    volume_density_check, CylindricalNeighborhood, DensityReport, DensityRow, DoublingOptions, DoublingReport,
    DoublingSample, Enlargement, RatioPair, RatioReport, RatioRow,
};
pub use graph::{
    diamond_box, diamond_volume, dp_time_separation, dp_time_separation_in, tau_upper, CausalGraph, DiamondGraphs,
    DpInterval, DpOptions,
};
pub use metric::{verify_cone_sandwich, ChartMetric, ConeSandwich, MetricField, Range, SAMPLE_RES};
