//! Two-dimensional partial sums and their strong means.

mod gauge;
mod glukhov;
mod grid2d;
mod means;

pub use gauge::{gauge_dominates, DominationReport, Gauge, DOMINATION_GROWTH_LIMIT};
pub use glukhov::{glukhov_integral, GlukhovValue, GLUKHOV_CELL_BUDGET};
pub use grid2d::{CylinderGrid2D, Spectrum2D};
pub use means::{
    average_table, fridli_schipp_mean_1d, fridli_schipp_table, power_mean_all_blocks,
    power_mean_block, strong_mean_2d, strong_mean_table, MeanValue, PowerMean, StrongMeanTable,
    EXPONENT_LIMIT,
};

pub(crate) use means::cell_partial_sums;
