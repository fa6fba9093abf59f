//! Compact open sets, discrete measures and tilings of `Q_p` and `Q_p × Z/2Z`.
//!
//! Infinite objects are handled through a window `B(0, p^W)`: a measure is
//! given by its atoms inside the window, and every verdict is about what the
//! window can certify.

mod compact;
mod measure;
mod qpz2;
mod spectrum;

pub use compact::{CompactOpenSet, Normalization};
pub use measure::{
    constancy_parameter, convolve_window, density, is_function_tiling, measure_ball_counts, measure_zero_scan,
    uniform_partition_check, uniform_partition_construct, BallCounts, Constancy, Density, DiscreteMeasure,
    TestFunction, UniformPartition, UniformityWitness, ZeroScan,
};
pub use qpz2::{classify_qp_z2, QpZ2Case, QpZ2Classification};
pub use spectrum::{
    lambda_case_iii, spectrum_for_homogeneous, tiling_complement_orders_check, ComplementOrders, SpectrumCheck,
    SpectrumDescription,
};

/// Upper bound on the number of balls any single enumeration may visit.
pub const CELL_LIMIT: usize = 1 << 20;
