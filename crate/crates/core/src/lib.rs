//! Exact tools for tiles and spectral sets in `Q_p`, `Z/p^nZ × Z/qZ` and `Q_p × Z/2Z`.
//!
//! Every verdict is computed exactly: `p`-adic numbers are elements of `Z[1/p]`,
//! phases are rationals mod 1, and character sums are tested for vanishing by
//! division by a cyclotomic polynomial.

pub mod cyclotomic;
pub mod error;
pub mod finite;
pub mod padic;
pub mod qp;
pub mod tree;

pub use cyclotomic::{
    is_vanishing, p_cycle_decompose, phases_to_rootsum, rotate, weighted_phases_vanish, CyclotomicModulus, PCycle,
    RootSum,
};
pub use error::{Error, Result};
pub use finite::{
    classify_tile_pp, classify_tile_pq, dft_zero_set, find_spectra, find_spectra_with_budget,
    find_tiling_complements, find_tiling_complements_with_budget, is_spectral_pair, is_spectral_set, is_tile,
    is_tiling_pair, DualZeroSet, GroupSubset, PpClassification, PqClassification, ProductGroup, SearchOutcome,
    TileClassification,
};
pub use padic::{
    admissible_orders, ball_character_integral, character, AdmissibleOrderSet, Ball, BallIntegral, PAdicScalar,
    UnitPhase, Valuation,
};
pub use qp::{
    classify_qp_z2, constancy_parameter, convolve_window, density, is_function_tiling, lambda_case_iii,
    measure_ball_counts, measure_zero_scan, spectrum_for_homogeneous, tiling_complement_orders_check,
    uniform_partition_check, uniform_partition_construct, CompactOpenSet, DiscreteMeasure, QpZ2Case,
    QpZ2Classification, TestFunction, UniformPartition,
};
pub use tree::{
    branching_profile, build_tree, enumerate_homogeneous, homogeneity_from_zeros, is_p_homogeneous, tree_to_dot,
    zero_exponents, BranchLevelSet, Homogeneity, LevelTree, ResidueMultiset, ResidueSet,
};
