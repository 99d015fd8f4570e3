//! Harmonic analysis on a discretized unit torus: lacunary partial Fourier
//! sums, time-frequency tiles, level-set decompositions, greedy interval
//! covering, and an Orlicz/Khinchin/Zygmund inequality suite.
//!
//! The grid is a uniform 2^m sampling of [0, 1) with characters
//! e_n(x) = exp(2πi n x). All interval combinatorics (dyadic cells, tiles,
//! dilations) is exact integer arithmetic; only sample values are floating
//! point.

pub mod classify;
pub mod cover;
pub mod dyadic;
pub mod error;
pub mod grid;
pub mod ineq;
pub mod kernel;
pub mod lacunary;
pub mod levelset;
pub mod operators;
pub mod orlicz;
pub mod tile;
mod util;

pub use classify::{classify, i_star, Classification, GroupKey, Label};
pub use cover::{check_round_inequality, greedy_cover, msum_ratio, CoverRounds};
pub use dyadic::{DyadicInterval, Side};
pub use error::CoreError;
pub use grid::{from_spectrum, inner, l1_norm, lp_norm, to_spectrum, weak_l1_norm, GridFunction, Spectrum};
pub use ineq::CoefficientVector;
pub use kernel::KernelBump;
pub use lacunary::{
    carleson_scan, lacunary_maximal, linearize, partial_sum, FrequencySelector, LacunarySequence,
};
pub use levelset::{f_bad, level_intervals, BadSet, LevelSets};
pub use operators::{lambda_proj, TileOperator};
pub use orlicz::{orlicz_norm, OrliczGauge};
pub use tile::{all_tiles, decompose_trees, e_set, mass, mass_partition, MassPartition, Tile, Tree};
