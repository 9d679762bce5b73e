//! Iterated Cevian subdivision of triangles on the angle simplex.
//!
//! A triangle with an interior point subdivides into six daughters along
//! the Cevians through that point. For the incenter the daughters' angles
//! are linear in the parent's angles, so one subdivision step is six 3×3
//! matrices acting on the simplex `{α + β + γ = π, α, β, γ ≥ 0}`. On top of
//! that structure this crate provides:
//!
//! - [`simplex`]: the angle-triple representation, metric and 2-D embedding;
//! - [`maps`]: the six matrices, inverses, preimages, region images,
//!   contraction checks and exact self-similar triangle solving;
//! - [`density`]: constructive ε-approximation certificates between any
//!   start and target triangle;
//! - [`geometry`]: coordinate subdivision for centroid, incenter, Gergonne,
//!   Lemoine and fixed-weight centers;
//! - [`dynamics`]: generation enumeration, seeded Monte-Carlo sampling,
//!   triangular histograms, min-angle CDF bounds, flatness statistics;
//! - [`io`]: provenance-stamped CSV and PGM emission with matching readers.

pub mod density;
pub mod dynamics;
pub mod geometry;
pub mod io;
pub mod maps;
pub mod simplex;

pub use density::{approximate, approximate_with, required_depth, verify, DensityCertificate};
pub use dynamics::{
    cdf_bounds, enumerate_generation, flatness_stats, histogram, sample_walks, sample_walks_par,
    CdfBounds, HistogramGrid,
};
pub use geometry::{subdivide, CenterStrategy, TriangleXY};
pub use maps::{
    apply, apply_word, preimage_step, preimage_word, region_image, region_min_angle_bounds,
    self_similar_indices, solve_all_self_similar, MapIndex, MapWord, RegionImage,
};
pub use simplex::{AngleTriple, PlanePoint2D};
