//! CAT(1) model spaces: spherical comparison, suspensions, spherical
//! simplices and `δ_m`, exact minimax centers, Sperner search, the cone
//! extension, and the small-triangle lemmas.

mod lemmas;
mod maps;
mod minimax;
mod simplex;
mod space;
mod sperner;

pub use lemmas::{
    lemma_deficit, loglog_slope, verify_comparison_lemmas, LemmaFit, LemmaKind, LemmaReport, DEFAULT_EPS,
};
pub use maps::{comparison_angle, cone_extension, near_geodesic_check, LipschitzMapSample};
pub use minimax::{diameter, minimax_center, Centers, FiniteMetricSample, MetricSample, OracleSample, CENTER_TOL};
pub use simplex::{
    compositions, simplex_geometry, simplex_geometry_with, simplex_grid, suspension_centers, suspension_grid,
    SimplexGeometry,
};
pub use space::{
    suspension_distance, GeodesicSpace, SimplexPoint, SphericalSimplex, Suspension, SuspensionPoint, TitsBoundary,
    UnitSphere,
};
pub use sperner::{
    all_labelings, nearest_vertex_labels, random_labeling, sperner_search, RationalPoint, SpernerCell,
    Triangulation,
};
