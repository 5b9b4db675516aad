//! Gross points of `p`-power conductor, the Galois action on them, and the
//! reduction map to the ideal class set.

pub mod embed;
pub mod points;

pub use embed::{embedding_count, min_poly, optimal_embeddings, EmbeddingCount, OptimalEmbedding};
pub use points::{
    cm_points, distribution_survey, galois_act, transitivity_report, CMContext, CMOrbit, GrossPoint,
    SurveyReport, TransitivityReport,
};
