//! Character clustering over emotion vectors.

mod composition;
mod kmeans;
mod ward;

use thiserror::Error;

pub use composition::{composition_audit, CompositionRow, GenderCounts};
pub use kmeans::{
    elbow_detect, kmeans, kmeans_best, sse_curve, KMeansResult, MAX_LLOYD_ITERATIONS, RESTARTS,
};
pub use ward::{cut_dendrogram, ward_cluster, Dendrogram, Merge, TIE_TOLERANCE};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ClusterError {
    #[error("row {row} has {found} columns, expected {expected}")]
    Dimension {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("input contains a non-finite value at row {0}")]
    NonFinite(usize),
    #[error("k = {k} is invalid for {n} points")]
    InvalidK { k: usize, n: usize },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("SSE curve: {0}")]
    Curve(String),
}

/// Checks a row-major matrix is rectangular and finite; returns its width.
pub(crate) fn validate_points(points: &[Vec<f64>]) -> Result<usize, ClusterError> {
    let dim = points.first().map_or(0, Vec::len);
    for (row, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(ClusterError::Dimension {
                row,
                found: p.len(),
                expected: dim,
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(ClusterError::NonFinite(row));
        }
    }
    Ok(dim)
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
