//! Baseline isomorphism measures: isospectrality (IS) of nearest-neighbour
//! graph Laplacians, and a Gromov–Hausdorff (GH) proxy computed as the
//! bottleneck distance between H0 persistence diagrams.

mod bottleneck;
mod graph;
mod persistence;

pub use bottleneck::bottleneck_distance;
pub use graph::{
    isospectrality, isospectrality_from_spectra, knn_graph, knn_graph_with, laplacian_spectrum, space_laplacian,
    IsParams, LaplacianSpectrum, NeighborGraph,
};
pub use persistence::{distance_matrix, distance_matrix_with, h0_persistence, DistanceMatrix, PersistenceDiagram};

use crate::{EmbeddingSpace, Exec, Result};

/// Default number of most frequent words used for GH.
pub const GH_SAMPLE: usize = 5000;

/// H0 diagram of the first `sample_n` rows.
pub fn space_diagram(space: &EmbeddingSpace, sample_n: usize, exec: Exec) -> Result<PersistenceDiagram> {
    Ok(h0_persistence(&distance_matrix_with(space, sample_n, exec)?))
}

/// GH proxy: bottleneck distance between the H0 diagrams of the two
/// spaces' first `sample_n` rows.
pub fn gromov_hausdorff(a: &EmbeddingSpace, b: &EmbeddingSpace, sample_n: usize) -> Result<f64> {
    let da = space_diagram(a, sample_n, Exec::default())?;
    let db = space_diagram(b, sample_n, Exec::default())?;
    Ok(bottleneck_distance(&da, &db))
}
