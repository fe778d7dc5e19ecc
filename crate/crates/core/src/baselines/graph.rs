//! Nearest-neighbour graphs, their Laplacian spectra, and the isospectrality
//! score built on them.

use std::cmp::Ordering;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::{EmbeddingSpace, Error, Exec, Result};

/// Rows per block when computing similarity rows.
const SIM_BLOCK: usize = 256;

/// Undirected, unweighted graph stored as sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborGraph {
    k: usize,
    adjacency: Vec<Vec<usize>>,
}

impl NeighborGraph {
    /// Builds a graph from an edge list. Self-loops are rejected; duplicate
    /// edges collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a}, {b}) out of range for {n} nodes")));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at node {a}")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(NeighborGraph { k: 0, adjacency })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Neighbours requested per node when built by [`knn_graph`]; 0 for
    /// graphs built from edge lists.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Number of connected components.
    pub fn component_count(&self) -> usize {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }
}

/// Similarity ordering: higher first, then lower index.
fn by_similarity(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

/// k-nearest-neighbour graph over the first `top_n` rows by dot product
/// (cosine similarity on length-normalized rows), symmetrized by union.
///
/// `top_n` larger than the space is clamped to its row count.
pub fn knn_graph(space: &EmbeddingSpace, top_n: usize, k: usize) -> Result<NeighborGraph> {
    knn_graph_with(space, top_n, k, Exec::default())
}

pub fn knn_graph_with(space: &EmbeddingSpace, top_n: usize, k: usize, exec: Exec) -> Result<NeighborGraph> {
    if !space.is_length_normalized() {
        log::warn!("k-NN graph of {:?}: rows are not length-normalized", space.lang());
    }
    let n = clamp_rows(space, top_n, "k-NN graph");
    if n < 2 {
        return Err(Error::invalid(format!("k-NN graph needs at least 2 nodes, got {n}")));
    }
    if k == 0 || k >= n {
        return Err(Error::invalid(format!("k must be in 1..{n} for {n} nodes, got {k}")));
    }
    let x = space.matrix();
    let x = x.slice(ndarray::s![..n, ..]);
    let blocks = n.div_ceil(SIM_BLOCK);
    let out: Vec<Vec<Vec<usize>>> = exec.map_range(blocks, |b| {
        let lo = b * SIM_BLOCK;
        let hi = ((b + 1) * SIM_BLOCK).min(n);
        let sims = x.slice(ndarray::s![lo..hi, ..]).dot(&x.t());
        (lo..hi)
            .map(|i| {
                let row = sims.row(i - lo);
                let mut cand: Vec<(f64, usize)> = row
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(j, &s)| (s, j))
                    .collect();
                cand.select_nth_unstable_by(k - 1, by_similarity);
                cand.truncate(k);
                cand.sort_unstable_by(by_similarity);
                cand.into_iter().map(|(_, j)| j).collect()
            })
            .collect()
    });
    let mut adjacency = vec![Vec::new(); n];
    for (i, nbrs) in out.into_iter().flatten().enumerate() {
        for j in nbrs {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    Ok(NeighborGraph { k, adjacency })
}

pub(crate) fn clamp_rows(space: &EmbeddingSpace, requested: usize, what: &str) -> usize {
    if requested > space.n() {
        log::warn!(
            "{what} of {:?}: requested {requested} rows but the space has {}; using all",
            space.lang(),
            space.n()
        );
        space.n()
    } else {
        requested
    }
}

/// Eigenvalues of the unnormalized Laplacian L = D − A, descending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplacianSpectrum {
    eigenvalues: Vec<f64>,
}

impl LaplacianSpectrum {
    /// Wraps precomputed eigenvalues (sorted descending, negatives clamped).
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite Laplacian eigenvalue"));
        }
        eigenvalues.iter_mut().for_each(|v| *v = v.max(0.0));
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Ok(LaplacianSpectrum { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Smallest k whose k largest eigenvalues hold at least `mass` of the
    /// total. `mass = 1` selects the whole spectrum.
    pub fn mass_index(&self, mass: f64) -> Result<usize> {
        check_mass(mass)?;
        let total: f64 = self.eigenvalues.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("all-zero Laplacian spectrum (edgeless graph)"));
        }
        if mass >= 1.0 {
            return Ok(self.len());
        }
        let target = mass * total;
        let mut acc = 0.0;
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            acc += l;
            if acc >= target {
                return Ok(i + 1);
            }
        }
        Ok(self.len())
    }
}

fn check_mass(mass: f64) -> Result<()> {
    if mass > 0.0 && mass <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("spectral mass must be in (0, 1], got {mass}")))
    }
}

/// Dense Laplacian eigen-solve.
pub fn laplacian_spectrum(graph: &NeighborGraph) -> Result<LaplacianSpectrum> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::invalid("empty graph"));
    }
    let mut l = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        l[(i, i)] = graph.degree(i) as f64;
        for &j in graph.neighbors(i) {
            l[(i, j)] = -1.0;
        }
    }
    let ev = crate::linalg::sym_eigenvalues_desc(l.as_ref())?;
    LaplacianSpectrum::new(ev)
}

/// Parameters of the isospectrality score.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsParams {
    /// Most frequent words used to build each graph.
    pub top_n: usize,
    /// Neighbours per node.
    pub k: usize,
    /// Fraction of the Laplacian spectrum's total mass to compare.
    pub mass: f64,
}

impl Default for IsParams {
    fn default() -> Self {
        IsParams {
            top_n: 10_000,
            k: 10,
            mass: 0.9,
        }
    }
}

/// Δ between two Laplacian spectra: squared differences over the k*
/// largest eigenvalues, k* = min of the two mass indices.
pub fn isospectrality_from_spectra(a: &LaplacianSpectrum, b: &LaplacianSpectrum, mass: f64) -> Result<f64> {
    let k = a.mass_index(mass)?.min(b.mass_index(mass)?);
    let k = k.min(a.len()).min(b.len());
    Ok(a.eigenvalues[..k]
        .iter()
        .zip(&b.eigenvalues[..k])
        .map(|(x, y)| (x - y) * (x - y))
        .sum())
}

/// Laplacian spectrum of the space's k-NN graph.
pub fn space_laplacian(space: &EmbeddingSpace, params: &IsParams, exec: Exec) -> Result<LaplacianSpectrum> {
    laplacian_spectrum(&knn_graph_with(space, params.top_n, params.k, exec)?)
}

/// Isospectrality Δ between two spaces.
pub fn isospectrality(a: &EmbeddingSpace, b: &EmbeddingSpace, params: &IsParams) -> Result<f64> {
    check_mass(params.mass)?;
    let la = space_laplacian(a, params, Exec::default())?;
    let lb = space_laplacian(b, params, Exec::default())?;
    isospectrality_from_spectra(&la, &lb, params.mass)
}
