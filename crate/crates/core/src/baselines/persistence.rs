//! Distance matrices and H0 persistence diagrams of the Vietoris–Rips
//! filtration.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::numfmt::f64_17;
use crate::{EmbeddingSpace, Error, Exec, Result};

/// Dense symmetric distance matrix with a zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates a row-major n×n matrix: finite, nonnegative, symmetric,
    /// zero diagonal.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::invalid(format!("distance matrix needs {} entries, got {}", n * n, data.len())));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::invalid(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                let v = data[i * n + j];
                if !v.is_finite() || v < 0.0 || v != data[j * n + i] {
                    return Err(Error::invalid(format!("invalid or asymmetric distance at ({i}, {j})")));
                }
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// Euclidean distances between the first `sample_n` rows.
///
/// `sample_n` larger than the space is clamped to its row count.
pub fn distance_matrix(space: &EmbeddingSpace, sample_n: usize) -> Result<DistanceMatrix> {
    distance_matrix_with(space, sample_n, Exec::default())
}

pub fn distance_matrix_with(space: &EmbeddingSpace, sample_n: usize, exec: Exec) -> Result<DistanceMatrix> {
    if !space.is_length_normalized() {
        log::warn!("distance matrix of {:?}: rows are not length-normalized", space.lang());
    }
    let n = super::graph::clamp_rows(space, sample_n, "distance matrix");
    if n < 2 {
        return Err(Error::invalid(format!("distance matrix needs at least 2 points, got {n}")));
    }
    let x = space.matrix();
    // upper triangle, one row per task
    let upper: Vec<Vec<f64>> = exec.map_range(n, |i| {
        let xi = x.row(i);
        (i + 1..n)
            .map(|j| {
                xi.iter()
                    .zip(x.row(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    });
    let mut data = vec![0.0; n * n];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + 1 + off;
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    Ok(DistanceMatrix { n, data })
}

/// Multiset of (birth, death) pairs.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    points: Vec<(f64, f64)>,
}

impl PersistenceDiagram {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        for &(b, d) in &points {
            if !(b.is_finite() && d.is_finite() && b >= 0.0 && d >= b) {
                return Err(Error::invalid(format!("invalid persistence point ({b}, {d})")));
            }
        }
        Ok(PersistenceDiagram { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV with a `birth,death` header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        w.write_record(["birth", "death"])?;
        for &(b, d) in &self.points {
            w.write_record([f64_17(b), f64_17(d)])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut points = Vec::new();
        for rec in rdr.deserialize::<(f64, f64)>() {
            points.push(rec?);
        }
        Self::new(points)
    }
}

/// H0 persistence of the Rips filtration: one point (0, w) per minimum
/// spanning tree edge of weight w, sorted by death. The essential class is
/// not included.
pub fn h0_persistence(dist: &DistanceMatrix) -> PersistenceDiagram {
    let n = dist.len();
    if n == 0 {
        return PersistenceDiagram::default();
    }
    // Prim on the dense matrix; ties go to the lowest index
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut deaths = Vec::with_capacity(n.saturating_sub(1));
    in_tree[0] = true;
    for (j, b) in best.iter_mut().enumerate().skip(1) {
        *b = dist.get(0, j);
    }
    for _ in 1..n {
        let mut next = usize::MAX;
        let mut w = f64::INFINITY;
        for j in 0..n {
            if !in_tree[j] && (next == usize::MAX || best[j] < w) {
                next = j;
                w = best[j];
            }
        }
        in_tree[next] = true;
        deaths.push(w);
        let row = dist.row(next);
        for j in 0..n {
            if !in_tree[j] && row[j] < best[j] {
                best[j] = row[j];
            }
        }
    }
    deaths.sort_by(f64::total_cmp);
    PersistenceDiagram {
        points: deaths.into_iter().map(|w| (0.0, w)).collect(),
    }
}
