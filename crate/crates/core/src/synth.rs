//! Seeded synthetic spaces for tests, benches and desk-scale experiments.

use faer::Mat;
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::EmbeddingSpace;

/// Seeded RNG used throughout the crate's synthetic generators.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// n×d matrix of i.i.d. standard normal entries.
pub fn gaussian_matrix(n: usize, d: usize, seed: u64) -> Array2<f64> {
    let mut rng = rng(seed);
    Array2::from_shape_simple_fn((n, d), || StandardNormal.sample(&mut rng))
}

pub fn gaussian_space(lang: &str, n: usize, d: usize, seed: u64) -> EmbeddingSpace {
    EmbeddingSpace::from_matrix(lang, gaussian_matrix(n, d, seed)).expect("gaussian entries are finite")
}

/// Random d×d orthogonal matrix: the Q factor of a Gaussian matrix, with
/// column signs fixed so the distribution is Haar.
pub fn random_orthogonal(d: usize, seed: u64) -> Array2<f64> {
    let g = gaussian_matrix(d, d, seed);
    let m = Mat::from_fn(d, d, |i, j| g[[i, j]]);
    let q = crate::linalg::orthonormal_factor(m.as_ref());
    Array2::from_shape_fn((d, d), |(i, j)| q[(i, j)])
}

/// `space · m` with vocabulary and language kept.
pub fn transform(space: &EmbeddingSpace, m: &Array2<f64>, lang: &str) -> EmbeddingSpace {
    let x = space.matrix().dot(m);
    EmbeddingSpace::new(lang, space.vocab().to_vec(), x).expect("finite product")
}

/// Applies a Gaussian linear distortion `X (I + level·G/√d)` with `G` a d×d
/// standard normal matrix drawn from `seed`. `G/√d` has operator norm near
/// 2, so `level` is the noise magnitude relative to the identity; the
/// singular spectrum spreads steadily as it grows.
pub fn gaussian_distortion(space: &EmbeddingSpace, level: f64, seed: u64, lang: &str) -> EmbeddingSpace {
    let d = space.d();
    let mut m = gaussian_matrix(d, d, seed);
    let scale = level / (d as f64).sqrt();
    m.mapv_inplace(|v| v * scale);
    for i in 0..d {
        m[[i, i]] += 1.0;
    }
    transform(space, &m, lang)
}
