//! Spectral isomorphism measures between word embedding spaces.
//!
//! The crate is organised as a pipeline:
//!
//! * [`embedio`] loads word2vec-style text files into an [`EmbeddingSpace`]
//!   and applies the canonical preprocessing (length normalization, then
//!   mean centering).
//! * [`spectral`] computes the singular spectrum of a space and its summary
//!   statistics: entropy, effective rank, condition number and effective
//!   condition number.
//! * [`measures`] combines two spectra into pairwise distances (SVG,
//!   COND-HM, ECOND-HM) and runs batches over many spaces.
//! * [`baselines`] implements the isospectrality (IS) and Gromov-Hausdorff
//!   (GH) baselines on nearest-neighbour graphs and H0 persistence diagrams.
//! * [`analysis`] correlates distances with task performance tables, runs
//!   forward stepwise regression and source/target selection analyses.
//!
//! Data-parallel loops go through [`par::Exec`]. With the default `parallel`
//! feature they run on rayon; without it everything runs sequentially.
//! Results never depend on the number of worker threads.

pub mod analysis;
pub mod baselines;
pub mod embedio;
mod error;
mod linalg;
pub mod measures;
pub mod numfmt;
pub mod par;
pub mod spectral;
pub mod synth;

pub use embedio::{EmbeddingSpace, Preprocessing};
pub use error::{Error, Result};
pub use measures::{Measure, PairScore};
pub use par::Exec;
pub use spectral::{Spectrum, SpectrumStats};
