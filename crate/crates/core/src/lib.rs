//! Spectral dimensionality reduction and KNN image annotation.
//!
//! The crate is `no_std` (it only needs `alloc`) and contains every numerical
//! piece of the pipeline:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`numerics`] | pairwise distances, dense symmetric eigensolver, seeded RNG |
//! | [`diffusion`] | Gaussian kernel, Markov operator, diffusion distance, diffusion-map embedding |
//! | [`baselines`] | PCA, locally linear embedding, Laplacian eigenmaps |
//! | [`synthetic`] | swiss roll and punctured sphere generators, neighborhood preservation score |
//! | [`features`] | edge direction histogram, HSV auto-correlogram, LAB block color moments |
//! | [`annotation`] | labeled datasets, prune/split, KNN annotator, average precision |
//! | [`reducer`] | one enum dispatching to every reducer |
//!
//! File formats, the CLI and timing live in the `manifold-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod annotation;
pub mod baselines;
pub mod diffusion;
mod error;
pub mod features;
mod matrix;
pub mod numerics;
pub mod reducer;
pub mod synthetic;

pub use error::{Error, Result};
pub use matrix::{DataMatrix, Matrix};
pub use reducer::{Embedding, Method, Reducer};
