//! Dense numerical kernels shared by every reducer.

mod distance;
mod eigen;
mod rng;

pub use distance::{nearest_rows, nearest_to, pairwise_sq_dists, sq_dist};
pub use eigen::{bottom_eigenpairs, symmetric_eigen, top_eigenpairs, SpectralDecomposition};
pub use rng::{seeded_rng, SeededRng};

pub(crate) use eigen::fix_sign;
