//! A single entry point for every dimensionality reducer.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::baselines::{self, BaselineConfig};
use crate::diffusion::{self, DmConfig};
use crate::error::{Error, Result};
use crate::matrix::{DataMatrix, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Dm,
    Pca,
    Lle,
    Lem,
    Identity,
}

impl Method {
    pub const REDUCERS: [Method; 4] = [Method::Pca, Method::Lle, Method::Lem, Method::Dm];

    pub fn name(self) -> &'static str {
        match self {
            Method::Dm => "DM",
            Method::Pca => "PCA",
            Method::Lle => "LLE",
            Method::Lem => "LEM",
            Method::Identity => "identity",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dm" | "diffusion" => Ok(Method::Dm),
            "pca" => Ok(Method::Pca),
            "lle" => Ok(Method::Lle),
            "lem" => Ok(Method::Lem),
            "identity" | "none" => Ok(Method::Identity),
            _ => Err(Error::InvalidParameter {
                name: "method",
                reason: alloc::format!("unknown method `{s}` (expected dm, pca, lle, lem or identity)"),
            }),
        }
    }
}

/// A reducer together with its full configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reducer {
    Identity,
    Dm(DmConfig),
    Pca { d: usize },
    Lle(BaselineConfig),
    Lem(BaselineConfig),
}

impl Reducer {
    pub fn method(&self) -> Method {
        match self {
            Reducer::Identity => Method::Identity,
            Reducer::Dm(_) => Method::Dm,
            Reducer::Pca { .. } => Method::Pca,
            Reducer::Lle(_) => Method::Lle,
            Reducer::Lem(_) => Method::Lem,
        }
    }

    /// Target dimension, `None` for the identity.
    pub fn target_dim(&self) -> Option<usize> {
        match self {
            Reducer::Identity => None,
            Reducer::Dm(c) => Some(c.d),
            Reducer::Pca { d } => Some(*d),
            Reducer::Lle(c) | Reducer::Lem(c) => Some(c.d),
        }
    }

    pub fn reduce(&self, data: &DataMatrix) -> Result<Embedding> {
        match self {
            Reducer::Identity => Ok(Embedding {
                coords: data.as_matrix().clone(),
                eigenvalues: Vec::new(),
                method: Method::Identity,
                config: *self,
            }),
            Reducer::Dm(c) => diffusion::embed(data, c),
            Reducer::Pca { d } => baselines::embed_pca(data, *d),
            Reducer::Lle(c) => baselines::embed_lle(data, c),
            Reducer::Lem(c) => baselines::embed_lem(data, c),
        }
    }

    /// `key=value` pairs describing the configuration, in a fixed order.
    pub fn describe(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        let _ = write!(s, "method={}", self.method());
        match self {
            Reducer::Identity => {}
            Reducer::Dm(c) => {
                let _ = write!(s, " d={} sigma={} t={}", c.d, c.sigma, c.t);
            }
            Reducer::Pca { d } => {
                let _ = write!(s, " d={d}");
            }
            Reducer::Lle(c) => {
                let _ = write!(s, " d={} knn={} lle_reg={}", c.d, c.k_nn, c.lle_reg);
            }
            Reducer::Lem(c) => {
                let _ = write!(s, " d={} knn={} lem_sigma=", c.d, c.k_nn);
                match c.lem_sigma {
                    Some(v) => {
                        let _ = write!(s, "{v}");
                    }
                    None => s.push_str("mean-knn-distance"),
                }
            }
        }
        s
    }
}

/// Reduced coordinates plus the spectrum that produced them.
///
/// `coords` is n×d with row `i` the image of input point `i`. The meaning of
/// `eigenvalues` depends on the method: retained transition eigenvalues for
/// diffusion maps (descending), component variances for PCA (descending),
/// retained bottom eigenvalues for LLE and Laplacian eigenmaps (ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub coords: Matrix,
    pub eigenvalues: Vec<f64>,
    pub method: Method,
    pub config: Reducer,
}

impl Embedding {
    pub fn n(&self) -> usize {
        self.coords.rows()
    }

    pub fn dim(&self) -> usize {
        self.coords.cols()
    }
}
