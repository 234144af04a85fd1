//! Subcommand implementations. Each returns an [`Output`] holding everything
//! it wants to write; nothing touches the file system until the whole
//! computation has succeeded.

mod annotate;
mod bench;
mod features;
mod reduce;
mod synth;

use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use manifold_core::baselines::{BaselineConfig, DEFAULT_KNN, DEFAULT_LLE_REG};
use manifold_core::diffusion::DmConfig;
use manifold_core::{Method, Reducer};

pub use annotate::{annotate, run_grid, ExperimentGrid, DEFAULT_DIMS, DEFAULT_KS};
pub use bench::{bench, machine_note, time_reduction, DEFAULT_BENCH_DIM};
pub use features::features;
pub use reduce::reduce;
pub use synth::{synth, DEFAULT_K_EVAL, DEFAULT_SYNTH_N};

use crate::cli::{Command, ReducerFlags};
use crate::config::Settings;
use crate::formats::write_atomic;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SIGMA: f64 = 1.0;

/// Files to write and text for standard output.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Output {
    pub files: Vec<(PathBuf, String)>,
    pub stdout: String,
}

impl Output {
    /// Sends `contents` to `path`, or to standard output when there is none.
    fn route(&mut self, path: Option<PathBuf>, contents: String) {
        match path {
            Some(p) => self.files.push((p, contents)),
            None => self.stdout.push_str(&contents),
        }
    }

    /// Writes every file atomically; on failure, files already written by
    /// this call are removed again.
    pub fn emit(&self) -> Result<()> {
        let mut written: Vec<&Path> = Vec::new();
        for (path, contents) in &self.files {
            if let Err(e) = write_atomic(path, contents) {
                for p in written {
                    let _ = std::fs::remove_file(p);
                }
                return Err(e);
            }
            written.push(path);
        }
        print!("{}", self.stdout);
        Ok(())
    }
}

pub fn run(command: Command) -> Result<Output> {
    match command {
        Command::Reduce(a) => reduce(&a),
        Command::Annotate(a) => annotate(&a),
        Command::Bench(a) => bench(&a),
        Command::Synth(a) => synth(&a),
        Command::Features(a) => features(&a),
    }
}

/// Reducer hyperparameters after applying config-file values and defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducerParams {
    pub sigma: f64,
    pub t: u32,
    /// `None` means 12, raised to `d + 1` for LLE so every grid dimension
    /// stays valid.
    pub knn: Option<usize>,
    pub lem_sigma: Option<f64>,
    pub lle_reg: f64,
}

impl ReducerParams {
    pub fn resolve(flags: &ReducerFlags, settings: &Settings) -> Result<Self> {
        Ok(ReducerParams {
            sigma: settings.value(flags.sigma, "sigma", DEFAULT_SIGMA)?,
            t: settings.value(flags.t, "t", 1)?,
            knn: settings.opt(flags.knn, "knn")?,
            lem_sigma: settings.opt(flags.lem_sigma, "lem-sigma")?,
            lle_reg: settings.value(flags.lle_reg, "lle-reg", DEFAULT_LLE_REG)?,
        })
    }

    pub fn reducer(&self, method: Method, d: usize) -> Reducer {
        let k_nn = match (self.knn, method) {
            (Some(k), _) => k,
            (None, Method::Lle) => DEFAULT_KNN.max(d + 1),
            (None, _) => DEFAULT_KNN,
        };
        let baseline = BaselineConfig {
            d,
            k_nn,
            lem_sigma: self.lem_sigma,
            lle_reg: self.lle_reg,
        };
        match method {
            Method::Identity => Reducer::Identity,
            Method::Dm => Reducer::Dm(DmConfig::new(self.sigma, d).with_t(self.t)),
            Method::Pca => Reducer::Pca { d },
            Method::Lle => Reducer::Lle(baseline),
            Method::Lem => Reducer::Lem(baseline),
        }
    }

    /// Header entries for every parameter.
    pub fn header(&self) -> Vec<(&'static str, String)> {
        vec![
            ("sigma", self.sigma.to_string()),
            ("t", self.t.to_string()),
            ("knn", self.knn.map_or_else(|| "auto".to_string(), |v| v.to_string())),
            (
                "lem-sigma",
                self.lem_sigma.map_or_else(|| "auto".to_string(), |v| v.to_string()),
            ),
            ("lle-reg", self.lle_reg.to_string()),
        ]
    }
}

/// A feature file named on the command line, as `kind=path` or `path`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSource {
    pub label: String,
    pub path: PathBuf,
}

impl std::str::FromStr for FeatureSource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            bail!("empty feature file argument");
        }
        let (label, path) = match s.split_once('=') {
            Some((label, path)) => (label.trim().to_string(), PathBuf::from(path.trim())),
            None => {
                let path = PathBuf::from(s);
                let label = path
                    .file_stem()
                    .map(|x| x.to_string_lossy().into_owned())
                    .unwrap_or_else(|| s.to_string());
                (label, path)
            }
        };
        if label.is_empty() || path.as_os_str().is_empty() {
            bail!("bad feature file argument `{s}` (expected kind=path)");
        }
        Ok(FeatureSource { label, path })
    }
}

fn feature_sources(flag: &[String], settings: &Settings) -> Result<Vec<FeatureSource>> {
    let raw: Vec<String> = settings.list(flag, "features", &[])?;
    if raw.is_empty() {
        bail!("no feature files given (use --features kind=path)");
    }
    let sources = raw.iter().map(|s| s.parse()).collect::<Result<Vec<FeatureSource>>>()?;
    for (i, a) in sources.iter().enumerate() {
        if sources[..i].iter().any(|b| b.label == a.label) {
            bail!("feature label `{}` given twice", a.label);
        }
    }
    Ok(sources)
}

/// Checks a feature table against the length its label promises.
fn check_feature_dim(source: &FeatureSource, dim: usize) -> Result<()> {
    if let Ok(kind) = source.label.parse::<manifold_core::features::FeatureKind>() {
        if kind.len() != dim {
            bail!(
                "{} holds {dim}-D rows but `{}` descriptors are {}-D",
                source.path.display(),
                source.label,
                kind.len()
            );
        }
    }
    Ok(())
}

fn join_list<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}
