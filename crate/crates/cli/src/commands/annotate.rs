use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use manifold_core::annotation::{
    annotate_split, prune_and_split, reduce_split, LabeledDataset, OutOfSample, SplitDataset, DEFAULT_PRUNE_MIN,
};
use manifold_core::Method;
use rayon::prelude::*;

use super::{
    check_feature_dim, feature_sources, join_list, path_string, FeatureSource, Output, ReducerParams, DEFAULT_SEED,
};
use crate::cli::AnnotateArgs;
use crate::config::Settings;
use crate::formats::{header_line, missing_ids, read_feature_file, read_labels, read_vocabulary, LabelTable};
use crate::results::{AnnotationRow, Table};

pub const DEFAULT_DIMS: [usize; 5] = [10, 20, 30, 40, 50];
pub const DEFAULT_KS: [usize; 1] = [8];

const MISSING_ID_LIMIT: usize = 10;

/// Sweep parameters of an annotation experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub methods: Vec<Method>,
    pub dims: Vec<usize>,
    pub ks: Vec<usize>,
    pub params: ReducerParams,
    pub seed: u64,
    pub prune_min: usize,
    pub oos: OutOfSample,
}

impl ExperimentGrid {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            bail!("the method list is empty");
        }
        if self.dims.is_empty() {
            bail!("the dimension list is empty");
        }
        if self.ks.is_empty() {
            bail!("the neighbor-count list is empty");
        }
        if self.dims.contains(&0) {
            bail!("every target dimension must be at least 1");
        }
        if self.ks.contains(&0) {
            bail!("every neighbor count must be at least 1");
        }
        Ok(())
    }

    /// Distinct (method, d) reductions; the identity ignores `d`.
    fn reductions(&self) -> Vec<(Method, Option<usize>)> {
        let mut cells = Vec::new();
        for &m in &self.methods {
            if m == Method::Identity {
                cells.push((m, None));
            } else {
                cells.extend(self.dims.iter().map(|&d| (m, Some(d))));
            }
        }
        cells.sort_unstable();
        cells.dedup();
        cells
    }
}

/// Joins a feature file to the labels, failing on ids present in only one.
fn join(source: &FeatureSource, labels: &LabelTable, vocab: &[String]) -> Result<LabeledDataset> {
    let table = read_feature_file(&source.path)?;
    check_feature_dim(source, table.dim())?;
    let no_labels = missing_ids(&table.ids, &labels.ids, MISSING_ID_LIMIT);
    if !no_labels.is_empty() {
        bail!(
            "{} has ids without a label line (first {}): {}",
            source.path.display(),
            no_labels.len(),
            no_labels.join(", ")
        );
    }
    let no_features = missing_ids(&labels.ids, &table.ids, MISSING_ID_LIMIT);
    if !no_features.is_empty() {
        bail!(
            "label file has ids missing from {} (first {}): {}",
            source.path.display(),
            no_features.len(),
            no_features.join(", ")
        );
    }
    let table = table.reorder(&labels.ids)?;
    Ok(LabeledDataset::new(
        table.ids,
        table.data,
        labels.labels.clone(),
        vocab.to_vec(),
    )?)
}

/// Runs every cell of `grid` on one split; rows come back sorted.
pub fn run_grid(splits: &[(String, SplitDataset)], grid: &ExperimentGrid) -> Result<Vec<AnnotationRow>> {
    grid.validate()?;
    let jobs: Vec<(&str, &SplitDataset, Method, Option<usize>)> = splits
        .iter()
        .flat_map(|(label, split)| {
            grid.reductions()
                .into_iter()
                .map(move |(m, d)| (label.as_str(), split, m, d))
        })
        .collect();
    let per_job: Vec<Vec<AnnotationRow>> = jobs
        .par_iter()
        .map(|&(label, split, method, d)| {
            let d = d.unwrap_or(split.train.features().dim());
            let reducer = grid.params.reducer(method, d);
            let (train, test) =
                reduce_split(split, &reducer, grid.oos).with_context(|| format!("{method} at d={d} on `{label}`"))?;
            grid.ks
                .iter()
                .map(|&k| {
                    let report = annotate_split(split, &train, &test, k, reducer, grid.oos)
                        .with_context(|| format!("{method} at d={d}, k={k} on `{label}`"))?;
                    Ok(AnnotationRow {
                        method,
                        feature: label.to_string(),
                        d,
                        k,
                        oos: grid.oos.to_string(),
                        mean_ap: report.mean_average_precision,
                        precision_at_5: report.precision_at_5,
                        recall_at_5: report.recall_at_5,
                        n_train: split.train.len(),
                        n_test: split.test.len(),
                        n_evaluated: report.evaluated,
                        n_skipped: report.skipped,
                        n_pruned: split.pruned,
                        seed: split.seed,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<AnnotationRow> = per_job.into_iter().flatten().collect();
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(rows)
}

/// One CSV row per (method, feature, d, k) cell.
pub fn annotate(args: &AnnotateArgs) -> Result<Output> {
    let settings = Settings::new(args.config.as_deref())?;
    let sources = feature_sources(&args.features, &settings)?;
    let labels_path: PathBuf = settings.required(args.labels.clone(), "labels")?;
    let vocab_path: PathBuf = settings.required(args.vocab.clone(), "vocab")?;
    let oos_raw: String = settings.value(args.oos.clone(), "oos", "transductive".to_string())?;
    let grid = ExperimentGrid {
        methods: settings.list(&args.method, "method", &Method::REDUCERS)?,
        dims: settings.list(&args.dim, "dim", &DEFAULT_DIMS)?,
        ks: settings.list(&args.k, "k", &DEFAULT_KS)?,
        params: ReducerParams::resolve(&args.reducer, &settings)?,
        seed: settings.value(args.seed, "seed", DEFAULT_SEED)?,
        prune_min: settings.value(args.prune_min, "prune-min", DEFAULT_PRUNE_MIN)?,
        oos: oos_raw.parse()?,
    };
    grid.validate()?;
    let out: Option<PathBuf> = settings.opt(args.out.clone(), "out")?;

    let labels = read_labels(&labels_path)?;
    let vocab = read_vocabulary(&vocab_path)?;
    let mut splits = Vec::with_capacity(sources.len());
    for source in &sources {
        let data = join(source, &labels, &vocab)?;
        let split = prune_and_split(&data, grid.prune_min, grid.seed)?;
        splits.push((source.label.clone(), split));
    }
    let rows = run_grid(&splits, &grid)?;

    let mut entries = vec![
        (
            "features",
            sources
                .iter()
                .map(|s| format!("{}={}", s.label, path_string(&s.path)))
                .collect::<Vec<_>>()
                .join(","),
        ),
        ("labels", path_string(&labels_path)),
        ("vocab", path_string(&vocab_path)),
        ("method", join_list(&grid.methods)),
        ("dim", join_list(&grid.dims)),
        ("k", join_list(&grid.ks)),
    ];
    entries.extend(grid.params.header());
    entries.push(("prune-min", grid.prune_min.to_string()));
    entries.push(("oos", grid.oos.to_string()));
    entries.push(("seed", grid.seed.to_string()));
    let header = header_line("annotate", &entries);
    let table = Table::new(vec![header.trim_end().to_string()], rows);

    let mut output = Output::default();
    output.route(out, table.to_csv()?);
    Ok(output)
}
