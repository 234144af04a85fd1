//! Multi-label image annotation by k-nearest neighbors, and its evaluation.
//!
//! A test image is annotated with the labels that occur most often among its
//! `k` nearest training images (Euclidean distance in whatever space the
//! features were reduced to). Every vocabulary label is ranked, so the full
//! ranking can be scored with ranking average precision; the first five labels
//! are the image's keywords.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::diffusion::nystrom_extend;
use crate::error::{Error, Result};
use crate::features::FeatureKind;
use crate::matrix::{DataMatrix, Matrix};
use crate::numerics::{nearest_to, seeded_rng};
use crate::reducer::Reducer;

/// Keywords emitted per test image.
pub const KEYWORDS_PER_IMAGE: usize = 5;

/// Default minimum number of labels an image needs to survive pruning.
pub const DEFAULT_PRUNE_MIN: usize = 5;

/// Feature rows with their image ids and label sets over a vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    ids: Vec<String>,
    features: DataMatrix,
    labels: Vec<Vec<usize>>,
    vocabulary: Vec<String>,
}

impl LabeledDataset {
    /// Label lists are sorted and deduplicated.
    pub fn new(
        ids: Vec<String>,
        features: DataMatrix,
        labels: Vec<Vec<usize>>,
        vocabulary: Vec<String>,
    ) -> Result<Self> {
        let n = features.n();
        if ids.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: ids.len(),
            });
        }
        if labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: labels.len(),
            });
        }
        let mut clean = Vec::with_capacity(n);
        for (image, mut set) in labels.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            if let Some(&label) = set.iter().find(|&&l| l >= vocabulary.len()) {
                return Err(Error::LabelOutOfRange {
                    image,
                    label,
                    vocabulary: vocabulary.len(),
                });
            }
            clean.push(set);
        }
        Ok(LabeledDataset {
            ids,
            features,
            labels: clean,
            vocabulary,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn features(&self) -> &DataMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    /// The rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            vocabulary: self.vocabulary.clone(),
        }
    }

    /// Number of images carrying each label.
    pub fn label_frequencies(&self) -> Vec<usize> {
        label_frequencies(&self.labels, self.vocabulary.len())
    }
}

fn label_frequencies(labels: &[Vec<usize>], vocabulary: usize) -> Vec<usize> {
    let mut freq = vec![0; vocabulary];
    for set in labels {
        for &l in set {
            freq[l] += 1;
        }
    }
    freq
}

/// Disjoint train and test halves of a pruned data set.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitDataset {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    pub seed: u64,
    pub prune_min: usize,
    /// Images removed by pruning.
    pub pruned: usize,
}

/// Drops images with fewer than `prune_min` labels, shuffles the rest with
/// `seed` and splits them in half (the training half gets the odd one out).
/// Each half keeps the original relative order of its images.
pub fn prune_and_split(data: &LabeledDataset, prune_min: usize, seed: u64) -> Result<SplitDataset> {
    let mut keep: Vec<usize> = (0..data.len()).filter(|&i| data.labels[i].len() >= prune_min).collect();
    if keep.len() < 2 {
        return Err(Error::TooFewAfterPruning {
            total: data.len(),
            remaining: keep.len(),
            prune_min,
        });
    }
    let pruned = data.len() - keep.len();
    seeded_rng(seed).shuffle(&mut keep);
    let n_train = keep.len() - keep.len() / 2;
    let (train, test) = keep.split_at_mut(n_train);
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitDataset {
        train: data.select(train),
        test: data.select(test),
        seed,
        prune_min,
        pruned,
    })
}

/// A label with its neighbor vote count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankedLabel {
    pub label: usize,
    pub score: u32,
}

/// KNN voting over a fixed training set.
#[derive(Debug, Clone)]
pub struct KnnAnnotator<'a> {
    coords: &'a Matrix,
    labels: &'a [Vec<usize>],
    frequency: Vec<usize>,
}

impl<'a> KnnAnnotator<'a> {
    /// `coords` row `i` is training image `i`, labeled `labels[i]`.
    pub fn new(coords: &'a Matrix, labels: &'a [Vec<usize>], vocabulary: usize) -> Result<Self> {
        if coords.rows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: coords.rows(),
                found: labels.len(),
            });
        }
        for (image, set) in labels.iter().enumerate() {
            if let Some(&label) = set.iter().find(|&&l| l >= vocabulary) {
                return Err(Error::LabelOutOfRange {
                    image,
                    label,
                    vocabulary,
                });
            }
        }
        Ok(KnnAnnotator {
            coords,
            labels,
            frequency: label_frequencies(labels, vocabulary),
        })
    }

    /// Indices of the `k` nearest training rows; distance ties keep the lower index.
    pub fn neighbors(&self, query: &[f64], k: usize) -> Result<Vec<usize>> {
        if query.len() != self.coords.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.coords.cols(),
                found: query.len(),
            });
        }
        if k == 0 || k > self.coords.rows() {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: format!("need 1 <= k <= {} training images, got {k}", self.coords.rows()),
            });
        }
        Ok(nearest_to(self.coords, query, k, None))
    }

    /// Every vocabulary label ranked by neighbor votes, then by training
    /// frequency (descending), then by label index.
    pub fn annotate(&self, query: &[f64], k: usize) -> Result<Vec<RankedLabel>> {
        let mut votes = vec![0u32; self.frequency.len()];
        for i in self.neighbors(query, k)? {
            for &l in &self.labels[i] {
                votes[l] += 1;
            }
        }
        let mut ranked: Vec<RankedLabel> = votes
            .iter()
            .enumerate()
            .map(|(label, &score)| RankedLabel { label, score })
            .collect();
        ranked.sort_by(|a, b| {
            b.score
                .cmp(&a.score)
                .then(self.frequency[b.label].cmp(&self.frequency[a.label]))
                .then(a.label.cmp(&b.label))
        });
        Ok(ranked)
    }
}

/// Ranks the vocabulary for one query against a labeled training set.
pub fn knn_annotate(train: &LabeledDataset, query: &[f64], k: usize) -> Result<Vec<RankedLabel>> {
    KnnAnnotator::new(train.features.as_matrix(), &train.labels, train.vocabulary.len())?.annotate(query, k)
}

/// The first `count` labels of a ranking.
pub fn top_keywords(ranked: &[RankedLabel], count: usize) -> Vec<usize> {
    ranked.iter().take(count).map(|r| r.label).collect()
}

/// Ranking average precision of `ranked` against the ground truth:
///
/// ```text
/// AP = (1/|truth|) Σ_{ℓ ∈ truth} |{ℓ' ∈ truth : rank(ℓ') ≤ rank(ℓ)}| / rank(ℓ)
/// ```
///
/// with 1-based ranks. `None` when `truth` is empty. A truth label missing from
/// the ranking contributes 0.
pub fn average_precision(ranked: &[usize], truth: &[usize]) -> Option<f64> {
    if truth.is_empty() {
        return None;
    }
    let mut truth_sorted = truth.to_vec();
    truth_sorted.sort_unstable();
    truth_sorted.dedup();
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (pos, label) in ranked.iter().enumerate() {
        if truth_sorted.binary_search(label).is_ok() {
            hits += 1;
            sum += hits as f64 / (pos + 1) as f64;
        }
    }
    Some(sum / truth_sorted.len() as f64)
}

/// How test points get their reduced coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutOfSample {
    /// Reduce train and test features together.
    #[default]
    Transductive,
    /// Fit on the training half only and map test points through the
    /// method's out-of-sample formula (Nyström for DM, projection for PCA).
    Nystrom,
}

impl fmt::Display for OutOfSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutOfSample::Transductive => "transductive",
            OutOfSample::Nystrom => "nystrom",
        })
    }
}

impl core::str::FromStr for OutOfSample {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transductive" | "none" => Ok(OutOfSample::Transductive),
            "nystrom" => Ok(OutOfSample::Nystrom),
            _ => Err(Error::InvalidParameter {
                name: "oos",
                reason: format!("unknown out-of-sample mode `{s}` (expected transductive or nystrom)"),
            }),
        }
    }
}

/// Reduced coordinates for the train and test halves of a split.
pub fn reduce_split(split: &SplitDataset, reducer: &Reducer, oos: OutOfSample) -> Result<(Matrix, Matrix)> {
    let train = split.train.features();
    let test = split.test.features();
    match (oos, reducer) {
        (_, Reducer::Identity) => Ok((train.as_matrix().clone(), test.as_matrix().clone())),
        (OutOfSample::Transductive, _) => {
            let joint = train.vstack(test)?;
            let coords = reducer.reduce(&joint)?.coords;
            let n_train = train.n();
            let train_rows: Vec<usize> = (0..n_train).collect();
            let test_rows: Vec<usize> = (n_train..joint.n()).collect();
            Ok((coords.select_rows(&train_rows), coords.select_rows(&test_rows)))
        }
        (OutOfSample::Nystrom, Reducer::Dm(_)) => {
            let emb = reducer.reduce(train)?;
            let ext = nystrom_extend(&emb, train, test)?;
            Ok((emb.coords, ext.coords))
        }
        (OutOfSample::Nystrom, Reducer::Pca { d }) => {
            let fit = crate::baselines::fit_pca(train, *d)?;
            Ok((fit.transform(train)?, fit.transform(test)?))
        }
        (OutOfSample::Nystrom, other) => Err(Error::InvalidParameter {
            name: "oos",
            reason: format!(
                "{} has no out-of-sample map; use transductive reduction",
                other.method()
            ),
        }),
    }
}

/// Annotation outcome for one test image.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageAnnotation {
    pub id: String,
    pub ranked: Vec<RankedLabel>,
    pub keywords: Vec<usize>,
    /// `None` when the image has no ground-truth labels.
    pub average_precision: Option<f64>,
}

/// Per-image annotations and aggregate scores for one pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationReport {
    pub images: Vec<ImageAnnotation>,
    pub mean_average_precision: f64,
    pub precision_at_5: f64,
    pub recall_at_5: f64,
    /// Test images that entered the averages.
    pub evaluated: usize,
    /// Test images without ground truth, left out of the averages.
    pub skipped: usize,
    pub k: usize,
    pub reducer: Reducer,
    pub out_of_sample: OutOfSample,
    pub feature: Option<FeatureKind>,
}

/// Annotates every test image from precomputed coordinates.
pub fn annotate_split(
    split: &SplitDataset,
    train_coords: &Matrix,
    test_coords: &Matrix,
    k: usize,
    reducer: Reducer,
    out_of_sample: OutOfSample,
) -> Result<AnnotationReport> {
    if test_coords.rows() != split.test.len() {
        return Err(Error::DimensionMismatch {
            expected: split.test.len(),
            found: test_coords.rows(),
        });
    }
    let vocabulary = split.train.vocabulary().len();
    let annotator = KnnAnnotator::new(train_coords, split.train.labels(), vocabulary)?;
    let keyword_count = KEYWORDS_PER_IMAGE.min(vocabulary);
    let mut images = Vec::with_capacity(split.test.len());
    let (mut ap_sum, mut p_sum, mut r_sum) = (0.0, 0.0, 0.0);
    let mut evaluated = 0;
    for (i, truth) in split.test.labels().iter().enumerate() {
        let ranked = annotator.annotate(test_coords.row(i), k)?;
        let keywords = top_keywords(&ranked, keyword_count);
        let order: Vec<usize> = ranked.iter().map(|r| r.label).collect();
        let ap = average_precision(&order, truth);
        if let Some(ap) = ap {
            let correct = keywords.iter().filter(|l| truth.binary_search(l).is_ok()).count() as f64;
            ap_sum += ap;
            if keyword_count > 0 {
                p_sum += correct / keyword_count as f64;
            }
            r_sum += correct / truth.len() as f64;
            evaluated += 1;
        }
        images.push(ImageAnnotation {
            id: split.test.ids()[i].clone(),
            ranked,
            keywords,
            average_precision: ap,
        });
    }
    let mean = |s: f64| if evaluated > 0 { s / evaluated as f64 } else { 0.0 };
    Ok(AnnotationReport {
        skipped: images.len() - evaluated,
        images,
        mean_average_precision: mean(ap_sum),
        precision_at_5: mean(p_sum),
        recall_at_5: mean(r_sum),
        evaluated,
        k,
        reducer,
        out_of_sample,
        feature: None,
    })
}

/// Reduces the split's features, annotates every test image and aggregates
/// mean average precision, precision@5 and recall@5.
pub fn evaluate_pipeline(
    split: &SplitDataset,
    reducer: &Reducer,
    k: usize,
    oos: OutOfSample,
) -> Result<AnnotationReport> {
    let (train, test) = reduce_split(split, reducer, oos)?;
    annotate_split(split, &train, &test, k, *reducer, oos)
}
