//! CSV result tables: annotation grid rows and timing records.
//!
//! Files start with `#` header lines, then a column header, then data rows.
//! Reals use [`format_real`], so reading a table and writing it back
//! reproduces the original bytes.

use anyhow::{anyhow, bail, Context, Result};
use csv::StringRecord;
use manifold_core::Method;

use crate::formats::format_real;

/// A parsed CSV table: leading `#` lines and typed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table<R> {
    pub comments: Vec<String>,
    pub rows: Vec<R>,
}

/// A row type with a fixed column layout.
pub trait CsvRow: Sized {
    const COLUMNS: &'static [&'static str];
    fn to_fields(&self) -> Vec<String>;
    fn from_fields(record: &StringRecord) -> Result<Self>;
}

impl<R: CsvRow> Table<R> {
    pub fn new(comments: Vec<String>, rows: Vec<R>) -> Self {
        Table { comments, rows }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str(c);
            out.push('\n');
        }
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(R::COLUMNS)?;
        for row in &self.rows {
            w.write_record(row.to_fields())?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow!(e.to_string()))?;
        out.push_str(std::str::from_utf8(&bytes)?);
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let comments: Vec<String> = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(str::to_string)
            .collect();
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header = r.headers()?.clone();
        if header.iter().ne(R::COLUMNS.iter().copied()) {
            bail!("unexpected columns `{}`", header.iter().collect::<Vec<_>>().join(","));
        }
        let mut rows = Vec::new();
        for (i, record) in r.records().enumerate() {
            let record = record?;
            rows.push(R::from_fields(&record).with_context(|| format!("data row {}", i + 1))?);
        }
        Ok(Table { comments, rows })
    }
}

fn field<T: std::str::FromStr>(record: &StringRecord, index: usize, name: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = record.get(index).ok_or_else(|| anyhow!("missing column `{name}`"))?;
    raw.parse()
        .map_err(|e| anyhow!("column `{name}`: cannot parse `{raw}`: {e}"))
}

/// One cell of an annotation experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRow {
    pub method: Method,
    pub feature: String,
    pub d: usize,
    pub k: usize,
    pub oos: String,
    pub mean_ap: f64,
    pub precision_at_5: f64,
    pub recall_at_5: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub n_evaluated: usize,
    pub n_skipped: usize,
    pub n_pruned: usize,
    pub seed: u64,
}

impl AnnotationRow {
    /// Emission order: method, feature, d, k.
    pub fn sort_key(&self) -> (Method, &str, usize, usize) {
        (self.method, self.feature.as_str(), self.d, self.k)
    }
}

impl CsvRow for AnnotationRow {
    const COLUMNS: &'static [&'static str] = &[
        "method",
        "feature",
        "d",
        "k",
        "oos",
        "mean_ap",
        "precision_at_5",
        "recall_at_5",
        "n_train",
        "n_test",
        "n_evaluated",
        "n_skipped",
        "n_pruned",
        "seed",
    ];

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.method.to_string(),
            self.feature.clone(),
            self.d.to_string(),
            self.k.to_string(),
            self.oos.clone(),
            format_real(self.mean_ap),
            format_real(self.precision_at_5),
            format_real(self.recall_at_5),
            self.n_train.to_string(),
            self.n_test.to_string(),
            self.n_evaluated.to_string(),
            self.n_skipped.to_string(),
            self.n_pruned.to_string(),
            self.seed.to_string(),
        ]
    }

    fn from_fields(r: &StringRecord) -> Result<Self> {
        if r.len() != Self::COLUMNS.len() {
            bail!("expected {} fields, found {}", Self::COLUMNS.len(), r.len());
        }
        Ok(AnnotationRow {
            method: field(r, 0, "method")?,
            feature: field(r, 1, "feature")?,
            d: field(r, 2, "d")?,
            k: field(r, 3, "k")?,
            oos: field(r, 4, "oos")?,
            mean_ap: field(r, 5, "mean_ap")?,
            precision_at_5: field(r, 6, "precision_at_5")?,
            recall_at_5: field(r, 7, "recall_at_5")?,
            n_train: field(r, 8, "n_train")?,
            n_test: field(r, 9, "n_test")?,
            n_evaluated: field(r, 10, "n_evaluated")?,
            n_skipped: field(r, 11, "n_skipped")?,
            n_pruned: field(r, 12, "n_pruned")?,
            seed: field(r, 13, "seed")?,
        })
    }
}

/// Wall-clock time of one reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub method: Method,
    pub feature: String,
    pub d: usize,
    pub n: usize,
    pub seconds: f64,
    pub machine: String,
}

impl CsvRow for BenchRecord {
    const COLUMNS: &'static [&'static str] = &["method", "feature", "d", "n", "seconds", "machine"];

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.method.to_string(),
            self.feature.clone(),
            self.d.to_string(),
            self.n.to_string(),
            format_real(self.seconds),
            self.machine.clone(),
        ]
    }

    fn from_fields(r: &StringRecord) -> Result<Self> {
        if r.len() != Self::COLUMNS.len() {
            bail!("expected {} fields, found {}", Self::COLUMNS.len(), r.len());
        }
        Ok(BenchRecord {
            method: field(r, 0, "method")?,
            feature: field(r, 1, "feature")?,
            d: field(r, 2, "d")?,
            n: field(r, 3, "n")?,
            seconds: field(r, 4, "seconds")?,
            machine: field(r, 5, "machine")?,
        })
    }
}
