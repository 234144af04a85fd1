//! Plain-text file formats: feature lines, label and vocabulary files, binary
//! PPM images, and the `#` header every emitted file starts with.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use manifold_core::features::RgbImage;
use manifold_core::{DataMatrix, Matrix};

pub const TOOL_NAME: &str = "manifold";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Real numbers are written with 17 significant digits, enough to recover
/// every `f64` exactly.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// `# manifold <version> <command> key=value ...`, newline-terminated.
/// Values containing whitespace are quoted.
pub fn header_line(command: &str, settings: &[(&str, String)]) -> String {
    let mut line = format!("# {TOOL_NAME} {TOOL_VERSION} {command}");
    for (key, value) in settings {
        if value.is_empty() || value.chars().any(char::is_whitespace) {
            let _ = write!(line, " {key}={value:?}");
        } else {
            let _ = write!(line, " {key}={value}");
        }
    }
    line.push('\n');
    line
}

/// Writes through a temporary file in the same directory and renames it into
/// place, so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|_| tmp.flush())
        .with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path)
        .map_err(|e| anyhow!(e.error))
        .with_context(|| format!("moving output into place at {}", path.display()))?;
    Ok(())
}

fn read_text(path: &Path, what: &str) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {what} {}", path.display()))
}

fn is_skipped(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

/// Rows of a feature file keyed by image id, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub ids: Vec<String>,
    pub data: DataMatrix,
}

impl FeatureTable {
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    /// Rows reordered to follow `order`, which must be a permutation of the ids.
    pub fn reorder(&self, order: &[String]) -> Result<FeatureTable> {
        let index: HashMap<&str, usize> = self.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let rows = order
            .iter()
            .map(|id| {
                index
                    .get(id.as_str())
                    .copied()
                    .ok_or_else(|| anyhow!("unknown id `{id}`"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FeatureTable {
            ids: order.to_vec(),
            data: self.data.select_rows(&rows),
        })
    }
}

/// Parses `<id> v1 ... vk` lines. Blank lines and `#` lines are skipped;
/// errors name the 1-based line number.
pub fn parse_feature_lines(text: &str) -> Result<FeatureTable> {
    let mut ids = Vec::new();
    let mut values = Vec::new();
    let mut seen = HashSet::new();
    let mut dim = None;
    for (lineno, line) in text.lines().enumerate() {
        if is_skipped(line) {
            continue;
        }
        let lineno = lineno + 1;
        let mut fields = line.split_whitespace();
        let id = fields.next().expect("non-blank line has a field");
        let row = fields
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| anyhow!("line {lineno}: `{f}` is not a finite number"))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.is_empty() {
            bail!("line {lineno}: image `{id}` has no feature values");
        }
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                bail!("line {lineno}: expected {d} values, found {}", row.len())
            }
            Some(_) => {}
        }
        if !seen.insert(id.to_string()) {
            bail!("line {lineno}: duplicate image id `{id}`");
        }
        ids.push(id.to_string());
        values.extend(row);
    }
    let Some(dim) = dim else {
        bail!("no feature lines found");
    };
    let data = DataMatrix::new(ids.len(), dim, values)?;
    Ok(FeatureTable { ids, data })
}

pub fn read_feature_file(path: &Path) -> Result<FeatureTable> {
    let text = read_text(path, "feature file")?;
    parse_feature_lines(&text).with_context(|| format!("in feature file {}", path.display()))
}

/// `<id> v1 ... vk` lines for the rows of `values`.
pub fn format_rows(ids: &[String], values: &Matrix) -> String {
    let mut out = String::new();
    for (i, id) in ids.iter().enumerate() {
        out.push_str(id);
        for &v in values.row(i) {
            out.push(' ');
            out.push_str(&format_real(v));
        }
        out.push('\n');
    }
    out
}

/// Label sets keyed by image id, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTable {
    pub ids: Vec<String>,
    pub labels: Vec<Vec<usize>>,
}

impl LabelTable {
    pub fn get(&self, id: &str) -> Option<&[usize]> {
        self.ids.iter().position(|x| x == id).map(|i| self.labels[i].as_slice())
    }
}

/// Parses `<id> <concept-index> ...` lines; an id may have no labels.
pub fn parse_labels(text: &str) -> Result<LabelTable> {
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, line) in text.lines().enumerate() {
        if is_skipped(line) {
            continue;
        }
        let lineno = lineno + 1;
        let mut fields = line.split_whitespace();
        let id = fields.next().expect("non-blank line has a field");
        let set = fields
            .map(|f| {
                f.parse::<usize>()
                    .map_err(|_| anyhow!("line {lineno}: `{f}` is not a concept index"))
            })
            .collect::<Result<Vec<usize>>>()?;
        if !seen.insert(id.to_string()) {
            bail!("line {lineno}: duplicate image id `{id}`");
        }
        ids.push(id.to_string());
        labels.push(set);
    }
    Ok(LabelTable { ids, labels })
}

pub fn read_labels(path: &Path) -> Result<LabelTable> {
    let text = read_text(path, "label file")?;
    parse_labels(&text).with_context(|| format!("in label file {}", path.display()))
}

/// One concept name per line; line `i` (0-based) is concept `i`.
pub fn parse_vocabulary(text: &str) -> Result<Vec<String>> {
    let names: Vec<String> = text.lines().map(|l| l.trim().to_string()).collect();
    if let Some(i) = names.iter().position(String::is_empty) {
        bail!("line {}: empty concept name", i + 1);
    }
    if names.is_empty() {
        bail!("vocabulary is empty");
    }
    Ok(names)
}

pub fn read_vocabulary(path: &Path) -> Result<Vec<String>> {
    let text = read_text(path, "vocabulary file")?;
    parse_vocabulary(&text).with_context(|| format!("in vocabulary file {}", path.display()))
}

/// Ids present in `expected` but absent from `found`, at most `limit` of them.
pub fn missing_ids<'a>(expected: &'a [String], found: &[String], limit: usize) -> Vec<&'a str> {
    let have: HashSet<&str> = found.iter().map(String::as_str).collect();
    expected
        .iter()
        .map(String::as_str)
        .filter(|id| !have.contains(id))
        .take(limit)
        .collect()
}

/// Decodes a binary (P6) PPM with 8-bit samples.
pub fn parse_ppm(bytes: &[u8]) -> Result<RgbImage> {
    let mut pos = 0;
    let mut token = || -> Result<&[u8]> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            bail!("truncated PPM header");
        }
        Ok(&bytes[start..pos])
    };
    if token()? != b"P6" {
        bail!("not a binary PPM (expected magic `P6`)");
    }
    let mut number = |what: &str| -> Result<usize> {
        let t = token()?;
        std::str::from_utf8(t)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| anyhow!("bad PPM {what} `{}`", String::from_utf8_lossy(t)))
    };
    let width = number("width")?;
    let height = number("height")?;
    let maxval = number("maxval")?;
    if !(1..=255).contains(&maxval) {
        bail!("unsupported PPM maxval {maxval} (only 8-bit samples are supported)");
    }
    // Exactly one whitespace byte separates the header from the raster.
    let raster = &bytes[(pos + 1).min(bytes.len())..];
    let need = width
        .checked_mul(height)
        .and_then(|p| p.checked_mul(3))
        .ok_or_else(|| anyhow!("PPM dimensions overflow"))?;
    if raster.len() < need {
        bail!("PPM raster has {} bytes, expected {need}", raster.len());
    }
    let raster = &raster[..need];
    let img = if maxval == 255 {
        RgbImage::from_raw(width, height, raster)?
    } else {
        let scaled: Vec<u8> = raster
            .iter()
            .map(|&v| ((v.min(maxval as u8) as usize * 255 + maxval / 2) / maxval) as u8)
            .collect();
        RgbImage::from_raw(width, height, &scaled)?
    };
    Ok(img)
}

pub fn read_ppm(path: &Path) -> Result<RgbImage> {
    let bytes = std::fs::read(path).with_context(|| format!("reading image {}", path.display()))?;
    parse_ppm(&bytes).with_context(|| format!("decoding image {}", path.display()))
}

/// Encodes an image as binary PPM.
pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    for px in img.pixels() {
        out.extend_from_slice(px);
    }
    out
}
