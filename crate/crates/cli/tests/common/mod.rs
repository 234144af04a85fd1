#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use manifold_cli::formats::{encode_ppm, format_real};
use manifold_core::features::RgbImage;
use manifold_core::numerics::seeded_rng;

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_manifold"))
}

/// Runs the binary with an optional `MANIFOLD_THREADS` value.
pub fn run(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("MANIFOLD_THREADS", t.to_string()),
        None => cmd.env_remove("MANIFOLD_THREADS"),
    };
    cmd.output().expect("binary runs")
}

pub fn run_ok(args: &[&str], threads: Option<usize>) -> Output {
    let out = run(args, threads);
    assert!(
        out.status.success(),
        "manifold {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Feature lines for `rows`, with ids `img0000`, `img0001`, ...
pub fn feature_text(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        out.push_str(&format!("img{i:04}"));
        for &v in row {
            out.push(' ');
            out.push_str(&format_real(v));
        }
        out.push('\n');
    }
    out
}

/// Points on a smooth 2-D sheet embedded in `dim` dimensions by random
/// cosine features, plus a little noise.
pub fn sheet_rows(latent: &[[f64; 2]], dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seeded_rng(seed);
    let freqs: Vec<(f64, f64, f64)> = (0..dim)
        .map(|_| {
            (
                2.0 * rng.normal(),
                2.0 * rng.normal(),
                std::f64::consts::TAU * rng.uniform(),
            )
        })
        .collect();
    latent
        .iter()
        .map(|z| {
            freqs
                .iter()
                .map(|&(a, b, c)| (a * z[0] + b * z[1] + c).cos() + 0.05 * rng.normal())
                .collect()
        })
        .collect()
}

/// Labeled image collection on disk: three feature files, labels, vocabulary.
pub struct AnnotationFixture {
    pub dir: tempfile::TempDir,
    pub features: Vec<(String, PathBuf)>,
    pub labels: PathBuf,
    pub vocab: PathBuf,
    pub n: usize,
}

impl AnnotationFixture {
    pub fn feature_flags(&self) -> Vec<String> {
        self.features
            .iter()
            .map(|(k, p)| format!("{k}={}", p.display()))
            .collect()
    }
}

/// Each image has a latent position in the unit square; its labels are the
/// six nearest of twelve concept anchors, and every seventh image keeps only
/// three labels so pruning has something to remove.
pub fn annotation_fixture(n: usize, seed: u64) -> AnnotationFixture {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = seeded_rng(seed);
    let latent: Vec<[f64; 2]> = (0..n).map(|_| [rng.uniform(), rng.uniform()]).collect();
    let anchors: Vec<[f64; 2]> = (0..12).map(|_| [rng.uniform(), rng.uniform()]).collect();

    let mut labels = String::new();
    for (i, z) in latent.iter().enumerate() {
        let mut order: Vec<usize> = (0..anchors.len()).collect();
        let d2 = |a: &[f64; 2]| (a[0] - z[0]).powi(2) + (a[1] - z[1]).powi(2);
        order.sort_by(|&a, &b| d2(&anchors[a]).total_cmp(&d2(&anchors[b])).then(a.cmp(&b)));
        let keep = if i % 7 == 3 { 3 } else { 6 };
        let idx: Vec<String> = order[..keep].iter().map(usize::to_string).collect();
        labels.push_str(&format!("img{i:04} {}\n", idx.join(" ")));
    }
    let labels_path = dir.path().join("labels.txt");
    std::fs::write(&labels_path, labels).unwrap();
    let vocab_path = dir.path().join("vocab.txt");
    let vocab: String = (0..12).map(|j| format!("concept{j:02}\n")).collect();
    std::fs::write(&vocab_path, vocab).unwrap();

    let mut features = Vec::new();
    for (kind, dim, fseed) in [("edh73", 73, 1), ("corr144", 144, 2), ("cm225", 225, 3)] {
        let path = dir.path().join(format!("{kind}.txt"));
        std::fs::write(&path, feature_text(&sheet_rows(&latent, dim, seed * 10 + fseed))).unwrap();
        features.push((kind.to_string(), path));
    }
    AnnotationFixture {
        dir,
        features,
        labels: labels_path,
        vocab: vocab_path,
        n,
    }
}

/// `count` small PPM images of colored stripes and gradients.
pub fn write_images(dir: &Path, count: usize, seed: u64) {
    let mut rng = seeded_rng(seed);
    for i in 0..count {
        let w = 16 + rng.below(16);
        let h = 16 + rng.below(16);
        let base = [rng.below(256) as u8, rng.below(256) as u8, rng.below(256) as u8];
        let period = 2 + rng.below(6);
        let diagonal = rng.below(2) == 1;
        let img = RgbImage::from_fn(w, h, |x, y| {
            let t = if diagonal { x + y } else { x };
            if (t / period).is_multiple_of(2) {
                base
            } else {
                [255 - base[0], base[1] / 2, (y * 255 / h) as u8]
            }
        })
        .unwrap();
        std::fs::write(dir.join(format!("im{i:03}.ppm")), encode_ppm(&img)).unwrap();
    }
}
