use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use manifold_core::features::FeatureKind;
use rayon::prelude::*;

use super::{path_string, Output};
use crate::cli::FeaturesArgs;
use crate::config::Settings;
use crate::formats::{format_real, header_line, read_ppm};

/// `.ppm` files of a directory, sorted by name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        let is_ppm = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm"));
        if is_ppm && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        bail!("no .ppm images in {}", dir.display());
    }
    Ok(paths)
}

/// One `<id> v1 ... vk` line per image, ids taken from file stems.
pub fn features(args: &FeaturesArgs) -> Result<Output> {
    let settings = Settings::new(args.config.as_deref())?;
    let input: PathBuf = settings.required(args.input.clone(), "input")?;
    let kind: FeatureKind = settings.value(args.kind, "kind", FeatureKind::Edh73)?;
    let out: Option<PathBuf> = settings.opt(args.out.clone(), "out")?;

    let paths = list_images(&input)?;
    let lines: Vec<String> = paths
        .par_iter()
        .map(|path| {
            let img = read_ppm(path)?;
            let values = kind
                .extract(&img)
                .with_context(|| format!("{kind} of {}", path.display()))?;
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            if id.chars().any(char::is_whitespace) {
                bail!("image id `{id}` contains whitespace ({})", path.display());
            }
            let mut line = id;
            for &v in values.values() {
                line.push(' ');
                line.push_str(&format_real(v));
            }
            line.push('\n');
            Ok(line)
        })
        .collect::<Result<_>>()?;

    let mut text = header_line(
        "features",
        &[
            ("input", path_string(&input)),
            ("kind", kind.to_string()),
            ("images", paths.len().to_string()),
            ("seed", "none".to_string()),
        ],
    );
    text.extend(lines);
    let mut output = Output::default();
    output.route(out, text);
    Ok(output)
}
