use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use manifold_core::synthetic::{embedding_quality, punctured_sphere, swiss_roll, SyntheticKind};
use manifold_core::Method;

use super::{Output, ReducerParams, DEFAULT_SEED};
use crate::cli::SynthArgs;
use crate::config::Settings;
use crate::formats::{format_real, header_line};

pub const DEFAULT_SYNTH_N: usize = 2000;
pub const DEFAULT_K_EVAL: usize = 10;

/// Samples a manifold, embeds it and prints the neighborhood-preservation
/// score; the sample and the embedding go to CSV files when requested.
pub fn synth(args: &SynthArgs) -> Result<Output> {
    let settings = Settings::new(args.config.as_deref())?;
    let kind: SyntheticKind = settings.required(args.name, "name")?;
    let n: usize = settings.value(args.n, "n", DEFAULT_SYNTH_N)?;
    let height: f64 = settings.value(args.height, "height", 1.0)?;
    let method: Method = settings.value(args.method, "method", Method::Dm)?;
    let d: usize = settings.value(args.dim, "dim", 2)?;
    let params = ReducerParams::resolve(&args.reducer, &settings)?;
    let k_eval: usize = settings.value(args.k_eval, "k-eval", DEFAULT_K_EVAL)?;
    let seed: u64 = settings.value(args.seed, "seed", DEFAULT_SEED)?;
    let out: Option<PathBuf> = settings.opt(args.out.clone(), "out")?;
    let embedding_out: Option<PathBuf> = settings.opt(args.embedding_out.clone(), "embedding-out")?;

    let sample = match kind {
        SyntheticKind::SwissRoll => swiss_roll(n, seed)?,
        SyntheticKind::PuncturedSphere => punctured_sphere(n, height, seed)?,
    };
    let embedding = params
        .reducer(method, d)
        .reduce(&sample.points)
        .with_context(|| format!("{method} embedding of {kind}"))?;
    let quality = embedding_quality(&embedding.coords, &sample.intrinsic, k_eval)?;

    let mut entries = vec![("name", kind.to_string()), ("n", n.to_string())];
    if kind == SyntheticKind::PuncturedSphere {
        entries.push(("height", height.to_string()));
    }
    entries.extend([("method", method.to_string()), ("dim", embedding.dim().to_string())]);
    entries.extend(params.header());
    entries.push(("k-eval", k_eval.to_string()));
    entries.push(("seed", seed.to_string()));
    let header = header_line("synth", &entries);

    let mut output = Output::default();
    if let Some(path) = out {
        let mut text = header.clone();
        text.push_str("x,y,z,u,v\n");
        for i in 0..sample.n() {
            let p = sample.points.row(i);
            let q = sample.intrinsic.row(i);
            let fields: Vec<String> = p.iter().chain(q).map(|&v| format_real(v)).collect();
            let _ = writeln!(text, "{}", fields.join(","));
        }
        output.files.push((path, text));
    }
    if let Some(path) = embedding_out {
        let mut text = header.clone();
        let names: Vec<String> = (1..=embedding.dim()).map(|j| format!("y{j}")).collect();
        let _ = writeln!(text, "{}", names.join(","));
        for i in 0..embedding.n() {
            let fields: Vec<String> = embedding.coords.row(i).iter().map(|&v| format_real(v)).collect();
            let _ = writeln!(text, "{}", fields.join(","));
        }
        output.files.push((path, text));
    }
    output.stdout = header;
    let _ = writeln!(output.stdout, "quality={}", format_real(quality));
    Ok(output)
}
