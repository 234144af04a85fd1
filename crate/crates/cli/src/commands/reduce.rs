use std::path::PathBuf;

use anyhow::{Context, Result};
use manifold_core::Method;

use super::{path_string, Output, ReducerParams, DEFAULT_SEED};
use crate::cli::ReduceArgs;
use crate::config::Settings;
use crate::formats::{format_rows, header_line, read_feature_file};

/// Writes `<id> y1 ... yd` lines under a header echoing the configuration.
pub fn reduce(args: &ReduceArgs) -> Result<Output> {
    let settings = Settings::new(args.config.as_deref())?;
    let input: PathBuf = settings.required(args.input.clone(), "input")?;
    let method: Method = settings.value(args.method, "method", Method::Dm)?;
    let params = ReducerParams::resolve(&args.reducer, &settings)?;
    let seed: u64 = settings.value(args.seed, "seed", DEFAULT_SEED)?;
    let out: Option<PathBuf> = settings.opt(args.out.clone(), "out")?;

    let table = read_feature_file(&input)?;
    let d = match method {
        Method::Identity => settings.value(args.dim, "dim", table.dim())?,
        _ => settings.required(args.dim, "dim")?,
    };
    let reducer = params.reducer(method, d);
    let embedding = reducer
        .reduce(&table.data)
        .with_context(|| format!("{method} reduction of {}", input.display()))?;

    let mut entries = vec![
        ("input", path_string(&input)),
        ("n", table.n().to_string()),
        ("D", table.dim().to_string()),
        ("method", method.to_string()),
        ("dim", embedding.dim().to_string()),
    ];
    entries.extend(params.header());
    entries.push(("seed", seed.to_string()));
    let mut text = header_line("reduce", &entries);
    text.push_str(&format_rows(&table.ids, &embedding.coords));

    let mut output = Output::default();
    output.route(out, text);
    Ok(output)
}
