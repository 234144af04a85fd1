use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use manifold_core::{DataMatrix, Method};

use super::{check_feature_dim, feature_sources, join_list, path_string, Output, ReducerParams, DEFAULT_SEED};
use crate::cli::BenchArgs;
use crate::config::Settings;
use crate::formats::{header_line, read_feature_file};
use crate::results::{BenchRecord, Table};

pub const DEFAULT_BENCH_DIM: usize = 30;

/// Operating system, architecture and thread count of this run.
pub fn machine_note() -> String {
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!(
        "{} {} cpus={} threads={}",
        std::env::consts::OS,
        std::env::consts::ARCH,
        cpus,
        rayon::current_num_threads()
    )
}

/// Wall-clock seconds of one reduction, excluding all I/O.
pub fn time_reduction(data: &DataMatrix, params: &ReducerParams, method: Method, d: usize) -> Result<f64> {
    let reducer = params.reducer(method, d);
    let start = Instant::now();
    let embedding = reducer.reduce(data);
    let seconds = start.elapsed().as_secs_f64();
    embedding.with_context(|| format!("{method} at d={d}"))?;
    Ok(seconds)
}

/// Times each method on each feature file, one after the other.
pub fn bench(args: &BenchArgs) -> Result<Output> {
    let settings = Settings::new(args.config.as_deref())?;
    let sources = feature_sources(&args.features, &settings)?;
    let methods: Vec<Method> = settings.list(&args.method, "method", &Method::REDUCERS)?;
    let d: usize = settings.value(args.dim, "dim", DEFAULT_BENCH_DIM)?;
    let params = ReducerParams::resolve(&args.reducer, &settings)?;
    let seed: u64 = settings.value(args.seed, "seed", DEFAULT_SEED)?;
    let out: Option<PathBuf> = settings.opt(args.out.clone(), "out")?;
    if methods.is_empty() {
        anyhow::bail!("the method list is empty");
    }

    let machine = machine_note();
    let mut rows = Vec::new();
    for source in &sources {
        let table = read_feature_file(&source.path)?;
        check_feature_dim(source, table.dim())?;
        for &method in &methods {
            let seconds =
                time_reduction(&table.data, &params, method, d).with_context(|| format!("on `{}`", source.label))?;
            rows.push(BenchRecord {
                method,
                feature: source.label.clone(),
                d,
                n: table.n(),
                seconds,
                machine: machine.clone(),
            });
        }
    }

    let mut entries = vec![
        (
            "features",
            sources
                .iter()
                .map(|s| format!("{}={}", s.label, path_string(&s.path)))
                .collect::<Vec<_>>()
                .join(","),
        ),
        ("method", join_list(&methods)),
        ("dim", d.to_string()),
    ];
    entries.extend(params.header());
    entries.push(("seed", seed.to_string()));
    let header = header_line("bench", &entries);
    let table = Table::new(vec![header.trim_end().to_string()], rows);

    let mut output = Output::default();
    output.route(out, table.to_csv()?);
    Ok(output)
}
