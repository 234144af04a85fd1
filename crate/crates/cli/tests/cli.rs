mod common;

use common::{annotation_fixture, feature_text, run, run_ok, s, sheet_rows, write_images};
use manifold_cli::results::{AnnotationRow, BenchRecord, Table};
use manifold_core::numerics::seeded_rng;
use manifold_core::Method;

fn toy_points(n: usize, dim: usize, seed: u64) -> String {
    let mut rng = seeded_rng(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.normal()).collect()).collect();
    feature_text(&rows)
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn reduce_pca_toy_shape() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("toy.txt");
    std::fs::write(&input, toy_points(10, 5, 1)).unwrap();
    let out = dir.path().join("emb.txt");
    run_ok(
        &[
            "reduce",
            "--input",
            s(&input),
            "--method",
            "pca",
            "--dim",
            "2",
            "--out",
            s(&out),
        ],
        None,
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# manifold "));
    let header = text.lines().next().unwrap();
    for key in ["method=PCA", "dim=2", "seed=42", "sigma=", "knn="] {
        assert!(header.contains(key), "{header}");
    }
    let lines = data_lines(&text);
    assert_eq!(lines.len(), 10);
    for (i, line) in lines.iter().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(fields.len(), 3);
        assert_eq!(fields[0], format!("img{i:04}"));
        assert!(fields[1..].iter().all(|f| f.parse::<f64>().is_ok()));
    }
}

#[test]
fn reduce_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("toy.txt");
    std::fs::write(&input, toy_points(60, 8, 2)).unwrap();
    let mut outputs = Vec::new();
    for (i, threads) in [None, Some(1), Some(4)].into_iter().enumerate() {
        let out = dir.path().join(format!("emb{i}.txt"));
        run_ok(
            &[
                "reduce",
                "--input",
                s(&input),
                "--method",
                "dm",
                "--dim",
                "3",
                "--sigma",
                "2",
                "--out",
                s(&out),
            ],
            threads,
        );
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn reduce_dm_rejects_large_dim() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("toy.txt");
    std::fs::write(&input, toy_points(10, 3, 3)).unwrap();
    let out = dir.path().join("emb.txt");
    let res = run(
        &[
            "reduce",
            "--input",
            s(&input),
            "--method",
            "dm",
            "--dim",
            "9",
            "--out",
            s(&out),
        ],
        None,
    );
    assert!(!res.status.success());
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("n - 2"), "{err}");
    assert!(!out.exists());
    // d = n - 2 is the largest accepted.
    run_ok(&["reduce", "--input", s(&input), "--method", "dm", "--dim", "8"], None);
}

#[test]
fn reduce_reports_malformed_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.txt");
    std::fs::write(&input, "a 1 2\nb 3 4\nc 5 oops\n").unwrap();
    let out = dir.path().join("emb.txt");
    let res = run(
        &[
            "reduce",
            "--input",
            s(&input),
            "--method",
            "pca",
            "--dim",
            "1",
            "--out",
            s(&out),
        ],
        None,
    );
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 3"));
    assert!(!out.exists());
}

#[test]
fn unknown_method_is_usage_error() {
    let res = run(&["reduce", "--input", "x.txt", "--method", "tsne", "--dim", "2"], None);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("tsne"));
}

#[test]
fn config_file_values_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("toy.txt");
    std::fs::write(&input, toy_points(20, 6, 4)).unwrap();
    let config = dir.path().join("run.cfg");
    std::fs::write(
        &config,
        format!("# experiment\ninput = {}\nmethod = pca\ndim = 3\nseed = 7\n", s(&input)),
    )
    .unwrap();

    let from_file = run_ok(&["reduce", "--config", s(&config)], None);
    let text = String::from_utf8(from_file.stdout).unwrap();
    assert!(text.lines().next().unwrap().contains("seed=7"));
    assert_eq!(data_lines(&text)[0].split_whitespace().count(), 4);

    let flagged = run_ok(&["reduce", "--config", s(&config), "--dim", "2"], None);
    let text = String::from_utf8(flagged.stdout).unwrap();
    assert_eq!(data_lines(&text)[0].split_whitespace().count(), 3);

    std::fs::write(&config, "dim = three\n").unwrap();
    let res = run(&["reduce", "--config", s(&config), "--input", s(&input)], None);
    assert!(!res.status.success());
}

#[test]
fn annotate_single_cell() {
    let fx = annotation_fixture(80, 1);
    let flags = fx.feature_flags();
    let res = run_ok(
        &[
            "annotate",
            "--features",
            &flags[0],
            "--labels",
            s(&fx.labels),
            "--vocab",
            s(&fx.vocab),
            "--method",
            "pca",
            "--dim",
            "10",
            "--k",
            "8",
        ],
        None,
    );
    let text = String::from_utf8(res.stdout).unwrap();
    let table: Table<AnnotationRow> = Table::parse(&text).unwrap();
    assert_eq!(table.comments.len(), 1);
    assert_eq!(table.rows.len(), 1);
    let row = &table.rows[0];
    assert_eq!(
        (row.method, row.feature.as_str(), row.d, row.k),
        (Method::Pca, "edh73", 10, 8)
    );
    assert!((0.0..=1.0).contains(&row.mean_ap));
    assert_eq!(row.n_train + row.n_test + row.n_pruned, fx.n);
    assert_eq!(row.n_pruned, (0..fx.n).filter(|i| i % 7 == 3).count());
    assert_eq!(row.seed, 42);
    // Data rows plus the column header and one comment line.
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn annotate_full_default_grid() {
    let fx = annotation_fixture(140, 2);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let flags = fx.feature_flags();
    let mut args = vec![
        "annotate",
        "--labels",
        s(&fx.labels),
        "--vocab",
        s(&fx.vocab),
        "--k",
        "8",
        "--out",
        s(&out),
    ];
    for f in &flags {
        args.extend(["--features", f.as_str()]);
    }
    run_ok(&args, None);
    let text = std::fs::read_to_string(&out).unwrap();
    let table: Table<AnnotationRow> = Table::parse(&text).unwrap();
    assert_eq!(table.rows.len(), 60);
    let keys: Vec<_> = table.rows.iter().map(AnnotationRow::sort_key).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    for m in Method::REDUCERS {
        assert_eq!(table.rows.iter().filter(|r| r.method == m).count(), 15);
    }
    assert!(table.rows.iter().all(|r| (0.0..=1.0).contains(&r.mean_ap)));
    // Re-emitting the parsed table reproduces the file byte for byte.
    assert_eq!(table.to_csv().unwrap(), text);
}

#[test]
fn annotate_accepts_all_grid_neighbor_counts() {
    let fx = annotation_fixture(90, 3);
    let flags = fx.feature_flags();
    let res = run_ok(
        &[
            "annotate",
            "--features",
            &flags[1],
            "--labels",
            s(&fx.labels),
            "--vocab",
            s(&fx.vocab),
            "--method",
            "dm,lem",
            "--dim",
            "10,20",
            "--k",
            "4,8,16,32",
            "--sigma",
            "3",
        ],
        None,
    );
    let table: Table<AnnotationRow> = Table::parse(&String::from_utf8(res.stdout).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 16);
}

#[test]
fn annotate_is_deterministic_across_threads() {
    let fx = annotation_fixture(70, 4);
    let flags = fx.feature_flags();
    let mut args = vec![
        "annotate",
        "--labels",
        s(&fx.labels),
        "--vocab",
        s(&fx.vocab),
        "--dim",
        "5,10",
        "--k",
        "4,8",
    ];
    for f in &flags {
        args.extend(["--features", f.as_str()]);
    }
    let a = run_ok(&args, Some(1)).stdout;
    let b = run_ok(&args, Some(4)).stdout;
    let c = run_ok(&args, None).stdout;
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn annotate_lists_missing_ids() {
    let fx = annotation_fixture(60, 5);
    let labels = std::fs::read_to_string(&fx.labels).unwrap();
    let truncated: String = labels.lines().take(35).map(|l| format!("{l}\n")).collect();
    std::fs::write(&fx.labels, truncated).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let flags = fx.feature_flags();
    let res = run(
        &[
            "annotate",
            "--features",
            &flags[0],
            "--labels",
            s(&fx.labels),
            "--vocab",
            s(&fx.vocab),
            "--out",
            s(&out),
        ],
        None,
    );
    assert!(!res.status.success());
    let err = String::from_utf8_lossy(&res.stderr).to_string();
    assert!(err.contains("img0035"), "{err}");
    assert!(err.contains("img0044"), "{err}");
    assert!(!err.contains("img0045"), "at most ten ids: {err}");
    assert!(!out.exists());
}

#[test]
fn annotate_nystrom_mode() {
    let fx = annotation_fixture(80, 6);
    let flags = fx.feature_flags();
    let base = [
        "annotate",
        "--features",
        &flags[0],
        "--labels",
        s(&fx.labels),
        "--vocab",
        s(&fx.vocab),
        "--dim",
        "5",
        "--oos",
        "nystrom",
        "--sigma",
        "3",
    ];
    let mut ok = base.to_vec();
    ok.extend(["--method", "dm,pca"]);
    let table: Table<AnnotationRow> = Table::parse(&String::from_utf8(run_ok(&ok, None).stdout).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert!(table.rows.iter().all(|r| r.oos == "nystrom"));
    let mut bad = base.to_vec();
    bad.extend(["--method", "lle"]);
    let res = run(&bad, None);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("out-of-sample"));
}

#[test]
fn annotate_rejects_empty_grid_values() {
    let fx = annotation_fixture(40, 7);
    let flags = fx.feature_flags();
    let res = run(
        &[
            "annotate",
            "--features",
            &flags[0],
            "--labels",
            s(&fx.labels),
            "--vocab",
            s(&fx.vocab),
            "--dim",
            "0",
        ],
        None,
    );
    assert!(!res.status.success());
}

#[test]
fn bench_rows_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = seeded_rng(9);
    let latent: Vec<[f64; 2]> = (0..120).map(|_| [rng.uniform(), rng.uniform()]).collect();
    let input = dir.path().join("edh73.txt");
    std::fs::write(&input, feature_text(&sheet_rows(&latent, 73, 9))).unwrap();
    let out = dir.path().join("bench.csv");
    run_ok(
        &["bench", "--features", &format!("edh73={}", s(&input)), "--out", s(&out)],
        None,
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# manifold "));
    let table: Table<BenchRecord> = Table::parse(&text).unwrap();
    let names: Vec<String> = table.rows.iter().map(|r| r.method.to_string()).collect();
    assert_eq!(names, ["PCA", "LLE", "LEM", "DM"]);
    for r in &table.rows {
        assert_eq!(r.d, 30);
        assert_eq!(r.n, 120);
        assert_eq!(r.feature, "edh73");
        assert!(r.seconds > 0.0);
        assert!(!r.machine.is_empty());
    }
    assert_eq!(table.to_csv().unwrap(), text);
}

#[test]
fn bench_checks_declared_feature_length() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.txt");
    std::fs::write(&input, toy_points(40, 10, 1)).unwrap();
    let res = run(
        &["bench", "--features", &format!("cm225={}", s(&input)), "--dim", "2"],
        None,
    );
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("225"));
}

#[test]
fn synth_swiss_roll_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let sample = dir.path().join("sample.csv");
    let emb = dir.path().join("emb.csv");
    let res = run_ok(
        &[
            "synth",
            "--name",
            "swiss_roll",
            "--n",
            "2000",
            "--sigma",
            "10",
            "--out",
            s(&sample),
            "--embedding-out",
            s(&emb),
        ],
        None,
    );
    let stdout = String::from_utf8(res.stdout).unwrap();
    let q: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("quality="))
        .expect("quality line")
        .parse()
        .unwrap();
    assert!((0.0..=1.0).contains(&q));
    let sample_text = std::fs::read_to_string(&sample).unwrap();
    assert!(sample_text.starts_with("# manifold "));
    assert_eq!(data_lines(&sample_text).len(), 2001);
    assert_eq!(data_lines(&sample_text)[0], "x,y,z,u,v");
    let emb_text = std::fs::read_to_string(&emb).unwrap();
    assert_eq!(data_lines(&emb_text)[0], "y1,y2");
    assert_eq!(data_lines(&emb_text).len(), 2001);
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for (i, threads) in [Some(1), Some(3)].into_iter().enumerate() {
        let emb = dir.path().join(format!("e{i}.csv"));
        let res = run_ok(
            &[
                "synth",
                "--name",
                "punctured_sphere",
                "--n",
                "400",
                "--seed",
                "5",
                "--embedding-out",
                s(&emb),
            ],
            threads,
        );
        runs.push((res.stdout, std::fs::read(&emb).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn synth_unknown_name_is_usage_error() {
    let res = run(&["synth", "--name", "torus"], None);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn failed_run_leaves_no_files() {
    let dir = tempfile::tempdir().unwrap();
    let sample = dir.path().join("sample.csv");
    let emb = dir.path().join("emb.csv");
    let res = run(
        &[
            "synth",
            "--name",
            "swiss_roll",
            "--n",
            "50",
            "--k-eval",
            "50",
            "--out",
            s(&sample),
            "--embedding-out",
            s(&emb),
        ],
        None,
    );
    assert!(!res.status.success());
    assert!(!sample.exists() && !emb.exists());

    // The second file cannot be created; the first must be removed again.
    let missing = dir.path().join("no-such-dir").join("emb.csv");
    let res = run(
        &[
            "synth",
            "--name",
            "swiss_roll",
            "--n",
            "50",
            "--out",
            s(&sample),
            "--embedding-out",
            s(&missing),
        ],
        None,
    );
    assert!(!res.status.success());
    assert!(!sample.exists());
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn features_from_ppm_directory() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("images");
    std::fs::create_dir(&images).unwrap();
    write_images(&images, 12, 3);
    std::fs::write(images.join("notes.txt"), "not an image").unwrap();
    for (kind, len) in [("edh73", 73), ("corr144", 144), ("cm225", 225)] {
        let a = run_ok(&["features", "--input", s(&images), "--kind", kind], Some(1)).stdout;
        let b = run_ok(&["features", "--input", s(&images), "--kind", kind], Some(4)).stdout;
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("# manifold "));
        let table = manifold_cli::formats::parse_feature_lines(&text).unwrap();
        assert_eq!(table.n(), 12);
        assert_eq!(table.dim(), len);
        assert_eq!(table.ids[0], "im000");
    }
}

#[test]
fn features_feed_reduce() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("images");
    std::fs::create_dir(&images).unwrap();
    write_images(&images, 15, 4);
    let feats = dir.path().join("cm225.txt");
    run_ok(
        &["features", "--input", s(&images), "--kind", "cm225", "--out", s(&feats)],
        None,
    );
    let res = run_ok(&["reduce", "--input", s(&feats), "--method", "pca", "--dim", "3"], None);
    assert_eq!(data_lines(&String::from_utf8(res.stdout).unwrap()).len(), 15);
}

#[test]
fn features_rejects_tiny_image() {
    let dir = tempfile::tempdir().unwrap();
    let img = manifold_core::features::RgbImage::filled(2, 2, [1, 2, 3]).unwrap();
    std::fs::write(dir.path().join("tiny.ppm"), manifold_cli::formats::encode_ppm(&img)).unwrap();
    let res = run(&["features", "--input", s(dir.path()), "--kind", "edh73"], None);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("tiny.ppm"));
}

#[test]
fn bad_thread_variable_is_rejected() {
    let mut cmd = std::process::Command::new(common::bin());
    cmd.args(["synth", "--name", "swiss_roll", "--n", "20"])
        .env("MANIFOLD_THREADS", "many");
    let res = cmd.output().unwrap();
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("MANIFOLD_THREADS"));
}
