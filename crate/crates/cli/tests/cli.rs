//! End-to-end tests of the `matchdyn` binary: exit codes, file schemas,
//! determinism, config precedence, and the calibration round-trip.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_matchdyn")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("the binary under test launches")
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

/// Parse a CSV file with `#` comment lines; returns (header, records).
fn read_csv(path: &Path) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .unwrap_or_else(|e| panic!("cannot open {}: {e}", path.display()));
    let header = reader.headers().unwrap().clone();
    let records = reader.records().map(|r| r.unwrap()).collect();
    (header, records)
}

/// Blank out the final (wall-clock) column of every non-comment line so
/// byte comparisons see only the deterministic payload.
fn mask_last_column(text: &str) -> String {
    text.lines()
        .map(|line| {
            if line.starts_with('#') {
                line.to_string()
            } else {
                match line.rfind(',') {
                    Some(pos) => line[..pos].to_string(),
                    None => line.to_string(),
                }
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Minimal XML well-formedness check: every open tag is closed in order,
/// attribute quotes balance, and exactly one root element spans the file.
fn assert_well_formed_xml(path: &Path) {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    let bytes = text.as_bytes();
    let mut stack: Vec<String> = Vec::new();
    let mut roots = 0usize;
    let mut i = 0usize;
    while i < bytes.len() {
        if bytes[i] != b'<' {
            i += 1;
            continue;
        }
        if text[i..].starts_with("<?") {
            i = text[i..].find("?>").map(|p| i + p + 2).expect("processing instruction closes");
            continue;
        }
        if text[i..].starts_with("<!--") {
            i = text[i..].find("-->").map(|p| i + p + 3).expect("comment closes");
            continue;
        }
        let closing = text[i..].starts_with("</");
        let name_start = i + if closing { 2 } else { 1 };
        let mut j = name_start;
        while j < bytes.len() && !bytes[j].is_ascii_whitespace() && bytes[j] != b'>' && bytes[j] != b'/' {
            j += 1;
        }
        let name = text[name_start..j].to_string();
        assert!(!name.is_empty(), "empty tag name at byte {i}");
        // Scan to the matching '>', skipping quoted attribute values.
        let mut in_quote: Option<u8> = None;
        let mut self_closing = false;
        while j < bytes.len() {
            match (in_quote, bytes[j]) {
                (Some(q), c) if c == q => in_quote = None,
                (Some(_), _) => {}
                (None, b'"') | (None, b'\'') => in_quote = Some(bytes[j]),
                (None, b'>') => break,
                (None, b'/') => self_closing = true,
                (None, _) => self_closing = false,
            }
            j += 1;
        }
        assert!(j < bytes.len(), "tag <{name} never closes");
        assert!(in_quote.is_none(), "unbalanced attribute quote in <{name}>");
        if closing {
            let open = stack.pop().unwrap_or_else(|| panic!("</{name}> with nothing open"));
            assert_eq!(open, name, "mismatched close tag");
            if stack.is_empty() {
                roots += 1;
            }
        } else if self_closing {
            if stack.is_empty() {
                roots += 1;
            }
        } else {
            stack.push(name);
        }
        i = j + 1;
    }
    assert!(stack.is_empty(), "unclosed tags: {stack:?}");
    assert_eq!(roots, 1, "expected exactly one root element");
}

fn polyline_count(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().matches("<polyline").count()
}

const EQ_HEADER: &[&str] = &[
    "year",
    "method",
    "married_share",
    "prob_marriage",
    "prob_divorce",
    "utility_gap",
    "b_star",
    "n_grid",
    "solve_ms",
];

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

#[test]
fn solve_ct_1950_reproduces_the_reference_shares() {
    let dir = TempDir::new().unwrap();
    let out = run(&["solve", "--year", "1950", "--method", "ct", "--out", dir.path().to_str().unwrap()]);
    assert_exit(&out, 0);
    let (header, rows) = read_csv(&dir.path().join("solve_1950_ct.csv"));
    assert_eq!(header.iter().collect::<Vec<_>>(), EQ_HEADER);
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(&row[0], "1950");
    assert_eq!(&row[1], "ct");
    let married: f64 = row[2].parse().unwrap();
    assert!((married - 0.807).abs() < 0.02, "married share {married}");
    let b_star: f64 = row[6].parse().expect("diffusion rows carry a threshold");
    assert!(b_star < 0.0);
    assert_eq!(&row[7], "501");
}

#[test]
fn solve_dt_2000_leaves_the_threshold_column_empty() {
    let dir = TempDir::new().unwrap();
    let out = run(&["solve", "--year", "2000", "--method", "dt", "--out", dir.path().to_str().unwrap()]);
    assert_exit(&out, 0);
    let (_, rows) = read_csv(&dir.path().join("solve_2000_dt.csv"));
    let row = &rows[0];
    let married: f64 = row[2].parse().unwrap();
    assert!((married - 0.673).abs() < 0.02, "married share {married}");
    assert_eq!(&row[6], "", "the chain method has no continuous threshold");
}

#[test]
fn identical_invocations_write_identical_bytes() {
    let args = |dir: &TempDir| {
        vec![
            "solve".to_string(),
            "--year".to_string(),
            "1950".to_string(),
            "--method".to_string(),
            "dt".to_string(),
            "--grid-n".to_string(),
            "301".to_string(),
            "--out".to_string(),
            dir.path().to_str().unwrap().to_string(),
        ]
    };
    let dir_a = TempDir::new().unwrap();
    let dir_b = TempDir::new().unwrap();
    for dir in [&dir_a, &dir_b] {
        let argv: Vec<String> = args(dir);
        let refs: Vec<&str> = argv.iter().map(String::as_str).collect();
        assert_exit(&run(&refs), 0);
    }
    let text_a = std::fs::read_to_string(dir_a.path().join("solve_1950_dt.csv")).unwrap();
    let text_b = std::fs::read_to_string(dir_b.path().join("solve_1950_dt.csv")).unwrap();
    assert_eq!(
        mask_last_column(&text_a),
        mask_last_column(&text_b),
        "all columns but the timing one must be byte-identical"
    );
}

#[test]
fn seed_is_recorded_but_changes_nothing() {
    let dir_seeded = TempDir::new().unwrap();
    let dir_plain = TempDir::new().unwrap();
    let out = run(&[
        "solve", "--year", "1950", "--method", "ct", "--grid-n", "301",
        "--seed", "7", "--out", dir_seeded.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let out = run(&[
        "solve", "--year", "1950", "--method", "ct", "--grid-n", "301",
        "--out", dir_plain.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let provenance = std::fs::read_to_string(dir_seeded.path().join("provenance.txt")).unwrap();
    assert!(provenance.contains("seed: 7"), "{provenance}");
    let seeded = std::fs::read_to_string(dir_seeded.path().join("solve_1950_ct.csv")).unwrap();
    let plain = std::fs::read_to_string(dir_plain.path().join("solve_1950_ct.csv")).unwrap();
    assert_eq!(mask_last_column(&seeded), mask_last_column(&plain));
}

// ---------------------------------------------------------------------------
// configuration handling
// ---------------------------------------------------------------------------

#[test]
fn unknown_config_key_is_named_and_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"grid": {"m": 5}}"#);
    let out = run(&[
        "solve", "--year", "1950", "--method", "ct",
        "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 2);
    let err = stderr(&out);
    assert!(err.contains("unknown field") && err.contains('m'), "{err}");
}

#[test]
fn malformed_config_reports_the_position_and_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "{\n  \"grid\": {\n");
    let out = run(&[
        "solve", "--year", "1950", "--method", "ct",
        "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 2);
    let err = stderr(&out);
    assert!(err.contains("line"), "parse errors carry a position: {err}");
}

#[test]
fn out_of_domain_value_names_field_and_bound_and_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"solver": {"damping": 1.5}}"#);
    let out = run(&[
        "solve", "--year", "1950", "--method", "ct",
        "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 2);
    let err = stderr(&out);
    assert!(err.contains("solver.damping"), "{err}");
    assert!(err.contains("(0, 1]"), "the bound is spelled out: {err}");
}

#[test]
fn infeasible_economics_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"params": {"cbar": 50.0}}"#);
    let out = run(&[
        "solve", "--year", "1950", "--method", "ct",
        "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 3);
    assert!(stderr(&out).contains("infeasible budget"), "{}", stderr(&out));
}

#[test]
fn flag_beats_config_and_both_are_recorded() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"grid": {"n": 401}}"#);
    let out = run(&[
        "solve", "--year", "1950", "--method", "ct",
        "--config", cfg.to_str().unwrap(), "--grid-n", "301",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let (_, rows) = read_csv(&dir.path().join("solve_1950_ct.csv"));
    assert_eq!(&rows[0][7], "301", "the flag wins");
    let provenance = std::fs::read_to_string(dir.path().join("provenance.txt")).unwrap();
    assert!(provenance.contains("[command-line flag]"), "{provenance}");
    let config_line = provenance
        .lines()
        .find(|l| l.starts_with("grid.n ") && l.contains("[config file]"))
        .expect("the config value is still listed");
    assert!(config_line.contains("401"), "{config_line}");
    let alpha_line = provenance
        .lines()
        .find(|l| l.starts_with("params.alpha"))
        .unwrap();
    assert!(alpha_line.contains("[default]"), "untouched fields stay default");
}

// ---------------------------------------------------------------------------
// path
// ---------------------------------------------------------------------------

fn tiny_path_config(dir: &TempDir) -> PathBuf {
    write_config(dir, r#"{"trend": {"year_end": 1952}, "grid": {"n": 201}}"#)
}

#[test]
fn tiny_path_emits_interleaved_rows_and_charts() {
    let dir = TempDir::new().unwrap();
    let cfg = tiny_path_config(&dir);
    let out = run(&[
        "path", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);

    let (header, rows) = read_csv(&dir.path().join("path.csv"));
    assert_eq!(header.iter().collect::<Vec<_>>(), EQ_HEADER);
    assert_eq!(rows.len(), 6, "3 years x 2 methods");
    for (idx, row) in rows.iter().enumerate() {
        let year = 1950 + (idx / 2) as i32;
        assert_eq!(row[0].parse::<i32>().unwrap(), year);
        let method = &row[1];
        if method == "ct" {
            assert!(!row[6].is_empty(), "diffusion rows carry the threshold");
        } else {
            assert_eq!(method, "dt");
            assert!(row[6].is_empty(), "chain rows leave it empty");
        }
    }

    let shares = dir.path().join("path_shares.svg");
    let rates = dir.path().join("path_rates.svg");
    assert_well_formed_xml(&shares);
    assert_well_formed_xml(&rates);
    assert_eq!(polyline_count(&shares), 4, "two panels x two methods");
    assert_eq!(polyline_count(&rates), 4, "two rates x two methods");
}

#[test]
fn single_method_path_has_one_series_per_quantity() {
    let dir = TempDir::new().unwrap();
    let cfg = tiny_path_config(&dir);
    let out = run(&[
        "path", "--method", "dt",
        "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let (_, rows) = read_csv(&dir.path().join("path.csv"));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| &r[1] == "dt"));
    assert_eq!(polyline_count(&dir.path().join("path_shares.svg")), 2);
    assert_eq!(polyline_count(&dir.path().join("path_rates.svg")), 2);
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

#[test]
fn calibration_output_reloads_as_a_config_override() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"grid": {"n": 201}}"#);
    let out = run(&[
        "calibrate", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);

    // The trace is the best-so-far loss, so it must never rise.
    let (header, trace) = read_csv(&dir.path().join("calibration.csv"));
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        ["iteration", "loss", "mu_m", "sigma_m2", "eta"]
    );
    assert!(trace.len() > 5, "the simplex records its improvements");
    let losses: Vec<f64> = trace.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(losses.windows(2).all(|w| w[1] <= w[0] + 1e-15));

    // The JSON estimate is itself a valid config: re-reading it must
    // reproduce the fitted equilibrium at the same grid.
    let json_path = dir.path().join("calibration.json");
    let estimate: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert!(estimate["params"]["mu_m_ct"].is_f64());

    let solve_dir = TempDir::new().unwrap();
    let out = run(&[
        "solve", "--year", "1950", "--method", "ct", "--grid-n", "201",
        "--config", json_path.to_str().unwrap(),
        "--out", solve_dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let (_, rows) = read_csv(&solve_dir.path().join("solve_1950_ct.csv"));
    let married: f64 = rows[0][2].parse().unwrap();
    assert!(
        (married - 0.816).abs() < 0.02,
        "the re-read estimate reproduces the fitted 1950 moment, got {married}"
    );
    let provenance = std::fs::read_to_string(solve_dir.path().join("provenance.txt")).unwrap();
    for key in ["params.mu_m_ct", "params.sigma_m2_ct", "params.eta"] {
        let line = provenance.lines().find(|l| l.starts_with(key)).unwrap();
        assert!(line.contains("[config file]"), "{line}");
    }
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

fn tiny_bench_config(dir: &TempDir, timeout: &str) -> PathBuf {
    write_config(
        dir,
        &format!(
            r#"{{"bench": {{"n_values": [31, 41, 61, 81], "repeats": 3, "timeout_s": {timeout}}}}}"#
        ),
    )
}

#[test]
fn bench_emits_cells_plus_slope_rows_and_a_chart() {
    let dir = TempDir::new().unwrap();
    let cfg = tiny_bench_config(&dir, "600");
    let out = run(&[
        "bench", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);

    let (header, rows) = read_csv(&dir.path().join("bench.csv"));
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        ["method", "n", "median_time_s", "peak_bytes", "repeats"]
    );
    let (slopes, cells): (Vec<_>, Vec<_>) = rows.iter().partition(|r| &r[1] == "slope");
    assert_eq!(cells.len(), 8, "2 methods x 4 grid sizes");
    assert!(cells.iter().all(|r| &r[4] == "3"), "every cell completed its repeats");
    assert_eq!(slopes.len(), 2, "one summary row per method");
    for row in &slopes {
        let time_slope: f64 = row[2].parse().expect("fitted time exponent");
        let mem_slope: f64 = row[3].parse().expect("fitted memory exponent");
        assert!(time_slope > 0.0);
        // Memory accounting is deterministic, so even a tiny sweep pins it.
        match &row[0] {
            "ct" => assert!((0.8..=1.2).contains(&mem_slope), "ct memory slope {mem_slope}"),
            "dt" => assert!((1.7..=2.2).contains(&mem_slope), "dt memory slope {mem_slope}"),
            other => panic!("unexpected method {other}"),
        }
        assert_eq!(&row[4], "4", "all four cells feed the fit");
    }

    let chart = dir.path().join("bench.svg");
    assert_well_formed_xml(&chart);
    assert_eq!(polyline_count(&chart), 4, "time and memory panels, two methods each");
}

#[test]
fn bench_timeout_marks_cells_and_exits_4() {
    let dir = TempDir::new().unwrap();
    let cfg = tiny_bench_config(&dir, "1e-9");
    let out = run(&[
        "bench", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 4);
    let (_, rows) = read_csv(&dir.path().join("bench.csv"));
    let cells: Vec<_> = rows.iter().filter(|r| &r[1] != "slope").collect();
    assert!(cells.iter().all(|r| &r[4] == "0"), "no repeats complete under a zero budget");
    let slopes: Vec<_> = rows.iter().filter(|r| &r[1] == "slope").collect();
    assert!(slopes.iter().all(|r| r[2].is_empty() && r[3].is_empty()));
}

// ---------------------------------------------------------------------------
// schema check across everything the binary emits
// ---------------------------------------------------------------------------

#[test]
fn every_emitted_csv_parses_under_its_header() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().to_str().unwrap().to_string();
    let cfg = write_config(
        &dir,
        r#"{"trend": {"year_end": 1952}, "grid": {"n": 201},
            "bench": {"n_values": [31, 41, 61, 81], "repeats": 3}}"#,
    );
    for args in [
        vec!["solve", "--year", "1950", "--method", "ct"],
        vec!["solve", "--year", "1950", "--method", "dt"],
        vec!["path"],
        vec!["calibrate"],
        vec!["bench"],
    ] {
        let mut argv = args.clone();
        argv.extend(["--config", cfg.to_str().unwrap(), "--out", &out_dir]);
        let out = run(&argv);
        assert_exit(&out, 0);
    }

    let mut seen = 0;
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("csv") {
            continue;
        }
        seen += 1;
        let (header, rows) = read_csv(&path);
        assert!(!header.is_empty());
        assert!(!rows.is_empty(), "{} has data rows", path.display());
        for row in &rows {
            assert_eq!(
                row.len(),
                header.len(),
                "ragged row in {}",
                path.display()
            );
        }
    }
    assert_eq!(seen, 5, "solve x2, path, calibration, bench tables");
}
