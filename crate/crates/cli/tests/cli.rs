mod common;

use common::*;
use isospec::synth::{gaussian_matrix, rng};
use isospec::EmbeddingSpace;
use rand::Rng;
use rand_distr::StandardNormal;

fn langs(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("l{i:02}")).collect()
}

#[test]
fn stats_one_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = gaussian_file(dir.path(), "en.vec", 200, 12, 1);
    let r = isospec(&["stats", p(&f), "--no-cache"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "en");
    let d: usize = rows[0][3].parse().unwrap();
    let erank: usize = rows[0][5].parse().unwrap();
    assert!(1 <= erank && erank <= d);
    assert_eq!(rows[0].len(), 19);
}

#[test]
fn stats_unreadable_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nowhere.vec");
    let r = isospec(&["stats", p(&missing)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains(p(&missing)), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn stats_preserves_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let a = gaussian_file(dir.path(), "a.vec", 100, 6, 1);
    let b = gaussian_file(dir.path(), "b.vec", 100, 6, 2);
    let r = isospec(&["stats", p(&b), p(&a), "--no-cache"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = csv_rows(&r.stdout);
    assert_eq!([rows[0][0].as_str(), rows[1][0].as_str()], ["b", "a"]);
}

#[test]
fn stats_parse_error_names_path_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.vec");
    std::fs::write(&f, "2 3\na 1 2 3\nb 1 x 3\n").unwrap();
    let r = isospec(&["stats", p(&f), "--no-cache"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains(&format!("{}:3", p(&f))), "{}", r.stderr);
}

#[test]
fn json_errors_go_to_stderr() {
    let r = isospec(&["stats", "/nonexistent/x.vec", "--format", "json"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(r.stderr.trim()).unwrap();
    assert_eq!(v["error"]["exit_code"], 2);
    assert!(v["error"]["message"].as_str().unwrap().contains("/nonexistent/x.vec"));
}

#[test]
fn ranges_are_checked_before_reading() {
    let r = isospec(&["distance", "/nonexistent/a.vec", "/nonexistent/b.vec", "--is-mass", "2"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("is_mass"), "{}", r.stderr);
    assert!(!r.stderr.contains("/nonexistent"), "{}", r.stderr);
}

#[test]
fn distance_all_measures_two_spaces() {
    let dir = tempfile::tempdir().unwrap();
    let a = gaussian_file(dir.path(), "en.vec", 150, 10, 1);
    let b = gaussian_file(dir.path(), "de.vec", 150, 10, 2);
    let r = isospec(&[
        "distance",
        p(&a),
        p(&b),
        "--measures",
        "svg,cond-hm,econd-hm,gh,is",
        "--is-top-n",
        "100",
        "--no-cache",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 5);
    let measures: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(measures, ["SVG", "COND-HM", "ECOND-HM", "GH", "IS"]);
    assert!(rows.iter().all(|r| r[0] == "de" && r[1] == "en"));
}

#[test]
fn distance_same_file_twice_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let a = gaussian_file(dir.path(), "en.vec", 120, 8, 3);
    let r = isospec(&["distance", p(&a), p(&a), "--measures", "svg", "--no-cache"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn distance_fifteen_files() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<_> = (0..15)
        .map(|i| gaussian_file(dir.path(), &format!("l{i:02}.vec"), 60, 8, i))
        .collect();
    let mut args = vec!["distance", "--measures", "svg", "--no-cache"];
    args.extend(files.iter().map(|f| p(f)));
    let r = isospec(&args);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(csv_rows(&r.stdout).len(), 105);
}

fn singular_space(seed: u64) -> EmbeddingSpace {
    let mut m = gaussian_matrix(80, 6, seed);
    m.column_mut(5).fill(0.0);
    EmbeddingSpace::from_matrix("s", m).unwrap()
}

#[test]
fn partial_and_total_failure() {
    let dir = tempfile::tempdir().unwrap();
    let a = gaussian_file(dir.path(), "a.vec", 80, 6, 1);
    let b = gaussian_file(dir.path(), "b.vec", 80, 6, 2);
    let s = write_space(dir.path(), "s.vec", &singular_space(3));
    let t = write_space(dir.path(), "t.vec", &singular_space(4));

    let r = isospec(&["distance", p(&a), p(&b), p(&s), "--measures", "cond-hm", "--no-cache"]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0][0].as_str(), rows[0][1].as_str()), ("a", "b"));
    assert!(r.stderr.contains("2 pair computations failed"), "{}", r.stderr);

    let r = isospec(&["distance", p(&s), p(&t), "--measures", "cond-hm", "--no-cache"]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert!(r.stderr.contains("all 1 pair computations failed"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn distance_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let a = gaussian_file(dir.path(), "a.vec", 80, 6, 1);
    let s = write_space(dir.path(), "s.vec", &singular_space(3));
    let r = isospec(&["distance", p(&a), p(&s), "--measures", "cond-hm,gh", "--format", "json", "--no-cache"]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["scores"].as_array().unwrap().len(), 1);
    assert_eq!(v["failures"][0]["measure"], "COND-HM");
}

/// SVG values for every pair of `n` languages, one directed row each, and
/// score = SVG².
fn squared_fixture(dir: &std::path::Path, n: usize) -> (std::path::PathBuf, std::path::PathBuf) {
    let l = langs(n);
    let mut pairs = Vec::new();
    let mut perf = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let v = 1.0 + ((i * 7 + j * 3) % 11) as f64 + 0.1 * i as f64;
            pairs.push((l[i].clone(), l[j].clone(), "SVG", v));
            perf.push((l[j].clone(), l[i].clone(), v * v));
        }
    }
    (write_pairs(dir, &pairs), write_perf(dir, &perf, None))
}

#[test]
fn correlate_perfect_fixture_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let (pairs, perf) = squared_fixture(dir.path(), 5);
    let plot = dir.path().join("fig.svg");
    let r = isospec(&[
        "correlate",
        "--pairs",
        p(&pairs),
        "--perf",
        p(&perf),
        "--format",
        "text",
        "--plot",
        p(&plot),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("r = 1.000"), "{}", r.stdout);
    let svg = std::fs::read_to_string(&plot).unwrap();
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<line").count(), 1);
    assert_eq!(svg.matches("<circle").count(), 10);
    assert!(svg.contains("r = 1.000"));
}

#[test]
fn correlate_reports_empty_join() {
    let dir = tempfile::tempdir().unwrap();
    let (pairs, _) = squared_fixture(dir.path(), 5);
    let other: Vec<(String, String, f64)> = (0..8).map(|i| (format!("x{i}"), format!("y{i}"), 1.0)).collect();
    let perf = write_perf(dir.path(), &other, None);
    let r = isospec(&["correlate", "--pairs", p(&pairs), "--perf", p(&perf)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("0 joined rows"), "{}", r.stderr);
    assert_eq!(r.stderr.matches("->").count(), 5, "{}", r.stderr);
}

#[test]
fn pair_scores_round_trip_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let a = gaussian_file(dir.path(), "a.vec", 80, 6, 1);
    let b = gaussian_file(dir.path(), "b.vec", 80, 6, 2);
    let c = gaussian_file(dir.path(), "c.vec", 80, 6, 5);
    let json = dir.path().join("pairs.json");
    let r = isospec(&["distance", p(&a), p(&b), p(&c), "--format", "json", "-o", p(&json), "--no-cache"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let perf = write_perf(
        dir.path(),
        &[("a".into(), "b".into(), 0.5), ("b".into(), "c".into(), 0.4), ("c".into(), "a".into(), 0.2)],
        None,
    );
    let r = isospec(&["correlate", "--pairs", p(&json), "--perf", p(&perf)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(csv_rows(&r.stdout).len(), 3);
}

#[test]
fn regress_perfect_single_regressor() {
    let dir = tempfile::tempdir().unwrap();
    let l = langs(8);
    let mut r = rng(5);
    let mut pairs = Vec::new();
    let mut perf = Vec::new();
    for i in 0..8 {
        for j in i + 1..8 {
            let v: f64 = (r.sample::<f64, _>(StandardNormal)).exp();
            pairs.push((l[i].clone(), l[j].clone(), "SVG", v));
            pairs.push((l[i].clone(), l[j].clone(), "GH", r.sample::<f64, _>(StandardNormal).exp()));
            perf.push((l[i].clone(), l[j].clone(), 3.0 * v.powf(-0.5)));
        }
    }
    let (pp, fp) = (write_pairs(dir.path(), &pairs), write_perf(dir.path(), &perf, None));
    let r = isospec(&["regress", "--pairs", p(&pp), "--perf", p(&fp), "--format", "text"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("r̂ = 1.000^{1}"), "{}", r.stdout);
    let r = isospec(&["regress", "--pairs", p(&pp), "--perf", p(&fp)]);
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][0], "SVG");
    assert!((rows[1][1].parse::<f64>().unwrap() + 0.5).abs() < 1e-9);
}

#[test]
fn regress_noise_only_is_intercept_only() {
    let dir = tempfile::tempdir().unwrap();
    let l = langs(9);
    let mut r = rng(2024);
    let mut noise = || r.sample::<f64, _>(StandardNormal).exp();
    let mut pairs = Vec::new();
    let mut perf = Vec::new();
    for i in 0..9 {
        for j in i + 1..9 {
            pairs.push((l[i].clone(), l[j].clone(), "SVG", noise()));
            pairs.push((l[i].clone(), l[j].clone(), "ECOND-HM", noise()));
            perf.push((l[i].clone(), l[j].clone(), noise()));
        }
    }
    let (pp, fp) = (write_pairs(dir.path(), &pairs), write_perf(dir.path(), &perf, None));
    let r = isospec(&["regress", "--pairs", p(&pp), "--perf", p(&fp), "--format", "text", "--alpha", "0.01"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("r̂ = 0.000 "), "{}", r.stdout);
    assert!(r.stdout.contains("no candidate entered"));
}

#[test]
fn regress_constant_candidate_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let l = langs(5);
    let mut pairs = Vec::new();
    let mut perf = Vec::new();
    let mut ling = Vec::new();
    for i in 0..5 {
        for j in i + 1..5 {
            pairs.push((l[i].clone(), l[j].clone(), "SVG", 1.0 + (i + 2 * j) as f64));
            perf.push((l[i].clone(), l[j].clone(), 1.0 + j as f64));
            ling.push([0.5, (i * j) as f64, (i + j) as f64]);
        }
    }
    let (pp, fp) = (write_pairs(dir.path(), &pairs), write_perf(dir.path(), &perf, Some(&ling)));
    let r = isospec(&["regress", "--pairs", p(&pp), "--perf", p(&fp), "--candidates", "SVG,PHY,TYP"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("\"PHY\""), "{}", r.stderr);
}

fn grid(dir: &std::path::Path, n: usize) -> (std::path::PathBuf, std::path::PathBuf) {
    let l = langs(n);
    let mut pairs = Vec::new();
    let mut perf = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let svg = 1.0 + ((i * 5 + j * 3) % 13) as f64;
            let econd = 2.0 + ((i * 3 + j * 7) % 17) as f64;
            pairs.push((l[i].clone(), l[j].clone(), "SVG", svg));
            pairs.push((l[i].clone(), l[j].clone(), "ECOND-HM", econd));
        }
    }
    for s in 0..n {
        for t in 0..n {
            if s != t {
                let (a, b) = (s.min(t), s.max(t));
                let svg = 1.0 + ((a * 5 + b * 3) % 13) as f64;
                let noise = 1.0 + 0.3 * ((s + 2 * t + 1) as f64).sin().abs();
                perf.push((l[s].clone(), l[t].clone(), noise / svg));
            }
        }
    }
    (write_pairs(dir, &pairs), write_perf(dir, &perf, None))
}

#[test]
fn select_fifteen_language_grid() {
    let dir = tempfile::tempdir().unwrap();
    let (pp, fp) = grid(dir.path(), 15);
    for mode in ["source", "target"] {
        let r = isospec(&["select", "--pairs", p(&pp), "--perf", p(&fp), "--mode", mode, "--format", "json"]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
        let groups = v["per_group"].as_array().unwrap();
        assert_eq!(groups.len(), 15);
        assert!(groups.iter().all(|g| g["n"] == 14));
        assert_eq!(v["best_measure"], "SVG");
    }
    let r = isospec(&["select", "--pairs", p(&pp), "--perf", p(&fp), "--format", "text"]);
    assert!(r.stdout.contains("over 15 groups"), "{}", r.stdout);
    assert!(r.stdout.contains("multi r̂ = "), "{}", r.stdout);
}

#[test]
fn select_single_group_means() {
    let dir = tempfile::tempdir().unwrap();
    let (pp, _) = grid(dir.path(), 6);
    // every row targets l00, so source selection sees one group
    let l = langs(6);
    let perf: Vec<(String, String, f64)> = (1..6).map(|s| (l[s].clone(), l[0].clone(), 1.0 + (s * s % 4) as f64)).collect();
    let fp = write_perf(dir.path(), &perf, None);
    let r = isospec(&["select", "--pairs", p(&pp), "--perf", p(&fp), "--format", "json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["per_group"].as_array().unwrap().len(), 1);
    for m in ["SVG", "ECOND-HM"] {
        assert_eq!(v["mean_correlation"][m], v["per_group"][0]["correlations"][m]);
    }
}

#[test]
fn select_without_usable_groups() {
    let dir = tempfile::tempdir().unwrap();
    let (pp, _) = grid(dir.path(), 4);
    let l = langs(4);
    let perf = vec![
        (l[0].clone(), l[1].clone(), 1.0),
        (l[2].clone(), l[1].clone(), 2.0),
        (l[1].clone(), l[3].clone(), 3.0),
    ];
    let fp = write_perf(dir.path(), &perf, None);
    let r = isospec(&["select", "--pairs", p(&pp), "--perf", p(&fp)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("no usable groups"), "{}", r.stderr);
}

fn resolved(r: &Run, key: &str) -> String {
    assert_eq!(r.code, 0, "{}", r.stderr);
    r.stdout
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("{key} missing from {}", r.stdout))
        .to_string()
}

#[test]
fn flags_override_env_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# test\nlimit = 111\ncombiner = min\n").unwrap();
    let base = ["distance", "a.vec", "b.vec", "--config", p(&cfg), "--print-config"];
    let r = isospec(&base);
    assert_eq!(resolved(&r, "limit"), "111");
    assert_eq!(resolved(&r, "combiner"), "min");
    let r = isospec_env(&base, &[("ISOSPEC_LIMIT", "222")]);
    assert_eq!(resolved(&r, "limit"), "222");
    let mut args = base.to_vec();
    args.extend(["--limit", "333"]);
    let r = isospec_env(&args, &[("ISOSPEC_LIMIT", "222")]);
    assert_eq!(resolved(&r, "limit"), "333");
    assert_eq!(resolved(&r, "combiner"), "min");
    let r = isospec(&["distance", "a.vec", "b.vec", "--print-config"]);
    assert_eq!(resolved(&r, "limit"), "200000");
}

#[test]
fn config_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let r = isospec(&[
        "distance",
        "en=a.vec",
        "b.vec",
        "--measures",
        "gh,svg",
        "--svg-top-k",
        "40",
        "--is-mass",
        "0.75",
        "--no-center",
        "--workers",
        "3",
        "--format",
        "json",
        "--print-config",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, &r.stdout).unwrap();
    let again = isospec(&["distance", "--config", p(&cfg), "--print-config"]);
    assert_eq!(again.code, 0, "{}", again.stderr);
    assert_eq!(again.stdout, r.stdout);
    assert!(r.stdout.contains("inputs = en=a.vec,b.vec\n"));
}

#[test]
fn unknown_config_key_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "limmit = 5\n").unwrap();
    let r = isospec(&["stats", "a.vec", "--config", p(&cfg)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("limmit"), "{}", r.stderr);
}

#[test]
fn cached_spectra_give_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let a = gaussian_file(dir.path(), "en.vec", 300, 16, 1);
    let b = gaussian_file(dir.path(), "de.vec", 300, 16, 2);
    let cold = isospec(&["distance", p(&a), p(&b), "--cache-dir", p(&cache)]);
    assert_eq!(cold.code, 0, "{}", cold.stderr);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 2);
    let warm = isospec(&["distance", p(&a), p(&b), "--cache-dir", p(&cache), "-v"]);
    assert!(warm.stderr.contains("using cached spectrum"), "{}", warm.stderr);
    let none = isospec(&["distance", p(&a), p(&b), "--no-cache"]);
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(cold.stdout, none.stdout);

    let s1 = isospec(&["stats", p(&a), "--cache-dir", p(&cache)]);
    let s2 = isospec(&["stats", p(&a), "--no-cache"]);
    assert_eq!(s1.stdout, s2.stdout);

    // new contents, new key
    gaussian_file(dir.path(), "en.vec", 300, 16, 9);
    let changed = isospec(&["distance", p(&a), p(&b), "--cache-dir", p(&cache)]);
    assert_ne!(changed.stdout, cold.stdout);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 3);
}

#[test]
fn sidecar_cache_next_to_input() {
    let dir = tempfile::tempdir().unwrap();
    let a = gaussian_file(dir.path(), "en.vec", 100, 8, 1);
    let r = isospec(&["stats", p(&a)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(dir.path().join("en.vec.spectrum.json").exists());
}

#[test]
fn worker_count_does_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<_> = (0..4)
        .map(|i| gaussian_file(dir.path(), &format!("l{i}.vec"), 200, 10, 40 + i))
        .collect();
    let run = |w: &str| {
        let mut args = vec!["distance", "--measures", "svg,cond-hm,econd-hm,gh,is", "--is-top-n", "150", "--no-cache", "--workers", w];
        args.extend(files.iter().map(|f| p(f)));
        isospec(&args)
    };
    let (one, four) = (run("1"), run("4"));
    assert_eq!(one.code, 0, "{}", one.stderr);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn help_and_bad_flags() {
    assert_eq!(isospec(&["--help"]).code, 0);
    assert_eq!(isospec(&["stats", "--bogus"]).code, 2);
    assert_eq!(isospec(&["frobnicate"]).code, 2);
}
