use std::path::Path;
use std::process::Command as Proc;
use std::sync::{Arc, Barrier};

use tumorstab::harness::export::{num, parse_num, read_json};
use tumorstab::harness::*;

const SMALL: &str = "
[params]
beta = 1.0
sigma_tilde = 0.5
mu = 3.0

[spectrum]
modes = 0, 2

[evolve]
modes = 2
cells = 128
dt = 1e-3
horizon = 1
laplace_check = false

[recenter]
cells = 256
";

fn config(text: &str, out: &Path, extra: &[&str]) -> tumorstab::Result<RunConfig> {
    let mut raw = RawConfig::parse(text)?;
    for e in extra {
        raw.set(e)?;
    }
    RunConfig::from_raw(&raw, out)
}

fn with_cache(out: &Path, cache: &Path) -> RunConfig {
    config(SMALL, out, &[&format!("output.cache_dir={}", cache.display())]).unwrap()
}

fn data_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn config_validation() {
    let out = Path::new("unused");
    assert!(config(SMALL, out, &[]).is_ok());
    let bad = [
        "params.gamma=1",
        "params.mu_over_mu_star=0.5",
        "params.sigma_tilde=1.5",
        "evolve.modes=",
        "evolve.cells=10",
        "evolve.dt=0",
        "bifurcation.n_max=1",
        "output.format=xml",
    ];
    for b in bad {
        let e = config(SMALL, out, &[b]).unwrap_err();
        assert!(e.is_validation(), "{b}: {e}");
    }
    assert!(RawConfig::parse("[params\nbeta=1").unwrap_err().is_validation());
    assert!(RawConfig::parse("a = 1\na = 2").unwrap_err().is_validation());
    let mut raw = RawConfig::default();
    assert!(raw.set("no_equals").unwrap_err().is_validation());
}

#[test]
fn overrides_replace_file_values() {
    let c = config(SMALL, Path::new("o"), &["params.beta=2.5", "evolve.modes=0,3"]).unwrap();
    assert_eq!(c.beta, 2.5);
    assert_eq!(c.evolve.modes, vec![0, 3]);
    assert_eq!(c.mu, MuChoice::Absolute(3.0));
}

#[test]
fn missing_config_file_is_a_validation_error() {
    let e = load_config(Path::new("/nonexistent/x.ini"), &[], Path::new("o")).unwrap_err();
    assert!(e.is_validation());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    for cmd in [Command::Stationary, Command::Spectrum, Command::Evolve, Command::Recenter] {
        let a = tmp.path().join(format!("a_{}", cmd.name()));
        let b = tmp.path().join(format!("b_{}", cmd.name()));
        // first run fills the cache, second reads it
        run_command(cmd, with_cache(&a, &cache)).unwrap();
        run_command(cmd, with_cache(&b, &cache)).unwrap();
        let mut names: Vec<_> = std::fs::read_dir(&a)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .filter(|n| n != "timings.json")
            .collect();
        names.sort();
        assert!(names.iter().any(|n| n == "record.json"));
        for n in names {
            let x = std::fs::read(a.join(&n)).unwrap();
            let y = std::fs::read(b.join(&n)).unwrap();
            assert!(x == y, "{} differs for {}", n.to_string_lossy(), cmd.name());
        }
    }
}

#[test]
fn concurrent_writers_leave_one_valid_entry() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let barrier = Arc::new(Barrier::new(8));
    let handles: Vec<_> = (0..8)
        .map(|i| {
            let cfg = with_cache(&tmp.path().join(format!("w{i}")), &cache);
            let barrier = barrier.clone();
            std::thread::spawn(move || {
                let h = Harness::new(cfg);
                barrier.wait();
                h.parameter_point(1.0, 0.5, false).unwrap()
            })
        })
        .collect();
    let entries: Vec<CacheEntry> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert!(entries.windows(2).all(|w| w[0] == w[1]));
    let files: Vec<_> = std::fs::read_dir(&cache).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1, "{files:?}");
    match Cache::new(&cache, VERSION).lookup(1.0, 0.5) {
        Lookup::Hit(e) => assert_eq!(e.table, entries[0].table),
        other => panic!("{other:?}"),
    }
}

#[test]
fn corrupt_entry_is_recomputed() {
    let tmp = tempfile::tempdir().unwrap();
    let cache_dir = tmp.path().join("cache");
    let h = Harness::new(with_cache(tmp.path(), &cache_dir));
    let fresh = h.parameter_point(1.0, 0.5, false).unwrap();
    let path = h.cache().path(1.0, 0.5);
    std::fs::write(&path, "{ not json").unwrap();
    assert!(matches!(h.cache().lookup(1.0, 0.5), Lookup::Stale(_)));

    let h2 = Harness::new(with_cache(tmp.path(), &cache_dir));
    assert_eq!(h2.parameter_point(1.0, 0.5, false).unwrap(), fresh);
    assert_eq!(h2.timings().cache[0].1, "stale");
    assert!(matches!(h2.cache().lookup(1.0, 0.5), Lookup::Hit(_)));
}

#[test]
fn version_change_invalidates() {
    let tmp = tempfile::tempdir().unwrap();
    let cache_dir = tmp.path().join("cache");
    let h = Harness::new(with_cache(tmp.path(), &cache_dir));
    let entry = h.parameter_point(1.0, 0.5, false).unwrap();
    let old = Cache::new(&cache_dir, "0.0.0-old");
    let mut stale = entry.clone();
    stale.version = "0.0.0-old".into();
    old.store(&stale).unwrap();
    assert!(matches!(h.cache().lookup(1.0, 0.5), Lookup::Stale(_)));
    assert!(matches!(old.lookup(1.0, 0.5), Lookup::Hit(_)));

    let h2 = Harness::new(with_cache(tmp.path(), &cache_dir));
    h2.parameter_point(1.0, 0.5, false).unwrap();
    assert_eq!(h2.timings().cache[0].1, "stale");
    let back: CacheEntry = read_json(&h2.cache().path(1.0, 0.5)).unwrap();
    assert_eq!(back.version, VERSION);
}

#[test]
fn threshold_is_cached_with_its_settings() {
    let tmp = tempfile::tempdir().unwrap();
    let cache_dir = tmp.path().join("cache");
    let h = Harness::new(with_cache(tmp.path(), &cache_dir));
    let e = h.parameter_point(1.0, 0.5, true).unwrap();
    let t = e.threshold.unwrap();
    assert_eq!(t.n_max, 16);
    assert!(t.mu_star.mu_star > 0.0);
    let h2 = Harness::new(with_cache(tmp.path(), &cache_dir));
    h2.parameter_point(1.0, 0.5, true).unwrap();
    assert_eq!(h2.timings().cache[0].1, "hit");
}

#[test]
fn trajectory_csv_has_one_row_per_step() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = with_cache(tmp.path(), &tmp.path().join("c"));
    let rec = run_command(Command::Evolve, cfg).unwrap();
    let lines = data_lines(&tmp.path().join("trajectory_n2_m0.csv"));
    assert_eq!(lines[0], "t,re_rho,im_rho,envelope");
    assert_eq!(lines.len() - 1, 1001);
    let Payload::Evolve(p) = &rec.payload else { panic!() };
    // values survive the text round trip exactly
    for (line, (t, r)) in lines[1..].iter().zip(p.modes[0].t.iter().zip(&p.modes[0].rho)) {
        let cells: Vec<f64> = line.split(',').map(|c| parse_num(c).unwrap()).collect();
        assert_eq!(cells[0], *t);
        assert_eq!(cells[1], r.re);
    }
    let rates = data_lines(&tmp.path().join("rates.csv"));
    assert_eq!(rates.len(), 2);
}

#[test]
fn root_table_and_json_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = with_cache(tmp.path(), &tmp.path().join("c"));
    let rec = run_command(Command::Spectrum, cfg).unwrap();
    let lines = data_lines(&tmp.path().join("roots.csv"));
    assert_eq!(lines[0], "n,re_s,im_s,residual");
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 4));
    let back: ResultRecord = read_json(&tmp.path().join("record.json")).unwrap();
    assert_eq!(back, rec);
    assert_eq!(back.input.get("params.mu").map(String::as_str), Some("3.0"));
    let t: Timings = read_json(&tmp.path().join("timings.json")).unwrap();
    assert!(t.workers >= 1 && !t.stages.is_empty());
}

#[test]
fn number_format_round_trips() {
    for x in [0.1, -1.0 / 3.0, 6.02e23, 1e-300, f64::MIN_POSITIVE, 123456789.123456789] {
        assert_eq!(parse_num(&num(x)).unwrap(), x);
    }
}

#[test]
fn format_selection() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("c");
    let out = tmp.path().join("csv");
    let mut cfg = with_cache(&out, &cache);
    cfg.format = OutputFormat::Csv;
    run_command(Command::Stationary, cfg).unwrap();
    assert!(out.join("profile.csv").exists() && !out.join("record.json").exists());
    let lines = data_lines(&out.join("profile.csv"));
    assert_eq!(lines.len(), 102);
}

fn cli(args: &[&str]) -> i32 {
    Proc::new(env!("CARGO_BIN_EXE_tumorstab"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

#[test]
fn cli_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let ini = tmp.path().join("run.ini");
    std::fs::write(&ini, SMALL).unwrap();
    let (ini, out) = (ini.to_str().unwrap(), tmp.path().join("out"));
    let out = out.to_str().unwrap();
    assert_eq!(cli(&["stationary", "--config", ini, "--out", out]), 0);
    assert!(Path::new(out).join("record.json").exists());
    assert_eq!(cli(&["verify", "--config", ini, "--out", out, "--set", "verify.cells=256"]), 0);
    assert_eq!(cli(&["stationary", "--config", ini, "--out", out, "--set", "params.nope=1"]), 2);
    assert_eq!(cli(&["stationary", "--config", "/nonexistent.ini", "--out", out]), 2);
    assert_eq!(cli(&["evolve", "--config", ini, "--out", out, "--set", "evolve.modes="]), 2);
    // clap's own usage errors also exit with 2
    assert_eq!(cli(&["frobnicate"]), 2);
}
