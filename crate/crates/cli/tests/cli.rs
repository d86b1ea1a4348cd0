use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ness_cli::config::{parse_config_str, Scenario};
use ness_cli::distance::run_sweep_distance;
use ness_cli::sweeps::{self, Quantity};
use ness_cli::{read_csv, run_scenario};
use ness_core::entanglement::Order;
use tempfile::TempDir;

fn ness(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ness"));
    cmd.args(args);
    match threads {
        Some(n) => cmd.env("NESS_THREADS", n),
        None => cmd.env_remove("NESS_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn config(text: &str) -> ness_cli::ExperimentConfig {
    parse_config_str(text, None).unwrap()
}

const SMALL_LENGTH: &str = "scenario = sweep-length
model = single-impurity
epsilon0 = 1
k_fl = 2pi/3
k_fr = pi/2
ell = 10:40:10
measures = mi, ci, negativity, entropy
orders = vn, 2
";

#[test]
fn bad_configs_exit_with_machine_readable_error() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("unknown.conf", "scenario = sweep-length\nbogus = 1\n", "ParseError"),
        ("dup.conf", "scenario = sweep-length\nell = 1\nell = 2\n", "ParseError"),
        ("missing.conf", "scenario = sweep-length\nmodel = trivial\nk_fr = pi/2\nell = 10\n", "ParseError"),
        ("range.conf", "scenario = sweep-length\nmodel = trivial\nk_fl = 4\nk_fr = pi/2\nell = 10\n", "ParseError"),
    ];
    for (name, text, kind) in cases {
        let path = write_config(dir.path(), name, text);
        let o = ness(&["sweep-length", "--config", path.to_str().unwrap()], None);
        assert_eq!(o.status.code(), Some(2), "{name}");
        let err = stderr(&o);
        assert!(err.starts_with(&format!("error kind={kind} message=\"")), "{name}: {err}");
    }
    let o = ness(&["sweep-length", "--config", dir.path().join("absent.conf").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error kind=IoError"));

    let path = write_config(dir.path(), "line.conf", "# header\nscenario = sweep-length\n\nnonsense line\n");
    let o = ness(&["sweep-length", "--config", path.to_str().unwrap()], None);
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn same_config_gives_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "len.conf", SMALL_LENGTH);
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}/len.csv"));
        let o = ness(&["sweep-length", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], Some(threads));
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push((fs::read(&out).unwrap(), fs::read(dir.path().join(format!("run{i}/len.fit.csv"))).unwrap()));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn csv_round_trips_the_sweep_rows() {
    let dir = TempDir::new().unwrap();
    let cfg = config(SMALL_LENGTH);
    let result = sweeps::run(&cfg).unwrap();
    let out = dir.path().join("len.csv");
    run_scenario(&cfg, &out).unwrap();
    let (header, rows) = read_csv(&out).unwrap();
    assert_eq!(header, sweeps::ROW_COLUMNS);
    assert_eq!(rows.len(), result.rows.len());
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    for (row, want) in rows.iter().zip(&result.rows) {
        assert_eq!(row[col("measure")], want.quantity.name());
        assert_eq!(row[col("ell_l")].parse::<i64>().unwrap(), want.geom.ell_l);
        for (name, v) in [("numeric", want.numeric), ("analytic", want.analytic()), ("residual", want.residual)] {
            let got: f64 = row[col(name)].parse().unwrap();
            assert!((got - v).abs() <= 1e-11 * v.abs().max(1e-3), "{name}: {got} vs {v}");
        }
    }
    let (fit_header, fit_rows) = read_csv(&ness_cli::companion_path(&out, "fit")).unwrap();
    assert_eq!(fit_header, sweeps::FIT_COLUMNS);
    assert_eq!(fit_rows.len(), result.fits.len());
}

#[test]
fn transparent_chain_has_no_cross_correlations() {
    let cfg = config(
        "scenario = sweep-length\nmodel = trivial\nk_fl = 2pi/3\nk_fr = pi/2\nell = 20:100:20\nmeasures = mi, negativity\norders = vn, 2\n",
    );
    let r = sweeps::run(&cfg).unwrap();
    assert!(!r.rows.is_empty());
    for row in &r.rows {
        assert!(row.numeric.abs() < 1e-8, "{:?} {}", row.quantity, row.numeric);
        assert!(row.analytic().abs() < 1e-8);
    }
}

#[test]
fn bias_sweep_vanishes_at_zero_and_is_linear_for_small_bias() {
    let cfg = config(
        "scenario = sweep-bias
model = single-impurity
epsilon0 = 1
k_fr = pi/2
delta_k = 0, pi/48, pi/24, pi/12
ell = 40:160:40
measures = mi, negativity
",
    );
    let r = sweeps::run(&cfg).unwrap();
    for q in [Quantity::Mi, Quantity::Negativity] {
        let order = (q == Quantity::Mi).then_some(Order::VonNeumann);
        for row in r.series(0, 0, order, q) {
            assert!(row.numeric.abs() < 1e-12, "{q:?} at zero bias: {}", row.numeric);
        }
        let slope = |b: usize| r.fit_for(0, b, order, q).unwrap().fit.slope_check.as_ref().unwrap().fitted;
        for b in 1..3 {
            let ratio = slope(b + 1) / slope(b);
            assert!((ratio - 2.0).abs() < 0.1, "{q:?} ratio {ratio}");
        }
    }
}

#[test]
fn bias_and_length_sweeps_agree_at_the_same_point() {
    let length = sweeps::run(&config(SMALL_LENGTH)).unwrap();
    let bias = sweeps::run(&config(&SMALL_LENGTH.replace("sweep-length", "sweep-bias").replace("k_fl = 2pi/3\n", "delta_k = pi/6\n")))
        .unwrap();
    assert_eq!(length.rows.len(), bias.rows.len());
    for (a, b) in length.rows.iter().zip(&bias.rows) {
        assert_eq!((a.quantity, a.order, a.geom), (b.quantity, b.order, b.geom));
        assert!((a.numeric - b.numeric).abs() < 1e-12, "{:?}", a.quantity);
        assert!((a.analytic() - b.analytic()).abs() < 1e-12);
    }
}

#[test]
fn position_sweep_tags_overlap_regimes() {
    let cfg = config(
        "scenario = sweep-position
model = single-impurity
epsilon0 = 1
k_fl = 2pi/3
k_fr = pi/2
ell_l = 10
ell_r = 20
delta_d = -14:24:1
",
    );
    let r = sweeps::run(&cfg).unwrap();
    assert_eq!(r.rows.len(), 39);
    for row in &r.rows {
        let delta = row.geom.d_l - row.geom.d_r;
        let overlap = ((delta + 10).min(20) - delta.max(0)).max(0);
        assert_eq!(row.geom.ell_mirror(), overlap, "delta {delta}");
        let want = if delta <= -10 || delta >= 20 {
            "disjoint"
        } else if (0..=10).contains(&delta) {
            "contained"
        } else {
            "partial"
        };
        assert_eq!(sweeps::overlap_regime(&row.geom), want, "delta {delta}");
        if overlap == 0 {
            assert_eq!(row.linear, 0.0);
        }
    }
    let bad = parse_config_str("scenario = sweep-position\nmodel = trivial\nk_fl = 2\nk_fr = 1.5\nell_l = 5\nell_r = 6\ndelta_d = 0\nmeasures = negativity\n", None).unwrap();
    assert!(sweeps::run(&bad).is_err());
}

#[test]
fn fitting_never_touches_the_numeric_series() {
    let full = sweeps::run(&config(SMALL_LENGTH)).unwrap();
    let mi_only = sweeps::run(&config(&SMALL_LENGTH.replace("mi, ci, negativity, entropy", "mi"))).unwrap();
    let from_full: Vec<f64> = full.rows.iter().filter(|r| r.quantity == Quantity::Mi).map(|r| r.numeric).collect();
    let alone: Vec<f64> = mi_only.rows.iter().map(|r| r.numeric).collect();
    assert_eq!(from_full, alone);
    for row in &full.rows {
        assert!((row.numeric - row.fitted - row.residual).abs() < 1e-12);
    }
}

#[test]
fn distance_exponents_are_stable_under_window_choice() {
    let base = "scenario = sweep-distance
model = single-impurity
epsilon0 = 1
k_fl = 2pi/3
k_fr = pi/2
ell = 12
d_over_ell_min = 4
d_over_ell_max = 40
centers = 4
measures = mi
";
    let exponents = |extra: &str| {
        let r = run_sweep_distance(&config(&format!("{base}{extra}"))).unwrap();
        let f = r.fit_for(0, Quantity::Mi).unwrap();
        (r.window, f.exponent_avg_deviation, f.exponent_amplitude)
    };
    let (w, dev, amp) = exponents("");
    assert_eq!(w, 6);
    let (w2, dev2, amp2) = exponents("window = 12\n");
    assert_eq!(w2, 12);
    assert!((dev - dev2).abs() < 0.1 && (amp - amp2).abs() < 0.1, "{dev} {dev2} {amp} {amp2}");
    assert!((dev + 2.0).abs() < 0.3 && (amp + 1.0).abs() < 0.3, "{dev} {amp}");
}

#[test]
fn selftest_passes_and_kernel_table_is_written() {
    let o = ness(&["selftest"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(text.lines().count() >= 10);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");

    let dir = TempDir::new().unwrap();
    let cfg = config("scenario = eval-asymptotics\nt = 0:1:0.25\norders = vn, 2\n");
    assert_eq!(cfg.scenario, Scenario::EvalAsymptotics);
    let out = dir.path().join("k.csv");
    run_scenario(&cfg, &out).unwrap();
    let (header, rows) = read_csv(&out).unwrap();
    assert_eq!(header, ness_cli::kernels::COLUMNS);
    assert_eq!(rows.len(), 10);
}
