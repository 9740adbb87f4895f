//! End-to-end runs of the `sampled-rd` binary.

use std::process::{Command, Output};

use sampled_rd::critical::closed_form::triangle_rate;
use sampled_rd_cli::figures::{build, Trend, FIGURE_NAMES};
use sampled_rd_cli::series::read_json;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sampled-rd")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn drf_csv_over_a_rate_grid() {
    let out = run(&["drf", "--psd", "triangle", "--fb", "1", "--rate-grid", "0:4:0.1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "R,D");
    assert_eq!(rows.len(), 42);
    assert_eq!(rows[1], "0,1");
    let ds: Vec<f64> = rows[1..].iter().map(|r| r.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(ds.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn json_output_reloads_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gm.json");
    let out = run(&[
        "idrf",
        "--psd",
        "gauss-markov",
        "--rate",
        "1.3",
        "--fs-grid",
        "0.1:2:0.1",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let series = read_json(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(series.len(), 1);
    let again = read_json(serde_json::to_string(&series).unwrap().as_bytes()).unwrap();
    for (a, b) in series[0].points.iter().zip(&again[0].points) {
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        assert_eq!(a.1.to_bits(), b.1.to_bits());
    }
    // The file holds exactly what the library computes.
    let psd = sampled_rd::Psd::gauss_markov(1.0).unwrap();
    for &(f, d) in &series[0].points {
        assert_eq!(d.to_bits(), sampled_rd::sampled::sampled_drf(&psd, f, 1.3).unwrap().distortion.to_bits());
    }
}

#[test]
fn pcm_marks_the_optimal_frequency() {
    let out = run(&["pcm", "--psd", "rect", "--fb", "0.5", "--rate", "4", "--fs-grid", "0.1:4:0.05"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let star: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# pcm fs_star: "))
        .expect("f_s* in metadata")
        .parse()
        .unwrap();
    assert!((star - 1.0).abs() < 1e-4);
}

#[test]
fn normalized_axis() {
    let out = run(&["mmse", "--psd", "triangle", "--fb", "2", "--fs-grid", "4:4:1", "--normalize"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().skip_while(|l| *l != "f_s/2f_B,mmse").nth(1).unwrap();
    let (x, y) = row.split_once(',').unwrap();
    assert_eq!(x, "1");
    assert!(y.parse::<f64>().unwrap().abs() < 1e-12);
}

#[test]
fn argument_errors_exit_with_2() {
    for args in [
        vec!["drf", "--rate-grid", "0:1"],
        vec!["drf", "--psd", "square", "--rate", "1"],
        vec!["drf"],
        vec!["pcm", "--rate", "1", "--fs-grid", "0.5:2:0.5"],
        vec!["figure", "fig2"],
        vec!["idrf", "--rate-grid", "0:1:0.5", "--fs-grid", "0.5:1:0.5"],
        vec!["findim", "--psd", "gauss-markov", "--rate", "1"],
        vec!["drf", "--psd", "file:/nonexistent.csv", "--rate", "1"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn tabulated_psd_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psd.csv");
    std::fs::write(&path, "f,S\n-1,0\n0,1\n1,0\n").unwrap();
    let arg = format!("file:{}", path.display());
    let table = run(&["fdr", "--psd", &arg, "--rate-grid", "0.5:2:0.5"]);
    let model = run(&["fdr", "--psd", "triangle", "--rate-grid", "0.5:2:0.5"]);
    assert!(table.status.success() && model.status.success());
    let rows = |o: &Output| stdout(o).lines().filter(|l| !l.starts_with('#')).map(String::from).collect::<Vec<_>>();
    assert_eq!(rows(&table), rows(&model));
}

#[test]
fn figures_follow_their_trends() {
    for name in FIGURE_NAMES {
        let fig = build(name, false).unwrap();
        assert!(!fig.series.is_empty(), "{name}");
        for (s, trend) in fig.series.iter().zip(&fig.trends) {
            assert!(!s.points.is_empty(), "{name}/{}", s.label);
            s.validate().unwrap();
            let ys: Vec<f64> = s.ys().collect();
            let ok = match trend {
                Trend::NonIncreasing => ys.windows(2).all(|w| w[1] <= w[0] + 1e-12),
                Trend::NonDecreasing => ys.windows(2).all(|w| w[1] >= w[0] - 1e-12),
                Trend::Free => true,
            };
            assert!(ok, "{name}/{} breaks its trend", s.label);
        }
    }
}

#[test]
fn fig6_saturates_at_nyquist() {
    let fig = build("fig6", false).unwrap();
    for s in &fig.series[..2] {
        assert!(s.ys().all(|y| y <= 2.0 + 1e-12), "{}", s.label);
    }
    assert!(fig.series[0].ys().all(|y| (y - 2.0).abs() < 1e-12));
    for &(r, f_dr) in &fig.series[1].points {
        assert!((triangle_rate(1.0, f_dr) - r).abs() < 1e-8, "R = {r}");
    }
}

#[test]
fn figure_command_writes_all_series() {
    let out = run(&["figure", "fig6", "--normalize"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("series,R/2f_B,f_DR/2f_B\n"));
    for label in ["rect,", "triangle,", "gauss-markov,"] {
        assert!(text.lines().any(|l| l.starts_with(label)), "{label}");
    }
}
