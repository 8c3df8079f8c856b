use std::path::Path;
use std::process::{Command, Output};

const SMALL: [&str; 4] = ["--Nx", "256", "--Nj", "8"];

fn worm(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_worm"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .output()
        .expect("running worm")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string()
}

#[test]
fn usage_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["verify", "--beta", "1.5"],
        &["verify", "--Nx", "1000"],
        &["verify", "--suite", "nothing_matches_this"],
        &["project", "--random"],
        &["project", "--y", "0", "--s", "0"],
        &["kernel-eval", "--w", "0,0,0", "--zeta", "E1,0,0"],
        &["kernel-eval", "--w", "0,2,0,0", "--zeta", "E1,0,0"],
        &["kernel-eval", "--w", "0,0,0,0", "--zeta", "E5,0,0"],
        &["sweep", "--beta-range", "2:3"],
        &["no-such-command"],
    ];
    for args in cases {
        let o = worm(args, d.path());
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
    let o = Command::new(env!("CARGO_BIN_EXE_worm")).arg("--help").output().unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_worm"))
        .env("WORM_THREADS", "0")
        .args(["verify", "--suite", "projector"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let mut args = vec!["verify", "--suite", "projector"];
    args.extend(SMALL);
    let o = Command::new(env!("CARGO_BIN_EXE_worm"))
        .env("WORM_THREADS", "1")
        .args(&args)
        .arg("--output-dir")
        .arg(d.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_exit_code_follows_the_checks() {
    let d = tempfile::tempdir().unwrap();
    let mut args = vec!["verify", "--suite", "projector"];
    args.extend(SMALL);
    let o = worm(&args, d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("verify_report.json")).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    for c in checks {
        for key in ["check_name", "status", "measured", "tolerance"] {
            assert!(!c[key].is_null(), "{key} missing in {c}");
        }
        assert_eq!(c["status"], "pass");
    }

    // The mollifier distance at k = 20 stays above its threshold.
    let mut args = vec!["verify", "--suite", "density.final"];
    args.extend(SMALL);
    let o = worm(&args, d.path());
    assert_eq!(code(&o), 1);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("verify_report.json")).unwrap()).unwrap();
    assert_eq!(report["checks"].as_array().unwrap().len(), 1);
    assert_eq!(report["passed"], false);
}

#[test]
fn flags_override_config_file() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"beta": 4.0, "L": 20, "Nx": 128, "Nj": 4, "seed": 3, "y": 0.25, "s": 0.5}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = worm(&["project", "--random", "--config", cfg, "--Nx", "64"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(d.path().join("interior.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x,gamma,re,im");
    // Nx from the flag, Nγ = 2·Nj + 1 from the file.
    assert_eq!(text.lines().count(), 1 + 64 * 9);
    let o = worm(&["project", "--random", "--config", cfg, "--y", "9"], d.path());
    assert_eq!(code(&o), 2, "y = 9 is not interior");
}

#[test]
fn kernel_eval_writes_the_series() {
    let d = tempfile::tempdir().unwrap();
    let o = worm(
        &[
            "kernel-eval",
            "--beta",
            "4",
            "--w",
            "0.3,0.5,0.2,0.1",
            "--zeta",
            "E1,0.7,0.3",
            "--tol",
            "1e-8",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let path = d.path().join("kernel_eval.csv");
    assert_eq!(header(&path), "j,re_kj,im_kj,partial_sum_re,partial_sum_im,tail_bound");
    let text = std::fs::read_to_string(&path).unwrap();
    let last: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .skip(1)
        .map(|v| v.parse().unwrap())
        .collect();
    assert!(last[4] <= 1e-8);
    let stdout = String::from_utf8_lossy(&o.stdout);
    let k_re: f64 = stdout
        .lines()
        .next()
        .unwrap()
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(k_re, last[2], "printed value is the last partial sum");
}

#[test]
fn boundary_project_is_idempotent_through_binary_files() {
    let d = tempfile::tempdir().unwrap();
    let first = d.path().join("first");
    let second = d.path().join("second");
    let mut args = vec!["boundary-project", "--random", "--format", "bin"];
    args.extend(SMALL);
    assert_eq!(code(&worm(&args, &first)), 0);
    let input = first.to_str().unwrap();
    let mut args = vec!["boundary-project", "--input", input, "--format", "bin"];
    args.extend(SMALL);
    assert_eq!(code(&worm(&args, &second)), 0);
    for e in ["E1", "E2", "E3", "E4"] {
        let a = std::fs::read(first.join(format!("{e}.bin"))).unwrap();
        let b = std::fs::read(second.join(format!("{e}.bin"))).unwrap();
        assert_eq!(a.len(), 8 + 16 * 256 * 17);
        assert_eq!(&a[..4], &256u32.to_le_bytes());
        let max_diff = a[8..]
            .chunks(8)
            .zip(b[8..].chunks(8))
            .map(|(x, y)| (f64::from_le_bytes(x.try_into().unwrap()) - f64::from_le_bytes(y.try_into().unwrap())).abs())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-12, "{e}: projection is not idempotent ({max_diff:e})");
    }
}

#[test]
fn synthesize_reads_mode_profiles() {
    let d = tempfile::tempdir().unwrap();
    let g = d.path().join("g.csv");
    let mut text = String::from("xi,j,re,im\n");
    let dxi = std::f64::consts::PI / 20.0;
    for m in 0..256 {
        let xi = (m as f64 - 128.0) * dxi;
        text.push_str(&format!("{xi:.16e},1,{:.16e},0\n", (-(xi - 0.5) * (xi - 0.5)).exp()));
    }
    std::fs::write(&g, text).unwrap();
    let mut args = vec!["synthesize", "--input", g.to_str().unwrap()];
    args.extend(SMALL);
    let o = worm(&args, d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for e in ["E1", "E2", "E3", "E4"] {
        assert_eq!(header(&d.path().join(format!("{e}.csv"))), "x,gamma,re,im");
    }
}

#[test]
fn sweep_prints_one_row_per_beta_and_check() {
    let d = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep", "--beta-range", "1.7:6.0:10", "--check", "symbol_idempotence"];
    args.extend(SMALL);
    let o = worm(&args, d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "beta,check_name,status,measured,tolerance");
    assert_eq!(csv.lines().count(), 11);
    assert!(csv.lines().skip(1).all(|l| l.contains(",pass,")));
}

#[test]
fn convergence_paths_decrease() {
    let d = tempfile::tempdir().unwrap();
    for (path, file) in [
        ("product", "convergence_product.csv"),
        ("coupled", "convergence_coupled.csv"),
    ] {
        let mut args = vec!["convergence", "--random", "--path", path];
        args.extend(SMALL);
        let o = worm(&args, d.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let text = std::fs::read_to_string(d.path().join(file)).unwrap();
        let dist: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
            .collect();
        assert!(dist.len() > 10);
        assert!(dist.windows(2).all(|w| w[1] < w[0]), "{path}: {dist:?}");
    }
}
