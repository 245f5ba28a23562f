use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str = "alpha,beta,eps,p,tau,N,t_final,e1,e1_max,order,energy_dev,iters_max";

fn ewi(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ewi-fkg"))
        .arg("--output-dir")
        .arg(out)
        .args(args)
        .env_remove("EWI_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn missing_config_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = ewi(dir.path(), &["--config", "no/such/file.toml", "solve"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("no/such/file.toml"), "{}", stderr(&out));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[study]\nalpah = [1.5]\n").unwrap();
    let out = ewi(dir.path(), &["--config", cfg.to_str().unwrap(), "solve"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("alpah"), "{}", stderr(&out));
}

#[test]
fn invalid_parameter_names_its_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = ewi(dir.path(), &["converge-time", "--alpha", "2.5"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("alpha"), "{}", stderr(&out));

    let out = ewi(dir.path(), &["solve", "--n", "31"]);
    assert!(!out.status.success());
}

#[test]
fn check_and_subcommand_are_exclusive() {
    let dir = tempfile::tempdir().unwrap();
    let out = ewi(dir.path(), &["--check", "solve"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--check"));
}

#[test]
fn solve_writes_energy_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = ewi(
        dir.path(),
        &["--plot", "solve", "--alpha", "1.5", "--n", "16", "--tau", "0.05", "--t-final", "0.5"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("solve.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(HEADER));
    assert_eq!(csv.lines().count(), 3);
    let field = fs::read_to_string(dir.path().join("solve_field.csv")).unwrap();
    assert_eq!(field.lines().count(), 17);
    assert!(dir.path().join("solve.gp").exists());
}

#[test]
fn converge_time_writes_orders_and_caches_the_reference() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "converge-time",
        "--tau",
        "0.1,0.05,0.025",
        "--n",
        "16",
        "--ref-tau",
        "0.001",
        "--ref-n",
        "16",
    ];
    let out = ewi(dir.path(), &args);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("converge_time.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 4);
    let order: f64 = lines[3].split(',').nth(9).unwrap().parse().unwrap();
    assert!((1.8..2.2).contains(&order), "{order}");
    assert_eq!(fs::read_dir(dir.path().join("references")).unwrap().count(), 1);

    let again = ewi(dir.path(), &args);
    assert!(again.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("converge_time.csv")).unwrap(), csv);
}

#[test]
fn config_file_is_layered_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("energy.toml");
    fs::write(
        &cfg,
        "[study]\nalpha = [1.8]\ntau = [0.05, 0.025]\nn = [16]\nt_final = 1.0\n[output]\nfull_precision = true\n",
    )
    .unwrap();
    let out = ewi(dir.path(), &["--config", cfg.to_str().unwrap(), "energy", "--alpha", "1.3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("energy.csv")).unwrap();
    let first = csv.lines().nth(1).unwrap();
    let alpha: f64 = first.split(',').next().unwrap().parse().unwrap();
    assert_eq!(alpha, 1.3, "{first}");
}

#[test]
fn dump_2d_writes_one_file_per_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = ewi(
        dir.path(),
        &["dump2d", "--alpha", "1.5", "--n", "8,8", "--tau", "0.05", "--times", "0,0.1"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    for t in ["0", "0p1"] {
        let csv = fs::read_to_string(dir.path().join(format!("dump_alpha1p5_t{t}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 65);
    }
}
