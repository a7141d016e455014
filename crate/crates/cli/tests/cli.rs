use std::path::PathBuf;
use std::process::{Command, Output};

fn walshlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walshlab"))
        .args(args)
        .env_remove("WALSHLAB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("walshlab-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn identities_pass_with_one_row_per_family() {
    let o = walshlab(&["identities", "--n-max", "32", "--resolution", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lemmas: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    for family in ["identity-triangular", "identity-dirichlet", "identity-fejer", "tiling", "identity-mean-paths"] {
        assert_eq!(lemmas.iter().filter(|&&l| l == family).count(), 1, "{family}");
    }
}

#[test]
fn delta1_reports_the_exact_special_case() {
    let o = walshlab(&["delta1", "--A", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("lemma,params,measured_num,measured_den,bound_num,bound_den,ratio_decimal,verdict,ms\n"));
    assert!(text.contains("delta1-special,A=3;n=8,1,8,1,8,"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("delta1,A=3,") && l.ends_with(",pass,0")));
}

#[test]
fn json_mirrors_csv() {
    let o = walshlab(&["l1-table", "--n-min", "2", "--n-max", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["lemma"], "l1");
    assert_eq!(rows[0]["bound_num"], "1");
    assert_eq!(rows[0]["bound_den"], "2");
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = ["supparts", "--a", "1", "--A-min", "1", "--A-max", "3", "--sweep"];
    let one = walshlab(&[&args[..], &["--threads", "1"]].concat());
    let many = walshlab(&[&args[..], &["--threads", "8"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
    let q1 = walshlab(&["quasi", "--N", "32", "--a", "2", "--u1", "1", "--u2", "3", "--sweep", "--threads", "1"]);
    let q8 = walshlab(&["quasi", "--N", "32", "--a", "2", "--u1", "1", "--u2", "3", "--sweep", "--threads", "8"]);
    assert_eq!(q1.stdout, q8.stdout);
    assert!(!q1.stdout.is_empty());
}

#[test]
fn invalid_input_exits_two_naming_the_parameter() {
    for args in [
        &["delta1", "--A", "11"][..],
        &["patterns", "--A", "5"],
        &["corf", "--t2", "4", "--s", "4"],
        &["quasi", "--f", "random:1:3", "--N", "8"],
        &["converge", "--f", "bogus:1", "--n", "4"],
        &["no-such-command"],
        &["delta1", "--A", "3", "--bogus"],
        &[],
    ] {
        let o = walshlab(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
    let o = walshlab(&["corf", "--t2", "4", "--s", "4"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("t2"));
}

#[test]
fn failing_check_exits_one() {
    let dir = scratch("fail");
    let path = dir.join("failing.toml");
    std::fs::write(&path, "[[run]]\ncommand = \"quasi\"\nN = 128\nf = \"meanzero:2:5:3:2:1\"\n").unwrap();
    let o = walshlab(&["--sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("quasi-increments"));
    assert!(stdout(&o).lines().any(|l| l.starts_with("quasi-increments") && l.contains(",fail,")));
}

#[test]
fn config_file_runs_every_entry_into_one_table() {
    let dir = scratch("config");
    let path = dir.join("batch.toml");
    std::fs::write(
        &path,
        "format = \"csv\"\nseed = 5\n\n[[run]]\ncommand = \"delta1\"\nA = 2\n\n[[run]]\ncommand = \"yano\"\ns = 3\nt1 = 1\n",
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_walshlab"))
        .args(["--config", path.to_str().unwrap()])
        .env("WALSHLAB_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(dir.join("batch.csv")).unwrap();
    assert_eq!(text.matches("lemma,params").count(), 1);
    assert!(text.contains("delta1-special,A=2"));
    assert!(text.contains("yano-support,t1=1;s=3"));
}

#[test]
fn invalid_entry_in_run_file_stops_before_computing() {
    let dir = scratch("invalid");
    let path = dir.join("bad.toml");
    let out = dir.join("out.csv");
    std::fs::write(
        &path,
        "[[run]]\ncommand = \"quadruples\"\nA = 8\n\n[[run]]\ncommand = \"marc\"\ns = 9\n",
    )
    .unwrap();
    let start = std::time::Instant::now();
    let o = walshlab(&["--config", path.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("marc"));
    assert!(!out.exists());
    assert!(start.elapsed().as_secs() < 5);
}

#[test]
fn output_flag_writes_the_file() {
    let dir = scratch("output");
    let out = dir.join("nested").join("b1b2.csv");
    let o = walshlab(&["b1b2", "--s", "3", "--sweep", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("b1b2-additivity")).count(), 3);
}
