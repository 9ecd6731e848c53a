use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nodal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nodal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn complete_graph_from_p_one() {
    let o = nodal(&["gen-gnp", "--n", "5", "--p", "1", "--seed", "7"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# nodal "));
    assert!(text.lines().next().unwrap().contains("seed=7"));
    let lines = body(&text);
    assert_eq!(lines[0], "5 10");
    assert_eq!(lines.len(), 11);
}

#[test]
fn generated_graph_round_trips_through_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let o = nodal(&[
        "gen-regular",
        "--n",
        "12",
        "--d",
        "3",
        "--seed",
        "4",
        "--out",
        g.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = nodal(&["spectrum", "--graph", g.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines = body(&text);
    assert!(lines[0].starts_with("index,eigenvalue,x0,"));
    assert_eq!(lines.len(), 13);
    let top: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((top - 3.0).abs() < 1e-9);
}

#[test]
fn path_with_zero_has_two_weak_domains() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", "3 2\n0 1\n1 2\n");
    let f = write(dir.path(), "f.csv", "1\n0\n-1\n");
    let o = nodal(&["domains", "--graph", &g, "--vector", &f, "--kind", "weak"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(
        body(&text),
        vec!["kind,sign,size,vertices", "weak,+,2,0;1", "weak,-,2,1;2"]
    );

    let o = nodal(&[
        "domains", "--graph", &g, "--vector", &f, "--kind", "strong", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["count"], 2);

    let o = nodal(&["summary", "--graph", &g, "--vector", &f]);
    assert_eq!(body(&stdout(&o))[1], "2,2,0,1,2,2,0");
}

#[test]
fn vector_length_must_match() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", "3 2\n0 1\n1 2\n");
    let f = write(dir.path(), "f.csv", "1\n-1\n");
    let o = nodal(&["domains", "--graph", &g, "--vector", &f]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn constants_at_one_half() {
    let o = nodal(&["constants", "--p", "0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines = body(&text);
    assert!(lines[0].starts_with("p,k,"));
    assert!(lines[1].starts_with("0.5,46,"), "{}", lines[1]);
    let o = nodal(&["constants", "--p", "0.5", "--grid", "coarse"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn kp_values() {
    let o = nodal(&["kp", "--p", "0.5,0.3,0.21"]);
    assert_eq!(body(&stdout(&o)), vec!["p,k_p", "0.5,1", "0.3,1", "0.21,2"]);
}

#[test]
fn exit_codes() {
    assert_eq!(nodal(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(
        nodal(&["gen-gnp", "--n", "5", "--p", "0.5", "--bogus"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        nodal(&["gen-gnp", "--n", "5", "--p", "1.5"]).status.code(),
        Some(1)
    );
    assert_eq!(
        nodal(&["exp-fig1", "--xi-list", "1"]).status.code(),
        Some(1)
    );
    let o = nodal(&["spectrum", "--graph", "/nonexistent/g.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert_eq!(nodal(&["--help"]).status.code(), Some(0));
}

#[test]
fn experiment_output_is_independent_of_threads_and_path() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str, format: &str| {
        let path = dir.path().join(name);
        let o = nodal(&[
            "exp-gnp",
            "--n",
            "30",
            "--trials",
            "4",
            "--seed",
            "11",
            "--threads",
            threads,
            "--format",
            format,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(path).unwrap()
    };
    assert_eq!(run("1", "a.csv", "csv"), run("3", "b.csv", "csv"));
    assert_eq!(run("1", "a.json", "json"), run("2", "b.json", "json"));
    let text = String::from_utf8(run("1", "c.csv", "csv")).unwrap();
    assert!(text
        .lines()
        .any(|l| l == "trial,index,weak,strong,P,N,E,Z,EcapZ"));
    assert!(text
        .lines()
        .any(|l| l.starts_with("# config = ") && l.contains("\"seed\":11")));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.conf",
        "# fig2 settings\nn_list = 8,12\ntrials = 6\nseed = 5\n",
    );
    let o = nodal(&["exp-fig2", "--config", &cfg, "--seed", "9"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert!(header.contains("seed=9"));
    assert!(header.contains("--trials 6"));
    assert_eq!(body(&text).len(), 3);
    assert_eq!(body(&text)[0], "n,trials,frac_three_domains");
    assert!(body(&text)[1].starts_with("8,6,"));
    let bad = write(dir.path(), "bad.conf", "frobnicate = 1\n");
    assert_eq!(
        nodal(&["exp-fig2", "--config", &bad]).status.code(),
        Some(1)
    );
}

#[test]
fn json_experiment_report() {
    let o = nodal(&[
        "exp-fact",
        "--n",
        "60",
        "--k-list",
        "1,2",
        "--trials",
        "5",
        "--records",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["meta"]["seed"], 1);
    assert_eq!(v["result"]["config"]["k"], serde_json::json!([1, 2]));
    assert_eq!(v["result"]["table"]["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["result"]["records"]["rows"].as_array().unwrap().len(), 10);
}
