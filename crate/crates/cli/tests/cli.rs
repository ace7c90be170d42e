use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const EPOCH: &str = "1700000000";

fn knownet(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_knownet"));
    cmd.args(args).env("SOURCE_DATE_EPOCH", EPOCH).env_remove("KNOWNET_THREADS");
    if let Some(t) = threads {
        cmd.env("KNOWNET_THREADS", t);
    }
    cmd.output().unwrap()
}

fn ok(args: &[&str]) {
    let out = knownet(args, None);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn code(args: &[&str]) -> (i32, String) {
    let out = knownet(args, None);
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Work {
    _tmp: TempDir,
    root: PathBuf,
}

impl Work {
    fn new() -> Self {
        let tmp = TempDir::new().unwrap();
        let root = tmp.path().to_path_buf();
        Work { _tmp: tmp, root }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// A small simulated network directory.
    fn simulated(&self, name: &str, q: &str) -> PathBuf {
        let dir = self.path(name);
        ok(&["simulate", "--p", "0.4", "--w", "0.3", "--a", "1", "--q", q, "--n", "600", "--seed", "2", "--out", s(&dir)]);
        dir
    }
}

#[test]
fn ingest_metamath_fixture() {
    let w = Work::new();
    let out = w.path("mm");
    ok(&["ingest", "--format", "metamath", "--input", s(&fixture("demo0.mm")), "--clean", "--out", s(&out)]);
    let names: Vec<String> = snapshot(&out).into_keys().collect();
    assert_eq!(names, ["cleaning.json", "edges.txt", "manifest.json", "nodes.csv"]);
    let nodes = fs::read_to_string(out.join("nodes.csv")).unwrap();
    assert_eq!(nodes, "id,label,date\n0,a1,\n1,a2,\n2,mp,\n3,th1,\n");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("cleaning.json")).unwrap()).unwrap();
    assert_eq!(report["cleaning"]["output_edges"], 3);
}

#[test]
fn ingest_edge_list_with_metadata_and_cleaning() {
    let w = Work::new();
    let edges = w.path("e.txt");
    // 30 -> 20 -> 10 and a back edge 10 -> 30 forming a cycle; 99 is separate
    fs::write(&edges, "# test\n30 20\n20 10\n10 30\n99 98\n").unwrap();
    let meta = w.path("m.csv");
    fs::write(&meta, "id,label,date\n10,first,1990\n20,second,1995\n30,third,2000\n").unwrap();
    let out = w.path("net");
    ok(&["ingest", "--format", "edgelist", "--input", s(&edges), "--metadata", s(&meta), "--clean", "--out", s(&out)]);
    let nodes = fs::read_to_string(out.join("nodes.csv")).unwrap();
    assert_eq!(nodes, "id,label,date,source_id\n0,first,1990,10\n1,second,1995,20\n2,third,2000,30\n");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("cleaning.json")).unwrap()).unwrap();
    assert_eq!(report["cleaning"]["date_violations_removed"], 1);
    assert_eq!(report["edges"], 2);
}

#[test]
fn exit_codes() {
    let w = Work::new();
    // usage errors
    assert_eq!(code(&["ingest", "--format", "edgelist"]).0, 2);
    assert_eq!(code(&["frobnicate"]).0, 2);
    let missing = w.path("nope.txt");
    let out = w.path("o1");
    assert_eq!(code(&["ingest", "--format", "edgelist", "--input", s(&missing), "--out", s(&out)]).0, 2);
    assert!(!out.exists(), "no partial outputs");
    // parse errors name file and line
    let bad = w.path("bad.txt");
    fs::write(&bad, "1 2\n3 x\n").unwrap();
    let (c, msg) = code(&["ingest", "--format", "edgelist", "--input", s(&bad), "--out", s(&out)]);
    assert_eq!(c, 2);
    assert!(msg.contains("bad.txt:2:"), "{msg}");
    assert!(!out.exists());
    // empty network dir
    let empty = w.path("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(code(&["analyze", "--network", s(&empty), "--out", s(&out)]).0, 2);
    // date mode without dates
    let sim = w.simulated("sim", "0.1");
    let (c, msg) = code(&["analyze", "--network", s(&sim), "--disruption", "date", "--out", s(&out)]);
    assert_eq!(c, 2, "{msg}");
    assert!(!out.exists());
    // computation error: infeasible calibration reports the achieved range
    let (c, msg) = code(&[
        "simulate", "--q", "0", "--n", "300", "--calibrate", "--target-m", "40000", "--w", "0", "--a", "1", "--out", s(&out),
    ]);
    assert_eq!(c, 1, "{msg}");
    assert!(msg.contains("achievable"), "{msg}");
    assert!(!out.exists());
    // report needs two inputs
    assert_eq!(code(&["report", "--inputs", s(&sim), "--out", s(&out)]).0, 2);
    // existing non-empty output directory is refused without --force
    assert_eq!(code(&["analyze", "--network", s(&sim), "--out", s(&sim)]).0, 2);
}

#[test]
fn single_realization_has_null_zscore() {
    let w = Work::new();
    let sim = w.simulated("sim", "0.1");
    let out = w.path("null");
    ok(&["null", "--network", s(&sim), "--ensemble", "1", "--metric", "clustering", "--out", s(&out)]);
    let z: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("zscores.json")).unwrap()).unwrap();
    assert!(z["results"][0]["zscore"].is_null());
    assert!(z["results"][0]["real"].is_number());
}

#[test]
fn seeded_commands_rerun_byte_identically() {
    let w = Work::new();
    let sim = w.path("sim");
    let an = w.path("an");
    let nl = w.path("nl");
    let commands: Vec<Vec<String>> = vec![
        vec!["simulate", "--p", "0.5", "--w", "0.3", "--a", "1", "--q", "0.1", "--n", "800", "--seed", "4", "--out", s(&sim)],
        vec![
            "analyze", "--network", s(&sim), "--metrics", "--path-lengths", "--self-degree", "--disruption", "windowed", "--gini",
            "--groups", "popularity", "--groups", "age", "--bootstrap", "--replicates", "300", "--seed", "9", "--out", s(&an),
        ],
        vec!["null", "--network", s(&sim), "--ensemble", "4", "--metric", "disruption-corr", "--metric", "clustering", "--seed", "3", "--out", s(&nl)],
    ]
    .into_iter()
    .map(|c| c.into_iter().map(str::to_owned).collect())
    .collect();
    for cmd in &commands {
        let mut args: Vec<&str> = cmd.iter().map(String::as_str).collect();
        let out = PathBuf::from(args.last().unwrap());
        let first = knownet(&args, Some("1"));
        assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
        let a = snapshot(&out);
        args.push("--force");
        let second = knownet(&args, Some("3"));
        assert!(second.status.success(), "{}", String::from_utf8_lossy(&second.stderr));
        let b = snapshot(&out);
        assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
        for (name, bytes) in &a {
            if name == "manifest.json" {
                continue; // the second run's argument list carries --force
            }
            assert!(bytes == &b[name], "{name} differs between runs of {:?}", args[0]);
        }
        let third = knownet(&args, Some("2"));
        assert!(third.status.success());
        assert_eq!(b, snapshot(&out), "{} not byte-identical", args[0]);
    }
}

#[test]
fn manifest_records_inputs_seeds_and_outputs() {
    let w = Work::new();
    let sim = w.simulated("sim", "0.1");
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(sim.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "simulate");
    assert_eq!(m["timestamp"], 1_700_000_000u64);
    assert_eq!(m["seeds"]["generation"], 2);
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(m["results"]["params"]["q"], 0.1);
    let outputs: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|o| o["path"].as_str().unwrap()).collect();
    assert_eq!(outputs, ["edges.txt", "labeled_edges.txt", "linkstats.json", "nodes.csv"]);
    let an = w.path("an");
    ok(&["analyze", "--network", s(&sim), "--out", s(&an)]);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(an.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["inputs"].as_array().unwrap().len(), 2);
}

#[test]
fn report_tags_provenance() {
    let w = Work::new();
    let sim = w.simulated("sim", "0.1");
    let edges = w.path("e.txt");
    fs::write(&edges, "1 0\n2 0\n2 1\n3 1\n3 2\n4 3\n").unwrap();
    let real = w.path("real");
    ok(&["ingest", "--format", "edgelist", "--input", s(&edges), "--clean", "--out", s(&real)]);
    let (a, b) = (w.path("a"), w.path("b"));
    ok(&["analyze", "--network", s(&real), "--metrics", "--disruption", "full", "--out", s(&a)]);
    ok(&["analyze", "--network", s(&sim), "--metrics", "--out", s(&b)]);
    let rp = w.path("rp");
    ok(&["report", "--inputs", s(&a), s(&b), "--out", s(&rp)]);
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(rp.join("report.json")).unwrap()).unwrap();
    assert_eq!(r["columns"][0]["provenance"], "empirical");
    assert_eq!(r["columns"][1]["provenance"], "simulated");
    let nodes = r["rows"].as_array().unwrap().iter().find(|row| row["metric"] == "nodes").unwrap();
    assert_eq!(nodes["values"], serde_json::json!([5, 600]));
    let csv = fs::read_to_string(rp.join("report.csv")).unwrap();
    assert!(csv.starts_with("metric,a,b\nnodes,5,600\n"), "{csv}");
    // an analysis without --metrics does not fit the report schema
    let c = w.path("c");
    ok(&["analyze", "--network", s(&sim), "--out", s(&c)]);
    assert_eq!(code(&["report", "--inputs", s(&a), s(&c), "--out", s(&w.path("rp2"))]).0, 2);
}

#[test]
fn presets_and_thread_flag() {
    let w = Work::new();
    let out = w.path("p");
    ok(&["simulate", "--preset", "hep-th", "--n", "500", "--threads", "2", "--out", s(&out)]);
    let st: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("linkstats.json")).unwrap()).unwrap();
    assert_eq!(st["params"]["q"], 0.125);
    assert_eq!(st["node_count"], 500);
    assert_eq!(code(&["simulate", "--preset", "nope", "--out", s(&w.path("x"))]).0, 2);
    assert_eq!(code(&["simulate", "--preset", "theorem", "--threads", "0", "--out", s(&w.path("x"))]).0, 2);
}
