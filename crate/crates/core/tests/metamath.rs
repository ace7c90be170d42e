use std::fs::File;

use knownet::ingest::metamath::{kind_counts, parse_metamath, theorem_network, StatementKind};
use knownet::topo::topological_generations;
use knownet::NodeId;

fn fixture(name: &str) -> File {
    File::open(format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn check(name: &str) {
    let st = parse_metamath(fixture(name)).unwrap();
    let labels: Vec<&str> = st.iter().map(|s| s.label.as_str()).collect();
    assert_eq!(labels, ["tze", "tpl", "weq", "wim", "a1", "a2", "mp", "th1"]);
    let counts = kind_counts(&st);
    assert_eq!(counts[&StatementKind::Syntax], 4);
    assert_eq!(counts[&StatementKind::Axiom], 3);
    assert_eq!(counts[&StatementKind::Theorem], 1);
    let th1 = st.iter().find(|s| s.label == "th1").unwrap();
    assert_eq!(th1.proof_labels, ["tze", "tpl", "weq", "a2", "wim", "a1", "mp"]);

    let g = theorem_network(&st).unwrap();
    let names: Vec<&str> = g.nodes().map(|v| g.label(v).unwrap()).collect();
    assert_eq!(names, ["a1", "a2", "mp", "th1"]);
    assert_eq!(g.successors(NodeId(3)), [NodeId(0), NodeId(1), NodeId(2)]);
    assert_eq!(g.edge_count(), 3);
    assert_eq!(topological_generations(&g).unwrap().as_slice(), [0, 0, 0, 1]);
}

#[test]
fn demo_database() {
    check("demo0.mm");
}

#[test]
fn compressed_proof_gives_same_network() {
    check("demo0-compressed.mm");
}
