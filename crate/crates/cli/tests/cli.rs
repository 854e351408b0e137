use std::path::PathBuf;
use std::process::{Command, Output};

use treesec::{
    families, parse_graph, parse_poly, parse_spectrum_machine, parse_strata_report,
    secular_polynomial, singular_components, write_graph,
};
use treesec_cli::{parse_obstruction_machine, VerifySummary};

fn data(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    root.join(name).to_str().unwrap().to_owned()
}

fn treesec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treesec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = treesec(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    treesec(args).status.code().unwrap()
}

#[test]
fn data_files_match_families() {
    for (file, g) in [
        ("path2.graph", families::path(2)),
        ("path3.graph", families::path(3)),
        ("star3.graph", families::star(3)),
        ("star4.graph", families::star(4)),
        ("caterpillar7.graph", families::caterpillar7()),
    ] {
        let text = std::fs::read_to_string(data(file)).unwrap();
        assert_eq!(parse_graph(&text).unwrap(), g, "{file}");
    }
}

#[test]
fn secular_examples() {
    assert_eq!(
        stdout(&["secular", &data("interval.graph")]),
        "1 z1^2 - 1\n"
    );
    assert_eq!(
        stdout(&["secular", &data("interval_nd.graph")]),
        "1 z1^2 + 1\n"
    );
    assert_eq!(
        stdout(&["secular", &data("path2.graph")]),
        "1 z1^2 z2^2 - 1\n"
    );
    let star = stdout(&["secular", &data("star3.graph")]);
    let p = parse_poly(star.trim(), Some(3)).unwrap();
    assert_eq!(p, secular_polynomial(&families::star(3)).unwrap());
}

#[test]
fn strata_examples() {
    let star = stdout(&["strata", &data("star3.graph"), "--m", "2"]);
    assert_eq!(star.matches("stratum ").count(), 1);
    assert_eq!(
        stdout(&["strata", &data("path3.graph"), "--m", "2"]),
        "none\n"
    );

    let cat = stdout(&["strata", &data("caterpillar7.graph"), "--m", "2"]);
    let g = families::caterpillar7();
    let parsed = parse_strata_report(&g, &cat).unwrap();
    let deleted: Vec<Vec<treesec::VertexId>> = parsed
        .iter()
        .filter(|s| s.codim == 3)
        .map(|s| s.h.deleted().iter().copied().collect())
        .collect();
    assert_eq!(deleted, vec![vec![1], vec![2], vec![3]]);
}

#[test]
fn strata_output_round_trips() {
    let g = families::caterpillar7();
    let text = stdout(&["strata", &data("caterpillar7.graph")]);
    let parsed = parse_strata_report(&g, &text).unwrap();
    assert_eq!(parsed, singular_components(&g).unwrap());
    assert_eq!(treesec::write_strata_report(&parsed), text);
}

#[test]
fn obstruction_examples() {
    let star = stdout(&[
        "obstruction",
        &data("star4.graph"),
        "--relations",
        &data("star4.rel"),
    ]);
    assert!(star.ends_with("verdict: OBSTRUCTED\n"), "{star}");
    assert!(star.contains("product 8\n"));

    let path = stdout(&[
        "obstruction",
        &data("path3.graph"),
        "--relations",
        &data("star3.rel"),
    ]);
    assert!(path.ends_with("verdict: INCONCLUSIVE\n"), "{path}");

    let cat = stdout(&[
        "obstruction",
        &data("caterpillar7.graph"),
        "--relations",
        &data("caterpillar7.rel"),
        "--format",
        "machine",
    ]);
    let rec = parse_obstruction_machine(&cat, 7).unwrap();
    let products: Vec<i64> = rec.pairings.iter().filter_map(|p| p.3).collect();
    assert_eq!(products.len(), 3);
}

#[test]
fn obstruction_output_round_trips() {
    let g = families::star(4);
    let rel = treesec::RelationLattice::new(4, &[vec![0, 0, 0, 1]]).unwrap();
    let rep = treesec::discreteness_obstruction(&g, &rel).unwrap();
    let text = stdout(&[
        "obstruction",
        &data("star4.graph"),
        "--relations",
        &data("star4.rel"),
        "--format",
        "machine",
    ]);
    let rec = parse_obstruction_machine(&text, 4).unwrap();
    assert_eq!(rec, treesec_cli::ObstructionRecord::from_report(&rep));
    assert_eq!(treesec_cli::write_obstruction_machine(&rep), text);
}

#[test]
fn spectrum_human_and_machine() {
    let human = stdout(&[
        "spectrum",
        &data("star3.graph"),
        "--lengths",
        "1,1,1",
        "--kmax",
        "10",
    ]);
    let lines: Vec<&str> = human.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("k=1.570796326795 mult=2 "));
    assert!(lines[1].starts_with("k=3.141592653590 mult=1 "));
    assert!(lines[6].starts_with("mingap_estimate="));

    let text = stdout(&[
        "spectrum",
        &data("star3.graph"),
        "--lengths",
        "1,1,1.05",
        "--kmax",
        "4",
        "--format",
        "machine",
    ]);
    let rep = parse_spectrum_machine(&text).unwrap();
    assert_eq!(treesec::write_spectrum_machine(&rep), text);
    let ks: Vec<f64> = rep.eigenvalues.iter().map(|e| e.k).collect();
    assert_eq!(ks.len(), 3);
    assert!((ks[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    assert!(ks[1] - ks[0] < 0.06);
}

#[test]
fn mingap_interval() {
    let out = stdout(&[
        "mingap",
        &data("interval.graph"),
        "--lengths",
        "1",
        "--window",
        "0,20",
        "--format",
        "machine",
    ]);
    let v: f64 = out
        .trim()
        .strip_prefix("mingap_estimate\t")
        .unwrap()
        .parse()
        .unwrap();
    assert!((v - std::f64::consts::PI).abs() < 1e-9);
}

#[test]
fn verify_suites_pass() {
    let human = stdout(&[
        "verify",
        &data("star3.graph"),
        "--seed",
        "1",
        "--samples",
        "100",
    ]);
    assert!(human.starts_with("multiplicity-formula: 100/100 agree; reconstruction: max rel err "));

    let text = stdout(&[
        "verify",
        &data("caterpillar7.graph"),
        "--seed",
        "7",
        "--samples",
        "30",
        "--format",
        "machine",
    ]);
    let s = VerifySummary::parse_machine(&text).unwrap();
    assert_eq!(s.to_machine(), text);
    assert_eq!(s.agree, 30);
    assert!(s.max_error < 1e-8);
}

#[test]
fn verify_is_deterministic() {
    let args = [
        "verify",
        &data("star4.graph"),
        "--seed",
        "3",
        "--samples",
        "20",
        "--format",
        "machine",
    ];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["secular", "/nonexistent/file.graph"]), 1);
    assert_eq!(code(&["verify", &data("star3.graph"), "--samples", "3"]), 2);
    assert_eq!(
        code(&[
            "spectrum",
            &data("star3.graph"),
            "--lengths",
            "1,x",
            "--kmax",
            "3"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "obstruction",
            &data("star3.graph"),
            "--relations",
            &data("star4.rel")
        ]),
        2
    );
    assert_eq!(
        code(&[
            "spectrum",
            &data("star3.graph"),
            "--lengths",
            "1,1",
            "--kmax",
            "3"
        ]),
        3
    );
    assert_eq!(
        code(&[
            "spectrum",
            &data("star3.graph"),
            "--lengths",
            "1,-1,1",
            "--kmax",
            "3"
        ]),
        3
    );
    assert_eq!(
        code(&[
            "mingap",
            &data("interval.graph"),
            "--lengths",
            "1",
            "--window",
            "0,2"
        ]),
        3
    );

    let dir = std::env::temp_dir().join(format!("treesec-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("cycle.graph");
    std::fs::write(&bad, "graph n=3\nedge 1 1 2\nedge 2 2 3\nedge 3 3 1\n").unwrap();
    assert_eq!(code(&["secular", bad.to_str().unwrap()]), 3);
    let garbled = dir.join("garbled.graph");
    std::fs::write(&garbled, "graph n=1\nedge 1 one 2\n").unwrap();
    let out = treesec(&["secular", garbled.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn tolerance_flags_are_accepted() {
    let out = stdout(&[
        "spectrum",
        &data("interval.graph"),
        "--lengths",
        "1",
        "--kmax",
        "7",
        "--tol-rank",
        "1e-7",
        "--tol-root",
        "1e-9",
    ]);
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn graph_file_is_canonical() {
    let text = std::fs::read_to_string(data("path3.graph")).unwrap();
    assert_eq!(write_graph(&parse_graph(&text).unwrap()), text);
}
