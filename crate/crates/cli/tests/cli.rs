use std::path::PathBuf;

use structstab_cli::graph_file::parse_graph_file;
use structstab_cli::run_command;
use structstab_cli::sweep_csv::{read_rows, rows_to_string};

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("structstab").chain(args.iter().copied());
    let code = run_command(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp_file(name: &str, text: &str) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn check_single_looped_node() {
    let f = temp_file("one.txt", "n 1\nl 1\n");
    let (code, out, _) = run(&["check", &f]);
    assert_eq!(code, 0);
    assert!(out.contains("decomposition=(1)\n"));
    assert_eq!(out.lines().last(), Some("STABLE"));
}

#[test]
fn check_reports_unstable_certificates() {
    let f = temp_file("triangle.txt", "n 3\ne 1 2\ne 2 3\ne 1 3\n");
    let (code, out, _) = run(&["check", &f]);
    assert_eq!(code, 0);
    assert!(out.contains("L=false\nH=true\n"));
    assert!(out.contains("loopless_component={1,2,3}"));
    assert_eq!(out.lines().last(), Some("UNSTABLE"));
}

#[test]
fn check_nested_digraph() {
    let f = temp_file("nested.txt", "n 3\nd 1 2\nd 2 1\nd 3 2\nd 1 3\nl 2\n");
    let (code, out, _) = run(&["check", &f]);
    assert_eq!(code, 0);
    assert!(out.contains("nested_chain={2} < {1,2} < {1,2,3}"));
    assert_eq!(out.lines().last(), Some("STABLE"));
}

#[test]
fn thin_star() {
    let f = temp_file("star.txt", "n 4\ne 1 4\ne 2 4\ne 3 4\n");
    assert_eq!(run(&["thin", &f]), (0, "F_2, I={1,2}, N(I)={4}\n".into(), String::new()));
    let g = temp_file("edge.txt", "n 2\ne 1 2\n");
    let (code, out, _) = run(&["thin", &g]);
    assert_eq!((code, out.as_str()), (0, "decomposition=(1 2)\nNOT_THIN\n"));
}

#[test]
fn asymptote_values() {
    let (code, out, _) = run(&["asymptote", "--model", "a", "--regime", "critical:0", "--q", "constant:0.5"]);
    assert_eq!((code, out.as_str()), (0, "0.606531\n"));
    let (_, out, _) = run(&["asymptote", "--model", "a", "--regime", "critical", "--c", "0", "--q", "scaled", "--mu", "1"]);
    assert_eq!(out, "0.232544\n");
    let (_, out, _) = run(&["asymptote", "--model", "b", "--regime", "critical:0", "--M", "constant:2"]);
    assert_eq!(out, "0.367879\n");
    let (_, out, _) = run(&["asymptote", "--model", "b", "--regime", "sparse", "--M", "linear:0.5"]);
    assert_eq!(out, "0\n");
}

#[test]
fn exit_codes() {
    let bad = temp_file("mixed.txt", "n 2\ne 1 2\nd 2 1\n");
    let (code, _, err) = run(&["check", &bad]);
    assert_eq!(code, 1);
    assert!(err.contains("mixed edge kinds at line 3"), "{err}");
    assert_eq!(run(&["check", "/nonexistent/graph.txt"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["check"]).0, 2);
    assert_eq!(run(&["sample", "--model", "a", "--n", "5", "--p", "0.5", "--q", "0.5"]).0, 2);
    assert_eq!(run(&["sample", "--model", "a", "--n", "5", "--p", "0.5", "--seed", "1"]).0, 2);
    assert_eq!(run(&["sample", "--model", "a", "--n", "5", "--p", "0.5", "--N", "3", "--q", "0", "--seed", "1"]).0, 2);
    assert_eq!(run(&["sample", "--model", "a", "--n", "5", "--p", "1.5", "--q", "0", "--seed", "1"]).0, 1);
    assert_eq!(run(&["sample", "--model", "b", "--n", "5", "--N", "11", "--M", "0", "--seed", "1"]).0, 1);
    assert_eq!(run(&["asymptote", "--model", "a", "--regime", "critical:0", "--M", "linear:1"]).0, 2);
    assert_eq!(run(&["asymptote", "--model", "a", "--regime", "critical:0", "--q", "constant:2"]).0, 1);
    assert_eq!(run(&["sweep", "--model", "a", "--n", "10", "--trials", "5", "--seed", "1", "--q", "0.5"]).0, 2);
    assert_eq!(run(&["sweep", "--model", "a", "--n", "10", "--trials", "5", "--seed", "1", "--p", "0.5", "--q", "0.1", "--mu", "1"]).0, 2);
    assert_eq!(run(&["check", &bad, "--threads", "0"]).0, 2);
    let big = temp_file("big.txt", "n 17\nl 1\n");
    assert_eq!(run(&["oracle", &big, "--seed", "1"]).0, 1);
    let digraph = temp_file("arc.txt", "n 2\nd 1 2\n");
    assert_eq!(run(&["thin", &digraph]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn sample_round_trips_through_graph_file() {
    for args in [
        vec!["sample", "--model", "a", "--n", "30", "--c", "0", "--q", "0.2", "--seed", "4"],
        vec!["sample", "--model", "b", "--n", "30", "--N", "50", "--M", "3", "--seed", "4"],
    ] {
        let (code, out, _) = run(&args);
        assert_eq!(code, 0);
        assert_eq!(parse_graph_file(&out).unwrap().serialize(), out);
        assert_eq!(run(&args).1, out);
    }
    let (_, out, _) = run(&["sample", "--model", "b", "--n", "30", "--N", "50", "--M", "3", "--seed", "4"]);
    let text: Vec<&str> = out.lines().collect();
    assert_eq!(text.iter().filter(|l| l.starts_with("e ")).count(), 50);
    assert_eq!(text.iter().filter(|l| l.starts_with("l ")).count(), 3);
}

#[test]
fn sweep_csv_matches_grid() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("sweep.csv");
    let p = path.to_str().unwrap();
    let args = [
        "sweep", "--model", "a", "--n", "40", "--trials", "100", "--seed", "3", "--c", "-1,0,2",
        "--q", "scaled,constant", "--mu", "0.5,1", "--out", p,
    ];
    let (code, out, _) = run(&args);
    assert_eq!((code, out.as_str()), (0, ""));
    let text = std::fs::read_to_string(&path).unwrap();
    let rows = read_rows(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 3 * 4);
    assert_eq!(rows_to_string(&rows).unwrap(), text);
    assert!(rows.iter().all(|r| r.asymptote.is_some() && r.edges.is_none()));
    assert!(rows.iter().all(|r| r.ci_low <= r.p_stable && r.p_stable <= r.ci_high));

    let (code, out, _) = run(&[
        "sweep", "--model", "b", "--n", "40", "--trials", "50", "--seed", "3", "--N", "60,80",
        "--M", "1,5,linear:0.5",
    ]);
    assert_eq!(code, 0);
    let rows = read_rows(out.as_bytes()).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[2].loops, Some(20));
    assert!(rows.iter().all(|r| r.asymptote.is_none() && r.c.is_none()));
}

#[test]
fn oracle_finds_witness_for_stable_pair() {
    let f = temp_file("pair.txt", "n 2\ne 1 2\nl 1\nl 2\n");
    let (code, out, _) = run(&["oracle", &f, "--seed", "5"]);
    assert_eq!(code, 0);
    assert!(out.contains("structural_det_zero=false"));
    assert_eq!(out.lines().filter(|l| l.starts_with("row=")).count(), 2);
    assert_eq!(out.lines().last(), Some("HURWITZ"));
    let star = temp_file("star2.txt", "n 4\ne 1 4\ne 2 4\ne 3 4\n");
    let (_, out, _) = run(&["oracle", &star, "--seed", "5", "--restarts", "10"]);
    assert!(out.contains("structural_det_zero=true"));
    assert_eq!(out.lines().last(), Some("NONE"));
}
