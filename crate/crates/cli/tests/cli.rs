use std::path::PathBuf;
use std::process::Command;

use hornrev::dump::{read_records, Record};
use hornrev::revision::Algorithm;
use hornrev::{parse_atom, parse_clause, parse_kb};
use hornrev_cli::{cmd_check, cmd_explain, cmd_kernels, cmd_revise, Format, RunConfig, BUDGET_EXCEEDED, INPUT_ERROR, NO_REPAIR, OK};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn config(name: &str) -> RunConfig {
    let mut c = RunConfig::new(data(name));
    c.budget = hornrev::Budget::default();
    c
}

fn atom(s: &str) -> hornrev::Atom {
    parse_atom(s).unwrap()
}

#[test]
fn acyclic_insertion_of_p_inserts_a() {
    let mut cfg = config("branching_without_a.kb");
    cfg.algorithm = Some(Algorithm::Acyclic);
    let out = cmd_revise(&cfg, &atom("p"));
    assert_eq!(out.status, OK, "{}", out.stderr);
    assert!(out.stdout.contains("transaction: +a\n"), "{}", out.stdout);
}

#[test]
fn all_solutions_lists_every_alternative() {
    let mut cfg = config("staff.kb");
    cfg.all_solutions = true;
    let out = cmd_revise(&cfg, &atom("staff_chair(delhibabu,aravindan)"));
    assert_eq!(out.status, OK, "{}", out.stderr);
    assert!(out.stdout.contains("alternatives: 6"), "{}", out.stdout);
    assert!(out.stdout.contains("+group_chair(infor1,aravindan) -group_chair(infor1,matthias)"));
}

#[test]
fn contradicting_insertion_exits_with_no_repair() {
    let out = cmd_revise(&config("contradiction.kb"), &atom("p"));
    assert_eq!(out.status, NO_REPAIR);
    assert!(out.stderr.starts_with("vacuity-1"), "{}", out.stderr);
}

#[test]
fn input_errors_exit_with_one() {
    assert_eq!(cmd_revise(&config("missing.kb"), &atom("p")).status, INPUT_ERROR);
    // Base atoms are not view updates.
    assert_eq!(cmd_revise(&config("branching.kb"), &atom("a")).status, INPUT_ERROR);
    let mut cfg = config("cyclic.kb");
    cfg.algorithm = Some(Algorithm::Acyclic);
    let out = cmd_revise(&cfg, &atom("p"));
    assert_eq!(out.status, INPUT_ERROR);
    assert!(out.stderr.contains("p -> q -> p"), "{}", out.stderr);
}

#[test]
fn small_budget_exits_with_three() {
    let mut cfg = config("two_supports.kb");
    cfg.budget = hornrev::Budget::uniform(4);
    let out = cmd_kernels(&cfg, &parse_clause(":- p.").unwrap());
    assert_eq!(out.status, BUDGET_EXCEEDED, "{}", out.stderr);
}

#[test]
fn explain_reports_undefined_predicates_as_a_single_failure() {
    let dir = std::env::temp_dir().join("hornrev-cli-undefined");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("kb.kb");
    std::fs::write(&path, "%% immutable\np :- a.\nr :- s.\n%% updatable\na.\n").unwrap();
    let mut cfg = RunConfig::new(&path);
    cfg.format = Format::Structured;
    let out = cmd_explain(&cfg, &atom("r"));
    assert_eq!(out.status, OK, "{}", out.stderr);
    let branches: Vec<Record> = read_records(&out.stdout)
        .unwrap()
        .into_iter()
        .filter(|r| matches!(r, Record::Branch { .. }))
        .collect();
    assert_eq!(branches.len(), 1);
    assert!(matches!(&branches[0], Record::Branch { status, .. } if status == "failure"));
}

#[test]
fn explain_names_the_cycle() {
    let out = cmd_explain(&config("cyclic.kb"), &atom("p"));
    assert_eq!(out.status, INPUT_ERROR);
    assert!(out.stderr.contains("cycle p -> q -> p"), "{}", out.stderr);
    assert!(out.stdout.contains("cut-off"));
}

#[test]
fn structured_output_round_trips() {
    let mut cfg = config("branching.kb");
    cfg.format = Format::Structured;
    let out = cmd_explain(&cfg, &atom("p"));
    let records = read_records(&out.stdout).unwrap();
    assert_eq!(hornrev::dump::write_records(&records), out.stdout);

    let mut cfg = config("staff.kb");
    cfg.format = Format::Structured;
    cfg.all_solutions = true;
    let out = cmd_check(&cfg, &atom("staff_chair(delhibabu,aravindan)"));
    let records = read_records(&out.stdout).unwrap();
    assert!(records.iter().any(|r| matches!(r, Record::Transaction { .. })));
    assert!(records.iter().any(|r| matches!(r, Record::Postulate { .. })));
    assert_eq!(hornrev::dump::write_records(&records), out.stdout);
}

#[test]
fn check_passes_on_fixtures() {
    let out = cmd_check(&config("branching_without_a.kb"), &atom("p"));
    assert_eq!(out.status, OK, "{}{}", out.stdout, out.stderr);
    let out = cmd_check(&config("staff.kb"), &atom("staff_chair(delhibabu,aravindan)"));
    assert_eq!(out.status, OK, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("weak-relevance"));
}

#[test]
fn write_back_stores_the_revised_base() {
    let path = std::env::temp_dir().join("hornrev-cli-write-back.kb");
    let mut cfg = config("branching_without_a.kb");
    cfg.write_back = Some(path.clone());
    assert_eq!(cmd_revise(&cfg, &atom("p")).status, OK);
    let kb = parse_kb(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(kb.contains_fact(&atom("a")));
}

#[test]
fn kernels_with_cardinality_cut_a() {
    let mut cfg = config("two_supports.kb");
    cfg.strategy = "minimal-cardinality".parse().unwrap();
    cfg.check_postulates = true;
    let out = cmd_kernels(&cfg, &parse_clause(":- p.").unwrap());
    assert_eq!(out.status, OK, "{}", out.stdout);
    assert!(out.stdout.contains("kernels: 2"));
    assert!(out.stdout.contains("incision (minimal-cardinality): {a.}"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_hornrev");
    let run = |args: &[&str]| Command::new(bin).args(args).env_remove("HORNREV_BUDGET").output().unwrap();
    let kb = data("branching_without_a.kb");
    let kb = kb.to_str().unwrap();
    let ok = run(&["revise", "--kb", kb, "--insert", "p"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "algorithm: acyclic\ntransaction: +a\n");
    let bad = run(&["revise", "--kb", kb, "--insert", "p("]);
    assert_eq!(bad.status.code(), Some(1));
    let c = data("contradiction.kb");
    assert_eq!(run(&["revise", "--kb", c.to_str().unwrap(), "--insert", "p"]).status.code(), Some(2));
    let two = data("two_supports.kb");
    let tight = Command::new(bin)
        .args(["kernels", "--kb", two.to_str().unwrap(), "--alpha", ":- p."])
        .env("HORNREV_BUDGET", "4")
        .output()
        .unwrap();
    assert_eq!(tight.status.code(), Some(3));
}
