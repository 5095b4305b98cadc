//! End-to-end tests of the compiled binary: exit codes, the JSON round
//! trip of every verb's report, and byte-level determinism.

use std::process::{Command, Output};

use cartan_vmrt::wire;
use cartan_vmrt_core::classify::{Atlas, PairRecord};
use cartan_vmrt_core::verify::SuiteReport;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cartan-vmrt"))
        .args(args)
        .env_remove("CARTAN_VMRT_SEED")
        .output()
        .expect("binary spawns")
}

fn run_with_seed_env(args: &[&str], seed: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cartan-vmrt"))
        .args(args)
        .env("CARTAN_VMRT_SEED", seed)
        .output()
        .expect("binary spawns")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

/// Parses the JSON a command printed into `T`, re-serializes it, and
/// demands the bytes match: nothing in the report is lost or reordered by
/// the round trip.
fn assert_round_trip<T: DeserializeOwned + Serialize>(args: &[&str]) {
    let output = run(args);
    let printed = stdout(&output);
    let parsed: T = serde_json::from_str(printed.trim())
        .unwrap_or_else(|e| panic!("{args:?} printed unparseable JSON: {e}\n{printed}"));
    let reprinted = serde_json::to_string(&parsed).expect("reports serialize");
    assert_eq!(reprinted, printed.trim(), "lossy round trip for {args:?}");
}

#[test]
fn exit_codes_follow_the_contract() {
    assert_eq!(run(&["roots", "V"]).status.code(), Some(0));
    assert_eq!(run(&["verify-paper"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["atlas", "--max-rank", "6"]).status.code(), Some(2));
}

#[test]
fn usage_errors_name_the_offending_token() {
    let output = run(&["roots", "G(2;3)"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("G(2;3)"));

    let output = run(&["frobnicate"]);
    assert_eq!(output.status.code(), Some(2));
    let err = stderr(&output);
    assert!(err.contains("frobnicate"));
    assert!(err.contains("roots"), "grammar listing names the verbs");
}

#[test]
fn every_report_round_trips_through_json() {
    assert_round_trip::<wire::RootsReport>(&["roots", "V", "--json"]);
    assert_round_trip::<wire::PartitionReport>(&["partition", "VI", "--json"]);
    assert_round_trip::<wire::PerpSetReport>(&["perp", "V", "--root", "a6", "--json"]);
    assert_round_trip::<wire::PerpStatsReport>(&["perp", "GII(5)", "--json"]);
    assert_round_trip::<wire::MapCheckReport>(&["check-map", "G(4,2)", "V", "--json"]);
    assert_round_trip::<wire::SearchReport>(&["search-map", "GIII(3)", "G(3,3)", "--json"]);
    assert_round_trip::<wire::MapCheckReport>(&["deletion-map", "Q(3)", "Q(5)", "--json"]);
    assert_round_trip::<wire::KernelReportWire>(&["kernel", "GII(6)", "VI", "--json"]);
    assert_round_trip::<wire::WitnessReportWire>(&[
        "witness", "Q(3)", "Q(5)", "--seed", "5", "--json",
    ]);
    assert_round_trip::<wire::RankCheckWire>(&[
        "rank-check",
        "GIII(3)",
        "G(3,3)",
        "--seed",
        "2",
        "--json",
    ]);
    assert_round_trip::<wire::EmbedReport>(&["embed", "G(3,4)", "GII(7)", "--seed", "3", "--json"]);
    assert_round_trip::<wire::ModelKernelWire>(&["model-kernel", "Q(3)", "Q(6)", "--json"]);
    assert_round_trip::<wire::ChernReport>(&["chern", "--json"]);
    assert_round_trip::<PairRecord>(&["classify", "G(3,3)", "VI", "--json"]);
    assert_round_trip::<Atlas>(&["atlas", "--max-rank", "7", "--json"]);
    assert_round_trip::<SuiteReport>(&["verify-paper", "--json"]);
}

#[test]
fn search_refuses_one_pair_and_finds_another() {
    let output = run(&["search-map", "GIII(3)", "G(3,3)", "--json"]);
    assert_eq!(output.status.code(), Some(0));
    let report: wire::SearchReport = serde_json::from_str(stdout(&output).trim()).unwrap();
    assert!(report.found.is_none());

    let output = run(&["search-map", "Q(4)", "Q(5)", "--json"]);
    assert_eq!(output.status.code(), Some(0));
    let report: wire::SearchReport = serde_json::from_str(stdout(&output).trim()).unwrap();
    let found = report.found.expect("a valid correspondence exists");
    assert!(found.valid);
    assert_eq!(found.provenance, "search");
}

#[test]
fn verify_paper_is_byte_deterministic() {
    let first = run(&["verify-paper", "--json"]);
    let second = run(&["verify-paper", "--json"]);
    assert_eq!(first.status.code(), Some(1));
    assert_eq!(first.stdout, second.stdout);

    let text_first = run(&["verify-paper"]);
    let text_second = run(&["verify-paper"]);
    assert_eq!(text_first.stdout, text_second.stdout);
}

#[test]
fn env_seed_overrides_the_flag_in_the_spawned_process() {
    let output = run_with_seed_env(&["witness", "GII(5)", "V", "--seed", "4", "--json"], "9");
    assert_eq!(output.status.code(), Some(0));
    let report: wire::WitnessReportWire = serde_json::from_str(stdout(&output).trim()).unwrap();
    assert_eq!(report.seed, 9);
    assert!(report.zeta_identity_holds);
}

#[test]
fn linear_sources_are_reported_as_out_of_scope() {
    let output = run(&["classify", "G(1,3)", "VI"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("linear"));
}
