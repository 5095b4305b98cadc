//! Argument grammar and verb dispatch for the `cartan-vmrt` binary.
//!
//! The grammar is `cartan-vmrt <verb> [SPACE [SPACE]] [--root EXPR]
//! [--max-rank N] [--seed N] [--json]`. Exit code 0 means the requested
//! value was computed and any requested check passed; 1 means a check
//! failed or the computation could not run on the given pair; 2 means the
//! invocation itself was ill-formed. The `CARTAN_VMRT_SEED` environment
//! variable overrides `--seed`.

use std::io::Write;
use std::str::FromStr;

use cartan_vmrt_core::chss::{MarkedSpace, Space};
use cartan_vmrt_core::classify::{classify_all, classify_pair};
use cartan_vmrt_core::correspond::{
    builtin_map, deletion_map, search_root_map, verify_root_map, CorrespondError, RootMap,
};
use cartan_vmrt_core::matmodel::{
    embed_sample, kernel_matrix_model, model_rank_check, MatrixPoint,
};
use cartan_vmrt_core::rootsys::parse_root_expr;
use cartan_vmrt_core::verify::reference_suite;
use cartan_vmrt_core::vmrt::{kernel_root_level, nonrigidity_witness};
use clap::builder::PossibleValuesParser;
use clap::error::ErrorKind;
use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};
use serde::Serialize;

use crate::wire;

/// The operations the binary understands, in help order.
pub const VERBS: &[&str] = &[
    "roots",
    "partition",
    "perp",
    "check-map",
    "search-map",
    "deletion-map",
    "kernel",
    "witness",
    "rank-check",
    "embed",
    "model-kernel",
    "chern",
    "classify",
    "atlas",
    "verify-paper",
];

/// Expansion budget for `search-map`.
pub const SEARCH_BUDGET: u64 = 10_000_000;

/// Sample count for `rank-check`.
pub const RANK_CHECK_SAMPLES: usize = 100;

const DEFAULT_ATLAS_RANK: usize = 8;

fn command() -> Command {
    Command::new("cartan-vmrt")
        .about("Root-level analysis of VMRT sub-structures on compact Hermitian symmetric spaces")
        .arg(
            Arg::new("verb")
                .required(true)
                .value_parser(PossibleValuesParser::new(VERBS))
                .help("operation to run"),
        )
        .arg(
            Arg::new("space")
                .num_args(0..=2)
                .value_name("SPACE")
                .help("catalog space names, e.g. G(2,3), GII(5), GIII(3), Q(6), V, VI"),
        )
        .arg(
            Arg::new("root")
                .long("root")
                .value_name("EXPR")
                .help("root expression for perp, e.g. a6 or a1+2a2"),
        )
        .arg(
            Arg::new("max-rank")
                .long("max-rank")
                .value_name("N")
                .value_parser(value_parser!(usize))
                .help("rank bound for atlas (default 8, minimum 7)"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .value_name("N")
                .value_parser(value_parser!(u64))
                .help("seed for sampled checks; CARTAN_VMRT_SEED overrides"),
        )
        .arg(
            Arg::new("json")
                .long("json")
                .action(ArgAction::SetTrue)
                .help("emit one JSON report on stdout"),
        )
}

/// Successful dispatch: what to print and how to exit.
struct Output {
    text: String,
    json: String,
    exit: i32,
}

impl Output {
    fn new(report: &impl Serialize, text: String, exit: i32) -> Output {
        Output {
            text,
            json: serde_json::to_string(report).expect("reports serialize"),
            exit,
        }
    }
}

/// Failed dispatch: ill-formed invocation (exit 2) or a computation that
/// cannot run on the given arguments (exit 1).
enum Failure {
    Usage(String),
    Run(String),
}

fn usage_line(verb: &str) -> &'static str {
    match verb {
        "roots" => "cartan-vmrt roots SPACE [--json]",
        "partition" => "cartan-vmrt partition SPACE [--json]",
        "perp" => "cartan-vmrt perp SPACE [--root EXPR] [--json]",
        "check-map" => "cartan-vmrt check-map SOURCE TARGET [--json]",
        "search-map" => "cartan-vmrt search-map SOURCE TARGET [--json]",
        "deletion-map" => "cartan-vmrt deletion-map SOURCE TARGET [--json]",
        "kernel" => "cartan-vmrt kernel SOURCE TARGET [--json]",
        "witness" => "cartan-vmrt witness SOURCE TARGET [--seed N] [--json]",
        "rank-check" => "cartan-vmrt rank-check SOURCE TARGET [--seed N] [--json]",
        "embed" => "cartan-vmrt embed SOURCE TARGET [--seed N] [--json]",
        "model-kernel" => "cartan-vmrt model-kernel SOURCE TARGET [--json]",
        "chern" => "cartan-vmrt chern [--json]",
        "classify" => "cartan-vmrt classify SOURCE TARGET [--json]",
        "atlas" => "cartan-vmrt atlas [--max-rank N] [--json]",
        "verify-paper" => "cartan-vmrt verify-paper [--seed N] [--json]",
        _ => unreachable!("verbs are validated by the parser"),
    }
}

fn space_arity(verb: &str) -> usize {
    match verb {
        "roots" | "partition" | "perp" => 1,
        "chern" | "atlas" | "verify-paper" => 0,
        _ => 2,
    }
}

/// Runs one invocation. `args` is the full argv including the program
/// name; `env_seed` is the raw value of `CARTAN_VMRT_SEED` when set.
pub fn run(
    args: &[String],
    env_seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let rendered = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{rendered}");
                0
            } else {
                let _ = write!(err, "{rendered}");
                2
            };
        }
    };
    match dispatch(&matches, env_seed) {
        Ok(output) => {
            if matches.get_flag("json") {
                let _ = writeln!(out, "{}", output.json);
            } else {
                let _ = writeln!(out, "{}", output.text);
            }
            output.exit
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Run(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn dispatch(matches: &ArgMatches, env_seed: Option<&str>) -> Result<Output, Failure> {
    let verb = matches
        .get_one::<String>("verb")
        .expect("verb is required")
        .as_str();

    let tokens: Vec<&String> = matches
        .get_many::<String>("space")
        .map(|v| v.collect())
        .unwrap_or_default();
    let arity = space_arity(verb);
    if tokens.len() != arity {
        return Err(Failure::Usage(format!(
            "'{verb}' takes {arity} space argument{}, got {}\nusage: {}",
            if arity == 1 { "" } else { "s" },
            tokens.len(),
            usage_line(verb)
        )));
    }
    let spaces: Vec<Space> = tokens
        .iter()
        .map(|token| {
            Space::from_str(token)
                .map_err(|e| Failure::Usage(format!("{e}\nusage: {}", usage_line(verb))))
        })
        .collect::<Result<_, _>>()?;

    for (flag, allowed) in [
        ("root", &["perp"][..]),
        ("max-rank", &["atlas"][..]),
        (
            "seed",
            &["witness", "rank-check", "embed", "verify-paper"][..],
        ),
    ] {
        if matches.contains_id(flag) && !allowed.contains(&verb) {
            return Err(Failure::Usage(format!(
                "--{flag} does not apply to '{verb}'\nusage: {}",
                usage_line(verb)
            )));
        }
    }

    let seed = match env_seed {
        Some(raw) => raw.parse::<u64>().map_err(|_| {
            Failure::Usage(format!(
                "CARTAN_VMRT_SEED must be an unsigned integer, got {raw:?}"
            ))
        })?,
        None => matches.get_one::<u64>("seed").copied().unwrap_or(0),
    };

    match verb {
        "roots" => roots(spaces[0]),
        "partition" => partition(spaces[0]),
        "perp" => perp(
            spaces[0],
            matches.get_one::<String>("root").map(String::as_str),
        ),
        "check-map" => check_map(spaces[0], spaces[1]),
        "search-map" => search_map(spaces[0], spaces[1]),
        "deletion-map" => deletion_map_verb(spaces[0], spaces[1]),
        "kernel" => kernel(spaces[0], spaces[1]),
        "witness" => witness(spaces[0], spaces[1], seed),
        "rank-check" => rank_check(spaces[0], spaces[1], seed),
        "embed" => embed(spaces[0], spaces[1], seed),
        "model-kernel" => model_kernel(spaces[0], spaces[1]),
        "chern" => chern(),
        "classify" => classify(spaces[0], spaces[1]),
        "atlas" => atlas(matches.get_one::<usize>("max-rank").copied()),
        "verify-paper" => verify_paper(seed),
        _ => unreachable!("verbs are validated by the parser"),
    }
}

fn marked(space: Space) -> Result<MarkedSpace, Failure> {
    MarkedSpace::catalog_space(space).map_err(|e| Failure::Run(e.to_string()))
}

fn roots(space: Space) -> Result<Output, Failure> {
    let report = wire::RootsReport::collect(&marked(space)?);
    let text = format!(
        "space {}: {} marked at node {}\ndimension {}; {} positive roots, {} compact, {} noncompact\ngamma = {}",
        report.space,
        report.family,
        report.marked_node,
        report.dim,
        report.positive_roots,
        report.compact_positives,
        report.noncompact_positives,
        report.gamma
    );
    Ok(Output::new(&report, text, 0))
}

fn partition(space: Space) -> Result<Output, Failure> {
    let report = wire::PartitionReport::collect(&marked(space)?);
    let mut text = format!(
        "space {}: gamma = {}; |H| = {}, |N| = {}",
        report.space,
        report.gamma,
        report.h.len(),
        report.n.len()
    );
    for (cell, roots) in [("H", &report.h), ("N", &report.n)] {
        text.push_str(&format!("\n{cell}:"));
        for root in roots {
            text.push_str(&format!("\n  {root}"));
        }
    }
    Ok(Output::new(&report, text, 0))
}

fn perp(space: Space, root: Option<&str>) -> Result<Output, Failure> {
    let ms = marked(space)?;
    match root {
        Some(expr) => {
            let beta = parse_root_expr(expr, ms.diagram().rank())
                .map_err(|e| Failure::Usage(format!("{e}\nusage: {}", usage_line("perp"))))?;
            let perp = ms
                .perp_set(&beta)
                .map_err(|e| Failure::Run(e.to_string()))?;
            let report = wire::PerpSetReport {
                space: ms.space().to_string(),
                beta: beta.expr(),
                perp: perp.iter().map(|r| r.expr()).collect(),
            };
            let mut text = format!(
                "perp of {} in {} ({} roots):",
                report.beta,
                report.space,
                report.perp.len()
            );
            for root in &report.perp {
                text.push_str(&format!("\n  {root}"));
            }
            Ok(Output::new(&report, text, 0))
        }
        None => {
            let report = wire::PerpStatsReport::from(&ms.perp_stats());
            let histogram = |pairs: &[(usize, usize)]| {
                pairs
                    .iter()
                    .map(|(value, count)| format!("{value}: {count}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let text = format!(
                "space {}: {} perpendicular sets; sizes {{{}}}; intersections over {} non-perpendicular pairs {{{}}}",
                report.space,
                report.set_count,
                histogram(&report.size_histogram),
                report.non_perpendicular_pairs,
                histogram(&report.intersection_histogram)
            );
            Ok(Output::new(&report, text, 0))
        }
    }
}

fn map_output(map: &RootMap) -> Result<Output, Failure> {
    let check = verify_root_map(map).map_err(|e| Failure::Run(e.to_string()))?;
    let report = wire::MapCheckReport::collect(map, &check);
    let mut text = format!(
        "({}, {}) {}: {}",
        report.source,
        report.target,
        report.provenance,
        if report.valid {
            "valid".to_string()
        } else {
            format!(
                "invalid: {}",
                report.witness.as_deref().unwrap_or("unspecified defect")
            )
        }
    );
    for (node, image) in &report.assignments {
        text.push_str(&format!("\n  node {node} -> {image}"));
    }
    let exit = i32::from(!report.valid);
    Ok(Output::new(&report, text, exit))
}

fn check_map(source: Space, target: Space) -> Result<Output, Failure> {
    let map = builtin_map(source, target).map_err(|e| Failure::Run(e.to_string()))?;
    map_output(&map)
}

fn search_map(source: Space, target: Space) -> Result<Output, Failure> {
    let found =
        search_root_map(source, target, SEARCH_BUDGET).map_err(|e| Failure::Run(e.to_string()))?;
    let report = wire::SearchReport {
        source: source.to_string(),
        target: target.to_string(),
        budget: SEARCH_BUDGET,
        found: found
            .as_ref()
            .map(|map| {
                let check = verify_root_map(map).map_err(|e| Failure::Run(e.to_string()))?;
                Ok(wire::MapCheckReport::collect(map, &check))
            })
            .transpose()?,
    };
    let text = match &report.found {
        Some(found) => {
            let mut text = format!(
                "({}, {}): found a valid correspondence within {} expansions",
                report.source, report.target, report.budget
            );
            for (node, image) in &found.assignments {
                text.push_str(&format!("\n  node {node} -> {image}"));
            }
            text
        }
        None => format!(
            "({}, {}): no valid correspondence within {} expansions",
            report.source, report.target, report.budget
        ),
    };
    Ok(Output::new(&report, text, 0))
}

fn deletion_map_verb(source: Space, target: Space) -> Result<Output, Failure> {
    let map = deletion_map(source, target).map_err(|e| Failure::Run(e.to_string()))?;
    map_output(&map)
}

/// The correspondence a kernel or witness runs on: the built-in table when
/// one exists, otherwise the deletion construction.
fn correspondence(source: Space, target: Space) -> Result<RootMap, Failure> {
    match builtin_map(source, target) {
        Ok(map) => Ok(map),
        Err(CorrespondError::NoBuiltin { .. }) => deletion_map(source, target).map_err(|e| {
            Failure::Run(format!(
                "no built-in correspondence for ({source}, {target}) and {e}"
            ))
        }),
        Err(e) => Err(Failure::Run(e.to_string())),
    }
}

fn kernel(source: Space, target: Space) -> Result<Output, Failure> {
    let map = correspondence(source, target)?;
    let kernel = kernel_root_level(&map).map_err(|e| Failure::Run(e.to_string()))?;
    let report = wire::KernelReportWire::from(&kernel);
    let mut text = format!(
        "({}, {}) {}: {}; kernel dimension {}",
        report.source, report.target, report.provenance, report.verdict, report.kernel_dim
    );
    for root in &report.kernel_basis {
        text.push_str(&format!("\n  kernel direction {root}"));
    }
    text.push_str(&format!("\n{}", report.justification));
    Ok(Output::new(&report, text, 0))
}

fn witness(source: Space, target: Space, seed: u64) -> Result<Output, Failure> {
    let map = correspondence(source, target)?;
    let witness = nonrigidity_witness(&map, seed).map_err(|e| Failure::Run(e.to_string()))?;
    let report = wire::WitnessReportWire::from(&witness);
    let mut text = format!(
        "({}, {}): eta = {}; sigma(eta, eta) = 0: {}; eta kills the image: {}; cone identity at {} samples (seed {}): {}",
        report.source,
        report.target,
        report.eta,
        report.eta_squares_to_zero,
        report.eta_kills_image,
        report.zeta_samples,
        report.seed,
        report.zeta_identity_holds
    );
    text.push_str("\ndeformation:");
    for line in &report.recipe {
        text.push_str(&format!("\n  {line}"));
    }
    let exit = i32::from(!report.holds());
    Ok(Output::new(&report, text, exit))
}

fn rank_check(source: Space, target: Space, seed: u64) -> Result<Output, Failure> {
    let check = model_rank_check(source, target, RANK_CHECK_SAMPLES, seed)
        .map_err(|e| Failure::Run(e.to_string()))?;
    let report = wire::RankCheckWire::from(&check);
    let text = format!(
        "({}, {}): {} samples (seed {}); rank factor {}; rank respected: {}; membership respected: {}",
        report.source,
        report.target,
        report.samples,
        report.seed,
        report.rank_factor,
        report.rank_respected,
        report.membership_respected
    );
    let exit = i32::from(!(report.rank_respected && report.membership_respected));
    Ok(Output::new(&report, text, exit))
}

fn matrix_lines(label: &str, point: &MatrixPoint) -> String {
    let mut text = format!("{label} ({}, rank {}):", point.shape(), point.rank());
    for row in point.entries() {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        text.push_str(&format!("\n  [{}]", cells.join(", ")));
    }
    text
}

fn embed(source: Space, target: Space, seed: u64) -> Result<Output, Failure> {
    let sample = embed_sample(source, target, seed).map_err(|e| Failure::Run(e.to_string()))?;
    let report = wire::EmbedReport::from(&sample);
    let text = format!(
        "({}, {}) seed {}\n{}\n{}\nVMRT membership: before {}, after {}",
        report.source,
        report.target,
        report.seed,
        matrix_lines("sample", &report.sample),
        matrix_lines("embedded", &report.embedded),
        report.sample_in_vmrt,
        report.embedded_in_vmrt
    );
    Ok(Output::new(&report, text, 0))
}

fn model_kernel(source: Space, target: Space) -> Result<Output, Failure> {
    let kernel = kernel_matrix_model(source, target).map_err(|e| Failure::Run(e.to_string()))?;
    let report = wire::ModelKernelWire::from(&kernel);
    let mut text = format!(
        "({}, {}) {} model: {}; kernel dimension {} (ambient {}, sub {})",
        report.source,
        report.target,
        report.model,
        report.verdict,
        report.kernel_dim,
        report.ambient_dim,
        report.sub_dim
    );
    if let Some(form) = &report.form {
        text.push_str(&format!("\nform: {form}"));
    }
    Ok(Output::new(&report, text, 0))
}

fn chern() -> Result<Output, Failure> {
    let report = wire::ChernReport::collect();
    let lines: Vec<String> = report
        .rows
        .iter()
        .map(|row| {
            let class: Vec<String> = row.class.iter().map(i64::to_string).collect();
            let outcome = match &row.factors {
                Some((a, b)) => format!("factors {a:?} x {b:?}"),
                None => "no factorization".to_string(),
            };
            format!(
                "class [{}] split ({}, {}): {outcome}",
                class.join(", "),
                row.split.0,
                row.split.1
            )
        })
        .collect();
    Ok(Output::new(&report, lines.join("\n"), 0))
}

fn classify(source: Space, target: Space) -> Result<Output, Failure> {
    let record = classify_pair(source, target).map_err(|e| Failure::Run(e.to_string()))?;
    let categories = if record.categories.is_empty() {
        "none".to_string()
    } else {
        record
            .categories
            .iter()
            .map(|claim| claim.category.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut text = format!(
        "({}, {}): categories {categories}; degeneracy {}",
        record.source, record.target, record.degeneracy
    );
    if let Some(route) = &record.degeneracy_route {
        text.push_str(&format!(" ({route})"));
    }
    match &record.rigidity {
        Some(rigidity) => text.push_str(&format!("; rigidity {rigidity}")),
        None => text.push_str("; rigidity undetermined"),
    }
    Ok(Output::new(&record, text, 0))
}

fn atlas(max_rank: Option<usize>) -> Result<Output, Failure> {
    let max_rank = max_rank.unwrap_or(DEFAULT_ATLAS_RANK);
    if max_rank < 7 {
        return Err(Failure::Usage(format!(
            "--max-rank must be at least 7 to cover both exceptional spaces, got {max_rank}"
        )));
    }
    let atlas = classify_all(max_rank).map_err(|e| Failure::Run(e.to_string()))?;
    let text = atlas.text_table();
    Ok(Output::new(&atlas, text, 0))
}

fn verify_paper(seed: u64) -> Result<Output, Failure> {
    let report = reference_suite(seed);
    let exit = i32::from(!report.all_passed());
    let text = report.text_lines().join("\n");
    Ok(Output::new(&report, text, exit))
}
