//! One-shot verification suite over the embedded reference data.
//!
//! [`reference_suite`] replays every recorded expectation in a fixed order:
//! root counts, labeled partition bases, perpendicular-set combinatorics,
//! the built-in correspondence tables, the deletion construction, kernel
//! verdicts on both routes, the recorded product table, matrix-model
//! properties, the Chern factorization controls, the assembled atlas, and
//! the non-rigidity witnesses. Each item reports pass or fail under a
//! stable anchor; failures are data, not panics, so the suite always runs
//! to completion. Two items are expected to fail today: the recorded
//! perpendicular-intersection claim for GII(5) and two rows of the recorded
//! product table disagree with exact arithmetic.

use crate::chss::{MarkedSpace, Space};
use crate::classify::{classify_all, Category, Degeneracy, Rigidity};
use crate::correspond::{builtin_map, deletion_map, verify_root_map};
use crate::golden;
use crate::matmodel::{chern_factor_search, kernel_matrix_model, model_rank_check, ChernPoly};
use crate::rootsys::{parse_root_expr, Root, RootSystem};
use crate::vmrt::{kernel_root_level, nonrigidity_witness, sff_shift, Verdict, ZETA_SAMPLES};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

/// Outcome of one suite item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteItem {
    /// Stable identifier of the expectation block the item replays.
    pub anchor: String,
    /// What the item checks, in one sentence.
    pub description: String,
    pub passed: bool,
    /// Summary of the evidence on pass, or of the first mismatches on fail.
    pub detail: String,
}

/// Ordered outcome of the whole suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub items: Vec<SuiteItem>,
    pub passed: usize,
    pub failed: usize,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    /// One `PASS`/`FAIL` line per item, in suite order, plus a footer.
    pub fn text_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .items
            .iter()
            .map(|item| {
                format!(
                    "{} {}: {}",
                    if item.passed { "PASS" } else { "FAIL" },
                    item.anchor,
                    item.detail
                )
            })
            .collect();
        lines.push(format!(
            "{} of {} items passed",
            self.passed,
            self.items.len()
        ));
        lines
    }
}

fn space(name: &str) -> Space {
    Space::from_str(name).expect("suite space names are well formed")
}

fn marked(name: &str) -> MarkedSpace {
    MarkedSpace::catalog_space(space(name)).expect("suite spaces are in the catalog")
}

/// Runs one item body, converting its `Err` branch into a failed item.
fn run_item(
    anchor: &str,
    description: &str,
    body: impl FnOnce() -> Result<String, String>,
) -> SuiteItem {
    let (passed, detail) = match body() {
        Ok(detail) => (true, detail),
        Err(detail) => (false, detail),
    };
    SuiteItem {
        anchor: anchor.to_string(),
        description: description.to_string(),
        passed,
        detail,
    }
}

/// Replays every embedded expectation in a fixed order. The seed feeds the
/// sampled items (matrix models and non-rigidity witnesses); everything
/// else is exact and seed-independent. With a fixed seed the report is
/// byte-identical across runs.
pub fn reference_suite(seed: u64) -> SuiteReport {
    let items = vec![
        run_item(
            "root-counts",
            "positive-root and noncompact counts of the two exceptional systems",
            root_counts,
        ),
        run_item(
            "sff-vi-bases",
            "labeled H and N bases of VI match the computed partition",
            labeled_bases,
        ),
        run_item(
            "perp-cayley",
            "perpendicular-set sizes, intersections, and listings for V",
            perp_cayley,
        ),
        run_item(
            "perp-orthogonal-five",
            "perpendicular-set sizes and intersections for GII(5)",
            perp_orthogonal_five,
        ),
        run_item(
            "map-tables",
            "the five built-in correspondences verify in full",
            map_tables,
        ),
        run_item(
            "deletion-construction",
            "the deletion construction yields verified maps for its catalog pairs",
            deletion_construction,
        ),
        run_item(
            "kernel-special",
            "every special pair is nondegenerate on its designated route",
            kernel_special,
        ),
        run_item(
            "kernel-deletion",
            "every deletion-construction map has a nonzero kernel",
            kernel_deletion,
        ),
        run_item(
            "kernel-quadric",
            "quadric pairs have kernel dimension exactly the rank gap",
            kernel_quadric,
        ),
        run_item(
            "sff-g33-vi-products",
            "the recorded product table for (G(3,3), VI) reproduces exactly",
            recorded_products,
        ),
        run_item(
            "matrix-models",
            "coordinate embeddings respect rank and VMRT membership on samples",
            move || matrix_models(seed),
        ),
        run_item(
            "chern-nonsplit",
            "the Chern factorization search refuses the non-split class",
            chern_nonsplit,
        ),
        run_item(
            "atlas-expected",
            "the assembled atlas reproduces the expected classification tables",
            atlas_expected,
        ),
        run_item(
            "nonrigidity-witnesses",
            "non-rigidity witnesses hold for the two flagship degenerate pairs",
            move || nonrigidity_witnesses(seed),
        ),
    ];
    let passed = items.iter().filter(|i| i.passed).count();
    let failed = items.len() - passed;
    SuiteReport {
        seed,
        items,
        passed,
        failed,
    }
}

fn root_counts() -> Result<String, String> {
    let mut notes = Vec::new();
    for (name, family_rank, positives, noncompact) in
        [("V", "E6", 36usize, 16usize), ("VI", "E7", 63, 27)]
    {
        let ms = marked(name);
        let got_pos = ms.system().positives().len();
        let got_nc = ms.noncompact_positives().len();
        if got_pos != positives {
            return Err(format!(
                "{family_rank} has {got_pos} positive roots, expected {positives}"
            ));
        }
        if got_nc != noncompact {
            return Err(format!(
                "{name} has {got_nc} noncompact positives, expected {noncompact}"
            ));
        }
        notes.push(format!(
            "{family_rank}: {positives} positive, {name}: {noncompact} noncompact"
        ));
    }
    Ok(notes.join("; "))
}

fn parse_label_table(table: &[(&str, &str)], rank: usize) -> BTreeMap<String, Root> {
    table
        .iter()
        .map(|&(label, expr)| {
            let root = parse_root_expr(expr, rank).expect("recorded label expressions parse");
            (label.to_string(), root)
        })
        .collect()
}

fn labeled_bases() -> Result<String, String> {
    let vi = marked("VI");
    let part = vi.hc_partition();
    let h = parse_label_table(golden::FREUDENTHAL_H_LABELS, 7);
    let n = parse_label_table(golden::FREUDENTHAL_N_LABELS, 7);
    if part.h_set.len() != 16 || part.n_set.len() != 10 {
        return Err(format!(
            "computed partition has |H| = {}, |N| = {}, expected 16 and 10",
            part.h_set.len(),
            part.n_set.len()
        ));
    }
    let system: &RootSystem = vi.system();
    for (label, root) in h.iter().chain(n.iter()) {
        if !system.is_root(root) {
            return Err(format!("labeled vector {label} is not an E7 root"));
        }
    }
    let h_claimed: BTreeSet<&Root> = h.values().collect();
    let h_computed: BTreeSet<&Root> = part.h_set.iter().collect();
    if h_claimed != h_computed {
        return Err("labeled H basis disagrees with the computed H cell".to_string());
    }
    let n_claimed: BTreeSet<&Root> = n.values().collect();
    let n_computed: BTreeSet<&Root> = part.n_set.iter().collect();
    if n_claimed != n_computed {
        return Err("labeled N basis disagrees with the computed N cell".to_string());
    }
    Ok("16 H-labels and 10 N-labels are roots and match the partition cells".to_string())
}

fn perp_cayley() -> Result<String, String> {
    let v = marked("V");
    let stats = v.perp_stats();
    if stats.sizes.len() != 16 || stats.sizes.iter().any(|(_, s)| *s != 5) {
        return Err(format!(
            "size histogram {:?}, expected all 16 sets of size 5",
            stats.size_histogram
        ));
    }
    if stats.pair_intersections.is_empty()
        || stats.pair_intersections.iter().any(|(_, _, s)| *s != 2)
    {
        return Err(format!(
            "intersection histogram {:?}, expected every entry 2",
            stats.intersection_histogram
        ));
    }
    let gamma = v.gamma();
    let listed: BTreeSet<Root> = [
        "a6+2a5+2a4+a3+a2",
        "a6+2a5+2a4+a3+a2+a1",
        "a6+2a5+2a4+2a3+a2+a1",
        "a6+2a5+3a4+2a3+a2+a1",
        "a6+2a5+3a4+2a3+2a2+a1",
    ]
    .iter()
    .map(|s| parse_root_expr(s, 6).expect("recorded listing parses"))
    .collect();
    let computed: BTreeSet<Root> = v
        .perp_set(&gamma)
        .map_err(|e| e.to_string())?
        .into_iter()
        .collect();
    if computed != listed {
        return Err("perpendicular set of gamma disagrees with the recorded listing".to_string());
    }
    let b15 = parse_root_expr("a6+2a5+3a4+2a3+a2+a1", 6).expect("listing parses");
    let b16 = parse_root_expr("a6+2a5+3a4+2a3+2a2+a1", 6).expect("listing parses");
    let p15: BTreeSet<Root> = v
        .perp_set(&b15)
        .map_err(|e| e.to_string())?
        .into_iter()
        .collect();
    let p16: BTreeSet<Root> = v
        .perp_set(&b16)
        .map_err(|e| e.to_string())?
        .into_iter()
        .collect();
    let common: BTreeSet<Root> = p15.intersection(&p16).cloned().collect();
    let expected: BTreeSet<Root> = ["a6", "a6+a5"]
        .iter()
        .map(|s| parse_root_expr(s, 6).expect("listing parses"))
        .collect();
    if common != expected {
        return Err(
            "top-pair intersection disagrees with the recorded two-element set".to_string(),
        );
    }
    Ok("16 sets of size 5, all intersections 2, both recorded listings reproduce".to_string())
}

fn perp_orthogonal_five() -> Result<String, String> {
    // The recorded claim says the ten perpendicular sets have size 3 and
    // that non-perpendicular pairs share no common perpendicular root.
    // Exact computation agrees on the sizes but finds exactly one shared
    // root per pair, so this item fails until the recorded claim is
    // revised.
    let g = marked("GII(5)").perp_stats();
    if g.sizes.len() != 10 || g.sizes.iter().any(|(_, s)| *s != 3) {
        return Err(format!(
            "size histogram {:?}, expected all 10 sets of size 3",
            g.size_histogram
        ));
    }
    if g.pair_intersections.iter().any(|(_, _, s)| *s != 0) {
        return Err(format!(
            "recorded claim expects empty pairwise intersections, computed histogram {:?} over {} non-perpendicular pairs",
            g.intersection_histogram,
            g.pair_intersections.len()
        ));
    }
    Ok("10 sets of size 3 with empty pairwise intersections".to_string())
}

fn map_tables() -> Result<String, String> {
    let mut ids = Vec::new();
    for table in golden::BUILTIN_ROOT_MAPS {
        let src = space(table.source);
        let tgt = space(table.target);
        let map = builtin_map(src, tgt).map_err(|e| format!("{}: {e}", table.id))?;
        let report = verify_root_map(&map).map_err(|e| format!("{}: {e}", table.id))?;
        if !report.valid {
            return Err(format!(
                "{} fails verification: {}",
                table.id,
                report.witness.unwrap_or_else(|| "no witness".to_string())
            ));
        }
        if !(report.h_to_h && report.n_to_n) {
            return Err(format!("{} does not respect the partition cells", table.id));
        }
        ids.push(table.id);
    }
    Ok(format!(
        "{} built-in maps verify: {}",
        ids.len(),
        ids.join(", ")
    ))
}

/// The deletion-construction pairs the suite exercises, in fixed order.
fn deletion_pairs() -> Vec<(Space, Space)> {
    let mut pairs = vec![(space("GII(5)"), space("V")), (space("V"), space("VI"))];
    for a in 3..=8 {
        pairs.push((Space::Quadric(a), Space::Quadric(a + 2)));
    }
    pairs
}

fn deletion_construction() -> Result<String, String> {
    let pairs = deletion_pairs();
    for &(src, tgt) in &pairs {
        let map = deletion_map(src, tgt).map_err(|e| format!("({src}, {tgt}): {e}"))?;
        let report = verify_root_map(&map).map_err(|e| format!("({src}, {tgt}): {e}"))?;
        if !report.valid {
            return Err(format!(
                "({src}, {tgt}) fails verification: {}",
                report.witness.unwrap_or_else(|| "no witness".to_string())
            ));
        }
    }
    Ok(format!("{} constructed maps verify in full", pairs.len()))
}

fn kernel_special() -> Result<String, String> {
    // Matrix route: the two families whose correspondences live in
    // coordinate models rather than root tables.
    for (src, tgt) in [("GIII(3)", "G(3,3)"), ("G(3,3)", "GII(6)")] {
        let report = kernel_matrix_model(space(src), space(tgt))
            .map_err(|e| format!("({src}, {tgt}): {e}"))?;
        if report.verdict != Verdict::Nondegenerate {
            return Err(format!(
                "({src}, {tgt}) kernel dimension {} on the matrix route, expected 0",
                report.kernel_dim
            ));
        }
    }
    // Root-level route: the five built-in correspondences into the
    // exceptional spaces.
    for table in golden::BUILTIN_ROOT_MAPS {
        let map = builtin_map(space(table.source), space(table.target))
            .map_err(|e| format!("{}: {e}", table.id))?;
        let report = kernel_root_level(&map).map_err(|e| format!("{}: {e}", table.id))?;
        if report.verdict != Verdict::Nondegenerate {
            return Err(format!(
                "{} kernel basis {:?}, expected empty",
                table.id,
                report
                    .kernel_basis
                    .iter()
                    .map(Root::expr)
                    .collect::<Vec<_>>()
            ));
        }
    }
    Ok("2 matrix-route and 5 root-level special pairs are nondegenerate".to_string())
}

fn kernel_deletion() -> Result<String, String> {
    let pairs = deletion_pairs();
    let mut dims = Vec::new();
    for &(src, tgt) in &pairs {
        let map = deletion_map(src, tgt).map_err(|e| format!("({src}, {tgt}): {e}"))?;
        let report = kernel_root_level(&map).map_err(|e| format!("({src}, {tgt}): {e}"))?;
        if report.verdict != Verdict::Degenerate {
            return Err(format!(
                "({src}, {tgt}) has empty kernel, expected degenerate"
            ));
        }
        dims.push(format!("({src}, {tgt}): {}", report.kernel_basis.len()));
    }
    Ok(format!(
        "all degenerate; kernel dimensions {}",
        dims.join(", ")
    ))
}

fn kernel_quadric() -> Result<String, String> {
    let mut checked = 0usize;
    for b in 3..=12usize {
        for a in 2..b {
            let report = kernel_matrix_model(Space::Quadric(a), Space::Quadric(b))
                .map_err(|e| format!("(Q({a}), Q({b})): {e}"))?;
            if report.verdict != Verdict::Degenerate || report.kernel_dim != b - a {
                return Err(format!(
                    "(Q({a}), Q({b})) kernel dimension {}, expected {}",
                    report.kernel_dim,
                    b - a
                ));
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} quadric pairs degenerate with kernel dimension equal to the gap"
    ))
}

fn recorded_products() -> Result<String, String> {
    let vi = marked("VI");
    let h = parse_label_table(golden::FREUDENTHAL_H_LABELS, 7);
    let n = parse_label_table(golden::FREUDENTHAL_N_LABELS, 7);
    let by_root: BTreeMap<&Root, &str> = n
        .iter()
        .map(|(label, root)| (root, label.as_str()))
        .collect();
    let mut mismatches = Vec::new();
    for &(left, right, recorded) in golden::G33_VI_CLAIMED_PRODUCTS {
        let product = sff_shift(&vi, &h[left], &h[right])
            .map_err(|e| format!("sigma({left}, {right}): {e}"))?
            .ok_or_else(|| format!("sigma({left}, {right}) vanished, expected {recorded}"))?;
        let computed = by_root
            .get(&product)
            .ok_or_else(|| format!("sigma({left}, {right}) left the labeled N basis"))?;
        if *computed != recorded {
            mismatches.push(format!(
                "sigma({left}, {right}) = {computed}, recorded {recorded}"
            ));
        }
    }
    if mismatches.is_empty() {
        Ok("all 12 recorded products reproduce".to_string())
    } else {
        Err(mismatches.join("; "))
    }
}

const MODEL_SAMPLES: usize = 100;

fn matrix_models(seed: u64) -> Result<String, String> {
    for (src, tgt) in [("GIII(3)", "G(3,3)"), ("G(3,3)", "GII(6)")] {
        let report = model_rank_check(space(src), space(tgt), MODEL_SAMPLES, seed)
            .map_err(|e| format!("({src}, {tgt}): {e}"))?;
        if !report.rank_respected {
            return Err(format!(
                "({src}, {tgt}): a dense sample broke the rank factor {}",
                report.rank_factor
            ));
        }
        if !report.membership_respected {
            return Err(format!(
                "({src}, {tgt}): a rank-one sample left the VMRT cone"
            ));
        }
    }
    Ok(format!(
        "{MODEL_SAMPLES} samples per embedding respect rank and VMRT membership"
    ))
}

fn chern_nonsplit() -> Result<String, String> {
    let full = ChernPoly::new([1, 1, 1, 1, 1]).map_err(|e| e.to_string())?;
    for split in [(2usize, 2usize), (1, 3)] {
        if let Some((a, b)) = chern_factor_search(&full, split) {
            return Err(format!(
                "non-split class factored as {a:?} x {b:?} at split {split:?}"
            ));
        }
    }
    let control = ChernPoly::new([1, 2, 1, 0, 0]).map_err(|e| e.to_string())?;
    match chern_factor_search(&control, (1, 1)) {
        Some((a, b)) if a == vec![1, 1] && b == vec![1, 1] => {}
        other => {
            return Err(format!(
                "control class factored as {other:?}, expected (1+d)^2"
            ))
        }
    }
    Ok("non-split class refused at splits (2,2) and (1,3); control factors as (1+d)^2".to_string())
}

fn atlas_expected() -> Result<String, String> {
    let atlas = classify_all(8).map_err(|e| e.to_string())?;
    // The expected-table cross-check runs inside classify_all; spot-check a
    // few rows so this item also guards the wiring between the two.
    let find = |s: &str, t: &str| {
        atlas
            .records
            .iter()
            .find(|r| r.source == s && r.target == t)
            .ok_or_else(|| format!("atlas is missing the row ({s}, {t})"))
    };
    let q56 = find("Q(5)", "Q(6)")?;
    if q56.primary_category() != Some(Category::QuadricOdd)
        || q56.rigidity != Some(Rigidity::NonRigid)
    {
        return Err("(Q(5), Q(6)) is not recorded as an odd-gap non-rigid pair".to_string());
    }
    let sym = find("GIII(3)", "G(3,3)")?;
    if sym.primary_category() != Some(Category::Special)
        || sym.degeneracy != Degeneracy::Nondegenerate
    {
        return Err("(GIII(3), G(3,3)) is not recorded as special nondegenerate".to_string());
    }
    let del = find("GII(5)", "V")?;
    if del.primary_category() != Some(Category::Deletion)
        || del.degeneracy != Degeneracy::Degenerate
    {
        return Err("(GII(5), V) is not recorded as a degenerate deletion pair".to_string());
    }
    Ok(format!(
        "atlas at rank 8 has {} rows and passes its expected tables",
        atlas.records.len()
    ))
}

fn nonrigidity_witnesses(seed: u64) -> Result<String, String> {
    let mut notes = Vec::new();
    for (src, tgt) in [
        (Space::Quadric(3), Space::Quadric(5)),
        (space("GII(5)"), space("V")),
    ] {
        let map = deletion_map(src, tgt).map_err(|e| format!("({src}, {tgt}): {e}"))?;
        let report = nonrigidity_witness(&map, seed).map_err(|e| format!("({src}, {tgt}): {e}"))?;
        if !report.eta_squares_to_zero {
            return Err(format!("({src}, {tgt}): sigma(eta, eta) is nonzero"));
        }
        if !report.eta_kills_image {
            return Err(format!(
                "({src}, {tgt}): eta pairs nontrivially with the image"
            ));
        }
        if report.zeta_samples != ZETA_SAMPLES || !report.zeta_identity_holds {
            return Err(format!(
                "({src}, {tgt}): the cone identity failed within {} samples",
                report.zeta_samples
            ));
        }
        let expected_step = format!("w_{} = z_{}^2", report.sub_dim + 1, report.sub_dim);
        if report.recipe.get(1) != Some(&expected_step) {
            return Err(format!(
                "({src}, {tgt}): recipe step {:?}, expected {expected_step}",
                report.recipe.get(1)
            ));
        }
        let mut note = String::new();
        let _ = write!(
            note,
            "({src}, {tgt}): eta = {}, {} samples",
            report.eta.expr(),
            report.zeta_samples
        );
        notes.push(note);
    }
    Ok(notes.join("; "))
}
