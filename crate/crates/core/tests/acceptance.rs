//! Acceptance gate: twelve numbered criteria, one pass/fail line each.
//!
//! Each criterion checks a recorded expectation end to end. The gate
//! prints every line before deciding, so a failing run still shows the
//! full scoreboard. Three criteria are currently red on purpose: two
//! recorded claims disagree with exact computation (criteria 3 and 6),
//! and one recorded non-existence claim is contradicted by an exhaustive
//! search (criterion 10). The mismatching values are reproduced in the
//! printed details rather than papered over.

use std::collections::BTreeSet;
use std::str::FromStr;
use std::time::Instant;

use cartan_vmrt_core::chss::{MarkedSpace, Space};
use cartan_vmrt_core::classify::{classify_all, Category, Rigidity};
use cartan_vmrt_core::correspond::{
    builtin_map, deletion_map, search_root_map, verify_root_map, RootMap,
};
use cartan_vmrt_core::golden;
use cartan_vmrt_core::matmodel::{
    chern_factor_search, kernel_matrix_model, model_rank_check, ChernPoly,
};
use cartan_vmrt_core::rootsys::{parse_root_expr, Root};
use cartan_vmrt_core::vmrt::{
    kernel_root_level, nonrigidity_witness, randomized_kernel_oracle, sff_pattern, sff_shift,
    Verdict, ZETA_SAMPLES,
};

type Criterion = fn() -> Result<String, String>;

fn space(name: &str) -> Space {
    Space::from_str(name).expect("acceptance space names parse")
}

fn marked(name: &str) -> MarkedSpace {
    MarkedSpace::catalog_space(space(name)).expect("acceptance spaces are in the catalog")
}

fn roots_from(exprs: &[&str], rank: usize) -> BTreeSet<Root> {
    exprs
        .iter()
        .map(|s| parse_root_expr(s, rank).expect("listed expressions parse"))
        .collect()
}

/// The thirteen correspondences with a constructed map: five built-in
/// tables and eight deletion pairs.
fn constructed_maps() -> Vec<RootMap> {
    let mut maps: Vec<RootMap> = golden::BUILTIN_ROOT_MAPS
        .iter()
        .map(|t| builtin_map(space(t.source), space(t.target)).expect("built-in tables load"))
        .collect();
    maps.push(deletion_map(space("GII(5)"), space("V")).expect("deletion pair"));
    maps.push(deletion_map(space("V"), space("VI")).expect("deletion pair"));
    for a in 3..=8 {
        maps.push(deletion_map(Space::Quadric(a), Space::Quadric(a + 2)).expect("deletion pair"));
    }
    maps
}

fn criterion_1() -> Result<String, String> {
    for (name, positives, noncompact) in [("V", 36usize, 16usize), ("VI", 63, 27)] {
        let ms = marked(name);
        let got_pos = ms.system().positives().len();
        let got_nc = ms.noncompact_positives().len();
        if got_pos != positives || got_nc != noncompact {
            return Err(format!(
                "{name}: {got_pos} positive / {got_nc} noncompact, expected {positives} / {noncompact}"
            ));
        }
    }
    Ok("E6 has 36 positive roots (16 noncompact), E7 has 63 (27 noncompact)".to_string())
}

fn criterion_2() -> Result<String, String> {
    let vi = marked("VI");
    let part = vi.hc_partition();
    if part.h_set.len() != 16 || part.n_set.len() != 10 {
        return Err(format!(
            "|H| = {}, |N| = {}, expected 16 and 10",
            part.h_set.len(),
            part.n_set.len()
        ));
    }
    let h_cell: BTreeSet<&Root> = part.h_set.iter().collect();
    let n_cell: BTreeSet<&Root> = part.n_set.iter().collect();
    for &(label, expr) in golden::FREUDENTHAL_H_LABELS {
        let root = parse_root_expr(expr, 7).map_err(|e| format!("{label}: {e}"))?;
        if !vi.system().is_root(&root) {
            return Err(format!("{label} is not an E7 root"));
        }
        if !h_cell.contains(&root) {
            return Err(format!("{label} is not in the H cell"));
        }
    }
    for &(label, expr) in golden::FREUDENTHAL_N_LABELS {
        let root = parse_root_expr(expr, 7).map_err(|e| format!("{label}: {e}"))?;
        if !vi.system().is_root(&root) {
            return Err(format!("{label} is not an E7 root"));
        }
        if !n_cell.contains(&root) {
            return Err(format!("{label} is not in the N cell"));
        }
    }
    Ok("all 26 labeled expressions are E7 roots in their recorded cells".to_string())
}

fn criterion_3() -> Result<String, String> {
    let v = marked("V");
    let stats = v.perp_stats();
    if stats.sizes.len() != 16 || stats.sizes.iter().any(|(_, s)| *s != 5) {
        return Err(format!("V size histogram {:?}", stats.size_histogram));
    }
    if stats.pair_intersections.iter().any(|(_, _, s)| *s != 2) {
        return Err(format!(
            "V intersection histogram {:?}",
            stats.intersection_histogram
        ));
    }
    let gamma = v.gamma();
    let listed = roots_from(
        &[
            "a6+2a5+2a4+a3+a2",
            "a6+2a5+2a4+a3+a2+a1",
            "a6+2a5+2a4+2a3+a2+a1",
            "a6+2a5+3a4+2a3+a2+a1",
            "a6+2a5+3a4+2a3+2a2+a1",
        ],
        6,
    );
    let computed: BTreeSet<Root> = v
        .perp_set(&gamma)
        .map_err(|e| e.to_string())?
        .into_iter()
        .collect();
    if computed != listed {
        return Err("perp of the marked root disagrees with the recorded listing".to_string());
    }
    let b15 = parse_root_expr("a6+2a5+3a4+2a3+a2+a1", 6).expect("listing parses");
    let b16 = parse_root_expr("a6+2a5+3a4+2a3+2a2+a1", 6).expect("listing parses");
    let p15: BTreeSet<Root> = v.perp_set(&b15).unwrap().into_iter().collect();
    let p16: BTreeSet<Root> = v.perp_set(&b16).unwrap().into_iter().collect();
    let common: BTreeSet<Root> = p15.intersection(&p16).cloned().collect();
    if common != roots_from(&["a6", "a6+a5"], 6) {
        return Err("top-pair intersection in V disagrees with the recorded set".to_string());
    }
    let g = marked("GII(5)").perp_stats();
    if g.sizes.len() != 10 || g.sizes.iter().any(|(_, s)| *s != 3) {
        return Err(format!("GII(5) size histogram {:?}", g.size_histogram));
    }
    // The recorded claim: non-perpendicular pairs in GII(5) share no
    // common perpendicular root. Exact computation finds one per pair.
    if g.pair_intersections.iter().any(|(_, _, s)| *s != 0) {
        return Err(format!(
            "V listings hold, but GII(5) intersections are expected empty and compute to {:?} over {} pairs",
            g.intersection_histogram,
            g.pair_intersections.len()
        ));
    }
    Ok("V and GII(5) perpendicular combinatorics match every recorded value".to_string())
}

fn criterion_4() -> Result<String, String> {
    for map in constructed_maps() {
        let report = verify_root_map(&map).map_err(|e| e.to_string())?;
        if !report.valid {
            return Err(format!(
                "({}, {}) fails verification: {}",
                map.source(),
                map.target(),
                report
                    .witness
                    .unwrap_or_else(|| "unspecified defect".to_string())
            ));
        }
        if !(report.h_to_h && report.n_to_n) {
            return Err(format!(
                "({}, {}) does not respect the partition cells",
                map.source(),
                map.target()
            ));
        }
    }
    Ok("5 built-in and 8 deletion maps verify, with H -> H and N -> N".to_string())
}

fn criterion_5() -> Result<String, String> {
    for (src, tgt) in [("GIII(3)", "G(3,3)"), ("G(3,3)", "GII(6)")] {
        let report = kernel_matrix_model(space(src), space(tgt)).map_err(|e| e.to_string())?;
        if report.verdict != Verdict::Nondegenerate {
            return Err(format!("({src}, {tgt}) is degenerate on the matrix route"));
        }
    }
    for table in golden::BUILTIN_ROOT_MAPS {
        let map = builtin_map(space(table.source), space(table.target)).unwrap();
        let report = kernel_root_level(&map).map_err(|e| e.to_string())?;
        if report.verdict != Verdict::Nondegenerate {
            return Err(format!("{} is degenerate on the root route", table.id));
        }
    }
    for map in constructed_maps().into_iter().skip(5) {
        let report = kernel_root_level(&map).map_err(|e| e.to_string())?;
        if report.verdict != Verdict::Degenerate {
            return Err(format!(
                "deletion pair ({}, {}) has empty kernel",
                map.source(),
                map.target()
            ));
        }
    }
    for b in 3..=12usize {
        for a in 2..b {
            let report = kernel_matrix_model(Space::Quadric(a), Space::Quadric(b))
                .map_err(|e| e.to_string())?;
            if report.verdict != Verdict::Degenerate || report.kernel_dim != b - a {
                return Err(format!(
                    "(Q({a}), Q({b})) kernel dimension {}, expected {}",
                    report.kernel_dim,
                    b - a
                ));
            }
        }
    }
    Ok("7 special pairs nondegenerate; 8 deletion pairs and 55 quadric pairs degenerate with gap-sized kernels".to_string())
}

fn criterion_6() -> Result<String, String> {
    let vi = marked("VI");
    let h: Vec<(String, Root)> = golden::FREUDENTHAL_H_LABELS
        .iter()
        .map(|&(l, e)| (l.to_string(), parse_root_expr(e, 7).unwrap()))
        .collect();
    let n: Vec<(String, Root)> = golden::FREUDENTHAL_N_LABELS
        .iter()
        .map(|&(l, e)| (l.to_string(), parse_root_expr(e, 7).unwrap()))
        .collect();
    let lookup = |label: &str, table: &[(String, Root)]| {
        table
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, r)| r.clone())
            .expect("product labels are defined")
    };
    let mut mismatches = Vec::new();
    for &(left, right, recorded) in golden::G33_VI_CLAIMED_PRODUCTS {
        let product = sff_shift(&vi, &lookup(left, &h), &lookup(right, &h))
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("sigma({left}, {right}) vanished"))?;
        let computed = n
            .iter()
            .find(|(_, r)| *r == product)
            .map(|(l, _)| l.as_str())
            .ok_or_else(|| format!("sigma({left}, {right}) left the N basis"))?;
        if computed != recorded {
            mismatches.push(format!(
                "sigma({left}, {right}) = {computed}, recorded {recorded}"
            ));
        }
    }
    if mismatches.is_empty() {
        Ok("all 12 recorded products reproduce verbatim".to_string())
    } else {
        Err(mismatches.join("; "))
    }
}

fn criterion_7() -> Result<String, String> {
    let mut pairs = 0usize;
    for map in constructed_maps() {
        let expected = kernel_root_level(&map)
            .map_err(|e| e.to_string())?
            .kernel_basis
            .len();
        let pattern = sff_pattern(map.target()).map_err(|e| e.to_string())?;
        let src = MarkedSpace::catalog_space(map.source()).unwrap();
        let image: Vec<Root> = src
            .hc_partition()
            .h_set
            .iter()
            .map(|b| map.apply(b))
            .collect();
        for seed in [1u64, 2, 3] {
            let oracle = randomized_kernel_oracle(&pattern, &image, 3, seed);
            if oracle.kernel_dimension != expected {
                return Err(format!(
                    "({}, {}) seed {seed}: oracle dimension {}, root-level {expected}",
                    map.source(),
                    map.target(),
                    oracle.kernel_dimension
                ));
            }
        }
        pairs += 1;
    }
    Ok(format!(
        "oracle matches the root-level kernel on {pairs} pairs at 3 seeds"
    ))
}

fn criterion_8() -> Result<String, String> {
    for (src, tgt) in [("GIII(3)", "G(3,3)"), ("G(3,3)", "GII(6)")] {
        let report =
            model_rank_check(space(src), space(tgt), 100, 41).map_err(|e| e.to_string())?;
        if !report.rank_respected || !report.membership_respected {
            return Err(format!(
                "({src}, {tgt}): rank respected {}, membership respected {}",
                report.rank_respected, report.membership_respected
            ));
        }
    }
    Ok("100 samples per embedding keep the rank relation and VMRT membership".to_string())
}

fn criterion_9() -> Result<String, String> {
    let full = ChernPoly::new([1, 1, 1, 1, 1]).unwrap();
    for split in [(2usize, 2usize), (1, 3)] {
        if chern_factor_search(&full, split).is_some() {
            return Err(format!("the non-split class factored at {split:?}"));
        }
    }
    match chern_factor_search(&ChernPoly::new([1, 2, 1, 0, 0]).unwrap(), (1, 1)) {
        Some((a, b)) if a == vec![1, 1] && b == vec![1, 1] => {}
        other => return Err(format!("control factored as {other:?}")),
    }
    Ok("no factorization at (2,2) or (1,3); the control class factors as (1+d)^2".to_string())
}

fn criterion_10() -> Result<String, String> {
    let budget = 10_000_000u64;
    let mut timings = Vec::new();
    let mut found_maps = Vec::new();
    for (src, tgt) in [("GIII(3)", "G(3,3)"), ("Q(4)", "Q(5)")] {
        let start = Instant::now();
        let outcome = search_root_map(space(src), space(tgt), budget).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        if elapsed.as_secs() >= 10 {
            return Err(format!("({src}, {tgt}) search took {elapsed:?}"));
        }
        timings.push(format!("({src}, {tgt}) in {elapsed:?}"));
        if outcome.is_some() {
            found_maps.push(format!("({src}, {tgt})"));
        }
    }
    // The recorded claim expects both searches to come back empty. The
    // quadric search actually finds a valid correspondence, which the
    // verifier accepts; that contradiction stays visible here.
    if !found_maps.is_empty() {
        return Err(format!(
            "expected no valid correspondence, but the search found one for {}",
            found_maps.join(" and ")
        ));
    }
    Ok(format!(
        "both searches exhausted with no map: {}",
        timings.join(", ")
    ))
}

fn criterion_11() -> Result<String, String> {
    let atlas = classify_all(8).map_err(|e| e.to_string())?;
    let v_sources: Vec<&str> = atlas
        .records_with_target(space("V"))
        .iter()
        .filter(|r| !r.categories.is_empty())
        .filter(|r| r.rigidity != Some(Rigidity::OutOfScopeLinear))
        .map(|r| r.source.as_str())
        .collect();
    let expected_v = [
        "G(2,2)", "G(2,3)", "G(2,4)", "GII(5)", "Q(2)", "Q(3)", "Q(5)", "Q(6)", "Q(7)", "Q(8)",
    ];
    if v_sources != expected_v {
        return Err(format!(
            "sources into V: {v_sources:?}, expected {expected_v:?}"
        ));
    }
    let check = |src: &str, tgt: &str, category: Category, rigidity: Rigidity| {
        let record = atlas
            .records
            .iter()
            .find(|r| r.source == src && r.target == tgt)
            .ok_or_else(|| format!("missing atlas row ({src}, {tgt})"))?;
        if record.primary_category() != Some(category) {
            return Err(format!(
                "({src}, {tgt}) categorized {:?}",
                record.primary_category()
            ));
        }
        if record.rigidity != Some(rigidity) {
            return Err(format!("({src}, {tgt}) rigidity {:?}", record.rigidity));
        }
        Ok(())
    };
    check("Q(8)", "V", Category::Subdiagram, Rigidity::Rigid)?;
    check("G(2,4)", "V", Category::Special, Rigidity::OpenAlgebraic)?;
    check("GII(5)", "V", Category::Deletion, Rigidity::NonRigid)?;
    check("Q(5)", "Q(6)", Category::QuadricOdd, Rigidity::NonRigid)?;
    check("GII(6)", "VI", Category::Special, Rigidity::OpenAlgebraic)?;
    check(
        "G(3,3)",
        "GII(7)",
        Category::Special,
        Rigidity::OpenAlgebraic,
    )?;
    check(
        "GIII(3)",
        "G(4,5)",
        Category::Special,
        Rigidity::OpenAlgebraic,
    )?;
    Ok(format!(
        "atlas at rank 8 ({} rows) reproduces the expected source lists and verdicts",
        atlas.records.len()
    ))
}

fn criterion_12() -> Result<String, String> {
    for (src, tgt) in [("Q(3)", "Q(5)"), ("GII(5)", "V")] {
        let map = deletion_map(space(src), space(tgt)).map_err(|e| e.to_string())?;
        for seed in [0u64, 1, 2] {
            let report = nonrigidity_witness(&map, seed).map_err(|e| e.to_string())?;
            if !report.eta_squares_to_zero || !report.eta_kills_image {
                return Err(format!("({src}, {tgt}) seed {seed}: eta checks failed"));
            }
            if report.zeta_samples != ZETA_SAMPLES || !report.zeta_identity_holds {
                return Err(format!(
                    "({src}, {tgt}) seed {seed}: cone identity failed within {} samples",
                    report.zeta_samples
                ));
            }
            let step = format!("w_{} = z_{}^2", report.sub_dim + 1, report.sub_dim);
            if report.recipe.get(1) != Some(&step) {
                return Err(format!(
                    "({src}, {tgt}) seed {seed}: recipe {:?} lacks the step {step}",
                    report.recipe
                ));
            }
        }
    }
    Ok("both witnesses hold at 3 seeds with 20 samples each and the squaring recipe".to_string())
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<(&str, Criterion)> = vec![
        ("criterion 1: exceptional root counts", criterion_1),
        ("criterion 2: labeled partition of VI", criterion_2),
        ("criterion 3: perpendicular combinatorics", criterion_3),
        ("criterion 4: constructed maps verify", criterion_4),
        ("criterion 5: kernel verdicts on both routes", criterion_5),
        ("criterion 6: recorded product table", criterion_6),
        ("criterion 7: randomized oracle agreement", criterion_7),
        ("criterion 8: embedding rank functoriality", criterion_8),
        ("criterion 9: Chern factorization control", criterion_9),
        ("criterion 10: exhaustive search outcomes", criterion_10),
        ("criterion 11: classification atlas", criterion_11),
        ("criterion 12: non-rigidity witnesses", criterion_12),
    ];
    let mut failures = Vec::new();
    for (name, body) in criteria {
        match body() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                failures.push(name);
            }
        }
    }
    assert!(
        failures.is_empty(),
        "{} of 12 criteria failed: {}; the printed lines above carry the computed values",
        failures.len(),
        failures.join("; ")
    );
}
