//! Root correspondences between marked diagrams: the map representation
//! with its JSON round trip, full verification against the generated root
//! systems, the builtin hand-constructed tables, the chain-deletion
//! construction, and a deterministic backtracking search.

use std::collections::{BTreeMap, HashSet};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::chss::{ChssError, MarkedSpace, Space};
use crate::classify;
use crate::golden;
use crate::rootsys::{parse_root_expr, NodeId, Root};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorrespondError {
    #[error(transparent)]
    Space(#[from] ChssError),
    #[error("map between {src} and {tgt} is malformed: {reason}")]
    DiagramMismatch {
        src: Space,
        tgt: Space,
        reason: String,
    },
    #[error("no builtin correspondence table for ({src}, {tgt})")]
    NoBuiltin { src: Space, tgt: Space },
    #[error("({src}, {tgt}) is not a chain-deletion pair")]
    NotDeletionType { src: Space, tgt: Space },
    #[error("search exceeded its expansion budget of {budget}")]
    BudgetExceeded { budget: u64 },
}

/// How a map came to exist; retained through the JSON round trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    BuiltinTable,
    DeletionConstruction,
    Search,
    User,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::BuiltinTable => "builtin-table",
            Provenance::DeletionConstruction => "deletion-construction",
            Provenance::Search => "search",
            Provenance::User => "user",
        })
    }
}

/// An assignment of target roots to the source's simple roots, extended
/// linearly over the whole source root lattice by [`RootMap::apply`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootMap {
    source: Space,
    target: Space,
    assignments: BTreeMap<NodeId, Root>,
    provenance: Provenance,
}

impl RootMap {
    pub fn new(
        source: Space,
        target: Space,
        assignments: BTreeMap<NodeId, Root>,
        provenance: Provenance,
    ) -> RootMap {
        RootMap {
            source,
            target,
            assignments,
            provenance,
        }
    }

    pub fn source(&self) -> Space {
        self.source
    }

    pub fn target(&self) -> Space {
        self.target
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn assignments(&self) -> &BTreeMap<NodeId, Root> {
        &self.assignments
    }

    /// The image of a source lattice vector under the linear extension.
    pub fn apply(&self, beta: &Root) -> Root {
        let rank_t = self
            .assignments
            .values()
            .next()
            .map(Root::rank)
            .unwrap_or(0);
        let mut out = vec![0i64; rank_t];
        for (&i, img) in &self.assignments {
            let c = beta.coeff(i);
            if c != 0 {
                for (k, v) in img.coeffs().iter().enumerate() {
                    out[k] += c * v;
                }
            }
        }
        Root::new(out)
    }
}

#[derive(Serialize, Deserialize)]
struct RootMapWire {
    source: String,
    target: String,
    assignments: Vec<(NodeId, Vec<i64>)>,
    provenance: Provenance,
}

impl Serialize for RootMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RootMapWire {
            source: self.source.to_string(),
            target: self.target.to_string(),
            assignments: self
                .assignments
                .iter()
                .map(|(&i, r)| (i, r.coeffs().to_vec()))
                .collect(),
            provenance: self.provenance,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RootMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = RootMapWire::deserialize(deserializer)?;
        let source: Space = wire
            .source
            .parse()
            .map_err(|e| D::Error::custom(format!("source: {e}")))?;
        let target: Space = wire
            .target
            .parse()
            .map_err(|e| D::Error::custom(format!("target: {e}")))?;
        let mut assignments = BTreeMap::new();
        for (node, coeffs) in wire.assignments {
            if assignments.insert(node, Root::new(coeffs)).is_some() {
                return Err(D::Error::custom(format!("node {node} is assigned twice")));
            }
        }
        Ok(RootMap {
            source,
            target,
            assignments,
            provenance: wire.provenance,
        })
    }
}

/// The verification record for one map. `valid` is the conjunction of all
/// other boolean fields; each field isolates one way a map can fail, and
/// `witness` describes the first failure in field order.
#[derive(Debug, Clone, Serialize)]
pub struct MapReport {
    pub source: Space,
    pub target: Space,
    /// The marked source simple root maps to the marked target simple root.
    pub marked_preserved: bool,
    /// The linear image of every source root is a target root.
    pub images_are_roots: bool,
    /// Distinct source roots have distinct images.
    pub injective: bool,
    /// Every ordered pair of source simple roots keeps its Cartan integer.
    pub cartan_preserved: bool,
    /// For source roots a ≠ −b, a+b is a source root exactly when the image
    /// sum is a target root, so the image is closed as a subsystem.
    pub closure_respected: bool,
    /// Positive roots land on positive roots.
    pub positives_to_positives: bool,
    /// Compact roots land on compact roots.
    pub compacts_to_compacts: bool,
    /// Noncompact positive roots land on noncompact positive roots.
    pub noncompacts_to_noncompacts: bool,
    /// The H-part of the source partition lands in the target H-part.
    pub h_to_h: bool,
    /// The N-part of the source partition lands in the target N-part.
    pub n_to_n: bool,
    pub valid: bool,
    pub witness: Option<String>,
}

/// Checks a map in full against the generated source and target root
/// systems. Structural defects (wrong node set, wrong vector lengths) are
/// errors; mathematical defects come back as `false` fields in the report.
pub fn verify_root_map(map: &RootMap) -> Result<MapReport, CorrespondError> {
    let src = MarkedSpace::catalog_space(map.source)?;
    let tgt = MarkedSpace::catalog_space(map.target)?;
    let mismatch = |reason: String| CorrespondError::DiagramMismatch {
        src: map.source,
        tgt: map.target,
        reason,
    };

    let src_nodes: Vec<NodeId> = src.diagram().nodes().collect();
    let assigned: Vec<NodeId> = map.assignments.keys().copied().collect();
    if assigned != src_nodes {
        return Err(mismatch(format!(
            "assignments cover nodes {assigned:?}, expected {src_nodes:?}"
        )));
    }
    for (&i, img) in &map.assignments {
        if img.rank() != tgt.diagram().rank() {
            return Err(mismatch(format!(
                "image of node {i} has {} coefficients, expected {}",
                img.rank(),
                tgt.diagram().rank()
            )));
        }
    }

    let mut witness: Option<String> = None;
    let note = |ok: bool, w: &mut Option<String>, msg: String| -> bool {
        if !ok && w.is_none() {
            *w = Some(msg);
        }
        ok
    };

    let marked_preserved = map.assignments[&src.marked_node()] == tgt.gamma();
    note(
        marked_preserved,
        &mut witness,
        format!(
            "marked node {} maps to {}, not to the marked root {}",
            src.marked_node(),
            map.assignments[&src.marked_node()],
            tgt.gamma()
        ),
    );

    // Cache the image of every source root once.
    let images: Vec<(Root, Root)> = src
        .system()
        .roots()
        .iter()
        .map(|b| (b.clone(), map.apply(b)))
        .collect();

    let mut images_are_roots = true;
    for (b, img) in &images {
        if !tgt.system().is_root(img) {
            images_are_roots = false;
            note(
                false,
                &mut witness,
                format!("image {img} of root {b} is not a root"),
            );
            break;
        }
    }

    let distinct: HashSet<&[i64]> = images.iter().map(|(_, img)| img.coeffs()).collect();
    let injective = distinct.len() == images.len();
    note(
        injective,
        &mut witness,
        "two source roots share an image".to_string(),
    );

    // Cartan preservation in multiplicative form, 2(x,y) = c·(x,x), so a
    // degenerate zero image cannot divide by zero.
    let mut cartan_preserved = true;
    for &i in &src_nodes {
        for &j in &src_nodes {
            if i == j {
                continue;
            }
            let c = src.diagram().cartan_entry(i, j);
            let x = &map.assignments[&i];
            let y = &map.assignments[&j];
            let lhs = 2 * tgt.diagram().inner(x, y);
            let rhs = c * tgt.diagram().inner(x, x);
            if lhs != rhs {
                cartan_preserved = false;
                note(
                    false,
                    &mut witness,
                    format!("Cartan integer of nodes ({i},{j}) is not preserved"),
                );
            }
        }
    }

    let mut closure_respected = true;
    'closure: for (a, ia) in &images {
        for (b, ib) in &images {
            if a.add(b).is_zero() {
                continue;
            }
            let src_sum = src.system().is_root(&a.add(b));
            let tgt_sum = tgt.system().is_root(&ia.add(ib));
            if src_sum != tgt_sum {
                closure_respected = false;
                note(
                    false,
                    &mut witness,
                    format!(
                        "closure mismatch on {a} + {b}: source sum {} a root, image sum {} a root",
                        if src_sum { "is" } else { "is not" },
                        if tgt_sum { "is" } else { "is not" }
                    ),
                );
                break 'closure;
            }
        }
    }

    let find = |pred: &dyn Fn(&Root, &Root) -> bool, from: &[Root]| -> Option<(Root, Root)> {
        from.iter().find_map(|b| {
            let img = map.apply(b);
            if pred(b, &img) {
                None
            } else {
                Some((b.clone(), img))
            }
        })
    };

    let positives_bad = find(&|_, img| img.is_nonnegative(), src.system().positives());
    let positives_to_positives = note(
        positives_bad.is_none(),
        &mut witness,
        positives_bad
            .as_ref()
            .map(|(b, img)| format!("positive root {b} maps to non-positive {img}"))
            .unwrap_or_default(),
    );

    let t_marked = tgt.marked_node();
    let compacts_bad = find(&|_, img| img.coeff(t_marked) == 0, &src.compact_positives());
    let compacts_to_compacts = note(
        compacts_bad.is_none(),
        &mut witness,
        compacts_bad
            .as_ref()
            .map(|(b, img)| format!("compact root {b} maps to non-compact {img}"))
            .unwrap_or_default(),
    );

    let noncompacts_bad = find(
        &|_, img| img.coeff(t_marked) == 1 && img.is_nonnegative(),
        &src.noncompact_positives(),
    );
    let noncompacts_to_noncompacts = note(
        noncompacts_bad.is_none(),
        &mut witness,
        noncompacts_bad
            .as_ref()
            .map(|(b, img)| format!("noncompact positive {b} maps to {img}"))
            .unwrap_or_default(),
    );

    let src_part = src.hc_partition();
    let tgt_part = tgt.hc_partition();
    let in_set = |img: &Root, set: &[Root]| set.iter().any(|r| r == img);

    let h_bad = find(&|_, img| in_set(img, &tgt_part.h_set), &src_part.h_set);
    let h_to_h = note(
        h_bad.is_none(),
        &mut witness,
        h_bad
            .as_ref()
            .map(|(b, img)| format!("H-root {b} maps to {img} outside the target H-part"))
            .unwrap_or_default(),
    );

    let n_bad = find(&|_, img| in_set(img, &tgt_part.n_set), &src_part.n_set);
    let n_to_n = note(
        n_bad.is_none(),
        &mut witness,
        n_bad
            .as_ref()
            .map(|(b, img)| format!("N-root {b} maps to {img} outside the target N-part"))
            .unwrap_or_default(),
    );

    let valid = marked_preserved
        && images_are_roots
        && injective
        && cartan_preserved
        && closure_respected
        && positives_to_positives
        && compacts_to_compacts
        && noncompacts_to_noncompacts
        && h_to_h
        && n_to_n;

    Ok(MapReport {
        source: map.source,
        target: map.target,
        marked_preserved,
        images_are_roots,
        injective,
        cartan_preserved,
        closure_respected,
        positives_to_positives,
        compacts_to_compacts,
        noncompacts_to_noncompacts,
        h_to_h,
        n_to_n,
        valid,
        witness: if valid { None } else { witness },
    })
}

/// Returns the hand-constructed table for the pair when one exists, or the
/// node identification when the source diagram sits inside the target
/// diagram. Grassmannian sources are accepted in either parameter order.
pub fn builtin_map(source: Space, target: Space) -> Result<RootMap, CorrespondError> {
    let target_name = target.to_string();
    for table in golden::BUILTIN_ROOT_MAPS {
        if table.target != target_name {
            continue;
        }
        let direct = source.to_string() == table.source;
        let flipped = match source {
            Space::Grass(p, q) => Space::Grass(q, p).to_string() == table.source,
            _ => false,
        };
        if !direct && !flipped {
            continue;
        }
        let tgt = MarkedSpace::catalog_space(target)?;
        let rank_s = table.assignments.len();
        let mut assignments = BTreeMap::new();
        for &(node, expr) in table.assignments {
            let img = parse_root_expr(expr, tgt.diagram().rank())
                .expect("builtin tables hold well-formed expressions");
            let key = if direct { node } else { rank_s + 1 - node };
            assignments.insert(key, img);
        }
        return Ok(RootMap {
            source,
            target,
            assignments,
            provenance: Provenance::BuiltinTable,
        });
    }

    let src_ms = MarkedSpace::catalog_space(source)?;
    let tgt_ms = MarkedSpace::catalog_space(target)?;
    if let Some(ev) = classify::subdiagram_match(&src_ms, &tgt_ms) {
        let assignments = ev
            .node_map
            .iter()
            .map(|(&i, &x)| (i, tgt_ms.diagram().simple(x)))
            .collect();
        return Ok(RootMap {
            source,
            target,
            assignments,
            provenance: Provenance::BuiltinTable,
        });
    }
    Err(CorrespondError::NoBuiltin {
        src: source,
        tgt: target,
    })
}

/// Builds the correspondence for a chain-deletion pair: the source marked
/// node goes to the target marked root, each source node adjacent to it
/// goes to the sum of the chain past the marked node, the chain's survivor
/// neighbor, and its own identified node, and every other node goes to its
/// identified node.
pub fn deletion_map(source: Space, target: Space) -> Result<RootMap, CorrespondError> {
    let src_ms = MarkedSpace::catalog_space(source)?;
    let tgt_ms = MarkedSpace::catalog_space(target)?;
    let ev =
        classify::deletion_match(&src_ms, &tgt_ms).ok_or(CorrespondError::NotDeletionType {
            src: source,
            tgt: target,
        })?;

    let rank_t = tgt_ms.diagram().rank();
    let mut tail = vec![0i64; rank_t];
    for &x in ev.chain.iter().skip(1) {
        tail[x - 1] += 1;
    }
    tail[ev.gamma_prime - 1] += 1;

    let marked0 = src_ms.marked_node();
    let mut assignments = BTreeMap::new();
    for i in src_ms.diagram().nodes() {
        let img = if i == marked0 {
            tgt_ms.gamma()
        } else if src_ms.diagram().adjacent(i, marked0) {
            let mut v = tail.clone();
            v[ev.node_map[&i] - 1] += 1;
            Root::new(v)
        } else {
            tgt_ms.diagram().simple(ev.node_map[&i])
        };
        assignments.insert(i, img);
    }
    Ok(RootMap {
        source,
        target,
        assignments,
        provenance: Provenance::DeletionConstruction,
    })
}

/// Deterministic backtracking search for a valid correspondence. The source
/// marked node is pinned to the target marked root; every other node ranges
/// over the target's compact positive roots in ascending coefficient order.
/// Partial assignments are pruned by pairwise Cartan preservation, and
/// complete ones are accepted only if full verification passes. Each
/// candidate consideration costs one unit of `budget`.
pub fn search_root_map(
    source: Space,
    target: Space,
    budget: u64,
) -> Result<Option<RootMap>, CorrespondError> {
    let src_ms = MarkedSpace::catalog_space(source)?;
    let tgt_ms = MarkedSpace::catalog_space(target)?;

    let mut candidates = tgt_ms.compact_positives();
    candidates.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
    let free: Vec<NodeId> = src_ms
        .diagram()
        .nodes()
        .filter(|&i| i != src_ms.marked_node())
        .collect();

    struct Search<'a> {
        src_ms: &'a MarkedSpace,
        tgt_ms: &'a MarkedSpace,
        candidates: &'a [Root],
        free: &'a [NodeId],
        source: Space,
        target: Space,
        spent: u64,
        budget: u64,
    }

    impl Search<'_> {
        fn go(
            &mut self,
            depth: usize,
            assigned: &mut BTreeMap<NodeId, Root>,
        ) -> Result<Option<RootMap>, CorrespondError> {
            let Some(&node) = self.free.get(depth) else {
                let map = RootMap {
                    source: self.source,
                    target: self.target,
                    assignments: assigned.clone(),
                    provenance: Provenance::Search,
                };
                return Ok(if verify_root_map(&map)?.valid {
                    Some(map)
                } else {
                    None
                });
            };
            for x in self.candidates {
                self.spent += 1;
                if self.spent > self.budget {
                    return Err(CorrespondError::BudgetExceeded {
                        budget: self.budget,
                    });
                }
                let tgt_sys = self.tgt_ms.system();
                let ok = assigned.iter().all(|(&j, y)| {
                    y != x
                        && tgt_sys.cartan_int(x, y) == self.src_ms.diagram().cartan_entry(node, j)
                        && tgt_sys.cartan_int(y, x) == self.src_ms.diagram().cartan_entry(j, node)
                });
                if !ok {
                    continue;
                }
                assigned.insert(node, x.clone());
                if let Some(found) = self.go(depth + 1, assigned)? {
                    return Ok(Some(found));
                }
                assigned.remove(&node);
            }
            Ok(None)
        }
    }

    let mut assigned = BTreeMap::new();
    assigned.insert(src_ms.marked_node(), tgt_ms.gamma());
    Search {
        src_ms: &src_ms,
        tgt_ms: &tgt_ms,
        candidates: &candidates,
        free: &free,
        source,
        target,
        spent: 0,
        budget,
    }
    .go(0, &mut assigned)
}
