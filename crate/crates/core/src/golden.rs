//! Embedded reference data consumed by the library and frozen into the
//! verification suite: hand-constructed correspondence tables,
//! perpendicular-set listings, tangent-vector product tables, and expected
//! classification rows. Every block carries a stable anchor id so a failed
//! check can name the datum it disagrees with.

/// One hand-constructed root correspondence. Assignments give, per source
/// node, the image root as an expression in the target's simple roots.
#[derive(Debug, Clone, Copy)]
pub struct BuiltinMapTable {
    pub id: &'static str,
    pub source: &'static str,
    pub target: &'static str,
    pub assignments: &'static [(usize, &'static str)],
}

/// Anchor block `map-tables`: the five hand-constructed correspondences
/// into the two exceptional spaces. Source nodes use the catalog numbering
/// (A-chains 1..n left to right with G(p,q) marked at p; GII(n) is D_n
/// marked at the fork tip n).
pub const BUILTIN_ROOT_MAPS: &[BuiltinMapTable] = &[
    BuiltinMapTable {
        id: "map-g42-v",
        source: "G(4,2)",
        target: "V",
        assignments: &[
            (1, "a3"),
            (2, "a1"),
            (3, "a5+2a4+a3+a2"),
            (4, "a6"),
            (5, "a5"),
        ],
    },
    BuiltinMapTable {
        id: "map-gii66-vi",
        source: "GII(6)",
        target: "VI",
        assignments: &[
            (1, "a3"),
            (2, "a1"),
            (3, "a5+2a4+a3+a2"),
            (4, "a6"),
            (5, "a5"),
            (6, "a7"),
        ],
    },
    BuiltinMapTable {
        id: "map-g62-vi",
        source: "G(6,2)",
        target: "VI",
        assignments: &[
            (1, "a2"),
            (2, "a4"),
            (3, "a3"),
            (4, "a1"),
            (5, "a6+2a5+2a4+a3+a2"),
            (6, "a7"),
            (7, "a6"),
        ],
    },
    // The G(5,2) table is the G(6,2) table with the far-end node dropped
    // and the chain renumbered.
    BuiltinMapTable {
        id: "map-g52-vi",
        source: "G(5,2)",
        target: "VI",
        assignments: &[
            (1, "a4"),
            (2, "a3"),
            (3, "a1"),
            (4, "a6+2a5+2a4+a3+a2"),
            (5, "a7"),
            (6, "a6"),
        ],
    },
    BuiltinMapTable {
        id: "map-g33-vi",
        source: "G(3,3)",
        target: "VI",
        assignments: &[
            (1, "a5+a4+a3+a2"),
            (2, "a6+a5+a4"),
            (3, "a7"),
            (4, "a6+a5+a4+a3+a2+a1"),
            (5, "a4+a3"),
        ],
    },
];

/// Anchor block `sff-vi-h-basis`: the sixteen H-directions of `VI` at the
/// base point, labeled u1..u16 in the order used by the product table
/// below. Expressions are roots of E7 in the catalog numbering; the marked
/// root a7 appears in each with coefficient 1.
pub const FREUDENTHAL_H_LABELS: &[(&str, &str)] = &[
    ("u1", "a6+a7"),
    ("u2", "a5+a6+a7"),
    ("u3", "a4+a5+a6+a7"),
    ("u4", "a2+a4+a5+a6+a7"),
    ("u5", "a3+a4+a5+a6+a7"),
    ("u6", "a1+a3+a4+a5+a6+a7"),
    ("u7", "a2+a3+a4+a5+a6+a7"),
    ("u8", "a2+a3+2a4+a5+a6+a7"),
    ("u9", "a2+a3+2a4+2a5+a6+a7"),
    ("u10", "a1+a2+a3+a4+a5+a6+a7"),
    ("u11", "a1+a2+a3+2a4+a5+a6+a7"),
    ("u12", "a1+a2+2a3+2a4+a5+a6+a7"),
    ("u13", "a1+a2+a3+2a4+2a5+a6+a7"),
    ("u14", "a1+a2+2a3+2a4+2a5+a6+a7"),
    ("u15", "a1+a2+2a3+3a4+2a5+a6+a7"),
    ("u16", "a1+2a2+2a3+3a4+2a5+a6+a7"),
];

/// Anchor block `sff-vi-n-basis`: the ten N-directions of `VI`, labeled
/// v1..v10.
pub const FREUDENTHAL_N_LABELS: &[(&str, &str)] = &[
    ("v1", "a2+a3+2a4+2a5+2a6+a7"),
    ("v2", "a1+a2+a3+2a4+2a5+2a6+a7"),
    ("v3", "a1+a2+2a3+2a4+2a5+2a6+a7"),
    ("v4", "a1+a2+2a3+3a4+2a5+2a6+a7"),
    ("v5", "a1+2a2+2a3+3a4+2a5+2a6+a7"),
    ("v6", "a1+a2+2a3+3a4+3a5+2a6+a7"),
    ("v7", "a1+2a2+2a3+3a4+3a5+2a6+a7"),
    ("v8", "a1+2a2+2a3+4a4+3a5+2a6+a7"),
    ("v9", "a1+2a2+3a3+4a4+3a5+2a6+a7"),
    ("v10", "2a1+2a2+3a3+4a4+3a5+2a6+a7"),
];

/// Anchor block `sff-g33-vi-products`: the recorded second-fundamental-form
/// products for the pair (G(3,3), VI). The left argument runs over the
/// twelve H-directions outside the embedded tangent span {u3, u9, u10,
/// u12}; the right argument lies inside it. Two rows carry product labels
/// that exact arithmetic contradicts; they are kept verbatim here and
/// indexed in [`G33_VI_PRODUCT_ERRATA`].
pub const G33_VI_CLAIMED_PRODUCTS: &[(&str, &str, &str)] = &[
    ("u1", "u9", "v1"),
    ("u2", "u12", "v3"),
    ("u4", "u12", "v5"),
    ("u5", "u10", "v2"),
    ("u6", "u9", "v6"),
    ("u7", "u3", "v1"),
    ("u8", "u10", "v5"),
    ("u11", "u9", "v8"),
    ("u13", "u12", "v10"),
    ("u14", "u3", "v6"),
    ("u15", "u10", "v10"),
    ("u16", "u3", "v9"),
];

/// Anchor block `sff-g33-vi-errata`: rows of the recorded product table
/// whose labels disagree with the exact shifted sum, as (left, right,
/// recorded label, computed label). u5 + u10 − γ has coefficient 2 on a3,
/// which is v3, not v2; u16 + u3 − γ has coefficient 2 on a3 and 4 on a4,
/// which is v8, not v9. Both sums are nonzero either way, so the
/// nondegeneracy verdict the table supports is unaffected.
pub const G33_VI_PRODUCT_ERRATA: &[(&str, &str, &str, &str)] =
    &[("u5", "u10", "v2", "v3"), ("u16", "u3", "v9", "v8")];
