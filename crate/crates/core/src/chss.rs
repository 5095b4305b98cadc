//! The catalog of compact Hermitian symmetric spaces as marked Dynkin
//! diagrams, Harish-Chandra root partitions, abstract VMRT reduction data,
//! maximal-linear-subspace data, and perpendicular-set combinatorics.
//!
//! Catalog entries and their marked nodes:
//!
//! | name     | diagram        | marked node | dimension   |
//! |----------|----------------|-------------|-------------|
//! | G(p,q)   | A_{p+q−1}      | p           | pq          |
//! | GII(n)   | D_n            | n           | n(n−1)/2    |
//! | GIII(n)  | C_n            | n           | n(n+1)/2    |
//! | Q(2m−2)  | D_m            | 1           | 2m−2        |
//! | Q(2m−1)  | B_m            | 1           | 2m−1        |
//! | V        | E6             | 6           | 16          |
//! | VI       | E7             | 7           | 27          |
//! | PxP(a,b) | (product)      | n/a         | a+b         |

use crate::rootsys::{DynkinDiagram, Family, NodeId, Root, RootSystem};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChssError {
    #[error("illegal parameters for {family}: {reason}")]
    IllegalParams { family: String, reason: String },
    #[error("product spaces carry no diagram; operation unsupported")]
    ProductUnsupported,
    #[error("root {root} is not a noncompact positive root of {space}")]
    NotNoncompact { space: Space, root: String },
    #[error("{space} is a projective space; consult max_linear_dim for linear sub-space data")]
    LinearSpace { space: Space },
    #[error("cannot parse space name {input:?}: {reason}")]
    BadSpaceName { input: String, reason: String },
}

/// A catalog space name with parameters. `Grass(p, q)` keeps the given
/// order (G(4,2) and G(2,4) display differently but denote isomorphic
/// marked diagrams; see [`Space::same_space`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Space {
    /// `G(p,q)`: Grassmannian of p-planes in C^{p+q}.
    Grass(usize, usize),
    /// `GII(n)`: orthogonal Grassmannian, one family of maximal isotropic
    /// subspaces in C^{2n}.
    OrthoGrass(usize),
    /// `GIII(n)`: Lagrangian Grassmannian in C^{2n}.
    LagrGrass(usize),
    /// `Q(n)`: the n-dimensional smooth quadric. Values n ∈ {1, 2} exist at
    /// the name level (Q¹ ≅ P¹, Q² ≅ P¹×P¹) but are rejected as catalog
    /// ambient spaces.
    Quadric(usize),
    /// `V`: the 16-dimensional E6 space (complexified Cayley plane).
    Cayley,
    /// `VI`: the 27-dimensional E7 space (Freudenthal variety).
    Freudenthal,
    /// `PxP(a,b)`: the product P^a × P^b. Appears only as an abstract VMRT
    /// and as the Q² alias; no diagram.
    BiProjective(usize, usize),
}

impl Space {
    pub fn dim(&self) -> usize {
        match *self {
            Space::Grass(p, q) => p * q,
            Space::OrthoGrass(n) => n * (n - 1) / 2,
            Space::LagrGrass(n) => n * (n + 1) / 2,
            Space::Quadric(n) => n,
            Space::Cayley => 16,
            Space::Freudenthal => 27,
            Space::BiProjective(a, b) => a + b,
        }
    }

    /// The recorded isomorphism alias, if this name has a preferred
    /// alternative presentation: GIII(2) ≅ Q(3), GII(3) ≅ P³, GII(4) ≅ Q(6),
    /// Q(2) ≅ P¹×P¹, Q(1) ≅ P¹.
    pub fn alias(&self) -> Option<Space> {
        match *self {
            Space::LagrGrass(2) => Some(Space::Quadric(3)),
            Space::OrthoGrass(3) => Some(Space::Grass(1, 3)),
            Space::OrthoGrass(4) => Some(Space::Quadric(6)),
            Space::Quadric(2) => Some(Space::BiProjective(1, 1)),
            Space::Quadric(1) => Some(Space::Grass(1, 1)),
            _ => None,
        }
    }

    /// True when the space is a projective space P^k (possibly through an
    /// alias).
    pub fn is_linear(&self) -> bool {
        match *self {
            Space::Grass(p, q) => p == 1 || q == 1,
            Space::OrthoGrass(3) | Space::Quadric(1) => true,
            _ => false,
        }
    }

    /// The dimension n such that this space is isomorphic to Q(n), if any.
    pub fn as_quadric(&self) -> Option<usize> {
        match *self {
            Space::Quadric(n) => Some(n),
            Space::Grass(2, 2) => Some(4),
            Space::LagrGrass(2) => Some(3),
            Space::OrthoGrass(4) => Some(6),
            Space::BiProjective(1, 1) => Some(2),
            Space::Grass(1, 1) => Some(1),
            _ => None,
        }
    }

    /// Marked-diagram isomorphism of names: equality up to the Grassmannian
    /// transpose G(p,q) ≅ G(q,p) and the recorded catalog aliases.
    pub fn same_space(&self, other: &Space) -> bool {
        fn key(s: &Space) -> Space {
            let s = s.alias().unwrap_or(*s);
            match s {
                Space::Grass(p, q) if p > q => Space::Grass(q, p),
                // D3 marked at node 1 is A3 marked in the middle.
                Space::Quadric(4) => Space::Grass(2, 2),
                other => other,
            }
        }
        key(self) == key(other)
    }

    /// The diagram data behind the name, when the name is a legal catalog
    /// entry (products and Q¹/Q² have none).
    fn diagram_recipe(&self) -> Result<(Family, usize, NodeId), ChssError> {
        let illegal = |family: &str, reason: &str| ChssError::IllegalParams {
            family: family.to_string(),
            reason: reason.to_string(),
        };
        match *self {
            Space::Grass(p, q) => {
                if p < 1 || q < 1 {
                    Err(illegal("G(p,q)", "requires p, q ≥ 1"))
                } else {
                    Ok((Family::A, p + q - 1, p))
                }
            }
            Space::OrthoGrass(n) => {
                if n < 3 {
                    Err(illegal("GII(n)", "requires n ≥ 3"))
                } else {
                    Ok((Family::D, n, n))
                }
            }
            Space::LagrGrass(n) => {
                if n < 2 {
                    Err(illegal("GIII(n)", "requires n ≥ 2"))
                } else {
                    Ok((Family::C, n, n))
                }
            }
            Space::Quadric(n) => {
                if n < 3 {
                    Err(illegal(
                        "Q(n)",
                        "requires n ≥ 3 (Q¹ and Q² are excluded as ambient spaces)",
                    ))
                } else if n % 2 == 1 {
                    Ok((Family::B, n.div_ceil(2), 1))
                } else {
                    Ok((Family::D, n / 2 + 1, 1))
                }
            }
            Space::Cayley => Ok((Family::E, 6, 6)),
            Space::Freudenthal => Ok((Family::E, 7, 7)),
            Space::BiProjective(_, _) => Err(ChssError::ProductUnsupported),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Space::Grass(p, q) => write!(f, "G({p},{q})"),
            Space::OrthoGrass(n) => write!(f, "GII({n})"),
            Space::LagrGrass(n) => write!(f, "GIII({n})"),
            Space::Quadric(n) => write!(f, "Q({n})"),
            Space::Cayley => f.write_str("V"),
            Space::Freudenthal => f.write_str("VI"),
            Space::BiProjective(a, b) => write!(f, "PxP({a},{b})"),
        }
    }
}

impl FromStr for Space {
    type Err = ChssError;

    /// Accepts the grammar `G(p,q)`, `GII(n)`, `GIII(n)`, `Q(n)`, `V`, `VI`,
    /// `PxP(a,b)`, plus the two-argument forms `GII(n,n)` and `GIII(n,n)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| ChssError::BadSpaceName {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match t.as_str() {
            "V" => return Ok(Space::Cayley),
            "VI" => return Ok(Space::Freudenthal),
            _ => {}
        }
        let open = t.find('(').ok_or_else(|| bad("expected NAME(args)"))?;
        if !t.ends_with(')') {
            return Err(bad("missing closing parenthesis"));
        }
        let name = &t[..open];
        let args: Vec<usize> = t[open + 1..t.len() - 1]
            .split(',')
            .map(|a| a.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("arguments must be positive integers"))?;
        let one_or_pair = |name: &str| -> Result<usize, ChssError> {
            match args.as_slice() {
                [n] => Ok(*n),
                [n, m] if n == m => Ok(*n),
                [_, _] => Err(bad(&format!("{name}(n,m) requires n = m"))),
                _ => Err(bad(&format!("{name} takes one argument"))),
            }
        };
        match name {
            "G" => match args.as_slice() {
                [p, q] => Ok(Space::Grass(*p, *q)),
                _ => Err(bad("G takes two arguments")),
            },
            "GII" => Ok(Space::OrthoGrass(one_or_pair("GII")?)),
            "GIII" => Ok(Space::LagrGrass(one_or_pair("GIII")?)),
            "Q" => match args.as_slice() {
                [n] => Ok(Space::Quadric(*n)),
                _ => Err(bad("Q takes one argument")),
            },
            "PxP" => match args.as_slice() {
                [a, b] => Ok(Space::BiProjective(*a, *b)),
                _ => Err(bad("PxP takes two arguments")),
            },
            _ => Err(bad("unknown space name")),
        }
    }
}

/// A catalog space together with its marked diagram and generated root
/// system. Products have no diagram and are rejected here; they are
/// consumed only by `abstract_vmrt` outputs and the classification module.
#[derive(Debug, Clone)]
pub struct MarkedSpace {
    space: Space,
    system: RootSystem,
    marked: NodeId,
}

impl MarkedSpace {
    /// Builds the marked space for a catalog name, generating its root
    /// system. Fails on products, on out-of-range parameters, and on Q¹/Q²
    /// (excluded as ambient catalog entries).
    pub fn catalog_space(space: Space) -> Result<MarkedSpace, ChssError> {
        let (family, rank, marked) = space.diagram_recipe()?;
        let diagram = DynkinDiagram::build(family, rank).map_err(|e| ChssError::IllegalParams {
            family: space.to_string(),
            reason: e.to_string(),
        })?;
        let system = RootSystem::generate(diagram);
        let ms = MarkedSpace {
            space,
            system,
            marked,
        };
        // Grading sanity: the marked coefficient of every root is in
        // {−1, 0, 1} and the noncompact count matches the dimension formula.
        debug_assert!(ms
            .system
            .roots()
            .iter()
            .all(|r| r.coeff(ms.marked).abs() <= 1));
        debug_assert_eq!(ms.noncompact_positives().len(), ms.space.dim());
        Ok(ms)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn system(&self) -> &RootSystem {
        &self.system
    }

    pub fn diagram(&self) -> &DynkinDiagram {
        self.system.diagram()
    }

    /// 1-based index of the marked simple root γ.
    pub fn marked_node(&self) -> NodeId {
        self.marked
    }

    /// The marked simple root γ as a coefficient vector.
    pub fn gamma(&self) -> Root {
        self.diagram().simple(self.marked)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Positive roots with coefficient 1 on the marked node, in
    /// lexicographic order. Their root spaces span the tangent space at the
    /// base point.
    pub fn noncompact_positives(&self) -> Vec<Root> {
        self.system
            .positives()
            .iter()
            .filter(|r| r.coeff(self.marked) == 1)
            .cloned()
            .collect()
    }

    /// Positive roots with coefficient 0 on the marked node.
    pub fn compact_positives(&self) -> Vec<Root> {
        self.system
            .positives()
            .iter()
            .filter(|r| r.coeff(self.marked) == 0)
            .cloned()
            .collect()
    }

    /// The Harish-Chandra partition {γ} ⊔ H_γ ⊔ N_γ, memoized per space.
    pub fn hc_partition(&self) -> Arc<HcPartition> {
        static MEMO: OnceLock<Mutex<HashMap<Space, Arc<HcPartition>>>> = OnceLock::new();
        let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(hit) = memo.lock().unwrap().get(&self.space) {
            return Arc::clone(hit);
        }
        // Computed outside the lock: concurrent callers may duplicate work
        // but never block each other on the computation.
        let fresh = Arc::new(self.compute_partition());
        let mut guard = memo.lock().unwrap();
        Arc::clone(guard.entry(self.space).or_insert(fresh))
    }

    fn compute_partition(&self) -> HcPartition {
        let gamma = self.gamma();
        let adjacent = self.diagram().neighbors(self.marked);
        let mut h_set = Vec::new();
        let mut n_set = Vec::new();
        for beta in self.noncompact_positives() {
            if beta == gamma {
                continue;
            }
            let s: i64 = adjacent.iter().map(|&t| beta.coeff(t)).sum();
            match s {
                1 => h_set.push(beta),
                _ if s >= 2 => n_set.push(beta),
                _ => unreachable!("noncompact root {beta} not connected to the marked node"),
            }
        }
        HcPartition {
            space: self.space,
            gamma,
            h_set,
            n_set,
        }
    }

    /// β^⊥: the noncompact positive roots β′ ≠ β whose difference with β is
    /// not a root.
    pub fn perp_set(&self, beta: &Root) -> Result<Vec<Root>, ChssError> {
        let nc = self.noncompact_positives();
        if !nc.contains(beta) {
            return Err(ChssError::NotNoncompact {
                space: self.space,
                root: beta.expr(),
            });
        }
        Ok(nc
            .iter()
            .filter(|b| *b != beta && !self.system.is_root(&b.sub(beta)))
            .cloned()
            .collect())
    }

    /// Cardinalities of all β^⊥ and of β₁^⊥ ∩ β₂^⊥ over non-perpendicular
    /// pairs (β₂ ∉ β₁^⊥).
    pub fn perp_stats(&self) -> PerpStats {
        let nc = self.noncompact_positives();
        let perps: Vec<(Root, BTreeSet<Root>)> = nc
            .iter()
            .map(|b| {
                let p = self.perp_set(b).expect("β drawn from nc_pos");
                (b.clone(), p.into_iter().collect())
            })
            .collect();
        let sizes: Vec<(Root, usize)> = perps.iter().map(|(b, p)| (b.clone(), p.len())).collect();
        let mut pair_intersections = Vec::new();
        for (i, (b1, p1)) in perps.iter().enumerate() {
            for (b2, p2) in perps.iter().skip(i + 1) {
                if p1.contains(b2) {
                    continue; // perpendicular pair
                }
                let common = p1.intersection(p2).count();
                pair_intersections.push((b1.clone(), b2.clone(), common));
            }
        }
        let mut size_histogram = BTreeMap::new();
        for (_, s) in &sizes {
            *size_histogram.entry(*s).or_insert(0usize) += 1;
        }
        let mut intersection_histogram = BTreeMap::new();
        for (_, _, s) in &pair_intersections {
            *intersection_histogram.entry(*s).or_insert(0usize) += 1;
        }
        PerpStats {
            space: self.space,
            sizes,
            pair_intersections,
            size_histogram,
            intersection_histogram,
        }
    }
}

/// Noncompact positive roots split as {γ} ⊔ H_γ ⊔ N_γ by the adjacent-node
/// coefficient rule: for β ≠ γ, the sum s of β's coefficients over the
/// nodes adjacent to γ is 1 exactly on H_γ and ≥ 2 exactly on N_γ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HcPartition {
    pub space: Space,
    pub gamma: Root,
    pub h_set: Vec<Root>,
    pub n_set: Vec<Root>,
}

impl HcPartition {
    pub fn noncompact_count(&self) -> usize {
        1 + self.h_set.len() + self.n_set.len()
    }
}

/// Perpendicular-set cardinality report.
#[derive(Debug, Clone, Serialize)]
pub struct PerpStats {
    pub space: Space,
    pub sizes: Vec<(Root, usize)>,
    /// One entry per unordered non-perpendicular pair.
    pub pair_intersections: Vec<(Root, Root, usize)>,
    pub size_histogram: BTreeMap<usize, usize>,
    pub intersection_histogram: BTreeMap<usize, usize>,
}

/// Abstract VMRT of a catalog space: the VMRT as a catalog name, plus a
/// flag marking the one family whose VMRT is embedded by O(2) (the Veronese
/// case) rather than minimally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AbstractVmrt {
    pub space: Space,
    pub veronese: bool,
}

/// The abstract VMRT reduction data: G(p,q) → P^{p−1}×P^{q−1},
/// GII(n) → G(2,n−2), GIII(n) → P^{n−1} (Veronese), Q(n) → Q(n−2),
/// V → GII(5), VI → V.
pub fn abstract_vmrt(space: Space) -> Result<AbstractVmrt, ChssError> {
    if space.is_linear() {
        return Err(ChssError::LinearSpace { space });
    }
    let plain = |s: Space| AbstractVmrt {
        space: s,
        veronese: false,
    };
    match space {
        Space::Grass(p, q) => Ok(plain(Space::BiProjective(p - 1, q - 1))),
        Space::OrthoGrass(n) => Ok(plain(Space::Grass(2, n - 2))),
        Space::LagrGrass(n) => Ok(AbstractVmrt {
            space: Space::Grass(1, n - 1),
            veronese: true,
        }),
        // Q(3) → Q(1) ≅ P¹ and Q(4) → Q(2) ≅ P¹×P¹ resolve through aliases.
        Space::Quadric(n) if n >= 3 => Ok(plain(Space::Quadric(n - 2))),
        Space::Quadric(_) => Err(ChssError::IllegalParams {
            family: "Q(n)".to_string(),
            reason: "abstract VMRT needs n ≥ 3".to_string(),
        }),
        Space::Cayley => Ok(plain(Space::OrthoGrass(5))),
        Space::Freudenthal => Ok(plain(Space::Cayley)),
        Space::BiProjective(_, _) => Err(ChssError::ProductUnsupported),
    }
}

/// Dimensions of maximal linear subspaces: {p,q} for G(p,q), {3, n−1} for
/// GII(n), {1} for GIII(n), {⌊n/2⌋} for Q(n), {4,5} for V, {5,6} for VI.
pub fn max_linear_dim(space: Space) -> Result<BTreeSet<usize>, ChssError> {
    match space {
        Space::Grass(p, q) => Ok([p, q].into_iter().collect()),
        Space::OrthoGrass(n) => Ok([3, n - 1].into_iter().collect()),
        Space::LagrGrass(_) => Ok([1].into_iter().collect()),
        Space::Quadric(n) => Ok([n / 2].into_iter().collect()),
        Space::Cayley => Ok([4, 5].into_iter().collect()),
        Space::Freudenthal => Ok([5, 6].into_iter().collect()),
        Space::BiProjective(_, _) => Err(ChssError::ProductUnsupported),
    }
}

/// All catalog names whose diagram rank is at most `max_rank`, in a
/// deterministic order: Grassmannians G(p,q) with p ≤ q, then GII, GIII,
/// quadrics (without Q¹/Q²), then V and VI when the rank bound admits them.
pub fn catalog_names(max_rank: usize) -> Vec<Space> {
    let mut out = Vec::new();
    for p in 1..=max_rank {
        for q in p..=max_rank {
            if p + q - 1 <= max_rank {
                out.push(Space::Grass(p, q));
            }
        }
    }
    for n in 3..=max_rank {
        out.push(Space::OrthoGrass(n));
    }
    for n in 2..=max_rank {
        out.push(Space::LagrGrass(n));
    }
    for n in 3..=2 * max_rank {
        let legal = if n % 2 == 1 {
            n.div_ceil(2) <= max_rank
        } else {
            n / 2 < max_rank
        };
        if legal {
            out.push(Space::Quadric(n));
        }
    }
    if max_rank >= 6 {
        out.push(Space::Cayley);
    }
    if max_rank >= 7 {
        out.push(Space::Freudenthal);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::parse_root_expr;

    fn ms(name: &str) -> MarkedSpace {
        MarkedSpace::catalog_space(name.parse().unwrap()).unwrap()
    }

    #[test]
    fn name_grammar_round_trip() {
        for name in ["G(4,2)", "GII(5)", "GIII(3)", "Q(7)", "V", "VI", "PxP(1,3)"] {
            let s: Space = name.parse().unwrap();
            assert_eq!(s.to_string(), name);
        }
        assert_eq!("GII(5,5)".parse::<Space>().unwrap(), Space::OrthoGrass(5));
        assert_eq!("GIII(3,3)".parse::<Space>().unwrap(), Space::LagrGrass(3));
        assert!("GII(5,6)".parse::<Space>().is_err());
        assert!("G(2)".parse::<Space>().is_err());
        assert!("X(1)".parse::<Space>().is_err());
        assert!("Q(3".parse::<Space>().is_err());
    }

    #[test]
    fn catalog_ranges() {
        assert!(MarkedSpace::catalog_space(Space::Quadric(2)).is_err());
        assert!(MarkedSpace::catalog_space(Space::Quadric(1)).is_err());
        assert!(MarkedSpace::catalog_space(Space::OrthoGrass(2)).is_err());
        assert!(MarkedSpace::catalog_space(Space::LagrGrass(1)).is_err());
        assert!(MarkedSpace::catalog_space(Space::BiProjective(1, 1)).is_err());
        // GIII(2) and GII(3) are valid entries with recorded aliases.
        assert_eq!(Space::LagrGrass(2).alias(), Some(Space::Quadric(3)));
        assert_eq!(Space::OrthoGrass(3).alias(), Some(Space::Grass(1, 3)));
        ms("GIII(2)");
        ms("GII(3)");
    }

    #[test]
    fn marked_nodes_match_catalog() {
        assert_eq!(ms("G(4,2)").marked_node(), 4);
        assert_eq!(ms("GII(5)").marked_node(), 5);
        assert_eq!(ms("GIII(3)").marked_node(), 3);
        assert_eq!(ms("Q(5)").marked_node(), 1);
        assert_eq!(ms("Q(8)").marked_node(), 1);
        assert_eq!(ms("V").marked_node(), 6);
        assert_eq!(ms("VI").marked_node(), 7);
        assert_eq!(ms("Q(5)").diagram().family(), Family::B);
        assert_eq!(ms("Q(8)").diagram().family(), Family::D);
        assert_eq!(ms("Q(8)").diagram().rank(), 5);
    }

    #[test]
    fn noncompact_counts_match_dimension() {
        for space in catalog_names(12) {
            let m = MarkedSpace::catalog_space(space).unwrap();
            assert_eq!(
                m.noncompact_positives().len(),
                space.dim(),
                "dimension mismatch for {space}"
            );
            // Minuscule grading: marked coefficient never exceeds 1.
            assert!(m
                .system()
                .roots()
                .iter()
                .all(|r| r.coeff(m.marked_node()).abs() <= 1));
        }
    }

    #[test]
    fn partition_sizes() {
        let vi = ms("VI").hc_partition();
        assert_eq!(vi.h_set.len(), 16);
        assert_eq!(vi.n_set.len(), 10);
        assert_eq!(vi.noncompact_count(), 27);

        let q5 = ms("Q(5)").hc_partition();
        assert_eq!(q5.h_set.len(), 3);
        assert_eq!(q5.n_set.len(), 1);

        let g22 = ms("G(2,2)").hc_partition();
        assert_eq!(g22.h_set.len(), 2);
        assert_eq!(g22.n_set.len(), 1);

        let v = ms("V").hc_partition();
        assert_eq!(v.h_set.len(), 10);
        assert_eq!(v.n_set.len(), 5);
    }

    #[test]
    fn partition_against_brute_force_rule() {
        // Independent re-derivation: classify by s computed from scratch on
        // every catalog space up to rank 8.
        for space in catalog_names(8) {
            let m = MarkedSpace::catalog_space(space).unwrap();
            let part = m.hc_partition();
            let adj = m.diagram().neighbors(m.marked_node());
            for beta in m.noncompact_positives() {
                let s: i64 = adj.iter().map(|&t| beta.coeff(t)).sum();
                if beta == part.gamma {
                    assert_eq!(s, 0, "{space}: γ touches its own neighbors");
                } else if s == 1 {
                    assert!(part.h_set.contains(&beta), "{space}: {beta} should be in H");
                } else {
                    assert!(s >= 2, "{space}: {beta} disconnected from marked node");
                    assert!(part.n_set.contains(&beta), "{space}: {beta} should be in N");
                }
            }
        }
    }

    #[test]
    fn perp_of_gamma_in_cayley() {
        let v = ms("V");
        let gamma = v.gamma();
        let perp = v.perp_set(&gamma).unwrap();
        let expect: BTreeSet<Root> = [
            "a6+2a5+2a4+a3+a2",
            "a6+2a5+2a4+a3+a2+a1",
            "a6+2a5+2a4+2a3+a2+a1",
            "a6+2a5+3a4+2a3+a2+a1",
            "a6+2a5+3a4+2a3+2a2+a1",
        ]
        .iter()
        .map(|s| parse_root_expr(s, 6).unwrap())
        .collect();
        assert_eq!(perp.into_iter().collect::<BTreeSet<_>>(), expect);
    }

    #[test]
    fn perp_intersection_of_top_pair_in_cayley() {
        let v = ms("V");
        let b15 = parse_root_expr("a6+2a5+3a4+2a3+a2+a1", 6).unwrap();
        let b16 = parse_root_expr("a6+2a5+3a4+2a3+2a2+a1", 6).unwrap();
        let p15: BTreeSet<Root> = v.perp_set(&b15).unwrap().into_iter().collect();
        let p16: BTreeSet<Root> = v.perp_set(&b16).unwrap().into_iter().collect();
        let common: BTreeSet<Root> = p15.intersection(&p16).cloned().collect();
        let expect: BTreeSet<Root> = ["a6", "a6+a5"]
            .iter()
            .map(|s| parse_root_expr(s, 6).unwrap())
            .collect();
        assert_eq!(common, expect);
    }

    #[test]
    fn perp_stats_cayley_and_orthograss5() {
        let v = ms("V").perp_stats();
        assert_eq!(v.sizes.len(), 16);
        assert!(v.sizes.iter().all(|(_, s)| *s == 5));
        assert!(!v.pair_intersections.is_empty());
        assert!(v.pair_intersections.iter().all(|(_, _, s)| *s == 2));

        // In D5 coordinates the noncompact positives are {e_i+e_j: i<j≤5};
        // each perp set holds the three index pairs disjoint from β, and a
        // non-perpendicular pair {i,j}, {i,l} shares exactly the one root on
        // the two indices outside {i,j,l}, so every intersection is 1.
        let g = ms("GII(5)").perp_stats();
        assert_eq!(g.sizes.len(), 10);
        assert!(g.sizes.iter().all(|(_, s)| *s == 3));
        assert_eq!(g.pair_intersections.len(), 30);
        assert!(g.pair_intersections.iter().all(|(_, _, s)| *s == 1));
    }

    #[test]
    fn perp_rejects_compact_roots() {
        let v = ms("V");
        let compact = v.diagram().simple(1);
        assert!(matches!(
            v.perp_set(&compact),
            Err(ChssError::NotNoncompact { .. })
        ));
    }

    #[test]
    fn perp_symmetry() {
        for name in ["G(2,3)", "GIII(3)", "Q(6)", "Q(7)", "GII(5)"] {
            let m = ms(name);
            let nc = m.noncompact_positives();
            for b1 in &nc {
                let p1 = m.perp_set(b1).unwrap();
                for b2 in &nc {
                    if b1 == b2 {
                        continue;
                    }
                    let p2 = m.perp_set(b2).unwrap();
                    assert_eq!(p1.contains(b2), p2.contains(b1), "{name}: {b1} vs {b2}");
                }
            }
        }
    }

    #[test]
    fn abstract_vmrt_chain() {
        assert_eq!(
            abstract_vmrt(Space::Freudenthal).unwrap().space,
            Space::Cayley
        );
        assert_eq!(
            abstract_vmrt(Space::Cayley).unwrap().space,
            Space::OrthoGrass(5)
        );
        let giii = abstract_vmrt(Space::LagrGrass(4)).unwrap();
        assert_eq!(giii.space, Space::Grass(1, 3));
        assert!(giii.veronese);
        assert_eq!(
            abstract_vmrt(Space::Grass(3, 5)).unwrap().space,
            Space::BiProjective(2, 4)
        );
        assert_eq!(
            abstract_vmrt(Space::Quadric(7)).unwrap().space,
            Space::Quadric(5)
        );
        assert!(matches!(
            abstract_vmrt(Space::Grass(1, 4)),
            Err(ChssError::LinearSpace { .. })
        ));
        assert!(matches!(
            abstract_vmrt(Space::BiProjective(2, 2)),
            Err(ChssError::ProductUnsupported)
        ));
    }

    #[test]
    fn max_linear_dims() {
        let set = |v: &[usize]| v.iter().copied().collect::<BTreeSet<_>>();
        assert_eq!(max_linear_dim(Space::Grass(4, 2)).unwrap(), set(&[2, 4]));
        assert_eq!(max_linear_dim(Space::LagrGrass(5)).unwrap(), set(&[1]));
        assert_eq!(max_linear_dim(Space::OrthoGrass(6)).unwrap(), set(&[3, 5]));
        assert_eq!(max_linear_dim(Space::Quadric(7)).unwrap(), set(&[3]));
        assert_eq!(max_linear_dim(Space::Cayley).unwrap(), set(&[4, 5]));
        assert_eq!(max_linear_dim(Space::Freudenthal).unwrap(), set(&[5, 6]));
    }

    #[test]
    fn quadric_grassmannian_identification() {
        assert!(Space::Quadric(4).same_space(&Space::Grass(2, 2)));
        assert!(Space::Grass(4, 2).same_space(&Space::Grass(2, 4)));
        assert!(Space::OrthoGrass(4).same_space(&Space::Quadric(6)));
        assert!(Space::LagrGrass(2).same_space(&Space::Quadric(3)));
        assert!(!Space::Quadric(5).same_space(&Space::Grass(2, 3)));
        assert_eq!(Space::Grass(2, 2).as_quadric(), Some(4));
        assert_eq!(Space::BiProjective(1, 1).as_quadric(), Some(2));
    }

    #[test]
    fn catalog_enumeration_bounds() {
        let names = catalog_names(8);
        assert!(names.contains(&Space::Freudenthal));
        assert!(names.contains(&Space::Quadric(15)));
        assert!(!names.contains(&Space::Quadric(16)));
        assert!(names.contains(&Space::Quadric(14)));
        assert!(!names.contains(&Space::Quadric(2)));
        assert!(names.contains(&Space::Grass(4, 5)));
        assert!(!names.contains(&Space::Grass(4, 6)));
        for s in &names {
            MarkedSpace::catalog_space(*s).unwrap();
        }
    }
}
