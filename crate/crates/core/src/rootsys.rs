//! Dynkin diagrams and finite root systems with exact integer arithmetic.
//!
//! Node numbering follows the marked-diagram catalog conventions used
//! throughout the crate: A/B/C chains are numbered 1..n with the short or
//! long end at node n, D forks carry the two fork tips as nodes n and n−1
//! both attached to n−2, and E6/E7 carry the branch node as node 2 attached
//! to node 4. Public node ids are 1-based; coefficient vectors index node i
//! at position i−1.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

/// 1-based simple-root / diagram-node identifier.
pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::E => "E",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootSysError {
    #[error("illegal rank {rank} for family {family}")]
    IllegalRank { family: Family, rank: usize },
    #[error("coefficient vector has length {got}, diagram has rank {want}")]
    WrongLength { got: usize, want: usize },
    #[error("cannot parse root expression {input:?}: {reason}")]
    BadRootExpr { input: String, reason: String },
}

/// A Dynkin diagram: family, rank, Cartan matrix and symmetrized Gram
/// matrix. Short roots are normalized to squared length 2 in every family,
/// which makes `cartan_int` total across the B/C types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DynkinDiagram {
    family: Family,
    rank: usize,
    /// `cartan[i][j] = 2(α_{i+1}, α_{j+1}) / (α_{i+1}, α_{i+1})`.
    cartan: Vec<Vec<i64>>,
    /// `gram[i][j] = (α_{i+1}, α_{j+1})` with short roots of squared length 2.
    #[serde(skip)]
    gram: Vec<Vec<i64>>,
}

impl DynkinDiagram {
    /// Builds the diagram for `(family, rank)`. Legal ranks: A ≥ 1, B ≥ 2,
    /// C ≥ 2, D ≥ 3, E ∈ {6, 7}.
    pub fn build(family: Family, rank: usize) -> Result<Self, RootSysError> {
        let legal = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 3,
            Family::E => rank == 6 || rank == 7,
        };
        if !legal {
            return Err(RootSysError::IllegalRank { family, rank });
        }

        // Edges as unordered 1-based node pairs; all single bonds except the
        // B/C chain end, which the Gram matrix encodes through lengths.
        let edges: Vec<(NodeId, NodeId)> = match family {
            Family::A | Family::B | Family::C => (1..rank).map(|i| (i, i + 1)).collect(),
            Family::D => (1..rank - 1)
                .map(|i| (i, i + 1))
                .chain(std::iter::once((rank - 2, rank)))
                .collect(),
            Family::E => {
                // Chain rank..3 then 3–1, with the branch node 2 on node 4.
                let mut e: Vec<(NodeId, NodeId)> = (4..=rank).map(|i| (i - 1, i)).collect();
                e.push((1, 3));
                e.push((2, 4));
                e
            }
        };

        // Squared lengths: everything 2 except the long chain of B (nodes
        // 1..rank−1) and the single long node rank of C.
        let len2 = |node: NodeId| -> i64 {
            match family {
                Family::B if node < rank => 4,
                Family::C if node == rank => 4,
                _ => 2,
            }
        };

        let mut gram = vec![vec![0i64; rank]; rank];
        for i in 1..=rank {
            gram[i - 1][i - 1] = len2(i);
        }
        for &(i, j) in &edges {
            // Bonded pair of equal length L²: (α_i, α_j) = −L²/2. Bonded
            // long/short pair (L² = 4, 2): (α_i, α_j) = −2. Both equal half
            // the larger squared length, negated.
            let v = -(len2(i).max(len2(j)) / 2);
            gram[i - 1][j - 1] = v;
            gram[j - 1][i - 1] = v;
        }

        let mut cartan = vec![vec![0i64; rank]; rank];
        for i in 0..rank {
            for j in 0..rank {
                let num = 2 * gram[i][j];
                debug_assert_eq!(num % gram[i][i], 0);
                cartan[i][j] = num / gram[i][i];
            }
        }

        Ok(DynkinDiagram {
            family,
            rank,
            cartan,
            gram,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Cartan matrix entry `2(α_i, α_j)/(α_i, α_i)` for 1-based nodes.
    pub fn cartan_entry(&self, i: NodeId, j: NodeId) -> i64 {
        self.cartan[i - 1][j - 1]
    }

    /// Inner product `(α_i, α_j)` in the short-root-squared-length-2 scale.
    pub fn gram_entry(&self, i: NodeId, j: NodeId) -> i64 {
        self.gram[i - 1][j - 1]
    }

    pub fn adjacent(&self, i: NodeId, j: NodeId) -> bool {
        i != j && self.cartan[i - 1][j - 1] != 0
    }

    pub fn neighbors(&self, i: NodeId) -> Vec<NodeId> {
        (1..=self.rank).filter(|&j| self.adjacent(i, j)).collect()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        1..=self.rank
    }

    /// The simple root α_i as a coefficient vector.
    pub fn simple(&self, i: NodeId) -> Root {
        let mut c = vec![0i64; self.rank];
        c[i - 1] = 1;
        Root::new(c)
    }

    /// Inner product of two coefficient vectors under the Gram matrix.
    pub fn inner(&self, a: &Root, b: &Root) -> i64 {
        let mut acc = 0;
        for i in 0..self.rank {
            if a.coeffs[i] == 0 {
                continue;
            }
            for j in 0..self.rank {
                acc += a.coeffs[i] * self.gram[i][j] * b.coeffs[j];
            }
        }
        acc
    }

    /// `⟨β, α_i∨⟩ = 2(β, α_i)/(α_i, α_i)`, the coroot pairing used by the
    /// root-string closure and by simple reflections.
    pub fn coroot_pairing(&self, beta: &Root, i: NodeId) -> i64 {
        (0..self.rank)
            .map(|j| self.cartan[i - 1][j] * beta.coeffs[j])
            .sum()
    }
}

/// A root as an integer coefficient vector over the simple roots.
///
/// `Root` is plain data; membership in a particular system is checked
/// through [`RootSystem::is_root`]. Entry `coeffs[i]` is the coefficient of
/// node `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root {
    coeffs: Vec<i64>,
}

impl Root {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Root { coeffs }
    }

    pub fn zero(rank: usize) -> Self {
        Root {
            coeffs: vec![0; rank],
        }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of the 1-based node `i`.
    pub fn coeff(&self, i: NodeId) -> i64 {
        self.coeffs[i - 1]
    }

    pub fn height(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0)
    }

    pub fn is_nonpositive(&self) -> bool {
        self.coeffs.iter().all(|&c| c <= 0)
    }

    pub fn neg(&self) -> Root {
        Root::new(self.coeffs.iter().map(|&c| -c).collect())
    }

    pub fn add(&self, other: &Root) -> Root {
        debug_assert_eq!(self.rank(), other.rank());
        Root::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Root) -> Root {
        debug_assert_eq!(self.rank(), other.rank());
        Root::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// Adds `k` copies of the simple root α_i.
    pub fn add_simple(&self, i: NodeId, k: i64) -> Root {
        let mut c = self.coeffs.clone();
        c[i - 1] += k;
        Root::new(c)
    }

    /// Renders as `a6+2a5+…` with nodes in descending order, matching the
    /// expression grammar accepted by [`parse_root_expr`].
    pub fn expr(&self) -> String {
        let mut out = String::new();
        for i in (1..=self.rank()).rev() {
            let c = self.coeff(i);
            if c == 0 {
                continue;
            }
            if c > 0 && !out.is_empty() {
                out.push('+');
            }
            if c == -1 {
                out.push('-');
            } else if c != 1 {
                out.push_str(&c.to_string());
            }
            out.push('a');
            out.push_str(&i.to_string());
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.expr())
    }
}

/// Parses `a6+2a5+2a4+a3+a2` (also accepting `-` terms and whitespace) into
/// a coefficient vector of length `rank`.
pub fn parse_root_expr(input: &str, rank: usize) -> Result<Root, RootSysError> {
    let bad = |reason: &str| RootSysError::BadRootExpr {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad("empty expression"));
    }
    let mut coeffs = vec![0i64; rank];
    let mut rest = compact.as_str();
    let mut first = true;
    while !rest.is_empty() {
        let sign = if let Some(r) = rest.strip_prefix('+') {
            rest = r;
            1
        } else if let Some(r) = rest.strip_prefix('-') {
            rest = r;
            -1
        } else if first {
            1
        } else {
            return Err(bad("terms must be separated by + or -"));
        };
        first = false;
        let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
        rest = &rest[digits.len()..];
        let coeff: i64 = if digits.is_empty() {
            1
        } else {
            digits.parse().map_err(|_| bad("coefficient overflow"))?
        };
        rest = rest
            .strip_prefix('a')
            .ok_or_else(|| bad("expected 'a<node>' after coefficient"))?;
        let node_digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
        if node_digits.is_empty() {
            return Err(bad("missing node number after 'a'"));
        }
        rest = &rest[node_digits.len()..];
        let node: usize = node_digits.parse().map_err(|_| bad("node overflow"))?;
        if node == 0 || node > rank {
            return Err(bad(&format!("node a{node} outside 1..={rank}")));
        }
        coeffs[node - 1] += sign * coeff;
    }
    Ok(Root::new(coeffs))
}

/// A full finite root system: diagram, all roots, and the positive subset,
/// both in lexicographic coefficient order, with hashed membership lookup.
#[derive(Debug, Clone)]
pub struct RootSystem {
    diagram: DynkinDiagram,
    roots: Vec<Root>,
    positives: Vec<Root>,
    index: HashMap<Vec<i64>, usize>,
}

impl RootSystem {
    /// Generates the system from the simple roots by closing each height
    /// level under root strings: `β + α_i` is a root iff
    /// `q = p − ⟨β, α_i∨⟩ > 0` where `p` is the depth of the α_i-string
    /// below β.
    pub fn generate(diagram: DynkinDiagram) -> RootSystem {
        let rank = diagram.rank();
        let mut set: BTreeSet<Root> = (1..=rank).map(|i| diagram.simple(i)).collect();
        let mut frontier: Vec<Root> = set.iter().cloned().collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for beta in &frontier {
                for i in 1..=rank {
                    let mut p = 0i64;
                    let mut down = beta.add_simple(i, -1);
                    while !down.is_zero() && set.contains(&down) {
                        p += 1;
                        down = down.add_simple(i, -1);
                    }
                    if p - diagram.coroot_pairing(beta, i) > 0 {
                        let up = beta.add_simple(i, 1);
                        if set.insert(up.clone()) {
                            next.push(up);
                        }
                    }
                }
            }
            frontier = next;
        }

        let positives: Vec<Root> = set.into_iter().collect();
        let mut roots: Vec<Root> = positives
            .iter()
            .map(Root::neg)
            .chain(positives.iter().cloned())
            .collect();
        roots.sort();
        let index = roots
            .iter()
            .enumerate()
            .map(|(k, r)| (r.coeffs.clone(), k))
            .collect();
        RootSystem {
            diagram,
            roots,
            positives,
            index,
        }
    }

    pub fn diagram(&self) -> &DynkinDiagram {
        &self.diagram
    }

    pub fn rank(&self) -> usize {
        self.diagram.rank()
    }

    /// All roots in lexicographic coefficient order.
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    /// Positive roots in lexicographic coefficient order.
    pub fn positives(&self) -> &[Root] {
        &self.positives
    }

    pub fn is_root(&self, v: &Root) -> bool {
        v.rank() == self.rank() && self.index.contains_key(v.coeffs())
    }

    pub fn contains_coeffs(&self, v: &[i64]) -> bool {
        v.len() == self.rank() && self.index.contains_key(v)
    }

    /// `cartan_int(a, b) = 2(a, b)/(a, a)`: the Cartan integer pairing `b`
    /// against the coroot of `a`. On simple roots it reproduces the Cartan
    /// matrix entry `cartan_entry(i, j)`.
    pub fn cartan_int(&self, a: &Root, b: &Root) -> i64 {
        let num = 2 * self.diagram.inner(a, b);
        let den = self.diagram.inner(a, a);
        debug_assert!(den > 0, "cartan_int of the zero vector");
        debug_assert_eq!(num % den, 0, "non-integral Cartan pairing");
        num / den
    }

    /// Simple reflection `s_i(β) = β − ⟨β, α_i∨⟩ α_i`.
    pub fn reflect(&self, beta: &Root, i: NodeId) -> Root {
        beta.add_simple(i, -self.diagram.coroot_pairing(beta, i))
    }
}

/// Independent root-generation oracle: the orbit of the simple roots under
/// all simple reflections, iterated to stability. Used to cross-check the
/// closure construction of [`RootSystem::generate`].
pub fn reflection_orbit(diagram: &DynkinDiagram) -> BTreeSet<Root> {
    let rank = diagram.rank();
    let mut orbit: BTreeSet<Root> = (1..=rank).map(|i| diagram.simple(i)).collect();
    let mut frontier: Vec<Root> = orbit.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for beta in &frontier {
            for i in 1..=rank {
                let image = beta.add_simple(i, -diagram.coroot_pairing(beta, i));
                if orbit.insert(image.clone()) {
                    next.push(image);
                }
            }
        }
        frontier = next;
    }
    orbit
}
