//! Harish-Chandra matrix models and coordinate bilinear patterns.
//!
//! The classical spaces carry affine matrix charts: G(r,s) is charted by
//! r×s matrices, GIII(n) by symmetric n×n matrices, GII(n) by skew n×n
//! matrices. In these charts VMRT membership is a rank condition (rank 1,
//! rank 1, rank 2 respectively), and two of the special pairs are realized
//! by explicit coordinate embeddings: symmetric matrices into the
//! upper-left block of a rectangle, and rectangles into the off-diagonal
//! block of a skew matrix.
//!
//! [`model_sff_pattern`] writes down the second fundamental form of the
//! relevant VMRT in affine coordinates for three model families (Segre,
//! Pluecker, quadric), and [`kernel_matrix_model`] computes its exact
//! rational kernel against the embedded tangent basis. This is the second,
//! coordinate-level route to the degeneracy verdicts; the root-level route
//! lives in [`crate::vmrt`] and the two are compared in tests rather than
//! sharing any model data.
//!
//! [`chern_factor_search`] settles a separate obstruction: whether a
//! truncated total Chern class factors into two integer classes of given
//! degrees. The solver enumerates the finitely many leading-coefficient
//! divisor choices and propagates the triangular coefficient system
//! exactly, so a `None` is a proof of non-factorability, not a search
//! giving up.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::rational::BigRational;
use num::{BigInt, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chss::Space;
use crate::linalg::{rational_nullspace, rational_rank};
use crate::vmrt::Verdict;

#[derive(Debug, Error)]
pub enum MatModelError {
    #[error("the zero matrix does not represent a VMRT point")]
    ZeroMatrix,
    #[error("matrix shape {shape} does not fit the chart of {space}")]
    ShapeMismatch { space: Space, shape: String },
    #[error("illegal model parameters: {reason}")]
    IllegalParams { reason: String },
    #[error("no coordinate model covers the pair ({src}, {tgt})")]
    UnsupportedPair { src: Space, tgt: Space },
    #[error("malformed matrix: {reason}")]
    BadMatrix { reason: String },
}

/// Chart shape of a matrix point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    General { rows: usize, cols: usize },
    Symmetric { n: usize },
    Skew { n: usize },
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Shape::General { rows, cols } => write!(f, "general {rows}x{cols}"),
            Shape::Symmetric { n } => write!(f, "symmetric {n}x{n}"),
            Shape::Skew { n } => write!(f, "skew {n}x{n}"),
        }
    }
}

/// A point of a Harish-Chandra matrix chart: a rational matrix constrained
/// by its shape tag. Constructors enforce the symmetry constraints, so a
/// value of this type is always well-formed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixPoint {
    shape: Shape,
    entries: Vec<Vec<BigRational>>,
}

impl MatrixPoint {
    pub fn general(entries: Vec<Vec<BigRational>>) -> Result<MatrixPoint, MatModelError> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(MatModelError::BadMatrix {
                reason: "a chart matrix needs at least one row and column".to_string(),
            });
        }
        if entries.iter().any(|r| r.len() != cols) {
            return Err(MatModelError::BadMatrix {
                reason: "ragged rows".to_string(),
            });
        }
        Ok(MatrixPoint {
            shape: Shape::General { rows, cols },
            entries,
        })
    }

    pub fn symmetric(entries: Vec<Vec<BigRational>>) -> Result<MatrixPoint, MatModelError> {
        let point = MatrixPoint::general(entries)?;
        let n = point.entries.len();
        if point.entries[0].len() != n {
            return Err(MatModelError::BadMatrix {
                reason: "symmetric matrices must be square".to_string(),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if point.entries[i][j] != point.entries[j][i] {
                    return Err(MatModelError::BadMatrix {
                        reason: format!("entries ({i},{j}) and ({j},{i}) differ"),
                    });
                }
            }
        }
        Ok(MatrixPoint {
            shape: Shape::Symmetric { n },
            entries: point.entries,
        })
    }

    pub fn skew(entries: Vec<Vec<BigRational>>) -> Result<MatrixPoint, MatModelError> {
        let point = MatrixPoint::general(entries)?;
        let n = point.entries.len();
        if point.entries[0].len() != n {
            return Err(MatModelError::BadMatrix {
                reason: "skew matrices must be square".to_string(),
            });
        }
        for i in 0..n {
            for j in i..n {
                if point.entries[i][j] != -point.entries[j][i].clone() {
                    return Err(MatModelError::BadMatrix {
                        reason: format!("entries ({i},{j}) and ({j},{i}) do not antisymmetrize"),
                    });
                }
            }
        }
        Ok(MatrixPoint {
            shape: Shape::Skew { n },
            entries: point.entries,
        })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn entries(&self) -> &[Vec<BigRational>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    /// Exact rank over ℚ.
    pub fn rank(&self) -> usize {
        rational_rank(self.entries.clone())
    }
}

/// Row-major wire form with rational-string entries ("3/2", "-1", "0").
#[derive(Serialize, Deserialize)]
struct MatrixWire {
    shape: Shape,
    entries: Vec<Vec<String>>,
}

impl Serialize for MatrixPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixWire {
            shape: self.shape,
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(BigRational::to_string).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(d)?;
        let entries: Vec<Vec<BigRational>> = wire
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| {
                        BigRational::from_str(cell).map_err(|e| {
                            serde::de::Error::custom(format!("bad rational {cell:?}: {e}"))
                        })
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        let point = match wire.shape {
            Shape::General { rows, cols } => {
                let p = MatrixPoint::general(entries).map_err(serde::de::Error::custom)?;
                if p.shape != (Shape::General { rows, cols }) {
                    return Err(serde::de::Error::custom(
                        "entry grid disagrees with shape tag",
                    ));
                }
                p
            }
            Shape::Symmetric { n } => {
                let p = MatrixPoint::symmetric(entries).map_err(serde::de::Error::custom)?;
                if p.shape != (Shape::Symmetric { n }) {
                    return Err(serde::de::Error::custom(
                        "entry grid disagrees with shape tag",
                    ));
                }
                p
            }
            Shape::Skew { n } => {
                let p = MatrixPoint::skew(entries).map_err(serde::de::Error::custom)?;
                if p.shape != (Shape::Skew { n }) {
                    return Err(serde::de::Error::custom(
                        "entry grid disagrees with shape tag",
                    ));
                }
                p
            }
        };
        Ok(point)
    }
}

/// Decides whether a nonzero chart matrix represents a point of the VMRT
/// cone of the given space: rank 1 for G(r,s) (general r×s) and GIII(n)
/// (symmetric), rank 2 for GII(n) (skew).
pub fn vmrt_rank_membership(space: Space, m: &MatrixPoint) -> Result<bool, MatModelError> {
    if m.is_zero() {
        return Err(MatModelError::ZeroMatrix);
    }
    let mismatch = || MatModelError::ShapeMismatch {
        space,
        shape: m.shape.to_string(),
    };
    let expected_rank = match (space, m.shape) {
        (Space::Grass(p, q), Shape::General { rows, cols }) if rows == p && cols == q => 1,
        (Space::LagrGrass(n), Shape::Symmetric { n: k }) if k == n => 1,
        (Space::OrthoGrass(n), Shape::Skew { n: k }) if k == n => 2,
        _ => return Err(mismatch()),
    };
    Ok(m.rank() == expected_rank)
}

/// Copies a symmetric n×n matrix into the upper-left block of an r×s
/// rectangle, zero elsewhere. This is the chart form of the embedding
/// GIII(n) → G(r,s); it preserves rank, so it sends VMRT points to VMRT
/// points. Requires 3 ≤ n ≤ min(r,s).
pub fn embed_sym_into_grass(
    n: usize,
    r: usize,
    s: usize,
    m: &MatrixPoint,
) -> Result<MatrixPoint, MatModelError> {
    if !(3 <= n && n <= r.min(s)) {
        return Err(MatModelError::IllegalParams {
            reason: format!("need 3 <= n <= min(r,s), got n={n}, r={r}, s={s}"),
        });
    }
    if m.shape != (Shape::Symmetric { n }) {
        return Err(MatModelError::IllegalParams {
            reason: format!("expected a symmetric {n}x{n} matrix, got {}", m.shape),
        });
    }
    let mut out = vec![vec![BigRational::zero(); s]; r];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = m.entries[i][j].clone();
        }
    }
    MatrixPoint::general(out)
}

/// Places an r×s rectangle M into a skew n×n matrix as the off-diagonal
/// block M″[i][j+r] = M[i][j] = −M″[j+r][i]. This is the chart form of the
/// embedding G(r,s) → GII(n); it doubles rank, so rank-1 VMRT points land
/// on rank-2 VMRT points. Requires r,s ≥ 3 and r+s ≤ n.
pub fn embed_grass_into_skew(
    r: usize,
    s: usize,
    n: usize,
    m: &MatrixPoint,
) -> Result<MatrixPoint, MatModelError> {
    if !(r >= 3 && s >= 3 && r + s <= n) {
        return Err(MatModelError::IllegalParams {
            reason: format!("need r,s >= 3 and r+s <= n, got r={r}, s={s}, n={n}"),
        });
    }
    if m.shape != (Shape::General { rows: r, cols: s }) {
        return Err(MatModelError::IllegalParams {
            reason: format!("expected a general {r}x{s} matrix, got {}", m.shape),
        });
    }
    let mut out = vec![vec![BigRational::zero(); n]; n];
    for i in 0..r {
        for j in 0..s {
            out[i][j + r] = m.entries[i][j].clone();
            out[j + r][i] = -m.entries[i][j].clone();
        }
    }
    MatrixPoint::skew(out)
}

/// A sub-tangent basis vector as an integer combination of ambient basis
/// directions.
#[derive(Debug, Clone, Serialize)]
pub struct SubVector {
    pub label: String,
    /// (coefficient, ambient index) pairs.
    pub components: Vec<(i64, usize)>,
}

/// The second fundamental form of a model VMRT in affine coordinates,
/// reduced to its structure: labeled ambient tangent and normal bases, the
/// embedded sub-tangent basis, and one signed normal direction per
/// unordered ambient pair whose product is nonzero.
#[derive(Debug, Clone, Serialize)]
pub struct BilinearPattern {
    pub model: String,
    pub ambient: Vec<String>,
    pub normals: Vec<String>,
    pub sub: Vec<SubVector>,
    /// (i ≤ j ambient indices) → (integer coefficient, normal index).
    pub entries: BTreeMap<(usize, usize), (i64, usize)>,
    /// The quadratic form backing the pattern, when one is involved.
    pub form: Option<String>,
}

impl BilinearPattern {
    /// σ(ambient[i], ambient[j]) as (coefficient, normal index).
    pub fn entry(&self, i: usize, j: usize) -> Option<(i64, usize)> {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.entries.get(&key).copied()
    }
}

/// Builds the coordinate form pattern for a supported pair:
///
/// - (GIII(n,n), G(r,s)), 3 ≤ n ≤ min(r,s): the Segre model. Ambient basis
///   {dz(i,0)} ∪ {dz(0,j)} with σ(dz(i,0), dz(0,j)) = dz(i,j) and same-row
///   or same-column products zero; the sub basis is the n−1 diagonal
///   directions dz(0,k) + dz(k,0).
/// - (G(r,s), GII(n,n)), r,s ≥ 3, r+s ≤ n: the Pluecker model. Ambient
///   basis {eps1^e(i)} ∪ {eps2^e(j)}, i,j ≤ n−2, with
///   σ(eps1^e(i), eps2^e(j)) = −e(i)^e(j) for i ≠ j and same-factor
///   products zero; the sub basis is {eps1^e(l)} for r ≤ l ≤ r+s−2 and
///   {eps2^e(k)} for k < r.
/// - (Q(a), Q(b)), 2 ≤ a ≤ b: the quadric model. One normal direction nu,
///   σ(x, y) = q(x, y)·nu for the standard hyperbolic form q on the
///   (b−2)-dimensional ambient basis; the sub basis is the first a−2
///   directions (empty for a = 2, where every direction is normal to the
///   two-point sub-VMRT).
pub fn model_sff_pattern(source: Space, target: Space) -> Result<BilinearPattern, MatModelError> {
    match (source, target) {
        (Space::LagrGrass(n), Space::Grass(r, s)) => {
            if !(3 <= n && n <= r.min(s)) {
                return Err(MatModelError::IllegalParams {
                    reason: format!(
                        "Segre model needs 3 <= n <= min(r,s), got n={n}, r={r}, s={s}"
                    ),
                });
            }
            let mut ambient = Vec::new();
            for i in 1..r {
                ambient.push(format!("dz({i},0)"));
            }
            for j in 1..s {
                ambient.push(format!("dz(0,{j})"));
            }
            let mut normals = Vec::new();
            let mut normal_index = BTreeMap::new();
            for i in 1..r {
                for j in 1..s {
                    normal_index.insert((i, j), normals.len());
                    normals.push(format!("dz({i},{j})"));
                }
            }
            let mut entries = BTreeMap::new();
            for i in 1..r {
                for j in 1..s {
                    // row direction index i−1, column direction (r−1)+(j−1)
                    let a = i - 1;
                    let b = (r - 1) + (j - 1);
                    entries.insert((a.min(b), a.max(b)), (1, normal_index[&(i, j)]));
                }
            }
            let sub = (1..n)
                .map(|k| SubVector {
                    label: format!("dz(0,{k})+dz({k},0)"),
                    components: vec![(1, k - 1), (1, (r - 1) + (k - 1))],
                })
                .collect();
            Ok(BilinearPattern {
                model: "segre".to_string(),
                ambient,
                normals,
                sub,
                entries,
                form: None,
            })
        }
        (Space::Grass(r, s), Space::OrthoGrass(n)) => {
            if !(r >= 3 && s >= 3 && r + s <= n) {
                return Err(MatModelError::IllegalParams {
                    reason: format!(
                        "Pluecker model needs r,s >= 3 and r+s <= n, got r={r}, s={s}, n={n}"
                    ),
                });
            }
            let m = n - 2;
            let mut ambient = Vec::new();
            for i in 1..=m {
                ambient.push(format!("eps1^e({i})"));
            }
            for j in 1..=m {
                ambient.push(format!("eps2^e({j})"));
            }
            let mut normals = Vec::new();
            let mut normal_index = BTreeMap::new();
            for i in 1..=m {
                for j in (i + 1)..=m {
                    normal_index.insert((i, j), normals.len());
                    normals.push(format!("e({i})^e({j})"));
                }
            }
            let mut entries = BTreeMap::new();
            for i in 1..=m {
                for j in 1..=m {
                    if i == j {
                        continue;
                    }
                    // σ(eps1^e(i), eps2^e(j)) = −e(i)^e(j); normals are
                    // stored with the lower index first, so crossing the
                    // order flips the recorded sign.
                    let a = i - 1;
                    let b = m + (j - 1);
                    let (key, coeff) = if i < j { ((i, j), -1) } else { ((j, i), 1) };
                    entries.insert((a.min(b), a.max(b)), (coeff, normal_index[&key]));
                }
            }
            let mut sub = Vec::new();
            for l in r..=(r + s - 2) {
                sub.push(SubVector {
                    label: format!("eps1^e({l})"),
                    components: vec![(1, l - 1)],
                });
            }
            for k in 1..r {
                sub.push(SubVector {
                    label: format!("eps2^e({k})"),
                    components: vec![(1, m + (k - 1))],
                });
            }
            Ok(BilinearPattern {
                model: "pluecker".to_string(),
                ambient,
                normals,
                sub,
                entries,
                form: None,
            })
        }
        (Space::Quadric(a), Space::Quadric(b)) => {
            if !(2 <= a && a <= b) {
                return Err(MatModelError::IllegalParams {
                    reason: format!("quadric model needs 2 <= a <= b, got a={a}, b={b}"),
                });
            }
            let m = b - 2;
            let ambient: Vec<String> = (1..=m).map(|i| format!("h({i})")).collect();
            let normals = vec!["nu".to_string()];
            let mut entries = BTreeMap::new();
            // Hyperbolic pairing: coordinates i and m+1−i are dual.
            for i in 1..=m {
                let j = m + 1 - i;
                if i <= j {
                    entries.insert((i - 1, j - 1), (1, 0));
                }
            }
            let sub = (1..=(a - 2))
                .map(|k| SubVector {
                    label: format!("h({k})"),
                    components: vec![(1, k - 1)],
                })
                .collect();
            Ok(BilinearPattern {
                model: "quadric".to_string(),
                ambient,
                normals,
                sub,
                entries,
                form: Some(format!(
                    "q(z) = z(1)z({m}) + z(2)z({}) + ... (hyperbolic pairing on {m} coordinates)",
                    m.saturating_sub(1).max(1)
                )),
            })
        }
        _ => Err(MatModelError::UnsupportedPair {
            src: source,
            tgt: target,
        }),
    }
}

/// A nonzero coordinate product backing the verdict: ambient direction,
/// sub-basis vector, normal direction.
#[derive(Debug, Clone, Serialize)]
pub struct ModelWitness {
    pub u: String,
    pub w: String,
    pub product: String,
}

/// Kernel verdict of a coordinate model.
#[derive(Debug, Clone, Serialize)]
pub struct ModelKernelReport {
    pub source: Space,
    pub target: Space,
    pub model: String,
    pub form: Option<String>,
    pub ambient_dim: usize,
    pub sub_dim: usize,
    pub kernel_dim: usize,
    /// Null-space basis vectors over the ambient basis, as rational
    /// strings.
    pub kernel_basis: Vec<Vec<String>>,
    pub verdict: Verdict,
    /// One nonzero product per ambient basis direction that pairs
    /// nontrivially with the sub basis.
    pub witnesses: Vec<ModelWitness>,
}

/// Exact kernel of v ↦ (σ(v, w))_{w ∈ sub basis} over the ambient tangent
/// space, in the coordinate model of the pair. The verdict comes from the
/// null-space dimension of the stacked rational matrix, not from
/// entry-counting.
pub fn kernel_matrix_model(
    source: Space,
    target: Space,
) -> Result<ModelKernelReport, MatModelError> {
    let pattern = model_sff_pattern(source, target)?;
    let ambient_dim = pattern.ambient.len();
    let normal_dim = pattern.normals.len();
    // At least one row keeps the column count visible to the eliminator
    // even when the sub basis is empty (the a = 2 quadric model).
    let rows = (pattern.sub.len() * normal_dim).max(1);
    let mut matrix = vec![vec![BigRational::zero(); ambient_dim]; rows];
    for (wi, w) in pattern.sub.iter().enumerate() {
        for u in 0..ambient_dim {
            for &(c, t) in &w.components {
                if let Some((coeff, k)) = pattern.entry(u, t) {
                    let add = BigRational::from_integer((c * coeff).into());
                    let cell = &mut matrix[wi * normal_dim + k][u];
                    *cell = &*cell + &add;
                }
            }
        }
    }
    let nullspace = rational_nullspace(matrix);
    let kernel_dim = nullspace.len();
    let verdict = if kernel_dim == 0 {
        Verdict::Nondegenerate
    } else {
        Verdict::Degenerate
    };
    let mut witnesses = Vec::new();
    for u in 0..ambient_dim {
        'sub: for w in &pattern.sub {
            for &(c, t) in &w.components {
                if c != 0 {
                    if let Some((coeff, k)) = pattern.entry(u, t) {
                        if coeff != 0 {
                            witnesses.push(ModelWitness {
                                u: pattern.ambient[u].clone(),
                                w: w.label.clone(),
                                product: pattern.normals[k].clone(),
                            });
                            break 'sub;
                        }
                    }
                }
            }
        }
    }
    Ok(ModelKernelReport {
        source,
        target,
        model: pattern.model.clone(),
        form: pattern.form.clone(),
        ambient_dim,
        sub_dim: pattern.sub.len(),
        kernel_dim,
        kernel_basis: nullspace
            .iter()
            .map(|v| v.iter().map(BigRational::to_string).collect())
            .collect(),
        verdict,
        witnesses,
    })
}

/// A total Chern class truncated after degree four: 1 + c₁δ + c₂δ² + c₃δ³
/// + c₄δ⁴ with integer coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernPoly {
    coeffs: [i64; 5],
}

impl ChernPoly {
    /// Requires the constant coefficient to be 1.
    pub fn new(coeffs: [i64; 5]) -> Result<ChernPoly, MatModelError> {
        if coeffs[0] != 1 {
            return Err(MatModelError::IllegalParams {
                reason: "a total class starts with constant coefficient 1".to_string(),
            });
        }
        Ok(ChernPoly { coeffs })
    }

    pub fn coeffs(&self) -> [i64; 5] {
        self.coeffs
    }
}

impl fmt::Display for ChernPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "1 + {}d + {}d^2 + {}d^3 + {}d^4",
            self.coeffs[1], self.coeffs[2], self.coeffs[3], self.coeffs[4]
        )
    }
}

/// Searches for integer polynomials (1 + a₁δ + ... + a_{d₁}δ^{d₁}) and
/// (1 + b₁δ + ... + b_{d₂}δ^{d₂}) whose product equals the target through
/// degree four. Factor coefficients are returned including the leading 1.
/// The top product coefficient finitely constrains the leading unknowns by
/// divisibility and the rest follow triangularly, so `None` exhausts every
/// candidate. Requires d₁ + d₂ ≤ 4.
pub fn chern_factor_search(
    target: &ChernPoly,
    split: (usize, usize),
) -> Option<(Vec<i64>, Vec<i64>)> {
    let (d1, d2) = split;
    assert!(
        d1 + d2 <= 4,
        "splits above degree four exceed the truncation"
    );
    let c = target.coeffs();
    let found = search_split(&c, d1, d2)?;
    debug_assert_eq!(truncated_product(&found.0, &found.1), c);
    Some(found)
}

fn search_split(c: &[i64; 5], d1: usize, d2: usize) -> Option<(Vec<i64>, Vec<i64>)> {
    if d1 > d2 {
        return search_split(c, d2, d1).map(|(a, b)| (b, a));
    }
    match (d1, d2) {
        (0, k) => {
            if c[(k + 1)..].iter().all(|&x| x == 0) {
                Some((vec![1], c[..=k].to_vec()))
            } else {
                None
            }
        }
        (1, 1) => {
            if c[3] != 0 || c[4] != 0 {
                return None;
            }
            let (a1, b1) = sum_product_pairs(c[1], c[2]).into_iter().next()?;
            Some((vec![1, a1], vec![1, b1]))
        }
        (1, 2) => {
            if c[4] != 0 {
                return None;
            }
            let (a1, (b1, b2)) = solve_linear_times_quadratic(c[1], c[2], c[3])?;
            Some((vec![1, a1], vec![1, b1, b2]))
        }
        (1, 3) => {
            let candidates: Vec<i64> = if c[4] == 0 { vec![0] } else { divisors(c[4]) };
            for a1 in candidates {
                let b1 = c[1] - a1;
                let b2 = c[2] - a1 * b1;
                let b3 = c[3] - a1 * b2;
                if a1 * b3 == c[4] {
                    return Some((vec![1, a1], vec![1, b1, b2, b3]));
                }
            }
            None
        }
        (2, 2) => {
            if c[4] != 0 {
                for a2 in divisors(c[4]) {
                    let b2 = c[4] / a2;
                    for (a1, b1) in sum_product_pairs(c[1], c[2] - a2 - b2) {
                        if a2 * b1 + a1 * b2 == c[3] {
                            return Some((vec![1, a1, a2], vec![1, b1, b2]));
                        }
                    }
                }
                None
            } else {
                // The top coefficient factors as a₂b₂ = 0; either branch
                // degenerates into the linear-times-quadratic system.
                if let Some((a1, (b1, b2))) = solve_linear_times_quadratic(c[1], c[2], c[3]) {
                    return Some((vec![1, a1, 0], vec![1, b1, b2]));
                }
                solve_linear_times_quadratic(c[1], c[2], c[3])
                    .map(|(b1, (a1, a2))| (vec![1, a1, a2], vec![1, b1, 0]))
            }
        }
        _ => unreachable!("d1 <= d2 and d1 + d2 <= 4"),
    }
}

/// Integer solutions of (1 + xδ)(1 + y₁δ + y₂δ²) = 1 + c₁δ + c₂δ² + c₃δ³.
fn solve_linear_times_quadratic(c1: i64, c2: i64, c3: i64) -> Option<(i64, (i64, i64))> {
    let candidates: Vec<i64> = if c3 == 0 { vec![0] } else { divisors(c3) };
    for x in candidates {
        let y1 = c1 - x;
        let y2 = c2 - x * y1;
        if x * y2 == c3 {
            return Some((x, (y1, y2)));
        }
    }
    None
}

/// Integer pairs (x, y) with x + y = s and x·y = p.
fn sum_product_pairs(s: i64, p: i64) -> Vec<(i64, i64)> {
    if p == 0 {
        return vec![(0, s), (s, 0)];
    }
    divisors(p)
        .into_iter()
        .filter(|&d| d + p / d == s)
        .map(|d| (d, p / d))
        .collect()
}

/// All integer divisors of a nonzero integer, both signs.
fn divisors(n: i64) -> Vec<i64> {
    let a = n.abs();
    let mut out = Vec::new();
    for d in 1..=a {
        if a % d == 0 {
            out.push(d);
            out.push(-d);
        }
    }
    out
}

/// Product of two leading-1 coefficient vectors, truncated after degree 4.
fn truncated_product(a: &[i64], b: &[i64]) -> [i64; 5] {
    let mut out = [0i64; 5];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            if i + j <= 4 {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// The two coordinate embeddings the models realize, with their chart
/// parameters.
enum ModelEmbedding {
    SymIntoGrass { n: usize, r: usize, s: usize },
    GrassIntoSkew { r: usize, s: usize, n: usize },
}

fn model_embedding(source: Space, target: Space) -> Result<ModelEmbedding, MatModelError> {
    match (source, target) {
        (Space::LagrGrass(n), Space::Grass(r, s)) if 3 <= n && n <= r.min(s) => {
            Ok(ModelEmbedding::SymIntoGrass { n, r, s })
        }
        (Space::Grass(r, s), Space::OrthoGrass(n)) if r >= 3 && s >= 3 && r + s <= n => {
            Ok(ModelEmbedding::GrassIntoSkew { r, s, n })
        }
        _ => Err(MatModelError::IllegalParams {
            reason: format!("no coordinate embedding models ({source}, {target})"),
        }),
    }
}

fn small_rational(rng: &mut ChaCha20Rng) -> BigRational {
    BigRational::from_integer(BigInt::from(rng.gen_range(-9i64..=9)))
}

fn nonzero_small_vec(len: usize, rng: &mut ChaCha20Rng) -> Vec<BigRational> {
    loop {
        let v: Vec<BigRational> = (0..len).map(|_| small_rational(rng)).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

fn dense_symmetric(n: usize, rng: &mut ChaCha20Rng) -> MatrixPoint {
    loop {
        let mut entries = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let x = small_rational(rng);
                entries[i][j] = x.clone();
                entries[j][i] = x;
            }
        }
        if entries.iter().flatten().any(|x| !x.is_zero()) {
            return MatrixPoint::symmetric(entries).expect("construction is symmetric");
        }
    }
}

fn dense_general(r: usize, s: usize, rng: &mut ChaCha20Rng) -> MatrixPoint {
    loop {
        let entries: Vec<Vec<BigRational>> = (0..r)
            .map(|_| (0..s).map(|_| small_rational(rng)).collect())
            .collect();
        if entries.iter().flatten().any(|x| !x.is_zero()) {
            return MatrixPoint::general(entries).expect("shape is rectangular");
        }
    }
}

fn rank_one_symmetric(n: usize, rng: &mut ChaCha20Rng) -> MatrixPoint {
    let u = nonzero_small_vec(n, rng);
    let entries: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| &u[i] * &u[j]).collect())
        .collect();
    MatrixPoint::symmetric(entries).expect("outer square is symmetric")
}

fn rank_one_general(r: usize, s: usize, rng: &mut ChaCha20Rng) -> MatrixPoint {
    let u = nonzero_small_vec(r, rng);
    let v = nonzero_small_vec(s, rng);
    let entries: Vec<Vec<BigRational>> = (0..r)
        .map(|i| (0..s).map(|j| &u[i] * &v[j]).collect())
        .collect();
    MatrixPoint::general(entries).expect("shape is rectangular")
}

/// Outcome of a seeded rank and membership check for one coordinate
/// embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankCheckReport {
    pub source: Space,
    pub target: Space,
    pub samples: usize,
    pub seed: u64,
    /// Rank of an embedded matrix divided by the rank of its preimage: 1
    /// for the symmetric block embedding, 2 for the skew one.
    pub rank_factor: usize,
    /// Every dense sample kept rank(embed(m)) = rank_factor * rank(m).
    pub rank_respected: bool,
    /// Every rank-one sample was a VMRT point before embedding and landed
    /// on one afterwards.
    pub membership_respected: bool,
}

/// Samples the given embedding: per round, one dense matrix checks the
/// rank relation exactly, and one seeded rank-one matrix checks that VMRT
/// membership is preserved. Requires a modeled pair.
pub fn model_rank_check(
    source: Space,
    target: Space,
    samples: usize,
    seed: u64,
) -> Result<RankCheckReport, MatModelError> {
    let embedding = model_embedding(source, target)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut rank_respected = true;
    let mut membership_respected = true;
    let rank_factor = match embedding {
        ModelEmbedding::SymIntoGrass { .. } => 1,
        ModelEmbedding::GrassIntoSkew { .. } => 2,
    };
    for _ in 0..samples {
        let (dense, cone) = match embedding {
            ModelEmbedding::SymIntoGrass { n, r, s } => {
                let m = dense_symmetric(n, &mut rng);
                let p = rank_one_symmetric(n, &mut rng);
                (
                    (embed_sym_into_grass(n, r, s, &m)?, m),
                    (embed_sym_into_grass(n, r, s, &p)?, p),
                )
            }
            ModelEmbedding::GrassIntoSkew { r, s, n } => {
                let m = dense_general(r, s, &mut rng);
                let p = rank_one_general(r, s, &mut rng);
                (
                    (embed_grass_into_skew(r, s, n, &m)?, m),
                    (embed_grass_into_skew(r, s, n, &p)?, p),
                )
            }
        };
        let (embedded, m) = dense;
        if embedded.rank() != rank_factor * m.rank() {
            rank_respected = false;
        }
        let (embedded, p) = cone;
        if !vmrt_rank_membership(source, &p)? || !vmrt_rank_membership(target, &embedded)? {
            membership_respected = false;
        }
    }
    Ok(RankCheckReport {
        source,
        target,
        samples,
        seed,
        rank_factor,
        rank_respected,
        membership_respected,
    })
}

/// One seeded rank-one sample pushed through a coordinate embedding, with
/// its ranks and VMRT membership on both sides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbedSample {
    pub source: Space,
    pub target: Space,
    pub seed: u64,
    pub sample: MatrixPoint,
    pub embedded: MatrixPoint,
    pub sample_rank: usize,
    pub embedded_rank: usize,
    pub sample_in_vmrt: bool,
    pub embedded_in_vmrt: bool,
}

/// Draws one seeded rank-one chart matrix for the source and embeds it.
/// Requires a modeled pair.
pub fn embed_sample(source: Space, target: Space, seed: u64) -> Result<EmbedSample, MatModelError> {
    let embedding = model_embedding(source, target)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (sample, embedded) = match embedding {
        ModelEmbedding::SymIntoGrass { n, r, s } => {
            let p = rank_one_symmetric(n, &mut rng);
            let e = embed_sym_into_grass(n, r, s, &p)?;
            (p, e)
        }
        ModelEmbedding::GrassIntoSkew { r, s, n } => {
            let p = rank_one_general(r, s, &mut rng);
            let e = embed_grass_into_skew(r, s, n, &p)?;
            (p, e)
        }
    };
    let sample_in_vmrt = vmrt_rank_membership(source, &sample)?;
    let embedded_in_vmrt = vmrt_rank_membership(target, &embedded)?;
    Ok(EmbedSample {
        source,
        target,
        seed,
        sample_rank: sample.rank(),
        embedded_rank: embedded.rank(),
        sample,
        embedded,
        sample_in_vmrt,
        embedded_in_vmrt,
    })
}
