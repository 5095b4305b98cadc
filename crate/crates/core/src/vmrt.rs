//! Second fundamental form of the VMRT at the root level.
//!
//! At the base point of a marked space the noncompact positive roots split
//! as {γ} ⊔ H_γ ⊔ N_γ, and the tangent space of the VMRT at the highest
//! root point [E_γ] is spanned by the H-directions. The second fundamental
//! form pairs two H-directions into an N-direction: σ(E_{β₁}, E_{β₂}) is a
//! scalar multiple of E_{β₁+β₂−γ}, nonzero exactly when the shifted sum is
//! again a root. Degeneracy questions therefore reduce to the zero/nonzero
//! pattern of that shift, which is exact integer arithmetic on coefficient
//! vectors.
//!
//! Two independent routes decide whether a sub-structure is degenerate:
//!
//! - [`kernel_root_level`] reads the pattern directly and lists the
//!   H-directions killed by every image vector, with a nonzero product as
//!   witness for each surviving direction.
//! - [`randomized_kernel_oracle`] refuses to trust the pattern argument:
//!   it assigns independent nonzero rational constants to every present
//!   entry, stacks the linear maps u ↦ σ(u, w) over the image basis, and
//!   computes the exact nullspace dimension over ℚ.
//!
//! For a degenerate pair, [`nonrigidity_witness`] produces the deformation
//! data: a direction η that squares to zero and kills the embedded tangent
//! space, the coordinate recipe for the deformed submanifold, and a sampled
//! exact check of the cone identity ζ(ξ + λη) = ζ(ξ) + λη.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{BigInt, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::chss::{ChssError, MarkedSpace, Space};
use crate::correspond::{verify_root_map, Provenance, RootMap};
use crate::linalg::rational_rank;
use crate::rootsys::Root;

/// Number of sampled (ξ, λ) points per seed in the ζ-identity check.
pub const ZETA_SAMPLES: usize = 20;

#[derive(Debug, Error)]
pub enum VmrtError {
    #[error(transparent)]
    Space(#[from] ChssError),
    /// The form is only defined on H_γ together with γ itself.
    #[error("root {root} of {space} lies outside H_γ ∪ {{γ}}")]
    NotInH { space: Space, root: String },
    /// Kernel analysis refuses maps that fail verification.
    #[error("root map {src} → {tgt} fails verification: {reason}")]
    InvalidMap {
        src: Space,
        tgt: Space,
        reason: String,
    },
    /// Non-rigidity witnesses exist only on the degenerate side.
    #[error("the second fundamental form of ({src}, {tgt}) is nondegenerate; no deformation witness exists")]
    NotDegenerate { src: Space, tgt: Space },
}

fn ser_root<S: Serializer>(r: &Root, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.expr())
}

fn ser_roots<S: Serializer>(v: &[Root], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(Root::expr))
}

/// σ(β₁, β₂) at the root level: `Some(β₁ + β₂ − γ)` when that vector is a
/// root (it then lies in N_γ), `None` when it is not. Both arguments must
/// lie in H_γ ∪ {γ}; the form vanishes identically against γ itself
/// because γ spans the cone direction rather than a tangent one.
pub fn sff_shift(space: &MarkedSpace, b1: &Root, b2: &Root) -> Result<Option<Root>, VmrtError> {
    let part = space.hc_partition();
    let gamma = &part.gamma;
    for b in [b1, b2] {
        if b != gamma && !part.h_set.contains(b) {
            return Err(VmrtError::NotInH {
                space: space.space(),
                root: b.expr(),
            });
        }
    }
    if b1 == gamma || b2 == gamma {
        return Ok(None);
    }
    let shifted = b1.add(b2).sub(gamma);
    if space.system().is_root(&shifted) {
        debug_assert!(
            part.n_set.contains(&shifted),
            "shifted sum must land in N_γ"
        );
        Ok(Some(shifted))
    } else {
        Ok(None)
    }
}

/// The zero/nonzero pattern of the form on H_γ: every unordered pair of
/// H-indices whose shifted sum is a root, with the N-index of that sum.
/// Structure constants are deliberately not modeled; every decision
/// downstream depends only on which entries are present.
#[derive(Debug, Clone, Serialize)]
pub struct SffPattern {
    pub space: Space,
    #[serde(serialize_with = "ser_roots")]
    pub h_basis: Vec<Root>,
    #[serde(serialize_with = "ser_roots")]
    pub n_basis: Vec<Root>,
    /// Triples (i, j, k) with i ≤ j: σ(h_basis[i], h_basis[j]) spans
    /// n_basis[k].
    pub entries: Vec<(usize, usize, usize)>,
}

impl SffPattern {
    /// Index of a root in the H-basis.
    pub fn h_index(&self, r: &Root) -> Option<usize> {
        self.h_basis.iter().position(|h| h == r)
    }

    /// The N-index of σ(h_basis[i], h_basis[j]), if that entry is present.
    pub fn entry(&self, i: usize, j: usize) -> Option<usize> {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.entries
            .iter()
            .find(|&&(a, b, _)| (a, b) == key)
            .map(|&(_, _, k)| k)
    }
}

/// Builds the full pattern of a catalog space by scanning all unordered
/// H-pairs, the diagonal included.
pub fn sff_pattern(space: Space) -> Result<SffPattern, VmrtError> {
    let ms = MarkedSpace::catalog_space(space)?;
    let part = ms.hc_partition();
    let h_basis = part.h_set.clone();
    let n_basis = part.n_set.clone();
    let mut entries = Vec::new();
    for i in 0..h_basis.len() {
        for j in i..h_basis.len() {
            if let Some(t) = sff_shift(&ms, &h_basis[i], &h_basis[j])? {
                let k = n_basis
                    .iter()
                    .position(|n| *n == t)
                    .expect("shifted sum lies in N_γ");
                entries.push((i, j, k));
            }
        }
    }
    Ok(SffPattern {
        space,
        h_basis,
        n_basis,
        entries,
    })
}

/// A nonzero product recorded for one H-direction outside the kernel.
#[derive(Debug, Clone, Serialize)]
pub struct SffWitness {
    #[serde(serialize_with = "ser_root")]
    pub u: Root,
    #[serde(serialize_with = "ser_root")]
    pub w: Root,
    #[serde(serialize_with = "ser_root")]
    pub product: Root,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Degenerate,
    Nondegenerate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Degenerate => "degenerate",
            Verdict::Nondegenerate => "nondegenerate",
        })
    }
}

/// Outcome of the combinatorial kernel analysis for one verified map.
#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub source: Space,
    pub target: Space,
    /// How the analyzed map was obtained.
    pub provenance: Provenance,
    /// H-directions of the target killed by every image vector.
    #[serde(serialize_with = "ser_roots")]
    pub kernel_basis: Vec<Root>,
    /// Degenerate exactly when the kernel basis is nonempty.
    pub verdict: Verdict,
    /// One nonzero product per H-direction outside the kernel; the right
    /// argument always comes from the image of the source's H-set.
    pub witnesses: Vec<SffWitness>,
    pub justification: String,
}

/// Intersects the form with the embedded tangent space: a target
/// H-direction u is in the kernel when σ(u, w) vanishes for every image
/// vector w of the source's H-set under the map. Rejects maps that fail
/// verification.
pub fn kernel_root_level(map: &RootMap) -> Result<KernelReport, VmrtError> {
    let report = verify_root_map(map).map_err(|e| VmrtError::InvalidMap {
        src: map.source(),
        tgt: map.target(),
        reason: e.to_string(),
    })?;
    if !report.valid {
        return Err(VmrtError::InvalidMap {
            src: map.source(),
            tgt: map.target(),
            reason: report
                .witness
                .unwrap_or_else(|| "verification reports an invalid map".to_string()),
        });
    }
    let src = MarkedSpace::catalog_space(map.source())?;
    let tgt = MarkedSpace::catalog_space(map.target())?;
    let part = tgt.hc_partition();
    let image: Vec<Root> = src
        .hc_partition()
        .h_set
        .iter()
        .map(|w| map.apply(w))
        .collect();
    debug_assert!(
        image.iter().all(|w| part.h_set.contains(w)),
        "a valid map sends H to H"
    );
    let mut kernel_basis = Vec::new();
    let mut witnesses = Vec::new();
    for u in &part.h_set {
        let mut hit = None;
        for w in &image {
            if let Some(product) = sff_shift(&tgt, u, w)? {
                hit = Some(SffWitness {
                    u: u.clone(),
                    w: w.clone(),
                    product,
                });
                break;
            }
        }
        match hit {
            Some(witness) => witnesses.push(witness),
            None => kernel_basis.push(u.clone()),
        }
    }
    let verdict = if kernel_basis.is_empty() {
        Verdict::Nondegenerate
    } else {
        Verdict::Degenerate
    };
    let justification = match verdict {
        Verdict::Nondegenerate => format!(
            "all {} H-directions of {} pair nontrivially with the embedded tangent space ({} image vectors)",
            part.h_set.len(),
            map.target(),
            image.len()
        ),
        Verdict::Degenerate => format!(
            "{} of {} H-directions of {} vanish against all {} image vectors",
            kernel_basis.len(),
            part.h_set.len(),
            map.target(),
            image.len()
        ),
    };
    Ok(KernelReport {
        source: map.source(),
        target: map.target(),
        provenance: map.provenance(),
        kernel_basis,
        verdict,
        witnesses,
        justification,
    })
}

/// Result of the randomized exact-nullspace cross-check.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub space: Space,
    pub seed: u64,
    pub trials: usize,
    /// Nullspace dimension of the stacked map for each trial's
    /// structure-constant assignment.
    pub per_trial: Vec<usize>,
    /// Smallest dimension seen across trials.
    pub kernel_dimension: usize,
}

/// Estimates the kernel dimension without reading the pattern's zero set
/// directly: per trial, every present entry gets an independent constant
/// drawn uniformly from {1, ..., 97}, the maps u ↦ σ(u, w) for w in
/// `sub_basis` are stacked into one matrix over ℚ, and the exact nullspace
/// dimension is recorded. Requires `trials ≥ 1` and `sub_basis ⊆ H_γ`.
pub fn randomized_kernel_oracle(
    pattern: &SffPattern,
    sub_basis: &[Root],
    trials: usize,
    seed: u64,
) -> OracleReport {
    assert!(trials >= 1, "the oracle needs at least one trial");
    let sub: Vec<usize> = sub_basis
        .iter()
        .map(|w| {
            pattern
                .h_index(w)
                .expect("sub-basis vectors must lie in H_γ")
        })
        .collect();
    let mut by_pair: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (e, &(i, j, _)) in pattern.entries.iter().enumerate() {
        by_pair.insert((i, j), e);
    }
    let h_dim = pattern.h_basis.len();
    let n_dim = pattern.n_basis.len();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut per_trial = Vec::with_capacity(trials);
    for _ in 0..trials {
        let constants: Vec<i64> = pattern
            .entries
            .iter()
            .map(|_| rng.gen_range(1..=97))
            .collect();
        let mut matrix = vec![vec![BigRational::zero(); h_dim]; sub.len() * n_dim];
        for (r, &jw) in sub.iter().enumerate() {
            for i in 0..h_dim {
                let key = if i <= jw { (i, jw) } else { (jw, i) };
                if let Some(&e) = by_pair.get(&key) {
                    let k = pattern.entries[e].2;
                    matrix[r * n_dim + k][i] =
                        BigRational::from_integer(BigInt::from(constants[e]));
                }
            }
        }
        per_trial.push(h_dim - rational_rank(matrix));
    }
    let kernel_dimension = *per_trial.iter().min().expect("trials ≥ 1");
    OracleReport {
        space: pattern.space,
        seed,
        trials,
        per_trial,
        kernel_dimension,
    }
}

/// Deformation data for a degenerate pair.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub source: Space,
    pub target: Space,
    /// The first kernel direction η = γ + θ; the deformed submanifold
    /// moves off the embedded one along η.
    #[serde(serialize_with = "ser_root")]
    pub eta: Root,
    /// σ(η, η) vanishes: 2η − γ is not a root.
    pub eta_squares_to_zero: bool,
    /// σ(η, w) vanishes for every image vector w.
    pub eta_kills_image: bool,
    /// Dimension of the embedded sub-space (the number of z-coordinates).
    pub sub_dim: usize,
    /// Dimension of the ambient space (the number of w-coordinates).
    pub ambient_dim: usize,
    /// Coordinate equations of the deformed submanifold, with the
    /// coordinate one past the sub-space dual to η.
    pub recipe: Vec<String>,
    pub zeta_samples: usize,
    pub seed: u64,
    /// ζ(ξ + λη) = ζ(ξ) + λη held exactly at every sampled point.
    pub zeta_identity_holds: bool,
}

/// Produces the non-rigidity witness for a degenerate pair: the kernel
/// direction η, checks that η squares to zero and kills the embedded
/// tangent space, the explicit coordinate recipe, and a sampled exact
/// verification of the cone identity. Rejects nondegenerate pairs.
pub fn nonrigidity_witness(map: &RootMap, seed: u64) -> Result<WitnessReport, VmrtError> {
    let kernel = kernel_root_level(map)?;
    let Some(eta) = kernel.kernel_basis.first().cloned() else {
        return Err(VmrtError::NotDegenerate {
            src: map.source(),
            tgt: map.target(),
        });
    };
    let src = MarkedSpace::catalog_space(map.source())?;
    let tgt = MarkedSpace::catalog_space(map.target())?;
    let image: Vec<Root> = src
        .hc_partition()
        .h_set
        .iter()
        .map(|w| map.apply(w))
        .collect();
    let eta_squares_to_zero = sff_shift(&tgt, &eta, &eta)?.is_none();
    let mut eta_kills_image = true;
    for w in &image {
        if sff_shift(&tgt, &eta, w)?.is_some() {
            eta_kills_image = false;
        }
    }
    let sub_dim = src.dim();
    let ambient_dim = tgt.dim();
    let mut recipe = vec![
        format!("w_i = z_i for 1 <= i <= {sub_dim}"),
        format!("w_{} = z_{}^2", sub_dim + 1, sub_dim),
    ];
    if sub_dim + 2 <= ambient_dim {
        recipe.push(format!(
            "w_j = 0 for {} <= j <= {}",
            sub_dim + 2,
            ambient_dim
        ));
    }
    let pattern = sff_pattern(map.target())?;
    let image_indices: Vec<usize> = image
        .iter()
        .map(|w| pattern.h_index(w).expect("image lies in H_γ"))
        .collect();
    let eta_index = pattern.h_index(&eta).expect("η lies in H_γ");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let zeta_identity_holds = (0..ZETA_SAMPLES)
        .all(|_| zeta_identity_at_sample(&pattern, &image_indices, eta_index, &mut rng));
    Ok(WitnessReport {
        source: map.source(),
        target: map.target(),
        eta,
        eta_squares_to_zero,
        eta_kills_image,
        sub_dim,
        ambient_dim,
        recipe,
        zeta_samples: ZETA_SAMPLES,
        seed,
        zeta_identity_holds,
    })
}

/// One sampled check of ζ(ξ + λη) = ζ(ξ) + λη: fresh nonzero structure
/// constants on every present pattern entry, a random rational ξ supported
/// on the embedded tangent basis, and a random rational λ. Both sides are
/// computed as exact vectors in C·γ ⊕ H_γ ⊕ N_γ coordinates and compared
/// for equality.
fn zeta_identity_at_sample(
    pattern: &SffPattern,
    image_indices: &[usize],
    eta_index: usize,
    rng: &mut ChaCha20Rng,
) -> bool {
    let h_dim = pattern.h_basis.len();
    let constants: Vec<BigRational> = pattern
        .entries
        .iter()
        .map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(1..=97i64))))
        .collect();
    let mut xi = vec![BigRational::zero(); h_dim];
    for &i in image_indices {
        xi[i] = random_rational(rng);
    }
    let lambda = random_rational(rng);
    let mut shifted = xi.clone();
    shifted[eta_index] = &shifted[eta_index] + &lambda;
    let lhs = zeta(pattern, &constants, &shifted);
    let mut rhs = zeta(pattern, &constants, &xi);
    rhs.1[eta_index] = &rhs.1[eta_index] + &lambda;
    lhs == rhs
}

/// ζ(ξ) = γ + ξ + σ(ξ, ξ) as exact coordinates (γ-component, H-components,
/// N-components) for the bilinear form with the given structure constants.
fn zeta(
    pattern: &SffPattern,
    constants: &[BigRational],
    xi: &[BigRational],
) -> (BigRational, Vec<BigRational>, Vec<BigRational>) {
    let mut n_part = vec![BigRational::zero(); pattern.n_basis.len()];
    for (e, &(i, j, k)) in pattern.entries.iter().enumerate() {
        let term = if i == j {
            &xi[i] * &xi[j]
        } else {
            let cross = &xi[i] * &xi[j];
            &cross + &cross
        };
        n_part[k] = &n_part[k] + &(&constants[e] * &term);
    }
    (
        BigRational::from_integer(BigInt::from(1)),
        xi.to_vec(),
        n_part,
    )
}

/// A rational with numerator and denominator uniform in {1, ..., 97}.
fn random_rational(rng: &mut ChaCha20Rng) -> BigRational {
    let num = rng.gen_range(1..=97i64);
    let den = rng.gen_range(1..=97i64);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
