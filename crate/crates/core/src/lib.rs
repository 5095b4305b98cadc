//! Root-theoretic models of VMRT sub-structures on compact Hermitian
//! symmetric spaces.
//!
//! The library builds finite root systems (types A, B, C, D, E6, E7) with
//! exact integer arithmetic, models the catalog of irreducible compact
//! Hermitian symmetric spaces as marked Dynkin diagrams, and mechanizes the
//! combinatorics that decide when one such space embeds into another
//! respecting varieties of minimal rational tangents:
//!
//! - [`rootsys`]: Dynkin diagrams, root generation, Cartan pairings.
//! - [`chss`]: the marked-diagram catalog, Harish-Chandra partitions
//!   `{γ} ⊔ H_γ ⊔ N_γ`, abstract VMRT reduction data, perpendicular-set
//!   combinatorics.
//! - [`correspond`]: root correspondences `Φ: Δ₀ → Δ`, with full
//!   verification, built-in tables, the chain-deletion construction, and
//!   exhaustive backtracking search.
//! - [`vmrt`]: the root-level second fundamental form (a shift
//!   `β₁ + β₂ − γ` into `N_γ`), degeneracy kernels, a randomized
//!   exact-nullspace oracle, and non-rigidity witnesses.
//! - [`matmodel`]: Harish-Chandra matrix models, rank-based VMRT
//!   membership, two coordinate embeddings, coordinate bilinear patterns,
//!   and the Chern-class factorization check.
//! - [`classify`]: category decisions for catalog pairs and the assembled
//!   atlas with degeneracy and rigidity verdicts.
//! - [`verify`]: the one-shot suite replaying every embedded expectation,
//!   with golden data in [`golden`].
//!
//! All arithmetic is exact (integers and arbitrary-precision rationals);
//! there is no floating point anywhere in the crate.

#![forbid(unsafe_code)]
// Matrix code below writes mirrored entries (m[i][j] and m[j][i]) and
// offset blocks; index loops state that more plainly than iterator chains.
#![allow(clippy::needless_range_loop)]

pub mod chss;
pub mod classify;
pub mod correspond;
pub mod golden;
mod linalg;
pub mod matmodel;
pub mod rootsys;
pub mod verify;
pub mod vmrt;
