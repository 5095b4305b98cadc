//! JSON-facing report types.
//!
//! Every value the binary prints under `--json` serializes from one of
//! these types and parses back into it unchanged. Library types whose
//! fields are plain data (pair records, the atlas, suite reports, matrix
//! points) are emitted directly; the types here cover the reports that
//! carry roots or other context-dependent values, flattened to strings.

use cartan_vmrt_core::chss::{MarkedSpace, PerpStats};
use cartan_vmrt_core::correspond::{MapReport, RootMap};
use cartan_vmrt_core::matmodel::{
    chern_factor_search, ChernPoly, EmbedSample, MatrixPoint, ModelKernelReport, RankCheckReport,
};
use cartan_vmrt_core::rootsys::Root;
use cartan_vmrt_core::vmrt::{KernelReport, WitnessReport};
use serde::{Deserialize, Serialize};

fn exprs(roots: &[Root]) -> Vec<String> {
    roots.iter().map(Root::expr).collect()
}

/// Summary of the root system behind one catalog space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootsReport {
    pub space: String,
    pub family: String,
    pub rank: usize,
    pub marked_node: usize,
    pub dim: usize,
    pub positive_roots: usize,
    pub compact_positives: usize,
    pub noncompact_positives: usize,
    pub gamma: String,
}

impl RootsReport {
    pub fn collect(ms: &MarkedSpace) -> Self {
        let diagram = ms.diagram();
        RootsReport {
            space: ms.space().to_string(),
            family: format!("{}{}", diagram.family(), diagram.rank()),
            rank: diagram.rank(),
            marked_node: ms.marked_node(),
            dim: ms.dim(),
            positive_roots: ms.system().positives().len(),
            compact_positives: ms.compact_positives().len(),
            noncompact_positives: ms.noncompact_positives().len(),
            gamma: ms.gamma().expr(),
        }
    }
}

/// The three-cell split of the noncompact positive roots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub space: String,
    pub gamma: String,
    pub h: Vec<String>,
    pub n: Vec<String>,
}

impl PartitionReport {
    pub fn collect(ms: &MarkedSpace) -> Self {
        let part = ms.hc_partition();
        PartitionReport {
            space: ms.space().to_string(),
            gamma: part.gamma.expr(),
            h: exprs(&part.h_set),
            n: exprs(&part.n_set),
        }
    }
}

/// Perpendicular set of one noncompact positive root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerpSetReport {
    pub space: String,
    pub beta: String,
    pub perp: Vec<String>,
}

/// Size and intersection statistics over all perpendicular sets, with
/// histograms as sorted (value, count) pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerpStatsReport {
    pub space: String,
    pub set_count: usize,
    pub non_perpendicular_pairs: usize,
    pub size_histogram: Vec<(usize, usize)>,
    pub intersection_histogram: Vec<(usize, usize)>,
}

impl From<&PerpStats> for PerpStatsReport {
    fn from(stats: &PerpStats) -> Self {
        PerpStatsReport {
            space: stats.space.to_string(),
            set_count: stats.sizes.len(),
            non_perpendicular_pairs: stats.pair_intersections.len(),
            size_histogram: stats.size_histogram.iter().map(|(&k, &v)| (k, v)).collect(),
            intersection_histogram: stats
                .intersection_histogram
                .iter()
                .map(|(&k, &v)| (k, v))
                .collect(),
        }
    }
}

/// A root correspondence together with its full verification record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapCheckReport {
    pub source: String,
    pub target: String,
    pub provenance: String,
    /// Image of each source simple root, as (node, target expression).
    pub assignments: Vec<(usize, String)>,
    pub marked_preserved: bool,
    pub images_are_roots: bool,
    pub injective: bool,
    pub cartan_preserved: bool,
    pub closure_respected: bool,
    pub positives_to_positives: bool,
    pub compacts_to_compacts: bool,
    pub noncompacts_to_noncompacts: bool,
    pub h_to_h: bool,
    pub n_to_n: bool,
    pub valid: bool,
    pub witness: Option<String>,
}

impl MapCheckReport {
    pub fn collect(map: &RootMap, check: &MapReport) -> Self {
        MapCheckReport {
            source: map.source().to_string(),
            target: map.target().to_string(),
            provenance: map.provenance().to_string(),
            assignments: map
                .assignments()
                .iter()
                .map(|(&node, image)| (node, image.expr()))
                .collect(),
            marked_preserved: check.marked_preserved,
            images_are_roots: check.images_are_roots,
            injective: check.injective,
            cartan_preserved: check.cartan_preserved,
            closure_respected: check.closure_respected,
            positives_to_positives: check.positives_to_positives,
            compacts_to_compacts: check.compacts_to_compacts,
            noncompacts_to_noncompacts: check.noncompacts_to_noncompacts,
            h_to_h: check.h_to_h,
            n_to_n: check.n_to_n,
            valid: check.valid,
            witness: check.witness.clone(),
        }
    }
}

/// Outcome of the bounded backtracking search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub source: String,
    pub target: String,
    pub budget: u64,
    /// The first valid correspondence in search order, if any exists.
    pub found: Option<MapCheckReport>,
}

/// One nonzero product backing a nondegeneracy verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductWitness {
    pub u: String,
    pub w: String,
    pub product: String,
}

/// Root-level kernel of the second fundamental form against an embedded
/// tangent space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReportWire {
    pub source: String,
    pub target: String,
    pub provenance: String,
    pub kernel_basis: Vec<String>,
    pub kernel_dim: usize,
    pub verdict: String,
    pub witnesses: Vec<ProductWitness>,
    pub justification: String,
}

impl From<&KernelReport> for KernelReportWire {
    fn from(report: &KernelReport) -> Self {
        KernelReportWire {
            source: report.source.to_string(),
            target: report.target.to_string(),
            provenance: report.provenance.to_string(),
            kernel_basis: exprs(&report.kernel_basis),
            kernel_dim: report.kernel_basis.len(),
            verdict: report.verdict.to_string(),
            witnesses: report
                .witnesses
                .iter()
                .map(|w| ProductWitness {
                    u: w.u.expr(),
                    w: w.w.expr(),
                    product: w.product.expr(),
                })
                .collect(),
            justification: report.justification.clone(),
        }
    }
}

/// Non-rigidity witness for a degenerate pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReportWire {
    pub source: String,
    pub target: String,
    pub eta: String,
    pub eta_squares_to_zero: bool,
    pub eta_kills_image: bool,
    pub sub_dim: usize,
    pub ambient_dim: usize,
    pub recipe: Vec<String>,
    pub zeta_samples: usize,
    pub seed: u64,
    pub zeta_identity_holds: bool,
}

impl WitnessReportWire {
    /// All three verified properties hold.
    pub fn holds(&self) -> bool {
        self.eta_squares_to_zero && self.eta_kills_image && self.zeta_identity_holds
    }
}

impl From<&WitnessReport> for WitnessReportWire {
    fn from(report: &WitnessReport) -> Self {
        WitnessReportWire {
            source: report.source.to_string(),
            target: report.target.to_string(),
            eta: report.eta.expr(),
            eta_squares_to_zero: report.eta_squares_to_zero,
            eta_kills_image: report.eta_kills_image,
            sub_dim: report.sub_dim,
            ambient_dim: report.ambient_dim,
            recipe: report.recipe.clone(),
            zeta_samples: report.zeta_samples,
            seed: report.seed,
            zeta_identity_holds: report.zeta_identity_holds,
        }
    }
}

/// Seeded rank and membership check of one coordinate embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCheckWire {
    pub source: String,
    pub target: String,
    pub samples: usize,
    pub seed: u64,
    pub rank_factor: usize,
    pub rank_respected: bool,
    pub membership_respected: bool,
}

impl From<&RankCheckReport> for RankCheckWire {
    fn from(report: &RankCheckReport) -> Self {
        RankCheckWire {
            source: report.source.to_string(),
            target: report.target.to_string(),
            samples: report.samples,
            seed: report.seed,
            rank_factor: report.rank_factor,
            rank_respected: report.rank_respected,
            membership_respected: report.membership_respected,
        }
    }
}

/// One seeded sample pushed through a coordinate embedding. Matrix points
/// keep their library wire form (shape tag plus rational entry strings).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedReport {
    pub source: String,
    pub target: String,
    pub seed: u64,
    pub sample: MatrixPoint,
    pub embedded: MatrixPoint,
    pub sample_rank: usize,
    pub embedded_rank: usize,
    pub sample_in_vmrt: bool,
    pub embedded_in_vmrt: bool,
}

impl From<&EmbedSample> for EmbedReport {
    fn from(sample: &EmbedSample) -> Self {
        EmbedReport {
            source: sample.source.to_string(),
            target: sample.target.to_string(),
            seed: sample.seed,
            sample: sample.sample.clone(),
            embedded: sample.embedded.clone(),
            sample_rank: sample.sample_rank,
            embedded_rank: sample.embedded_rank,
            sample_in_vmrt: sample.sample_in_vmrt,
            embedded_in_vmrt: sample.embedded_in_vmrt,
        }
    }
}

/// Coordinate-model kernel verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelKernelWire {
    pub source: String,
    pub target: String,
    pub model: String,
    pub form: Option<String>,
    pub ambient_dim: usize,
    pub sub_dim: usize,
    pub kernel_dim: usize,
    pub kernel_basis: Vec<Vec<String>>,
    pub verdict: String,
    pub witnesses: Vec<ProductWitness>,
}

impl From<&ModelKernelReport> for ModelKernelWire {
    fn from(report: &ModelKernelReport) -> Self {
        ModelKernelWire {
            source: report.source.to_string(),
            target: report.target.to_string(),
            model: report.model.clone(),
            form: report.form.clone(),
            ambient_dim: report.ambient_dim,
            sub_dim: report.sub_dim,
            kernel_dim: report.kernel_dim,
            kernel_basis: report.kernel_basis.clone(),
            verdict: report.verdict.to_string(),
            witnesses: report
                .witnesses
                .iter()
                .map(|w| ProductWitness {
                    u: w.u.clone(),
                    w: w.w.clone(),
                    product: w.product.clone(),
                })
                .collect(),
        }
    }
}

/// One factorization query of a truncated total Chern class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernRow {
    /// Coefficients of 1 + c1 d + c2 d^2 + c3 d^3 + c4 d^4.
    pub class: Vec<i64>,
    pub split: (usize, usize),
    /// Leading-1 coefficient vectors of both factors, when a
    /// factorization exists.
    pub factors: Option<(Vec<i64>, Vec<i64>)>,
}

/// The embedded factorization queries: the class that obstructs a split
/// tangent sequence at both admissible splits, and one control class that
/// does factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernReport {
    pub rows: Vec<ChernRow>,
}

impl ChernReport {
    pub fn collect() -> Self {
        let queries = [
            ([1i64, 1, 1, 1, 1], (2usize, 2usize)),
            ([1, 1, 1, 1, 1], (1, 3)),
            ([1, 2, 1, 0, 0], (1, 1)),
        ];
        let rows = queries
            .into_iter()
            .map(|(coeffs, split)| {
                let class = ChernPoly::new(coeffs).expect("constant coefficient is 1");
                ChernRow {
                    class: coeffs.to_vec(),
                    split,
                    factors: chern_factor_search(&class, split),
                }
            })
            .collect();
        ChernReport { rows }
    }
}
