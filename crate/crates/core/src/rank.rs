//! Structural rank formulas for the constructors and the index-p rank
//! verifier built on top of the Reidemeister–Schreier oracle.

use serde::Serialize;
use thiserror::Error;

use crate::abelian::{abelian_invariants, AbelianInvariants, RationalHomology};
use crate::presentation::Presentation;
use crate::cases::{case_rank_audit, classify_bass_serre_case, AuditRecord, CaseError, CaseLabel};
use crate::expr::{GroupExpr, Node};
use crate::subgroup::{enumerate_index_p_kernels, subgroup_presentation, HomToZp, SubgroupError};
use crate::word::Word;

pub type InvariantsFn = fn(&Presentation) -> AbelianInvariants;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankError {
    #[error(transparent)]
    Subgroup(#[from] SubgroupError),
    #[error(transparent)]
    Case(#[from] CaseError),
    #[error("rank inequality violated for kernel {label} ({images:?}): rk_Q(U) = {subgroup_rank} but rk_Q(G) = {group_rank}")]
    TheoremViolation {
        label: usize,
        images: Vec<u64>,
        subgroup_rank: usize,
        group_rank: usize,
    },
    #[error("structural rank {structural} disagrees with the Smith form rank {oracle}")]
    StructuralMismatch { structural: usize, oracle: usize },
}

/// `1` when the edge group survives in `H_1` of either factor.
pub fn rho_amalgam(left: &GroupExpr, right: &GroupExpr, wl: &Word, wr: &Word) -> usize {
    let nonzero = |g: &GroupExpr, w: &Word| {
        RationalHomology::of(g.presentation()).is_nonzero(&w.abelianized(g.generator_count()))
    };
    usize::from(nonzero(left, wl) || nonzero(right, wr))
}

/// `1` when `w1 w2⁻¹` vanishes in `H_1(base, Q)`, `0` otherwise.
pub fn rho_hnn(base: &GroupExpr, w1: &Word, w2: &Word) -> usize {
    let n = base.generator_count();
    let d: Vec<i64> = w1
        .abelianized(n)
        .iter()
        .zip(w2.abelianized(n))
        .map(|(a, b)| a - b)
        .collect();
    usize::from(!RationalHomology::of(base.presentation()).is_nonzero(&d))
}

pub fn structural_rank(e: &GroupExpr) -> usize {
    match e.node() {
        Node::Free(n) | Node::FreeAbelian(n) => *n,
        Node::ExtCentralizer { base, m, .. } => structural_rank(base) + m,
        Node::CyclicAmalgam {
            left,
            right,
            left_word,
            right_word,
        } => {
            structural_rank(left) + structural_rank(right)
                - rho_amalgam(left, right, &left_word.word, &right_word.word)
        }
        Node::CyclicHnn { base, word, image } => {
            structural_rank(base) + rho_hnn(base, &word.word, &image.word)
        }
        Node::FreeProduct { left, right } => structural_rank(left) + structural_rank(right),
    }
}

/// Rank of an index-`index` subgroup of a free group of rank `d`.
pub fn nielsen_schreier_rank(d: usize, index: usize) -> usize {
    assert!(d >= 1 && index >= 1, "rank and index must be positive");
    index * (d - 1) + 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelRank {
    pub hom: HomToZp,
    pub generators: usize,
    pub relators: usize,
    pub subgroup_rank: usize,
    pub margin: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<CaseLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditRecord>,
}

/// `d(U) >= rk_Q(U) > rk_Q(G) = d(G)`, stated when `d(G)` is known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorBound {
    pub generators_of_group: usize,
    pub min_subgroup_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub p: u64,
    pub group_rank: usize,
    pub structural_rank: usize,
    pub exempt: bool,
    pub kernels: Vec<KernelRank>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator_bound: Option<GeneratorBound>,
    pub warnings: Vec<String>,
}

impl RankReport {
    pub fn min_margin(&self) -> Option<i64> {
        self.kernels.iter().map(|k| k.margin).min()
    }

    pub fn min_subgroup_rank(&self) -> Option<usize> {
        self.kernels.iter().map(|k| k.subgroup_rank).min()
    }
}

pub fn premise_warnings(e: &GroupExpr) -> Vec<String> {
    match e.unverified_edges() {
        0 => Vec::new(),
        k => vec![format!(
            "unverified limit-group premise: {k} edge word(s) taken as maximal cyclic without proof"
        )],
    }
}

/// Computes `rk_Q(U)` for every index-p normal subgroup `U` and checks
/// `rk_Q(U) > rk_Q(G)` unless `G` is abelian. One-edge splittings also get
/// their case label and rank audit.
pub fn verify_theorem_a(e: &GroupExpr, p: u64) -> Result<RankReport, RankError> {
    verify_theorem_a_with(e, p, abelian_invariants)
}

/// [`verify_theorem_a`] with a caller-supplied abelianization routine for
/// both `G` and every kernel.
pub fn verify_theorem_a_with(
    e: &GroupExpr,
    p: u64,
    invariants: InvariantsFn,
) -> Result<RankReport, RankError> {
    let g = e.presentation();
    let group_rank = invariants(g).free_rank;
    let structural = structural_rank(e);
    if structural != group_rank {
        return Err(RankError::StructuralMismatch {
            structural,
            oracle: group_rank,
        });
    }
    let exempt = e.is_abelian();
    let splitting = e.is_one_edge_splitting();
    let mut kernels = Vec::new();
    for h in enumerate_index_p_kernels(g, p)? {
        let s = subgroup_presentation(g, &h)?;
        let subgroup_rank = invariants(&s.presentation).free_rank;
        let margin = subgroup_rank as i64 - group_rank as i64;
        if !exempt && margin < 1 {
            return Err(RankError::TheoremViolation {
                label: h.label,
                images: h.images.clone(),
                subgroup_rank,
                group_rank,
            });
        }
        let (case, audit) = if splitting {
            (
                Some(classify_bass_serre_case(e, &h)?),
                Some(case_rank_audit(e, &h)?),
            )
        } else {
            (None, None)
        };
        kernels.push(KernelRank {
            generators: s.presentation.generator_count(),
            relators: s.presentation.relator_count(),
            hom: h,
            subgroup_rank,
            margin,
            case,
            audit,
        });
    }
    let generator_bound = (e.is_centralizer_tower() && !exempt && !kernels.is_empty()).then(|| {
        GeneratorBound {
            generators_of_group: e.generator_count(),
            min_subgroup_rank: kernels.iter().map(|k| k.subgroup_rank).min().unwrap_or(0),
        }
    });
    Ok(RankReport {
        p,
        group_rank,
        structural_rank: structural,
        exempt,
        kernels,
        generator_bound,
        warnings: premise_warnings(e),
    })
}
