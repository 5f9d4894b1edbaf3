//! Limit groups built from free groups by cyclic splittings, their index-p
//! normal subgroups, and rational rank computations.

pub mod abelian;
pub mod cases;
pub mod corpus;
pub mod dsl;
pub mod expr;
pub mod fixtures;
pub mod presentation;
pub mod rank;
pub mod selftest;
pub mod subgroup;
pub mod word;

pub use abelian::{abelian_invariants, rational_rank, AbelianInvariants, IntMatrix, SmithForm};
pub use cases::{case_rank_audit, classify_bass_serre_case, AuditRecord, CaseLabel, CaseTag};
pub use dsl::{parse_dsl, render, Session};
pub use expr::{ExprError, GroupExpr, Node};
pub use presentation::Presentation;
pub use rank::{structural_rank, verify_theorem_a, RankReport};
pub use subgroup::{enumerate_index_p_kernels, subgroup_presentation, HomToZp, SubgroupPresentation};
pub use word::{Alphabet, Word, WordError};
