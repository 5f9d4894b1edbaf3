//! How an index-p kernel acts on the Bass–Serre tree of a one-edge
//! splitting, and Mayer–Vietoris rank audits for each orbit pattern.
//!
//! Each audit recomputes `rk_Q(U)` from the quotient graph of groups:
//! vertex groups are ranks of kernels in the factors (or the factors
//! themselves), and edge contributions are the rank of the matrix whose
//! columns are the images of coset-conjugated edge words, rewritten into
//! the vertex subgroups' Schreier generators and projected to `H_1(-, Q)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::abelian::{rank_of_vectors, rational_rank, RationalHomology};
use crate::expr::{GroupExpr, Node};
use crate::subgroup::{
    presentation_from_rewriting, subgroup_rational_rank, CosetRewriting, HomToZp, SubgroupError,
};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaseError {
    #[error("expression is not an amalgam, free product or HNN extension")]
    NotOneEdgeSplitting,
    #[error(transparent)]
    Subgroup(#[from] SubgroupError),
    #[error("rank audit failed: {0}")]
    AuditFailure(Box<AuditRecord>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    I1,
    I2a,
    I2b,
    I2c,
    II1,
    II2a,
    II2b,
}

impl CaseTag {
    pub const ALL: [CaseTag; 7] = [
        CaseTag::I1,
        CaseTag::I2a,
        CaseTag::I2b,
        CaseTag::I2c,
        CaseTag::II1,
        CaseTag::II2a,
        CaseTag::II2b,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::I1 => "I.1",
            CaseTag::I2a => "I.2a",
            CaseTag::I2b => "I.2b",
            CaseTag::I2c => "I.2c",
            CaseTag::II1 => "II.1",
            CaseTag::II2a => "II.2a",
            CaseTag::II2b => "II.2b",
        }
    }

    pub fn is_equality_case(self) -> bool {
        matches!(self, CaseTag::I2b | CaseTag::I2c | CaseTag::II2a | CaseTag::II2b)
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for CaseTag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Tag plus the number of `U`-orbits on each vertex class and on edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseLabel {
    pub tag: CaseTag,
    pub vertex_orbits: Vec<u64>,
    pub edge_orbits: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditStatus {
    Equal,
    BoundSatisfied,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditRecord {
    pub case: CaseTag,
    pub predicted: usize,
    pub oracle: usize,
    pub auxiliary: BTreeMap<&'static str, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<(usize, usize)>,
    pub status: AuditStatus,
}

impl fmt::Display for AuditRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "case {}: predicted {} oracle {}",
            self.case, self.predicted, self.oracle
        )?;
        if let Some((lo, hi)) = self.bound {
            write!(f, " bound [{lo}, {hi}]")?;
        }
        Ok(())
    }
}

/// Which transversal the factor kernels use inside an audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransversalChoice {
    Canonical,
    Randomized(u64),
}

enum SplitKind<'a> {
    Amalgam {
        left: &'a GroupExpr,
        right: &'a GroupExpr,
        wl: Word,
        wr: Word,
    },
    Hnn {
        base: &'a GroupExpr,
        w1: &'a Word,
        w2: &'a Word,
    },
}

fn splitting(e: &GroupExpr) -> Result<SplitKind<'_>, CaseError> {
    let kind = match e.node() {
        Node::CyclicAmalgam {
            left,
            right,
            left_word,
            right_word,
        } => SplitKind::Amalgam {
            left,
            right,
            wl: left_word.word.clone(),
            wr: right_word.word.clone(),
        },
        Node::FreeProduct { left, right } => SplitKind::Amalgam {
            left,
            right,
            wl: Word::identity(),
            wr: Word::identity(),
        },
        Node::CyclicHnn { base, word, image } => SplitKind::Hnn {
            base,
            w1: &word.word,
            w2: &image.word,
        },
        _ => return Err(CaseError::NotOneEdgeSplitting),
    };
    Ok(kind)
}

pub fn classify_bass_serre_case(e: &GroupExpr, h: &HomToZp) -> Result<CaseLabel, CaseError> {
    let p = h.p;
    let orbits = |surjects: bool| if surjects { 1 } else { p };
    let label = match splitting(e)? {
        SplitKind::Amalgam { left, right, wl, .. } => {
            let nl = left.generator_count();
            let hl = h.restrict(0..nl);
            let hr = h.restrict(nl..nl + right.generator_count());
            let edge = hl.as_ref().is_some_and(|hl| hl.eval(&wl) != 0);
            let tag = if edge {
                CaseTag::I1
            } else {
                match (hl.is_some(), hr.is_some()) {
                    (true, true) => CaseTag::I2c,
                    (true, false) | (false, true) => CaseTag::I2b,
                    // ψ vanishes on generating factors only if ψ = 0.
                    (false, false) => CaseTag::I2a,
                }
            };
            CaseLabel {
                tag,
                vertex_orbits: vec![orbits(hl.is_some()), orbits(hr.is_some())],
                edge_orbits: orbits(edge),
            }
        }
        SplitKind::Hnn { base, w1, .. } => {
            let hb = h.restrict(0..base.generator_count());
            let edge = hb.as_ref().is_some_and(|hb| hb.eval(w1) != 0);
            let tag = match (edge, hb.is_some()) {
                (true, _) => CaseTag::II1,
                (false, true) => CaseTag::II2a,
                (false, false) => CaseTag::II2b,
            };
            CaseLabel {
                tag,
                vertex_orbits: vec![orbits(hb.is_some())],
                edge_orbits: orbits(edge),
            }
        }
    };
    Ok(label)
}

/// Kernel of `ψ` restricted to a factor, with `H_1(-, Q)` coordinates.
struct FactorKernel {
    rewriting: CosetRewriting,
    homology: RationalHomology,
}

impl FactorKernel {
    fn new(
        factor: &GroupExpr,
        h: &HomToZp,
        choice: TransversalChoice,
        salt: u64,
    ) -> Result<Self, CaseError> {
        let g = factor.presentation();
        let rewriting = match choice {
            TransversalChoice::Canonical => CosetRewriting::canonical(g, h)?,
            TransversalChoice::Randomized(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
                CosetRewriting::randomized(g, h, &mut rng)?
            }
        };
        let presentation = presentation_from_rewriting(g, &rewriting)?;
        Ok(Self {
            homology: RationalHomology::of(&presentation),
            rewriting,
        })
    }

    fn rank(&self) -> usize {
        self.homology.dimension()
    }

    fn transversal(&self, i: u64) -> &Word {
        &self.rewriting.transversal[i as usize]
    }

    fn class(&self, w: &Word) -> Result<Vec<BigInt>, CaseError> {
        Ok(self.homology.project(&self.rewriting.rewrite_abelianized(w)?))
    }
}

fn class_in(g: &GroupExpr, rh: &RationalHomology, w: &Word) -> Vec<BigInt> {
    rh.project(&w.abelianized(g.generator_count()))
}

fn neg(v: Vec<BigInt>) -> Vec<BigInt> {
    v.into_iter().map(|x| -x).collect()
}

/// `e_k ⊗ v` in a direct sum of `copies` copies.
fn placed(copies: usize, k: usize, v: &[BigInt]) -> Vec<BigInt> {
    let d = v.len();
    let mut out = vec![BigInt::from(0); copies * d];
    out[k * d..(k + 1) * d].clone_from_slice(v);
    out
}

fn add(a: Vec<BigInt>, b: &[BigInt]) -> Vec<BigInt> {
    a.into_iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn case_rank_audit(e: &GroupExpr, h: &HomToZp) -> Result<AuditRecord, CaseError> {
    case_rank_audit_with(e, h, TransversalChoice::Canonical)
}

pub fn case_rank_audit_with(
    e: &GroupExpr,
    h: &HomToZp,
    choice: TransversalChoice,
) -> Result<AuditRecord, CaseError> {
    let label = classify_bass_serre_case(e, h)?;
    let oracle = subgroup_rational_rank(e.presentation(), h)?;
    let p = h.p;
    let pu = p as usize;
    let mut auxiliary = BTreeMap::new();
    let mut bound = None;
    let predicted = match (splitting(e)?, label.tag) {
        (SplitKind::Amalgam { left, right, wl, wr }, tag) => {
            let nl = left.generator_count();
            let hl = h.restrict(0..nl);
            let hr = h.restrict(nl..nl + right.generator_count());
            match tag {
                CaseTag::I1 => {
                    let u1 = FactorKernel::new(left, hl.as_ref().expect("surjects"), choice, 1)?;
                    let u2 = FactorKernel::new(right, hr.as_ref().expect("surjects"), choice, 2)?;
                    let c1 = u1.class(&wl.pow(p as i64))?;
                    let c2 = u2.class(&wr.pow(p as i64))?;
                    let rho = usize::from(rank_of_vectors(&[c1.into_iter().chain(c2).collect()]) > 0);
                    auxiliary.insert("rho", rho);
                    let (r1, r2) = (u1.rank(), u2.rank());
                    bound = Some(((r1 + r2).saturating_sub(1), r1 + r2));
                    r1 + r2 - rho
                }
                CaseTag::I2b => {
                    let left_inside = hl.is_none();
                    let (g_in, w_in, g_out, w_out, h_out) = if left_inside {
                        (left, &wl, right, &wr, hr.as_ref().expect("surjects"))
                    } else {
                        (right, &wr, left, &wl, hl.as_ref().expect("surjects"))
                    };
                    let rh_in = RationalHomology::of(g_in.presentation());
                    let u_out = FactorKernel::new(g_out, h_out, choice, 3)?;
                    let v_in = class_in(g_in, &rh_in, w_in);
                    let mut columns = Vec::with_capacity(pu);
                    for i in 0..p {
                        let r = u_out.transversal(i);
                        let mut col = placed(pu, i as usize, &v_in);
                        col.extend(neg(u_out.class(&w_out.conjugate_by(r))?));
                        columns.push(col);
                    }
                    let delta = rank_of_vectors(&columns);
                    auxiliary.insert("delta", delta);
                    pu * rh_in.dimension() + u_out.rank() - delta
                }
                CaseTag::I2c => {
                    let u1 = FactorKernel::new(left, hl.as_ref().expect("surjects"), choice, 4)?;
                    let u2 = FactorKernel::new(right, hr.as_ref().expect("surjects"), choice, 5)?;
                    let mut columns = Vec::with_capacity(pu);
                    for i in 0..p {
                        let mut col = u1.class(&wl.conjugate_by(u1.transversal(i)))?;
                        col.extend(neg(u2.class(&wr.conjugate_by(u2.transversal(i)))?));
                        columns.push(col);
                    }
                    let beta = rank_of_vectors(&columns);
                    auxiliary.insert("rank_beta", beta);
                    let (r1, r2) = (u1.rank(), u2.rank());
                    bound = Some(((r1 + r2).saturating_sub(1), r1 + r2 + pu - 1));
                    r1 + r2 + pu - 1 - beta
                }
                CaseTag::I2a => unreachable!("I.2a forces the zero map"),
                _ => unreachable!("amalgam cases only"),
            }
        }
        (SplitKind::Hnn { base, w1, w2 }, tag) => {
            let nb = base.generator_count();
            let psi_t = h.images[nb];
            let hb = h.restrict(0..nb);
            match tag {
                CaseTag::II1 => {
                    let u1 = FactorKernel::new(base, hb.as_ref().expect("surjects"), choice, 6)?;
                    let x = u1.transversal(psi_t);
                    let a = u1.class(&w1.pow(p as i64))?;
                    let b = u1.class(&w2.pow(p as i64).conjugate_by(&x.inverse()))?;
                    let im = rank_of_vectors(&[add(a, &neg(b))]);
                    auxiliary.insert("im_alpha", im);
                    bound = Some((u1.rank(), u1.rank() + 1));
                    u1.rank() + 1 - im
                }
                CaseTag::II2a => {
                    let u1 = FactorKernel::new(base, hb.as_ref().expect("surjects"), choice, 7)?;
                    let mut columns = Vec::with_capacity(pu);
                    for i in 0..p {
                        let g = u1.transversal(i);
                        let y = u1.transversal((psi_t + p - i) % p);
                        let a = u1.class(&w1.conjugate_by(g))?;
                        let b = u1.class(&w2.conjugate_by(&y.inverse()))?;
                        columns.push(add(a, &neg(b)));
                    }
                    let im = rank_of_vectors(&columns);
                    auxiliary.insert("im_alpha1", im);
                    u1.rank() + pu - im
                }
                CaseTag::II2b => {
                    let rh = RationalHomology::of(base.presentation());
                    let c1 = class_in(base, &rh, w1);
                    let c2 = class_in(base, &rh, w2);
                    let columns: Vec<Vec<BigInt>> = (0..pu)
                        .map(|k| add(placed(pu, k, &c1), &neg(placed(pu, (k + pu - 1) % pu, &c2))))
                        .collect();
                    let rank = rank_of_vectors(&columns);
                    auxiliary.insert("ker_alpha1", pu - rank);
                    1 + pu * rh.dimension() - rank
                }
                _ => unreachable!("HNN cases only"),
            }
        }
    };
    let exact = predicted == oracle;
    let within = bound.is_none_or(|(lo, hi)| lo <= oracle && oracle <= hi);
    let status = match (exact && within, label.tag.is_equality_case()) {
        (false, _) => AuditStatus::Violated,
        (true, true) => AuditStatus::Equal,
        (true, false) => AuditStatus::BoundSatisfied,
    };
    let record = AuditRecord {
        case: label.tag,
        predicted,
        oracle,
        auxiliary,
        bound,
        status,
    };
    if status == AuditStatus::Violated {
        return Err(CaseError::AuditFailure(Box::new(record)));
    }
    Ok(record)
}

/// `rk_Q(G_1) <= rk_Q(G) <= rk_Q(G_1) + 1` for an HNN extension; returns
/// `(rk_Q(G_1), rk_Q(G))`, or `None` for other constructors.
pub fn hnn_sandwich(e: &GroupExpr) -> Option<(usize, usize)> {
    match e.node() {
        Node::CyclicHnn { base, .. } => Some((
            rational_rank(base.presentation()),
            rational_rank(e.presentation()),
        )),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgroup::enumerate_index_p_kernels;

    fn f(n: usize) -> GroupExpr {
        GroupExpr::free(n).unwrap()
    }

    fn w(g: &GroupExpr, s: &str) -> Word {
        Word::parse(s, g.presentation().alphabet()).unwrap()
    }

    fn double() -> GroupExpr {
        let v = w(&f(2), "a^2 b a^-1 b^-1");
        GroupExpr::cyclic_amalgam(f(2), f(2), v.clone(), v).unwrap()
    }

    fn hom(e: &GroupExpr, p: u64, images: &[u64]) -> HomToZp {
        HomToZp::new(e.presentation(), p, images.to_vec()).unwrap()
    }

    #[test]
    fn double_labels() {
        let d = double();
        let h = hom(&d, 2, &[0, 1, 0, 0]);
        let c = classify_bass_serre_case(&d, &h).unwrap();
        assert_eq!(c.tag, CaseTag::I2b);
        assert_eq!(c.vertex_orbits, vec![1, 2]);
        assert_eq!(c.edge_orbits, 2);
        let h = hom(&d, 2, &[1, 0, 1, 0]);
        assert_eq!(classify_bass_serre_case(&d, &h).unwrap().tag, CaseTag::I1);
        let a = case_rank_audit(&d, &hom(&d, 2, &[0, 1, 0, 0])).unwrap();
        assert_eq!(a.status, AuditStatus::Equal);
        assert!(a.auxiliary["delta"] <= 2);
    }

    #[test]
    fn hnn_circuit() {
        let a = w(&f(2), "a");
        let e = GroupExpr::cyclic_hnn(f(2), a.clone(), a).unwrap();
        let h = hom(&e, 2, &[0, 0, 1]);
        assert_eq!(classify_bass_serre_case(&e, &h).unwrap().tag, CaseTag::II2b);
        let r = case_rank_audit(&e, &h).unwrap();
        assert_eq!(r.predicted, r.oracle);
        assert_eq!(r.predicted, 1 + 2 * (2 - 1) + r.auxiliary["ker_alpha1"]);
        assert_eq!(hnn_sandwich(&e), Some((2, 3)));
    }

    #[test]
    fn free_product_trivial_edge() {
        let e = GroupExpr::free_product(f(1), f(1)).unwrap();
        let h = hom(&e, 2, &[1, 1]);
        let r = case_rank_audit(&e, &h).unwrap();
        assert_eq!(r.case, CaseTag::I2c);
        assert_eq!(r.oracle, 3);
        assert_eq!(r.predicted, 1 + 1 + 1);
    }

    #[test]
    fn every_case_is_audited() {
        let v = w(&f(2), "a^2 b a^-1 b^-1");
        let b_ = w(&f(2), "b");
        let exprs = vec![
            double(),
            GroupExpr::cyclic_hnn(f(2), w(&f(2), "a"), w(&f(2), "b")).unwrap(),
            GroupExpr::cyclic_hnn(f(2), v.clone(), w(&f(2), "a b a b^-1")).unwrap(),
            GroupExpr::cyclic_amalgam(f(2), f(2), b_, w(&f(2), "a b a^-1 b^-1")).unwrap(),
            GroupExpr::free_product(f(2), GroupExpr::free_abelian(2).unwrap()).unwrap(),
        ];
        let mut seen = std::collections::BTreeSet::new();
        for e in &exprs {
            for p in [2, 3] {
                for h in enumerate_index_p_kernels(e.presentation(), p).unwrap() {
                    let canonical = case_rank_audit(e, &h).unwrap();
                    let other = case_rank_audit_with(e, &h, TransversalChoice::Randomized(h.label as u64)).unwrap();
                    assert_eq!(canonical.predicted, other.predicted);
                    assert_eq!(canonical.auxiliary, other.auxiliary);
                    seen.insert(canonical.case);
                }
            }
        }
        assert!(!seen.contains(&CaseTag::I2a));
        assert_eq!(seen.len(), 6, "{seen:?}");
    }

    #[test]
    fn not_a_splitting() {
        let e = f(2);
        let h = hom(&e, 2, &[1, 0]);
        assert_eq!(classify_bass_serre_case(&e, &h), Err(CaseError::NotOneEdgeSplitting));
    }
}
