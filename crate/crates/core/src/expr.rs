//! Constructor AST for limit groups.
//!
//! Every [`GroupExpr`] is validated when it is built and carries its
//! synthesized [`Presentation`]. Generator names follow a fixed scheme:
//! free bases use `a, b, c, ...`, the two factors of an amalgam or free
//! product get the suffixes `1` and `2`, and stable letters are fresh
//! `t` / `t1, t2, ...` symbols.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Rational64;
use thiserror::Error;

use crate::presentation::Presentation;
use crate::word::{Alphabet, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("extension multiplicity m must be at least 1")]
    ZeroMultiplicity,
    #[error("edge words must be nonempty; use a free product for a trivial edge group")]
    EmptyEdgeWord,
    #[error("edge word `{word}` does not generate a maximal cyclic subgroup (it is a {multiplicity}-th power)")]
    NotMaximalCyclic { word: String, multiplicity: u64 },
    #[error("edge word `{0}` is not primitive in the free abelian factor")]
    NotPrimitiveInAbelian(String),
    #[error("degenerate splitting: edge word `{0}` generates the infinite cyclic factor, so the amalgam is isomorphic to the other factor")]
    DegenerateSplitting(String),
    #[error("{0}: every vertex group is abelian, which yields Euler characteristic 0 for a non-abelian group")]
    AbelianVertexGroups(&'static str),
}

/// How maximality of a cyclic edge group was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Maximality {
    /// Checked: not a proper power in a free factor, or primitive in a free abelian one.
    Certified,
    /// Accepted without proof; the ambient factor is neither free nor free abelian.
    Asserted,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeWord {
    pub word: Word,
    pub maximality: Maximality,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Free(usize),
    FreeAbelian(usize),
    ExtCentralizer {
        base: GroupExpr,
        centralized: EdgeWord,
        m: usize,
    },
    CyclicAmalgam {
        left: GroupExpr,
        right: GroupExpr,
        left_word: EdgeWord,
        right_word: EdgeWord,
    },
    CyclicHnn {
        base: GroupExpr,
        word: EdgeWord,
        image: EdgeWord,
    },
    FreeProduct {
        left: GroupExpr,
        right: GroupExpr,
    },
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct Inner {
    node: Node,
    presentation: Presentation,
}

/// A validated limit-group constructor expression. Cheap to clone.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupExpr(Arc<Inner>);

/// Upper bound on the level of an iterated extension of centralizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelBound {
    AtMost(usize),
    Unknown,
}

impl GroupExpr {
    pub fn free(n: usize) -> Result<Self, ExprError> {
        if n == 0 {
            return Err(ExprError::ZeroRank);
        }
        let presentation = Presentation::free(Alphabet::standard(n));
        Ok(Self::wrap(Node::Free(n), presentation))
    }

    pub fn free_abelian(n: usize) -> Result<Self, ExprError> {
        if n == 0 {
            return Err(ExprError::ZeroRank);
        }
        let mut relators = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                relators.push(commutator(&Word::generator(i), &Word::generator(j)));
            }
        }
        let presentation = Presentation::new(Alphabet::standard(n), relators)?;
        Ok(Self::wrap(Node::FreeAbelian(n), presentation))
    }

    /// `base ⋆_C (C × Z^m)` with `C = ⟨centralized⟩`.
    pub fn ext_centralizer(base: GroupExpr, centralized: Word, m: usize) -> Result<Self, ExprError> {
        if m == 0 {
            return Err(ExprError::ZeroMultiplicity);
        }
        if base.is_abelian() {
            return Err(ExprError::AbelianVertexGroups("extension of centralizers of an abelian group"));
        }
        let centralized = base.edge_word(centralized)?;
        let mut presentation = base.presentation().clone();
        let stable = presentation.alphabet().fresh_indexed("t", m);
        let first = presentation.generator_count();
        for name in stable {
            presentation.alphabet_mut().push(name)?;
        }
        for i in 0..m {
            let t = Word::generator(first + i);
            presentation.push_relator(commutator(&t, &centralized.word));
        }
        for i in 0..m {
            for j in i + 1..m {
                presentation.push_relator(commutator(
                    &Word::generator(first + i),
                    &Word::generator(first + j),
                ));
            }
        }
        Ok(Self::wrap(
            Node::ExtCentralizer {
                base,
                centralized,
                m,
            },
            presentation,
        ))
    }

    /// `left ⋆_{left_word = right_word} right`.
    pub fn cyclic_amalgam(
        left: GroupExpr,
        right: GroupExpr,
        left_word: Word,
        right_word: Word,
    ) -> Result<Self, ExprError> {
        let left_word = left.edge_word(left_word)?;
        let right_word = right.edge_word(right_word)?;
        left.reject_degenerate_factor(&left_word)?;
        right.reject_degenerate_factor(&right_word)?;
        if left.is_abelian() && right.is_abelian() {
            return Err(ExprError::AbelianVertexGroups("amalgam of two abelian groups"));
        }
        let mut presentation = left.presentation().disjoint_union(
            left.presentation().alphabet().suffixed("1"),
            right.presentation(),
            right.presentation().alphabet().suffixed("2"),
        )?;
        let offset = left.generator_count();
        presentation.push_relator(
            left_word
                .word
                .concat(&right_word.word.shifted(offset).inverse()),
        );
        Ok(Self::wrap(
            Node::CyclicAmalgam {
                left,
                right,
                left_word,
                right_word,
            },
            presentation,
        ))
    }

    /// `⟨base, t | t·word·t⁻¹ = image⟩`.
    pub fn cyclic_hnn(base: GroupExpr, word: Word, image: Word) -> Result<Self, ExprError> {
        if base.is_abelian() {
            return Err(ExprError::AbelianVertexGroups("HNN extension of an abelian group"));
        }
        let word = base.edge_word(word)?;
        let image = base.edge_word(image)?;
        let mut presentation = base.presentation().clone();
        let t_name = presentation.alphabet().fresh("t");
        let t = presentation.alphabet_mut().push(t_name)?;
        presentation.push_relator(
            word.word
                .conjugate_by(&Word::generator(t))
                .concat(&image.word.inverse()),
        );
        Ok(Self::wrap(Node::CyclicHnn { base, word, image }, presentation))
    }

    pub fn free_product(left: GroupExpr, right: GroupExpr) -> Result<Self, ExprError> {
        let presentation = left.presentation().disjoint_union(
            left.presentation().alphabet().suffixed("1"),
            right.presentation(),
            right.presentation().alphabet().suffixed("2"),
        )?;
        Ok(Self::wrap(Node::FreeProduct { left, right }, presentation))
    }

    fn wrap(node: Node, presentation: Presentation) -> Self {
        Self(Arc::new(Inner { node, presentation }))
    }

    /// Validates an edge word living in `self` and certifies maximality where decidable.
    fn edge_word(&self, word: Word) -> Result<EdgeWord, ExprError> {
        let alphabet = self.presentation().alphabet();
        if let Some(index) = word.max_generator().filter(|&g| g >= alphabet.len()) {
            return Err(WordError::InvalidGenerator {
                index,
                len: alphabet.len(),
            }
            .into());
        }
        if word.is_identity() {
            return Err(ExprError::EmptyEdgeWord);
        }
        let maximality = match self.node() {
            Node::Free(_) => {
                let (_, multiplicity) = word.primitive_root()?;
                if multiplicity != 1 {
                    return Err(ExprError::NotMaximalCyclic {
                        word: word.display(alphabet).to_string(),
                        multiplicity,
                    });
                }
                Maximality::Certified
            }
            Node::FreeAbelian(_) => {
                let g = word
                    .abelianized(alphabet.len())
                    .iter()
                    .fold(0i64, |acc, &x| acc.gcd(&x));
                if g != 1 {
                    return Err(ExprError::NotPrimitiveInAbelian(
                        word.display(alphabet).to_string(),
                    ));
                }
                Maximality::Certified
            }
            _ => Maximality::Asserted,
        };
        Ok(EdgeWord { word, maximality })
    }

    fn reject_degenerate_factor(&self, edge: &EdgeWord) -> Result<(), ExprError> {
        let rank_one = matches!(self.node(), Node::Free(1) | Node::FreeAbelian(1));
        if rank_one && edge.word.abelianized(1)[0].abs() == 1 {
            return Err(ExprError::DegenerateSplitting(
                edge.word.display(self.presentation().alphabet()).to_string(),
            ));
        }
        Ok(())
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn presentation(&self) -> &Presentation {
        &self.0.presentation
    }

    pub fn generator_count(&self) -> usize {
        self.presentation().generator_count()
    }

    /// True exactly for `Free(1)` and `FreeAbelian(n)`; every other accepted
    /// constructor yields a non-abelian group.
    pub fn is_abelian(&self) -> bool {
        matches!(self.node(), Node::Free(1) | Node::FreeAbelian(_))
    }

    pub fn euler_characteristic(&self) -> Rational64 {
        match self.node() {
            Node::Free(n) => Rational64::from_integer(1 - *n as i64),
            Node::FreeAbelian(_) => Rational64::from_integer(0),
            // χ(C × Z^m) = χ(C) = 0
            Node::ExtCentralizer { base, .. } => base.euler_characteristic(),
            // χ(C) = 0 for infinite cyclic C
            Node::CyclicAmalgam { left, right, .. } => {
                left.euler_characteristic() + right.euler_characteristic()
            }
            Node::CyclicHnn { base, .. } => base.euler_characteristic(),
            Node::FreeProduct { left, right } => {
                left.euler_characteristic() + right.euler_characteristic() - 1
            }
        }
    }

    pub fn level_upper_bound(&self) -> LevelBound {
        match self.node() {
            Node::Free(_) => LevelBound::AtMost(0),
            Node::FreeAbelian(1) => LevelBound::AtMost(0),
            Node::FreeAbelian(_) => LevelBound::AtMost(1),
            Node::ExtCentralizer { base, .. } => match base.level_upper_bound() {
                LevelBound::AtMost(l) => LevelBound::AtMost(l + 1),
                LevelBound::Unknown => LevelBound::Unknown,
            },
            _ => LevelBound::Unknown,
        }
    }

    /// Free, free abelian, or iterated extensions of centralizers of those;
    /// for these the generator count of the presentation equals `d(G)` and
    /// the abelianization is torsion free.
    pub fn is_centralizer_tower(&self) -> bool {
        match self.node() {
            Node::Free(_) | Node::FreeAbelian(_) => true,
            Node::ExtCentralizer { base, .. } => base.is_centralizer_tower(),
            _ => false,
        }
    }

    pub fn is_one_edge_splitting(&self) -> bool {
        matches!(
            self.node(),
            Node::CyclicAmalgam { .. } | Node::CyclicHnn { .. } | Node::FreeProduct { .. }
        )
    }

    /// Number of edge words (anywhere in the tree) whose maximality is only asserted.
    pub fn unverified_edges(&self) -> usize {
        let own = |e: &EdgeWord| usize::from(e.maximality == Maximality::Asserted);
        match self.node() {
            Node::Free(_) | Node::FreeAbelian(_) => 0,
            Node::ExtCentralizer {
                base, centralized, ..
            } => own(centralized) + base.unverified_edges(),
            Node::CyclicAmalgam {
                left,
                right,
                left_word,
                right_word,
            } => own(left_word) + own(right_word) + left.unverified_edges() + right.unverified_edges(),
            Node::CyclicHnn { base, word, image } => own(word) + own(image) + base.unverified_edges(),
            Node::FreeProduct { left, right } => left.unverified_edges() + right.unverified_edges(),
        }
    }

    /// Height of the constructor tree; leaves have depth 0.
    pub fn depth(&self) -> usize {
        match self.node() {
            Node::Free(_) | Node::FreeAbelian(_) => 0,
            Node::ExtCentralizer { base, .. } | Node::CyclicHnn { base, .. } => 1 + base.depth(),
            Node::CyclicAmalgam { left, right, .. } | Node::FreeProduct { left, right } => {
                1 + left.depth().max(right.depth())
            }
        }
    }
}

/// `[x, y] = x y x⁻¹ y⁻¹`.
pub fn commutator(x: &Word, y: &Word) -> Word {
    x.concat(y).concat(&x.inverse()).concat(&y.inverse())
}

impl fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |g: &GroupExpr, w: &Word| w.display(g.presentation().alphabet()).to_string();
        match self.node() {
            Node::Free(n) => write!(f, "free({n})"),
            Node::FreeAbelian(n) => write!(f, "abelian({n})"),
            Node::ExtCentralizer {
                base,
                centralized,
                m,
            } => write!(f, "extend({base}; c = {}; m = {m})", names(base, &centralized.word)),
            Node::CyclicAmalgam {
                left,
                right,
                left_word,
                right_word,
            } => write!(
                f,
                "amalgam({left}, {right}; wl = {}; wr = {})",
                names(left, &left_word.word),
                names(right, &right_word.word)
            ),
            Node::CyclicHnn { base, word, image } => write!(
                f,
                "hnn({base}; w1 = {}; w2 = {})",
                names(base, &word.word),
                names(base, &image.word)
            ),
            Node::FreeProduct { left, right } => write!(f, "product({left}, {right})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(g: &GroupExpr, text: &str) -> Word {
        Word::parse(text, g.presentation().alphabet()).unwrap()
    }

    fn f2() -> GroupExpr {
        GroupExpr::free(2).unwrap()
    }

    fn double() -> GroupExpr {
        let v = w(&f2(), "a^2 b a^-1 b^-1");
        GroupExpr::cyclic_amalgam(f2(), f2(), v.clone(), v).unwrap()
    }

    fn chi(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn extension_presentation_matches_one_relator_form() {
        let v = w(&f2(), "a^2 b a^-1 b^-1");
        let g = GroupExpr::ext_centralizer(f2(), v.clone(), 1).unwrap();
        let p = g.presentation();
        assert_eq!(p.alphabet().names(), &["a", "b", "t1"]);
        assert_eq!(p.relator_count(), 1);
        // x3^-1 v x3 v^-1 is a cyclic rotation of the inverse of [x3, v]
        let t = Word::generator(2);
        let target = v.conjugate_by(&t.inverse()).concat(&v.inverse());
        let r = &p.relators()[0];
        let rotations_match = |x: &Word, y: &Word| {
            let xs: Vec<_> = x.letters().collect();
            let ys: Vec<_> = y.letters().collect();
            xs.len() == ys.len()
                && (0..xs.len()).any(|k| xs.iter().cycle().skip(k).take(xs.len()).eq(ys.iter()))
        };
        assert!(rotations_match(r, &target) || rotations_match(&r.inverse(), &target));
    }

    #[test]
    fn abelian_presentation() {
        let p = GroupExpr::free_abelian(2).unwrap().presentation().clone();
        assert_eq!(p.to_string(), "< a, b | a b a^-1 b^-1 >");
    }

    #[test]
    fn double_presentation_shape() {
        let p = double().presentation().clone();
        assert_eq!(p.generator_count(), 4);
        assert_eq!(p.relator_count(), 1);
        assert_eq!(p.alphabet().names(), &["a1", "b1", "a2", "b2"]);
        assert_eq!(
            p.to_string(),
            "< a1, b1, a2, b2 | a1^2 b1 a1^-1 b1^-1 b2 a2 b2^-1 a2^-2 >"
        );
    }

    #[test]
    fn hnn_presentation() {
        let g = GroupExpr::cyclic_hnn(f2(), w(&f2(), "a"), w(&f2(), "b")).unwrap();
        assert_eq!(g.presentation().to_string(), "< a, b, t | t a t^-1 b^-1 >");
    }

    #[test]
    fn extension_counts() {
        let base = double();
        let c = w(&base, "a1 b2");
        for m in 1..4 {
            let g = GroupExpr::ext_centralizer(base.clone(), c.clone(), m).unwrap();
            assert_eq!(g.generator_count(), base.generator_count() + m);
            assert_eq!(
                g.presentation().relator_count(),
                base.presentation().relator_count() + m + m * (m - 1) / 2
            );
            assert_eq!(g.euler_characteristic(), base.euler_characteristic());
        }
    }

    #[test]
    fn nested_extension_gets_fresh_stable_letters() {
        let g1 = GroupExpr::ext_centralizer(f2(), w(&f2(), "a"), 1).unwrap();
        let g2 = GroupExpr::ext_centralizer(g1.clone(), w(&g1, "b"), 2).unwrap();
        assert_eq!(g2.presentation().alphabet().names(), &["a", "b", "t1", "t2", "t3"]);
        assert_eq!(g2.level_upper_bound(), LevelBound::AtMost(2));
        assert_eq!(g2.unverified_edges(), 1);
    }

    #[test]
    fn euler_characteristic_examples() {
        assert_eq!(GroupExpr::free(3).unwrap().euler_characteristic(), chi(-2));
        assert_eq!(double().euler_characteristic(), chi(-2));
        assert_eq!(GroupExpr::free_abelian(5).unwrap().euler_characteristic(), chi(0));
        let fp = GroupExpr::free_product(GroupExpr::free(1).unwrap(), GroupExpr::free(1).unwrap()).unwrap();
        assert_eq!(fp.euler_characteristic(), chi(-1));
    }

    #[test]
    fn abelianness() {
        assert!(GroupExpr::free(1).unwrap().is_abelian());
        assert!(GroupExpr::free_abelian(2).unwrap().is_abelian());
        let v = w(&f2(), "a^2 b a^-1 b^-1");
        assert!(!GroupExpr::ext_centralizer(f2(), v, 1).unwrap().is_abelian());
    }

    #[test]
    fn level_bounds() {
        assert_eq!(GroupExpr::free(4).unwrap().level_upper_bound(), LevelBound::AtMost(0));
        assert_eq!(GroupExpr::free_abelian(3).unwrap().level_upper_bound(), LevelBound::AtMost(1));
        assert_eq!(GroupExpr::free_abelian(1).unwrap().level_upper_bound(), LevelBound::AtMost(0));
        assert_eq!(double().level_upper_bound(), LevelBound::Unknown);
    }

    #[test]
    fn rejections() {
        let z = GroupExpr::free(1).unwrap();
        let a = Word::generator(0);
        assert!(matches!(
            GroupExpr::cyclic_amalgam(z.clone(), f2(), a.clone(), w(&f2(), "a^2 b a^-1 b^-1")),
            Err(ExprError::DegenerateSplitting(_))
        ));
        assert!(matches!(
            GroupExpr::cyclic_amalgam(z.clone(), f2(), a.pow(2), w(&f2(), "a")),
            Err(ExprError::NotMaximalCyclic { multiplicity: 2, .. })
        ));
        assert!(matches!(
            GroupExpr::cyclic_amalgam(f2(), f2(), w(&f2(), "a b a b"), w(&f2(), "a")),
            Err(ExprError::NotMaximalCyclic { .. })
        ));
        assert_eq!(
            GroupExpr::cyclic_amalgam(f2(), f2(), Word::identity(), a.clone()),
            Err(ExprError::EmptyEdgeWord)
        );
        assert!(matches!(
            GroupExpr::cyclic_hnn(z.clone(), a.clone(), a.inverse()),
            Err(ExprError::AbelianVertexGroups(_))
        ));
        let z2 = GroupExpr::free_abelian(2).unwrap();
        assert!(matches!(
            GroupExpr::cyclic_amalgam(z2.clone(), z2.clone(), a.clone(), a.clone()),
            Err(ExprError::AbelianVertexGroups(_))
        ));
        assert!(matches!(
            GroupExpr::cyclic_amalgam(f2(), z2.clone(), w(&f2(), "a"), w(&z2, "a b a^-1 b^-1")),
            Err(ExprError::NotPrimitiveInAbelian(_))
        ));
        assert!(matches!(
            GroupExpr::cyclic_amalgam(f2(), f2(), Word::generator(5), a),
            Err(ExprError::Word(WordError::InvalidGenerator { index: 5, len: 2 }))
        ));
        assert_eq!(GroupExpr::free(0), Err(ExprError::ZeroRank));
    }

    #[test]
    fn maximality_flags() {
        let z2 = GroupExpr::free_abelian(2).unwrap();
        let amalgam = GroupExpr::cyclic_amalgam(f2(), z2.clone(), w(&f2(), "a b"), w(&z2, "a")).unwrap();
        assert_eq!(amalgam.unverified_edges(), 0);
        let over_double = GroupExpr::cyclic_hnn(double(), w(&double(), "a1"), w(&double(), "b2")).unwrap();
        assert_eq!(over_double.unverified_edges(), 2);
        assert_eq!(over_double.presentation().alphabet().name(4), "t");
    }
}
