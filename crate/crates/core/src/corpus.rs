//! Seeded random constructor trees for property sweeps.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abelian::RationalHomology;
use crate::expr::{GroupExpr, Node};
use crate::word::Word;

#[derive(Debug, Clone, Copy)]
pub struct CorpusConfig {
    /// Constructor height; leaves have depth 0.
    pub max_depth: usize,
    pub max_rank: usize,
    pub max_word_len: usize,
    /// Upper bound on the generator count of the synthesized presentation.
    pub max_generators: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            max_depth: 3,
            max_rank: 3,
            max_word_len: 6,
            max_generators: 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Extension,
    Amalgam,
    Hnn,
    Product,
}

pub struct TreeGenerator {
    rng: ChaCha8Rng,
    config: CorpusConfig,
}

impl TreeGenerator {
    pub fn new(seed: u64, config: CorpusConfig) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            config,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Any tree, abelian leaves included.
    pub fn tree(&mut self) -> GroupExpr {
        let depth = self.rng.random_range(0..=self.config.max_depth);
        self.tree_of_depth(depth)
    }

    /// A tree whose root is an amalgam, free product or HNN extension.
    pub fn splitting(&mut self) -> GroupExpr {
        loop {
            let depth = self.rng.random_range(1..=self.config.max_depth.max(1));
            let shape = *[Shape::Amalgam, Shape::Hnn, Shape::Product]
                .choose(&mut self.rng)
                .expect("nonempty");
            if let Some(e) = self.build(shape, depth) {
                return e;
            }
        }
    }

    /// `(base, centralized word, m)` for an extension of centralizers over a
    /// non-abelian base.
    pub fn extension_instance(&mut self) -> (GroupExpr, Word, usize) {
        loop {
            let depth = self.rng.random_range(0..self.config.max_depth);
            let base = self.tree_of_depth(depth);
            if base.is_abelian() {
                continue;
            }
            let m = self.rng.random_range(1..=self.config.max_rank);
            if base.generator_count() + m > self.config.max_generators {
                continue;
            }
            if let Some(c) = self.edge_word(&base) {
                if GroupExpr::ext_centralizer(base.clone(), c.clone(), m).is_ok() {
                    return (base, c, m);
                }
            }
        }
    }

    fn tree_of_depth(&mut self, depth: usize) -> GroupExpr {
        loop {
            if depth == 0 {
                return self.leaf();
            }
            let shape = *[Shape::Extension, Shape::Amalgam, Shape::Hnn, Shape::Product]
                .choose(&mut self.rng)
                .expect("nonempty");
            if let Some(e) = self.build(shape, depth) {
                return e;
            }
        }
    }

    fn leaf(&mut self) -> GroupExpr {
        let n = self.rng.random_range(1..=self.config.max_rank);
        if self.rng.random_bool(0.7) {
            GroupExpr::free(n).expect("positive rank")
        } else {
            GroupExpr::free_abelian(n).expect("positive rank")
        }
    }

    /// Builds a node of exactly the given depth, or `None` when the random
    /// choices are rejected by a constructor or exceed the generator cap.
    fn build(&mut self, shape: Shape, depth: usize) -> Option<GroupExpr> {
        let cap = self.config.max_generators;
        let sub = |gen: &mut Self, exact: bool| {
            let d = if exact { depth - 1 } else { gen.rng.random_range(0..depth) };
            gen.tree_of_depth(d)
        };
        let e = match shape {
            Shape::Extension | Shape::Hnn => {
                let base = sub(self, true);
                if base.is_abelian() {
                    return None;
                }
                if shape == Shape::Extension {
                    let m = self.rng.random_range(1..=self.config.max_rank);
                    if base.generator_count() + m > cap {
                        return None;
                    }
                    let c = self.edge_word(&base)?;
                    GroupExpr::ext_centralizer(base, c, m).ok()?
                } else {
                    if base.generator_count() + 1 > cap {
                        return None;
                    }
                    let w1 = self.edge_word(&base)?;
                    let w2 = self.edge_word(&base)?;
                    GroupExpr::cyclic_hnn(base, w1, w2).ok()?
                }
            }
            Shape::Amalgam | Shape::Product => {
                let swap = self.rng.random_bool(0.5);
                let (mut left, mut right) = (sub(self, true), sub(self, false));
                if swap {
                    std::mem::swap(&mut left, &mut right);
                }
                if left.generator_count() + right.generator_count() > cap {
                    return None;
                }
                if shape == Shape::Product {
                    GroupExpr::free_product(left, right).ok()?
                } else {
                    let wl = self.edge_word(&left)?;
                    let wr = self.edge_word(&right)?;
                    GroupExpr::cyclic_amalgam(left, right, wl, wr).ok()?
                }
            }
        };
        Some(e)
    }

    /// A random reduced word of length `1..=max_word_len`. Outside free and
    /// free abelian factors, where maximality cannot be checked, the word
    /// must be cyclically reduced, not a proper power, and nonzero in
    /// `H_1(-, Q)`.
    fn edge_word(&mut self, factor: &GroupExpr) -> Option<Word> {
        let n = factor.generator_count();
        for _ in 0..20 {
            let len = self.rng.random_range(1..=self.config.max_word_len);
            let raw: Vec<(usize, i64)> = (0..len)
                .map(|_| (self.rng.random_range(0..n), if self.rng.random_bool(0.5) { 1 } else { -1 }))
                .collect();
            let w = Word::reduce(raw);
            if w.is_identity() {
                continue;
            }
            match factor.node() {
                Node::Free(_) | Node::FreeAbelian(_) => return Some(w),
                _ => {
                    let (core, conj) = w.cyclic_reduce();
                    let primitive = core.primitive_root().map(|(_, k)| k == 1).unwrap_or(false);
                    let visible = RationalHomology::of(factor.presentation()).is_nonzero(&w.abelianized(n));
                    if conj.is_identity() && primitive && visible {
                        return Some(w);
                    }
                }
            }
        }
        None
    }
}

/// `count` trees from `seed`.
pub fn random_corpus(seed: u64, count: usize, config: CorpusConfig) -> Vec<GroupExpr> {
    let mut g = TreeGenerator::new(seed, config);
    (0..count).map(|_| g.tree()).collect()
}

/// `count` one-edge splittings from `seed`.
pub fn random_splittings(seed: u64, count: usize, config: CorpusConfig) -> Vec<GroupExpr> {
    let mut g = TreeGenerator::new(seed, config);
    (0..count).map(|_| g.splitting()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_within_limits() {
        let cfg = CorpusConfig::default();
        let a = random_corpus(5, 60, cfg);
        let b = random_corpus(5, 60, cfg);
        assert_eq!(a, b);
        for e in &a {
            assert!(e.depth() <= cfg.max_depth);
            assert!(e.generator_count() <= cfg.max_generators.max(cfg.max_rank));
        }
        assert!(a.iter().any(|e| e.depth() == 3));
        for e in random_splittings(9, 30, cfg) {
            assert!(e.is_one_edge_splitting());
        }
    }
}
