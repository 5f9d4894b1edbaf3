//! Index-p normal subgroups as kernels of maps onto `Z/p`, with
//! Reidemeister–Schreier presentations over the cyclic coset space.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::abelian::{abelian_invariants, hom_space_mod_p, is_prime, AbelianError, AbelianInvariants};
use crate::presentation::Presentation;
use crate::word::{Alphabet, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubgroupError {
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("homomorphism has {got} images for {expected} generators")]
    ImageCount { expected: usize, got: usize },
    #[error("image {value} is not reduced mod {p}")]
    ImageOutOfRange { value: u64, p: u64 },
    #[error("the zero map has no index-p kernel")]
    ZeroMap,
    #[error("relator {0} does not map to zero")]
    RelatorNotKilled(usize),
    #[error("word is not in the subgroup (psi = {0})")]
    NotInSubgroup(u64),
    #[error("generator {0} has zero image and cannot carry a transversal")]
    TransversalGenerator(usize),
}

/// A surjection `G -> Z/p`, normalized so that its first nonzero image is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HomToZp {
    pub p: u64,
    pub images: Vec<u64>,
    pub label: usize,
}

impl HomToZp {
    /// Validates and normalizes `images` against `g`.
    pub fn new(g: &Presentation, p: u64, images: Vec<u64>) -> Result<Self, SubgroupError> {
        if !is_prime(p) {
            return Err(SubgroupError::NotPrime(p));
        }
        if images.len() != g.generator_count() {
            return Err(SubgroupError::ImageCount {
                expected: g.generator_count(),
                got: images.len(),
            });
        }
        if let Some(&value) = images.iter().find(|&&x| x >= p) {
            return Err(SubgroupError::ImageOutOfRange { value, p });
        }
        let Some(&lead) = images.iter().find(|&&x| x != 0) else {
            return Err(SubgroupError::ZeroMap);
        };
        for (k, row) in g.relator_vectors().iter().enumerate() {
            if dot_mod(row, &images, p) != 0 {
                return Err(SubgroupError::RelatorNotKilled(k));
            }
        }
        let inv = inverse_mod(lead, p);
        let images = images.iter().map(|&x| x * inv % p).collect();
        Ok(Self { p, images, label: 0 })
    }

    pub fn eval(&self, w: &Word) -> u64 {
        let mut s: i64 = 0;
        let p = self.p as i64;
        for &(g, e) in w.syllables() {
            s = (s + (self.images[g] as i64) * e.rem_euclid(p)) % p;
        }
        s as u64
    }

    /// The restriction to the generators in `range`, unnormalized so that
    /// coset labels agree with the parent; `None` when it vanishes.
    pub fn restrict(&self, range: std::ops::Range<usize>) -> Option<HomToZp> {
        let images = self.images[range].to_vec();
        images.iter().any(|&x| x != 0).then_some(HomToZp {
            p: self.p,
            images,
            label: self.label,
        })
    }

    pub fn first_nonzero(&self) -> usize {
        self.images.iter().position(|&x| x != 0).expect("nonzero map")
    }
}

fn dot_mod(row: &[i64], images: &[u64], p: u64) -> u64 {
    let p = p as i64;
    row.iter()
        .zip(images)
        .fold(0i64, |acc, (&r, &x)| (acc + r.rem_euclid(p) * x as i64) % p) as u64
}

pub(crate) fn inverse_mod(a: u64, p: u64) -> u64 {
    (1..p).find(|&x| a * x % p == 1).expect("unit mod p")
}

/// One normalized homomorphism per index-p normal subgroup, sorted
/// lexicographically by images and labelled by position.
pub fn enumerate_index_p_kernels(g: &Presentation, p: u64) -> Result<Vec<HomToZp>, SubgroupError> {
    let basis = hom_space_mod_p(g, p)?;
    let n = g.generator_count();
    let d = basis.len();
    let mut out = Vec::new();
    // Coefficient vectors with first nonzero coordinate 1, one per line.
    let total = p.pow(d as u32);
    for code in 0..total {
        let mut coeffs = vec![0u64; d];
        let mut c = code;
        for slot in coeffs.iter_mut().rev() {
            *slot = c % p;
            c /= p;
        }
        if coeffs.iter().find(|&&x| x != 0) != Some(&1) {
            continue;
        }
        let mut images = vec![0u64; n];
        for (k, &a) in coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (x, &b) in images.iter_mut().zip(&basis[k]) {
                *x = (*x + a * b) % p;
            }
        }
        let lead = images.iter().copied().find(|&x| x != 0).expect("basis is independent");
        let inv = inverse_mod(lead, p);
        for x in images.iter_mut() {
            *x = *x * inv % p;
        }
        out.push(HomToZp { p, images, label: 0 });
    }
    out.sort_by(|a, b| a.images.cmp(&b.images));
    out.dedup_by(|a, b| a.images == b.images);
    for (i, h) in out.iter_mut().enumerate() {
        h.label = i;
    }
    Ok(out)
}

/// Coset data for `ker ψ`. Cosets are residues mod p; generator `g` sends
/// coset `i` to `i + ψ(g)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetRewriting {
    pub p: u64,
    images: Vec<u64>,
    pub transversal: Vec<Word>,
    /// `table[i][g]`: Schreier symbol for `r_i g r_{i+ψ(g)}⁻¹`, or `None`
    /// when that element is a tree generator.
    pub schreier_table: Vec<Vec<Option<usize>>>,
    pub schreier_alphabet: Alphabet,
    /// Relators `rewrite(r_i)` required when the transversal is not prefix closed.
    transversal_relators: Vec<Word>,
}

impl CosetRewriting {
    /// Canonical Schreier transversal `r_i = g₀^{k_i}` with `ψ(g₀)^{k_i} = i`
    /// and `0 <= k_i < p`, `g₀` the first generator with nonzero image.
    pub fn canonical(parent: &Presentation, h: &HomToZp) -> Result<Self, SubgroupError> {
        let g0 = h.first_nonzero();
        let inv = inverse_mod(h.images[g0], h.p);
        let exponents: Vec<i64> = (0..h.p).map(|i| (i * inv % h.p) as i64).collect();
        Self::build(parent, h, g0, &exponents, &[], true)
    }

    /// A transversal `r_i = u_i · g₀^{e_i}` for a random generator `g₀` with
    /// nonzero image, random exponent representatives and random prefixes
    /// `u_i` in the kernel. Every table entry is kept as a generator.
    pub fn randomized<R: Rng>(
        parent: &Presentation,
        h: &HomToZp,
        rng: &mut R,
    ) -> Result<Self, SubgroupError> {
        let p = h.p;
        let candidates: Vec<usize> = (0..h.images.len()).filter(|&g| h.images[g] != 0).collect();
        let g0 = candidates[rng.random_range(0..candidates.len())];
        let inv = inverse_mod(h.images[g0], p);
        let exponents: Vec<i64> = (0..p)
            .map(|i| {
                if i == 0 {
                    return 0;
                }
                let base = (i * inv % p) as i64;
                let shift = rng.random_range(-2i64..=2);
                base + shift * p as i64
            })
            .collect();
        let n = h.images.len();
        let prefixes: Vec<Word> = (0..p)
            .map(|i| {
                if i == 0 || n == 0 {
                    return Word::identity();
                }
                let len = rng.random_range(0..4usize);
                let raw: Vec<(usize, i64)> = (0..len)
                    .map(|_| (rng.random_range(0..n), if rng.random_bool(0.5) { 1 } else { -1 }))
                    .collect();
                let u = Word::reduce(raw);
                let fix = (p - h.eval(&u)) % p * inv % p;
                u.concat(&Word::power_of(g0, fix as i64))
            })
            .collect();
        Self::build(parent, h, g0, &exponents, &prefixes, false)
    }

    fn build(
        parent: &Presentation,
        h: &HomToZp,
        g0: usize,
        exponents: &[i64],
        prefixes: &[Word],
        eliminate_tree: bool,
    ) -> Result<Self, SubgroupError> {
        if h.images[g0] == 0 {
            return Err(SubgroupError::TransversalGenerator(g0));
        }
        let p = h.p as usize;
        let n = parent.generator_count();
        let transversal: Vec<Word> = (0..p)
            .map(|i| {
                let u = prefixes.get(i).cloned().unwrap_or_default();
                u.concat(&Word::power_of(g0, exponents[i]))
            })
            .collect();
        debug_assert!(transversal
            .iter()
            .enumerate()
            .all(|(i, r)| h.eval(r) == i as u64));
        let mut table = vec![vec![None; n]; p];
        let mut names = Vec::new();
        for (i, row) in table.iter_mut().enumerate() {
            for (g, slot) in row.iter_mut().enumerate() {
                let j = (i + h.images[g] as usize) % p;
                let element = transversal[i]
                    .concat(&Word::generator(g))
                    .concat(&transversal[j].inverse());
                if eliminate_tree && element.is_identity() {
                    continue;
                }
                *slot = Some(names.len());
                names.push(format!("{}_{}", parent.alphabet().name(g), i));
            }
        }
        let mut cr = Self {
            p: h.p,
            images: h.images.clone(),
            transversal,
            schreier_table: table,
            schreier_alphabet: Alphabet::new(names)?,
            transversal_relators: Vec::new(),
        };
        if !eliminate_tree {
            let rels = cr.transversal[1..]
                .iter()
                .map(|r| cr.rewrite_path(0, r).0)
                .collect();
            cr.transversal_relators = rels;
        }
        Ok(cr)
    }

    pub fn tree_generator_count(&self) -> usize {
        self.schreier_table.iter().flatten().filter(|s| s.is_none()).count()
    }

    pub fn images(&self) -> &[u64] {
        &self.images
    }

    fn psi(&self, w: &Word) -> u64 {
        let p = self.p as i64;
        w.syllables()
            .iter()
            .fold(0i64, |acc, &(g, e)| (acc + self.images[g] as i64 * e.rem_euclid(p)) % p) as u64
    }

    /// Walks `w` from coset `start`; returns the Schreier word and the end coset.
    fn rewrite_path(&self, start: usize, w: &Word) -> (Word, usize) {
        let p = self.p as usize;
        let mut coset = start;
        let mut raw = Vec::with_capacity(w.letter_len() as usize);
        for (g, sign) in w.letters() {
            let step = self.images[g] as usize;
            if sign > 0 {
                if let Some(s) = self.schreier_table[coset][g] {
                    raw.push((s, 1));
                }
                coset = (coset + step) % p;
            } else {
                coset = (coset + p - step) % p;
                if let Some(s) = self.schreier_table[coset][g] {
                    raw.push((s, -1));
                }
            }
        }
        (Word::reduce(raw), coset)
    }

    /// Expresses `w ∈ ker ψ` in the Schreier generators.
    pub fn rewrite(&self, w: &Word) -> Result<Word, SubgroupError> {
        let v = self.psi(w);
        if v != 0 {
            return Err(SubgroupError::NotInSubgroup(v));
        }
        Ok(self.rewrite_path(0, w).0)
    }

    /// Exponent vector of `rewrite(w)` over the Schreier alphabet.
    pub fn rewrite_abelianized(&self, w: &Word) -> Result<Vec<i64>, SubgroupError> {
        Ok(self.rewrite(w)?.abelianized(self.schreier_alphabet.len()))
    }

    /// Inverse substitution: the parent-group word represented by a Schreier word.
    pub fn expand(&self, s: &Word) -> Word {
        let mut lookup = Vec::new();
        for (i, row) in self.schreier_table.iter().enumerate() {
            for (g, slot) in row.iter().enumerate() {
                if let Some(k) = slot {
                    lookup.push((*k, i, g));
                }
            }
        }
        lookup.sort_unstable();
        let p = self.p as usize;
        let element = |k: usize| {
            let (_, i, g) = lookup[k];
            let j = (i + self.images[g] as usize) % p;
            self.transversal[i]
                .concat(&Word::generator(g))
                .concat(&self.transversal[j].inverse())
        };
        s.syllables()
            .iter()
            .fold(Word::identity(), |acc, &(k, e)| acc.concat(&element(k).pow(e)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupPresentation {
    pub presentation: Presentation,
    pub hom: HomToZp,
    pub rewriting: CosetRewriting,
}

impl SubgroupPresentation {
    pub fn abelian_invariants(&self) -> AbelianInvariants {
        abelian_invariants(&self.presentation)
    }
}

/// Relators `rewrite(r_i R r_i⁻¹)` for each parent relator `R` and coset `i`.
pub fn presentation_from_rewriting(
    parent: &Presentation,
    cr: &CosetRewriting,
) -> Result<Presentation, SubgroupError> {
    let mut relators = Vec::with_capacity(cr.transversal.len() * parent.relator_count());
    for r in &cr.transversal {
        for rel in parent.relators() {
            relators.push(cr.rewrite(&rel.conjugate_by(r))?);
        }
    }
    relators.extend(cr.transversal_relators.iter().cloned());
    Ok(Presentation::new(cr.schreier_alphabet.clone(), relators)?)
}

pub fn subgroup_presentation(
    parent: &Presentation,
    h: &HomToZp,
) -> Result<SubgroupPresentation, SubgroupError> {
    let rewriting = CosetRewriting::canonical(parent, h)?;
    let presentation = presentation_from_rewriting(parent, &rewriting)?;
    Ok(SubgroupPresentation {
        presentation,
        hom: h.clone(),
        rewriting,
    })
}

pub fn subgroup_rational_rank(parent: &Presentation, h: &HomToZp) -> Result<usize, SubgroupError> {
    Ok(subgroup_presentation(parent, h)?.abelian_invariants().free_rank)
}

/// Raw relator exponent matrix of a subgroup presentation, before dropping
/// relators that reduce to the identity.
pub fn relator_rows(parent: &Presentation, cr: &CosetRewriting) -> Result<Vec<Vec<i64>>, SubgroupError> {
    let n = cr.schreier_alphabet.len();
    let mut rows = Vec::new();
    for r in &cr.transversal {
        for rel in parent.relators() {
            rows.push(cr.rewrite(&rel.conjugate_by(r))?.abelianized(n));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::GroupExpr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2() -> Presentation {
        GroupExpr::free(2).unwrap().presentation().clone()
    }

    #[test]
    fn free_rank_two_at_two() {
        let g = f2();
        let homs = enumerate_index_p_kernels(&g, 2).unwrap();
        let images: Vec<_> = homs.iter().map(|h| h.images.clone()).collect();
        assert_eq!(images, vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(homs.iter().map(|h| h.label).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn textbook_schreier_generators() {
        let g = f2();
        let h = HomToZp::new(&g, 2, vec![1, 0]).unwrap();
        let cr = CosetRewriting::canonical(&g, &h).unwrap();
        assert_eq!(cr.transversal, vec![Word::identity(), Word::generator(0)]);
        assert_eq!(cr.tree_generator_count(), 1);
        let al = cr.schreier_alphabet.clone();
        assert_eq!(al.names(), &["b_0", "a_1", "b_1"]);
        let elements: Vec<String> = (0..3)
            .map(|k| cr.expand(&Word::generator(k)).display(g.alphabet()).to_string())
            .collect();
        assert_eq!(elements, vec!["b", "a^2", "a b a^-1"]);

        let b = Word::generator(1);
        assert_eq!(cr.rewrite(&b).unwrap(), Word::generator(al.index_of("b_0").unwrap()));
        let a2 = Word::power_of(0, 2);
        assert_eq!(cr.rewrite(&a2).unwrap(), Word::generator(al.index_of("a_1").unwrap()));
        assert_eq!(cr.rewrite(&Word::identity()).unwrap(), Word::identity());
        assert_eq!(cr.rewrite(&Word::generator(0)), Err(SubgroupError::NotInSubgroup(1)));
    }

    #[test]
    fn free_subgroup_counts() {
        let g = f2();
        for h in enumerate_index_p_kernels(&g, 2).unwrap() {
            let s = subgroup_presentation(&g, &h).unwrap();
            assert_eq!(s.presentation.generator_count(), 3);
            assert_eq!(s.presentation.relator_count(), 0);
            assert_eq!(subgroup_rational_rank(&g, &h).unwrap(), 3);
        }
    }

    #[test]
    fn hom_validation() {
        let g = GroupExpr::free_abelian(2).unwrap().presentation().clone();
        assert_eq!(HomToZp::new(&g, 4, vec![1, 0]), Err(SubgroupError::NotPrime(4)));
        assert_eq!(HomToZp::new(&g, 3, vec![0, 0]), Err(SubgroupError::ZeroMap));
        assert_eq!(HomToZp::new(&g, 3, vec![0, 3]), Err(SubgroupError::ImageOutOfRange { value: 3, p: 3 }));
        assert_eq!(HomToZp::new(&g, 3, vec![2, 1]).unwrap().images, vec![1, 2]);
        let g = Presentation::new(Alphabet::standard(1), vec![Word::power_of(0, 2)]).unwrap();
        assert_eq!(HomToZp::new(&g, 3, vec![1]), Err(SubgroupError::RelatorNotKilled(0)));
        assert!(HomToZp::new(&g, 2, vec![1]).is_ok());
    }

    #[test]
    fn abelian_subgroup_rank() {
        let g = GroupExpr::free_abelian(2).unwrap().presentation().clone();
        for h in enumerate_index_p_kernels(&g, 2).unwrap() {
            assert_eq!(subgroup_rational_rank(&g, &h).unwrap(), 2);
        }
    }

    #[test]
    fn expansion_inverts_rewriting() {
        let g = GroupExpr::free(3).unwrap().presentation().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for h in enumerate_index_p_kernels(&g, 3).unwrap() {
            let cr = CosetRewriting::canonical(&g, &h).unwrap();
            for _ in 0..20 {
                let raw: Vec<(usize, i64)> =
                    (0..8).map(|_| (rng.random_range(0..3), rng.random_range(-2..=2))).collect();
                let w = Word::reduce(raw);
                let fix = (3 - h.eval(&w)) % 3;
                let w = w.concat(&Word::power_of(h.first_nonzero(), fix as i64));
                assert_eq!(cr.expand(&cr.rewrite(&w).unwrap()), w);
            }
        }
    }

    #[test]
    fn randomized_transversal_agrees() {
        let g = Presentation::new(
            Alphabet::new(["a", "b", "c", "d"]).unwrap(),
            vec![Word::parse("a^2 b^2 d^-2 c^-2", &Alphabet::new(["a", "b", "c", "d"]).unwrap()).unwrap()],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [2, 3] {
            for h in enumerate_index_p_kernels(&g, p).unwrap() {
                let canonical = subgroup_presentation(&g, &h).unwrap().abelian_invariants();
                let cr = CosetRewriting::randomized(&g, &h, &mut rng).unwrap();
                let other = presentation_from_rewriting(&g, &cr).unwrap();
                assert_eq!(abelian_invariants(&other), canonical);
            }
        }
    }
}
