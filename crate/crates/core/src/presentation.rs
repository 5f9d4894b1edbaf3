use std::fmt;

use crate::word::{Alphabet, Word, WordError};

/// A finite presentation: generators plus freely reduced, nonempty relators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self, WordError> {
        let mut kept = Vec::with_capacity(relators.len());
        for r in relators {
            if let Some(index) = r.max_generator().filter(|&g| g >= alphabet.len()) {
                return Err(WordError::InvalidGenerator {
                    index,
                    len: alphabet.len(),
                });
            }
            if !r.is_identity() {
                kept.push(r);
            }
        }
        Ok(Self {
            alphabet,
            relators: kept,
        })
    }

    pub fn free(alphabet: Alphabet) -> Self {
        Self {
            alphabet,
            relators: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    /// Exponent-sum rows, one per relator.
    pub fn relator_vectors(&self) -> Vec<Vec<i64>> {
        self.relators
            .iter()
            .map(|r| r.abelianized(self.generator_count()))
            .collect()
    }

    /// Disjoint union: `other`'s generators are appended after `self`'s.
    pub(crate) fn disjoint_union(
        &self,
        own_alphabet: Alphabet,
        other: &Presentation,
        other_alphabet: Alphabet,
    ) -> Result<Presentation, WordError> {
        let alphabet = own_alphabet.disjoint_union(&other_alphabet)?;
        let offset = self.generator_count();
        let relators = self
            .relators
            .iter()
            .cloned()
            .chain(other.relators.iter().map(|r| r.shifted(offset)))
            .collect();
        Presentation::new(alphabet, relators)
    }

    pub(crate) fn push_relator(&mut self, relator: Word) {
        if !relator.is_identity() {
            self.relators.push(relator);
        }
    }

    pub(crate) fn alphabet_mut(&mut self) -> &mut Alphabet {
        &mut self.alphabet
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "< {} | ", self.alphabet.names().join(", "))?;
        let rels: Vec<String> = self
            .relators
            .iter()
            .map(|r| r.display(&self.alphabet).to_string())
            .collect();
        write!(f, "{} >", rels.join(", "))
    }
}
