//! Generator alphabets and freely reduced words in syllable form.
//!
//! A [`Word`] is stored as a run-length sequence of `(generator, exponent)`
//! syllables. Adjacent syllables always carry distinct generators and no
//! exponent is zero, so the representation is the free-group normal form.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("generator index {index} is out of range for an alphabet of {len} symbols")]
    InvalidGenerator { index: usize, len: usize },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator symbol must be a nonempty identifier, got `{0}`")]
    InvalidSymbol(String),
    #[error("duplicate generator symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("the empty word has no primitive root")]
    EmptyWord,
    #[error("malformed syllable `{0}`")]
    MalformedSyllable(String),
}

/// An ordered list of distinct generator symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for name in &names {
            if !is_identifier(name) {
                return Err(WordError::InvalidSymbol(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(WordError::DuplicateSymbol(name.clone()));
            }
        }
        Ok(Self { names })
    }

    /// Default names for a free basis of rank `n`: `a..h`, or `x1..xn` past eight.
    pub fn standard(n: usize) -> Self {
        let names = if n <= 8 {
            (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
        } else {
            (1..=n).map(|i| format!("x{i}")).collect()
        };
        Self { names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    /// Appends `suffix` to every symbol.
    pub fn suffixed(&self, suffix: &str) -> Self {
        Self {
            names: self.names.iter().map(|n| format!("{n}{suffix}")).collect(),
        }
    }

    /// Concatenation of two alphabets; fails if the symbol sets overlap.
    pub fn disjoint_union(&self, other: &Alphabet) -> Result<Self, WordError> {
        Self::new(self.names.iter().chain(other.names.iter()).cloned())
    }

    /// Returns `count` symbols of the form `{stem}{k}` that do not occur in the
    /// alphabet, taking the smallest available `k >= 1`.
    pub fn fresh_indexed(&self, stem: &str, count: usize) -> Vec<String> {
        let mut out = Vec::with_capacity(count);
        let mut k = 1usize;
        while out.len() < count {
            let candidate = format!("{stem}{k}");
            if !self.contains(&candidate) {
                out.push(candidate);
            }
            k += 1;
        }
        out
    }

    /// `stem` itself if unused, otherwise the first free `{stem}{k}`.
    pub fn fresh(&self, stem: &str) -> String {
        if self.contains(stem) {
            self.fresh_indexed(stem, 1).pop().expect("one fresh symbol")
        } else {
            stem.to_string()
        }
    }

    pub fn push(&mut self, name: impl Into<String>) -> Result<usize, WordError> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(WordError::InvalidSymbol(name));
        }
        if self.contains(&name) {
            return Err(WordError::DuplicateSymbol(name));
        }
        self.names.push(name);
        Ok(self.names.len() - 1)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// A freely reduced word over positional generator indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word {
    syllables: Vec<(usize, i64)>,
}

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn generator(index: usize) -> Self {
        Self {
            syllables: vec![(index, 1)],
        }
    }

    pub fn power_of(index: usize, exponent: i64) -> Self {
        if exponent == 0 {
            Self::identity()
        } else {
            Self {
                syllables: vec![(index, exponent)],
            }
        }
    }

    /// Reduces an arbitrary syllable sequence without checking indices.
    pub fn reduce<I>(raw: I) -> Self
    where
        I: IntoIterator<Item = (usize, i64)>,
    {
        let mut stack: Vec<(usize, i64)> = Vec::new();
        for (g, e) in raw {
            push_syllable(&mut stack, g, e);
        }
        Self { syllables: stack }
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters, i.e. the sum of absolute exponents.
    pub fn letter_len(&self) -> u64 {
        self.syllables.iter().map(|&(_, e)| e.unsigned_abs()).sum()
    }

    /// Highest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.syllables.iter().map(|&(g, _)| g).max()
    }

    /// Expands into single letters `(generator, ±1)`.
    pub fn letters(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.syllables
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize))
    }

    pub fn inverse(&self) -> Self {
        Self {
            syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    /// The reduced product `self · other`.
    pub fn concat(&self, other: &Word) -> Self {
        let mut stack = self.syllables.clone();
        for &(g, e) in &other.syllables {
            push_syllable(&mut stack, g, e);
        }
        Self { syllables: stack }
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `u · self · u⁻¹`.
    pub fn conjugate_by(&self, u: &Word) -> Self {
        u.concat(self).concat(&u.inverse())
    }

    /// Shifts every generator index by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        Self {
            syllables: self.syllables.iter().map(|&(g, e)| (g + offset, e)).collect(),
        }
    }

    /// Splits `self = conjugator · core · conjugator⁻¹` with `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let mut inner: Vec<(usize, i64)> = self.syllables.clone();
        let mut conjugator: Vec<(usize, i64)> = Vec::new();
        while inner.len() >= 2 {
            let (gf, ef) = inner[0];
            let (gl, el) = inner[inner.len() - 1];
            if gf != gl || ef.signum() == el.signum() {
                break;
            }
            let k = ef.abs().min(el.abs()) * ef.signum();
            push_syllable(&mut conjugator, gf, k);
            let last = inner.len() - 1;
            inner[0].1 -= k;
            inner[last].1 += k;
            if inner[last].1 == 0 {
                inner.pop();
            }
            if inner[0].1 == 0 {
                inner.remove(0);
            }
        }
        (Word { syllables: inner }, Word { syllables: conjugator })
    }

    /// Returns `(root, multiplicity)` with `root^multiplicity = self` and the
    /// multiplicity maximal. Multiplicity 1 means `self` is not a proper power.
    pub fn primitive_root(&self) -> Result<(Word, u64), WordError> {
        if self.is_identity() {
            return Err(WordError::EmptyWord);
        }
        let (core, conjugator) = self.cyclic_reduce();
        let letters: Vec<(usize, i64)> = core.letters().collect();
        let n = letters.len();
        for period in 1..=n {
            if n % period != 0 {
                continue;
            }
            if (period..n).all(|i| letters[i] == letters[i - period]) {
                let root = Word::reduce(letters[..period].iter().copied());
                return Ok((root.conjugate_by(&conjugator), (n / period) as u64));
            }
        }
        unreachable!("period n always matches")
    }

    /// Exponent sum of each generator, indexed positionally.
    pub fn abelianized(&self, generators: usize) -> Vec<i64> {
        let mut v = vec![0i64; generators];
        for &(g, e) in &self.syllables {
            v[g] += e;
        }
        v
    }

    /// Renders with the caret syntax, e.g. `a^2 b a^-1 b^-1`; identity is `1`.
    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> WordDisplay<'a> {
        WordDisplay {
            word: self,
            alphabet,
        }
    }

    /// Parses the caret syntax against `alphabet`. `1` denotes the identity.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Word, WordError> {
        let mut raw = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (name, exponent) = match token.split_once('^') {
                Some((name, exp)) => {
                    let exponent: i64 = exp
                        .parse()
                        .map_err(|_| WordError::MalformedSyllable(token.to_string()))?;
                    if exponent.unsigned_abs() > i32::MAX as u64 {
                        return Err(WordError::MalformedSyllable(token.to_string()));
                    }
                    (name, exponent)
                }
                None => (token, 1),
            };
            if !is_identifier(name) {
                return Err(WordError::MalformedSyllable(token.to_string()));
            }
            let index = alphabet
                .index_of(name)
                .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
            raw.push((index, exponent));
        }
        Ok(Word::reduce(raw))
    }
}

fn push_syllable(stack: &mut Vec<(usize, i64)>, g: usize, e: i64) {
    if e == 0 {
        return;
    }
    match stack.last_mut() {
        Some(top) if top.0 == g => {
            top.1 += e;
            if top.1 == 0 {
                stack.pop();
            }
        }
        _ => stack.push((g, e)),
    }
}

/// Reduces a raw syllable sequence after checking every index against `alphabet`.
pub fn free_reduce(raw: &[(usize, i64)], alphabet: &Alphabet) -> Result<Word, WordError> {
    if let Some(&(index, _)) = raw.iter().find(|&&(g, _)| g >= alphabet.len()) {
        return Err(WordError::InvalidGenerator {
            index,
            len: alphabet.len(),
        });
    }
    Ok(Word::reduce(raw.iter().copied()))
}

/// Exponent-sum vector of `w` over `alphabet`.
pub fn abelianized_vector(w: &Word, alphabet: &Alphabet) -> Vec<i64> {
    w.abelianized(alphabet.len())
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    alphabet: &'a Alphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return f.write_str("1");
        }
        for (i, &(g, e)) in self.word.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.alphabet.name(g))?;
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn w(text: &str) -> Word {
        Word::parse(text, &ab()).unwrap()
    }

    /// Letter-by-letter stack automaton over `(generator, ±1)`.
    fn letter_stack_reduce(raw: &[(usize, i64)]) -> Vec<(usize, i64)> {
        let mut stack: Vec<(usize, i64)> = Vec::new();
        for &(g, e) in raw {
            for _ in 0..e.unsigned_abs() {
                let letter = (g, e.signum());
                if stack.last() == Some(&(g, -e.signum())) {
                    stack.pop();
                } else {
                    stack.push(letter);
                }
            }
        }
        stack
    }

    #[test]
    fn cancellation() {
        let reduced = free_reduce(&[(0, 1), (0, -1), (1, 1)], &ab()).unwrap();
        assert_eq!(reduced, Word::generator(1));
    }

    #[test]
    fn reduced_word_unchanged() {
        let raw = [(0, 2), (1, 1), (0, -1), (1, -1)];
        let reduced = free_reduce(&raw, &ab()).unwrap();
        assert_eq!(reduced.syllables(), &raw);
    }

    #[test]
    fn invalid_index_rejected() {
        assert_eq!(
            free_reduce(&[(2, 1)], &ab()),
            Err(WordError::InvalidGenerator { index: 2, len: 2 })
        );
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Word::identity().inverse(), Word::identity());
        assert_eq!(w("a^2 b").inverse(), w("b^-1 a^-2"));
    }

    #[test]
    fn cyclic_reduce_examples() {
        assert_eq!(w("a b a^-1").cyclic_reduce(), (w("b"), w("a")));
        let x = w("a^2 b a^-1 b^-1");
        assert_eq!(x.cyclic_reduce(), (x.clone(), Word::identity()));
        assert_eq!(
            Word::identity().cyclic_reduce(),
            (Word::identity(), Word::identity())
        );
        // partial cancellation of unequal powers
        let (core, conj) = w("a^3 b a^-1").cyclic_reduce();
        assert_eq!(core, w("a^2 b"));
        assert_eq!(core.conjugate_by(&conj), w("a^3 b a^-1"));
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(w("a^6").primitive_root().unwrap(), (w("a"), 6));
        assert_eq!(w("a b a b a b").primitive_root().unwrap(), (w("a b"), 3));
        let x = w("a^2 b a^-1 b^-1");
        assert_eq!(x.primitive_root().unwrap(), (x.clone(), 1));
        assert_eq!(Word::identity().primitive_root(), Err(WordError::EmptyWord));
        // conjugated proper power
        assert_eq!(
            w("b a^4 b^-1").primitive_root().unwrap(),
            (w("b a b^-1"), 4)
        );
    }

    /// Brute force: does any word of length `k` dividing |w| have `w` as a power?
    fn brute_force_multiplicity(word: &Word) -> u64 {
        let (core, _) = word.cyclic_reduce();
        let n = core.letter_len();
        let mut best = 1;
        for k in 1..=n {
            if n % k != 0 {
                continue;
            }
            let letters: Vec<_> = core.letters().collect();
            let candidate = Word::reduce(letters[..k as usize].iter().copied());
            if candidate.pow((n / k) as i64) == core {
                best = best.max(n / k);
            }
        }
        best
    }

    #[test]
    fn primitive_root_matches_brute_force_on_fixture() {
        let x = w("a^2 b a^-1 b^-1");
        assert_eq!(brute_force_multiplicity(&x), 1);
        assert_eq!(brute_force_multiplicity(&w("a b^2 a b^2")), 2);
    }

    #[test]
    fn abelianized_examples() {
        assert_eq!(abelianized_vector(&w("a^2 b a^-1 b^-1"), &ab()), vec![1, 0]);
        assert_eq!(abelianized_vector(&Word::identity(), &ab()), vec![0, 0]);
    }

    #[test]
    fn display_and_parse() {
        let x = w("a^2 b a^-1 b^-1");
        assert_eq!(x.display(&ab()).to_string(), "a^2 b a^-1 b^-1");
        assert_eq!(Word::identity().display(&ab()).to_string(), "1");
        assert_eq!(
            Word::parse("c", &ab()),
            Err(WordError::UnknownGenerator("c".into()))
        );
        assert!(matches!(
            Word::parse("a^x", &ab()),
            Err(WordError::MalformedSyllable(_))
        ));
    }

    #[test]
    fn alphabet_rules() {
        assert!(matches!(
            Alphabet::new(["a", "a"]),
            Err(WordError::DuplicateSymbol(_))
        ));
        assert!(matches!(Alphabet::new([""]), Err(WordError::InvalidSymbol(_))));
        let al = Alphabet::new(["t1", "a"]).unwrap();
        assert_eq!(al.fresh_indexed("t", 2), vec!["t2", "t3"]);
        assert_eq!(al.fresh("t"), "t");
        assert_eq!(Alphabet::standard(3).names(), &["a", "b", "c"]);
        assert_eq!(Alphabet::standard(9).name(8), "x9");
    }

    fn raw_sequence(max_len: usize) -> impl Strategy<Value = Vec<(usize, i64)>> {
        prop::collection::vec((0usize..3, -3i64..=3), 0..=max_len)
    }

    fn reduced_word() -> impl Strategy<Value = Word> {
        raw_sequence(12).prop_map(Word::reduce)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn reduction_matches_letter_automaton(raw in raw_sequence(50)) {
            let word = Word::reduce(raw.iter().copied());
            let expected = letter_stack_reduce(&raw);
            prop_assert_eq!(word.letters().collect::<Vec<_>>(), expected);
            for pair in word.syllables().windows(2) {
                prop_assert_ne!(pair[0].0, pair[1].0);
            }
            prop_assert!(word.syllables().iter().all(|&(_, e)| e != 0));
            prop_assert_eq!(Word::reduce(word.syllables().iter().copied()), word);
        }
    }

    proptest! {
        #[test]
        fn inverse_laws(x in reduced_word()) {
            prop_assert_eq!(x.inverse().inverse(), x.clone());
            prop_assert!(x.concat(&x.inverse()).is_identity());
        }

        #[test]
        fn abelianization_is_additive(u in reduced_word(), v in reduced_word()) {
            let sum: Vec<i64> = u.abelianized(3).iter().zip(v.abelianized(3)).map(|(a, b)| a + b).collect();
            prop_assert_eq!(u.concat(&v).abelianized(3), sum);
            let commutator = u.concat(&v).concat(&u.inverse()).concat(&v.inverse());
            prop_assert_eq!(commutator.abelianized(3), vec![0, 0, 0]);
        }

        #[test]
        fn cyclic_reduce_contract(x in reduced_word()) {
            let (core, conj) = x.cyclic_reduce();
            prop_assert!(core.letter_len() <= x.letter_len());
            prop_assert_eq!(core.conjugate_by(&conj), x);
            if core.syllables().len() >= 2 {
                let (gf, ef) = core.syllables()[0];
                let (gl, el) = *core.syllables().last().unwrap();
                prop_assert!(gf != gl || ef.signum() == el.signum());
            }
        }

        #[test]
        fn primitive_root_contract(x in reduced_word()) {
            prop_assume!(!x.is_identity());
            let (root, m) = x.primitive_root().unwrap();
            prop_assert_eq!(root.pow(m as i64), x.clone());
            prop_assert_eq!(root.primitive_root().unwrap().1, 1);
            prop_assert_eq!(m, brute_force_multiplicity(&x));
        }

        #[test]
        fn powers_are_detected(x in reduced_word(), k in 2i64..5) {
            prop_assume!(!x.is_identity());
            let (_, m) = x.primitive_root().unwrap();
            prop_assert_eq!(x.pow(k).primitive_root().unwrap().1, m * k as u64);
        }
    }
}
