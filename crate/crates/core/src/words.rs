//! Core word combinatorics: subword tests, leftmost embeddings, block and
//! alternation decompositions, piecewise-testable membership, and the word
//! enumerator that the test oracles are built on.
//!
//! Words are stored as sequences of letter indices into an [`Alphabet`]. The
//! alphabet order is fixed once and shared by the whole pipeline: it defines
//! the canonical product `a1* a2* ... an*` that alternation bounds refer to.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet must be nonempty and duplicate-free")]
    BadAlphabet,
    #[error("letter {0:?} is not in the alphabet")]
    UnknownLetter(char),
    #[error("letter index {0} out of range for alphabet of size {1}")]
    IndexOutOfRange(usize, usize),
    #[error("word needs more than {0} alternation rounds")]
    NotInAlternationClass(usize),
}

/// An ordered alphabet `a1 < a2 < ... < an` of distinct symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<char>,
}

impl Alphabet {
    pub fn new(letters: impl IntoIterator<Item = char>) -> Result<Self, WordError> {
        let letters: Vec<char> = letters.into_iter().collect();
        if letters.is_empty() {
            return Err(WordError::BadAlphabet);
        }
        for (i, a) in letters.iter().enumerate() {
            if letters[..i].contains(a) {
                return Err(WordError::BadAlphabet);
            }
        }
        Ok(Alphabet { letters })
    }

    /// Shorthand used throughout the tests: `Alphabet::of("ab")`.
    pub fn of(s: &str) -> Self {
        Alphabet::new(s.chars()).expect("valid alphabet literal")
    }

    pub fn size(&self) -> usize {
        self.letters.len()
    }

    pub fn letter(&self, idx: usize) -> char {
        self.letters[idx]
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.letters.iter().position(|&l| l == c)
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    /// Parses a textual word over this alphabet.
    pub fn word(&self, text: &str) -> Result<Word, WordError> {
        let mut symbols = Vec::with_capacity(text.len());
        for c in text.chars() {
            match self.index_of(c) {
                Some(i) => symbols.push(i),
                None => return Err(WordError::UnknownLetter(c)),
            }
        }
        Ok(Word::new(symbols))
    }

    /// Renders a word back to text.
    pub fn render(&self, w: &Word) -> String {
        w.symbols().iter().map(|&i| self.letters[i]).collect()
    }
}

/// A finite word: a sequence of letter indices into an alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    symbols: Vec<usize>,
}

impl Word {
    pub fn new(symbols: Vec<usize>) -> Self {
        Word { symbols }
    }

    pub fn empty() -> Self {
        Word::default()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Number of occurrences of the letter with index `letter`.
    pub fn count(&self, letter: usize) -> usize {
        self.symbols.iter().filter(|&&s| s == letter).count()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Word::new(symbols)
    }

    pub fn reversed(&self) -> Word {
        let mut symbols = self.symbols.clone();
        symbols.reverse();
        Word::new(symbols)
    }

    /// `letter^count`.
    pub fn power(letter: usize, count: usize) -> Word {
        Word::new(vec![letter; count])
    }

    pub fn validate(&self, alphabet: &Alphabet) -> Result<(), WordError> {
        for &s in &self.symbols {
            if s >= alphabet.size() {
                return Err(WordError::IndexOutOfRange(s, alphabet.size()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.is_empty() {
            return write!(f, "ε");
        }
        for &s in &self.symbols {
            // Indices beyond 'z' - 'a' only occur in synthetic tests.
            let c = char::from_u32('a' as u32 + s as u32).unwrap_or('?');
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Returns true iff `u` embeds into `v` as a scattered subsequence.
///
/// Greedy two-pointer scan, `O(|u| + |v|)`. Greedy matching is complete for
/// the subword relation: matching each source letter at the earliest possible
/// target position never forecloses a later match.
pub fn is_subword(u: &Word, v: &Word) -> bool {
    let mut it = u.symbols.iter();
    let mut need = it.next();
    for s in &v.symbols {
        match need {
            None => return true,
            Some(&n) if n == *s => need = it.next(),
            _ => {}
        }
    }
    need.is_none()
}

/// `u` and `v` are incomparable: neither embeds into the other.
pub fn incomparable(u: &Word, v: &Word) -> bool {
    !is_subword(u, v) && !is_subword(v, u)
}

/// The image of the leftmost embedding of a prefix of `u` into `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    /// Strictly increasing 0-based positions in the target word.
    pub positions: Vec<usize>,
    /// Length of the longest prefix of the source that embeds.
    pub matched_prefix_len: usize,
}

impl Embedding {
    /// True iff any position of the image lies in `[start, end)`.
    pub fn meets(&self, start: usize, end: usize) -> bool {
        self.positions.iter().any(|&p| p >= start && p < end)
    }
}

/// Greedy leftmost embedding of the longest embeddable prefix of `u` into `t`.
///
/// `matched_prefix_len == u.len()` iff `is_subword(u, t)`.
pub fn leftmost_embedding(u: &Word, t: &Word) -> Embedding {
    let mut positions = Vec::new();
    let mut ui = 0;
    for (ti, s) in t.symbols.iter().enumerate() {
        if ui == u.len() {
            break;
        }
        if u.symbols[ui] == *s {
            positions.push(ti);
            ui += 1;
        }
    }
    Embedding {
        positions,
        matched_prefix_len: ui,
    }
}

/// A maximal-run decomposition: `(letter, multiplicity)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub blocks: Vec<(usize, usize)>,
}

impl BlockDecomposition {
    pub fn count(&self) -> usize {
        self.blocks.len()
    }

    pub fn reassemble(&self) -> Word {
        let mut symbols = Vec::new();
        for &(letter, mult) in &self.blocks {
            symbols.extend(std::iter::repeat(letter).take(mult));
        }
        Word::new(symbols)
    }
}

/// Decomposes `w` into maximal runs of equal letters, in order.
pub fn blocks(w: &Word) -> BlockDecomposition {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &s in &w.symbols {
        match out.last_mut() {
            Some((letter, mult)) if *letter == s => *mult += 1,
            _ => out.push((s, 1)),
        }
    }
    BlockDecomposition { blocks: out }
}

pub fn block_count(w: &Word) -> usize {
    blocks(w).count()
}

/// The least `l` with `w` in `(a1* ... an*)^l`; 0 only for the empty word.
///
/// A new round starts exactly where the block letter index fails to increase.
pub fn min_rounds(w: &Word) -> usize {
    let bs = blocks(w).blocks;
    if bs.is_empty() {
        return 0;
    }
    let mut rounds = 1;
    for pair in bs.windows(2) {
        if pair[1].0 <= pair[0].0 {
            rounds += 1;
        }
    }
    rounds
}

/// A word of `(a1* ... an*)^l` represented by its `l * n` exponents.
///
/// Entry `(i, j)` (both 0-based here) is the exponent of letter `j` in round
/// `i`; the represented word is the product of the `a_j^entry` factors in
/// round-major, then letter-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentVector {
    pub rounds: usize,
    pub alphabet_size: usize,
    entries: Vec<usize>,
}

impl ExponentVector {
    pub fn new(rounds: usize, alphabet_size: usize, entries: Vec<usize>) -> Self {
        assert_eq!(entries.len(), rounds * alphabet_size);
        ExponentVector {
            rounds,
            alphabet_size,
            entries,
        }
    }

    pub fn zero(rounds: usize, alphabet_size: usize) -> Self {
        ExponentVector {
            rounds,
            alphabet_size,
            entries: vec![0; rounds * alphabet_size],
        }
    }

    pub fn get(&self, round: usize, letter: usize) -> usize {
        self.entries[round * self.alphabet_size + letter]
    }

    pub fn set(&mut self, round: usize, letter: usize, value: usize) {
        self.entries[round * self.alphabet_size + letter] = value;
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// The represented word.
    pub fn spell(&self) -> Word {
        let mut symbols = Vec::new();
        for i in 0..self.rounds {
            for j in 0..self.alphabet_size {
                symbols.extend(std::iter::repeat(j).take(self.get(i, j)));
            }
        }
        Word::new(symbols)
    }

    /// Re-represents the same word with `rounds + extra` rounds, the new
    /// all-zero rounds leading.
    pub fn pad_front(&self, extra: usize) -> ExponentVector {
        let mut out = ExponentVector::zero(self.rounds + extra, self.alphabet_size);
        for i in 0..self.rounds {
            for j in 0..self.alphabet_size {
                out.set(extra + i, j, self.get(i, j));
            }
        }
        out
    }
}

/// Canonical (greedy leftmost) decomposition of `w` as an element of
/// `(a1* ... an*)^rounds`.
///
/// Each round consumes, for `j = 1..n` in order, the longest run of `a_j`
/// available at the current position. Fails if the word needs more rounds.
pub fn alt_decompose(
    w: &Word,
    rounds: usize,
    alphabet_size: usize,
) -> Result<ExponentVector, WordError> {
    let mut out = ExponentVector::zero(rounds, alphabet_size);
    let mut pos = 0;
    for i in 0..rounds {
        for j in 0..alphabet_size {
            let mut run = 0;
            while pos + run < w.len() && w.symbols[pos + run] == j {
                run += 1;
            }
            out.set(i, j, run);
            pos += run;
        }
    }
    if pos < w.len() {
        return Err(WordError::NotInAlternationClass(rounds));
    }
    Ok(out)
}

/// A boolean combination of upward closures, the normal form of a piecewise
/// testable language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PtExpr {
    /// The upward closure of a word: all words containing it as a subword.
    Up(Word),
    And(Vec<PtExpr>),
    Or(Vec<PtExpr>),
    Not(Box<PtExpr>),
}

impl PtExpr {
    pub fn up(w: Word) -> Self {
        PtExpr::Up(w)
    }

    /// All upward-closure atoms, in syntactic order.
    pub fn atoms(&self) -> Vec<&Word> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Word>) {
        match self {
            PtExpr::Up(w) => out.push(w),
            PtExpr::And(es) | PtExpr::Or(es) => es.iter().for_each(|e| e.collect_atoms(out)),
            PtExpr::Not(e) => e.collect_atoms(out),
        }
    }
}

/// Evaluates a piecewise-testable expression on `w`: every atom `Up(v)`
/// becomes `is_subword(v, w)`.
pub fn pt_member(w: &Word, e: &PtExpr) -> bool {
    match e {
        PtExpr::Up(v) => is_subword(v, w),
        PtExpr::And(es) => es.iter().all(|e| pt_member(w, e)),
        PtExpr::Or(es) => es.iter().any(|e| pt_member(w, e)),
        PtExpr::Not(e) => !pt_member(w, e),
    }
}

/// All words of length at most `max_len` over an alphabet of the given size,
/// in length-lexicographic order.
pub fn enumerate_words(alphabet_size: usize, max_len: usize) -> impl Iterator<Item = Word> {
    WordEnumerator {
        alphabet_size,
        max_len,
        current: Some(Vec::new()),
    }
}

struct WordEnumerator {
    alphabet_size: usize,
    max_len: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for WordEnumerator {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let cur = self.current.take()?;
        let item = Word::new(cur.clone());
        // Advance as an odometer; on overflow grow the length by one.
        let mut next = cur;
        let mut i = next.len();
        loop {
            if i == 0 {
                if item.len() == self.max_len {
                    self.current = None;
                } else {
                    self.current = Some(vec![0; item.len() + 1]);
                }
                break;
            }
            i -= 1;
            if next[i] + 1 < self.alphabet_size {
                next[i] += 1;
                for v in next[i + 1..].iter_mut() {
                    *v = 0;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(alpha: &Alphabet, s: &str) -> Word {
        alpha.word(s).unwrap()
    }

    /// Exhaustive reference for the subword relation: search over all strictly
    /// increasing position maps by backtracking.
    fn subword_by_search(u: &[usize], v: &[usize]) -> bool {
        if u.is_empty() {
            return true;
        }
        for (i, s) in v.iter().enumerate() {
            if *s == u[0] && subword_by_search(&u[1..], &v[i + 1..]) {
                return true;
            }
        }
        false
    }

    /// All embeddings of the full word `u` into `t`, as position vectors.
    fn all_embeddings(u: &[usize], t: &[usize]) -> Vec<Vec<usize>> {
        fn go(u: &[usize], t: &[usize], offset: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if u.is_empty() {
                out.push(acc.clone());
                return;
            }
            for i in 0..t.len() {
                if t[i] == u[0] {
                    acc.push(offset + i);
                    go(&u[1..], &t[i + 1..], offset + i + 1, acc, out);
                    acc.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(u, t, 0, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn subword_examples() {
        let a = Alphabet::of("ab");
        assert!(is_subword(&w(&a, "bba"), &w(&a, "ababa")));
        assert!(is_subword(&Word::empty(), &w(&a, "abab")));
        assert!(is_subword(&Word::empty(), &Word::empty()));
        assert!(!is_subword(&w(&a, "ab"), &w(&a, "ba")));
    }

    #[test]
    fn incomparable_examples() {
        let a = Alphabet::of("ab");
        assert!(incomparable(&w(&a, "ab"), &w(&a, "ba")));
        assert!(!incomparable(&w(&a, "a"), &w(&a, "ab")));
        let u = w(&a, "abba");
        assert!(!incomparable(&u, &u));
    }

    #[test]
    fn leftmost_embedding_examples() {
        let a = Alphabet::of("ab");
        // Spec positions are 1-based [2,4,5]; we store 0-based.
        let e = leftmost_embedding(&w(&a, "bba"), &w(&a, "ababa"));
        assert_eq!(e.positions, vec![1, 3, 4]);
        assert_eq!(e.matched_prefix_len, 3);

        let e = leftmost_embedding(&w(&a, "aa"), &w(&a, "ab"));
        assert_eq!(e.positions, vec![0]);
        assert_eq!(e.matched_prefix_len, 1);

        let e = leftmost_embedding(&Word::empty(), &w(&a, "abab"));
        assert!(e.positions.is_empty());
        assert_eq!(e.matched_prefix_len, 0);
    }

    #[test]
    fn leftmost_embedding_is_minimal() {
        // Each position of the leftmost embedding is <= the corresponding
        // position of any other embedding of the same (full) prefix.
        for u in enumerate_words(2, 4) {
            for t in enumerate_words(2, 6) {
                if !is_subword(&u, &t) {
                    continue;
                }
                let lm = leftmost_embedding(&u, &t);
                for other in all_embeddings(u.symbols(), t.symbols()) {
                    for (l, o) in lm.positions.iter().zip(other.iter()) {
                        assert!(l <= o, "leftmost {lm:?} vs {other:?} for {u} in {t}");
                    }
                }
            }
        }
    }

    #[test]
    fn greedy_matches_exhaustive_search() {
        for u in enumerate_words(2, 5) {
            for v in enumerate_words(2, 5) {
                assert_eq!(
                    is_subword(&u, &v),
                    subword_by_search(u.symbols(), v.symbols()),
                    "disagreement on ({u}, {v})"
                );
            }
        }
    }

    #[test]
    fn subword_is_a_partial_order() {
        let words: Vec<Word> = enumerate_words(2, 5).collect();
        for u in &words {
            assert!(is_subword(u, u));
            for v in &words {
                if is_subword(u, v) && is_subword(v, u) {
                    assert_eq!(u, v);
                }
            }
        }
    }

    #[test]
    fn subword_is_transitive_exhaustive() {
        let words: Vec<Word> = enumerate_words(3, 4).collect();
        for u in &words {
            for v in &words {
                if !is_subword(u, v) {
                    continue;
                }
                for t in &words {
                    if is_subword(v, t) {
                        assert!(is_subword(u, t));
                    }
                }
            }
        }
    }

    #[test]
    fn blocks_examples() {
        let a = Alphabet::of("ab");
        let d = blocks(&w(&a, "aabba"));
        assert_eq!(d.blocks, vec![(0, 2), (1, 2), (0, 1)]);
        assert_eq!(d.count(), 3);
        assert_eq!(blocks(&Word::empty()).count(), 0);
        assert_eq!(blocks(&w(&a, "ababa")).count(), 5);
        assert!(blocks(&w(&a, "ababa")).blocks.iter().all(|&(_, m)| m == 1));
    }

    #[test]
    fn min_rounds_examples() {
        let a = Alphabet::of("ab");
        assert_eq!(min_rounds(&Word::empty()), 0);
        assert_eq!(min_rounds(&w(&a, "ab")), 1);
        assert_eq!(min_rounds(&w(&a, "ba")), 2);
        assert_eq!(min_rounds(&w(&a, "abab")), 2);
        assert_eq!(min_rounds(&w(&a, "bb")), 1);
    }

    #[test]
    fn alt_decompose_examples() {
        let a = Alphabet::of("ab");
        let v = alt_decompose(&w(&a, "ab"), 1, 2).unwrap();
        assert_eq!(v.entries(), &[1, 1]);

        assert_eq!(
            alt_decompose(&w(&a, "ba"), 1, 2),
            Err(WordError::NotInAlternationClass(1))
        );

        let v = alt_decompose(&w(&a, "ba"), 2, 2).unwrap();
        assert_eq!(v.entries(), &[0, 1, 1, 0]);
    }

    #[test]
    fn alt_decompose_round_trips_and_is_greedy_extremal() {
        // Enumerate all valid exponent vectors for each word and check that
        // the greedy one (a) reassembles the word, (b) is the
        // lexicographically greatest valid vector: the greedy rule fills the
        // earliest factors as much as possible.
        fn all_vectors(total: usize, slots: usize) -> Vec<Vec<usize>> {
            if slots == 0 {
                return if total == 0 { vec![vec![]] } else { vec![] };
            }
            let mut out = Vec::new();
            for head in 0..=total {
                for mut rest in all_vectors(total - head, slots - 1) {
                    rest.insert(0, head);
                    out.push(rest);
                }
            }
            out
        }

        for word in enumerate_words(2, 5) {
            for rounds in 1..=3usize {
                let greedy = alt_decompose(&word, rounds, 2);
                let valid: Vec<Vec<usize>> = all_vectors(word.len(), rounds * 2)
                    .into_iter()
                    .filter(|entries| {
                        ExponentVector::new(rounds, 2, entries.clone()).spell() == word
                    })
                    .collect();
                match greedy {
                    Ok(v) => {
                        assert_eq!(v.spell(), word);
                        let g = v.entries().to_vec();
                        assert!(valid.contains(&g));
                        for other in &valid {
                            assert!(g >= *other, "greedy {g:?} not maximal vs {other:?}");
                        }
                    }
                    Err(_) => assert!(valid.is_empty(), "missed decomposition of {word}"),
                }
            }
        }
    }

    #[test]
    fn pad_front_preserves_word() {
        let a = Alphabet::of("ab");
        let v = alt_decompose(&w(&a, "ba"), 2, 2).unwrap();
        assert_eq!(v.pad_front(2).spell(), w(&a, "ba"));
    }

    #[test]
    fn pt_member_examples() {
        let a = Alphabet::of("abcde");
        let e = PtExpr::And(vec![
            PtExpr::up(w(&a, "abcd")),
            PtExpr::up(w(&a, "bcde")),
            PtExpr::Not(Box::new(PtExpr::up(w(&a, "abcde")))),
        ]);
        assert!(pt_member(&w(&a, "bcdeabcd"), &e));
        assert!(!pt_member(&w(&a, "abcde"), &e));

        let not_a = PtExpr::Not(Box::new(PtExpr::up(w(&a, "a"))));
        assert!(pt_member(&Word::empty(), &not_a));
    }

    #[test]
    fn enumeration_counts_and_order() {
        let empty_only: Vec<Word> = enumerate_words(2, 0).collect();
        assert_eq!(empty_only, vec![Word::empty()]);

        let upto2: Vec<Word> = enumerate_words(2, 2).collect();
        assert_eq!(upto2.len(), 7); // 1 + 2 + 4

        let unary: Vec<Word> = enumerate_words(1, 3).collect();
        assert_eq!(
            unary,
            vec![
                Word::empty(),
                Word::power(0, 1),
                Word::power(0, 2),
                Word::power(0, 3)
            ]
        );

        // Length-lexicographic order.
        let all: Vec<Word> = enumerate_words(3, 3).collect();
        assert_eq!(all.len(), 1 + 3 + 9 + 27);
        for pair in all.windows(2) {
            let (x, y) = (&pair[0], &pair[1]);
            assert!(x.len() < y.len() || (x.len() == y.len() && x.symbols() < y.symbols()));
        }
    }
}
