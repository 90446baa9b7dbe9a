//! Reduced words of the free product of four involutions.
//!
//! A word is written `w_k ... w_2 w_1` and acts right to left: `w_1` is
//! applied first. Internally letters are stored in written order.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::color::Color;
use crate::graph::ColorAdjacency;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Color>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Free reduction: cancels adjacent equal letters until none remain.
    pub fn reduce(letters: impl IntoIterator<Item = Color>) -> Self {
        let mut out: Vec<Color> = Vec::new();
        for c in letters {
            if out.last() == Some(&c) {
                out.pop();
            } else {
                out.push(c);
            }
        }
        Word(out)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Letters in written order (`w_k` first).
    pub fn letters(&self) -> &[Color] {
        &self.0
    }

    /// Letters in application order (`w_1` first).
    pub fn applied(&self) -> impl DoubleEndedIterator<Item = Color> + '_ {
        self.0.iter().rev().copied()
    }

    /// `w_i` in the 1-based application-order indexing.
    pub fn letter(&self, i: usize) -> Color {
        self.0[self.0.len() - i]
    }

    /// Product `self * other` (other acts first), reduced.
    pub fn then_after(&self, other: &Word) -> Word {
        Word::reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Inverse: the reversed word, since every letter is an involution.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn uses_only(&self, allowed: &[Color]) -> bool {
        self.0.iter().all(|c| allowed.contains(c))
    }

    /// Action on a colored graph: follow the edge of the current letter if
    /// present, otherwise stay.
    pub fn apply<G: ColorAdjacency + ?Sized>(&self, g: &G, x: u32) -> u32 {
        self.applied().fold(x, |v, c| g.neighbor(v, c).unwrap_or(v))
    }

    /// The vertex path `x_0, x_1, ..., x_k` traced by the action.
    pub fn trace<G: ColorAdjacency + ?Sized>(&self, g: &G, x: u32) -> Vec<u32> {
        let mut path = Vec::with_capacity(self.len() + 1);
        path.push(x);
        let mut v = x;
        for c in self.applied() {
            v = g.neighbor(v, c).unwrap_or(v);
            path.push(v);
        }
        path
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = String;

    /// Parses a string over `ABCD` and reduces it.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters: Result<Vec<Color>, String> = s
            .chars()
            .map(|ch| Color::from_letter(ch).ok_or_else(|| alloc::format!("bad letter {ch:?} in word {s:?}")))
            .collect();
        Ok(Word::reduce(letters?))
    }
}

/// Number of nonempty reduced words of length `len` over `alphabet` letters.
fn reduced_count(alphabet: u64, len: u32) -> Option<u64> {
    if len == 0 {
        return Some(1);
    }
    (alphabet - 1).checked_pow(len - 1)?.checked_mul(alphabet)
}

/// The `n`-th nonempty reduced word (1-based) in length-then-lexicographic
/// order with `A < B < C < D`: `A, B, C, D, AB, AC, AD, BA, ...`.
///
/// # Panics
/// If `n == 0`.
pub fn nth_word(n: u64) -> Word {
    assert!(n >= 1, "word enumeration is 1-based");
    let mut rank = n - 1;
    let mut len = 1u32;
    loop {
        match reduced_count(4, len) {
            Some(count) if rank >= count => {
                rank -= count;
                len += 1;
            }
            _ => break,
        }
    }
    // unrank within length `len`: first letter has 3^(len-1) completions,
    // each later letter 3^(remaining)
    let mut letters = Vec::with_capacity(len as usize);
    let mut block = 3u64.pow(len - 1);
    let first = rank / block;
    rank %= block;
    letters.push(Color::ALL[first as usize]);
    for _ in 1..len {
        block /= 3;
        let pick = (rank / block) as usize;
        rank %= block;
        let prev = *letters.last().expect("nonempty");
        let c = Color::ALL.into_iter().filter(|&c| c != prev).nth(pick).expect("3 choices");
        letters.push(c);
    }
    Word(letters)
}

/// Iterator over `nth_word(1), nth_word(2), ...`.
#[derive(Clone, Debug)]
pub struct WordEnumeration {
    next: u64,
}

impl WordEnumeration {
    pub fn new() -> Self {
        WordEnumeration { next: 1 }
    }
}

impl Default for WordEnumeration {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for WordEnumeration {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let w = nth_word(self.next);
        self.next += 1;
        Some(w)
    }
}

/// All nonempty reduced words of length `<= max_len` over `alphabet`.
pub fn reduced_words_up_to(alphabet: &[Color], max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<Color>> = alloc::vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &c in alphabet {
                if w.last() != Some(&c) {
                    let mut v = w.clone();
                    v.push(c);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned().map(Word));
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ColoredGraph;
    use alloc::string::ToString;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn reduction_examples() {
        assert!(w("AA").is_empty());
        assert!(w("ABBA").is_empty());
        assert_eq!(w("ABAB").to_string(), "ABAB");
        assert!("AX".parse::<Word>().is_err());
    }

    #[test]
    fn enumeration_prefix() {
        let first: Vec<String> = WordEnumeration::new().take(8).map(|w| w.to_string()).collect();
        assert_eq!(first, ["A", "B", "C", "D", "AB", "AC", "AD", "BA"]);
        assert_eq!(nth_word(1).to_string(), "A");
        assert_eq!(nth_word(5).to_string(), "AB");
        assert_eq!(nth_word(8).to_string(), "BA");
        assert_eq!(nth_word(17).to_string(), "ABA");
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let mut brute = reduced_words_up_to(&Color::ALL, 5);
        brute.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        for (i, word) in brute.iter().enumerate() {
            let n = i as u64 + 1;
            assert_eq!(&nth_word(n), word);
            assert!(word.len() as u64 <= n);
        }
    }

    #[test]
    fn path_rule_on_triangle() {
        // (u,v)=A, (v,w)=B, (u,w)=C
        let g = ColoredGraph::from_edges(3, &[(0, 1, Color::A), (1, 2, Color::B), (0, 2, Color::C)]).unwrap();
        // B is absent at u, so u stays; then A moves to v
        assert_eq!(w("AB").apply(&g, 0), 1);
        assert_eq!(w("AB").trace(&g, 0), [0, 0, 1]);
        assert_eq!(Word::identity().apply(&g, 2), 2);
    }

    #[test]
    fn isolated_vertex_is_fixed() {
        let g = ColoredGraph::with_vertices(1);
        for c in Color::ALL {
            assert_eq!(Word::reduce([c]).apply(&g, 0), 0);
        }
    }

    #[test]
    fn letter_indexing_is_application_order() {
        let word = w("AB");
        assert_eq!(word.letter(1), Color::B);
        assert_eq!(word.letter(2), Color::A);
    }
}
