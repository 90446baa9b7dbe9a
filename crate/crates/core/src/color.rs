//! The four edge colors. Each color acts as an involution on vertices.

use core::fmt;

use serde::{Deserialize, Serialize};

/// Edge color; the derived order `A < B < C < D` is the canonical exploration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Color {
    A,
    B,
    C,
    D,
}

impl Color {
    pub const ALL: [Color; 4] = [Color::A, Color::B, Color::C, Color::D];
    /// Generators of the sub-free-product on `A`, `B`, `C`.
    pub const TILDE: [Color; 3] = [Color::A, Color::B, Color::C];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Option<Color> {
        Color::ALL.get(i).copied()
    }

    pub const fn letter(self) -> char {
        match self {
            Color::A => 'A',
            Color::B => 'B',
            Color::C => 'C',
            Color::D => 'D',
        }
    }

    pub fn from_letter(c: char) -> Option<Color> {
        match c {
            'A' => Some(Color::A),
            'B' => Some(Color::B),
            'C' => Some(Color::C),
            'D' => Some(Color::D),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A subset of the four colors, packed into the low nibble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct ColorSet(u8);

impl ColorSet {
    pub const EMPTY: ColorSet = ColorSet(0);
    pub const FULL: ColorSet = ColorSet(0b1111);
    pub const TILDE: ColorSet = ColorSet(0b0111);

    pub fn contains(self, c: Color) -> bool {
        self.0 & (1 << c.index()) != 0
    }

    pub fn with(self, c: Color) -> ColorSet {
        ColorSet(self.0 | (1 << c.index()))
    }

    pub fn iter(self) -> impl Iterator<Item = Color> {
        Color::ALL.into_iter().filter(move |&c| self.contains(c))
    }
}

impl FromIterator<Color> for ColorSet {
    fn from_iter<I: IntoIterator<Item = Color>>(iter: I) -> Self {
        iter.into_iter().fold(ColorSet::EMPTY, ColorSet::with)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_letters() {
        assert!(Color::A < Color::B && Color::B < Color::C && Color::C < Color::D);
        for c in Color::ALL {
            assert_eq!(Color::from_letter(c.letter()), Some(c));
            assert_eq!(Color::from_index(c.index()), Some(c));
        }
        assert_eq!(Color::from_letter('E'), None);
    }

    #[test]
    fn color_sets() {
        let s: ColorSet = [Color::A, Color::C].into_iter().collect();
        assert!(s.contains(Color::A) && !s.contains(Color::B));
        assert_eq!(ColorSet::TILDE.iter().count(), 3);
    }
}
