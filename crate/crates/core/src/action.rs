//! The action of the generators on colored graphs: Schreier graphs, orbits
//! and freeness, plus the truncated dihedral example.

use alloc::vec;
use alloc::vec::Vec;

use crate::color::{Color, ColorSet};
use crate::error::{Error, Result};
use crate::graph::{ColorAdjacency, ColoredGraph, UNREACHED};

/// Colored graph of an action given by involutive permutations, one per
/// color in order `A, B, C, D`. Fixed points get no edge of that color.
pub fn schreier_graph(images: &[Vec<u32>]) -> Result<ColoredGraph> {
    let n = images.first().map_or(0, Vec::len);
    let mut g = ColoredGraph::with_vertices(n);
    for (i, perm) in images.iter().enumerate() {
        let color = Color::from_index(i).ok_or_else(|| Error::Config(alloc::format!("{} generators, at most 4", images.len())))?;
        if perm.len() != n {
            return Err(Error::SizeMismatch(perm.len(), n));
        }
        for (x, &y) in perm.iter().enumerate() {
            let x = x as u32;
            if y as usize >= n || perm[y as usize] != x {
                return Err(Error::NotInvolution { color, point: x });
            }
            if x < y {
                g.add_edge(x, y, color)?;
            }
        }
    }
    Ok(g)
}

/// The permutation induced by one color (identity where the edge is absent).
pub fn generator_permutation(g: &ColoredGraph, c: Color) -> Vec<u32> {
    (0..g.vertex_count() as u32).map(|v| g.neighbor(v, c).unwrap_or(v)).collect()
}

/// Closure of `{x}` under the listed generators, ascending.
pub fn orbit(g: &ColoredGraph, x: u32, generators: ColorSet) -> Vec<u32> {
    let dist = g.distances_within(&[x], generators, u32::MAX);
    dist.iter().enumerate().filter(|(_, &d)| d != UNREACHED).map(|(v, _)| v as u32).collect()
}

/// True iff no nonempty reduced word of length `<= k` over `generators`
/// fixes `x`.
///
/// Walks all reduced words as a depth-first search over `(vertex, last
/// letter)`, applying the stay rule at every step, so a generator missing at
/// `x` or at any intermediate vertex is accounted for.
pub fn is_free<G: ColorAdjacency + ?Sized>(g: &G, x: u32, k: u32, generators: ColorSet) -> bool {
    if k == 0 {
        return true;
    }
    let mut stack: Vec<(u32, Option<Color>, u32)> = vec![(x, None, 0)];
    while let Some((v, last, depth)) = stack.pop() {
        for c in generators.iter() {
            if Some(c) == last {
                continue;
            }
            let w = g.neighbor(v, c).unwrap_or(v);
            if w == x {
                return false;
            }
            if depth + 1 < k {
                stack.push((w, Some(c), depth + 1));
            }
        }
    }
    true
}

/// The dihedral action on `{1, ..., n}` truncated at `n`: `A` swaps
/// `2j-1 <-> 2j`, `B` swaps `2j <-> 2j+1`, and `B` fixes `1`.
///
/// Integer `k` is vertex `k - 1`; vertex `n - 1` is the truncation frontier.
#[derive(Clone, Debug)]
pub struct DihedralDemo {
    pub graph: ColoredGraph,
    pub n: u32,
}

impl DihedralDemo {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooSmall(n));
        }
        let mut graph = ColoredGraph::with_vertices(n as usize);
        for k in 1..n {
            // k and k+1 as integers
            let color = if k % 2 == 1 { Color::A } else { Color::B };
            graph.add_edge(k - 1, k, color)?;
        }
        Ok(DihedralDemo { graph, n })
    }

    pub fn vertex(&self, integer: u32) -> u32 {
        integer - 1
    }

    pub fn frontier(&self) -> u32 {
        self.n - 1
    }

    /// All vertices except the frontier.
    pub fn region(&self) -> Vec<u32> {
        (0..self.n - 1).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{reduced_words_up_to, Word};

    #[test]
    fn schreier_examples() {
        let id: Vec<u32> = (0..3).collect();
        let g = schreier_graph(&[id.clone(), id.clone(), id]).unwrap();
        assert_eq!(g.edge_count(), 0);

        let g = schreier_graph(&[vec![1, 0, 2], vec![0, 2, 1]]).unwrap();
        assert_eq!(g.neighbor(0, Color::A), Some(1));
        assert_eq!(g.neighbor(1, Color::B), Some(2));
        assert_eq!(g.edge_count(), 2);
        assert_eq!(generator_permutation(&g, Color::B), [0, 2, 1]);

        assert!(matches!(schreier_graph(&[vec![1, 2, 0]]), Err(Error::NotInvolution { .. })));
    }

    #[test]
    fn orbit_examples() {
        let g = ColoredGraph::from_edges(4, &[(0, 1, Color::A), (1, 2, Color::D)]).unwrap();
        assert_eq!(orbit(&g, 0, ColorSet::FULL), [0, 1, 2]);
        assert_eq!(orbit(&g, 0, ColorSet::TILDE), [0, 1]);
        assert_eq!(orbit(&g, 3, ColorSet::FULL), [3]);
    }

    #[test]
    fn freeness_stay_rule() {
        // A,B cycle: C is missing everywhere
        let edges: Vec<_> = (0..8u32).map(|i| (i, (i + 1) % 8, if i % 2 == 0 { Color::A } else { Color::B })).collect();
        let g = ColoredGraph::from_edges(8, &edges).unwrap();
        assert!(!is_free(&g, 0, 3, ColorSet::TILDE));
        assert!(is_free(&g, 0, 7, [Color::A, Color::B].into_iter().collect()));
        assert!(!is_free(&g, 0, 8, [Color::A, Color::B].into_iter().collect()));
        assert!(!is_free(&ColoredGraph::with_vertices(1), 0, 1, ColorSet::TILDE));
    }

    #[test]
    fn freeness_sees_intermediate_stays() {
        // x has all of A,B,C; its A-neighbor lacks C, so ACA fixes x
        let g =ColoredGraph::from_edges(4, &[(0, 1, Color::A), (0, 2, Color::B), (0, 3, Color::C)]).unwrap();
        assert!(!is_free(&g, 0, 3, ColorSet::TILDE));
        let aca: Word = "ACA".parse().unwrap();
        assert_eq!(aca.apply(&g, 0), 0);
    }

    #[test]
    fn dihedral_rules() {
        let d = DihedralDemo::new(10).unwrap();
        let b = Word::reduce([Color::B]);
        let a = Word::reduce([Color::A]);
        assert_eq!(b.apply(&d.graph, d.vertex(1)), d.vertex(1));
        assert_eq!(a.apply(&d.graph, d.vertex(1)), d.vertex(2));
        assert_eq!(b.apply(&d.graph, d.vertex(2)), d.vertex(3));
        assert_eq!(a.apply(&d.graph, d.vertex(3)), d.vertex(4));
        assert!(DihedralDemo::new(2).is_err());
    }

    #[test]
    fn free_agrees_with_word_enumeration_on_small_graph() {
        let g = ColoredGraph::from_edges(
            5,
            &[(0, 1, Color::A), (1, 2, Color::B), (2, 3, Color::C), (3, 4, Color::A), (4, 0, Color::B), (1, 4, Color::C)],
        )
        .unwrap();
        for k in 1..=6 {
            let words = reduced_words_up_to(&Color::TILDE, k as usize);
            for x in 0..5 {
                let brute = words.iter().all(|w| w.apply(&g, x) != x);
                assert_eq!(is_free(&g, x, k, ColorSet::TILDE), brute, "x={x} k={k}");
            }
        }
    }
}
