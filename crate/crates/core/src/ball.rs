//! Rooted colored balls and their canonical codes.
//!
//! In a properly colored graph every vertex has at most one neighbor per
//! color, so a breadth-first search from the root that scans colors in the
//! fixed order `A < B < C < D` discovers vertices in an order that any
//! root- and color-preserving isomorphism must respect. Numbering vertices by
//! discovery and writing, for each vertex and color, the number of the
//! neighbor (or "absent") yields a code that is equal for two balls exactly
//! when they are isomorphic. Balls are spanned subgraphs: edges leaving the
//! ball are not recorded.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_128;

use crate::color::Color;
use crate::graph::{ColorAdjacency, ColoredGraph, LocalBfs, ABSENT};

/// 128-bit hash of a canonical code; the key used in type tables.
///
/// Serialized as 32 hex digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint(pub u128);

impl Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fingerprint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let hex = alloc::string::String::deserialize(d)?;
        u128::from_str_radix(&hex, 16).map(Fingerprint).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

/// Canonical code of a rooted colored ball.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BallType {
    code: Vec<u8>,
}

impl BallType {
    pub fn from_code(code: Vec<u8>) -> Self {
        BallType { code }
    }

    pub fn code(&self) -> &[u8] {
        &self.code
    }

    pub fn radius(&self) -> u32 {
        read_varint(&self.code, &mut 0)
    }

    pub fn vertex_count(&self) -> u32 {
        let mut at = 0;
        read_varint(&self.code, &mut at);
        read_varint(&self.code, &mut at)
    }

    /// Degree of the root inside the ball. Equals the degree in the host
    /// graph whenever the radius is at least 1.
    pub fn root_degree(&self) -> u32 {
        root_degree_of_code(&self.code)
    }

    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint(xxh3_128(&self.code))
    }
}

pub(crate) fn root_degree_of_code(code: &[u8]) -> u32 {
    let mut at = 0;
    read_varint(code, &mut at);
    read_varint(code, &mut at);
    (0..4).filter(|_| read_varint(code, &mut at) != 0).count() as u32
}

fn push_varint(out: &mut Vec<u8>, mut x: u32) {
    while x >= 0x80 {
        out.push((x as u8) | 0x80);
        x >>= 7;
    }
    out.push(x as u8);
}

fn read_varint(code: &[u8], at: &mut usize) -> u32 {
    let mut x = 0u32;
    let mut shift = 0;
    loop {
        let b = code[*at];
        *at += 1;
        x |= u32::from(b & 0x7f) << shift;
        if b & 0x80 == 0 {
            return x;
        }
        shift += 7;
    }
}

/// Reusable scratch for computing codes; one per worker thread.
#[derive(Default, Clone, Debug)]
pub struct BallCoder {
    bfs: LocalBfs,
    code: Vec<u8>,
    local: Vec<[u32; 4]>,
    depth: Vec<u32>,
}

impl BallCoder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Discovers the ball in canonical order; `self.bfs.order[i]` gets index `i`.
    fn discover<G: ColorAdjacency + ?Sized>(&mut self, g: &G, root: u32, radius: u32) {
        let bfs = &mut self.bfs;
        bfs.reset();
        bfs.visit(root, 0, 0);
        let mut head = 0;
        while head < bfs.order.len() {
            let v = bfs.order[head];
            head += 1;
            let (d, _) = bfs.get(v).expect("visited");
            if d == radius {
                // all remaining vertices are in the last layer
                break;
            }
            for c in Color::ALL {
                if let Some(w) = g.neighbor(v, c) {
                    if bfs.get(w).is_none() {
                        let idx = bfs.order.len() as u32;
                        bfs.visit(w, d + 1, idx);
                    }
                }
            }
        }
    }

    /// Canonical code of `B_radius(root)` in `g`.
    pub fn encode<G: ColorAdjacency + ?Sized>(&mut self, g: &G, root: u32, radius: u32) -> &[u8] {
        self.discover(g, root, radius);
        self.code.clear();
        push_varint(&mut self.code, radius);
        push_varint(&mut self.code, self.bfs.order.len() as u32);
        for &v in &self.bfs.order {
            for c in Color::ALL {
                let slot = g
                    .neighbor(v, c)
                    .and_then(|w| self.bfs.get(w))
                    .map_or(0, |(_, idx)| idx + 1);
                push_varint(&mut self.code, slot);
            }
        }
        &self.code
    }

    pub fn ball_type<G: ColorAdjacency + ?Sized>(&mut self, g: &G, root: u32, radius: u32) -> BallType {
        BallType { code: self.encode(g, root, radius).to_vec() }
    }

    pub fn fingerprint<G: ColorAdjacency + ?Sized>(&mut self, g: &G, root: u32, radius: u32) -> Fingerprint {
        Fingerprint(xxh3_128(self.encode(g, root, radius)))
    }

    /// Fingerprint plus the root degree read off the code.
    pub fn fingerprint_with_degree<G: ColorAdjacency + ?Sized>(&mut self, g: &G, root: u32, radius: u32) -> (Fingerprint, u32) {
        let code = self.encode(g, root, radius);
        (Fingerprint(xxh3_128(code)), root_degree_of_code(code))
    }

    /// Fingerprints of `B_0(root), ..., B_{r_max}(root)` from one search,
    /// appended to `out`.
    ///
    /// The canonical order at radius `r` is the prefix of the order at
    /// `r_max` formed by the vertices at depth `<= r`.
    pub fn fingerprints_upto<G: ColorAdjacency + ?Sized>(&mut self, g: &G, root: u32, r_max: u32, out: &mut Vec<Fingerprint>) {
        self.discover(g, root, r_max);
        let order = &self.bfs.order;
        self.local.clear();
        self.depth.clear();
        for &v in order {
            let (d, _) = self.bfs.get(v).expect("member");
            self.depth.push(d);
            let mut row = [ABSENT; 4];
            for c in Color::ALL {
                if let Some((_, idx)) = g.neighbor(v, c).and_then(|w| self.bfs.get(w)) {
                    row[c.index()] = idx;
                }
            }
            self.local.push(row);
        }
        let mut size = 0;
        for r in 0..=r_max {
            while size < self.depth.len() && self.depth[size] <= r {
                size += 1;
            }
            self.code.clear();
            push_varint(&mut self.code, r);
            push_varint(&mut self.code, size as u32);
            for row in &self.local[..size] {
                for &w in row {
                    let slot = if w != ABSENT && self.depth[w as usize] <= r { w + 1 } else { 0 };
                    push_varint(&mut self.code, slot);
                }
            }
            out.push(Fingerprint(xxh3_128(&self.code)));
        }
    }

    /// Vertices of the last computed ball in canonical order.
    pub fn members(&self) -> &[u32] {
        &self.bfs.order
    }
}

/// An extracted ball: the induced colored subgraph on `{y : d(root, y) <= radius}`,
/// with local ids in canonical discovery order (the root is local 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedBall {
    pub radius: u32,
    /// Host ids, indexed by local id.
    pub members: Vec<u32>,
    /// Host distance from the root, indexed by local id.
    pub depth: Vec<u32>,
    adj: Vec<[u32; 4]>,
}

impl RootedBall {
    pub fn root(&self) -> u32 {
        self.members[0]
    }

    /// Induced edges as local `(u, v, color)`, `u < v`.
    pub fn edges(&self) -> Vec<(u32, u32, Color)> {
        let mut out = Vec::new();
        for (u, row) in self.adj.iter().enumerate() {
            for c in Color::ALL {
                let w = row[c.index()];
                if w != ABSENT && (u as u32) < w {
                    out.push((u as u32, w, c));
                }
            }
        }
        out
    }

    /// Builds a ball from a local edge list; local vertex 0 is the root.
    /// Used for relabeling experiments and tests.
    pub fn from_local(radius: u32, n: usize, edges: &[(u32, u32, Color)]) -> Self {
        let mut adj = alloc::vec![[ABSENT; 4]; n];
        for &(u, v, c) in edges {
            adj[u as usize][c.index()] = v;
            adj[v as usize][c.index()] = u;
        }
        let members: Vec<u32> = (0..n as u32).collect();
        let mut ball = RootedBall { radius, members, depth: alloc::vec![0; n], adj };
        let dist = {
            let mut g = ColoredGraph::with_vertices(n);
            for &(u, v, c) in edges {
                let _ = g.add_edge(u, v, c);
            }
            g.distances(&[0])
        };
        ball.depth = dist;
        ball
    }
}

impl ColorAdjacency for RootedBall {
    fn vertex_count(&self) -> usize {
        self.members.len()
    }

    fn neighbor(&self, v: u32, c: Color) -> Option<u32> {
        let w = self.adj[v as usize][c.index()];
        (w != ABSENT).then_some(w)
    }
}

/// The ball of radius `r` around `x`.
pub fn ball(g: &ColoredGraph, x: u32, r: u32) -> RootedBall {
    let mut coder = BallCoder::new();
    coder.discover(g, x, r);
    let order = &coder.bfs.order;
    let local = |w: u32| coder.bfs.get(w).map(|(_, idx)| idx);
    let adj = order
        .iter()
        .map(|&v| {
            let mut row = [ABSENT; 4];
            for c in Color::ALL {
                if let Some(i) = g.neighbor(v, c).and_then(local) {
                    row[c.index()] = i;
                }
            }
            row
        })
        .collect();
    let depth = order.iter().map(|&v| coder.bfs.get(v).expect("member").0).collect();
    RootedBall { radius: r, members: order.clone(), depth, adj }
}

/// Canonical code of an extracted ball.
pub fn canonical_code(b: &RootedBall) -> BallType {
    BallCoder::new().ball_type(b, 0, b.radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ColoredGraph;

    fn cycle(n: u32) -> ColoredGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, if i % 2 == 0 { Color::A } else { Color::B })).collect();
        ColoredGraph::from_edges(n as usize, &edges).unwrap()
    }

    #[test]
    fn radius_zero_is_root_only() {
        let g = cycle(6);
        let b = ball(&g, 3, 0);
        assert_eq!(b.members, [3]);
        assert!(b.edges().is_empty());
        let t = canonical_code(&b);
        assert_eq!(t.vertex_count(), 1);
        assert_eq!(t.root_degree(), 0);
    }

    #[test]
    fn cycle_ball_is_path_segment() {
        let g = cycle(20);
        let b = ball(&g, 5, 3);
        let mut m = b.members.clone();
        m.sort();
        assert_eq!(m, [2, 3, 4, 5, 6, 7, 8]);
        assert_eq!(b.edges().len(), 6);
    }

    #[test]
    fn codes_from_graph_and_from_ball_agree() {
        let g = cycle(10);
        let mut coder = BallCoder::new();
        for r in 0..6 {
            for x in 0..10 {
                let direct = coder.ball_type(&g, x, r);
                assert_eq!(direct, canonical_code(&ball(&g, x, r)));
                assert_eq!(direct.radius(), r);
            }
        }
    }

    #[test]
    fn single_edge_endpoints_share_a_type() {
        let g = ColoredGraph::from_edges(2, &[(0, 1, Color::A)]).unwrap();
        let mut c = BallCoder::new();
        assert_eq!(c.ball_type(&g, 0, 1), c.ball_type(&g, 1, 1));
        assert_eq!(c.ball_type(&g, 0, 1).root_degree(), 1);
    }

    #[test]
    fn spanned_semantics_closes_last_layer() {
        // triangle: the radius-1 ball includes the edge between the two neighbors
        let g = ColoredGraph::from_edges(3, &[(0, 1, Color::A), (1, 2, Color::B), (2, 0, Color::C)]).unwrap();
        assert_eq!(ball(&g, 0, 1).edges().len(), 3);
        // path: the edge leaving the ball is not recorded
        let p = ColoredGraph::from_edges(3, &[(0, 1, Color::A), (1, 2, Color::B)]).unwrap();
        let mut c = BallCoder::new();
        assert_eq!(c.ball_type(&p, 0, 1), c.ball_type(&ColoredGraph::from_edges(2, &[(0, 1, Color::A)]).unwrap(), 0, 1));
    }

    #[test]
    fn one_search_matches_per_radius_codes() {
        let g = ColoredGraph::from_edges(
            7,
            &[(0, 1, Color::A), (1, 2, Color::B), (2, 3, Color::A), (3, 0, Color::B), (0, 4, Color::C), (4, 5, Color::D), (5, 6, Color::A), (2, 6, Color::C)],
        )
        .unwrap();
        let mut c = BallCoder::new();
        let mut out = Vec::new();
        for x in 0..7 {
            out.clear();
            c.fingerprints_upto(&g, x, 5, &mut out);
            for r in 0..=5 {
                assert_eq!(out[r as usize], c.fingerprint(&g, x, r), "x={x} r={r}");
            }
        }
    }

    #[test]
    fn varint_large_indices() {
        let mut v = Vec::new();
        for x in [0u32, 1, 127, 128, 300, 70000] {
            v.clear();
            push_varint(&mut v, x);
            assert_eq!(read_varint(&v, &mut 0), x);
        }
    }
}
