//! Flat storage for properly 4-edge-colored graphs.
//!
//! Vertices are dense `u32` ids. For each color there is one array mapping a
//! vertex to its partner under that color, or [`ABSENT`]. Properness (at most
//! one edge per color at every vertex) is enforced on insertion, which makes
//! each color array an involution on the vertices it covers.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::color::{Color, ColorSet};
use crate::error::{Error, Result};

/// Sentinel for "no edge of this color".
pub const ABSENT: u32 = u32::MAX;
/// Distance value for vertices not reached by a traversal.
pub const UNREACHED: u32 = u32::MAX;

/// What part of the staged construction a vertex came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    /// Vertex of the block `H_n` (stage 0: the single vertex `p`).
    Block,
    /// Vertex of the block lying in net part `R^n_i`, `i <= n`.
    Net(u16),
    /// Vertex of an attached copy of `G_k`.
    CopyOf(u16),
    /// Vertex of the word path hanging off `x_n`.
    WordPath,
    /// The anchor `x_n` of the word path.
    WordAnchor,
    /// The distinguished frontier vertex `r_n`.
    Frontier,
    /// Vertex outside any staged construction (loaded or hand-built graphs).
    Plain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexMeta {
    pub stage: u32,
    pub role: Role,
}

impl VertexMeta {
    pub const PLAIN: VertexMeta = VertexMeta { stage: 0, role: Role::Plain };

    pub fn new(stage: u32, role: Role) -> Self {
        VertexMeta { stage, role }
    }
}

impl fmt::Display for VertexMeta {
    /// The role tag used in graph files: `H_3`, `R_3_1`, `copy_of_G_1`, ...
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.stage;
        match self.role {
            Role::Block => write!(f, "H_{n}"),
            Role::Net(i) => write!(f, "R_{n}_{i}"),
            Role::CopyOf(k) => write!(f, "copy_of_G_{k}"),
            Role::WordPath => write!(f, "word_path"),
            Role::WordAnchor => write!(f, "x_{n}"),
            Role::Frontier => write!(f, "r_{n}"),
            Role::Plain => write!(f, "plain"),
        }
    }
}

impl VertexMeta {
    /// Inverse of the `Display` tag, given the separately stored stage.
    pub fn parse(stage: u32, tag: &str) -> Option<VertexMeta> {
        let role = if tag == "word_path" {
            Role::WordPath
        } else if tag == "plain" {
            Role::Plain
        } else if let Some(k) = tag.strip_prefix("copy_of_G_") {
            Role::CopyOf(k.parse().ok()?)
        } else if let Some(rest) = tag.strip_prefix("R_") {
            let (n, i) = rest.split_once('_')?;
            if n.parse::<u32>().ok()? != stage {
                return None;
            }
            Role::Net(i.parse().ok()?)
        } else {
            let (head, n) = tag.split_once('_')?;
            if n.parse::<u32>().ok()? != stage {
                return None;
            }
            match head {
                "H" => Role::Block,
                "x" => Role::WordAnchor,
                "r" => Role::Frontier,
                _ => return None,
            }
        };
        Some(VertexMeta { stage, role })
    }
}

/// Anything that answers "who is the `c`-partner of `v`".
pub trait ColorAdjacency {
    fn vertex_count(&self) -> usize;
    fn neighbor(&self, v: u32, c: Color) -> Option<u32>;

    fn degree(&self, v: u32) -> u32 {
        Color::ALL.iter().filter(|&&c| self.neighbor(v, c).is_some()).count() as u32
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ColoredGraph {
    adj: [Vec<u32>; 4],
    meta: Vec<VertexMeta>,
}

impl ColorAdjacency for ColoredGraph {
    #[inline]
    fn vertex_count(&self) -> usize {
        self.meta.len()
    }

    #[inline]
    fn neighbor(&self, v: u32, c: Color) -> Option<u32> {
        let w = self.adj[c.index()][v as usize];
        (w != ABSENT).then_some(w)
    }
}

impl ColoredGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// `n` plain vertices, no edges.
    pub fn with_vertices(n: usize) -> Self {
        let mut g = Self::new();
        g.add_vertices(n, VertexMeta::PLAIN);
        g
    }

    /// Builds from an edge list, rejecting improper colorings.
    pub fn from_edges(n: usize, edges: &[(u32, u32, Color)]) -> Result<Self> {
        let mut g = Self::with_vertices(n);
        for &(u, v, c) in edges {
            g.add_edge(u, v, c)?;
        }
        Ok(g)
    }

    pub fn reserve(&mut self, additional: usize) {
        for a in &mut self.adj {
            a.reserve(additional);
        }
        self.meta.reserve(additional);
    }

    pub fn add_vertex(&mut self, meta: VertexMeta) -> u32 {
        let id = self.meta.len() as u32;
        for a in &mut self.adj {
            a.push(ABSENT);
        }
        self.meta.push(meta);
        id
    }

    pub fn add_vertices(&mut self, n: usize, meta: VertexMeta) -> Range<u32> {
        let start = self.meta.len() as u32;
        for a in &mut self.adj {
            a.resize(a.len() + n, ABSENT);
        }
        self.meta.resize(self.meta.len() + n, meta);
        start..start + n as u32
    }

    fn check_vertex(&self, v: u32) -> Result<()> {
        if (v as usize) < self.meta.len() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, count: self.meta.len() })
        }
    }

    /// Pairs `u` and `v` under color `c`.
    pub fn add_edge(&mut self, u: u32, v: u32, c: Color) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::Loop { vertex: u });
        }
        let arr = &mut self.adj[c.index()];
        for x in [u, v] {
            if arr[x as usize] != ABSENT {
                return Err(Error::ColorOccupied { vertex: x, color: c });
            }
        }
        arr[u as usize] = v;
        arr[v as usize] = u;
        Ok(())
    }

    /// Removes the `c`-edge at `v`, returning its other endpoint.
    pub fn remove_edge(&mut self, v: u32, c: Color) -> Option<u32> {
        let arr = &mut self.adj[c.index()];
        let w = *arr.get(v as usize)?;
        if w == ABSENT {
            return None;
        }
        arr[v as usize] = ABSENT;
        arr[w as usize] = ABSENT;
        Some(w)
    }

    pub fn meta(&self, v: u32) -> VertexMeta {
        self.meta[v as usize]
    }

    pub fn set_meta(&mut self, v: u32, meta: VertexMeta) {
        self.meta[v as usize] = meta;
    }

    pub fn metas(&self) -> &[VertexMeta] {
        &self.meta
    }

    /// Raw partner array for one color (`ABSENT` where missing).
    pub fn color_array(&self, c: Color) -> &[u32] {
        &self.adj[c.index()]
    }

    pub fn colors_at(&self, v: u32) -> ColorSet {
        Color::ALL.into_iter().filter(|&c| self.neighbor(v, c).is_some()).collect()
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = (Color, u32)> + '_ {
        Color::ALL.into_iter().filter_map(move |c| self.neighbor(v, c).map(|w| (c, w)))
    }

    /// Every edge once, as `(u, v, color)` with `u < v`, sorted ascending.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, Color)> + '_ {
        (0..self.vertex_count() as u32).flat_map(move |u| {
            let mut row: [(u32, Color); 4] = [(ABSENT, Color::A); 4];
            let mut len = 0;
            for c in Color::ALL {
                if let Some(v) = self.neighbor(u, c) {
                    if u < v {
                        row[len] = (v, c);
                        len += 1;
                    }
                }
            }
            row[..len].sort_unstable();
            row.into_iter().take(len).map(move |(v, c)| (u, v, c))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.iter().filter(|&&w| w != ABSENT).count()).sum::<usize>() / 2
    }

    /// Full scan of the involution/properness invariant and the degree bound.
    pub fn check_proper(&self) -> Result<()> {
        let n = self.vertex_count();
        for c in Color::ALL {
            let arr = &self.adj[c.index()];
            if arr.len() != n {
                return Err(Error::SizeMismatch(arr.len(), n));
            }
            for (v, &w) in arr.iter().enumerate() {
                if w == ABSENT {
                    continue;
                }
                if w as usize >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, count: n });
                }
                if w as usize == v {
                    return Err(Error::Loop { vertex: w });
                }
                if arr[w as usize] as usize != v {
                    return Err(Error::NotInvolution { color: c, point: v as u32 });
                }
            }
        }
        Ok(())
    }

    /// Copies the subgraph induced on the prefix `0..k` into fresh vertices
    /// tagged with `meta`; returns the new id range (old id `i` maps to `start + i`).
    pub fn append_prefix_copy(&mut self, k: u32, meta: VertexMeta) -> Range<u32> {
        let range = self.add_vertices(k as usize, meta);
        let base = range.start;
        for c in Color::ALL {
            for u in 0..k {
                let w = self.adj[c.index()][u as usize];
                if w != ABSENT && w < k {
                    self.adj[c.index()][(base + u) as usize] = base + w;
                }
            }
        }
        range
    }

    /// Appends a disjoint copy of `other`; returns the id offset.
    pub fn append_graph(&mut self, other: &ColoredGraph, meta: VertexMeta) -> u32 {
        let base = self.vertex_count() as u32;
        self.reserve(other.vertex_count());
        for c in Color::ALL {
            let shifted = other.adj[c.index()].iter().map(|&w| if w == ABSENT { ABSENT } else { w + base });
            self.adj[c.index()].extend(shifted);
        }
        self.meta.resize(self.meta.len() + other.vertex_count(), meta);
        base
    }

    // ---- traversal -------------------------------------------------------

    /// BFS distances from `sources` along edges whose color is in `colors`,
    /// stopping at depth `max_depth`.
    pub fn distances_within(&self, sources: &[u32], colors: ColorSet, max_depth: u32) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s as usize] == UNREACHED {
                dist[s as usize] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize];
            if d >= max_depth {
                continue;
            }
            for c in colors.iter() {
                if let Some(w) = self.neighbor(v, c) {
                    if dist[w as usize] == UNREACHED {
                        dist[w as usize] = d + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        dist
    }

    pub fn distances(&self, sources: &[u32]) -> Vec<u32> {
        self.distances_within(sources, ColorSet::FULL, u32::MAX)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        n == 0 || self.distances(&[0]).iter().all(|&d| d != UNREACHED)
    }

    /// Farthest vertex from `v` (lowest id among ties) and its distance.
    /// Unreachable vertices are ignored.
    pub fn farthest_from(&self, v: u32) -> (u32, u32) {
        farthest(&self.distances(&[v]))
    }

    /// Exact diameter by BFS from every vertex. Quadratic; small graphs only.
    pub fn diameter_exact(&self) -> u32 {
        (0..self.vertex_count() as u32).map(|v| self.farthest_from(v).1).max().unwrap_or(0)
    }

    /// Double-sweep lower bound on the diameter (exact on trees and cycles).
    pub fn diameter_lower_bound(&self) -> u32 {
        if self.vertex_count() == 0 {
            return 0;
        }
        let (a, _) = self.farthest_from(0);
        let (b, d1) = self.farthest_from(a);
        let (_, d2) = self.farthest_from(b);
        d1.max(d2)
    }

    /// True iff every `D`-colored edge is a bridge.
    ///
    /// Contract the `{A,B,C}`-components; the `D`-edges then form a multigraph
    /// on components, and every `D`-edge is a bridge iff that multigraph is a forest.
    pub fn d_bridges(&self) -> bool {
        let n = self.vertex_count();
        let mut uf = UnionFind::new(n);
        for c in Color::TILDE {
            for (v, &w) in self.adj[c.index()].iter().enumerate() {
                if w != ABSENT && (v as u32) < w {
                    uf.union(v as u32, w);
                }
            }
        }
        let comp: Vec<u32> = (0..n as u32).map(|v| uf.find(v)).collect();
        let mut forest = UnionFind::new(n);
        for (v, &w) in self.adj[Color::D.index()].iter().enumerate() {
            if w != ABSENT && (v as u32) < w && !forest.union(comp[v], comp[w as usize]) {
                return false;
            }
        }
        true
    }

    /// Length of the shortest cycle through the BFS tree of `v` that closes
    /// within depth `max_depth`, using only `colors`.
    ///
    /// Minimizing over all `v` with `max_depth = (g - 1) / 2` decides whether
    /// the girth is at least `g`.
    pub fn short_cycle_at(&self, v: u32, colors: ColorSet, max_depth: u32, scratch: &mut LocalBfs) -> Option<u32> {
        scratch.reset();
        scratch.visit(v, 0, ABSENT);
        let mut head = 0;
        let mut best: Option<u32> = None;
        while head < scratch.order.len() {
            let x = scratch.order[head];
            head += 1;
            let (dx, parent_color) = scratch.get(x).expect("visited");
            if best.is_some_and(|b| 2 * dx >= b) {
                break;
            }
            if dx >= max_depth {
                continue;
            }
            for c in colors.iter() {
                let Some(y) = self.neighbor(x, c) else { continue };
                // the tree edge back to the parent
                if c.index() as u32 == parent_color {
                    continue;
                }
                match scratch.get(y) {
                    Some((dy, _)) => {
                        let len = dx + dy + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                    None => scratch.visit(y, dx + 1, c.index() as u32),
                }
            }
        }
        best
    }

    /// Exact girth over the edges with colors in `colors` (`None` if acyclic).
    pub fn girth(&self, colors: ColorSet) -> Option<u32> {
        let mut scratch = LocalBfs::default();
        (0..self.vertex_count() as u32)
            .filter_map(|v| self.short_cycle_at(v, colors, u32::MAX, &mut scratch))
            .min()
    }

    /// Vertices of `set` that have a neighbor outside it.
    pub fn boundary(&self, in_set: impl Fn(u32) -> bool, set: impl Iterator<Item = u32>) -> Vec<u32> {
        set.filter(|&v| self.neighbors(v).any(|(_, w)| !in_set(w))).collect()
    }

    pub fn range_boundary(&self, range: Range<u32>) -> Vec<u32> {
        let r = range.clone();
        self.boundary(move |w| r.contains(&w), range)
    }
}

fn farthest(dist: &[u32]) -> (u32, u32) {
    let mut best = (0u32, 0u32);
    for (v, &d) in dist.iter().enumerate() {
        if d != UNREACHED && d > best.1 {
            best = (v as u32, d);
        }
    }
    best
}

/// Scratch space for many small BFS runs over a large graph: per visited
/// vertex, its depth and a caller-defined tag.
#[derive(Default, Clone, Debug)]
pub struct LocalBfs {
    slots: hashbrown::HashMap<u32, (u32, u32)>,
    pub order: Vec<u32>,
}

impl LocalBfs {
    pub fn reset(&mut self) {
        self.slots.clear();
        self.order.clear();
    }

    pub fn visit(&mut self, v: u32, dist: u32, tag: u32) {
        self.slots.insert(v, (dist, tag));
        self.order.push(v);
    }

    pub fn get(&self, v: u32) -> Option<(u32, u32)> {
        self.slots.get(&v).copied()
    }
}

/// Repeated depth-limited BFS over a large graph without reallocating:
/// visited marks are generation stamps.
#[derive(Clone, Debug, Default)]
pub struct BoundedBfs {
    stamp: Vec<u32>,
    generation: u32,
    queue: VecDeque<(u32, u32)>,
}

impl BoundedBfs {
    pub fn new(n: usize) -> Self {
        BoundedBfs { stamp: vec![0; n], generation: 0, queue: VecDeque::new() }
    }

    /// Calls `visit(v, dist)` for every vertex within `max_depth` of any
    /// source, each once, in nondecreasing distance. Returning `false` from
    /// `visit` stops the search.
    pub fn run(&mut self, g: &ColoredGraph, sources: &[u32], max_depth: u32, mut visit: impl FnMut(u32, u32) -> bool) {
        if self.stamp.len() < g.vertex_count() {
            self.stamp.resize(g.vertex_count(), 0);
        }
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        let gen = self.generation;
        self.queue.clear();
        for &s in sources {
            if self.stamp[s as usize] != gen {
                self.stamp[s as usize] = gen;
                self.queue.push_back((s, 0));
            }
        }
        while let Some((v, d)) = self.queue.pop_front() {
            if !visit(v, d) {
                return;
            }
            if d >= max_depth {
                continue;
            }
            for (_, w) in g.neighbors(v) {
                if self.stamp[w as usize] != gen {
                    self.stamp[w as usize] = gen;
                    self.queue.push_back((w, d + 1));
                }
            }
        }
    }
}

pub(crate) struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// False if already joined.
    pub(crate) fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb) as usize] = ra.min(rb);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn cycle(n: u32, colors: [Color; 2]) -> ColoredGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, colors[(i % 2) as usize])).collect();
        ColoredGraph::from_edges(n as usize, &edges).unwrap()
    }

    #[test]
    fn add_edge_pairs_and_rejects_reuse() {
        let mut g = ColoredGraph::with_vertices(2);
        g.add_edge(0, 1, Color::A).unwrap();
        assert_eq!(g.neighbor(0, Color::A), Some(1));
        assert_eq!(g.neighbor(1, Color::A), Some(0));
        let err = g.add_edge(0, 1, Color::A).unwrap_err();
        assert_eq!(err, Error::ColorOccupied { vertex: 0, color: Color::A });
        assert_eq!(err.to_string(), "color A occupied at 0");
        assert_eq!(g.add_edge(1, 1, Color::B), Err(Error::Loop { vertex: 1 }));
    }

    #[test]
    fn triangle_is_accepted() {
        let g = ColoredGraph::from_edges(3, &[(0, 1, Color::A), (1, 2, Color::B), (2, 0, Color::C)]).unwrap();
        assert!((0..3).all(|v| g.degree(v) == 2));
        g.check_proper().unwrap();
        assert_eq!(g.girth(ColorSet::FULL), Some(3));
    }

    #[test]
    fn edges_sorted_once() {
        let g = cycle(6, [Color::A, Color::B]);
        let e: Vec<_> = g.edges().collect();
        assert_eq!(e.len(), 6);
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert!(e.iter().all(|&(u, v, _)| u < v));
    }

    #[test]
    fn d_bridge_cases() {
        let square = cycle(4, [Color::A, Color::D]);
        assert!(!square.d_bridges());
        let single = ColoredGraph::from_edges(2, &[(0, 1, Color::D)]).unwrap();
        assert!(single.d_bridges());
        // two triangles joined by one D edge
        let mut g = ColoredGraph::from_edges(
            6,
            &[(0, 1, Color::A), (1, 2, Color::B), (2, 0, Color::C), (3, 4, Color::A), (4, 5, Color::B), (5, 3, Color::C)],
        )
        .unwrap();
        g.add_edge(2, 3, Color::D).unwrap();
        assert!(g.d_bridges());
        g.add_edge(0, 5, Color::D).unwrap();
        assert!(!g.d_bridges());
    }

    #[test]
    fn diameters_of_cycle() {
        let g = cycle(20, [Color::A, Color::B]);
        assert_eq!(g.diameter_exact(), 10);
        assert_eq!(g.diameter_lower_bound(), 10);
        assert_eq!(g.girth(ColorSet::FULL), Some(20));
    }

    #[test]
    fn prefix_copy_drops_outgoing_edges() {
        let mut g = ColoredGraph::from_edges(3, &[(0, 1, Color::A), (1, 2, Color::D)]).unwrap();
        let r = g.append_prefix_copy(2, VertexMeta::new(1, Role::CopyOf(1)));
        assert_eq!(r, 3..5);
        assert_eq!(g.neighbor(3, Color::A), Some(4));
        assert_eq!(g.neighbor(4, Color::D), None);
        g.check_proper().unwrap();
    }

    #[test]
    fn meta_tags_round_trip() {
        for (stage, role) in [
            (3, Role::Block),
            (3, Role::Net(2)),
            (2, Role::CopyOf(1)),
            (4, Role::WordPath),
            (4, Role::WordAnchor),
            (5, Role::Frontier),
        ] {
            let m = VertexMeta::new(stage, role);
            assert_eq!(VertexMeta::parse(stage, &m.to_string()), Some(m));
        }
        assert_eq!(VertexMeta::parse(2, "H_3"), None);
    }
}
