//! Blocks for the staged construction: `A,B`-alternating cycles and
//! large-girth cubic rings colored by `A, B, C`.
//!
//! A cubic ring is built from a gadget `K`: a cubic graph whose `A,B` edges
//! form a Hamiltonian cycle and whose `C` edges are chords. One edge
//! `e = (u, v)` of color `c` is cut, and `M` copies of `K - e` are chained in
//! a ring by `c`-edges `v_j -- u_{j+1}`. A cycle of the ring either stays in
//! one copy (length at least `girth(K)`) or crosses every link (length at
//! least `M * (t + 1)` where `t = d_{K-e}(u, v) >= girth(K) - 1`), so the
//! ring keeps the girth of `K` while its diameter grows linearly in `M`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::color::{Color, ColorSet};
use crate::error::{Error, Result};
use crate::graph::{BoundedBfs, ColorAdjacency, ColoredGraph, UNREACHED};

/// The `2 * half`-cycle with edges alternately `A` and `B`; vertex `i` is
/// joined to `i + 1` by `A` when `i` is even.
///
/// # Panics
/// If `half < 2`.
pub fn make_cycle_block(half: u32) -> ColoredGraph {
    assert!(half >= 2, "cycle block needs half-length >= 2");
    let n = 2 * half;
    let mut g = ColoredGraph::with_vertices(n as usize);
    for i in 0..n {
        let c = if i % 2 == 0 { Color::A } else { Color::B };
        g.add_edge(i, (i + 1) % n, c).expect("alternating cycle is proper");
    }
    g
}

/// Cubic graph from LCF notation: Hamiltonian cycle `0..n` colored
/// alternately `A, B`, plus `C`-chords `i -- i + offsets[i mod len]`.
pub fn lcf_graph(offsets: &[i32], repeats: u32) -> Result<ColoredGraph> {
    let n = offsets.len() as i64 * i64::from(repeats);
    if n < 4 || n % 2 != 0 {
        return Err(Error::Config(format!("LCF graph needs an even order >= 4, got {n}")));
    }
    let mut g = make_cycle_block((n / 2) as u32);
    for i in 0..n {
        let j = (i + i64::from(offsets[(i as usize) % offsets.len()])).rem_euclid(n);
        match g.neighbor(i as u32, Color::C) {
            Some(w) if w as i64 == j => {}
            Some(_) => return Err(Error::Inconsistent(format!("LCF chord at {i} is not symmetric"))),
            None => g.add_edge(i as u32, j as u32, Color::C)?,
        }
    }
    Ok(g)
}

struct CatalogEntry {
    name: &'static str,
    offsets: &'static [i32],
    repeats: u32,
    girth: u32,
}

/// Known small cubic graphs of large girth, smallest first.
const CATALOG: &[CatalogEntry] = &[
    CatalogEntry { name: "heawood", offsets: &[5, -5], repeats: 7, girth: 6 },
    CatalogEntry { name: "tutte-coxeter", offsets: &[-13, -9, 7, -7, 9, 13], repeats: 5, girth: 8 },
    CatalogEntry {
        name: "tutte-12-cage",
        offsets: &[17, 27, -13, -59, -35, 35, -11, 13, -53, 53, -27, 21, 57, 11, -21, -57, 59, -17],
        repeats: 7,
        girth: 12,
    },
];

/// Where a gadget came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GadgetSource {
    Catalog(String),
    /// Randomized greedy chord placement; `attempts` counts restarts.
    Search { attempts: u32 },
}

#[derive(Clone, Debug)]
pub struct Gadget {
    pub graph: ColoredGraph,
    pub girth: u32,
    pub source: GadgetSource,
}

fn moore_bound(girth: u32) -> u64 {
    let r = girth / 2;
    if girth % 2 == 0 {
        2 * ((1u64 << r) - 1)
    } else {
        1 + 3 * ((1u64 << r) - 1)
    }
}

/// Largest gadget order tried by the randomized search.
const SEARCH_MAX_ORDER: u32 = 4096;
const SEARCH_RESTARTS: u32 = 48;

/// One greedy pass: chords from even vertices (in random order) to
/// unmatched odd vertices at distance `>= girth - 1` and cyclic span
/// `>= span`. The graph stays bipartite, so only even cycles occur.
fn greedy_chords(order: u32, girth: u32, span: u32, rng: &mut ChaCha8Rng) -> Option<ColoredGraph> {
    let mut g = make_cycle_block(order / 2);
    let mut evens: Vec<u32> = (0..order).step_by(2).collect();
    evens.shuffle(rng);
    let mut matched = vec![false; order as usize];
    let mut near = vec![false; order as usize];
    let mut bfs = BoundedBfs::new(order as usize);
    let mut candidates = Vec::new();
    for x in evens {
        let mut reached = Vec::new();
        bfs.run(&g, &[x], girth.saturating_sub(2), |w, _| {
            reached.push(w);
            true
        });
        for &w in &reached {
            near[w as usize] = true;
        }
        candidates.clear();
        candidates.extend((1..order).step_by(2).filter(|&y| {
            let d = x.abs_diff(y);
            !matched[y as usize] && !near[y as usize] && d.min(order - d) >= span
        }));
        for &w in &reached {
            near[w as usize] = false;
        }
        let &y = candidates.get(rng.gen_range(0..candidates.len().max(1)))?;
        matched[y as usize] = true;
        g.add_edge(x, y, Color::C).expect("both endpoints free");
    }
    Some(g)
}

/// Randomized search for a cubic gadget of girth `>= girth` whose chords
/// span at least `span` along the Hamiltonian cycle.
pub fn search_gadget(girth: u32, span: u32, rng: &mut ChaCha8Rng) -> Result<Gadget> {
    let mut order = (2 * moore_bound(girth)).max(2 * u64::from(span) + 2) as u32;
    order += order % 2;
    let mut attempts = 0;
    while order <= SEARCH_MAX_ORDER {
        for _ in 0..SEARCH_RESTARTS {
            attempts += 1;
            if let Some(g) = greedy_chords(order, girth, span, rng) {
                let measured = g.girth(ColorSet::TILDE).unwrap_or(u32::MAX);
                debug_assert!(measured >= girth);
                return Ok(Gadget { graph: g, girth: measured, source: GadgetSource::Search { attempts } });
            }
        }
        order = (order + order / 2 + 1) & !1;
    }
    Err(Error::Budget { what: "cubic gadget order", needed: u64::from(order), budget: u64::from(SEARCH_MAX_ORDER) })
}

/// Smallest catalog gadget of girth `>= girth`, verified on construction.
pub fn catalog_gadget(girth: u32) -> Option<Gadget> {
    CATALOG.iter().filter(|e| e.girth >= girth).find_map(|e| {
        let g = lcf_graph(e.offsets, e.repeats).ok()?;
        let measured = g.girth(ColorSet::TILDE)?;
        (measured == e.girth).then(|| Gadget { graph: g, girth: measured, source: GadgetSource::Catalog(e.name.into()) })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicBlockParams {
    pub min_diam: u32,
    pub girth: u32,
    /// Minimum chord span for searched gadgets; odd and `>= girth - 1`.
    pub chord_span: u32,
    pub seed: u64,
    pub max_vertices: u64,
}

/// Summary of a generated cubic block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicBlockInfo {
    pub gadget: GadgetSource,
    pub gadget_order: u32,
    pub gadget_girth: u32,
    pub cut_color: Color,
    /// `d_{K-e}(u, v)` for the cut edge.
    pub through_distance: u32,
    pub copies: u32,
    pub vertices: u64,
    /// Certified girth lower bound `min(girth(K), copies * (t + 1))`.
    pub girth_bound: u32,
    pub diameter_lower_bound: u32,
}

/// The edge of `k` whose removal leaves its endpoints farthest apart
/// (lowest edge on ties), with that distance.
fn best_cut(k: &ColoredGraph) -> (u32, u32, Color, u32) {
    let mut best: Option<(u32, u32, Color, u32)> = None;
    let mut h = k.clone();
    for (u, v, c) in k.edges() {
        h.remove_edge(u, c);
        let t = h.distances(&[u])[v as usize];
        h.add_edge(u, v, c).expect("restoring the removed edge");
        if best.map_or(true, |b| t > b.3) {
            best = Some((u, v, c, t));
        }
    }
    best.expect("gadget has edges")
}

/// Ring of `copies` copies of `k - e` linked by `c`-edges.
fn ring(k: &ColoredGraph, u: u32, v: u32, c: Color, copies: u32) -> ColoredGraph {
    let mut cut = k.clone();
    cut.remove_edge(u, c);
    let p = k.vertex_count() as u32;
    let mut g = ColoredGraph::new();
    g.reserve((p * copies) as usize);
    for _ in 0..copies {
        g.append_graph(&cut, crate::graph::VertexMeta::PLAIN);
    }
    for j in 0..copies {
        let next = (j + 1) % copies;
        g.add_edge(j * p + v, next * p + u, c).expect("cut endpoints lack the cut color");
    }
    g
}

/// Connected, properly `A,B,C`-colored, 3-regular block with girth
/// `>= girth` and certified diameter `>= min_diam`.
pub fn make_cubic_block(params: &CubicBlockParams) -> Result<(ColoredGraph, CubicBlockInfo)> {
    let CubicBlockParams { min_diam, girth, chord_span, seed, max_vertices } = *params;
    if chord_span % 2 == 0 || chord_span + 1 < girth {
        return Err(Error::Config(format!("chord span {chord_span} must be odd and >= girth - 1 = {}", girth.saturating_sub(1))));
    }
    if min_diam == 0 || girth < 3 {
        return Err(Error::Config(format!("cubic block needs min_diam >= 1 and girth >= 3 (got {min_diam}, {girth})")));
    }
    let gadget = match catalog_gadget(girth) {
        Some(g) => g,
        None => search_gadget(girth, chord_span, &mut ChaCha8Rng::seed_from_u64(seed))?,
    };
    let k = &gadget.graph;
    let p = k.vertex_count() as u64;
    let (u, v, c, t) = best_cut(k);
    let step = u64::from(t) + 1;
    let mut copies = (2 * u64::from(min_diam)).div_ceil(step).max(1);
    loop {
        let needed = copies * p;
        if needed > max_vertices || needed > u64::from(u32::MAX - 1) {
            return Err(Error::Budget { what: "cubic block vertices", needed, budget: max_vertices });
        }
        let g = ring(k, u, v, c, copies as u32);
        let diam = g.diameter_lower_bound();
        if diam >= min_diam {
            let info = CubicBlockInfo {
                gadget: gadget.source.clone(),
                gadget_order: p as u32,
                gadget_girth: gadget.girth,
                cut_color: c,
                through_distance: t,
                copies: copies as u32,
                vertices: needed,
                girth_bound: gadget.girth.min((copies * step).min(u64::from(u32::MAX)) as u32),
                diameter_lower_bound: diam,
            };
            verify_cubic(&g, girth, &info)?;
            return Ok((g, info));
        }
        copies += 1 + copies / 16;
    }
}

/// Checks the cubic block contract; the girth is taken from the certificate.
pub fn verify_cubic(g: &ColoredGraph, girth: u32, info: &CubicBlockInfo) -> Result<()> {
    g.check_proper()?;
    for v in 0..g.vertex_count() as u32 {
        let colors = g.colors_at(v);
        if colors != ColorSet::TILDE {
            return Err(Error::Inconsistent(format!("vertex {v} of a cubic block has colors {colors:?}")));
        }
    }
    if g.distances(&[0]).contains(&UNREACHED) {
        return Err(Error::Inconsistent("cubic block is disconnected".into()));
    }
    if info.girth_bound < girth {
        return Err(Error::Inconsistent(format!("girth bound {} below target {girth}", info.girth_bound)));
    }
    Ok(())
}
