//! Finite-depth type tables: the `r`-types of a vertex set for
//! `r = 0..=r_max`, refinement maps, genericity and holonomy measurements,
//! and the pushforward defect of counting measures.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use crate::action::DihedralDemo;
use crate::ball::{BallCoder, BallType, Fingerprint};
use crate::color::Color;
use crate::construction::BuildLog;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::graph::{ColorAdjacency, ColoredGraph, UNREACHED};
use crate::word::Word;

/// Vertices per work item when computing types.
const CHUNK: usize = 2048;

/// Occurrences of one type in the table's region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeStats {
    pub count: u64,
    /// Root degree read off the canonical code.
    pub root_degree: u32,
    /// Sum of host-graph degrees over the occurrences.
    pub degree_sum: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypeLevel {
    pub radius: u32,
    /// Type of `region[i]`.
    pub per_vertex: Vec<Fingerprint>,
    pub stats: BTreeMap<Fingerprint, TypeStats>,
    /// Refinement map to radius `radius - 1` (empty at radius 0).
    pub parent: BTreeMap<Fingerprint, Fingerprint>,
}

/// Types of every vertex of `region` (sorted, distinct), computed in the
/// whole host graph.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeTable {
    pub region: Vec<u32>,
    pub levels: Vec<TypeLevel>,
}

impl TypeTable {
    pub fn r_max(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn level(&self, r: u32) -> &TypeLevel {
        &self.levels[r as usize]
    }

    pub fn position(&self, v: u32) -> Option<usize> {
        self.region.binary_search(&v).ok()
    }

    pub fn type_of(&self, v: u32, r: u32) -> Option<Fingerprint> {
        self.position(v).map(|i| self.levels[r as usize].per_vertex[i])
    }
}

/// Computes the table; fails if a refinement map would be ill-defined
/// (which only a fingerprint collision can cause).
pub fn compute_types<G, E>(g: &G, r_max: u32, region: &[u32], exec: &E) -> Result<TypeTable>
where
    G: ColorAdjacency + Sync + ?Sized,
    E: Executor,
{
    let mut region = region.to_vec();
    region.sort_unstable();
    region.dedup();
    let width = r_max as usize + 1;
    let chunks: Vec<u32> = (0..region.len().div_ceil(CHUNK) as u32).collect();
    let region_ref = &region;
    let parts = exec.map(&chunks, move |coder: &mut BallCoder, ci| {
        let start = ci as usize * CHUNK;
        let end = (start + CHUNK).min(region_ref.len());
        let mut out = Vec::with_capacity((end - start) * width);
        for &x in &region_ref[start..end] {
            coder.fingerprints_upto(g, x, r_max, &mut out);
        }
        out
    });
    let mut per_level: Vec<Vec<Fingerprint>> = (0..width).map(|_| Vec::with_capacity(region.len())).collect();
    for part in &parts {
        for row in part.chunks_exact(width) {
            for (r, &fp) in row.iter().enumerate() {
                per_level[r].push(fp);
            }
        }
    }
    drop(parts);
    let degrees: Vec<u32> = region.iter().map(|&x| g.degree(x)).collect();
    let mut coder = BallCoder::new();
    let mut levels: Vec<TypeLevel> = Vec::with_capacity(width);
    for (r, per_vertex) in per_level.into_iter().enumerate() {
        let mut stats: BTreeMap<Fingerprint, TypeStats> = BTreeMap::new();
        let mut parent = BTreeMap::new();
        for (i, &fp) in per_vertex.iter().enumerate() {
            let deg = degrees[i];
            let e = stats.entry(fp).or_insert(TypeStats { count: 0, root_degree: 0, degree_sum: 0 });
            if e.count == 0 && r > 0 {
                e.root_degree = coder.ball_type(g, region[i], r as u32).root_degree();
            }
            e.count += 1;
            e.degree_sum += u64::from(deg);
            if r > 0 {
                let up = levels[r - 1].per_vertex[i];
                if *parent.entry(fp).or_insert(up) != up {
                    return Err(Error::Inconsistent(format!("type {fp} at radius {r} has two parents")));
                }
            }
        }
        levels.push(TypeLevel { radius: r as u32, per_vertex, stats, parent });
    }
    Ok(TypeTable { region, levels })
}

/// Checks `τ(α) = Σ_{parent(β) = α} τ(β)` for every radius.
pub fn refinement_consistent(table: &TypeTable) -> bool {
    table.levels.windows(2).all(|w| {
        let mut sums: BTreeMap<Fingerprint, u64> = BTreeMap::new();
        for (beta, s) in &w[1].stats {
            *sums.entry(w[1].parent[beta]).or_default() += s.count;
        }
        sums.len() == w[0].stats.len() && w[0].stats.iter().all(|(a, s)| sums.get(a) == Some(&s.count))
    })
}

/// Recomputes full codes at radius `r` for `sample` and checks that distinct
/// codes never share a fingerprint. Returns the number of distinct codes.
pub fn audit_collisions<G: ColorAdjacency + ?Sized>(g: &G, sample: &[u32], r: u32) -> Result<usize> {
    let mut coder = BallCoder::new();
    let mut seen: BTreeMap<Fingerprint, BallType> = BTreeMap::new();
    for &x in sample {
        let t = coder.ball_type(g, x, r);
        let fp = t.fingerprint();
        match seen.get(&fp) {
            Some(prev) if *prev != t => return Err(Error::Inconsistent(format!("fingerprint collision at {fp}"))),
            Some(_) => {}
            None => {
                seen.insert(fp, t);
            }
        }
    }
    Ok(seen.len())
}

/// Vertices of `G_n` farther than `r` from the frontier `r_N`; their
/// `r`-balls are final.
pub fn stable_region(g: &ColoredGraph, log: &BuildLog, n: u32, r: u32) -> Vec<u32> {
    let dist = g.distances_within(&[log.frontier()], crate::color::ColorSet::FULL, r);
    (0..log.stage(n).g_size as u32).filter(|&v| dist[v as usize] == UNREACHED).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusClasses {
    pub radius: u32,
    pub classes: usize,
    pub largest: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub region_size: usize,
    pub progression: Vec<RadiusClasses>,
    /// Smallest radius at which all vertices have distinct types.
    pub separation_radius: Option<u32>,
    pub pass: bool,
    /// Partition at radius `r + 1` refines the one at `r`, for every `r`.
    pub refines: bool,
}

/// Partitions the region by type at each radius.
pub fn genericity_report(table: &TypeTable) -> GenericityReport {
    let n = table.region.len();
    let progression: Vec<RadiusClasses> = table
        .levels
        .iter()
        .map(|l| RadiusClasses {
            radius: l.radius,
            classes: l.stats.len(),
            largest: l.stats.values().map(|s| s.count).max().unwrap_or(0),
        })
        .collect();
    let separation_radius = progression.iter().find(|p| p.classes == n).map(|p| p.radius);
    let refines = table.levels.windows(2).all(|w| {
        let mut class_of: BTreeMap<Fingerprint, Fingerprint> = BTreeMap::new();
        w[1].per_vertex.iter().zip(&w[0].per_vertex).all(|(b, a)| *class_of.entry(*b).or_insert(*a) == *a)
    });
    GenericityReport { region_size: n, progression, separation_radius, pass: separation_radius.is_some(), refines }
}

/// `m_α`: the largest distance from a vertex of `targets` to the nearest
/// vertex of the table's region whose `r`-type is `alpha`.
pub fn holonomy_radius<G: ColorAdjacency + ?Sized>(g: &G, table: &TypeTable, r: u32, alpha: Fingerprint, targets: &[u32]) -> Result<u32> {
    let level = table.level(r);
    let sources: Vec<u32> = table.region.iter().zip(&level.per_vertex).filter(|(_, t)| **t == alpha).map(|(&v, _)| v).collect();
    if sources.is_empty() {
        return Err(Error::UnrealizedType);
    }
    let dist = multi_source_distances(g, &sources);
    Ok(targets.iter().map(|&x| dist[x as usize]).max().unwrap_or(0))
}

fn multi_source_distances<G: ColorAdjacency + ?Sized>(g: &G, sources: &[u32]) -> Vec<u32> {
    let mut dist = vec![UNREACHED; g.vertex_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s as usize] = 0;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for c in Color::ALL {
            if let Some(w) = g.neighbor(v, c) {
                if dist[w as usize] == UNREACHED {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    dist
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectRow {
    pub generator: Color,
    pub radius: u32,
    /// `max_α |τ(α) − Σ τ(s_i)|`.
    pub defect: u64,
    pub bound: u64,
    pub pass: bool,
}

/// Pushforward defect of the counting measure on `omega` under one
/// generator at radius `r`.
///
/// `Σ τ(s_i)` is computed through the `(r+1)`-types: each `(r+1)`-type `β`
/// determines the `r`-type of the image of its root. A second count of the
/// image types taken vertex by vertex must agree. Needs `r + 1` levels on
/// a region containing `omega` and its neighbors.
pub fn pushforward_defect<G: ColorAdjacency + ?Sized>(
    g: &G,
    table: &TypeTable,
    r: u32,
    generator: Color,
    omega: &[u32],
    boundary_size: u64,
) -> Result<DefectRow> {
    if r + 1 > table.r_max() {
        return Err(Error::RadiusMismatch(r + 1, table.r_max()));
    }
    let missing = || Error::Inconsistent("vertex outside the typed region".into());
    let (lower, upper) = (table.level(r), table.level(r + 1));
    let mut tau: HashMap<Fingerprint, i64> = HashMap::new();
    let mut tau_up: HashMap<Fingerprint, u64> = HashMap::new();
    let mut image_type: HashMap<Fingerprint, Fingerprint> = HashMap::new();
    let mut direct: HashMap<Fingerprint, i64> = HashMap::new();
    for &x in omega {
        let i = table.position(x).ok_or_else(missing)?;
        *tau.entry(lower.per_vertex[i]).or_default() += 1;
        let beta = upper.per_vertex[i];
        *tau_up.entry(beta).or_default() += 1;
        let y = g.neighbor(x, generator).unwrap_or(x);
        let alpha = lower.per_vertex[table.position(y).ok_or_else(missing)?];
        if *image_type.entry(beta).or_insert(alpha) != alpha {
            return Err(Error::Inconsistent(format!("(r+1)-type {beta} has two image types")));
        }
        *direct.entry(alpha).or_default() += 1;
    }
    let mut pushed: HashMap<Fingerprint, i64> = HashMap::new();
    for (beta, &count) in &tau_up {
        *pushed.entry(image_type[beta]).or_default() += count as i64;
    }
    if pushed != direct {
        return Err(Error::Inconsistent("pushforward routes disagree".into()));
    }
    let keys: BTreeSet<Fingerprint> = tau.keys().chain(pushed.keys()).copied().collect();
    let defect = keys
        .iter()
        .map(|k| (tau.get(k).copied().unwrap_or(0) - pushed.get(k).copied().unwrap_or(0)).unsigned_abs())
        .max()
        .unwrap_or(0);
    let bound = 2 * boundary_size;
    Ok(DefectRow { generator, radius: r, defect, bound, pass: defect <= bound })
}

/// Shortest word (BFS over the orbit, letters `A < B < C < D`) taking `x` to
/// a vertex whose `r`-type is `target`, within `budget` letters.
pub fn transport_check<G: ColorAdjacency + ?Sized>(g: &G, x: u32, target: Fingerprint, r: u32, budget: u32) -> Option<Word> {
    let mut coder = BallCoder::new();
    let mut parent: BTreeMap<u32, (u32, Color)> = BTreeMap::new();
    let mut depth: BTreeMap<u32, u32> = BTreeMap::new();
    let mut queue = VecDeque::from([x]);
    depth.insert(x, 0);
    while let Some(v) = queue.pop_front() {
        if coder.fingerprint(g, v, r) == target {
            let mut applied = Vec::new();
            let mut cur = v;
            while let Some(&(p, c)) = parent.get(&cur) {
                applied.push(c);
                cur = p;
            }
            // `applied` is last-applied first, which is written order
            return Some(Word::reduce(applied));
        }
        let d = depth[&v];
        if d == budget {
            continue;
        }
        for c in Color::ALL {
            if let Some(w) = g.neighbor(v, c) {
                if !depth.contains_key(&w) {
                    depth.insert(w, d + 1);
                    parent.insert(w, (v, c));
                    queue.push_back(w);
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantorRow {
    pub radius: u32,
    pub types: usize,
    /// Types with at least two refinements at the next radius.
    pub splitting: usize,
}

/// Per radius, how many realized types split at the next radius.
pub fn cantor_indicator(table: &TypeTable) -> Vec<CantorRow> {
    table
        .levels
        .windows(2)
        .map(|w| {
            let mut children: BTreeMap<Fingerprint, usize> = BTreeMap::new();
            for a in w[1].parent.values() {
                *children.entry(*a).or_default() += 1;
            }
            CantorRow { radius: w[0].radius, types: w[0].stats.len(), splitting: children.values().filter(|&&c| c >= 2).count() }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DihedralReport {
    pub n: u32,
    pub radius: u32,
    /// `m_α` for the type of vertex `1`, over the region `{1, ..., n-1}`.
    pub holonomy_radius: u32,
    pub genericity: GenericityReport,
    /// Transport from the middle vertex to the type of `1`.
    pub transport_budget: u32,
    pub transport_found: bool,
    pub pushforward_defect: u64,
}

/// Non-minimality indicators of the truncated dihedral action.
pub fn dihedral_report<E: Executor>(n: u32, r: u32, budget: u32, exec: &E) -> Result<DihedralReport> {
    let demo = DihedralDemo::new(n)?;
    let g = &demo.graph;
    let all: Vec<u32> = (0..n).collect();
    let table = compute_types(g, r + 1, &all, exec)?;
    let region = demo.region();
    let alpha = table.type_of(demo.vertex(1), r).expect("typed");
    // the frontier's type is an artifact of truncation, so it is not a source
    let region_table = compute_types(g, r, &region, exec)?;
    let holonomy = holonomy_radius(g, &region_table, r, alpha, &region)?;
    let middle = demo.vertex(n / 2);
    let found = transport_check(g, middle, alpha, r, budget).is_some();
    let mut defect = 0;
    for c in Color::ALL {
        defect = defect.max(pushforward_defect(g, &table, r, c, &region, 1)?.defect);
    }
    Ok(DihedralReport {
        n,
        radius: r,
        holonomy_radius: holonomy,
        genericity: genericity_report(&region_table),
        transport_budget: budget,
        transport_found: found,
        pushforward_defect: defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::make_cycle_block;
    use crate::exec::Sequential;

    #[test]
    fn cycle_has_one_type_below_half_length() {
        let g = make_cycle_block(8);
        let all: Vec<u32> = (0..16).collect();
        let t = compute_types(&g, 7, &all, &Sequential).unwrap();
        for r in 0..8 {
            // A/B alternation makes even and odd vertices mirror images,
            // which are isomorphic as rooted colored balls
            assert_eq!(t.level(r).stats.len(), 1, "r={r}");
        }
        assert!(refinement_consistent(&t));
    }

    #[test]
    fn refinement_on_built_graph() {
        let (g, log) = crate::construction::build(&crate::construction::ConstructionConfig { levels: 2, ..Default::default() }).unwrap();
        let region: Vec<u32> = (0..log.total_vertices() as u32).collect();
        let t = compute_types(&g, 4, &region, &Sequential).unwrap();
        assert!(refinement_consistent(&t));
        assert!(genericity_report(&t).refines);
        // p is the only vertex whose 1-ball is a single D-edge seen from a leaf with a degree-3 partner
        let p_type = t.type_of(0, 2).unwrap();
        assert_eq!(t.level(2).stats[&p_type].count, 1);
        assert_eq!(audit_collisions(&g, &region[..300], 3).unwrap(), t.level(3).per_vertex[..300].iter().collect::<BTreeSet<_>>().len());
    }

    #[test]
    fn pushforward_on_closed_component_is_exact() {
        let g = make_cycle_block(6);
        let all: Vec<u32> = (0..12).collect();
        let t = compute_types(&g, 3, &all, &Sequential).unwrap();
        for c in Color::ALL {
            let row = pushforward_defect(&g, &t, 2, c, &all, 0).unwrap();
            assert_eq!(row.defect, 0);
            assert!(row.pass);
        }
    }

    #[test]
    fn dihedral_is_not_repetitive() {
        let small = dihedral_report(50, 1, 10, &Sequential).unwrap();
        let large = dihedral_report(100, 1, 10, &Sequential).unwrap();
        assert!(large.holonomy_radius as f64 >= 1.5 * small.holonomy_radius as f64);
        assert!(!large.transport_found);
        assert!(small.pushforward_defect <= 2);
    }

    #[test]
    fn transport_returns_identity_for_own_type() {
        let g = make_cycle_block(5);
        let fp = BallCoder::new().fingerprint(&g, 3, 2);
        assert!(transport_check(&g, 3, fp, 2, 0).unwrap().is_empty());
    }
}
