//! The staged builder `G_0 ⊂ G_1 ⊂ ... ⊂ G_N`.
//!
//! Vertex ids are assigned so that every `G_n` is the prefix
//! `0..|V(G_n)|` of the final graph; `Ω_n` is then the id range
//! `|V(G_{n-1})|..|V(G_n)|`. Within a stage the order is: the block `H_n`,
//! the attached copies (by net index, then anchor id), the word path.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::blocks::{make_cubic_block, make_cycle_block, CubicBlockInfo, CubicBlockParams};
use crate::color::Color;
use crate::error::{Error, Result};
use crate::graph::{ColorAdjacency, ColoredGraph, Role, VertexMeta};
use crate::nets::{check_density_with_diameter, partition_nets, DensityCheck, NetSchedule};
use crate::word::{nth_word, Word};

/// The single vertex `p` of `G_0`.
pub const P: u32 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleMode {
    /// `s_i = m^i * 2^|V(G_{i-1})|`.
    Paper,
    /// `s_i = m * max(|V(G_{i-1})|, 1)`.
    Desk,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionConfig {
    pub m: u64,
    pub levels: u32,
    pub schedule: ScheduleMode,
    /// Also require `s_i >= 10^(i+1)`.
    pub net_floor: bool,
    pub diam_multiplier: u64,
    pub girth: u32,
    pub chord_span: u32,
    pub seed: u64,
    /// Freeness radius used downstream; needs `girth >= 2k + 1`.
    pub free_radius: u32,
    pub max_vertices: u64,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        ConstructionConfig {
            m: 12,
            levels: 3,
            schedule: ScheduleMode::Desk,
            net_floor: false,
            diam_multiplier: 10,
            girth: 12,
            chord_span: 13,
            seed: 42,
            free_radius: 5,
            max_vertices: 50_000_000,
        }
    }
}

impl ConstructionConfig {
    /// The smaller configuration used for the genericity checks.
    pub fn ci() -> Self {
        ConstructionConfig { m: 11, diam_multiplier: 2, girth: 8, chord_span: 9, free_radius: 3, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.levels == 0 {
            return bad("levels must be at least 1".into());
        }
        match self.schedule {
            ScheduleMode::Paper if self.m <= 10 => return bad(format!("paper schedule needs m > 10, got {}", self.m)),
            ScheduleMode::Desk if self.m < 3 => return bad(format!("desk schedule needs m >= 3, got {}", self.m)),
            _ => {}
        }
        if self.diam_multiplier < 2 {
            return bad(format!("diam_multiplier must be >= 2, got {}", self.diam_multiplier));
        }
        if self.girth < 2 * self.free_radius + 1 {
            return bad(format!("girth {} must be >= 2k + 1 for k = {}", self.girth, self.free_radius));
        }
        if self.chord_span % 2 == 0 || self.chord_span + 1 < self.girth {
            return bad(format!("chord span {} must be odd and >= girth - 1", self.chord_span));
        }
        Ok(())
    }

    /// `s_i` given `|V(G_{i-1})|`.
    pub fn scale(&self, i: u32, prev_size: u64) -> Result<u64> {
        let overflow = || Error::Infeasible { stage: i, reason: format!("s_{i} overflows 64 bits") };
        match self.schedule {
            ScheduleMode::Desk => self.m.checked_mul(prev_size.max(1)).ok_or_else(overflow),
            ScheduleMode::Paper => {
                let mi = self.m.checked_pow(i).ok_or_else(overflow)?;
                let two = u32::try_from(prev_size).ok().and_then(|e| 1u64.checked_shl(e)).filter(|_| prev_size < 64);
                mi.checked_mul(two.ok_or_else(overflow)?).ok_or_else(overflow)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BlockInfo {
    Point,
    Triangle,
    Cycle { half: u32 },
    Cubic(CubicBlockInfo),
}

/// Copies of `G_k` hung on the vertices of `R^n_i`: copy `j` occupies
/// `first + j * size .. first + (j + 1) * size` and its distinguished
/// vertex is joined by `D` to `anchors[j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopyGroup {
    pub net: u32,
    pub copy_of: u32,
    pub size: u32,
    pub first: u32,
    pub anchors: Vec<u32>,
}

impl CopyGroup {
    pub fn range(&self, j: usize) -> Range<u32> {
        let start = self.first + j as u32 * self.size;
        start..start + self.size
    }

    pub fn total(&self) -> u64 {
        u64::from(self.size) * self.anchors.len() as u64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageLog {
    pub stage: u32,
    /// `s_n` (absent for stages 0 and 1).
    pub scale: Option<u64>,
    pub block: BlockInfo,
    pub h_range: Range<u32>,
    /// `Ω_n = V(G_n) ∖ V(G_{n-1})`.
    pub omega: Range<u32>,
    /// `R^n_1, ..., R^n_n` (global ids); `R^n_{n+1}` is the rest of `H_n`.
    pub nets: Vec<Vec<u32>>,
    pub last_net_size: u64,
    pub covering_radius: Vec<u32>,
    pub density: Vec<DensityCheck>,
    pub copies: Vec<CopyGroup>,
    /// `D`-edge `(r_{n-1}, vertex of R^n_n)` attaching the previous stage.
    pub previous_attachment: Option<(u32, u32)>,
    pub x: Option<u32>,
    pub r: Option<u32>,
    /// The word attached at this stage, its path and the start vertex that
    /// the word must move.
    pub word: Option<String>,
    pub word_path: Range<u32>,
    pub witness: Option<u32>,
    pub g_size: u64,
    pub h_size: u64,
    /// `|V(G_n) ∖ V(H_n)| / |V(H_n)|`.
    pub attach_ratio_h: f64,
    /// `|V(G_n) ∖ V(H_n)| / |V(G_n)|`.
    pub attach_ratio_g: f64,
}

impl StageLog {
    /// The distinguished vertex `r_n` (`p` for `n = 0`).
    pub fn distinguished(&self) -> u32 {
        self.r.unwrap_or(P)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildLog {
    pub config: ConstructionConfig,
    pub scales: Vec<u64>,
    pub stages: Vec<StageLog>,
}

impl BuildLog {
    pub fn levels(&self) -> u32 {
        self.stages.len() as u32 - 1
    }

    pub fn stage(&self, n: u32) -> &StageLog {
        &self.stages[n as usize]
    }

    pub fn omega(&self, n: u32) -> Range<u32> {
        self.stage(n).omega.clone()
    }

    /// `r_N`, where further stages would attach.
    pub fn frontier(&self) -> u32 {
        self.stages.last().expect("stage 0").distinguished()
    }

    pub fn total_vertices(&self) -> u64 {
        self.stages.last().expect("stage 0").g_size
    }
}

fn meta(stage: u32, role: Role) -> VertexMeta {
    VertexMeta::new(stage, role)
}

fn stage_zero() -> StageLog {
    StageLog {
        stage: 0,
        scale: None,
        block: BlockInfo::Point,
        h_range: 0..1,
        omega: 0..1,
        nets: Vec::new(),
        last_net_size: 0,
        covering_radius: Vec::new(),
        density: Vec::new(),
        copies: Vec::new(),
        previous_attachment: None,
        x: None,
        r: None,
        word: None,
        word_path: 1..1,
        witness: None,
        g_size: 1,
        h_size: 1,
        attach_ratio_h: 0.0,
        attach_ratio_g: 0.0,
    }
}

fn stage_one(g: &mut ColoredGraph) -> Result<StageLog> {
    let h = g.add_vertices(3, meta(1, Role::Block));
    let (q, r1, t) = (h.start, h.start + 1, h.start + 2);
    g.add_edge(q, r1, Color::A)?;
    g.add_edge(r1, t, Color::B)?;
    g.add_edge(t, q, Color::C)?;
    g.add_edge(P, q, Color::D)?;
    g.set_meta(r1, meta(1, Role::Frontier));
    Ok(StageLog {
        stage: 1,
        block: BlockInfo::Triangle,
        h_range: h.clone(),
        omega: h,
        previous_attachment: Some((P, q)),
        r: Some(r1),
        word_path: 4..4,
        g_size: 4,
        h_size: 3,
        attach_ratio_h: 1.0 / 3.0,
        attach_ratio_g: 0.25,
        ..stage_zero()
    })
}

/// Appends the path for `w` hanging off `x` by a `D`-edge; returns the
/// path range and the start vertex `z` with `w(z) != z`.
fn attach_word_path(g: &mut ColoredGraph, stage: u32, x: u32, w: &Word) -> Result<(Range<u32>, u32)> {
    let first_is_d = w.letter(1) == Color::D;
    let k = w.len() as u32;
    // w_1 = D: y_1..y_k, x -D- y_1, (y_i, y_{i+1}) colored w_{i+1}
    // otherwise: y_0..y_k, x -D- y_0, (y_{i-1}, y_i) colored w_i
    let count = if first_is_d { k } else { k + 1 };
    let path = g.add_vertices(count as usize, meta(stage, Role::WordPath));
    let start = path.start;
    let y = |i: u32| start + if first_is_d { i - 1 } else { i };
    if first_is_d {
        g.add_edge(x, y(1), Color::D)?;
        for i in 1..k {
            g.add_edge(y(i), y(i + 1), w.letter(i as usize + 1))?;
        }
        Ok((path, x))
    } else {
        g.add_edge(x, y(0), Color::D)?;
        for i in 1..=k {
            g.add_edge(y(i - 1), y(i), w.letter(i as usize))?;
        }
        Ok((path, start))
    }
}

/// Runs the construction through `config.levels` stages.
pub fn build(config: &ConstructionConfig) -> Result<(ColoredGraph, BuildLog)> {
    config.validate()?;
    let mut g = ColoredGraph::new();
    g.add_vertex(meta(0, Role::Block));
    let mut log = BuildLog { config: config.clone(), scales: Vec::new(), stages: alloc::vec![stage_zero()] };
    log.stages.push(stage_one(&mut g)?);
    for n in 2..=config.levels {
        let stage = build_stage(&mut g, &mut log, n)?;
        log.stages.push(stage);
    }
    Ok((g, log))
}

fn build_stage(g: &mut ColoredGraph, log: &mut BuildLog, n: u32) -> Result<StageLog> {
    let config = &log.config;
    let infeasible = |reason: String| Error::Infeasible { stage: n, reason };
    while (log.scales.len() as u32) < n {
        let i = log.scales.len() as u32 + 1;
        let prev = log.stage(i - 1).g_size;
        log.scales.push(config.scale(i, prev)?);
    }
    let scales = log.scales[..n as usize].to_vec();
    let schedule = if config.net_floor { NetSchedule::with_floor(scales) } else { NetSchedule::new(scales) }
        .map_err(|e| infeasible(e.to_string()))?;
    let s_n = *schedule.scales().last().expect("n >= 1");
    let min_diam = config
        .diam_multiplier
        .checked_mul(s_n)
        .and_then(|d| d.checked_add(1))
        .filter(|&d| d < u64::from(u32::MAX / 4))
        .ok_or_else(|| Error::Budget { what: "block diameter", needed: u64::MAX, budget: config.max_vertices })?
        as u32;

    let (block, info, diameter) = if n % 2 == 0 {
        if 2 * u64::from(min_diam) > config.max_vertices {
            return Err(Error::Budget { what: "cycle block vertices", needed: 2 * u64::from(min_diam), budget: config.max_vertices });
        }
        (make_cycle_block(min_diam), BlockInfo::Cycle { half: min_diam }, min_diam)
    } else {
        let params = CubicBlockParams {
            min_diam,
            girth: config.girth,
            chord_span: config.chord_span,
            seed: config.seed ^ u64::from(n).wrapping_mul(0x9e37_79b9_7f4a_7c15),
            max_vertices: config.max_vertices.saturating_sub(g.vertex_count() as u64),
        };
        let (block, info) = make_cubic_block(&params)?;
        let d = info.diameter_lower_bound;
        (block, BlockInfo::Cubic(info), d)
    };

    let partition = partition_nets(&block, &schedule, config.diam_multiplier, Some(diameter))?;
    let density = schedule
        .scales()
        .iter()
        .zip(&partition.parts)
        .map(|(&s, part)| check_density_with_diameter(&block, part, s, diameter))
        .collect();

    let prev_size = g.vertex_count() as u32;
    let h_size = block.vertex_count() as u32;
    let base = g.append_graph(&block, meta(n, Role::Block));
    drop(block);
    let h_range = base..base + h_size;
    let parts: Vec<Vec<u32>> = partition.parts.iter().map(|p| p.iter().map(|&v| v + base).collect()).collect();
    for (i, part) in parts.iter().enumerate() {
        for &v in part {
            g.set_meta(v, meta(n, Role::Net(i as u16 + 1)));
        }
    }

    let mut copies = Vec::new();
    for i in 1..n {
        let k = i - 1;
        let prev = log.stage(k);
        let size = prev.g_size as u32;
        let anchor_in_copy = prev.distinguished();
        let anchors = parts[i as usize - 1].clone();
        let group = CopyGroup { net: i, copy_of: k, size, first: g.vertex_count() as u32, anchors };
        let needed = g.vertex_count() as u64 + group.total();
        if needed > config.max_vertices {
            return Err(Error::Budget { what: "graph vertices", needed, budget: config.max_vertices });
        }
        for &a in &group.anchors {
            let range = g.append_prefix_copy(size, meta(n, Role::CopyOf(k as u16)));
            g.add_edge(a, range.start + anchor_in_copy, Color::D)?;
        }
        copies.push(group);
    }

    let r_prev = log.stage(n - 1).distinguished();
    let last = &parts[n as usize];
    let attach_at = *parts[n as usize - 1].first().ok_or_else(|| infeasible(format!("R^{n}_{n} is empty")))?;
    g.add_edge(r_prev, attach_at, Color::D)?;

    if last.len() < 2 {
        return Err(infeasible(format!("R^{n}_{} has {} vertices, need 2", n + 1, last.len())));
    }
    let x = last[0];
    let word = nth_word(u64::from(n - 1));
    let (word_path, witness) = attach_word_path(g, n, x, &word)?;
    let dist = g.distances_within(&[x], crate::color::ColorSet::TILDE, u32::MAX);
    let r = *last[1..]
        .iter()
        .max_by(|&&a, &&b| dist[a as usize].cmp(&dist[b as usize]).then(b.cmp(&a)))
        .expect("two or more");
    g.set_meta(x, meta(n, Role::WordAnchor));
    g.set_meta(r, meta(n, Role::Frontier));

    let g_size = g.vertex_count() as u64;
    let attached = (g_size - u64::from(h_size)) as f64;
    Ok(StageLog {
        stage: n,
        scale: Some(s_n),
        block: info,
        h_range,
        omega: prev_size..g_size as u32,
        last_net_size: last.len() as u64,
        nets: parts[..n as usize].to_vec(),
        covering_radius: partition.covering_radius,
        density,
        copies,
        previous_attachment: Some((r_prev, attach_at)),
        x: Some(x),
        r: Some(r),
        word: Some(word.to_string()),
        word_path,
        witness: Some(witness),
        g_size,
        h_size: u64::from(h_size),
        attach_ratio_h: attached / f64::from(h_size),
        attach_ratio_g: attached / g_size as f64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub stage: u32,
    pub word: String,
    pub witness: u32,
    pub image: u32,
    pub moved: bool,
}

/// For every stage `2..=n_max`, applies its word to its witness vertex.
pub fn faithfulness_witnesses<G: ColorAdjacency + ?Sized>(g: &G, log: &BuildLog, n_max: u32) -> Vec<WitnessCheck> {
    log.stages
        .iter()
        .filter(|s| s.stage <= n_max)
        .filter_map(|s| {
            let word: Word = s.word.as_ref()?.parse().ok()?;
            let witness = s.witness?;
            let image = word.apply(g, witness);
            Some(WitnessCheck { stage: s.stage, word: word.to_string(), witness, image, moved: image != witness })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub stage: u32,
    /// Measured `∂G_n`: vertices of `G_n` with a neighbor outside `G_n`.
    pub g_boundary: Vec<u32>,
    /// Measured `∂Ω_n`.
    pub omega_boundary: Vec<u32>,
    /// At the last stage the frontier `r_N` is where the construction
    /// continues; it is counted as boundary.
    pub frontier_counted: bool,
}

impl BoundaryReport {
    pub fn g_boundary_size(&self) -> usize {
        self.g_boundary.len() + usize::from(self.frontier_counted)
    }

    pub fn omega_boundary_size(&self) -> usize {
        self.omega_boundary.len() + usize::from(self.frontier_counted)
    }
}

/// Boundaries of `G_n` and `Ω_n` for every stage.
pub fn boundaries(g: &ColoredGraph, log: &BuildLog) -> Vec<BoundaryReport> {
    let levels = log.levels();
    log.stages
        .iter()
        .map(|s| {
            let end = s.g_size as u32;
            let frontier_counted = s.stage == levels;
            BoundaryReport {
                stage: s.stage,
                g_boundary: g.range_boundary(0..end),
                omega_boundary: g.range_boundary(s.omega.clone()),
                frontier_counted,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::ColorSet;

    fn small() -> ConstructionConfig {
        ConstructionConfig { m: 3, levels: 3, diam_multiplier: 2, girth: 6, chord_span: 5, free_radius: 2, ..Default::default() }
    }

    #[test]
    fn stage_one_shape() {
        let (g, log) = build(&ConstructionConfig { levels: 1, ..Default::default() }).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.edges().filter(|e| e.2 == Color::D).count(), 1);
        assert_eq!(log.stage(1).r, Some(2));
    }

    #[test]
    fn desk_build_invariants() {
        let (g, log) = build(&small()).unwrap();
        g.check_proper().unwrap();
        assert!(g.d_bridges());
        assert!(g.is_connected());
        assert_eq!(log.total_vertices(), g.vertex_count() as u64);
        for b in boundaries(&g, &log) {
            let n = b.stage;
            if n < log.levels() {
                assert_eq!(b.g_boundary, [log.stage(n).distinguished()], "stage {n}");
            } else {
                assert!(b.g_boundary.is_empty());
            }
            assert!(b.omega_boundary_size() <= 2, "stage {n}");
        }
        for w in faithfulness_witnesses(&g, &log, 3) {
            assert!(w.moved, "{w:?}");
        }
        for s in &log.stages[2..] {
            for d in &s.density {
                assert_ne!(d.outcome, crate::nets::DensityOutcome::Fail);
            }
            for (copy, &anchor) in s.copies.iter().flat_map(|c| (0..c.anchors.len()).map(move |j| (c.range(j), &c.anchors[j]))) {
                assert!(copy.start >= s.h_range.end && anchor < s.h_range.end);
            }
        }
    }

    #[test]
    fn prefix_property() {
        let (g, log) = build(&small()).unwrap();
        // G_n is the prefix; only r_n links it onward
        for s in &log.stages[..log.stages.len() - 1] {
            let end = s.g_size as u32;
            let leaving: Vec<_> = g.edges().filter(|&(u, v, _)| u < end && v >= end).collect();
            assert_eq!(leaving.len(), 1);
            assert_eq!(leaving[0].0, s.distinguished());
            assert_eq!(leaving[0].2, Color::D);
        }
    }

    #[test]
    fn word_paths_follow_the_case_split() {
        let mut g = ColoredGraph::with_vertices(2);
        let w: Word = "AD".parse().unwrap();
        let (path, z) = attach_word_path(&mut g, 2, 0, &w).unwrap();
        assert_eq!((path, z), (2..4, 0));
        assert_eq!(w.trace(&g, 0), [0, 2, 3]);
        let w: Word = "BA".parse().unwrap();
        let (path, z) = attach_word_path(&mut g, 3, 1, &w).unwrap();
        assert_eq!((path, z), (4..7, 4));
        assert_eq!(g.neighbor(1, Color::D), Some(4));
        assert_eq!(w.trace(&g, 4), [4, 5, 6]);
    }

    #[test]
    fn desk_scales() {
        let (_, log) = build(&ConstructionConfig { levels: 2, ..Default::default() }).unwrap();
        assert_eq!(log.scales, [12, 48]);
        assert_eq!(log.stage(2).block, BlockInfo::Cycle { half: 481 });
        assert_eq!(log.stage(2).word.as_deref(), Some("A"));
    }

    #[test]
    fn exponential_mode_needs_large_m() {
        let cfg = ConstructionConfig { m: 5, schedule: ScheduleMode::Paper, ..Default::default() };
        assert!(matches!(build(&cfg), Err(Error::Config(_))));
        let cfg = ConstructionConfig { schedule: ScheduleMode::Paper, ..Default::default() };
        assert!(matches!(build(&cfg), Err(Error::Infeasible { stage: 3, .. })));
    }

    #[test]
    fn cubic_stage_is_free_inside() {
        let (g, log) = build(&small()).unwrap();
        let h = log.stage(3).h_range.clone();
        assert!(h.clone().step_by(11).all(|x| crate::action::is_free(&g, x, 2, ColorSet::TILDE)));
    }
}
